#include "noma/sweep.hpp"

#include "noma/analytic.hpp"
#include "noma/config.hpp"
#include "noma/errors.hpp"
#include "noma/montecarlo.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

namespace noma::cli {

namespace {

constexpr std::string_view kCsvHeader = "axis,axis_value,engine,stream,user_order,value,ci_lo,ci_hi,err_est";

SystemConfig at_axis(SystemConfig cfg, Axis axis, double v) {
    switch (axis) {
        case Axis::SnrDb: cfg.avg_snr = db_to_linear(v); break;
        case Axis::Radius: cfg.radius = v; break;
        case Axis::CorrCoeff: cfg.corr_coeff = v; break;
    }
    return cfg;
}

ResultRow blank_row(const SweepSpec& spec, double v, Engine engine, const Query& q) {
    ResultRow r;
    r.axis = spec.axis;
    r.axis_value = v;
    r.engine = engine;
    r.query = q;
    return r;
}

void fill_analytic(ResultRow& row, const Scenario& scn) {
    using namespace analytic;
    const Query& q = row.query;
    if (q.is_goodput()) {
        GoodputMethod method = GoodputMethod::Exact;
        if (row.engine == Engine::AnalyticAsymptoticHigh) method = GoodputMethod::AsymptoticSmallD;
        if (row.engine == Engine::AnalyticAsymptoticLow) method = GoodputMethod::AsymptoticLargeD;
        const GoodputResult g = goodput(scn, method);
        row.value = g.value;
        row.err_est = g.err_est;
        return;
    }
    const OutageQuery oq{*q.stream, *q.user_order, std::nullopt};
    OutageResult r;
    switch (row.engine) {
        case Engine::AnalyticExact: r = avg_outage(scn, oq); break;
        case Engine::AnalyticAsymptoticHigh: r = asymptotic_outage_high_snr(scn, oq); break;
        case Engine::AnalyticAsymptoticLow: r = asymptotic_outage_large_D(scn, oq); break;
        case Engine::MonteCarlo: break;
    }
    row.value = r.value;
    row.err_est = r.err_est;
}

void check_query(const Query& q, const SystemConfig& cfg) {
    if (q.is_goodput()) return;
    if (*q.stream < 1 || *q.stream > cfg.n_streams || *q.user_order < 1 || *q.user_order > cfg.group_cap) {
        throw ParameterDomainError("query (" + std::to_string(*q.stream) + "," + std::to_string(*q.user_order) +
                                   ") is outside the configured streams or group cap");
    }
}

bool row_less(const ResultRow& a, const ResultRow& b) {
    if (a.axis_value != b.axis_value) return a.axis_value < b.axis_value;
    if (a.engine != b.engine) return a.engine < b.engine;
    // Outage rows first, goodput last.
    const int am = a.query.stream.value_or(std::numeric_limits<int>::max());
    const int bm = b.query.stream.value_or(std::numeric_limits<int>::max());
    if (am != bm) return am < bm;
    return a.query.user_order.value_or(std::numeric_limits<int>::max()) <
           b.query.user_order.value_or(std::numeric_limits<int>::max());
}

}  // namespace

std::string_view to_string(Axis axis) {
    switch (axis) {
        case Axis::SnrDb: return "snr_db";
        case Axis::Radius: return "radius";
        case Axis::CorrCoeff: return "corr_coeff";
    }
    return "?";
}

std::string_view to_string(Engine engine) {
    switch (engine) {
        case Engine::AnalyticExact: return "analytic-exact";
        case Engine::AnalyticAsymptoticHigh: return "analytic-asymptotic-high";
        case Engine::AnalyticAsymptoticLow: return "analytic-asymptotic-low";
        case Engine::MonteCarlo: return "montecarlo";
    }
    return "?";
}

Axis parse_axis(std::string_view name) {
    for (Axis a : {Axis::SnrDb, Axis::Radius, Axis::CorrCoeff})
        if (to_string(a) == name) return a;
    throw ConfigError("unknown sweep axis '" + std::string(name) + "'", "axis", 0);
}

Engine parse_engine(std::string_view name) {
    for (Engine e : {Engine::AnalyticExact, Engine::AnalyticAsymptoticHigh, Engine::AnalyticAsymptoticLow,
                     Engine::MonteCarlo})
        if (to_string(e) == name) return e;
    throw ConfigError("unknown engine '" + std::string(name) + "'", "engine", 0);
}

Format parse_format(std::string_view name) {
    if (name == "csv") return Format::Csv;
    if (name == "json") return Format::Json;
    throw ConfigError("unknown output format '" + std::string(name) + "'", "format", 0);
}

Query parse_query(std::string_view text) {
    if (text == "goodput") return Query::goodput();
    const auto comma = text.find(',');
    int m = 0, k = 0;
    bool ok = comma != std::string_view::npos;
    if (ok) {
        const auto a = std::from_chars(text.data(), text.data() + comma, m);
        const auto b = std::from_chars(text.data() + comma + 1, text.data() + text.size(), k);
        ok = a.ec == std::errc() && a.ptr == text.data() + comma && b.ec == std::errc() &&
             b.ptr == text.data() + text.size() && m >= 1 && k >= 1;
    }
    if (!ok) throw ConfigError("query must be 'm,k' or 'goodput', got '" + std::string(text) + "'", "query", 0);
    return Query::outage(m, k);
}

void SweepSpec::validate() const {
    if (grid.empty()) throw ConfigError("sweep grid is empty", "grid", 0);
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1])) throw ConfigError("sweep grid must be strictly increasing", "grid", 0);
    if (engines.empty()) throw ConfigError("at least one engine is required", "engine", 0);
    if (queries.empty()) throw ConfigError("at least one query is required", "query", 0);
    for (Engine e : engines)
        if (e == Engine::MonteCarlo && mc_trials < 1000)
            throw ConfigError("Monte Carlo needs at least 1000 trials", "trials", 0);
}

std::vector<double> linear_grid(double lo, double hi, double step) {
    if (!(step > 0.0) || !(hi >= lo)) throw ConfigError("grid needs lo <= hi and step > 0", "grid", 0);
    const auto n = static_cast<long long>(std::floor((hi - lo) / step + 1e-9));
    std::vector<double> g;
    g.reserve(static_cast<std::size_t>(n + 1));
    for (long long i = 0; i <= n; ++i) g.push_back(lo + static_cast<double>(i) * step);
    return g;
}

std::vector<double> parse_grid(std::string_view text) {
    auto number = [&](std::string_view s) {
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size())
            throw ConfigError("cannot parse grid value '" + std::string(s) + "'", "grid", 0);
        return v;
    };
    if (text.find(':') != std::string_view::npos) {
        const auto c1 = text.find(':');
        const auto c2 = text.find(':', c1 + 1);
        if (c2 == std::string_view::npos) throw ConfigError("grid range must be lo:hi:step", "grid", 0);
        return linear_grid(number(text.substr(0, c1)), number(text.substr(c1 + 1, c2 - c1 - 1)),
                           number(text.substr(c2 + 1)));
    }
    std::vector<double> g;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto comma = text.find(',', start);
        const auto end = comma == std::string_view::npos ? text.size() : comma;
        g.push_back(number(text.substr(start, end - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return g;
}

ResultTable run_sweep(const SweepSpec& spec, const SystemConfig& cfg, int threads) {
    spec.validate();
    ResultTable table;
    for (double v : spec.grid) {
        std::optional<Scenario> scn;
        std::string point_error;
        try {
            scn = make_scenario(at_axis(cfg, spec.axis, v));
        } catch (const Error& e) {
            point_error = e.what();
        }

        for (Engine engine : spec.engines) {
            std::optional<mc::Tally> tally;
            std::string engine_error = point_error;
            if (scn && engine == Engine::MonteCarlo) {
                try {
                    mc::SimulationOptions opts;
                    opts.threads = threads;
                    tally = mc::simulate(*scn, spec.mc_trials, spec.seed, opts);
                } catch (const Error& e) {
                    engine_error = e.what();
                }
            }
            for (const Query& q : spec.queries) {
                ResultRow row = blank_row(spec, v, engine, q);
                try {
                    if (!engine_error.empty()) throw Error(engine_error);
                    check_query(q, scn->cfg);
                    if (engine == Engine::MonteCarlo) {
                        const mc::Estimate e = q.is_goodput()
                                                   ? mc::goodput_estimate(*tally, spec.seed)
                                                   : mc::outage_estimate(*tally, *q.stream, *q.user_order, spec.seed);
                        row.value = e.mean;
                        row.ci_lo = e.ci_lo;
                        row.ci_hi = e.ci_hi;
                        row.err_est = e.std_error;
                    } else {
                        fill_analytic(row, *scn);
                    }
                } catch (const Error& e) {
                    row.value.reset();
                    row.ci_lo.reset();
                    row.ci_hi.reset();
                    row.err_est.reset();
                    row.error = e.what();
                }
                table.push_back(std::move(row));
            }
        }
    }
    std::stable_sort(table.begin(), table.end(), row_less);
    return table;
}

SweepSpec figure_spec(int figure, std::int64_t mc_trials, std::uint64_t seed) {
    SweepSpec s;
    s.mc_trials = mc_trials;
    s.seed = seed;
    switch (figure) {
        case 1:
            s.axis = Axis::SnrDb;
            s.grid = linear_grid(30.0, 80.0, 5.0);
            s.queries = {Query::outage(1, 1)};
            s.engines = {Engine::AnalyticExact, Engine::AnalyticAsymptoticHigh, Engine::MonteCarlo};
            break;
        case 2:
            s.axis = Axis::SnrDb;
            s.grid = linear_grid(30.0, 80.0, 5.0);
            s.queries = {Query::goodput()};
            s.engines = {Engine::AnalyticExact, Engine::AnalyticAsymptoticHigh, Engine::MonteCarlo};
            break;
        case 3:
            s.axis = Axis::Radius;
            s.grid = {1, 2, 5, 10, 15, 20, 25, 30, 35, 40, 45, 50, 60, 80, 100, 150, 200, 300, 500, 1000};
            s.queries = {Query::goodput()};
            s.engines = {Engine::AnalyticExact, Engine::AnalyticAsymptoticHigh, Engine::AnalyticAsymptoticLow,
                         Engine::MonteCarlo};
            break;
        case 4:
            s.axis = Axis::CorrCoeff;
            s.grid = linear_grid(0.0, 0.9, 0.1);
            s.queries = {Query::goodput()};
            s.engines = {Engine::AnalyticExact, Engine::MonteCarlo};
            break;
        default:
            throw ConfigError("figure must be 1..4", "figure", 0);
    }
    return s;
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

void emit_csv(const ResultTable& table, std::ostream& out) {
    auto opt = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string(); };
    out << kCsvHeader << '\n';
    for (const ResultRow& r : table) {
        out << to_string(r.axis) << ',' << format_number(r.axis_value) << ',' << to_string(r.engine) << ','
            << (r.query.stream ? std::to_string(*r.query.stream) : "") << ','
            << (r.query.user_order ? std::to_string(*r.query.user_order) : "") << ',' << opt(r.value) << ','
            << opt(r.ci_lo) << ',' << opt(r.ci_hi) << ',' << opt(r.err_est) << '\n';
    }
}

void emit_json(const ResultTable& table, std::ostream& out) {
    using nlohmann::ordered_json;
    auto opt = [](const auto& v) { return v ? ordered_json(*v) : ordered_json(nullptr); };
    ordered_json arr = ordered_json::array();
    for (const ResultRow& r : table) {
        ordered_json row;
        row["axis"] = to_string(r.axis);
        row["axis_value"] = r.axis_value;
        row["engine"] = to_string(r.engine);
        row["stream"] = opt(r.query.stream);
        row["user_order"] = opt(r.query.user_order);
        row["value"] = opt(r.value);
        row["ci_lo"] = opt(r.ci_lo);
        row["ci_hi"] = opt(r.ci_hi);
        row["err_est"] = opt(r.err_est);
        arr.push_back(std::move(row));
    }
    out << arr.dump(2) << '\n';
}

void emit(const ResultTable& table, Format format, std::ostream& out) {
    if (format == Format::Csv) emit_csv(table, out);
    else emit_json(table, out);
}

}  // namespace noma::cli
