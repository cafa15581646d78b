// Command-line front end: single-point outage and goodput, sweeps, figure
// data and the cross-validation report.

#include "noma/config.hpp"
#include "noma/errors.hpp"
#include "noma/sweep.hpp"
#include "noma/validate.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

namespace {

using namespace noma;
using namespace noma::cli;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitIoOrConfig = 2;

struct CommonOptions {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_path = "-";
    std::string format = "csv";
    std::int64_t trials = 100000;
    std::uint64_t seed = 1;
    int threads = 0;
};

void add_common(CLI::App* sub, CommonOptions& o) {
    sub->add_option("--config", o.config_path, "key = value configuration file");
    sub->add_option("--set", o.overrides, "override one key, e.g. --set snr_db=50");
    sub->add_option("--out", o.out_path, "output file, '-' for stdout");
    sub->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--trials", o.trials, "Monte Carlo trials")->check(CLI::PositiveNumber);
    sub->add_option("--seed", o.seed, "master seed");
    sub->add_option("--threads", o.threads, "worker threads (default: NOMA_THREADS, else all cores)")
        ->check(CLI::PositiveNumber);
}

int resolve_threads(int flag) {
    if (flag > 0) return flag;
    if (const char* env = std::getenv("NOMA_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

SystemConfig load_config(const CommonOptions& o) {
    ConfigSource src;
    if (!o.config_path.empty()) src = parse_config_file(o.config_path);
    apply_overrides(src, o.overrides);
    finalize(src);
    return src.cfg;
}

void write_output(const std::string& path, const std::string& body) {
    if (path == "-") {
        std::cout << body;
        std::cout.flush();
        if (!std::cout) throw std::ios_base::failure("cannot write to stdout");
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::ios_base::failure("cannot open '" + path + "' for writing");
    f << body;
    f.close();
    if (!f) throw std::ios_base::failure("cannot write '" + path + "'");
}

// Writes the table; failed rows are reported on stderr. Single-point commands
// treat any failed row as an error, sweeps do not.
int emit_table(const ResultTable& table, const CommonOptions& o, bool strict = false) {
    bool failed = false;
    for (const ResultRow& r : table) {
        if (r.error.empty()) continue;
        failed = true;
        std::cerr << "noma: " << to_string(r.axis) << '=' << format_number(r.axis_value) << ' '
                  << to_string(r.engine) << ": " << r.error << '\n';
    }
    std::ostringstream body;
    emit(table, parse_format(o.format), body);
    write_output(o.out_path, body.str());
    return strict && failed ? kExitIoOrConfig : kExitOk;
}

std::vector<Engine> parse_engines(const std::vector<std::string>& names) {
    std::vector<Engine> out;
    for (const auto& n : names) out.push_back(parse_engine(n));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// A single-point evaluation is a one-value sweep along the SNR axis.
SweepSpec point_spec(const SystemConfig& cfg, std::vector<Query> queries, const std::vector<std::string>& engines,
                     const CommonOptions& o) {
    SweepSpec s;
    s.axis = Axis::SnrDb;
    s.grid = {linear_to_db(cfg.avg_snr)};
    s.queries = std::move(queries);
    s.engines = parse_engines(engines);
    s.mc_trials = o.trials;
    s.seed = o.seed;
    return s;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"MIMO-NOMA downlink outage and goodput with PPP-deployed users"};
    app.require_subcommand(1);

    CommonOptions o;
    int stream = 1, user = 1;
    std::vector<std::string> engines{"analytic-exact"};
    std::string axis = "snr_db", grid;
    std::vector<std::string> queries;

    auto* outage = app.add_subcommand("outage", "average outage of one (stream, user order)");
    add_common(outage, o);
    outage->add_option("--stream", stream, "stream m (1-based)")->check(CLI::PositiveNumber);
    outage->add_option("--user", user, "user order k (1-based)")->check(CLI::PositiveNumber);
    outage->add_option("--engine", engines, "engines to evaluate");

    auto* goodput = app.add_subcommand("goodput", "average goodput");
    add_common(goodput, o);
    goodput->add_option("--engine", engines, "engines to evaluate");

    auto* sweep = app.add_subcommand("sweep", "evaluate a grid along one axis");
    add_common(sweep, o);
    sweep->add_option("--axis", axis, "snr_db, radius or corr_coeff");
    sweep->add_option("--grid", grid, "lo:hi:step or v1,v2,...")->required();
    sweep->add_option("--query", queries, "m,k or goodput (repeatable)")->required();
    sweep->add_option("--engine", engines, "engines to evaluate");

    auto* validate = app.add_subcommand("validate", "cross-check Monte Carlo against the analytic engine");
    add_common(validate, o);

    std::vector<CLI::App*> figures;
    for (int f = 1; f <= 4; ++f) {
        auto* fig = app.add_subcommand("fig" + std::to_string(f), "data for figure " + std::to_string(f));
        add_common(fig, o);
        figures.push_back(fig);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitIoOrConfig;
    }

    try {
        const SystemConfig cfg = load_config(o);
        const int threads = resolve_threads(o.threads);

        if (*outage) {
            return emit_table(run_sweep(point_spec(cfg, {Query::outage(stream, user)}, engines, o), cfg, threads), o, true);
        }
        if (*goodput) {
            return emit_table(run_sweep(point_spec(cfg, {Query::goodput()}, engines, o), cfg, threads), o, true);
        }
        if (*sweep) {
            SweepSpec s;
            s.axis = parse_axis(axis);
            s.grid = parse_grid(grid);
            for (const auto& q : queries) s.queries.push_back(parse_query(q));
            s.engines = parse_engines(engines);
            s.mc_trials = o.trials;
            s.seed = o.seed;
            return emit_table(run_sweep(s, cfg, threads), o);
        }
        for (int f = 1; f <= 4; ++f) {
            if (*figures[f - 1]) return emit_table(run_sweep(figure_spec(f, o.trials, o.seed), cfg, threads), o);
        }
        if (*validate) {
            const ValidationReport rep = run_validation(cfg, o.trials, o.seed, threads);
            write_output(o.out_path, rep.json.dump(2) + "\n");
            if (!rep.passed) {
                if (rep.json.contains("error")) {
                    std::cerr << "noma: " << rep.json["error"]["message"].get<std::string>() << '\n';
                }
                for (const auto& c : rep.json["checks"])
                    if (!c["pass"].get<bool>()) std::cerr << "noma: check failed: " << c["name"].get<std::string>() << '\n';
                return kExitCheckFailed;
            }
            return kExitOk;
        }
    } catch (const ConfigError& e) {
        std::cerr << "noma: configuration error";
        if (!e.key().empty()) std::cerr << " [" << e.key() << (e.line() > 0 ? " line " + std::to_string(e.line()) : "") << ']';
        std::cerr << ": " << e.what() << '\n';
        return kExitIoOrConfig;
    } catch (const InfeasibleAllocationError& e) {
        std::cerr << "noma: infeasible allocation: " << e.what() << '\n';
        return kExitIoOrConfig;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "noma: I/O error: " << e.what() << '\n';
        return kExitIoOrConfig;
    } catch (const ConsistencyFault& e) {
        std::cerr << "noma: internal consistency fault: " << e.what() << '\n';
        return kExitCheckFailed;
    } catch (const Error& e) {
        std::cerr << "noma: " << e.what() << '\n';
        return kExitIoOrConfig;
    }
    return kExitOk;
}
