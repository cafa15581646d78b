#include "noma/config.hpp"
#include "noma/errors.hpp"
#include "noma/sweep.hpp"
#include "noma/validate.hpp"

#include <doctest.h>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <sstream>

using namespace noma;
using namespace noma::cli;

namespace {

ConfigSource parse_text(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

int config_error_line(const std::string& text) {
    try {
        finalize(parse_text(text));
    } catch (const ConfigError& e) {
        return e.line();
    }
    return -1;
}

std::string config_error_key(const std::string& text) {
    try {
        finalize(parse_text(text));
    } catch (const ConfigError& e) {
        return e.key();
    }
    return "";
}

std::size_t count_lines(const std::string& s) {
    return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

}  // namespace

TEST_CASE("empty config yields the reference defaults") {
    const ConfigSource src = parse_text("");
    finalize(src);
    const SystemConfig& c = src.cfg;
    const SystemConfig d = SystemConfig::defaults();
    CHECK(c.n_tx == 2);
    CHECK(c.n_rx == 3);
    CHECK(c.n_streams == 2);
    CHECK(c.group_cap == 3);
    CHECK(c.alloc_eps == 0.5);
    CHECK(c.corr_coeff == 0.5);
    CHECK(c.avg_snr == 1e6);
    CHECK(c.radius == 30.0);
    CHECK(c.intensity == 1e-3);
    CHECK(c.path_loss_exp == 3.0);
    CHECK(c.path_loss_ref == 1.0);
    CHECK(c.fading_power == 1.0);
    CHECK(c.noise_power == 1.0);
    CHECK(c.rates == d.rates);
}

TEST_CASE("config parsing") {
    SUBCASE("values, comments and whitespace") {
        const ConfigSource src = parse_text(
            "# cell\n"
            "snr_db = 60\n"
            "  radius_m=45.5   # metres\n"
            "\n"
            "intensity_per_m2 = 2e-3\r\n"
            "rate_bps_hz = 1.5\n");
        finalize(src);
        CHECK(src.cfg.avg_snr == 1e6);
        CHECK(src.cfg.radius == 45.5);
        CHECK(src.cfg.intensity == 2e-3);
        CHECK((src.cfg.rates.array() == 1.5).all());
        CHECK(src.lines.at("radius_m") == 3);
    }
    SUBCASE("rate matrix follows the stream and cap dimensions") {
        const ConfigSource src = parse_text("rate_bps_hz = 1\ngroup_cap = 5\nn_streams = 1\n");
        finalize(src);
        CHECK(src.cfg.rates.rows() == 1);
        CHECK(src.cfg.rates.cols() == 5);
        CHECK((src.cfg.rates.array() == 1.0).all());
    }
    SUBCASE("dB conversion") {
        CHECK(db_to_linear(60.0) == 1e6);
        CHECK(linear_to_db(1e6) == 60.0);
        CHECK(db_to_linear(-10.0) == doctest::Approx(0.1));
    }
    SUBCASE("errors carry key and line") {
        CHECK(config_error_key("n_streams = 4\n") == "n_streams");
        CHECK(config_error_line("# x\nn_streams = 4\n") == 2);
        CHECK(config_error_key("bogus = 1\n") == "bogus");
        CHECK(config_error_line("\n\nbogus = 1\n") == 3);
        CHECK(config_error_key("radius_m = far\n") == "radius_m");
        CHECK(config_error_key("n_tx = 2.5\n") == "n_tx");
        CHECK(config_error_key("corr_coeff = 1\n") == "corr_coeff");
        CHECK(config_error_key("intensity_per_m2 = -1\n") == "intensity_per_m2");
        CHECK(config_error_key("snr_db = inf\n") == "snr_db");
        CHECK(config_error_key("radius_m = 1\nradius_m = 2\n") == "radius_m");
        CHECK(config_error_line("radius_m = 1\nradius_m = 2\n") == 2);
        CHECK(config_error_line("radius_m 3\n") == 1);
        CHECK(config_error_key("path_loss_exp =\n") == "path_loss_exp");
    }
    SUBCASE("overrides") {
        ConfigSource src = parse_text("snr_db = 50\n");
        apply_overrides(src, {"snr_db=40", "radius_m = 10"});
        finalize(src);
        CHECK(src.cfg.avg_snr == doctest::Approx(1e4));
        CHECK(src.cfg.radius == 10.0);
        CHECK(src.lines.at("snr_db") == 0);
        CHECK_THROWS_AS(apply_overrides(src, {"snr_db"}), ConfigError);
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(parse_config_file("/nonexistent/noma.cfg"), ConfigError);
    }
}

TEST_CASE("grids and queries") {
    const auto g = linear_grid(30.0, 80.0, 5.0);
    REQUIRE(g.size() == 11);
    CHECK(g.front() == 30.0);
    CHECK(g.back() == 80.0);
    CHECK(parse_grid("0:0.9:0.1").size() == 10);
    CHECK(parse_grid("0:0.9:0.1")[3] == 0.30000000000000004);
    CHECK(parse_grid("1,2.5,10") == std::vector<double>{1.0, 2.5, 10.0});
    CHECK_THROWS_AS(parse_grid("1,x"), ConfigError);
    CHECK_THROWS_AS(parse_grid("1:2"), ConfigError);
    CHECK_THROWS_AS(linear_grid(1.0, 2.0, 0.0), ConfigError);

    CHECK(parse_query("goodput").is_goodput());
    const Query q = parse_query("2,3");
    CHECK(*q.stream == 2);
    CHECK(*q.user_order == 3);
    CHECK_THROWS_AS(parse_query("2"), ConfigError);
    CHECK_THROWS_AS(parse_query("0,1"), ConfigError);
    CHECK_THROWS_AS(parse_query("1,1x"), ConfigError);

    CHECK(parse_axis("radius") == Axis::Radius);
    CHECK(parse_engine("montecarlo") == Engine::MonteCarlo);
    CHECK_THROWS_AS(parse_engine("exact"), ConfigError);
    CHECK_THROWS_AS(parse_format("xml"), ConfigError);
}

TEST_CASE("sweep spec validation") {
    SweepSpec s;
    s.grid = {1.0, 2.0};
    s.queries = {Query::goodput()};
    s.engines = {Engine::AnalyticExact};
    CHECK_NOTHROW(s.validate());
    s.grid = {2.0, 2.0};
    CHECK_THROWS_AS(s.validate(), ConfigError);
    s.grid = {1.0};
    s.engines.clear();
    CHECK_THROWS_AS(s.validate(), ConfigError);
    s.engines = {Engine::MonteCarlo};
    s.mc_trials = 10;
    CHECK_THROWS_AS(s.validate(), ConfigError);
}

TEST_CASE("figure sweeps") {
    const SystemConfig cfg = SystemConfig::defaults();
    SUBCASE("fig1 has 33 rows in deterministic order") {
        const ResultTable t = run_sweep(figure_spec(1, 2000, 1), cfg);
        REQUIRE(t.size() == 33);
        for (std::size_t i = 0; i < t.size(); ++i) {
            CHECK(t[i].axis_value == 30.0 + 5.0 * static_cast<double>(i / 3));
            CHECK(t[i].error.empty());
            const bool mc = t[i].engine == Engine::MonteCarlo;
            CHECK(t[i].ci_lo.has_value() == mc);
            CHECK(t[i].ci_hi.has_value() == mc);
        }
        CHECK(t[0].engine == Engine::AnalyticExact);
        CHECK(t[1].engine == Engine::AnalyticAsymptoticHigh);
        CHECK(t[2].engine == Engine::MonteCarlo);
    }
    SUBCASE("fig3 analytic goodput has an interior maximum") {
        SweepSpec s = figure_spec(3, 1000, 1);
        s.engines = {Engine::AnalyticExact};
        const ResultTable t = run_sweep(s, cfg);
        std::size_t best = 0;
        for (std::size_t i = 0; i < t.size(); ++i)
            if (*t[i].value > *t[best].value) best = i;
        CHECK(best > 0);
        CHECK(best + 1 < t.size());
        CHECK(t[best].axis_value >= 25.0);
        CHECK(t[best].axis_value <= 50.0);
    }
    SUBCASE("fig4 analytic goodput falls with correlation") {
        SweepSpec s = figure_spec(4, 1000, 1);
        s.engines = {Engine::AnalyticExact};
        const ResultTable t = run_sweep(s, cfg);
        REQUIRE(t.size() == 10);
        for (std::size_t i = 1; i < t.size(); ++i) CHECK(*t[i].value < *t[i - 1].value);
    }
    CHECK_THROWS_AS(figure_spec(5, 1000, 1), ConfigError);
}

TEST_CASE("sweep records failures and continues") {
    SystemConfig cfg = SystemConfig::defaults();
    SweepSpec s;
    s.axis = Axis::CorrCoeff;
    s.grid = {0.5, 1.0};  // 1.0 violates the correlation invariant
    s.queries = {Query::outage(1, 1), Query::outage(3, 1), Query::goodput()};
    s.engines = {Engine::MonteCarlo, Engine::AnalyticExact};
    s.mc_trials = 2000;
    const ResultTable t = run_sweep(s, cfg);
    REQUIRE(t.size() == 12);
    // Sorted by engine, then stream, with goodput last.
    CHECK(t[0].engine == Engine::AnalyticExact);
    CHECK(*t[0].query.stream == 1);
    CHECK(*t[1].query.stream == 3);
    CHECK(t[2].query.is_goodput());
    CHECK(t[0].value.has_value());
    CHECK_FALSE(t[1].value.has_value());  // stream 3 does not exist
    CHECK_FALSE(t[1].error.empty());
    for (std::size_t i = 6; i < 12; ++i) {
        CHECK(t[i].axis_value == 1.0);
        CHECK_FALSE(t[i].value.has_value());
        CHECK_FALSE(t[i].ci_lo.has_value());
    }
}

TEST_CASE("sweep results do not depend on thread count") {
    SweepSpec s = figure_spec(2, 5000, 9);
    const SystemConfig cfg = SystemConfig::defaults();
    std::ostringstream a, b;
    emit_csv(run_sweep(s, cfg, 1), a);
    emit_csv(run_sweep(s, cfg, 3), b);
    CHECK(a.str() == b.str());
}

TEST_CASE("emission") {
    SUBCASE("empty table") {
        std::ostringstream csv, json;
        emit_csv({}, csv);
        emit_json({}, json);
        CHECK(csv.str() == "axis,axis_value,engine,stream,user_order,value,ci_lo,ci_hi,err_est\n");
        CHECK(nlohmann::json::parse(json.str()).empty());
    }
    SUBCASE("rows") {
        ResultTable t(2);
        t[0].axis_value = 60.0;
        t[0].query = Query::outage(1, 2);
        t[0].value = 0.1;
        t[0].err_est = 1e-13;
        t[1].axis = Axis::Radius;
        t[1].axis_value = 0.5;
        t[1].engine = Engine::MonteCarlo;
        t[1].value = 8.25;
        t[1].ci_lo = 8.0;
        t[1].ci_hi = 8.5;
        t[1].err_est = 0.1;
        std::ostringstream csv;
        emit_csv(t, csv);
        CHECK(csv.str() ==
              "axis,axis_value,engine,stream,user_order,value,ci_lo,ci_hi,err_est\n"
              "snr_db,60,analytic-exact,1,2,0.1,,,1e-13\n"
              "radius,0.5,montecarlo,,,8.25,8,8.5,0.1\n");
        CHECK(count_lines(csv.str()) == t.size() + 1);
        CHECK(csv.str().find('\r') == std::string::npos);

        std::ostringstream json;
        emit_json(t, json);
        const auto j = nlohmann::json::parse(json.str());
        REQUIRE(j.size() == 2);
        CHECK(j[0]["axis"] == "snr_db");
        CHECK(j[0]["axis_value"] == 60.0);
        CHECK(j[0]["stream"] == 1);
        CHECK(j[0]["user_order"] == 2);
        CHECK(j[0]["value"] == 0.1);
        CHECK(j[0]["ci_lo"].is_null());
        CHECK(j[1]["engine"] == "montecarlo");
        CHECK(j[1]["stream"].is_null());
        CHECK(j[1]["ci_hi"] == 8.5);
        std::vector<std::string> keys;
        for (auto it = j[0].begin(); it != j[0].end(); ++it) keys.push_back(it.key());
        CHECK(keys.size() == 9);
    }
    SUBCASE("numbers round-trip") {
        for (double v : {0.1, 1.0 / 3.0, 6.02214076e23, 5e-324, -2.5}) {
            const std::string text = format_number(v);
            double back = 0.0;
            std::from_chars(text.data(), text.data() + text.size(), back);
            CHECK(back == v);
        }
        CHECK(format_number(60.0) == "60");
    }
}

TEST_CASE("validation report") {
    SUBCASE("infeasible allocation fails the run") {
        SystemConfig cfg = SystemConfig::defaults();
        cfg.alloc_eps = 1.0;
        const ValidationReport r = run_validation(cfg, 1000, 1);
        CHECK_FALSE(r.passed);
        CHECK(r.json["error"]["kind"] == "infeasible_allocation");
    }
    SUBCASE("report is identical across thread counts") {
        const SystemConfig cfg = SystemConfig::defaults();
        const ValidationReport a = run_validation(cfg, 20000, 42, 1);
        const ValidationReport b = run_validation(cfg, 20000, 42, 4);
        CHECK(a.json.dump() == b.json.dump());
        std::vector<std::string> names;
        for (const auto& c : a.json["checks"]) names.push_back(c["name"]);
        CHECK(names == std::vector<std::string>{"outage_mc_vs_analytic", "goodput_mc_vs_analytic", "gamma_law_ks",
                                                "combinatorial_identity", "series_vs_quadrature",
                                                "group_size_chi_square"});
        CHECK(a.json["checks"][3]["pass"] == true);
        CHECK(a.json["checks"][4]["pass"] == true);
    }
}
