#include "noma/validate.hpp"

#include "noma/analytic.hpp"
#include "noma/config.hpp"
#include "noma/errors.hpp"
#include "noma/montecarlo.hpp"
#include "noma/stats.hpp"

#include <algorithm>
#include <cmath>

namespace noma::cli {

namespace {

using nlohmann::ordered_json;

constexpr double kRelGapLimit = 0.05;
constexpr double kRelGapFloor = 1e-4;
constexpr double kMinPValue = 0.01;
constexpr std::int64_t kGammaDraws = 100000;
constexpr double kSeriesQuadTol = 1e-8;
constexpr int kIdentityMax = 20;

ordered_json check(const char* name, bool pass, ordered_json details) {
    ordered_json j;
    j["name"] = name;
    j["pass"] = pass;
    j["details"] = std::move(details);
    return j;
}

SystemConfig with_snr_db(SystemConfig cfg, double db) {
    cfg.avg_snr = db_to_linear(db);
    return cfg;
}

}  // namespace

ValidationReport run_validation(const SystemConfig& cfg, std::int64_t n_trials, std::uint64_t seed, int threads) {
    ValidationReport rep;
    ordered_json& out = rep.json;
    out["seed"] = seed;
    out["n_trials"] = n_trials;
    const double snr_db = linear_to_db(cfg.avg_snr);
    out["snr_db"] = snr_db;

    Scenario base;
    try {
        base = make_scenario(cfg);
    } catch (const InfeasibleAllocationError& e) {
        out["status"] = "fail";
        out["error"] = {{"kind", "infeasible_allocation"},
                        {"stream", e.stream()},
                        {"user_order", e.user()},
                        {"message", e.what()}};
        out["checks"] = ordered_json::array();
        return rep;
    }

    ordered_json checks = ordered_json::array();
    mc::SimulationOptions opts;
    opts.threads = threads;
    const int streams = cfg.n_streams;
    const int cap = cfg.group_cap;

    // Monte Carlo against the analytic engine at three SNRs.
    mc::Tally base_tally;
    {
        ordered_json rows = ordered_json::array();
        bool pass = true;
        for (double offset : {-10.0, -5.0, 0.0}) {
            const Scenario scn = make_scenario(with_snr_db(cfg, snr_db + offset));
            const mc::Tally t = mc::simulate(scn, n_trials, seed, opts);
            if (offset == 0.0) base_tally = t;
            for (int m = 1; m <= streams; ++m) {
                for (int k = 1; k <= cap; ++k) {
                    const double exact = analytic::avg_outage(scn, {m, k, std::nullopt}).value;
                    const mc::Estimate e = mc::outage_estimate(t, m, k, seed);
                    const bool in_ci = e.ci_lo <= exact && exact <= e.ci_hi;
                    const double gap = exact > 0.0 ? std::abs(e.mean - exact) / exact : 0.0;
                    const bool ok = in_ci && (exact < kRelGapFloor || gap < kRelGapLimit);
                    pass = pass && ok;
                    rows.push_back({{"snr_db", snr_db + offset}, {"stream", m}, {"user_order", k},
                                    {"analytic", exact}, {"mc", e.mean}, {"ci_lo", e.ci_lo},
                                    {"ci_hi", e.ci_hi}, {"rel_gap", gap}, {"pass", ok}});
                }
            }
        }
        checks.push_back(check("outage_mc_vs_analytic", pass, std::move(rows)));
    }

    {
        const double exact = analytic::goodput(base).value;
        const mc::Estimate e = mc::goodput_estimate(base_tally, seed);
        const bool pass = e.ci_lo <= exact && exact <= e.ci_hi;
        checks.push_back(check("goodput_mc_vs_analytic", pass,
                               {{"analytic", exact}, {"mc", e.mean}, {"ci_lo", e.ci_lo}, {"ci_hi", e.ci_hi}}));
    }

    {
        ordered_json rows = ordered_json::array();
        bool pass = true;
        std::vector<double> rhos{0.0, cfg.corr_coeff};
        rhos.erase(std::unique(rhos.begin(), rhos.end()), rhos.end());
        for (double rho : rhos) {
            SystemConfig c = cfg;
            c.corr_coeff = rho;
            const Scenario scn = make_scenario(c);
            for (int m = 1; m <= streams; ++m) {
                const auto gains = mc::sample_schur_gains(scn, m, kGammaDraws, seed);
                const double rate = scn.stats.beta(m - 1) / c.fading_power;
                const auto r = stats::ks_test(gains, [&](double x) {
                    return stats::gamma_cdf(x, c.diversity(), rate);
                });
                const bool ok = r.p_value > kMinPValue;
                pass = pass && ok;
                rows.push_back({{"corr_coeff", rho}, {"stream", m}, {"ks_statistic", r.statistic},
                                {"p_value", r.p_value}, {"pass", ok}});
            }
        }
        checks.push_back(check("gamma_law_ks", pass, std::move(rows)));
    }

    {
        int failures = 0;
        for (int K = 1; K <= kIdentityMax; ++K)
            for (int k = 1; k <= K; ++k)
                if (analytic::combinatorial_identity(K, k) != 1) ++failures;
        checks.push_back(check("combinatorial_identity", failures == 0,
                               {{"max_group", kIdentityMax}, {"failures", failures}}));
    }

    {
        const special::SeriesControl series;
        int compared = 0;
        double worst = 0.0;
        for (int i = 0; i < 10; ++i) {
            for (int j = 0; j < 10; ++j) {
                SystemConfig c = with_snr_db(cfg, 40.0 + 5.0 * i);
                c.radius = 2.0 * std::pow(1.6, j);
                const Scenario scn = make_scenario(c);
                for (int K = 1; K <= cap; ++K) {
                    for (int k = 1; k <= K; ++k) {
                        for (int m = 1; m <= streams; ++m) {
                            if (analytic::series_argument(scn, m, K, k) > series.switch_threshold) continue;
                            const analytic::OutageQuery q{m, k, K};
                            const double fast = analytic::avg_outage_given_K(scn, q, analytic::Path::Fast).value;
                            const double ref = analytic::avg_outage_given_K(scn, q, analytic::Path::Reference).value;
                            const double rel = ref != 0.0 ? std::abs(fast - ref) / std::abs(ref) : std::abs(fast);
                            worst = std::max(worst, rel);
                            ++compared;
                        }
                    }
                }
            }
        }
        checks.push_back(check("series_vs_quadrature", compared > 0 && worst <= kSeriesQuadTol,
                               {{"points", compared}, {"max_rel_diff", worst}, {"tolerance", kSeriesQuadTol}}));
    }

    {
        const auto pmf = analytic::group_size_pmf(cfg);
        const auto r = stats::chi_square_test(base_tally.group_counts, pmf);
        checks.push_back(check("group_size_chi_square", r.p_value > kMinPValue,
                               {{"statistic", r.statistic}, {"dof", r.dof}, {"p_value", r.p_value}}));
    }

    bool all = true;
    for (const auto& c : checks) all = all && c["pass"].get<bool>();
    out["status"] = all ? "pass" : "fail";
    out["checks"] = std::move(checks);
    out["diagnostics"] = {{"degenerate_redraws", base_tally.degenerate_redraws},
                          {"near_ties", base_tally.near_ties}};
    rep.passed = all;
    return rep;
}

}  // namespace noma::cli
