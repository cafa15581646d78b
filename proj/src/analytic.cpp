#include "noma/analytic.hpp"

#include "noma/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace noma::analytic {

namespace {

using special::binomial;
using special::log_gamma;

void check_stream(const Scenario& scn, int stream) {
    if (stream < 1 || stream > scn.cfg.n_streams)
        throw ParameterDomainError("stream index out of range");
}

int require_group_size(const Scenario& scn, const OutageQuery& q) {
    if (!q.group_size) throw ParameterDomainError("query needs a group size");
    const int size = *q.group_size;
    if (q.user_order < 1 || size < q.user_order || size > scn.cfg.group_cap)
        throw ParameterDomainError("query needs 1 <= k <= K <= Q");
    check_stream(scn, q.stream);
    return size;
}

void check_mixed_query(const Scenario& scn, const OutageQuery& q) {
    check_stream(scn, q.stream);
    if (q.user_order < 1 || q.user_order > scn.cfg.group_cap)
        throw ParameterDomainError("query needs 1 <= k <= Q");
}

// Bounded alternating binomial sum over j = 0..K−k, shared by every expanded form.
template <typename Term>
double alternating_sum(int group_size, int user_order, Term term) {
    double sum = 0.0;
    for (int j = 0; j <= group_size - user_order; ++j) {
        const double sign = (j % 2 == 0) ? 1.0 : -1.0;
        sum += sign * binomial(group_size - user_order, j) * term(j);
    }
    return sum;
}

OutageResult averaged_by_quadrature(const Scenario& scn, const OutageQuery& q, bool complement,
                                    const EvalOptions& opts) {
    const int size = *q.group_size;
    const SystemConfig& cfg = scn.cfg;
    const int delta = cfg.diversity();
    const double scale = scn.stats.beta(q.stream - 1) /
                         (cfg.avg_snr * scn.plan.for_size(size).at(q.stream, q.user_order) * cfg.path_loss_ref);
    auto integrand = [&](double x) {
        if (x <= 0.0) return 0.0;
        const double arg = scale * std::pow(x, cfg.path_loss_exp);
        const double p = complement ? special::regularized_upper_gamma(delta, arg)
                                    : special::regularized_lower_gamma(delta, arg);
        return p * ordered_distance_pdf(q.user_order, size, cfg.radius, x);
    };
    const special::Integral r = special::integrate_adaptive(integrand, 0.0, cfg.radius, opts.quad);
    OutageResult out;
    out.value = r.value;
    out.err_est = r.error;
    out.method = Method::AveragedQuadrature;
    return out;
}

double averaged_by_series(const Scenario& scn, const OutageQuery& q, double arg, const EvalOptions& opts) {
    const int size = *q.group_size;
    const int k = q.user_order;
    const SystemConfig& cfg = scn.cfg;
    const int delta = cfg.diversity();
    const double sum = alternating_sum(size, k, [&](int j) {
        return special::residue_series(delta, arg, k, j, cfg.path_loss_exp, opts.series);
    });
    return 2.0 * k * binomial(size, k) * std::exp(-log_gamma(delta)) * sum;
}

}  // namespace

std::string_view to_string(Method method) {
    switch (method) {
    case Method::Conditional: return "conditional";
    case Method::AveragedQuadrature: return "averaged-quadrature";
    case Method::AveragedSeries: return "averaged-series";
    case Method::PoissonMixed: return "poisson-mixed";
    case Method::AsymptoticHighSnr: return "asymptotic-high-snr";
    case Method::AsymptoticLargeD: return "asymptotic-large-D";
    }
    return "unknown";
}

std::string_view to_string(GoodputMethod method) {
    switch (method) {
    case GoodputMethod::Exact: return "exact";
    case GoodputMethod::AsymptoticSmallD: return "asymptotic-small-D";
    case GoodputMethod::AsymptoticLargeD: return "asymptotic-large-D";
    }
    return "unknown";
}

double series_argument(const Scenario& scn, int stream, int group_size, int user_order) {
    const SystemConfig& cfg = scn.cfg;
    return scn.stats.beta(stream - 1) * std::pow(cfg.radius, cfg.path_loss_exp) /
           (cfg.avg_snr * scn.plan.for_size(group_size).at(stream, user_order) * cfg.path_loss_ref);
}

double conditional_outage(const Scenario& scn, const OutageQuery& q, double distance) {
    const int size = require_group_size(scn, q);
    if (distance < 0.0 || distance > scn.cfg.radius)
        throw ParameterDomainError("distance must lie in (0, D]");
    const double theta = scn.plan.for_size(size).at(q.stream, q.user_order);
    const double arg = scn.stats.beta(q.stream - 1) /
                       (scn.cfg.avg_snr * theta * path_loss(distance, scn.cfg));
    return special::regularized_lower_gamma(scn.cfg.diversity(), arg);
}

double ordered_distance_pdf(int user_order, int group_size, double radius, double x) {
    if (user_order < 1 || group_size < user_order)
        throw ParameterDomainError("order statistic needs 1 <= k <= K");
    if (!(radius > 0.0)) throw ParameterDomainError("radius must be > 0");
    if (x < 0.0 || x > radius) throw ParameterDomainError("distance outside [0, D]");
    const double cdf = (x / radius) * (x / radius);
    const double density = 2.0 * x / (radius * radius);
    return user_order * binomial(group_size, user_order) * std::pow(cdf, user_order - 1) *
           std::pow(1.0 - cdf, group_size - user_order) * density;
}

OutageResult avg_outage_given_K(const Scenario& scn, const OutageQuery& q, Path path,
                                const EvalOptions& opts) {
    const int size = require_group_size(scn, q);
    if (path == Path::Reference) return averaged_by_quadrature(scn, q, false, opts);

    const double arg = series_argument(scn, q.stream, size, q.user_order);
    if (arg > opts.series.switch_threshold) {
        OutageResult out = averaged_by_quadrature(scn, q, false, opts);
        out.regime_note = "series argument above switch threshold; quadrature used";
        return out;
    }
    OutageResult out;
    out.value = std::clamp(averaged_by_series(scn, q, arg, opts), 0.0, 1.0);
    out.method = Method::AveragedSeries;
    out.err_est = opts.series.rel_tol * out.value;
    return out;
}

OutageResult avg_success_given_K(const Scenario& scn, const OutageQuery& q, Path path,
                                 const EvalOptions& opts) {
    const int size = require_group_size(scn, q);
    const double arg = series_argument(scn, q.stream, size, q.user_order);
    if (path == Path::Reference || arg > opts.series.switch_threshold)
        return averaged_by_quadrature(scn, q, true, opts);
    OutageResult out = avg_outage_given_K(scn, q, path, opts);
    out.value = 1.0 - out.value;
    return out;
}

std::vector<double> group_size_pmf(const SystemConfig& cfg) {
    if (cfg.group_cap < 1) throw ParameterDomainError("group_cap must be >= 1");
    const double mean = cfg.mean_users();
    std::vector<double> pmf(cfg.group_cap + 1, 0.0);
    double partial = 0.0;
    for (int size = 0; size < cfg.group_cap; ++size) {
        pmf[size] = (mean > 0.0) ? std::exp(size * std::log(mean) - mean - log_gamma(size + 1.0))
                                 : (size == 0 ? 1.0 : 0.0);
        partial += pmf[size];
    }
    pmf[cfg.group_cap] = std::max(0.0, 1.0 - partial);
    return pmf;
}

double prob_at_least(const SystemConfig& cfg, int user_order) {
    if (user_order <= 0) return 1.0;
    const double mean = cfg.mean_users();
    if (mean <= 0.0) return 0.0;
    return special::regularized_lower_gamma(user_order, mean);
}

OutageResult avg_outage(const Scenario& scn, const OutageQuery& q, Path path, const EvalOptions& opts) {
    check_mixed_query(scn, q);
    const std::vector<double> pmf = group_size_pmf(scn.cfg);
    OutageResult out;
    out.method = Method::PoissonMixed;
    for (int size = q.user_order; size <= scn.cfg.group_cap; ++size) {
        if (pmf[size] == 0.0) continue;
        OutageQuery given = q;
        given.group_size = size;
        const OutageResult r = avg_outage_given_K(scn, given, path, opts);
        out.value += pmf[size] * r.value;
        out.err_est += pmf[size] * r.err_est;
        if (!r.regime_note.empty() && out.regime_note.empty()) out.regime_note = r.regime_note;
    }
    out.value = std::clamp(out.value, 0.0, 1.0);
    return out;
}

double high_snr_coefficient(const Scenario& scn, int stream, int group_size, int user_order) {
    check_stream(scn, stream);
    if (user_order < 1 || group_size < user_order || group_size > scn.cfg.group_cap)
        throw ParameterDomainError("coefficient needs 1 <= k <= K <= Q");
    const SystemConfig& cfg = scn.cfg;
    const int delta = cfg.diversity();
    const double theta = scn.plan.for_size(group_size).at(stream, user_order);
    const double base = scn.stats.beta(stream - 1) * std::pow(cfg.radius, cfg.path_loss_exp) /
                        (theta * cfg.path_loss_ref);
    const double sum = alternating_sum(group_size, user_order, [&](int j) {
        return 1.0 / (cfg.path_loss_exp * delta + 2.0 * (user_order + j));
    });
    return 2.0 * user_order * std::exp(-log_gamma(delta + 1.0)) * binomial(group_size, user_order) *
           std::pow(base, delta) * sum;
}

OutageResult asymptotic_outage_high_snr(const Scenario& scn, const OutageQuery& q) {
    check_mixed_query(scn, q);
    const std::vector<double> pmf = group_size_pmf(scn.cfg);
    double mix = 0.0;
    for (int size = q.user_order; size <= scn.cfg.group_cap; ++size)
        mix += pmf[size] * high_snr_coefficient(scn, q.stream, size, q.user_order);
    OutageResult out;
    out.method = Method::AsymptoticHighSnr;
    out.value = std::pow(scn.cfg.avg_snr, -scn.cfg.diversity()) * mix;
    if (out.value > 1.0) out.regime_note = "high-SNR expansion exceeds 1; outside its regime";
    return out;
}

OutageResult asymptotic_outage_large_D(const Scenario& scn, const OutageQuery& q) {
    check_mixed_query(scn, q);
    const SystemConfig& cfg = scn.cfg;
    const int size = cfg.group_cap;
    const int k = q.user_order;
    const int delta = cfg.diversity();
    const double arg = series_argument(scn, q.stream, size, k);
    const double sum = alternating_sum(size, k, [&](int j) {
        const double order = 2.0 * (k + j) / cfg.path_loss_exp;
        return std::exp(log_gamma(delta + order) - order * std::log(arg)) / (k + j);
    });
    OutageResult out;
    out.method = Method::AsymptoticLargeD;
    out.value = 1.0 - binomial(size, k) * k * std::exp(-log_gamma(delta)) * sum;
    if (out.value < 0.0) out.regime_note = "large-D expansion below 0; outside its regime";
    return out;
}

GoodputResult goodput(const Scenario& scn, GoodputMethod method, const EvalOptions& opts) {
    const SystemConfig& cfg = scn.cfg;
    const std::vector<double> pmf = group_size_pmf(cfg);
    GoodputResult out;
    out.method = method;
    for (int m = 1; m <= cfg.n_streams; ++m) {
        for (int k = 1; k <= cfg.group_cap; ++k) {
            const double rate = cfg.rates(m - 1, k - 1);
            double delivered = 0.0;
            double err = 0.0;
            if (method == GoodputMethod::Exact) {
                for (int size = k; size <= cfg.group_cap; ++size) {
                    if (pmf[size] == 0.0) continue;
                    const OutageResult s = avg_success_given_K(scn, {m, k, size}, Path::Fast, opts);
                    delivered += pmf[size] * s.value;
                    err += pmf[size] * s.err_est;
                }
            } else {
                const OutageResult p = method == GoodputMethod::AsymptoticSmallD
                                           ? asymptotic_outage_high_snr(scn, {m, k, std::nullopt})
                                           : asymptotic_outage_large_D(scn, {m, k, std::nullopt});
                delivered = prob_at_least(cfg, k) - p.value;
            }
            out.per_term.push_back({m, k, rate * delivered});
            out.value += rate * delivered;
            out.err_est += rate * err;
        }
    }
    return out;
}

double outage_free_goodput(const SystemConfig& cfg) {
    double total = 0.0;
    for (int m = 1; m <= cfg.n_streams; ++m)
        for (int k = 1; k <= cfg.group_cap; ++k)
            total += cfg.rates(m - 1, k - 1) * prob_at_least(cfg, k);
    return total;
}

Rational combinatorial_identity(int group_size, int user_order) {
    using boost::multiprecision::cpp_int;
    if (user_order < 1 || group_size < user_order)
        throw ParameterDomainError("identity needs 1 <= k <= K");
    auto choose = [](int n, int r) {
        cpp_int c = 1;
        for (int i = 1; i <= r; ++i) c = c * (n - r + i) / i;
        return c;
    };
    Rational sum = 0;
    for (int j = 0; j <= group_size - user_order; ++j) {
        Rational term(choose(group_size - user_order, j) * user_order, cpp_int(user_order + j));
        if (j % 2 == 0) sum += term;
        else sum -= term;
    }
    return Rational(choose(group_size, user_order)) * sum;
}

double fit_loglog_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw ParameterDomainError("slope fit needs equal-length inputs");
    if (x.size() < 2) throw ParameterDomainError("slope fit needs at least two points");
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0))
            throw ParameterDomainError("slope fit needs positive values");
        lx.push_back(std::log10(x[i]));
        ly.push_back(std::log10(y[i]));
    }
    const double n = static_cast<double>(lx.size());
    const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
    const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    if (sxx == 0.0) throw ParameterDomainError("slope fit needs distinct abscissae");
    return sxy / sxx;
}

double fit_diversity_order(std::span<const std::pair<double, double>> curve) {
    std::vector<double> snr, outage;
    for (const auto& [g, p] : curve) {
        snr.push_back(g);
        outage.push_back(p);
    }
    return -fit_loglog_slope(snr, outage);
}

}  // namespace noma::analytic
