#include "noma/stats.hpp"

#include "noma/errors.hpp"
#include "noma/special.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace noma::stats {

double kolmogorov_pvalue(double d, std::size_t n) {
    if (n == 0) throw ParameterDomainError("KS test needs samples");
    const double sn = std::sqrt(static_cast<double>(n));
    const double lambda = (sn + 0.12 + 0.11 / sn) * d;
    if (lambda < 0.2) return 1.0;
    double sum = 0.0;
    double sign = 1.0;
    for (int j = 1; j <= 100; ++j) {
        const double term = std::exp(-2.0 * j * j * lambda * lambda);
        sum += sign * term;
        if (term < 1e-16 * sum) break;
        sign = -sign;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

GofResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf) {
    if (samples.empty()) throw ParameterDomainError("KS test needs samples");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
    }
    return {d, kolmogorov_pvalue(d, samples.size()), 0};
}

GofResult chi_square_test(std::span<const std::int64_t> observed, std::span<const double> probs,
                          double min_expected) {
    if (observed.size() != probs.size() || observed.empty()) {
        throw ParameterDomainError("observed and expected bins must match");
    }
    const double total = static_cast<double>(std::accumulate(observed.begin(), observed.end(), std::int64_t{0}));
    if (total <= 0.0) throw ParameterDomainError("chi-square test needs observations");

    std::vector<double> obs, expd;
    double o_acc = 0.0, e_acc = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        o_acc += static_cast<double>(observed[i]);
        e_acc += probs[i] * total;
        if (e_acc >= min_expected) {
            obs.push_back(o_acc);
            expd.push_back(e_acc);
            o_acc = e_acc = 0.0;
        }
    }
    if (e_acc > 0.0 || o_acc > 0.0) {
        if (expd.empty()) {
            obs.push_back(o_acc);
            expd.push_back(e_acc);
        } else {
            obs.back() += o_acc;
            expd.back() += e_acc;
        }
    }
    GofResult r;
    r.dof = static_cast<int>(expd.size()) - 1;
    for (std::size_t i = 0; i < expd.size(); ++i) {
        const double diff = obs[i] - expd[i];
        r.statistic += diff * diff / expd[i];
    }
    r.p_value = r.dof > 0 ? special::regularized_upper_gamma(0.5 * r.dof, 0.5 * r.statistic) : 1.0;
    return r;
}

double gamma_cdf(double x, double shape, double rate) {
    if (x <= 0.0) return 0.0;
    return special::regularized_lower_gamma(shape, rate * x);
}

}  // namespace noma::stats
