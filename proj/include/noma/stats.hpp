#pragma once

// Goodness-of-fit tests used to check sampled quantities against their
// closed-form laws.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace noma::stats {

struct GofResult {
    double statistic = 0.0;
    double p_value = 0.0;
    int dof = 0;  // χ² only
};

/// Asymptotic Kolmogorov tail with the Stephens small-sample correction.
double kolmogorov_pvalue(double d, std::size_t n);

/// One-sample Kolmogorov–Smirnov test against a continuous CDF.
GofResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf);

/// Pearson χ² test of observed counts against bin probabilities. Bins with
/// expected count below `min_expected` are pooled into their neighbour.
GofResult chi_square_test(std::span<const std::int64_t> observed, std::span<const double> probs,
                          double min_expected = 5.0);

/// CDF of Gamma(shape, rate).
double gamma_cdf(double x, double shape, double rate);

}  // namespace noma::stats
