#pragma once

// Closed-form and asymptotic outage / goodput for the PPP-deployed MIMO-NOMA
// downlink. Stream m, user order k and group size K are 1-based throughout.

#include "noma/model.hpp"
#include "noma/special.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace noma::analytic {

enum class Method {
    Conditional,
    AveragedQuadrature,
    AveragedSeries,
    PoissonMixed,
    AsymptoticHighSnr,
    AsymptoticLargeD,
};

std::string_view to_string(Method method);

/// Evaluation route for the distance average at fixed K.
enum class Path {
    Fast,       // residue series, falling back to quadrature above the switch threshold
    Reference,  // quadrature of the un-expanded order-statistics density
};

struct OutageQuery {
    int stream = 1;
    int user_order = 1;
    std::optional<int> group_size;  // required for conditional quantities
};

struct OutageResult {
    double value = 0.0;
    Method method = Method::Conditional;
    double err_est = 0.0;
    std::string regime_note;
};

enum class GoodputMethod { Exact, AsymptoticSmallD, AsymptoticLargeD };

std::string_view to_string(GoodputMethod method);

struct GoodputTerm {
    int stream;
    int user_order;
    double value;  // R_{m,k} · (Pr(𝒬 ≥ k) − p̃_{m,k})
};

struct GoodputResult {
    double value = 0.0;  // bits per transmission
    std::vector<GoodputTerm> per_term;
    GoodputMethod method = GoodputMethod::Exact;
    double err_est = 0.0;
};

struct EvalOptions {
    special::SeriesControl series;
    // Outage values span many decades, so the absolute floor is negligible
    // and the relative tolerance governs.
    special::QuadratureControl quad{std::numeric_limits<double>::min(), 1e-12, 2000};
};

/// β_m D^α / (γ̄ θ_{m,k} 𝒦) for group size K: the argument of the series and
/// of both asymptotic expansions.
double series_argument(const Scenario& scn, int stream, int group_size, int user_order);

/// P(δ, β_m/(γ̄ θ_{m,k} ℓ(d))): outage of user k on stream m at distance d.
double conditional_outage(const Scenario& scn, const OutageQuery& q, double distance);

/// Density of the k-th smallest of K i.i.d. distances uniform over a disk of radius D.
double ordered_distance_pdf(int user_order, int group_size, double radius, double x);

/// Outage averaged over d_k for a fixed group size (query.group_size required).
OutageResult avg_outage_given_K(const Scenario& scn, const OutageQuery& q, Path path = Path::Fast,
                                const EvalOptions& opts = {});

/// Success probability 1 − p̄_{m,K,k}; evaluated directly when the outage is
/// close to one so the complement keeps its relative accuracy.
OutageResult avg_success_given_K(const Scenario& scn, const OutageQuery& q, Path path = Path::Fast,
                                 const EvalOptions& opts = {});

/// Truncated Poisson law of the served group size, indexed K = 0..Q. The top
/// bin is 1 minus the partial sum.
std::vector<double> group_size_pmf(const SystemConfig& cfg);

/// Pr(𝒬 ≥ k) = Pr(Poisson(πD²λ) ≥ k) for k ≤ Q.
double prob_at_least(const SystemConfig& cfg, int user_order);

/// Outage of the k-th nearest user mixed over the group size. Realizations
/// with fewer than k users contribute zero.
OutageResult avg_outage(const Scenario& scn, const OutageQuery& q, Path path = Path::Fast,
                        const EvalOptions& opts = {});

/// ϑ_{m,K,k}: the γ̄^{−δ} coefficient of the high-SNR expansion.
double high_snr_coefficient(const Scenario& scn, int stream, int group_size, int user_order);

/// γ̄^{−δ} Σ_K Pr(𝒬=K) ϑ_{m,K,k}. Not clamped to [0, 1].
OutageResult asymptotic_outage_high_snr(const Scenario& scn, const OutageQuery& q);

/// Large-D / low-SNR expansion evaluated at K = Q. Not clamped to [0, 1].
OutageResult asymptotic_outage_large_D(const Scenario& scn, const OutageQuery& q);

/// Average goodput Σ_m Σ_k (Pr(𝒬≥k) − p̃_{m,k}) R_{m,k}, with p̃ from the exact
/// path or from one of the two asymptotic expansions.
GoodputResult goodput(const Scenario& scn, GoodputMethod method = GoodputMethod::Exact,
                      const EvalOptions& opts = {});

/// Σ_m Σ_k Pr(𝒬≥k) R_{m,k}: goodput with every outage removed.
double outage_free_goodput(const SystemConfig& cfg);

using Rational = boost::multiprecision::cpp_rational;

/// C(K,k) Σ_j (−1)^j C(K−k,j) k/(k+j), exactly. Always equals one.
Rational combinatorial_identity(int group_size, int user_order);

/// Least-squares slope of log10(y) against log10(x). Needs ≥ 2 points, all positive.
double fit_loglog_slope(std::span<const double> x, std::span<const double> y);

/// Negated log-log slope of outage against linear SNR.
double fit_diversity_order(std::span<const std::pair<double, double>> curve);

}  // namespace noma::analytic
