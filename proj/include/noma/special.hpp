#pragma once

// Numerical kernels: incomplete gamma, binomials, the residue power series for
// the distance-averaged outage, and a globally adaptive Gauss–Kronrod
// integrator used as the reference evaluator.

#include <functional>

namespace noma::special {

struct SeriesControl {
    double rel_tol = 1e-12;
    int max_terms = 500;
    // Arguments above this are refused; alternating-series cancellation grows like e^x.
    double switch_threshold = 20.0;

    void validate() const;
};

struct QuadratureControl {
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    int max_subdivisions = 2000;

    void validate() const;
};

struct Integral {
    double value = 0.0;
    double error = 0.0;   // estimated absolute error
    int intervals = 0;    // panels in the final partition
};

/// ln Γ(x) for x > 0; reentrant.
double log_gamma(double x);

/// P(a, x) = γ(a, x)/Γ(a). Series for x < a + 1, continued fraction otherwise.
double regularized_lower_gamma(double a, double x);

/// Q(a, x) = 1 − P(a, x), computed without cancellation when P is near one.
double regularized_upper_gamma(double a, double x);

/// x^δ Σ_τ (−x)^τ / [τ! (τ+δ) (α(τ+δ) + 2(k+j))].
///
/// Equals ∫₀¹ γ(δ, x u^α) u^{2(k+j)−1} du, the single (k, j) term of the
/// binomially expanded average outage with x = β D^α/(γ̄ θ 𝒦). Accumulated in
/// long double. Throws RangeRefusalError above ctrl.switch_threshold and
/// ConvergenceError if max_terms is reached.
double residue_series(int delta, double x, int k, int j, double alpha,
                      const SeriesControl& ctrl = {});

/// Integrates `f` over [lo, hi] by repeatedly bisecting the panel with the
/// largest error estimate (21-point Kronrod / 10-point Gauss pairs). Stops
/// when error ≤ max(abs_tol, rel_tol·|value|). Deterministic for a given f.
/// Throws AccuracyNotReachedError carrying the best estimate when the
/// subdivision budget runs out.
Integral integrate_adaptive(const std::function<double(double)>& f, double lo, double hi,
                            const QuadratureControl& ctrl = {});

/// ln C(n, k); exact integer arithmetic for n ≤ 60.
double log_binomial(int n, int k);

/// C(n, k) as a double.
double binomial(int n, int k);

}  // namespace noma::special
