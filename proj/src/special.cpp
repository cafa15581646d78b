#include "noma/special.hpp"

#include "noma/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <string>
#include <vector>

namespace noma::special {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kGammaMaxIter = 2000;

// Σ x^n / (a+1)...(a+n), times the prefactor; valid and fast for x < a + 1.
double lower_gamma_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    double ap = a;
    for (int n = 1; n < kGammaMaxIter; ++n) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::abs(term) < std::abs(sum) * kEps)
            return sum * std::exp(a * std::log(x) - x - log_gamma(a));
    }
    throw ConvergenceError("incomplete gamma series did not converge");
}

// Modified Lentz evaluation of the continued fraction for Q(a, x).
double upper_gamma_fraction(double a, double x) {
    constexpr double tiny = std::numeric_limits<double>::min() / kEps;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < kGammaMaxIter; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps)
            return std::exp(a * std::log(x) - x - log_gamma(a)) * h;
    }
    throw ConvergenceError("incomplete gamma continued fraction did not converge");
}

void check_gamma_args(double a, double x) {
    if (!(a > 0.0)) throw ParameterDomainError("incomplete gamma needs a > 0");
    if (!(x >= 0.0)) throw ParameterDomainError("incomplete gamma needs x >= 0");
}

using Rule = boost::math::quadrature::gauss_kronrod<double, 21>;

struct Panel {
    double lo;
    double hi;
    double value;
    double error;
};

struct ByError {
    bool operator()(const Panel& a, const Panel& b) const { return a.error < b.error; }
};

Panel evaluate_panel(const std::function<double(double)>& f, double lo, double hi) {
    double err = 0.0;
    double l1 = 0.0;
    const double value = Rule::integrate(f, lo, hi, 0, 0.0, &err, &l1);
    // Floor the Kronrod–Gauss difference at the rounding level of the panel.
    err = std::max(err, 50.0 * kEps * l1);
    return {lo, hi, value, err};
}

}  // namespace

void SeriesControl::validate() const {
    if (!(rel_tol > 0.0)) throw ParameterDomainError("series rel_tol must be > 0");
    if (max_terms < 10) throw ParameterDomainError("series max_terms must be >= 10");
}

void QuadratureControl::validate() const {
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0))
        throw ParameterDomainError("quadrature tolerances must be > 0");
    if (max_subdivisions < 1) throw ParameterDomainError("max_subdivisions must be >= 1");
}

double log_gamma(double x) {
    if (!(x > 0.0)) throw ParameterDomainError("log_gamma needs x > 0");
    int sign = 0;
    return ::lgamma_r(x, &sign);
}

double regularized_lower_gamma(double a, double x) {
    check_gamma_args(a, x);
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return std::min(1.0, lower_gamma_series(a, x));
    return std::max(0.0, 1.0 - upper_gamma_fraction(a, x));
}

double regularized_upper_gamma(double a, double x) {
    check_gamma_args(a, x);
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return std::max(0.0, 1.0 - lower_gamma_series(a, x));
    return std::min(1.0, upper_gamma_fraction(a, x));
}

double residue_series(int delta, double x, int k, int j, double alpha, const SeriesControl& ctrl) {
    ctrl.validate();
    if (delta < 1) throw ParameterDomainError("residue series needs delta >= 1");
    if (k < 1 || j < 0) throw ParameterDomainError("residue series needs k >= 1, j >= 0");
    if (!(alpha > 2.0)) throw ParameterDomainError("residue series needs alpha > 2");
    if (!(x >= 0.0)) throw ParameterDomainError("residue series needs x >= 0");
    if (x > ctrl.switch_threshold)
        throw RangeRefusalError("residue series argument " + std::to_string(x) +
                                " exceeds the switch threshold; use quadrature");
    if (x == 0.0) return 0.0;

    using ld = long double;
    const ld lx = x;
    const ld order = 2.0L * (k + j);
    ld power = 1.0L;  // (−x)^τ / τ!
    ld sum = 0.0L;
    for (int tau = 0; tau < ctrl.max_terms; ++tau) {
        if (tau > 0) power *= -lx / tau;
        const ld shifted = tau + delta;
        const ld term = power / (shifted * (static_cast<ld>(alpha) * shifted + order));
        sum += term;
        // Terms only shrink monotonically once τ exceeds x.
        if (tau > x && std::abs(term) < ctrl.rel_tol * std::abs(sum))
            return static_cast<double>(std::pow(lx, static_cast<ld>(delta)) * sum);
    }
    throw ConvergenceError("residue series did not converge within " +
                           std::to_string(ctrl.max_terms) + " terms");
}

Integral integrate_adaptive(const std::function<double(double)>& f, double lo, double hi,
                            const QuadratureControl& ctrl) {
    ctrl.validate();
    if (!(lo < hi)) throw ParameterDomainError("integration needs lo < hi");

    std::priority_queue<Panel, std::vector<Panel>, ByError> panels;
    Panel first = evaluate_panel(f, lo, hi);
    double value = first.value;
    double error = first.error;
    panels.push(first);

    auto converged = [&] { return error <= std::max(ctrl.abs_tol, ctrl.rel_tol * std::abs(value)); };
    while (!converged()) {
        if (static_cast<int>(panels.size()) >= ctrl.max_subdivisions)
            throw AccuracyNotReachedError("adaptive quadrature exhausted its subdivision budget",
                                          value, error);
        const Panel worst = panels.top();
        const double mid = 0.5 * (worst.lo + worst.hi);
        if (!(mid > worst.lo && mid < worst.hi))
            throw AccuracyNotReachedError("adaptive quadrature reached floating-point resolution",
                                          value, error);
        panels.pop();
        const Panel left = evaluate_panel(f, worst.lo, mid);
        const Panel right = evaluate_panel(f, mid, worst.hi);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        panels.push(left);
        panels.push(right);
    }

    // Re-sum from the final partition to shed the drift of incremental updates.
    Integral out;
    out.intervals = static_cast<int>(panels.size());
    std::vector<Panel> all;
    all.reserve(panels.size());
    while (!panels.empty()) {
        all.push_back(panels.top());
        panels.pop();
    }
    std::sort(all.begin(), all.end(), [](const Panel& a, const Panel& b) { return a.lo < b.lo; });
    for (const Panel& p : all) {
        out.value += p.value;
        out.error += p.error;
    }
    return out;
}

double log_binomial(int n, int k) {
    if (n < 0 || k < 0 || k > n) throw ParameterDomainError("log_binomial needs 0 <= k <= n");
    if (n <= 60) {
        k = std::min(k, n - k);
        unsigned __int128 c = 1;
        for (int i = 1; i <= k; ++i) c = c * static_cast<unsigned>(n - k + i) / static_cast<unsigned>(i);
        return std::log(static_cast<double>(c));
    }
    return log_gamma(n + 1.0) - log_gamma(k + 1.0) - log_gamma(n - k + 1.0);
}

double binomial(int n, int k) {
    if (n <= 60) {
        if (n < 0 || k < 0 || k > n) throw ParameterDomainError("binomial needs 0 <= k <= n");
        k = std::min(k, n - k);
        unsigned __int128 c = 1;
        for (int i = 1; i <= k; ++i) c = c * static_cast<unsigned>(n - k + i) / static_cast<unsigned>(i);
        return static_cast<double>(c);
    }
    return std::exp(log_binomial(n, k));
}

}  // namespace noma::special
