#include "noma/model.hpp"

#include "noma/errors.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

namespace noma {

namespace {

[[noreturn]] void domain_error(const std::string& msg) { throw ParameterDomainError(msg); }

}  // namespace

SystemConfig SystemConfig::defaults() {
    SystemConfig cfg;
    cfg.set_uniform_rate(2.0);
    return cfg;
}

void SystemConfig::set_uniform_rate(double rate) {
    rates = RMatrix::Constant(std::max(n_streams, 0), std::max(group_cap, 0), rate);
}

double SystemConfig::mean_users() const {
    return std::numbers::pi * radius * radius * intensity;
}

void SystemConfig::validate() const {
    if (n_tx < 1) domain_error("n_tx must be >= 1");
    if (n_rx < 1) domain_error("n_rx must be >= 1");
    if (n_streams < 1 || n_streams > std::min(n_tx, n_rx))
        domain_error("n_streams must satisfy 1 <= M <= min(n_tx, n_rx)");
    if (group_cap < 1) domain_error("group_cap must be >= 1");
    if (!(intensity > 0.0)) domain_error("intensity must be > 0");
    if (!(radius > 0.0)) domain_error("radius must be > 0");
    if (!(path_loss_exp > 2.0)) domain_error("path_loss_exp must be > 2");
    if (!(path_loss_ref > 0.0)) domain_error("path_loss_ref must be > 0");
    if (!(fading_power > 0.0)) domain_error("fading_power must be > 0");
    if (!(noise_power > 0.0)) domain_error("noise_power must be > 0");
    if (!(avg_snr > 0.0) || !std::isfinite(avg_snr)) domain_error("avg_snr must be finite and > 0");
    if (!(corr_coeff >= 0.0 && corr_coeff < 1.0)) domain_error("corr_coeff must lie in [0, 1)");
    if (!(alloc_eps >= 0.0 && alloc_eps <= 1.0)) domain_error("alloc_eps must lie in [0, 1]");
    if (rates.rows() != n_streams || rates.cols() != group_cap)
        domain_error("rate matrix must be n_streams x group_cap");
    for (Eigen::Index m = 0; m < rates.rows(); ++m)
        for (Eigen::Index i = 0; i < rates.cols(); ++i)
            if (!(rates(m, i) > 0.0) || !std::isfinite(rates(m, i)))
                domain_error("all rates must be finite and > 0");
    if (precoder) {
        if (precoder->rows() != n_tx || precoder->cols() != n_streams)
            domain_error("precoder must be n_tx x n_streams");
    }
}

RMatrix build_exponential_correlation(int n, double rho) {
    if (n < 1) domain_error("correlation size must be >= 1");
    if (!(rho >= 0.0 && rho < 1.0)) domain_error("correlation coefficient must lie in [0, 1)");
    RMatrix r(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            r(i, j) = std::pow(rho, std::abs(i - j));
    return r;
}

CMatrix column_selector(int n_tx, int n_streams) {
    if (n_streams < 1 || n_streams > n_tx) domain_error("selector needs 1 <= M <= n_tx");
    return CMatrix::Identity(n_tx, n_streams);
}

EffectiveChannelStats effective_stats(const CMatrix& corr_tx, const CMatrix& precoder) {
    if (corr_tx.rows() != corr_tx.cols()) domain_error("correlation matrix must be square");
    if (precoder.rows() != corr_tx.rows()) domain_error("precoder rows must equal n_tx");
    if (precoder.cols() < 1 || precoder.cols() > precoder.rows())
        domain_error("precoder must have 1 <= M <= n_tx columns");
    for (Eigen::Index m = 0; m < precoder.cols(); ++m) {
        if (std::abs(precoder.col(m).norm() - 1.0) > 1e-12)
            domain_error("precoder column " + std::to_string(m + 1) + " is not unit norm");
    }
    Eigen::LLT<CMatrix> rt_chol(corr_tx);
    if (rt_chol.info() != Eigen::Success) domain_error("correlation matrix is not positive definite");

    EffectiveChannelStats out;
    out.corr_tx = corr_tx;
    out.precoder = precoder;
    CMatrix sigma = precoder.adjoint() * corr_tx * precoder;
    out.eff_cov = 0.5 * (sigma + sigma.adjoint());

    const Eigen::Index m_count = out.eff_cov.rows();
    Eigen::LLT<CMatrix> chol(out.eff_cov);
    if (chol.info() != Eigen::Success)
        throw DegeneratePrecoderError("effective covariance V^H R_T V is singular");
    const CMatrix lower = chol.matrixL();
    const Eigen::VectorXd diag = lower.diagonal().real();
    if (diag.minCoeff() <= 1e-10 * diag.maxCoeff())
        throw DegeneratePrecoderError("effective covariance V^H R_T V is numerically singular");

    // [Σ⁻¹]_mm = ‖L⁻¹ e_m‖² with Σ = L Lᴴ.
    out.beta.resize(m_count);
    for (Eigen::Index m = 0; m < m_count; ++m) {
        Eigen::VectorXcd e = Eigen::VectorXcd::Unit(m_count, m);
        Eigen::VectorXcd y = chol.matrixL().solve(e);
        out.beta(m) = y.squaredNorm();
    }
    return out;
}

void check_rate_feasibility(const PowerAllocation& alloc, const RMatrix& rates) {
    const int k_count = alloc.group_size();
    if (rates.cols() < k_count) domain_error("rate matrix has fewer columns than the group size");
    for (int i = 0; i < k_count; ++i) {
        if (!(alloc.coeffs[i] > 0.0))
            throw InfeasibleAllocationError("allocation gives user " + std::to_string(i + 1) + " no power",
                                            1, i + 1);
    }
    double below = 0.0;
    for (int i = 0; i < k_count; ++i) {
        if (i > 0) {
            const double cap = std::log2(1.0 + alloc.coeffs[i] / below);
            for (Eigen::Index m = 0; m < rates.rows(); ++m) {
                if (!(rates(m, i) < cap)) {
                    std::ostringstream os;
                    os << "allocation infeasible at stream " << m + 1 << ", user " << i + 1
                       << ": rate " << rates(m, i) << " >= SIC capacity " << cap;
                    throw InfeasibleAllocationError(os.str(), static_cast<int>(m) + 1, i + 1);
                }
            }
        }
        below += alloc.coeffs[i];
    }
}

PowerAllocation default_power_allocation(int group_size, double rate, double eps) {
    if (group_size < 1) domain_error("group size must be >= 1");
    return default_power_allocation(group_size, rate, eps, RMatrix::Constant(1, group_size, rate));
}

PowerAllocation default_power_allocation(int group_size, double rate, double eps,
                                         const RMatrix& rates) {
    if (group_size < 1) domain_error("group size must be >= 1");
    if (!(rate > 0.0)) domain_error("rate must be > 0");
    if (!(eps >= 0.0 && eps <= 1.0)) domain_error("eps must lie in [0, 1]");

    // Track the remainder 1 − Σ_{l>k} ζ_l multiplicatively so ζ_1 keeps its
    // relative precision for large groups.
    const double kept = eps * std::exp2(-rate);
    PowerAllocation alloc;
    alloc.coeffs.assign(group_size, 0.0);
    double remainder = 1.0;
    for (int k = group_size - 1; k >= 1; --k) {
        alloc.coeffs[k] = remainder * (1.0 - kept);
        remainder *= kept;
    }
    alloc.coeffs[0] = remainder;
    check_rate_feasibility(alloc, rates);
    return alloc;
}

SicThresholds sic_thresholds(const PowerAllocation& alloc, const RMatrix& rates) {
    const int k_count = alloc.group_size();
    if (k_count < 1) domain_error("empty allocation");
    if (rates.cols() < k_count) domain_error("rate matrix has fewer columns than the group size");
    const Eigen::Index m_count = rates.rows();

    // margin(m, i) = ζ_i/(2^R − 1) − Σ_{l<i} ζ_l, then a suffix minimum over i ≥ k.
    RMatrix margin(m_count, k_count);
    double below = 0.0;
    for (int i = 0; i < k_count; ++i) {
        for (Eigen::Index m = 0; m < m_count; ++m)
            margin(m, i) = alloc.coeffs[i] / std::expm1(rates(m, i) * std::numbers::ln2) - below;
        below += alloc.coeffs[i];
    }
    SicThresholds out;
    out.theta.resize(m_count, k_count);
    for (Eigen::Index m = 0; m < m_count; ++m) {
        double running = margin(m, k_count - 1);
        for (int k = k_count - 1; k >= 0; --k) {
            running = std::min(running, margin(m, k));
            out.theta(m, k) = running;
        }
    }
    for (Eigen::Index m = 0; m < m_count; ++m)
        for (int k = 0; k < k_count; ++k)
            if (!(out.theta(m, k) > 0.0)) {
                std::ostringstream os;
                os << "SIC threshold theta(" << m + 1 << "," << k + 1 << ") = " << out.theta(m, k)
                   << " is not positive";
                throw InfeasibleAllocationError(os.str(), static_cast<int>(m) + 1, k + 1);
            }
    return out;
}

double path_loss(double distance, double ref, double exponent) {
    if (distance == 0.0) throw SingularDistanceError("path loss is undefined at distance 0");
    if (!(distance > 0.0)) domain_error("distance must be > 0");
    return ref * std::pow(distance, -exponent);
}

double path_loss(double distance, const SystemConfig& cfg) {
    return path_loss(distance, cfg.path_loss_ref, cfg.path_loss_exp);
}

GroupPlan make_group_plan(const SystemConfig& cfg) {
    // The allocation rule takes one rate; use the largest so every entry is covered.
    const double rate = cfg.rates.maxCoeff();
    GroupPlan plan;
    for (int size = 1; size <= cfg.group_cap; ++size) {
        plan.allocations.push_back(default_power_allocation(size, rate, cfg.alloc_eps, cfg.rates));
        plan.thresholds.push_back(sic_thresholds(plan.allocations.back(), cfg.rates));
    }
    return plan;
}

Scenario make_scenario(const SystemConfig& cfg) {
    cfg.validate();
    Scenario scn;
    scn.cfg = cfg;
    const CMatrix corr = build_exponential_correlation(cfg.n_tx, cfg.corr_coeff).cast<std::complex<double>>();
    const CMatrix precoder = cfg.precoder ? *cfg.precoder : column_selector(cfg.n_tx, cfg.n_streams);
    scn.stats = effective_stats(corr, precoder);
    scn.plan = make_group_plan(cfg);
    return scn;
}

}  // namespace noma
