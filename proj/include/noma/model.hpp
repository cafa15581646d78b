#pragma once

// Configuration and derived quantities shared by the analytic and Monte Carlo
// engines: correlation model, precoder statistics, NOMA power allocation and
// SIC decoding thresholds, and the path-loss law.

#include <Eigen/Dense>

#include <optional>
#include <vector>

namespace noma {

using CMatrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;

struct SystemConfig {
    int n_tx = 2;
    int n_rx = 3;
    int n_streams = 2;
    int group_cap = 3;
    double intensity = 1e-3;      // users per m²
    double radius = 30.0;         // m
    double path_loss_exp = 3.0;
    double path_loss_ref = 1.0;   // received power at 1 m
    double fading_power = 1.0;
    double noise_power = 1.0;
    double avg_snr = 1e6;         // linear, P·σ_h²/σ²
    RMatrix rates;                // n_streams × group_cap, bits/s/Hz; indexed (m, i)
    double corr_coeff = 0.5;
    double alloc_eps = 0.5;
    // n_tx × n_streams with unit-norm columns; the column selector when empty.
    std::optional<CMatrix> precoder;

    /// Defaults used throughout the numerical study: N_t=2, N_r=3, M=2, Q=3,
    /// ε=0.5, ρ=0.5, 60 dB, D=30 m, λ=1e-3 m⁻², R=2 bps/Hz, α=3.
    static SystemConfig defaults();

    /// Replaces the rate matrix with a uniform value.
    void set_uniform_rate(double rate);

    /// Throws ParameterDomainError naming the first violated invariant.
    void validate() const;

    /// N_r − M + 1, the shape of the post-ZF Gamma law.
    int diversity() const { return n_rx - n_streams + 1; }

    /// π D² λ.
    double mean_users() const;
};

/// Superposition coefficients ζ_1..ζ_K for one NOMA group (user 1 nearest).
struct PowerAllocation {
    std::vector<double> coeffs;
    int group_size() const { return static_cast<int>(coeffs.size()); }
};

/// θ_{m,k} for one group size; stored 0-based, accessed 1-based.
struct SicThresholds {
    RMatrix theta;  // n_streams × K
    double at(int stream, int user) const { return theta(stream - 1, user - 1); }
    int group_size() const { return static_cast<int>(theta.cols()); }
};

struct EffectiveChannelStats {
    CMatrix corr_tx;   // R_T
    CMatrix precoder;  // V
    CMatrix eff_cov;   // Σ = Vᴴ R_T V
    Eigen::VectorXd beta;  // β_m = [Σ⁻¹]_mm
};

/// Allocation and thresholds for every group size K = 1..Q. The group size is
/// random, and the allocation rule depends on K, so each realized size gets
/// its own thresholds.
struct GroupPlan {
    std::vector<PowerAllocation> allocations;  // index K-1
    std::vector<SicThresholds> thresholds;     // index K-1

    const SicThresholds& for_size(int group_size) const { return thresholds.at(group_size - 1); }
    const PowerAllocation& allocation(int group_size) const { return allocations.at(group_size - 1); }
    int max_group() const { return static_cast<int>(thresholds.size()); }
};

/// Everything the engines need, derived once from a validated config.
struct Scenario {
    SystemConfig cfg;
    EffectiveChannelStats stats;
    GroupPlan plan;
};

/// n×n matrix with entries rho^|i−j|.
RMatrix build_exponential_correlation(int n, double rho);

/// First `n_streams` columns of the n_tx×n_tx identity.
CMatrix column_selector(int n_tx, int n_streams);

EffectiveChannelStats effective_stats(const CMatrix& corr_tx, const CMatrix& precoder);

/// Backward recursion ζ_k = (1 − Σ_{l>k} ζ_l)(1 − ε 2^{−R}) for k = K..2,
/// with ζ_1 taking the remainder. Fails if the result cannot carry `rate`.
PowerAllocation default_power_allocation(int group_size, double rate, double eps);

/// As above, checked for feasibility against a full rate matrix (M × ≥K).
PowerAllocation default_power_allocation(int group_size, double rate, double eps,
                                         const RMatrix& rates);

/// Throws InfeasibleAllocationError at the first (m, i) with
/// R_{m,i} ≥ log₂(1 + ζ_i / Σ_{l<i} ζ_l).
void check_rate_feasibility(const PowerAllocation& alloc, const RMatrix& rates);

/// θ_{m,k} = min_{k≤i≤K} ( ζ_i/(2^{R_{m,i}} − 1) − Σ_{l<i} ζ_l ); all must be > 0.
SicThresholds sic_thresholds(const PowerAllocation& alloc, const RMatrix& rates);

/// Friis law 𝒦 d^{−α}.
double path_loss(double distance, double ref, double exponent);
double path_loss(double distance, const SystemConfig& cfg);

GroupPlan make_group_plan(const SystemConfig& cfg);

/// Validates `cfg` and builds correlation, precoder statistics and the plan.
Scenario make_scenario(const SystemConfig& cfg);

}  // namespace noma
