#pragma once

// Trial-level simulator for the PPP MIMO-NOMA downlink: user deployment,
// Kronecker-correlated Rayleigh channels, ZF detection and the SIC outage
// rule, aggregated into outage and goodput estimates with confidence
// intervals. Estimates depend only on (scenario, seed, n_trials).

#include "noma/model.hpp"
#include "noma/philox.hpp"

#include <cstdint>
#include <vector>

namespace noma::mc {

using Rng = Philox4x32;
using FlagMatrix = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// Two-sided 99% normal quantile.
inline constexpr double kZ99 = 2.5758293035489004;

/// Condition-number ceiling for the ZF Gram matrix; draws above it are redrawn.
inline constexpr double kMaxCondition = 1e12;

struct GroupDraw {
    int user_count = 0;
    std::vector<double> distances;  // ascending
};

struct TrialRecord {
    int user_count = 0;
    std::vector<double> distances;  // ascending
    RMatrix zf_noise_amp;           // n_streams × user_count, [(VᴴHᴴHV)⁻¹]_mm
    FlagMatrix outage_flags;        // n_streams × user_count
};

struct Estimate {
    double mean = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    double std_error = 0.0;
    std::int64_t n_trials = 0;
    std::uint64_t seed = 0;
};

struct SimulationOptions {
    int threads = 1;
    /// Draw 1/[Z⁻¹]_mm straight from Gamma(δ, β_m/σ_h²) instead of simulating H.
    bool gamma_fast_path = false;
    /// Treat every decoding as successful (goodput then measures user counts only).
    bool force_no_outage = false;
};

/// Outage flags for one trial together with diagnostics from the cross-check.
struct FlagResult {
    FlagMatrix flags;
    int near_ties = 0;  // union and threshold forms split by rounding only
};

/// Sufficient statistics of a simulation run; merges associatively.
struct Tally {
    std::int64_t n_trials = 0;
    Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> outage_counts;  // M × Q
    std::vector<std::int64_t> group_counts;  // index 0..Q
    double payoff_sum = 0.0;
    double payoff_sq_sum = 0.0;
    std::int64_t degenerate_redraws = 0;
    std::int64_t near_ties = 0;

    void merge(const Tally& other);
};

/// Stream for trial `trial` under master seed `seed`.
inline Rng trial_rng(std::uint64_t seed, std::uint64_t trial) { return Rng(seed, trial); }

/// Uniform on (0, 1] with 53 random bits.
double uniform_open_closed(Rng& rng);

/// Poisson user count truncated at Q, then Q-or-fewer sorted distances with CDF x²/D².
GroupDraw sample_group(const SystemConfig& cfg, Rng& rng);

/// Draws H = H_w S with SᴴS = R_T, H_w i.i.d. CN(0, σ_h²).
class ChannelSampler {
public:
    ChannelSampler(const SystemConfig& cfg, const EffectiveChannelStats& stats);
    CMatrix draw(Rng& rng) const;

private:
    int n_rx_;
    double fading_power_;
    CMatrix root_;  // upper Cholesky factor Lᴴ of R_T
};

CMatrix sample_channel(const SystemConfig& cfg, const EffectiveChannelStats& stats, Rng& rng);

/// Diagonal of (VᴴHᴴHV)⁻¹ via a Cholesky factorization of the Gram matrix.
/// Throws DegenerateDrawError when the Gram condition estimate exceeds kMaxCondition.
Eigen::VectorXd zf_noise_amplification(const CMatrix& channel, const CMatrix& precoder);

/// Outage of every (stream, user) in a realized group of size distances.size(),
/// computed both as a union over SIC stages and as the single threshold test;
/// throws ConsistencyFault if they disagree beyond rounding.
FlagResult outage_flags(const std::vector<double>& distances, const RMatrix& zf_amp,
                        const SystemConfig& cfg, const PowerAllocation& alloc,
                        const SicThresholds& thresholds);

/// One complete trial. Degenerate channel draws are redrawn from the same
/// stream and counted in `redraws`.
TrialRecord run_trial(const Scenario& scn, const ChannelSampler& sampler, std::uint64_t seed,
                      std::uint64_t trial, const SimulationOptions& opts, Tally& diagnostics);

/// Runs `n_trials` trials in fixed-size chunks across `opts.threads` workers.
Tally simulate(const Scenario& scn, std::int64_t n_trials, std::uint64_t seed,
               const SimulationOptions& opts = {});

/// Wilson score interval at normal quantile z.
Estimate wilson_estimate(std::int64_t successes, std::int64_t n, double z = kZ99);

Estimate outage_estimate(const Tally& tally, int stream, int user_order, std::uint64_t seed);
Estimate goodput_estimate(const Tally& tally, std::uint64_t seed);

Estimate estimate_outage(const Scenario& scn, int stream, int user_order, std::int64_t n_trials,
                         std::uint64_t seed, const SimulationOptions& opts = {});
Estimate estimate_goodput(const Scenario& scn, std::int64_t n_trials, std::uint64_t seed,
                          const SimulationOptions& opts = {});

/// n draws of 1/[Z⁻¹]_mm for `stream`, each from its own trial stream.
std::vector<double> sample_schur_gains(const Scenario& scn, int stream, std::int64_t n,
                                       std::uint64_t seed);

}  // namespace noma::mc
