#include "noma/montecarlo.hpp"

#include "noma/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <string>
#include <thread>

namespace noma::mc {

namespace {

constexpr std::int64_t kChunkTrials = 4096;
constexpr int kMaxRedraws = 64;
// Union and threshold forms may split only when z sits this close to the
// threshold, measured in units of (P/σ²)ℓ(d).
constexpr double kTieTolerance = 1e-9;

Tally empty_tally(const Scenario& scn) {
    Tally t;
    t.outage_counts.setZero(scn.cfg.n_streams, scn.cfg.group_cap);
    t.group_counts.assign(static_cast<std::size_t>(scn.cfg.group_cap) + 1, 0);
    return t;
}

void record_trial(const Scenario& scn, const TrialRecord& rec, Tally& t) {
    ++t.n_trials;
    ++t.group_counts[static_cast<std::size_t>(rec.user_count)];
    double payoff = 0.0;
    for (int k = 0; k < rec.user_count; ++k) {
        for (int m = 0; m < scn.cfg.n_streams; ++m) {
            if (rec.outage_flags(m, k)) {
                ++t.outage_counts(m, k);
            } else {
                payoff += scn.cfg.rates(m, k);
            }
        }
    }
    t.payoff_sum += payoff;
    t.payoff_sq_sum += payoff * payoff;
}

}  // namespace

void Tally::merge(const Tally& other) {
    if (outage_counts.size() == 0) {
        *this = other;
        return;
    }
    n_trials += other.n_trials;
    outage_counts += other.outage_counts;
    for (std::size_t i = 0; i < group_counts.size(); ++i) group_counts[i] += other.group_counts[i];
    payoff_sum += other.payoff_sum;
    payoff_sq_sum += other.payoff_sq_sum;
    degenerate_redraws += other.degenerate_redraws;
    near_ties += other.near_ties;
}

double uniform_open_closed(Rng& rng) {
    const std::uint64_t hi = rng();
    const std::uint64_t lo = rng();
    const std::uint64_t bits = ((hi << 32) | lo) >> 11;
    return (static_cast<double>(bits) + 1.0) * 0x1.0p-53;
}

GroupDraw sample_group(const SystemConfig& cfg, Rng& rng) {
    GroupDraw g;
    const double mu = cfg.mean_users();
    long long raw = 0;
    if (mu > 0.0) {
        std::poisson_distribution<long long> poisson(mu);
        raw = poisson(rng);
    }
    g.user_count = static_cast<int>(std::min<long long>(raw, cfg.group_cap));
    g.distances.resize(static_cast<std::size_t>(g.user_count));
    for (double& d : g.distances) d = cfg.radius * std::sqrt(uniform_open_closed(rng));
    std::sort(g.distances.begin(), g.distances.end());
    return g;
}

ChannelSampler::ChannelSampler(const SystemConfig& cfg, const EffectiveChannelStats& stats)
    : n_rx_(cfg.n_rx), fading_power_(cfg.fading_power) {
    Eigen::LLT<CMatrix> chol(stats.corr_tx);
    if (chol.info() != Eigen::Success) {
        throw ParameterDomainError("transmit correlation matrix is not positive definite");
    }
    root_ = chol.matrixU();
}

CMatrix ChannelSampler::draw(Rng& rng) const {
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5 * fading_power_));
    CMatrix white(n_rx_, root_.rows());
    for (Eigen::Index j = 0; j < white.cols(); ++j) {
        for (Eigen::Index i = 0; i < white.rows(); ++i) {
            const double re = normal(rng);
            const double im = normal(rng);
            white(i, j) = {re, im};
        }
    }
    return white * root_;
}

CMatrix sample_channel(const SystemConfig& cfg, const EffectiveChannelStats& stats, Rng& rng) {
    return ChannelSampler(cfg, stats).draw(rng);
}

Eigen::VectorXd zf_noise_amplification(const CMatrix& channel, const CMatrix& precoder) {
    const CMatrix eff = channel * precoder;
    const CMatrix gram = eff.adjoint() * eff;
    Eigen::LLT<CMatrix> chol(gram);
    if (chol.info() != Eigen::Success) {
        throw DegenerateDrawError("ZF Gram matrix is not positive definite");
    }
    const CMatrix lower = chol.matrixL();
    const Eigen::VectorXd diag = lower.diagonal().real();
    const double ratio = diag.maxCoeff() / diag.minCoeff();
    if (!(diag.minCoeff() > 0.0) || ratio * ratio > kMaxCondition) {
        throw DegenerateDrawError("ZF Gram matrix is numerically singular");
    }
    const Eigen::Index n = gram.rows();
    const CMatrix inv_lower = lower.triangularView<Eigen::Lower>().solve(CMatrix::Identity(n, n));
    return inv_lower.colwise().squaredNorm().transpose();
}

FlagResult outage_flags(const std::vector<double>& distances, const RMatrix& zf_amp,
                        const SystemConfig& cfg, const PowerAllocation& alloc,
                        const SicThresholds& thresholds) {
    const int group = static_cast<int>(distances.size());
    const int streams = cfg.n_streams;
    if (alloc.group_size() != group || thresholds.group_size() != group) {
        throw ParameterDomainError("allocation and thresholds must match the realized group size");
    }
    FlagResult out;
    out.flags.setConstant(streams, group, false);
    const double snr_scale = cfg.avg_snr / cfg.fading_power;  // P/σ²

    std::vector<double> below(static_cast<std::size_t>(group), 0.0);  // Σ_{l<i} ζ_l
    for (int i = 1; i < group; ++i) below[i] = below[i - 1] + alloc.coeffs[i - 1];

    for (int k = 0; k < group; ++k) {
        const double gain = snr_scale * path_loss(distances[k], cfg);
        for (int m = 0; m < streams; ++m) {
            const double z = zf_amp(m, k);
            if (!(z > 0.0)) throw ParameterDomainError("ZF noise amplification must be positive");
            bool union_form = false;
            for (int i = k; i < group && !union_form; ++i) {
                const double sinr = gain * alloc.coeffs[i] / (gain * below[i] + z);
                union_form = std::log2(1.0 + sinr) < cfg.rates(m, i);
            }
            const double limit = gain * thresholds.at(m + 1, k + 1);
            const bool threshold_form = z > limit;
            if (union_form != threshold_form) {
                if (std::abs(z - limit) > kTieTolerance * gain) {
                    throw ConsistencyFault("union and threshold outage forms disagree at stream " +
                                           std::to_string(m + 1) + ", user " + std::to_string(k + 1));
                }
                ++out.near_ties;
            }
            out.flags(m, k) = threshold_form;
        }
    }
    return out;
}

TrialRecord run_trial(const Scenario& scn, const ChannelSampler& sampler, std::uint64_t seed,
                      std::uint64_t trial, const SimulationOptions& opts, Tally& diagnostics) {
    const SystemConfig& cfg = scn.cfg;
    Rng rng = trial_rng(seed, trial);
    GroupDraw g = sample_group(cfg, rng);

    TrialRecord rec;
    rec.user_count = g.user_count;
    rec.distances = std::move(g.distances);
    rec.zf_noise_amp.resize(cfg.n_streams, rec.user_count);
    if (rec.user_count == 0) {
        rec.outage_flags.resize(cfg.n_streams, 0);
        return rec;
    }

    const CMatrix& precoder = scn.stats.precoder;
    for (int k = 0; k < rec.user_count; ++k) {
        if (opts.gamma_fast_path) {
            for (int m = 0; m < cfg.n_streams; ++m) {
                std::gamma_distribution<double> gamma(cfg.diversity(),
                                                      cfg.fading_power / scn.stats.beta(m));
                rec.zf_noise_amp(m, k) = 1.0 / gamma(rng);
            }
            continue;
        }
        for (int attempt = 0;; ++attempt) {
            try {
                rec.zf_noise_amp.col(k) = zf_noise_amplification(sampler.draw(rng), precoder);
                break;
            } catch (const DegenerateDrawError&) {
                ++diagnostics.degenerate_redraws;
                if (attempt + 1 >= kMaxRedraws) throw;
            }
        }
    }

    if (opts.force_no_outage) {
        rec.outage_flags.setConstant(cfg.n_streams, rec.user_count, false);
    } else {
        FlagResult fr = outage_flags(rec.distances, rec.zf_noise_amp, cfg,
                                     scn.plan.allocation(rec.user_count),
                                     scn.plan.for_size(rec.user_count));
        diagnostics.near_ties += fr.near_ties;
        rec.outage_flags = std::move(fr.flags);
    }
    return rec;
}

Tally simulate(const Scenario& scn, std::int64_t n_trials, std::uint64_t seed,
               const SimulationOptions& opts) {
    if (n_trials < 0) throw ParameterDomainError("trial count must be non-negative");
    const ChannelSampler sampler(scn.cfg, scn.stats);
    const std::int64_t n_chunks = (n_trials + kChunkTrials - 1) / kChunkTrials;
    std::vector<Tally> chunks(static_cast<std::size_t>(n_chunks));

    std::atomic<std::int64_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};

    auto worker = [&] {
        try {
            for (std::int64_t c = next++; c < n_chunks && !failed; c = next++) {
                Tally t = empty_tally(scn);
                const std::int64_t lo = c * kChunkTrials;
                const std::int64_t hi = std::min(n_trials, lo + kChunkTrials);
                for (std::int64_t i = lo; i < hi; ++i) {
                    record_trial(scn, run_trial(scn, sampler, seed, static_cast<std::uint64_t>(i), opts, t),
                                 t);
                }
                chunks[static_cast<std::size_t>(c)] = std::move(t);
            }
        } catch (...) {
            if (!failed.exchange(true)) failure = std::current_exception();
        }
    };

    const int threads = static_cast<int>(std::clamp<std::int64_t>(opts.threads, 1, std::max<std::int64_t>(n_chunks, 1)));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);

    Tally total = empty_tally(scn);
    for (const Tally& t : chunks) total.merge(t);
    return total;
}

Estimate wilson_estimate(std::int64_t successes, std::int64_t n, double z) {
    if (n <= 0) throw ParameterDomainError("Wilson interval needs at least one trial");
    if (successes < 0 || successes > n) throw ParameterDomainError("success count out of range");
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(successes) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double centre = (p + z2 / (2.0 * nn)) / denom;
    const double half = z / denom * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn));
    Estimate e;
    e.mean = p;
    e.ci_lo = std::min(p, std::max(0.0, centre - half));
    e.ci_hi = std::max(p, std::min(1.0, centre + half));
    e.std_error = std::sqrt(p * (1.0 - p) / nn);
    e.n_trials = n;
    return e;
}

Estimate outage_estimate(const Tally& tally, int stream, int user_order, std::uint64_t seed) {
    if (stream < 1 || stream > tally.outage_counts.rows() || user_order < 1 ||
        user_order > tally.outage_counts.cols()) {
        throw ParameterDomainError("stream or user order out of range");
    }
    Estimate e = wilson_estimate(tally.outage_counts(stream - 1, user_order - 1), tally.n_trials);
    e.seed = seed;
    return e;
}

Estimate goodput_estimate(const Tally& tally, std::uint64_t seed) {
    if (tally.n_trials <= 0) throw ParameterDomainError("goodput estimate needs at least one trial");
    const double n = static_cast<double>(tally.n_trials);
    Estimate e;
    e.mean = tally.payoff_sum / n;
    const double var =
        tally.n_trials > 1 ? std::max(0.0, (tally.payoff_sq_sum - n * e.mean * e.mean) / (n - 1.0)) : 0.0;
    e.std_error = std::sqrt(var / n);
    e.ci_lo = e.mean - kZ99 * e.std_error;
    e.ci_hi = e.mean + kZ99 * e.std_error;
    e.n_trials = tally.n_trials;
    e.seed = seed;
    return e;
}

Estimate estimate_outage(const Scenario& scn, int stream, int user_order, std::int64_t n_trials,
                         std::uint64_t seed, const SimulationOptions& opts) {
    return outage_estimate(simulate(scn, n_trials, seed, opts), stream, user_order, seed);
}

Estimate estimate_goodput(const Scenario& scn, std::int64_t n_trials, std::uint64_t seed,
                          const SimulationOptions& opts) {
    return goodput_estimate(simulate(scn, n_trials, seed, opts), seed);
}

std::vector<double> sample_schur_gains(const Scenario& scn, int stream, std::int64_t n,
                                       std::uint64_t seed) {
    if (stream < 1 || stream > scn.cfg.n_streams) throw ParameterDomainError("stream out of range");
    const ChannelSampler sampler(scn.cfg, scn.stats);
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(std::max<std::int64_t>(n, 0)));
    for (std::int64_t i = 0; i < n; ++i) {
        Rng rng = trial_rng(seed, static_cast<std::uint64_t>(i));
        for (int attempt = 0;; ++attempt) {
            try {
                const Eigen::VectorXd amp = zf_noise_amplification(sampler.draw(rng), scn.stats.precoder);
                out.push_back(1.0 / amp(stream - 1));
                break;
            } catch (const DegenerateDrawError&) {
                if (attempt + 1 >= kMaxRedraws) throw;
            }
        }
    }
    return out;
}

}  // namespace noma::mc
