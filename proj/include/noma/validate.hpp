#pragma once

// Cross-check suite pitting the Monte Carlo engine against the analytic one,
// plus internal consistency checks of the analytic machinery.

#include "noma/model.hpp"

#include <json.hpp>

#include <cstdint>

namespace noma::cli {

struct ValidationReport {
    nlohmann::ordered_json json;
    bool passed = false;
};

/// Runs every check. The report depends only on (cfg, n_trials, seed), never
/// on `threads`. Infeasible allocations are reported as a failed run.
ValidationReport run_validation(const SystemConfig& cfg, std::int64_t n_trials, std::uint64_t seed,
                                int threads = 1);

}  // namespace noma::cli
