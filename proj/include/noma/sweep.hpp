#pragma once

// Parameter sweeps over one axis, evaluated by any mix of engines, and the
// table they produce. The figure subcommands are fixed sweep specs.

#include "noma/model.hpp"

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace noma::cli {

enum class Axis { SnrDb, Radius, CorrCoeff };
enum class Engine { AnalyticExact, AnalyticAsymptoticHigh, AnalyticAsymptoticLow, MonteCarlo };
enum class Format { Csv, Json };

std::string_view to_string(Axis axis);
std::string_view to_string(Engine engine);
Axis parse_axis(std::string_view name);
Engine parse_engine(std::string_view name);
Format parse_format(std::string_view name);

/// (stream, user order) for outage; empty for goodput.
struct Query {
    std::optional<int> stream;
    std::optional<int> user_order;

    static Query outage(int m, int k) { return {m, k}; }
    static Query goodput() { return {}; }
    bool is_goodput() const { return !stream.has_value(); }
};

/// Parses "m,k" or "goodput".
Query parse_query(std::string_view text);

struct SweepSpec {
    Axis axis = Axis::SnrDb;
    std::vector<double> grid;  // strictly increasing
    std::vector<Query> queries;
    std::vector<Engine> engines;
    std::int64_t mc_trials = 100000;
    std::uint64_t seed = 1;

    void validate() const;
};

struct ResultRow {
    Axis axis = Axis::SnrDb;
    double axis_value = 0.0;
    Engine engine = Engine::AnalyticExact;
    Query query;
    std::optional<double> value;  // empty when the point failed
    std::optional<double> ci_lo;
    std::optional<double> ci_hi;
    std::optional<double> err_est;
    std::string error;  // diagnostic only; not emitted
};

using ResultTable = std::vector<ResultRow>;

/// `lo, lo+step, ..., hi` computed without accumulating rounding error.
std::vector<double> linear_grid(double lo, double hi, double step);

/// Parses "lo:hi:step" or a comma-separated list.
std::vector<double> parse_grid(std::string_view text);

/// Evaluates every (axis value, engine, query) and sorts rows by
/// (axis value, engine, stream, user order). Failures become rows without a value.
ResultTable run_sweep(const SweepSpec& spec, const SystemConfig& cfg, int threads = 1);

/// Sweep specs behind fig1..fig4.
SweepSpec figure_spec(int figure, std::int64_t mc_trials, std::uint64_t seed);

/// Shortest round-trip decimal form, locale-independent.
std::string format_number(double v);

void emit_csv(const ResultTable& table, std::ostream& out);
void emit_json(const ResultTable& table, std::ostream& out);
void emit(const ResultTable& table, Format format, std::ostream& out);

}  // namespace noma::cli
