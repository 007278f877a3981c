#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "lrmoc/circuit.hpp"
#include "lrmoc/observables.hpp"

namespace lrmoc {

/// Experiment families. Several share a table layout: ee-map, stopo and
/// size-scan write the phase-diagram schema.
enum class SweepKind : std::uint8_t {
  phase_diagram,
  purification,
  edge_probe,
  ee_map,
  ee_scaling,
  correlations,
  stopo,
  size_scan,
};

std::string_view to_string(SweepKind kind);
SweepKind parse_sweep_kind(std::string_view text);

/// Whether `alpha_values` holds alpha or 1/alpha.
enum class AlphaAxis : std::uint8_t { alpha, inv_alpha };

/// Fit range in r; r_max = 0 selects L/4 for each system size.
struct FitWindow {
  double r_min = 4.0;
  double r_max = 0.0;
  double upper_for(std::size_t L) const noexcept { return r_max > 0.0 ? r_max : static_cast<double>(L / 4); }
  friend bool operator==(const FitWindow&, const FitWindow&) = default;
};

struct SweepSpec {
  SweepKind kind = SweepKind::phase_diagram;
  std::vector<double> p_zz;
  std::vector<double> alpha_values;
  AlphaAxis alpha_axis = AlphaAxis::alpha;
  std::vector<std::size_t> L;
  std::vector<double> p_b;  // edge-probe only
  std::size_t trajectories = 1000;
  double steps_mult = 4.0;   // steps = round(steps_mult * L^2)
  std::uint64_t sample_every = 0;  // purification sampling interval; 0 selects L
  CenterRule centers = CenterRule::interior;
  std::optional<FitWindow> fit_window;  // correlations only; unset means no fits
  std::uint64_t seed = 0;
  std::string out;

  Protocol protocol() const noexcept;
  double alpha_at(std::size_t index) const;
  double inv_alpha_at(std::size_t index) const;
  std::uint64_t steps_for(std::size_t L) const;

  /// Throws std::invalid_argument describing the first problem found.
  void validate() const;

  friend bool operator==(const SweepSpec&, const SweepSpec&) = default;
};

nlohmann::json spec_to_json(const SweepSpec& spec);
SweepSpec spec_from_json(const nlohmann::json& j);

struct RunOptions {
  unsigned threads = 0;  // 0 selects the hardware concurrency
  std::function<void(std::size_t done, std::size_t total)> progress;
};

unsigned resolve_threads(unsigned requested);

/// Calls task(i) for i in [0, count) on a pool of workers pulling indices
/// from a shared counter. Rethrows the first exception after all workers stop.
void parallel_for(std::size_t count, const RunOptions& options, const std::function<void(std::size_t)>& task);

/// Integer sums of a per-trajectory integer value. Mean and standard error are
/// formed only on read, so the totals are independent of evaluation order.
struct IntegerMoments {
  std::uint64_t count = 0;
  std::int64_t sum = 0;
  std::uint64_t sum_sq = 0;

  void add(std::int64_t v) noexcept {
    ++count;
    sum += v;
    sum_sq += static_cast<std::uint64_t>(v * v);
  }
  /// Mean of value/scale; NaN when empty.
  double mean(double scale = 1.0) const noexcept;
  /// Sample standard deviation over sqrt(count), of value/scale; 0 for count < 2.
  double sem(double scale = 1.0) const noexcept;

  friend bool operator==(const IntegerMoments&, const IntegerMoments&) = default;
};

struct PointStats {
  CircuitParams params;
  std::size_t n_traj = 0;
  IntegerMoments o_ssb;
  IntegerMoments o_spt;
  IntegerMoments s_half;
  IntegerMoments s_topo;
  IntegerMoments m_b_halves;
  std::vector<IntegerMoments> c_zz_hits;   // index r-1
  std::vector<IntegerMoments> c_spt_hits;  // index r-1

  double max_order() const noexcept;
  double m_b_mean() const noexcept { return m_b_halves.mean(2.0); }
  double m_b_sem() const noexcept { return m_b_halves.sem(2.0); }
  double c_zz_mean(std::size_t r) const;
  double c_zz_sem(std::size_t r) const;
  double c_spt_mean(std::size_t r) const;
  double c_spt_sem(std::size_t r) const;

  friend bool operator==(const PointStats&, const PointStats&) = default;
};

PointStats aggregate(const CircuitParams& params, const std::vector<TrajectoryRecord>& records);

/// Runs trajectories 0..n_traj-1 at one parameter point; records are returned in index order.
std::vector<TrajectoryRecord> run_trajectories(const CircuitParams& params, std::size_t n_traj,
                                               const ObservableSet& which = {}, const RunOptions& options = {});

PointStats run_ensemble(const CircuitParams& params, std::size_t n_traj, const ObservableSet& which = {},
                        const RunOptions& options = {});

/// Parameter points of a steady-state sweep in output order (L, then alpha, then p_b, then p_zz).
struct GridPoint {
  CircuitParams params;
  std::size_t alpha_index = 0;
};
std::vector<GridPoint> grid_points(const SweepSpec& spec);

struct SweepTable {
  SweepSpec spec;
  std::vector<GridPoint> points;
  std::vector<PointStats> stats;  // parallel to points
};

struct PurificationRow {
  double p_zz = 0.0;
  double alpha = 0.0;
  std::size_t L = 0;
  std::uint64_t trajectory = 0;
  std::uint64_t step = 0;
  std::size_t entropy = 0;
  friend bool operator==(const PurificationRow&, const PurificationRow&) = default;
};

struct ScalingRow {
  double p_zz = 0.0;
  double alpha = 0.0;
  std::size_t L = 0;
  double s_half_mean = 0.0;
  double s_half_sem = 0.0;
  double s_half_normalized = 0.0;  // relative to the smallest L at the same (p_zz, alpha)
};

struct FitRow {
  double p_zz = 0.0;
  double alpha = 0.0;
  std::size_t L = 0;
  std::string observable;  // "c_zz" or "c_spt"
  PowerLawFit fit;
  double r_min = 0.0;
  double r_max = 0.0;
};

/// Steady-state sweep over the spec's grid; all trajectories of all points share one work queue.
SweepTable run_sweep(const SweepSpec& spec, const RunOptions& options = {});

SweepTable run_phase_diagram(const SweepSpec& spec, const RunOptions& options = {});
SweepTable run_edge_probe_sweep(const SweepSpec& spec, const RunOptions& options = {});
std::vector<ScalingRow> run_scaling(const SweepSpec& spec, const RunOptions& options = {});
std::vector<PurificationRow> run_purification_sweep(const SweepSpec& spec, const RunOptions& options = {});

std::vector<ScalingRow> scaling_rows(const SweepTable& table);
std::vector<FitRow> correlation_fits(const SweepTable& table, FitWindow window);

// CSV output. Numbers use the shortest representation that round-trips.
std::string format_number(double v);

extern const char* const kPhaseDiagramHeader;
extern const char* const kPurificationHeader;
extern const char* const kCorrelationsHeader;
extern const char* const kEdgeProbeHeader;
extern const char* const kScalingHeader;
extern const char* const kFitsHeader;

void write_phase_diagram_csv(std::ostream& os, const SweepTable& table);
void write_edge_probe_csv(std::ostream& os, const SweepTable& table);
void write_correlations_csv(std::ostream& os, const SweepTable& table);
void write_scaling_csv(std::ostream& os, const std::vector<ScalingRow>& rows);
void write_purification_csv(std::ostream& os, const std::vector<PurificationRow>& rows);
void write_fits_csv(std::ostream& os, const std::vector<FitRow>& rows);

std::string sidecar_path(const std::string& csv_path);
std::string fits_path(const std::string& csv_path);

/// Runs the experiment named by spec.kind and writes spec.out, its JSON
/// sidecar and, for correlations with a fit window, the fits table.
/// Returns the number of data rows written. Throws std::runtime_error with the path on I/O failure.
std::size_t run_and_write(const SweepSpec& spec, const RunOptions& options = {});

std::string_view code_version();

}  // namespace lrmoc
