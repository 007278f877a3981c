#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lrmoc/observables.hpp"
#include "lrmoc/pauli.hpp"
#include "lrmoc/rng.hpp"
#include "lrmoc/stabilizer.hpp"

namespace lrmoc {

enum class Protocol : std::uint8_t { steady_state, purification, edge_probe };

std::string_view to_string(Protocol p);
Protocol parse_protocol(std::string_view text);

/// How ZXZ centers are drawn. `interior` samples 2..L-1 uniformly;
/// `edge_noop` samples 1..L uniformly and skips the step at the two ends.
enum class CenterRule : std::uint8_t { interior, edge_noop };

struct CircuitParams {
  std::size_t L = 0;
  double p_zz = 0.0;
  double alpha = 1.0;
  std::uint64_t steps = 0;  // bulk measurements; 0 selects 4 L^2
  double p_b = 0.0;
  Protocol protocol = Protocol::steady_state;
  CenterRule centers = CenterRule::interior;
  std::uint64_t seed = 0;
  std::uint64_t trajectory = 0;

  std::uint64_t total_steps() const noexcept { return steps != 0 ? steps : 4 * static_cast<std::uint64_t>(L) * L; }

  /// Throws std::invalid_argument describing the first violated constraint.
  void validate() const;

  friend bool operator==(const CircuitParams&, const CircuitParams&) = default;
};

/// Key identifying a parameter point (everything except seed and trajectory).
std::uint64_t point_key(const CircuitParams& params);

/// The random stream for params.trajectory at this parameter point.
Rng trajectory_stream(const CircuitParams& params);

/// Samples pairs (i, j), i < j, with probability proportional to |i-j|^-alpha
/// over all distinct pairs of an open chain: the distance d is drawn with
/// weight (L-d) d^-alpha from a cumulative table, then the offset uniformly.
class PairSampler {
 public:
  PairSampler(std::size_t L, double alpha);

  std::size_t chain_length() const noexcept { return L_; }
  double alpha() const noexcept { return alpha_; }

  std::pair<std::size_t, std::size_t> sample(Rng& rng) const;

  double distance_probability(std::size_t d) const;
  double pair_probability(std::size_t i, std::size_t j) const;

 private:
  std::size_t L_;
  double alpha_;
  std::vector<double> cumulative_;  // cumulative_[d-1] = sum_{d'<=d} (L-d') d'^-alpha
};

inline std::pair<std::size_t, std::size_t> sample_pair(const PairSampler& sampler, Rng& rng) {
  return sampler.sample(rng);
}

/// Uniform over the interior sites 2..L-1.
std::size_t sample_cluster_center(std::size_t L, Rng& rng);

enum class BulkKind : std::uint8_t { zz, zxz, skipped };

struct StepEvent {
  BulkKind bulk = BulkKind::skipped;
  std::size_t i = 0;  // ZZ pair (i, j) or ZXZ center i
  std::size_t j = 0;
  bool edge_probe = false;
};

/// One time step of the measurement-only circuit. Holds the sampler and
/// prebuilt operators for a fixed parameter point; not thread-safe, build one per worker.
class Circuit {
 public:
  explicit Circuit(const CircuitParams& params);

  const CircuitParams& params() const noexcept { return params_; }
  const PairSampler& sampler() const noexcept { return sampler_; }

  StepEvent step(StabilizerState& state, Rng& rng);

 private:
  CircuitParams params_;
  PairSampler sampler_;
  std::vector<PauliString> zxz_;  // index = center
  PauliString edge_left_;
  PauliString edge_right_;
  PauliString zz_;
};

inline StepEvent step(StabilizerState& state, Circuit& circuit, Rng& rng) { return circuit.step(state, rng); }

struct SteadyStateResult {
  StabilizerState state;
  TrajectoryRecord record;
};

/// Evolves |+>^L for params.total_steps() steps and evaluates the observables.
SteadyStateResult run_steady_state(const CircuitParams& params, const ObservableSet& which = {});

struct EntropySample {
  std::uint64_t step = 0;
  std::size_t entropy = 0;
  friend bool operator==(const EntropySample&, const EntropySample&) = default;
};

/// Evolves the maximally mixed state and records entropy_full at t = 0 and
/// after each listed step count (sorted, each <= total_steps()).
std::vector<EntropySample> run_purification(const CircuitParams& params, std::span<const std::uint64_t> sample_times);

}  // namespace lrmoc
