#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "lrmoc/stabilizer.hpp"

namespace lrmoc {

/// Sites a < b at which the order parameters are evaluated, a distance ~L/4
/// from each edge. The same pair bounds the central window used to average
/// the correlators.
struct OrderSites {
  std::size_t a = 0;
  std::size_t b = 0;
};

enum class QuarterRounding : std::uint8_t { ceil, floor };

OrderSites order_sites(std::size_t L, QuarterRounding rounding = QuarterRounding::ceil);

/// |<Z_a Z_b>| in {0, 1}. Requires L >= 8.
int o_ssb(const StabilizerState& state, QuarterRounding rounding = QuarterRounding::ceil);
/// |<Z_{a-1} Y_a X...X Y_b Z_{b+1}>| in {0, 1}. Requires L >= 8.
int o_spt(const StabilizerState& state, QuarterRounding rounding = QuarterRounding::ceil);

/// 2 * M_b, i.e. |<X_1 Z_2>| + |<Z_{L-1} X_L>| in {0, 1, 2}.
int m_b_halves(const StabilizerState& state);
inline double m_b(const StabilizerState& state) { return 0.5 * m_b_halves(state); }

std::size_t s_half(const StabilizerState& state);

/// S_AB + S_BC - S_B - S_ABC over four contiguous quarters A|B|C|D.
/// Throws std::invalid_argument unless L is divisible by 4.
long s_topo(const StabilizerState& state);

// Position-resolved correlators. `i` is the left endpoint, r the distance.
int zz_connected_at(const StabilizerState& state, std::size_t i, std::size_t r);
int string_correlator_at(const StabilizerState& state, std::size_t i, std::size_t r);

/// Reference positions entering the position average at distance r; empty
/// when no reference fits inside the central window.
struct ReferenceRange {
  std::size_t first = 1;
  std::size_t last = 0;
  std::size_t count() const noexcept { return last >= first ? last - first + 1 : 0; }
};
ReferenceRange zz_references(std::size_t L, std::size_t r);
ReferenceRange spt_references(std::size_t L, std::size_t r);

/// Largest distance accepted by c_zz / c_spt (L/2).
inline std::size_t max_correlation_distance(std::size_t L) { return L / 2; }

/// Number of references at distance r with a nonzero per-position value.
std::uint32_t c_zz_hits(const StabilizerState& state, std::size_t r);
std::uint32_t c_spt_hits(const StabilizerState& state, std::size_t r);

/// Position-averaged correlators in [0, 1]; NaN when no reference fits.
double c_zz(const StabilizerState& state, std::size_t r);
double c_spt(const StabilizerState& state, std::size_t r);

struct ObservableSet {
  bool correlations = false;
};

/// Per-trajectory observables. All values are integers so ensemble sums are exact;
/// m_b is stored doubled and correlators as hit counts out of a fixed number of references.
struct TrajectoryRecord {
  std::size_t L = 0;
  std::uint64_t trajectory = 0;
  std::optional<int> o_ssb;
  std::optional<int> o_spt;
  std::size_t s_half = 0;
  std::optional<long> s_topo;
  int m_b_halves = 0;
  std::vector<std::uint32_t> c_zz_hits;   // index r-1
  std::vector<std::uint32_t> c_spt_hits;  // index r-1

  double m_b() const noexcept { return 0.5 * m_b_halves; }
  friend bool operator==(const TrajectoryRecord&, const TrajectoryRecord&) = default;
};

TrajectoryRecord evaluate_observables(const StabilizerState& state, const ObservableSet& which = {});

struct PowerLawFit {
  double amplitude = 0.0;  // A
  double exponent = 0.0;   // Delta, C(r) = A r^-Delta
  double residual = 0.0;   // RMS deviation in log C
  std::size_t used = 0;
  std::size_t zeros_excluded = 0;
};

struct CorrelationPoint {
  double r = 0.0;
  double value = 0.0;
};

/// Least-squares line through (log r, log C) for points with r in [r_min, r_max].
/// Returns nullopt when fewer than three points with C > 0 remain.
std::optional<PowerLawFit> fit_power_law(std::span<const CorrelationPoint> points, double r_min, double r_max);

}  // namespace lrmoc
