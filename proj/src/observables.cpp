#include "lrmoc/observables.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace lrmoc {

OrderSites order_sites(std::size_t L, QuarterRounding rounding) {
  if (L < 8) throw std::invalid_argument("order parameters need L >= 8, got L=" + std::to_string(L));
  std::size_t a = rounding == QuarterRounding::ceil ? (L + 3) / 4 : L / 4;
  return {a, L + 1 - a};
}

int o_ssb(const StabilizerState& state, QuarterRounding rounding) {
  const std::size_t L = state.num_qubits();
  auto [a, b] = order_sites(L, rounding);
  return std::abs(expectation(state, build_zz(a, b, L)));
}

int o_spt(const StabilizerState& state, QuarterRounding rounding) {
  const std::size_t L = state.num_qubits();
  auto [a, b] = order_sites(L, rounding);
  return std::abs(expectation(state, build_string_op(a, b, L)));
}

int m_b_halves(const StabilizerState& state) {
  const std::size_t L = state.num_qubits();
  if (L < 4) throw std::invalid_argument("edge polarization needs L >= 4");
  return std::abs(expectation(state, build_edge_left(L))) + std::abs(expectation(state, build_edge_right(L)));
}

std::size_t s_half(const StabilizerState& state) { return entropy_interval(state, 1, state.num_qubits() / 2); }

long s_topo(const StabilizerState& state) {
  const std::size_t L = state.num_qubits();
  if (L % 4 != 0) throw std::invalid_argument("s_topo needs L divisible by 4, got L=" + std::to_string(L));
  const std::size_t q = L / 4;
  // Quarters along the chain are A | B | D | C: A and C contain the two ends,
  // so the combination is the conditional mutual information I(A:C|B).
  std::vector<std::size_t> ab, bc, b, abc;
  for (std::size_t s = 1; s <= L; ++s) {
    const std::size_t quarter = (s - 1) / q;
    const bool in_a = quarter == 0, in_b = quarter == 1, in_c = quarter == 3;
    if (in_a || in_b) ab.push_back(s);
    if (in_b || in_c) bc.push_back(s);
    if (in_b) b.push_back(s);
    if (in_a || in_b || in_c) abc.push_back(s);
  }
  auto s_of = [&](const std::vector<std::size_t>& region) { return static_cast<long>(entropy_region(state, region)); };
  return s_of(ab) + s_of(bc) - s_of(b) - s_of(abc);
}

int zz_connected_at(const StabilizerState& state, std::size_t i, std::size_t r) {
  const std::size_t L = state.num_qubits();
  int zz = expectation(state, build_zz(i, i + r, L));
  int zi = expectation(state, build_single(i, Pauli::Z, L));
  int zj = expectation(state, build_single(i + r, Pauli::Z, L));
  return std::abs(zz - zi * zj);
}

int string_correlator_at(const StabilizerState& state, std::size_t i, std::size_t r) {
  return std::abs(expectation(state, build_string_op(i, i + r, state.num_qubits())));
}

namespace {

void check_distance(std::size_t L, std::size_t r) {
  if (r < 1 || r > max_correlation_distance(L)) {
    throw std::out_of_range("correlation distance " + std::to_string(r) + " outside 1.." +
                            std::to_string(max_correlation_distance(L)));
  }
}

}  // namespace

ReferenceRange zz_references(std::size_t L, std::size_t r) {
  check_distance(L, r);
  auto [lo, hi] = order_sites(L);
  if (lo + r > hi) return {};
  return {lo, hi - r};
}

ReferenceRange spt_references(std::size_t L, std::size_t r) {
  check_distance(L, r);
  auto [lo, hi] = order_sites(L);
  // Z padding at i-1 and i+r+1 must also lie inside [lo, hi].
  if (lo + r + 2 > hi) return {};
  return {lo + 1, hi - r - 1};
}

std::uint32_t c_zz_hits(const StabilizerState& state, std::size_t r) {
  const std::size_t L = state.num_qubits();
  auto refs = zz_references(L, r);
  std::uint32_t hits = 0;
  for (std::size_t i = refs.first; i <= refs.last && refs.count() > 0; ++i) {
    hits += static_cast<std::uint32_t>(zz_connected_at(state, i, r));
  }
  return hits;
}

std::uint32_t c_spt_hits(const StabilizerState& state, std::size_t r) {
  const std::size_t L = state.num_qubits();
  auto refs = spt_references(L, r);
  std::uint32_t hits = 0;
  for (std::size_t i = refs.first; i <= refs.last && refs.count() > 0; ++i) {
    hits += static_cast<std::uint32_t>(string_correlator_at(state, i, r));
  }
  return hits;
}

double c_zz(const StabilizerState& state, std::size_t r) {
  auto refs = zz_references(state.num_qubits(), r);
  if (refs.count() == 0) return std::numeric_limits<double>::quiet_NaN();
  return static_cast<double>(c_zz_hits(state, r)) / static_cast<double>(refs.count());
}

double c_spt(const StabilizerState& state, std::size_t r) {
  auto refs = spt_references(state.num_qubits(), r);
  if (refs.count() == 0) return std::numeric_limits<double>::quiet_NaN();
  return static_cast<double>(c_spt_hits(state, r)) / static_cast<double>(refs.count());
}

TrajectoryRecord evaluate_observables(const StabilizerState& state, const ObservableSet& which) {
  const std::size_t L = state.num_qubits();
  TrajectoryRecord rec;
  rec.L = L;
  if (L >= 8) {
    rec.o_ssb = o_ssb(state);
    rec.o_spt = o_spt(state);
  }
  rec.s_half = s_half(state);
  if (L % 4 == 0) rec.s_topo = s_topo(state);
  if (L >= 4) rec.m_b_halves = m_b_halves(state);
  if (which.correlations && L >= 8) {
    const std::size_t rmax = max_correlation_distance(L);
    rec.c_zz_hits.resize(rmax);
    rec.c_spt_hits.resize(rmax);
    for (std::size_t r = 1; r <= rmax; ++r) {
      rec.c_zz_hits[r - 1] = c_zz_hits(state, r);
      rec.c_spt_hits[r - 1] = c_spt_hits(state, r);
    }
  }
  return rec;
}

std::optional<PowerLawFit> fit_power_law(std::span<const CorrelationPoint> points, double r_min, double r_max) {
  std::vector<double> xs;
  std::vector<double> ys;
  std::size_t zeros = 0;
  for (const auto& p : points) {
    if (!(p.r >= r_min && p.r <= r_max) || std::isnan(p.value)) continue;
    if (p.value <= 0.0) {
      ++zeros;
      continue;
    }
    xs.push_back(std::log(p.r));
    ys.push_back(std::log(p.value));
  }
  if (xs.size() < 3) return std::nullopt;

  const auto m = static_cast<Eigen::Index>(xs.size());
  Eigen::MatrixX2d design(m, 2);
  Eigen::VectorXd rhs(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    design(k, 0) = 1.0;
    design(k, 1) = xs[static_cast<std::size_t>(k)];
    rhs(k) = ys[static_cast<std::size_t>(k)];
  }
  Eigen::Vector2d coef = design.colPivHouseholderQr().solve(rhs);
  Eigen::VectorXd resid = design * coef - rhs;

  PowerLawFit fit;
  fit.amplitude = std::exp(coef(0));
  fit.exponent = -coef(1);
  fit.residual = std::sqrt(resid.squaredNorm() / static_cast<double>(m));
  fit.used = xs.size();
  fit.zeros_excluded = zeros;
  return fit;
}

}  // namespace lrmoc
