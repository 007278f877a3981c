#include "lrmoc/circuit.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace lrmoc {

std::string_view to_string(Protocol p) {
  switch (p) {
    case Protocol::steady_state: return "steady_state";
    case Protocol::purification: return "purification";
    case Protocol::edge_probe: return "edge_probe";
  }
  return "unknown";
}

Protocol parse_protocol(std::string_view text) {
  if (text == "steady_state") return Protocol::steady_state;
  if (text == "purification") return Protocol::purification;
  if (text == "edge_probe") return Protocol::edge_probe;
  throw std::invalid_argument("unknown protocol '" + std::string(text) + "'");
}

void CircuitParams::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument(what); };
  if (protocol == Protocol::purification) {
    if (L < 3) fail("purification needs L >= 3, got L=" + std::to_string(L));
  } else if (L < 4) {
    fail("steady-state protocols need L >= 4, got L=" + std::to_string(L));
  }
  if (!(p_zz >= 0.0 && p_zz <= 1.0)) fail("p_zz must lie in [0, 1], got " + std::to_string(p_zz));
  if (!(p_b >= 0.0 && p_b <= 1.0)) fail("p_b must lie in [0, 1], got " + std::to_string(p_b));
  if (!(alpha > 0.0) || !std::isfinite(alpha)) fail("alpha must be positive and finite, got " + std::to_string(alpha));
  if (total_steps() < 1) fail("steps must be >= 1");
}

std::uint64_t point_key(const CircuitParams& params) {
  std::uint64_t h = mix64(params.L);
  h = combine_keys(h, std::bit_cast<std::uint64_t>(params.p_zz));
  h = combine_keys(h, std::bit_cast<std::uint64_t>(params.alpha));
  h = combine_keys(h, std::bit_cast<std::uint64_t>(params.p_b));
  h = combine_keys(h, params.total_steps());
  h = combine_keys(h, static_cast<std::uint64_t>(params.protocol));
  h = combine_keys(h, static_cast<std::uint64_t>(params.centers));
  return h;
}

Rng trajectory_stream(const CircuitParams& params) {
  return make_stream(params.seed, point_key(params), params.trajectory);
}

PairSampler::PairSampler(std::size_t L, double alpha) : L_(L), alpha_(alpha) {
  if (L < 2) throw std::invalid_argument("pair sampler needs L >= 2");
  if (!(alpha > 0.0)) throw std::invalid_argument("pair sampler needs alpha > 0");
  cumulative_.resize(L - 1);
  double acc = 0.0;
  for (std::size_t d = 1; d < L; ++d) {
    acc += static_cast<double>(L - d) * std::pow(static_cast<double>(d), -alpha);
    cumulative_[d - 1] = acc;
  }
}

std::pair<std::size_t, std::size_t> PairSampler::sample(Rng& rng) const {
  const double u = uniform01(rng) * cumulative_.back();
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  if (it == cumulative_.end()) --it;
  const auto d = static_cast<std::size_t>(it - cumulative_.begin()) + 1;
  const std::size_t i = 1 + uniform_below(rng, L_ - d);
  return {i, i + d};
}

double PairSampler::distance_probability(std::size_t d) const {
  if (d < 1 || d >= L_) return 0.0;
  const double prev = d > 1 ? cumulative_[d - 2] : 0.0;
  return (cumulative_[d - 1] - prev) / cumulative_.back();
}

double PairSampler::pair_probability(std::size_t i, std::size_t j) const {
  if (i == j || i < 1 || j < 1 || i > L_ || j > L_) return 0.0;
  const std::size_t d = i < j ? j - i : i - j;
  return std::pow(static_cast<double>(d), -alpha_) / cumulative_.back();
}

std::size_t sample_cluster_center(std::size_t L, Rng& rng) {
  if (L < 3) throw std::invalid_argument("cluster measurements need L >= 3");
  return 2 + uniform_below(rng, L - 2);
}

Circuit::Circuit(const CircuitParams& params)
    : params_(params),
      sampler_((params.validate(), params.L), params.alpha),
      edge_left_(build_edge_left(params.L)),
      edge_right_(build_edge_right(params.L)),
      zz_(params.L) {
  zxz_.resize(params.L + 1);
  for (std::size_t i = 2; i < params.L; ++i) zxz_[i] = build_zxz(i, params.L);
}

StepEvent Circuit::step(StabilizerState& state, Rng& rng) {
  StepEvent ev;
  if (uniform01(rng) < params_.p_zz) {
    auto [i, j] = sampler_.sample(rng);
    zz_.clear();
    zz_.set(i, Pauli::Z);
    zz_.set(j, Pauli::Z);
    measure(state, zz_, rng);
    ev = {BulkKind::zz, i, j, false};
  } else {
    std::size_t center = 0;
    if (params_.centers == CenterRule::interior) {
      center = sample_cluster_center(params_.L, rng);
    } else {
      center = 1 + uniform_below(rng, params_.L);
    }
    if (center >= 2 && center < params_.L) {
      measure(state, zxz_[center], rng);
      ev = {BulkKind::zxz, center, 0, false};
    }
  }
  if (params_.protocol == Protocol::edge_probe && uniform01(rng) < params_.p_b) {
    measure(state, edge_left_, rng);
    measure(state, edge_right_, rng);
    ev.edge_probe = true;
  }
  return ev;
}

SteadyStateResult run_steady_state(const CircuitParams& params, const ObservableSet& which) {
  params.validate();
  if (params.protocol == Protocol::purification) {
    throw std::invalid_argument("run_steady_state called with the purification protocol");
  }
  Circuit circuit(params);
  Rng rng = trajectory_stream(params);
  auto state = StabilizerState::plus_state(params.L);
  const std::uint64_t steps = params.total_steps();
  for (std::uint64_t t = 0; t < steps; ++t) circuit.step(state, rng);
  TrajectoryRecord record = evaluate_observables(state, which);
  record.trajectory = params.trajectory;
  return {std::move(state), std::move(record)};
}

std::vector<EntropySample> run_purification(const CircuitParams& params, std::span<const std::uint64_t> sample_times) {
  params.validate();
  if (params.protocol != Protocol::purification) {
    throw std::invalid_argument("run_purification needs the purification protocol");
  }
  if (!std::is_sorted(sample_times.begin(), sample_times.end())) {
    throw std::invalid_argument("purification sample times must be sorted");
  }
  if (!sample_times.empty() && sample_times.back() > params.total_steps()) {
    throw std::invalid_argument("purification sample time beyond the step budget");
  }
  Circuit circuit(params);
  Rng rng = trajectory_stream(params);
  auto state = StabilizerState::maximally_mixed(params.L);

  std::vector<EntropySample> series;
  series.reserve(sample_times.size() + 1);
  series.push_back({0, entropy_full(state)});
  std::uint64_t t = 0;
  for (std::uint64_t target : sample_times) {
    for (; t < target; ++t) circuit.step(state, rng);
    if (target == 0) continue;
    series.push_back({target, entropy_full(state)});
  }
  return series;
}

}  // namespace lrmoc
