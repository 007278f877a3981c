#include <doctest.h>

#include <cmath>
#include <map>
#include <stdexcept>

#include "lrmoc/circuit.hpp"

using namespace lrmoc;

namespace {

// Pair probabilities by direct enumeration of all distinct pairs with weight |i-j|^-alpha.
std::map<std::pair<std::size_t, std::size_t>, double> enumerated_pairs(std::size_t L, double alpha) {
  std::map<std::pair<std::size_t, std::size_t>, double> probs;
  double total = 0.0;
  for (std::size_t i = 1; i <= L; ++i) {
    for (std::size_t j = i + 1; j <= L; ++j) {
      const double w = std::pow(static_cast<double>(j - i), -alpha);
      probs[{i, j}] = w;
      total += w;
    }
  }
  for (auto& [pair, p] : probs) p /= total;
  return probs;
}

CircuitParams params_for(std::size_t L, double p_zz, double alpha) {
  CircuitParams p;
  p.L = L;
  p.p_zz = p_zz;
  p.alpha = alpha;
  p.seed = 5;
  return p;
}

}  // namespace

TEST_CASE("two-site chain always yields the only pair") {
  PairSampler sampler(2, 3.0);
  Rng rng = make_stream(41, 0, 0);
  for (int k = 0; k < 100; ++k) CHECK(sample_pair(sampler, rng) == std::pair<std::size_t, std::size_t>{1, 2});
}

TEST_CASE("pair probabilities at L=4, alpha=1") {
  PairSampler sampler(4, 1.0);
  // Total weight 3*1 + 2/2 + 1/3 = 13/3.
  CHECK(sampler.pair_probability(1, 2) == doctest::Approx(3.0 / 13.0).epsilon(1e-14));
  CHECK(sampler.pair_probability(2, 3) == doctest::Approx(3.0 / 13.0).epsilon(1e-14));
  CHECK(sampler.pair_probability(1, 4) == doctest::Approx(1.0 / 13.0).epsilon(1e-14));
  CHECK(sampler.distance_probability(1) == doctest::Approx(9.0 / 13.0).epsilon(1e-14));
  CHECK(sampler.distance_probability(4) == 0.0);

  const auto exact = enumerated_pairs(4, 1.0);
  CHECK(exact.at({1, 2}) == doctest::Approx(3.0 / 13.0).epsilon(1e-14));
  CHECK(exact.at({1, 4}) == doctest::Approx(1.0 / 13.0).epsilon(1e-14));

  const int draws = 1000000;
  std::map<std::pair<std::size_t, std::size_t>, int> counts;
  Rng rng = make_stream(42, 0, 0);
  for (int k = 0; k < draws; ++k) ++counts[sampler.sample(rng)];
  CHECK(counts.size() == 6);
  for (const auto& [pair, p] : exact) {
    const double sigma = std::sqrt(draws * p * (1 - p));
    CAPTURE(pair.first);
    CAPTURE(pair.second);
    CHECK(std::abs(counts[pair] - draws * p) <= 4 * sigma);
  }
}

TEST_CASE("pair distribution matches enumeration (chi-squared)") {
  Rng rng = make_stream(43, 0, 0);
  for (std::size_t L : {3, 5, 8}) {
    for (double alpha : {0.5, 1.0, 2.5, 6.0}) {
      PairSampler sampler(L, alpha);
      const auto exact = enumerated_pairs(L, alpha);
      const int draws = 200000;
      std::map<std::pair<std::size_t, std::size_t>, int> counts;
      for (int k = 0; k < draws; ++k) ++counts[sampler.sample(rng)];
      double chi2 = 0.0;
      for (const auto& [pair, p] : exact) {
        CHECK(sampler.pair_probability(pair.first, pair.second) == doctest::Approx(p).epsilon(1e-12));
        const double expected = draws * p;
        chi2 += (counts[pair] - expected) * (counts[pair] - expected) / expected;
      }
      const double dof = static_cast<double>(exact.size() - 1);
      CAPTURE(L);
      CAPTURE(alpha);
      CHECK(chi2 < dof + 6 * std::sqrt(2 * dof));
    }
  }
}

TEST_CASE("large alpha reduces to nearest neighbours") {
  PairSampler sampler(64, 50.0);
  Rng rng = make_stream(44, 0, 0);
  int nearest = 0;
  const int draws = 100000;
  for (int k = 0; k < draws; ++k) {
    auto [i, j] = sampler.sample(rng);
    CHECK(i < j);
    CHECK(j <= 64);
    if (j - i == 1) ++nearest;
  }
  CHECK(static_cast<double>(nearest) / draws > 0.999);
}

TEST_CASE("cluster centers are uniform over the interior") {
  Rng rng = make_stream(45, 0, 0);
  for (int k = 0; k < 100; ++k) CHECK(sample_cluster_center(3, rng) == 2);
  const int draws = 100000;
  std::map<std::size_t, int> counts;
  for (int k = 0; k < draws; ++k) ++counts[sample_cluster_center(6, rng)];
  CHECK(counts.size() == 4);
  const double sigma = std::sqrt(draws * 0.25 * 0.75);
  for (std::size_t c = 2; c <= 5; ++c) CHECK(std::abs(counts[c] - draws / 4.0) <= 4 * sigma);
  CHECK_THROWS_AS(sample_cluster_center(2, rng), std::invalid_argument);
}

TEST_CASE("step applies the right operator kinds") {
  Rng rng = make_stream(46, 0, 0);
  for (double p_zz : {0.0, 1.0}) {
    Circuit circuit(params_for(16, p_zz, 2.0));
    auto st = new_plus_state(16);
    for (int k = 0; k < 2000; ++k) {
      const auto ev = circuit.step(st, rng);
      CHECK(ev.bulk == (p_zz == 0.0 ? BulkKind::zxz : BulkKind::zz));
      CHECK_FALSE(ev.edge_probe);
    }
  }
  Circuit half(params_for(16, 0.5, 2.0));
  auto st = new_plus_state(16);
  const int steps = 100000;
  int zz = 0;
  for (int k = 0; k < steps; ++k) zz += half.step(st, rng).bulk == BulkKind::zz;
  CHECK(std::abs(zz - steps / 2.0) <= 4 * std::sqrt(steps * 0.25));
}

TEST_CASE("edge_noop centers skip the two ends") {
  auto params = params_for(10, 0.0, 2.0);
  params.centers = CenterRule::edge_noop;
  Circuit circuit(params);
  auto st = new_plus_state(10);
  Rng rng = make_stream(47, 0, 0);
  const int steps = 100000;
  int skipped = 0;
  for (int k = 0; k < steps; ++k) skipped += circuit.step(st, rng).bulk == BulkKind::skipped;
  const double p = 2.0 / 10.0;
  CHECK(std::abs(skipped - steps * p) <= 4 * std::sqrt(steps * p * (1 - p)));
}

TEST_CASE("edge probe measures both boundary operators") {
  auto params = params_for(12, 0.5, 3.0);
  params.protocol = Protocol::edge_probe;
  params.p_b = 1.0;
  Circuit circuit(params);
  auto st = new_plus_state(12);
  Rng rng = make_stream(48, 0, 0);
  for (int k = 0; k < 200; ++k) {
    CHECK(circuit.step(st, rng).edge_probe);
    CHECK(m_b_halves(st) == 2);
    // Both edge operators anticommute with the global symmetry, which is therefore undetermined.
    CHECK(expectation(st, build_global_x(12)) == 0);
  }

  params.p_b = 0.1;
  Circuit sparse(params);
  const int steps = 100000;
  int fired = 0;
  for (int k = 0; k < steps; ++k) fired += sparse.step(st, rng).edge_probe;
  CHECK(std::abs(fired - steps * 0.1) <= 4 * std::sqrt(steps * 0.09));
}

TEST_CASE("parameter validation") {
  CHECK_NOTHROW(params_for(4, 0.5, 1.0).validate());
  CHECK_THROWS_AS(params_for(3, 0.5, 1.0).validate(), std::invalid_argument);
  CHECK_THROWS_AS(params_for(8, 1.5, 1.0).validate(), std::invalid_argument);
  CHECK_THROWS_AS(params_for(8, -0.1, 1.0).validate(), std::invalid_argument);
  CHECK_THROWS_AS(params_for(8, 0.5, 0.0).validate(), std::invalid_argument);
  CHECK_THROWS_AS(params_for(8, 0.5, -1.0).validate(), std::invalid_argument);
  CHECK_THROWS_AS(params_for(8, 0.5, INFINITY).validate(), std::invalid_argument);
  auto bad_pb = params_for(8, 0.5, 1.0);
  bad_pb.p_b = 2.0;
  CHECK_THROWS_AS(bad_pb.validate(), std::invalid_argument);
  auto purify = params_for(3, 0.5, 1.0);
  purify.protocol = Protocol::purification;
  CHECK_NOTHROW(purify.validate());
  CHECK(params_for(8, 0.5, 1.0).total_steps() == 256);
  CHECK(parse_protocol(to_string(Protocol::edge_probe)) == Protocol::edge_probe);
  CHECK_THROWS_AS(parse_protocol("bogus"), std::invalid_argument);
}

TEST_CASE("steady states at the two fixed points") {
  for (std::uint64_t t = 0; t < 5; ++t) {
    auto cluster = params_for(32, 0.0, 3.0);
    cluster.trajectory = t;
    const auto rc = run_steady_state(cluster).record;
    CHECK(rc.o_spt == 1);
    CHECK(rc.o_ssb == 0);

    auto ordered = params_for(32, 1.0, 6.0);
    ordered.trajectory = t;
    const auto ro = run_steady_state(ordered).record;
    CHECK(ro.o_ssb == 1);
    CHECK(ro.o_spt == 0);
  }
}

TEST_CASE("symmetry is conserved without edge probes") {
  for (double p_zz : {0.0, 0.3, 0.7, 1.0}) {
    for (double alpha : {0.5, 2.0, 6.0}) {
      auto params = params_for(20, p_zz, alpha);
      params.trajectory = 3;
      auto result = run_steady_state(params);
      CHECK(expectation(result.state, build_global_x(20)) == 1);
      CHECK(result.state.is_pure());
    }
  }
}

TEST_CASE("trajectories replay bit-identically") {
  auto params = params_for(24, 0.4, 1.5);
  params.trajectory = 17;
  const auto a = run_steady_state(params, {.correlations = true});
  const auto b = run_steady_state(params, {.correlations = true});
  CHECK(a.record == b.record);
  CHECK(a.state == b.state);
  params.trajectory = 18;
  CHECK_FALSE(run_steady_state(params).state == a.state);
}

TEST_CASE("stream keys separate parameter points and trajectories") {
  auto p = params_for(16, 0.3, 2.0);
  auto q = p;
  q.p_zz = 0.30000000000000004;
  CHECK(point_key(p) != point_key(q));
  q = p;
  q.alpha = 2.5;
  CHECK(point_key(p) != point_key(q));
  q = p;
  q.trajectory = 1;
  CHECK(point_key(p) == point_key(q));
  Rng a = trajectory_stream(p);
  Rng b = trajectory_stream(q);
  CHECK(a() != b());
}

TEST_CASE("purification series") {
  auto params = params_for(32, 0.0, 2.0);
  params.protocol = Protocol::purification;
  std::vector<std::uint64_t> times;
  for (std::uint64_t t = 32; t <= params.total_steps(); t += 32) times.push_back(t);
  for (std::uint64_t traj = 0; traj < 10; ++traj) {
    params.trajectory = traj;
    const auto series = run_purification(params, times);
    REQUIRE(series.size() == times.size() + 1);
    CHECK(series.front().step == 0);
    CHECK(series.front().entropy == 32);
    for (std::size_t k = 1; k < series.size(); ++k) CHECK(series[k].entropy <= series[k - 1].entropy);
    CHECK(series.back().entropy == 2);
  }

  params.p_zz = 0.5;
  params.alpha = 1.0;
  int one_bit = 0;
  for (std::uint64_t traj = 0; traj < 10; ++traj) {
    params.trajectory = traj;
    one_bit += run_purification(params, times).back().entropy == 1;
  }
  CHECK(one_bit >= 8);

  const std::vector<std::uint64_t> unsorted{64, 32};
  CHECK_THROWS_AS(run_purification(params, unsorted), std::invalid_argument);
  const std::vector<std::uint64_t> beyond{params.total_steps() + 1};
  CHECK_THROWS_AS(run_purification(params, beyond), std::invalid_argument);
  auto steady = params_for(32, 0.5, 1.0);
  CHECK_THROWS_AS(run_purification(steady, times), std::invalid_argument);
  CHECK_THROWS_AS(run_steady_state(params), std::invalid_argument);
}
