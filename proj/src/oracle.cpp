#include "lrmoc/oracle.hpp"

#include <bit>
#include <cmath>
#include <complex>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

#include "lrmoc/ensemble.hpp"
#include "lrmoc/rng.hpp"
#include "lrmoc/stabilizer.hpp"

namespace lrmoc::oracle {

namespace {

using cd = std::complex<double>;

void check_size(std::size_t n) {
  if (n < 1 || n > kMaxQubits) {
    throw std::invalid_argument("dense oracle supports 1.." + std::to_string(kMaxQubits) + " qubits, got " +
                                std::to_string(n));
  }
}

std::uint64_t low_word(std::span<const Word> words) { return words.empty() ? 0 : words[0]; }

cd i_power(int k) {
  static const cd table[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  return table[k & 3];
}

double entropy_from_eigenvalues(const Eigen::VectorXd& evals) {
  double s = 0.0;
  for (double lambda : evals) {
    if (lambda > 1e-14) s -= lambda * std::log2(lambda);
  }
  return s;
}

// Region of the pure state with the smaller Hilbert space; both sides share the spectrum.
std::vector<std::size_t> smaller_side(std::size_t n, std::span<const std::size_t> region) {
  std::vector<std::size_t> in(region.begin(), region.end());
  if (2 * in.size() <= n) return in;
  std::vector<bool> mark(n + 1, false);
  for (auto s : in) mark[s] = true;
  std::vector<std::size_t> out;
  for (std::size_t s = 1; s <= n; ++s) {
    if (!mark[s]) out.push_back(s);
  }
  return out;
}

}  // namespace

DenseState DenseState::plus_state(std::size_t n) {
  check_size(n);
  const auto dim = static_cast<Eigen::Index>(1ULL << n);
  return DenseState(n, Eigen::VectorXcd::Constant(dim, cd(1.0 / std::sqrt(static_cast<double>(dim)), 0.0)));
}

DenseState DenseState::basis_state(std::size_t n, std::uint64_t index) {
  check_size(n);
  if (index >= (1ULL << n)) throw std::out_of_range("basis index out of range");
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(1ULL << n));
  psi(static_cast<Eigen::Index>(index)) = 1.0;
  return DenseState(n, std::move(psi));
}

DenseState DenseState::from_amplitudes(Eigen::VectorXcd amplitudes) {
  const auto dim = static_cast<std::uint64_t>(amplitudes.size());
  if (dim < 2 || !std::has_single_bit(dim)) throw std::invalid_argument("amplitude vector length must be 2^n");
  const auto n = static_cast<std::size_t>(std::countr_zero(dim));
  check_size(n);
  const double norm = amplitudes.norm();
  if (std::abs(norm - 1.0) > 1e-10) throw std::invalid_argument("amplitude vector is not normalised");
  return DenseState(n, std::move(amplitudes));
}

DenseState dense_apply_pauli(const DenseState& state, const PauliString& p) {
  if (p.size() != state.num_qubits()) throw std::invalid_argument("dense_apply_pauli: size mismatch");
  const std::uint64_t xmask = low_word(p.x_words());
  const std::uint64_t zmask = low_word(p.z_words());
  const cd global = i_power(p.phase_exp());
  const Eigen::VectorXcd& psi = state.amplitudes();
  Eigen::VectorXcd out(psi.size());
  // X^x Z^z |b> = (-1)^{z.b} |b xor x>
  for (Eigen::Index b = 0; b < psi.size(); ++b) {
    const auto ub = static_cast<std::uint64_t>(b);
    const double sign = (std::popcount(zmask & ub) & 1) ? -1.0 : 1.0;
    out(static_cast<Eigen::Index>(ub ^ xmask)) = global * sign * psi(b);
  }
  return DenseState::from_amplitudes(std::move(out));
}

double dense_expectation(const DenseState& state, const PauliString& p) {
  if (p.size() != state.num_qubits()) throw std::invalid_argument("dense_expectation: size mismatch");
  const std::uint64_t xmask = low_word(p.x_words());
  const std::uint64_t zmask = low_word(p.z_words());
  const Eigen::VectorXcd& psi = state.amplitudes();
  cd acc(0, 0);
  for (Eigen::Index b = 0; b < psi.size(); ++b) {
    const auto ub = static_cast<std::uint64_t>(b);
    const cd term = std::conj(psi(static_cast<Eigen::Index>(ub ^ xmask))) * psi(b);
    acc += (std::popcount(zmask & ub) & 1) ? -term : term;
  }
  return (i_power(p.phase_exp()) * acc).real();
}

DenseMeasurement dense_measure(const DenseState& state, const PauliString& p, int outcome) {
  if (outcome != 1 && outcome != -1) throw std::invalid_argument("dense_measure: outcome must be +1 or -1");
  DenseState applied = dense_apply_pauli(state, p);
  Eigen::VectorXcd projected = 0.5 * (state.amplitudes() + static_cast<double>(outcome) * applied.amplitudes());
  const double prob = projected.squaredNorm();
  if (prob < 1e-10) {
    throw std::domain_error("dense_measure: forced outcome " + std::to_string(outcome) + " of " + p.str() +
                            " has zero probability");
  }
  projected /= std::sqrt(prob);
  return {prob, DenseState::from_amplitudes(std::move(projected))};
}

Eigen::MatrixXcd reduced_density_matrix(const DenseState& state, std::span<const std::size_t> region) {
  const std::size_t n = state.num_qubits();
  std::vector<bool> in(n + 1, false);
  for (auto s : region) {
    if (s < 1 || s > n || in[s]) throw std::invalid_argument("reduced_density_matrix: invalid region");
    in[s] = true;
  }
  std::vector<std::size_t> rest;
  for (std::size_t s = 1; s <= n; ++s) {
    if (!in[s]) rest.push_back(s);
  }
  auto scatter = [](std::span<const std::size_t> sites) {
    std::vector<std::uint64_t> offsets(1ULL << sites.size(), 0);
    for (std::uint64_t v = 0; v < offsets.size(); ++v) {
      for (std::size_t k = 0; k < sites.size(); ++k) {
        if ((v >> k) & 1U) offsets[v] |= 1ULL << (sites[k] - 1);
      }
    }
    return offsets;
  };
  const auto row_offsets = scatter(region);
  const auto col_offsets = scatter(rest);
  const auto rows = static_cast<Eigen::Index>(row_offsets.size());
  const auto cols = static_cast<Eigen::Index>(col_offsets.size());
  Eigen::MatrixXcd m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index a = 0; a < rows; ++a) {
      m(a, c) = state.amplitudes()(static_cast<Eigen::Index>(row_offsets[static_cast<std::size_t>(a)] |
                                                             col_offsets[static_cast<std::size_t>(c)]));
    }
  }
  return m * m.adjoint();
}

double dense_entropy_region(const DenseState& state, std::span<const std::size_t> region) {
  if (region.empty() || region.size() == state.num_qubits()) return 0.0;
  auto side = smaller_side(state.num_qubits(), region);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(reduced_density_matrix(state, side),
                                                         Eigen::EigenvaluesOnly);
  return entropy_from_eigenvalues(solver.eigenvalues());
}

double dense_renyi2(const DenseState& state, std::span<const std::size_t> region) {
  if (region.empty() || region.size() == state.num_qubits()) return 0.0;
  auto side = smaller_side(state.num_qubits(), region);
  Eigen::MatrixXcd rho = reduced_density_matrix(state, side);
  const double purity = (rho * rho).trace().real();
  return -std::log2(purity);
}

Eigen::MatrixXcd dense_pauli_matrix(std::string_view label) {
  cd prefactor(1, 0);
  if (label.starts_with('-')) {
    prefactor = -1.0;
    label.remove_prefix(1);
  } else if (label.starts_with('+')) {
    label.remove_prefix(1);
  }
  Eigen::Matrix2cd id, x, y, z;
  id << 1, 0, 0, 1;
  x << 0, 1, 1, 0;
  y << 0, cd(0, -1), cd(0, 1), 0;
  z << 1, 0, 0, -1;
  // Site 1 is the least significant bit, so it is the rightmost Kronecker factor.
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(1, 1);
  for (char c : label) {
    Eigen::Matrix2cd f;
    switch (c) {
      case 'I': case '_': f = id; break;
      case 'X': f = x; break;
      case 'Y': f = y; break;
      case 'Z': f = z; break;
      default: throw std::invalid_argument("dense_pauli_matrix: bad label character");
    }
    Eigen::MatrixXcd next = Eigen::kroneckerProduct(f, out);
    out = std::move(next);
  }
  return prefactor * out;
}

Eigen::MatrixXcd to_dense_matrix(const PauliString& p) {
  check_size(p.size());
  const auto dim = static_cast<Eigen::Index>(1ULL << p.size());
  Eigen::MatrixXcd m(dim, dim);
  for (Eigen::Index b = 0; b < dim; ++b) {
    DenseState basis = DenseState::basis_state(p.size(), static_cast<std::uint64_t>(b));
    m.col(b) = dense_apply_pauli(basis, p).amplitudes();
  }
  return m;
}

namespace {

PauliString random_pauli(std::size_t n, Rng& rng) {
  PauliString p(n);
  do {
    p.clear();
    for (std::size_t s = 1; s <= n; ++s) p.set(s, static_cast<Pauli>(uniform_below(rng, 4)));
  } while (p.is_identity());
  if (random_bit(rng)) p = -p;
  return p;
}

PauliString random_circuit_operator(std::size_t n, Rng& rng) {
  const double u = uniform01(rng);
  if (u < 0.45) {
    std::size_t i = 1 + uniform_below(rng, n);
    std::size_t j = 1 + uniform_below(rng, n - 1);
    if (j >= i) ++j;
    return build_zz(i, j, n);
  }
  if (u < 0.9) return build_zxz(2 + uniform_below(rng, n - 2), n);
  return random_bit(rng) ? build_edge_left(n) : build_edge_right(n);
}

std::vector<PauliString> circuit_operators(std::size_t n) {
  std::vector<PauliString> ops;
  for (std::size_t i = 1; i <= n; ++i) {
    ops.push_back(build_single(i, Pauli::X, n));
    ops.push_back(build_single(i, Pauli::Z, n));
    for (std::size_t j = i + 1; j <= n; ++j) ops.push_back(build_zz(i, j, n));
  }
  for (std::size_t i = 2; i < n; ++i) ops.push_back(build_zxz(i, n));
  for (std::size_t a = 2; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) ops.push_back(build_string_op(a, b, n));
  }
  ops.push_back(build_edge_left(n));
  ops.push_back(build_edge_right(n));
  ops.push_back(build_global_x(n));
  return ops;
}

std::vector<std::size_t> region_from_mask(std::size_t n, std::uint64_t mask) {
  std::vector<std::size_t> region;
  for (std::size_t s = 1; s <= n; ++s) {
    if ((mask >> (s - 1)) & 1U) region.push_back(s);
  }
  return region;
}

}  // namespace

namespace {

struct CaseResult {
  std::uint64_t measurements = 0;
  std::uint64_t expectation_checks = 0;
  std::uint64_t entropy_checks = 0;
  std::string failure;
};

CaseResult run_oracle_case(const OracleCheckConfig& config, const std::vector<PauliString>& probes, std::size_t c) {
  const std::size_t n = config.n;
  const std::uint64_t full = (1ULL << n) - 1;
  CaseResult report;
  Rng rng = make_stream(config.seed, mix64(0x6f7261636c65ULL ^ n), c);
  auto stab = StabilizerState::plus_state(n);
  auto dense = DenseState::plus_state(n);
  std::string& failure = report.failure;

  auto fail = [&](std::size_t step, const std::string& what) {
    if (failure.empty()) {
      std::ostringstream os;
      os << "case " << c << " step " << step << ": " << what;
      failure = os.str();
    }
  };

  auto check_expectation = [&](std::size_t step, const PauliString& p) {
    ++report.expectation_checks;
    const int e = expectation(stab, p);
    const double d = dense_expectation(dense, p);
    if (std::abs(d - e) > config.probability_tol) {
      std::ostringstream os;
      os << "<" << p.str() << "> stabilizer " << e << " dense " << d;
      fail(step, os.str());
    }
  };

  auto check_entropy = [&](std::size_t step, std::uint64_t mask) {
    ++report.entropy_checks;
    auto region = region_from_mask(n, mask);
    const auto s = static_cast<double>(entropy_region(stab, region));
    const double vn = dense_entropy_region(dense, region);
    const double r2 = dense_renyi2(dense, region);
    if (std::abs(vn - s) > config.entropy_tol || std::abs(r2 - s) > config.entropy_tol) {
      std::ostringstream os;
      os << "entropy of region mask " << mask << ": stabilizer " << s << " von Neumann " << vn << " Renyi-2 " << r2;
      fail(step, os.str());
    }
  };

  for (std::size_t step = 0; step < config.steps && failure.empty(); ++step) {
    PauliString op = (config.operators == ProbeSet::circuit_and_random_paulis && random_bit(rng))
                         ? random_pauli(n, rng)
                         : random_circuit_operator(n, rng);
    Measurement m = measure(stab, op, rng);
    ++report.measurements;
    const double expected = m.random() ? 0.5 : 1.0;
    try {
      DenseMeasurement dm = dense_measure(dense, op, m.outcome);
      if (std::abs(dm.probability - expected) > config.probability_tol) {
        std::ostringstream os;
        os << "measuring " << op.str() << " -> " << m.outcome << ": dense probability " << dm.probability
           << ", stabilizer expected " << expected;
        fail(step, os.str());
      }
      dense = std::move(dm.post);
    } catch (const std::domain_error& e) {
      fail(step, e.what());
      break;
    }
    if (!stab.is_consistent()) fail(step, "stabilizer invariants violated");

    for (const auto& p : probes) check_expectation(step, p);
    for (int k = 0; k < 2; ++k) check_expectation(step, random_pauli(n, rng));

    check_entropy(step, (1ULL << (n / 2)) - 1);
    for (int k = 0; k < 2; ++k) check_entropy(step, 1 + uniform_below(rng, full - 1));
    const bool last = step + 1 == config.steps;
    if (last || (config.full_region_scan_every > 0 && step % config.full_region_scan_every == 0)) {
      for (std::uint64_t mask = 1; mask < full; ++mask) check_entropy(step, mask);
    }
  }
  return report;
}

}  // namespace

OracleCheckReport run_oracle_check(const OracleCheckConfig& config) {
  check_size(config.n);
  if (config.n < 3) throw std::invalid_argument("oracle check needs n >= 3");
  const auto probes = circuit_operators(config.n);

  std::vector<CaseResult> results(config.cases);
  parallel_for(config.cases, RunOptions{.threads = config.threads, .progress = {}},
               [&](std::size_t c) { results[c] = run_oracle_case(config, probes, c); });

  OracleCheckReport report;
  report.cases = config.cases;
  for (const auto& r : results) {
    report.measurements += r.measurements;
    report.expectation_checks += r.expectation_checks;
    report.entropy_checks += r.entropy_checks;
    if (r.failure.empty()) {
      ++report.passed;
    } else {
      report.failures.push_back(r.failure);
    }
  }
  return report;
}

}  // namespace lrmoc::oracle
