#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "lrmoc/pauli.hpp"

// Exact state-vector reference for small systems. Nothing here shares code
// with the stabilizer engine beyond the PauliString value type.
namespace lrmoc::oracle {

inline constexpr std::size_t kMaxQubits = 12;

/// Pure state on n <= 12 qubits. Site s corresponds to bit s-1 of the basis index.
class DenseState {
 public:
  static DenseState plus_state(std::size_t n);
  static DenseState basis_state(std::size_t n, std::uint64_t index);
  static DenseState from_amplitudes(Eigen::VectorXcd amplitudes);

  std::size_t num_qubits() const noexcept { return n_; }
  const Eigen::VectorXcd& amplitudes() const noexcept { return psi_; }

 private:
  DenseState(std::size_t n, Eigen::VectorXcd psi) : n_(n), psi_(std::move(psi)) {}
  std::size_t n_;
  Eigen::VectorXcd psi_;
};

DenseState dense_apply_pauli(const DenseState& state, const PauliString& p);
double dense_expectation(const DenseState& state, const PauliString& p);

struct DenseMeasurement {
  double probability = 0.0;
  DenseState post;
};

/// Projects onto the `outcome` eigenspace of P with (I + outcome P)/2 and renormalises.
/// Throws std::domain_error if that branch has probability below 1e-10.
DenseMeasurement dense_measure(const DenseState& state, const PauliString& p, int outcome);

/// Reduced density matrix of the sites in `region` (1-based).
Eigen::MatrixXcd reduced_density_matrix(const DenseState& state, std::span<const std::size_t> region);

double dense_entropy_region(const DenseState& state, std::span<const std::size_t> region);
double dense_renyi2(const DenseState& state, std::span<const std::size_t> region);

/// Kronecker product of 2x2 Pauli matrices for a label such as "ZYXYZ",
/// optionally prefixed with a sign; character k acts on site k+1.
Eigen::MatrixXcd dense_pauli_matrix(std::string_view label);

/// Matrix of i^phase X^x Z^z assembled from the bit representation.
Eigen::MatrixXcd to_dense_matrix(const PauliString& p);

enum class ProbeSet : std::uint8_t {
  circuit_operators,       // ZZ, ZXZ and edge operators only
  circuit_and_random_paulis,
};

struct OracleCheckConfig {
  std::size_t n = 8;
  std::size_t cases = 500;
  std::size_t steps = 200;
  std::uint64_t seed = 1;
  ProbeSet operators = ProbeSet::circuit_operators;
  double probability_tol = 1e-9;
  double entropy_tol = 1e-8;
  std::size_t full_region_scan_every = 25;
  unsigned threads = 1;  // cases run in parallel; 0 selects the hardware concurrency
};

struct OracleCheckReport {
  std::size_t cases = 0;
  std::size_t passed = 0;
  std::uint64_t measurements = 0;
  std::uint64_t expectation_checks = 0;
  std::uint64_t entropy_checks = 0;
  std::vector<std::string> failures;  // first failure of each failing case
  bool ok() const noexcept { return passed == cases; }
};

/// Replays random measurement sequences through the stabilizer engine and the
/// dense simulator side by side, forcing the dense branch to the stabilizer's outcome.
OracleCheckReport run_oracle_check(const OracleCheckConfig& config);

}  // namespace lrmoc::oracle
