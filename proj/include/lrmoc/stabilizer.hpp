#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "lrmoc/pauli.hpp"
#include "lrmoc/rng.hpp"

namespace lrmoc {

/// How a projective measurement was resolved.
enum class MeasureKind : std::uint8_t {
  anticommuting,  // outcome uniformly random, rank unchanged
  deterministic,  // +-P already in the stabilizer group
  purifying,      // commutes with the group but lies outside it, rank grows by one
};

struct Measurement {
  int outcome = 1;
  MeasureKind kind = MeasureKind::deterministic;
  bool random() const noexcept { return kind != MeasureKind::deterministic; }
};

/// Mixed-capable stabilizer state on n qubits with k <= n signed generators.
///
/// Internally the state keeps a full symplectic basis of 2n rows: row i and
/// row n+i anticommute, all other pairs commute. For i < k the pair is
/// (stabilizer, destabilizer); for i >= k it is a pair of logical operators
/// spanning the unpurified part. Only stabilizer rows carry a phase.
class StabilizerState {
 public:
  static StabilizerState plus_state(std::size_t n);
  static StabilizerState maximally_mixed(std::size_t n);

  std::size_t num_qubits() const noexcept { return n_; }
  std::size_t rank() const noexcept { return k_; }
  bool is_pure() const noexcept { return k_ == n_; }

  PauliString generator(std::size_t i) const;
  std::vector<PauliString> generators() const;

  /// Checks the symplectic-basis invariants; O(n^2) row pairs. Intended for tests.
  bool is_consistent() const;

  std::uint64_t fingerprint() const noexcept;
  /// Representation equality: same rank, basis rows and stabilizer signs.
  friend bool operator==(const StabilizerState& a, const StabilizerState& b);

 private:
  StabilizerState(std::size_t n, std::size_t k);

  std::size_t n_ = 0;
  std::size_t words_ = 0;
  std::size_t k_ = 0;
  // Row r occupies [r*2w, r*2w + w) for X bits, then w words of Z bits.
  std::vector<Word> rows_;
  std::vector<std::uint8_t> phase_;  // i^phase for stabilizer rows; length n
  std::vector<Word> scratch_;
  std::vector<std::uint8_t> anti_;

  Word* row(std::size_t r) noexcept { return rows_.data() + r * 2 * words_; }
  const Word* row(std::size_t r) const noexcept { return rows_.data() + r * 2 * words_; }
  bool anticommutes_with_row(std::size_t r, const PauliString& p) const noexcept;
  void multiply_row_into(std::size_t target, std::size_t source) noexcept;
  void swap_rows(std::size_t a, std::size_t b) noexcept;
  void set_row(std::size_t r, const PauliString& p) noexcept;
  int group_sign(const PauliString& p, Word* scratch) const noexcept;
  void check_operator(const PauliString& p) const;

  template <class OutcomeSource>
  Measurement measure_impl(const PauliString& p, OutcomeSource&& next_outcome);

  friend Measurement measure(StabilizerState&, const PauliString&, Rng&);
  friend Measurement measure_forced(StabilizerState&, const PauliString&, int);
  friend int expectation(const StabilizerState&, const PauliString&);
  friend std::size_t entropy_region(const StabilizerState&, std::span<const std::size_t>);
  friend std::size_t entropy_interval(const StabilizerState&, std::size_t, std::size_t);
};

inline StabilizerState new_plus_state(std::size_t n) { return StabilizerState::plus_state(n); }
inline StabilizerState new_maximally_mixed(std::size_t n) { return StabilizerState::maximally_mixed(n); }

/// Projective measurement of a Hermitian, non-identity Pauli string.
/// Random outcomes draw one bit from `rng`.
Measurement measure(StabilizerState& state, const PauliString& p, Rng& rng);

/// Same as measure(), but a random outcome is set to `outcome` (+1 or -1).
/// A deterministic outcome is returned as is.
Measurement measure_forced(StabilizerState& state, const PauliString& p, int outcome);

/// Exact expectation value in {-1, 0, +1}.
int expectation(const StabilizerState& state, const PauliString& p);

/// Von Neumann entropy in bits of the reduced state on `region` (1-based sites).
std::size_t entropy_region(const StabilizerState& state, std::span<const std::size_t> region);

/// Entropy of the contiguous block first..last (inclusive, 1-based).
std::size_t entropy_interval(const StabilizerState& state, std::size_t first, std::size_t last);

inline std::size_t entropy_full(const StabilizerState& state) { return state.num_qubits() - state.rank(); }

/// Rank over GF(2) of `rows` bit rows of `words` words each. Destroys the input.
std::size_t gf2_rank(std::span<Word> bits, std::size_t rows, std::size_t words);

}  // namespace lrmoc
