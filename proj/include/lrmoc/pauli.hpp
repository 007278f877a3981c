#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lrmoc {

using Word = std::uint64_t;
inline constexpr std::size_t kWordBits = 64;

constexpr std::size_t words_for(std::size_t n) { return (n + kWordBits - 1) / kWordBits; }

// Bit 0 is the X component, bit 1 the Z component.
enum class Pauli : std::uint8_t { I = 0, X = 1, Z = 2, Y = 3 };

/// Signed Pauli operator i^phase_exp * prod_j X_j^{x_j} Z_j^{z_j} on n qubits.
///
/// Sites are 1-based everywhere in the public interface. With this convention
/// a standard Y_j = i X_j Z_j contributes one unit to phase_exp, so a Hermitian
/// string with sign +1 has phase_exp == (number of Y sites) mod 4.
class PauliString {
 public:
  PauliString() = default;
  explicit PauliString(std::size_t n);

  /// Parses an optional sign prefix ("+", "-", "i", "-i") followed by one of
  /// I/X/Y/Z (or '_' for I) per site, e.g. "-ZYXI".
  static PauliString parse(std::string_view text);

  std::size_t size() const noexcept { return n_; }
  std::size_t num_words() const noexcept { return x_.size(); }
  int phase_exp() const noexcept { return phase_; }

  bool x(std::size_t site) const;
  bool z(std::size_t site) const;
  Pauli at(std::size_t site) const;

  /// Replaces the single-site factor at `site` with the standard Pauli `p`,
  /// leaving the overall sign of the rest of the string untouched.
  void set(std::size_t site, Pauli p);
  void set_phase_exp(int k) noexcept { phase_ = k & 3; }
  void clear() noexcept;

  std::span<const Word> x_words() const noexcept { return x_; }
  std::span<const Word> z_words() const noexcept { return z_; }

  std::size_t y_count() const noexcept;
  std::size_t weight() const noexcept;
  std::vector<std::size_t> support() const;
  bool is_identity() const noexcept;  // ignores the phase
  bool is_hermitian() const noexcept;

  /// +1 or -1 relative to the product of standard single-site Paulis.
  /// Throws std::domain_error for non-Hermitian strings.
  int sign() const;

  std::string str() const;

  PauliString operator-() const;
  friend bool operator==(const PauliString&, const PauliString&) = default;

 private:
  std::size_t n_ = 0;
  int phase_ = 0;
  std::vector<Word> x_;
  std::vector<Word> z_;

  void check_site(std::size_t site) const;

  friend PauliString multiply(const PauliString&, const PauliString&);
};

/// True iff the symplectic inner product of P and Q is even.
bool commutes(const PauliString& p, const PauliString& q);

/// Exact operator product P*Q, including the i-power bookkeeping.
PauliString multiply(const PauliString& p, const PauliString& q);

inline PauliString operator*(const PauliString& p, const PauliString& q) { return multiply(p, q); }

// Builders. All return Hermitian strings with sign +1.
PauliString build_single(std::size_t site, Pauli p, std::size_t n);
PauliString build_zz(std::size_t i, std::size_t j, std::size_t n);
PauliString build_zxz(std::size_t i, std::size_t n);  // Z_{i-1} X_i Z_{i+1}
/// Z_{a-1} Y_a (prod_{a<k<b} X_k) Y_b Z_{b+1}
PauliString build_string_op(std::size_t a, std::size_t b, std::size_t n);
PauliString build_edge_left(std::size_t n);   // X_1 Z_2
PauliString build_edge_right(std::size_t n);  // Z_{n-1} X_n
PauliString build_global_x(std::size_t n);

}  // namespace lrmoc
