#pragma once

#include <complex>
#include <cstddef>
#include <string>

#include "lrmoc/pauli.hpp"
#include "lrmoc/rng.hpp"

namespace lrmoc::testing {

/// Random Pauli string with a random overall phase (not necessarily Hermitian).
inline PauliString random_string(std::size_t n, Rng& rng) {
  PauliString p(n);
  for (std::size_t s = 1; s <= n; ++s) p.set(s, static_cast<Pauli>(uniform_below(rng, 4)));
  p.set_phase_exp(static_cast<int>(uniform_below(rng, 4)));
  return p;
}

/// Random Hermitian, non-identity string with a random sign.
inline PauliString random_hermitian(std::size_t n, Rng& rng) {
  PauliString p(n);
  do {
    p.clear();
    for (std::size_t s = 1; s <= n; ++s) p.set(s, static_cast<Pauli>(uniform_below(rng, 4)));
  } while (p.is_identity());
  return random_bit(rng) ? -p : p;
}

/// Label such as "ZIXY" with site 1 first.
inline std::string letters(const PauliString& p) {
  std::string s = p.str();
  return s.substr(s[1] == 'i' ? 2 : 1);
}

/// Single-site label with `c` at `site` and identity elsewhere; extra
/// (site, char) pairs may be layered on.
inline std::string label(std::size_t n, std::initializer_list<std::pair<std::size_t, char>> sites) {
  std::string s(n, 'I');
  for (auto [site, c] : sites) s[site - 1] = c;
  return s;
}

}  // namespace lrmoc::testing
