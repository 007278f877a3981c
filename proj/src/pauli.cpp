#include "lrmoc/pauli.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

namespace lrmoc {

namespace {

void check_same_size(const PauliString& p, const PauliString& q) {
  if (p.size() != q.size()) {
    throw std::invalid_argument("Pauli string size mismatch: " + std::to_string(p.size()) + " vs " +
                                std::to_string(q.size()));
  }
}

void require(bool cond, const char* what) {
  if (!cond) throw std::invalid_argument(what);
}

void require_range(bool cond, const char* what) {
  if (!cond) throw std::out_of_range(what);
}

}  // namespace

PauliString::PauliString(std::size_t n) : n_(n), x_(words_for(n), 0), z_(words_for(n), 0) {}

PauliString PauliString::parse(std::string_view text) {
  int phase = 0;
  if (text.starts_with("-i")) {
    phase = 3;
    text.remove_prefix(2);
  } else if (text.starts_with("+i")) {
    phase = 1;
    text.remove_prefix(2);
  } else if (text.starts_with('i')) {
    phase = 1;
    text.remove_prefix(1);
  } else if (text.starts_with('-')) {
    phase = 2;
    text.remove_prefix(1);
  } else if (text.starts_with('+')) {
    text.remove_prefix(1);
  }

  PauliString out(text.size());
  for (std::size_t k = 0; k < text.size(); ++k) {
    switch (text[k]) {
      case 'I': case '_': break;
      case 'X': out.set(k + 1, Pauli::X); break;
      case 'Y': out.set(k + 1, Pauli::Y); break;
      case 'Z': out.set(k + 1, Pauli::Z); break;
      default:
        throw std::invalid_argument("invalid Pauli character '" + std::string(1, text[k]) + "'");
    }
  }
  out.phase_ = (out.phase_ + phase) & 3;
  return out;
}

void PauliString::check_site(std::size_t site) const {
  if (site < 1 || site > n_) {
    throw std::out_of_range("site " + std::to_string(site) + " outside 1.." + std::to_string(n_));
  }
}

bool PauliString::x(std::size_t site) const {
  check_site(site);
  std::size_t q = site - 1;
  return (x_[q / kWordBits] >> (q % kWordBits)) & 1U;
}

bool PauliString::z(std::size_t site) const {
  check_site(site);
  std::size_t q = site - 1;
  return (z_[q / kWordBits] >> (q % kWordBits)) & 1U;
}

Pauli PauliString::at(std::size_t site) const {
  return static_cast<Pauli>(static_cast<unsigned>(x(site)) | (static_cast<unsigned>(z(site)) << 1U));
}

void PauliString::set(std::size_t site, Pauli p) {
  check_site(site);
  std::size_t q = site - 1;
  Word mask = Word{1} << (q % kWordBits);
  Word& xw = x_[q / kWordBits];
  Word& zw = z_[q / kWordBits];
  bool had_y = (xw & mask) && (zw & mask);
  auto bits = static_cast<unsigned>(p);
  xw = (bits & 1U) ? (xw | mask) : (xw & ~mask);
  zw = (bits & 2U) ? (zw | mask) : (zw & ~mask);
  phase_ = (phase_ - static_cast<int>(had_y) + static_cast<int>(p == Pauli::Y)) & 3;
}

void PauliString::clear() noexcept {
  std::fill(x_.begin(), x_.end(), 0);
  std::fill(z_.begin(), z_.end(), 0);
  phase_ = 0;
}

std::size_t PauliString::y_count() const noexcept {
  std::size_t c = 0;
  for (std::size_t w = 0; w < x_.size(); ++w) c += std::popcount(x_[w] & z_[w]);
  return c;
}

std::size_t PauliString::weight() const noexcept {
  std::size_t c = 0;
  for (std::size_t w = 0; w < x_.size(); ++w) c += std::popcount(x_[w] | z_[w]);
  return c;
}

std::vector<std::size_t> PauliString::support() const {
  std::vector<std::size_t> sites;
  for (std::size_t w = 0; w < x_.size(); ++w) {
    Word bits = x_[w] | z_[w];
    while (bits) {
      sites.push_back(w * kWordBits + std::countr_zero(bits) + 1);
      bits &= bits - 1;
    }
  }
  return sites;
}

bool PauliString::is_identity() const noexcept {
  for (std::size_t w = 0; w < x_.size(); ++w) {
    if (x_[w] | z_[w]) return false;
  }
  return true;
}

bool PauliString::is_hermitian() const noexcept {
  return ((static_cast<std::size_t>(phase_) + y_count()) & 1U) == 0;
}

int PauliString::sign() const {
  if (!is_hermitian()) throw std::domain_error("sign of a non-Hermitian Pauli string");
  int rel = (phase_ - static_cast<int>(y_count() & 3U)) & 3;
  return rel == 0 ? 1 : -1;
}

std::string PauliString::str() const {
  std::string out;
  if (is_hermitian()) {
    out = sign() > 0 ? "+" : "-";
  } else {
    out = ((phase_ - static_cast<int>(y_count() & 3U)) & 3) == 1 ? "+i" : "-i";
  }
  static constexpr char kChars[] = {'I', 'X', 'Z', 'Y'};
  for (std::size_t s = 1; s <= n_; ++s) out.push_back(kChars[static_cast<unsigned>(at(s))]);
  return out;
}

PauliString PauliString::operator-() const {
  PauliString out = *this;
  out.phase_ = (phase_ + 2) & 3;
  return out;
}

bool commutes(const PauliString& p, const PauliString& q) {
  check_same_size(p, q);
  auto px = p.x_words(), pz = p.z_words(), qx = q.x_words(), qz = q.z_words();
  Word acc = 0;
  for (std::size_t w = 0; w < px.size(); ++w) acc ^= (px[w] & qz[w]) ^ (pz[w] & qx[w]);
  return (std::popcount(acc) & 1) == 0;
}

PauliString multiply(const PauliString& p, const PauliString& q) {
  check_same_size(p, q);
  // X^a Z^b X^c Z^d = (-1)^{b.c} X^{a+c} Z^{b+d}
  PauliString r(p.n_);
  std::size_t anti = 0;
  for (std::size_t w = 0; w < p.x_.size(); ++w) {
    anti += std::popcount(p.z_[w] & q.x_[w]);
    r.x_[w] = p.x_[w] ^ q.x_[w];
    r.z_[w] = p.z_[w] ^ q.z_[w];
  }
  r.phase_ = static_cast<int>((static_cast<std::size_t>(p.phase_ + q.phase_) + 2 * anti) & 3U);
  return r;
}

PauliString build_single(std::size_t site, Pauli p, std::size_t n) {
  PauliString out(n);
  out.set(site, p);
  return out;
}

PauliString build_zz(std::size_t i, std::size_t j, std::size_t n) {
  require_range(i >= 1 && j >= 1 && i <= n && j <= n, "build_zz: sites must lie in 1..n");
  require(i != j, "build_zz: sites must be distinct");
  PauliString out(n);
  out.set(i, Pauli::Z);
  out.set(j, Pauli::Z);
  return out;
}

PauliString build_zxz(std::size_t i, std::size_t n) {
  require_range(n >= 3 && i >= 2 && i + 1 <= n, "build_zxz: center must lie in 2..n-1");
  PauliString out(n);
  out.set(i - 1, Pauli::Z);
  out.set(i, Pauli::X);
  out.set(i + 1, Pauli::Z);
  return out;
}

PauliString build_string_op(std::size_t a, std::size_t b, std::size_t n) {
  require_range(a >= 2 && a < b && b + 1 <= n, "build_string_op: need 2 <= a < b <= n-1");
  PauliString out(n);
  out.set(a - 1, Pauli::Z);
  out.set(a, Pauli::Y);
  for (std::size_t k = a + 1; k < b; ++k) out.set(k, Pauli::X);
  out.set(b, Pauli::Y);
  out.set(b + 1, Pauli::Z);
  return out;
}

PauliString build_edge_left(std::size_t n) {
  require(n >= 2, "build_edge_left: need n >= 2");
  PauliString out(n);
  out.set(1, Pauli::X);
  out.set(2, Pauli::Z);
  return out;
}

PauliString build_edge_right(std::size_t n) {
  require(n >= 2, "build_edge_right: need n >= 2");
  PauliString out(n);
  out.set(n - 1, Pauli::Z);
  out.set(n, Pauli::X);
  return out;
}

PauliString build_global_x(std::size_t n) {
  require(n >= 1, "build_global_x: need n >= 1");
  PauliString out(n);
  for (std::size_t s = 1; s <= n; ++s) out.set(s, Pauli::X);
  return out;
}

}  // namespace lrmoc
