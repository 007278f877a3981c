#include "lrmoc/stabilizer.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>
#include <string>

namespace lrmoc {

namespace {

constexpr std::size_t kNone = static_cast<std::size_t>(-1);

inline bool parity(Word w) noexcept { return (std::popcount(w) & 1) != 0; }

inline bool get_bit(const Word* bits, std::size_t q) noexcept { return (bits[q / kWordBits] >> (q % kWordBits)) & 1U; }

inline void set_bit(Word* bits, std::size_t q) noexcept { bits[q / kWordBits] |= Word{1} << (q % kWordBits); }

}  // namespace

StabilizerState::StabilizerState(std::size_t n, std::size_t k)
    : n_(n), words_(words_for(n)), k_(k), rows_(2 * n * 2 * words_for(n), 0), phase_(n, 0),
      scratch_(2 * words_for(n), 0), anti_(2 * n, 0) {
  if (n == 0) throw std::invalid_argument("stabilizer state needs at least one qubit");
  // Row i = X_i and row n+i = Z_i form the initial symplectic pairs.
  for (std::size_t q = 0; q < n; ++q) {
    set_bit(row(q), q);
    set_bit(row(n + q) + words_, q);
  }
}

StabilizerState StabilizerState::plus_state(std::size_t n) { return StabilizerState(n, n); }

StabilizerState StabilizerState::maximally_mixed(std::size_t n) { return StabilizerState(n, 0); }

PauliString StabilizerState::generator(std::size_t i) const {
  if (i >= k_) throw std::out_of_range("generator index " + std::to_string(i) + " >= rank " + std::to_string(k_));
  PauliString out(n_);
  const Word* r = row(i);
  for (std::size_t q = 0; q < n_; ++q) {
    bool x = get_bit(r, q);
    bool z = get_bit(r + words_, q);
    if (x || z) out.set(q + 1, static_cast<Pauli>(static_cast<unsigned>(x) | (static_cast<unsigned>(z) << 1U)));
  }
  // set() normalised Y factors to the standard Pauli; restore the raw phase.
  out.set_phase_exp(phase_[i]);
  return out;
}

std::vector<PauliString> StabilizerState::generators() const {
  std::vector<PauliString> out;
  out.reserve(k_);
  for (std::size_t i = 0; i < k_; ++i) out.push_back(generator(i));
  return out;
}

bool StabilizerState::is_consistent() const {
  if (k_ > n_) return false;
  const std::size_t total = 2 * n_;
  for (std::size_t a = 0; a < total; ++a) {
    const Word* ra = row(a);
    for (std::size_t b = a + 1; b < total; ++b) {
      const Word* rb = row(b);
      Word acc = 0;
      for (std::size_t w = 0; w < words_; ++w) acc ^= (ra[w] & rb[words_ + w]) ^ (ra[words_ + w] & rb[w]);
      bool anti = parity(acc);
      if (anti != (b == a + n_)) return false;
    }
  }
  for (std::size_t i = 0; i < k_; ++i) {
    std::size_t y = 0;
    for (std::size_t w = 0; w < words_; ++w) y += std::popcount(row(i)[w] & row(i)[words_ + w]);
    if (((phase_[i] + y) & 1U) != 0) return false;
  }
  return true;
}

std::uint64_t StabilizerState::fingerprint() const noexcept {
  std::uint64_t h = combine_keys(n_, k_);
  for (Word w : rows_) h = combine_keys(h, w);
  for (std::size_t i = 0; i < k_; ++i) h = combine_keys(h, phase_[i]);
  return h;
}

bool operator==(const StabilizerState& a, const StabilizerState& b) {
  return a.n_ == b.n_ && a.k_ == b.k_ && a.rows_ == b.rows_ &&
         std::equal(a.phase_.begin(), a.phase_.begin() + static_cast<std::ptrdiff_t>(a.k_), b.phase_.begin());
}

bool StabilizerState::anticommutes_with_row(std::size_t r, const PauliString& p) const noexcept {
  const Word* rx = row(r);
  const Word* rz = rx + words_;
  const Word* px = p.x_words().data();
  const Word* pz = p.z_words().data();
  Word acc = 0;
  for (std::size_t w = 0; w < words_; ++w) acc ^= (rx[w] & pz[w]) ^ (rz[w] & px[w]);
  return parity(acc);
}

void StabilizerState::multiply_row_into(std::size_t target, std::size_t source) noexcept {
  Word* t = row(target);
  const Word* s = row(source);
  if (target < k_) {
    // Stabilizer rows are only ever multiplied by other stabilizer rows.
    std::size_t anti = 0;
    for (std::size_t w = 0; w < words_; ++w) anti += std::popcount(t[words_ + w] & s[w]);
    phase_[target] = static_cast<std::uint8_t>((phase_[target] + phase_[source] + 2 * anti) & 3U);
  }
  for (std::size_t w = 0; w < 2 * words_; ++w) t[w] ^= s[w];
}

void StabilizerState::swap_rows(std::size_t a, std::size_t b) noexcept {
  std::swap_ranges(row(a), row(a) + 2 * words_, row(b));
  std::swap(anti_[a], anti_[b]);
}

void StabilizerState::set_row(std::size_t r, const PauliString& p) noexcept {
  std::copy(p.x_words().begin(), p.x_words().end(), row(r));
  std::copy(p.z_words().begin(), p.z_words().end(), row(r) + words_);
}

int StabilizerState::group_sign(const PauliString& p, Word* scratch) const noexcept {
  std::fill(scratch, scratch + 2 * words_, 0);
  unsigned phase = 0;
  for (std::size_t i = 0; i < k_; ++i) {
    if (!anticommutes_with_row(n_ + i, p)) continue;
    const Word* s = row(i);
    std::size_t anti = 0;
    for (std::size_t w = 0; w < words_; ++w) anti += std::popcount(scratch[words_ + w] & s[w]);
    phase += phase_[i] + 2 * static_cast<unsigned>(anti);
    for (std::size_t w = 0; w < 2 * words_; ++w) scratch[w] ^= s[w];
  }
  int sign = ((phase - static_cast<unsigned>(p.phase_exp())) & 3U) == 0 ? 1 : -1;
  std::fill(scratch, scratch + 2 * words_, 0);
  return sign;
}

void StabilizerState::check_operator(const PauliString& p) const {
  if (p.size() != n_) {
    throw std::invalid_argument("operator acts on " + std::to_string(p.size()) + " qubits, state has " +
                                std::to_string(n_));
  }
  if (!p.is_hermitian()) throw std::invalid_argument("measured operator is not Hermitian: " + p.str());
}

template <class OutcomeSource>
Measurement StabilizerState::measure_impl(const PauliString& p, OutcomeSource&& next_outcome) {
  check_operator(p);
  if (p.is_identity()) throw std::invalid_argument("cannot measure the identity");

  const std::size_t total = 2 * n_;
  std::size_t pivot = kNone;
  for (std::size_t r = 0; r < total; ++r) {
    anti_[r] = anticommutes_with_row(r, p);
    if (pivot == kNone && r < k_ && anti_[r]) pivot = r;
  }

  if (pivot != kNone) {
    int outcome = next_outcome();
    for (std::size_t r = 0; r < total; ++r) {
      if (anti_[r] && r != pivot && r != n_ + pivot) multiply_row_into(r, pivot);
    }
    std::copy(row(pivot), row(pivot) + 2 * words_, row(n_ + pivot));
    set_row(pivot, p);
    phase_[pivot] = static_cast<std::uint8_t>((p.phase_exp() + (outcome < 0 ? 2 : 0)) & 3);
    return {outcome, MeasureKind::anticommuting};
  }

  std::size_t logical = kNone;
  for (std::size_t j = k_; j < n_; ++j) {
    if (anti_[j] || anti_[n_ + j]) {
      logical = j;
      break;
    }
  }

  if (logical != kNone) {
    int outcome = next_outcome();
    if (logical != k_) {
      swap_rows(logical, k_);
      swap_rows(n_ + logical, n_ + k_);
    }
    // The logical operator anticommuting with p becomes the new destabilizer.
    if (!anti_[n_ + k_]) swap_rows(k_, n_ + k_);
    for (std::size_t r = 0; r < total; ++r) {
      if (anti_[r] && r != k_ && r != n_ + k_) multiply_row_into(r, n_ + k_);
    }
    set_row(k_, p);
    phase_[k_] = static_cast<std::uint8_t>((p.phase_exp() + (outcome < 0 ? 2 : 0)) & 3);
    ++k_;
    return {outcome, MeasureKind::purifying};
  }

  return {group_sign(p, scratch_.data()), MeasureKind::deterministic};
}

Measurement measure(StabilizerState& state, const PauliString& p, Rng& rng) {
  return state.measure_impl(p, [&rng] { return random_bit(rng) ? -1 : 1; });
}

Measurement measure_forced(StabilizerState& state, const PauliString& p, int outcome) {
  if (outcome != 1 && outcome != -1) throw std::invalid_argument("forced outcome must be +1 or -1");
  return state.measure_impl(p, [outcome] { return outcome; });
}

int expectation(const StabilizerState& state, const PauliString& p) {
  state.check_operator(p);
  const std::size_t n = state.n_;
  for (std::size_t r = 0; r < n; ++r) {
    if (state.anticommutes_with_row(r, p)) return 0;
  }
  for (std::size_t j = state.k_; j < n; ++j) {
    if (state.anticommutes_with_row(n + j, p)) return 0;
  }
  std::vector<Word> scratch(2 * state.words_);
  return state.group_sign(p, scratch.data());
}

std::size_t gf2_rank(std::span<Word> bits, std::size_t rows, std::size_t words) {
  if (bits.size() < rows * words) throw std::invalid_argument("gf2_rank: buffer too small");
  std::size_t rank = 0;
  for (std::size_t w = 0; w < words && rank < rows; ++w) {
    for (std::size_t b = 0; b < kWordBits && rank < rows; ++b) {
      const Word mask = Word{1} << b;
      std::size_t pivot = rank;
      while (pivot < rows && !(bits[pivot * words + w] & mask)) ++pivot;
      if (pivot == rows) continue;
      Word* prow = bits.data() + pivot * words;
      if (pivot != rank) std::swap_ranges(prow + w, prow + words, bits.data() + rank * words + w);
      prow = bits.data() + rank * words;
      for (std::size_t r = rank + 1; r < rows; ++r) {
        Word* other = bits.data() + r * words;
        if (other[w] & mask) {
          for (std::size_t v = w; v < words; ++v) other[v] ^= prow[v];
        }
      }
      ++rank;
    }
  }
  return rank;
}

namespace {

// |A| - (k - rank of the stabilizer rows restricted to the complement of A).
template <class RowAccess>
std::size_t subsystem_entropy(std::size_t k, std::size_t region_size, std::span<const std::size_t> complement,
                              RowAccess&& row_bits, std::size_t words) {
  if (k == 0) return region_size;
  if (complement.empty()) return region_size - k;
  const std::size_t cols = 2 * complement.size();
  const std::size_t cw = words_for(cols);
  std::vector<Word> mat(k * cw, 0);
  for (std::size_t i = 0; i < k; ++i) {
    const Word* r = row_bits(i);
    Word* out = mat.data() + i * cw;
    for (std::size_t c = 0; c < complement.size(); ++c) {
      std::size_t q = complement[c];
      if (get_bit(r, q)) set_bit(out, 2 * c);
      if (get_bit(r + words, q)) set_bit(out, 2 * c + 1);
    }
  }
  std::size_t rank = gf2_rank(mat, k, cw);
  return region_size - (k - rank);
}

}  // namespace

std::size_t entropy_region(const StabilizerState& state, std::span<const std::size_t> region) {
  const std::size_t n = state.n_;
  std::vector<std::uint8_t> in_region(n, 0);
  for (std::size_t site : region) {
    if (site < 1 || site > n) throw std::out_of_range("region site " + std::to_string(site) + " outside 1.." + std::to_string(n));
    if (in_region[site - 1]) throw std::invalid_argument("region lists site " + std::to_string(site) + " twice");
    in_region[site - 1] = 1;
  }
  std::vector<std::size_t> complement;
  complement.reserve(n - region.size());
  for (std::size_t q = 0; q < n; ++q) {
    if (!in_region[q]) complement.push_back(q);
  }
  return subsystem_entropy(state.k_, region.size(), complement, [&](std::size_t i) { return state.row(i); },
                           state.words_);
}

std::size_t entropy_interval(const StabilizerState& state, std::size_t first, std::size_t last) {
  const std::size_t n = state.n_;
  if (first < 1 || last > n || first > last) {
    throw std::out_of_range("interval " + std::to_string(first) + ".." + std::to_string(last) + " invalid for n=" +
                            std::to_string(n));
  }
  std::vector<std::size_t> complement;
  complement.reserve(n - (last - first + 1));
  for (std::size_t q = 0; q + 1 < first; ++q) complement.push_back(q);
  for (std::size_t q = last; q < n; ++q) complement.push_back(q);
  return subsystem_entropy(state.k_, last - first + 1, complement, [&](std::size_t i) { return state.row(i); },
                           state.words_);
}

}  // namespace lrmoc
