#include <doctest.h>

#include <array>
#include <complex>

#include "lrmoc/oracle.hpp"
#include "lrmoc/pauli.hpp"
#include "support.hpp"

using namespace lrmoc;
using lrmoc::oracle::dense_pauli_matrix;
using lrmoc::oracle::to_dense_matrix;
using lrmoc::testing::label;
using lrmoc::testing::random_hermitian;
using lrmoc::testing::random_string;

namespace {

using cd = std::complex<double>;

bool same_matrix(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && (a - b).cwiseAbs().maxCoeff() < 1e-12;
}

// Coefficient c in sigma_a sigma_b = c sigma_r, read off the 2x2 matrices.
struct SiteProduct {
  char result;
  int i_power;
};

SiteProduct site_product(char a, char b) {
  const Eigen::MatrixXcd m = dense_pauli_matrix(std::string(1, a)) * dense_pauli_matrix(std::string(1, b));
  for (char r : {'I', 'X', 'Y', 'Z'}) {
    const Eigen::MatrixXcd s = dense_pauli_matrix(std::string(1, r));
    for (int k = 0; k < 4; ++k) {
      const cd c = std::pow(cd(0, 1), k);
      if (same_matrix(m, c * s)) return {r, k};
    }
  }
  FAIL("single-site product is not a Pauli");
  return {'I', 0};
}

// i-power of the coefficient of a string relative to the tensor product of its letters.
int label_power(const PauliString& p) { return (p.phase_exp() - static_cast<int>(p.y_count())) & 3; }

}  // namespace

TEST_CASE("parse and str round trip") {
  for (const char* text : {"+XYZI", "-ZZ", "+iXY", "-iYYY", "+I"}) {
    CHECK(PauliString::parse(text).str() == text);
  }
  auto y = PauliString::parse("Y");
  CHECK(y.x(1));
  CHECK(y.z(1));
  CHECK(y.is_hermitian());
  CHECK(y.sign() == 1);
  CHECK_THROWS_AS(PauliString::parse("XQ"), std::invalid_argument);
}

TEST_CASE("site access is bounds checked") {
  PauliString p(4);
  CHECK_THROWS_AS(p.set(0, Pauli::X), std::out_of_range);
  CHECK_THROWS_AS(p.set(5, Pauli::X), std::out_of_range);
  CHECK_THROWS_AS((void)p.x(5), std::out_of_range);
}

TEST_CASE("commutation of circuit operators") {
  CHECK(commutes(build_zz(1, 2, 3), build_zz(2, 3, 3)));
  CHECK_FALSE(commutes(build_zxz(2, 3), build_zz(2, 3, 3)));
  CHECK(commutes(build_zz(1, 2, 4), build_global_x(4)));
  CHECK_THROWS_AS(commutes(build_zz(1, 2, 4), build_zz(1, 2, 5)), std::invalid_argument);
}

TEST_CASE("single-site products agree with 2x2 matrices") {
  // Z X equals +iY as matrices.
  const auto zx = PauliString::parse("Z") * PauliString::parse("X");
  CHECK(same_matrix(to_dense_matrix(zx), cd(0, 1) * dense_pauli_matrix("Y")));
  CHECK(zx == PauliString::parse("iY"));
  CHECK(zx.str() == "+iY");

  for (char a : {'I', 'X', 'Y', 'Z'}) {
    for (char b : {'I', 'X', 'Y', 'Z'}) {
      const auto prod = PauliString::parse(std::string(1, a)) * PauliString::parse(std::string(1, b));
      CHECK(same_matrix(to_dense_matrix(prod), dense_pauli_matrix(std::string(1, a)) * dense_pauli_matrix(std::string(1, b))));
    }
  }
}

TEST_CASE("multiplication identities") {
  const auto p = PauliString::parse("-ZYXZ");
  CHECK(p * PauliString(4) == p);
  CHECK(PauliString(4) * p == p);
  const auto z13 = build_zz(1, 2, 3) * build_zz(2, 3, 3);
  CHECK(z13 == build_zz(1, 3, 3));
  CHECK(z13.phase_exp() == 0);
  CHECK_THROWS_AS(multiply(build_zz(1, 2, 4), build_zz(1, 2, 3)), std::invalid_argument);
}

TEST_CASE("multiplication matches dense matrices for random strings") {
  Rng rng = make_stream(11, 0, 0);
  for (std::size_t n = 1; n <= 5; ++n) {
    for (int trial = 0; trial < 60; ++trial) {
      const auto p = random_string(n, rng);
      const auto q = random_string(n, rng);
      CHECK(same_matrix(to_dense_matrix(p * q), to_dense_matrix(p) * to_dense_matrix(q)));
      const bool matrices_commute = same_matrix(to_dense_matrix(p) * to_dense_matrix(q), to_dense_matrix(q) * to_dense_matrix(p));
      CHECK(commutes(p, q) == matrices_commute);
    }
  }
}

TEST_CASE("multiplication matches site-wise products across word boundaries") {
  std::array<std::array<SiteProduct, 4>, 4> table{};
  const char names[] = {'I', 'X', 'Z', 'Y'};
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) table[a][b] = site_product(names[a], names[b]);
  }
  auto index_of = [&](char c) { return c == 'I' ? 0 : c == 'X' ? 1 : c == 'Z' ? 2 : 3; };

  Rng rng = make_stream(12, 0, 0);
  for (std::size_t n : {1, 63, 64, 65, 127, 128, 129, 200}) {
    for (int trial = 0; trial < 20; ++trial) {
      const auto p = random_string(n, rng);
      const auto q = random_string(n, rng);
      const auto r = p * q;
      int power = label_power(p) + label_power(q);
      for (std::size_t s = 1; s <= n; ++s) {
        const auto prod = table[static_cast<int>(p.at(s))][static_cast<int>(q.at(s))];
        CHECK(static_cast<int>(r.at(s)) == index_of(prod.result));
        power += prod.i_power;
      }
      CHECK(label_power(r) == (power & 3));
      // Commutation from the phases of P Q and Q P.
      CHECK(commutes(p, q) == ((p * q) == (q * p)));
    }
  }
}

TEST_CASE("builder outputs") {
  const auto zz = build_zz(1, 2, 4);
  for (std::size_t s = 1; s <= 4; ++s) CHECK_FALSE(zz.x(s));
  CHECK(zz.z(1));
  CHECK(zz.z(2));
  CHECK_FALSE(zz.z(3));
  CHECK(zz.sign() == 1);

  const auto degenerate = build_string_op(2, 3, 4);
  CHECK(degenerate.str() == "+ZYYZ");
  CHECK(degenerate.is_hermitian());
  CHECK((degenerate * degenerate) == PauliString(4));

  const auto s25 = build_string_op(2, 5, 6);
  CHECK(s25.str() == "+ZYXXYZ");
  const Eigen::MatrixXcd m = to_dense_matrix(s25);
  CHECK(same_matrix(m * m, Eigen::MatrixXcd::Identity(64, 64)));

  CHECK(build_edge_left(5).str() == "+XZIII");
  CHECK(build_edge_right(5).str() == "+IIIZX");
  CHECK(build_global_x(3).str() == "+XXX");

  CHECK_THROWS_AS(build_zxz(1, 4), std::out_of_range);
  CHECK_THROWS_AS(build_zxz(4, 4), std::out_of_range);
  CHECK_THROWS_AS(build_string_op(1, 3, 5), std::out_of_range);
  CHECK_THROWS_AS(build_string_op(3, 3, 5), std::out_of_range);
  CHECK_THROWS_AS(build_string_op(2, 5, 5), std::out_of_range);
  CHECK_THROWS_AS(build_zz(2, 2, 4), std::invalid_argument);
}

TEST_CASE("builders match independently assembled Kronecker products") {
  for (std::size_t n = 3; n <= 6; ++n) {
    for (std::size_t i = 1; i <= n; ++i) {
      for (std::size_t j = i + 1; j <= n; ++j) {
        CHECK(same_matrix(to_dense_matrix(build_zz(i, j, n)), dense_pauli_matrix(label(n, {{i, 'Z'}, {j, 'Z'}}))));
      }
    }
    for (std::size_t i = 2; i < n; ++i) {
      CHECK(same_matrix(to_dense_matrix(build_zxz(i, n)),
                        dense_pauli_matrix(label(n, {{i - 1, 'Z'}, {i, 'X'}, {i + 1, 'Z'}}))));
    }
    for (std::size_t a = 2; a < n; ++a) {
      for (std::size_t b = a + 1; b < n; ++b) {
        std::string l = label(n, {{a - 1, 'Z'}, {a, 'Y'}, {b, 'Y'}, {b + 1, 'Z'}});
        for (std::size_t k = a + 1; k < b; ++k) l[k - 1] = 'X';
        CHECK(same_matrix(to_dense_matrix(build_string_op(a, b, n)), dense_pauli_matrix(l)));
      }
    }
    CHECK(same_matrix(to_dense_matrix(build_edge_left(n)), dense_pauli_matrix(label(n, {{1, 'X'}, {2, 'Z'}}))));
    CHECK(same_matrix(to_dense_matrix(build_edge_right(n)), dense_pauli_matrix(label(n, {{n - 1, 'Z'}, {n, 'X'}}))));
    CHECK(same_matrix(to_dense_matrix(build_global_x(n)), dense_pauli_matrix(std::string(n, 'X'))));
  }
}

TEST_CASE("builder outputs square to the identity") {
  for (std::size_t n : {4, 9, 64, 70}) {
    std::vector<PauliString> ops{build_edge_left(n), build_edge_right(n), build_global_x(n)};
    for (std::size_t i = 2; i < n; ++i) ops.push_back(build_zxz(i, n));
    for (std::size_t j = 2; j <= n; ++j) ops.push_back(build_zz(1, j, n));
    for (std::size_t b = 3; b < n; ++b) ops.push_back(build_string_op(2, b, n));
    for (const auto& p : ops) {
      CHECK(p.is_hermitian());
      const auto sq = p * p;
      CHECK(sq.is_identity());
      CHECK(sq.phase_exp() == 0);
    }
  }
}

TEST_CASE("symmetry algebra of measured operators") {
  for (std::size_t n : {4, 8, 65}) {
    const auto g = build_global_x(n);
    for (std::size_t i = 2; i < n; ++i) CHECK(commutes(build_zxz(i, n), g));
    for (std::size_t i = 1; i <= n; ++i) {
      for (std::size_t j = i + 1; j <= n; ++j) CHECK(commutes(build_zz(i, j, n), g));
    }
    CHECK_FALSE(commutes(build_edge_left(n), g));
    CHECK_FALSE(commutes(build_edge_right(n), g));
  }
}

TEST_CASE("hermiticity and sign") {
  Rng rng = make_stream(13, 0, 0);
  for (int trial = 0; trial < 200; ++trial) {
    const auto p = random_hermitian(1 + uniform_below(rng, 100), rng);
    CHECK(p.is_hermitian());
    CHECK((-p).sign() == -p.sign());
    CHECK((p * p) == PauliString(p.size()));
  }
  CHECK_FALSE(PauliString::parse("iX").is_hermitian());
  CHECK_THROWS_AS((void)PauliString::parse("iX").sign(), std::domain_error);
}

TEST_CASE("support and weight") {
  const auto p = PauliString::parse("IXIYZI");
  CHECK(p.weight() == 3);
  CHECK(p.y_count() == 1);
  CHECK(p.support() == std::vector<std::size_t>{2, 4, 5});
  CHECK(PauliString(3).is_identity());
}
