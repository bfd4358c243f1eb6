#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gso/errors.hpp"
#include "gso/linalg.hpp"
#include "gso/rng.hpp"
#include "oracle.hpp"

using namespace gso;

namespace {

Matrix example_matrix() {
  Matrix a(2, 3);
  a(0, 0) = 2; a(0, 1) = 3; a(0, 2) = 1;
  a(1, 0) = 2; a(1, 1) = 1; a(1, 2) = 3;
  return a;
}

Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  Matrix m(rows, cols);
  RandomStream stream(seed);
  for (double& t : m.data()) t = stream.normal();
  return m;
}

}  // namespace

TEST_CASE("matvec basics") {
  const Vector x{1, 2, 3};
  CHECK(matvec(Matrix::identity(3), x) == x);

  const Vector y = matvec(example_matrix(), Vector{1, 0, 0});
  CHECK(y == Vector{2, 2});

  const Matrix zero(3, 3);
  CHECK(matvec(zero, x) == Vector{0, 0, 0});

  CHECK_THROWS_AS(matvec(example_matrix(), Vector{1, 2}), ConfigError);
}

TEST_CASE("transpose_matvec basics") {
  const Vector y{0.5, -2, 7};
  CHECK(transpose_matvec(Matrix::identity(3), y) == y);

  CHECK(transpose_matvec(example_matrix(), Vector{1, 1}) == Vector{4, 4, 4});
  CHECK(transpose_matvec(example_matrix(), Vector{0, 0}) == Vector{0, 0, 0});
  CHECK_THROWS_AS(transpose_matvec(example_matrix(), Vector{1, 2, 3}), ConfigError);
}

TEST_CASE("transpose_matvec agrees with matvec on the transposed matrix") {
  const Matrix a = random_matrix(7, 13, 11);
  const Matrix at = transpose(a);
  RandomStream stream(12);
  Vector y(7);
  for (double& t : y) t = stream.normal();
  const Vector lhs = transpose_matvec(a, y);
  const Vector rhs = matvec(at, y);
  for (std::size_t j = 0; j < lhs.size(); ++j)
    CHECK(std::abs(lhs[j] - rhs[j]) <= 1e-14);
}

TEST_CASE("spectral norm") {
  CHECK(spectral_norm(Matrix::identity(4)) == doctest::Approx(1.0).epsilon(1e-9));

  const auto [top, bottom] = testing::eig2x2(14, 10, 14);  // A Aᵀ of the example matrix
  CHECK(bottom == doctest::Approx(4.0));
  CHECK(spectral_norm(example_matrix(), 1e-12) ==
        doctest::Approx(std::sqrt(top)).epsilon(1e-9));

  Matrix diag(2, 2);
  diag(0, 0) = 5;
  diag(1, 1) = 1;
  CHECK(spectral_norm(diag) == doctest::Approx(5.0).epsilon(1e-9));

  CHECK_THROWS_AS(spectral_norm(Matrix(2, 2)), ConfigError);   // zero matrix
  CHECK_THROWS_AS(spectral_norm(diag, -1.0), ConfigError);

  Matrix hard(1, 2);  // annihilates the all-ones start vector
  hard(0, 0) = 1;
  hard(0, 1) = -1;
  CHECK(spectral_norm(hard) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
}

TEST_CASE("spectral norm dominates Rayleigh quotients") {
  const Matrix a = random_matrix(9, 17, 21);
  const double sigma = spectral_norm(a, 1e-11);
  RandomStream stream(22);
  for (int rep = 0; rep < 100; ++rep) {
    Vector x(17);
    for (double& t : x) t = stream.normal();
    const double ratio = norm2(matvec(a, x)) / norm2(x);
    CHECK(sigma * sigma * (1.0 + 1e-8) >= ratio * ratio);
  }
}

TEST_CASE("gram inverse norm") {
  Matrix orth(4, 2);  // orthonormal columns
  orth(0, 0) = 1;
  orth(2, 1) = 1;
  CHECK(gram_inverse_norm(orth) == doctest::Approx(1.0).epsilon(1e-10));

  Matrix column(2, 1);
  column(0, 0) = 2;
  column(1, 0) = 2;
  CHECK(gram_inverse_norm(column) == doctest::Approx(0.125).epsilon(1e-12));

  Matrix dup(3, 2);  // duplicated column
  for (std::size_t i = 0; i < 3; ++i) {
    dup(i, 0) = static_cast<double>(i) + 1.0;
    dup(i, 1) = dup(i, 0);
  }
  CHECK_THROWS_AS(gram_inverse_norm(dup), NumericalError);
}

TEST_CASE("orthonormalize rows") {
  Matrix diag(2, 2);
  diag(0, 0) = 3;
  diag(1, 1) = 4;
  const Matrix q = orthonormalize_rows(diag);
  for (std::size_t i = 0; i < 2; ++i) {
    Vector row{q(i, 0), q(i, 1)};
    CHECK(norm2(row) == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK(std::abs(q(0, 0) * q(1, 0) + q(0, 1) * q(1, 1)) <= 1e-12);

  // already orthonormal input passes through up to sign
  const Matrix q2 = orthonormalize_rows(q);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      CHECK(std::abs(std::abs(q2(i, j)) - std::abs(q(i, j))) <= 1e-12);

  Matrix dep(2, 3);
  for (std::size_t j = 0; j < 3; ++j) {
    dep(0, j) = static_cast<double>(j) + 1.0;
    dep(1, j) = dep(0, j);
  }
  CHECK_THROWS_AS(orthonormalize_rows(dep), NumericalError);
  CHECK_THROWS_AS(orthonormalize_rows(Matrix(3, 2, 1.0)), ConfigError);  // rows > cols
}

TEST_CASE("orthonormalized rows satisfy Q Qᵀ = I for random shapes") {
  RandomStream shapes(31);
  for (int rep = 0; rep < 12; ++rep) {
    const std::size_t n = 2 + shapes.below(63);
    const std::size_t m = 1 + shapes.below(n);
    const Matrix q = orthonormalize_rows(random_matrix(m, n, 100 + rep));
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t k = 0; k < m; ++k) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += q(i, j) * q(k, j);
        CHECK(std::abs(s - (i == k ? 1.0 : 0.0)) <= 1e-10);
      }
    }
  }
}
