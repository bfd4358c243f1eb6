#include "gso/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gso/errors.hpp"

namespace gso {

double dot(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw ConfigError("dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(const Vector& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double norm1(const Vector& v) {
  double s = 0.0;
  for (double x : v) s += std::abs(x);
  return s;
}

double norm_inf(const Vector& v) {
  double s = 0.0;
  for (double x : v) s = std::max(s, std::abs(x));
  return s;
}

double norm_p(const Vector& v, double p) {
  if (p <= 0.0) throw ConfigError("norm_p: p must be positive");
  if (p == 1.0) return norm1(v);
  if (p == 2.0) return norm2(v);
  double s = 0.0;
  for (double x : v) s += std::pow(std::abs(x), p);
  return std::pow(s, 1.0 / p);
}

Vector matvec(const Matrix& a, const Vector& x) {
  if (a.cols() != x.size())
    throw ConfigError("matvec: " + std::to_string(a.cols()) + " columns vs vector length " +
                      std::to_string(x.size()));
  Vector y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

Vector transpose_matvec(const Matrix& a, const Vector& y) {
  if (a.rows() != y.size())
    throw ConfigError("transpose_matvec: " + std::to_string(a.rows()) + " rows vs vector length " +
                      std::to_string(y.size()));
  Vector x(a.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double yi = y[i];
    for (std::size_t j = 0; j < a.cols(); ++j) x[j] += a(i, j) * yi;
  }
  return x;
}

Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

namespace {

void normalize(Vector& v) {
  const double n = norm2(v);
  if (n > 0.0)
    for (double& x : v) x /= n;
}

// One power-iteration run from a given start; returns the singular value
// estimate or a negative value if the start direction collapses.
double power_iterate(const Matrix& a, Vector w, double tol, std::size_t max_iter) {
  normalize(w);
  double sigma = 0.0;
  for (std::size_t it = 0; it < max_iter; ++it) {
    const Vector u = matvec(a, w);
    const double s = norm2(u);  // = sqrt(wᵀAᵀAw) for unit w
    if (s == 0.0) return -1.0;
    Vector g = transpose_matvec(a, u);
    const double gn = norm2(g);
    if (gn == 0.0) return -1.0;
    for (double& x : g) x /= gn;
    w = std::move(g);
    if (it > 0 && std::abs(s - sigma) <= tol * std::max(s, 1e-300)) return s;
    sigma = s;
  }
  throw NumericalError("spectral_norm: power iteration did not converge");
}

}  // namespace

double spectral_norm(const Matrix& a, double tol, std::size_t max_iter) {
  if (a.rows() == 0 || a.cols() == 0) throw ConfigError("spectral_norm: empty matrix");
  if (tol <= 0.0) throw ConfigError("spectral_norm: tol must be positive");
  bool nonzero = false;
  for (double x : a.data())
    if (x != 0.0) nonzero = true;
  if (!nonzero) throw ConfigError("spectral_norm: zero matrix");

  Vector ones(a.cols(), 1.0);
  double s = power_iterate(a, ones, tol, max_iter);
  for (std::size_t j = 0; j < a.cols() && s < 0.0; ++j) {
    Vector e(a.cols(), 0.0);
    e[j] = 1.0;
    s = power_iterate(a, e, tol, max_iter);
  }
  if (s < 0.0) throw NumericalError("spectral_norm: all start vectors collapsed");
  return s;
}

Matrix invert_small(const Matrix& m) {
  if (m.rows() != m.cols()) throw ConfigError("invert_small: matrix must be square");
  const std::size_t n = m.rows();
  Matrix work = m;
  Matrix inv = Matrix::identity(n);
  double max_pivot = 0.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot_row = col;
    for (std::size_t i = col + 1; i < n; ++i)
      if (std::abs(work(i, col)) > std::abs(work(pivot_row, col))) pivot_row = i;
    const double pivot = work(pivot_row, col);
    max_pivot = std::max(max_pivot, std::abs(pivot));
    if (std::abs(pivot) <= 1e-10 * max_pivot || pivot == 0.0)
      throw NumericalError("invert_small: rank-deficient matrix (pivot " +
                           std::to_string(pivot) + ")");
    if (pivot_row != col) {
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(work(pivot_row, j), work(col, j));
        std::swap(inv(pivot_row, j), inv(col, j));
      }
    }
    const double inv_pivot = 1.0 / work(col, col);
    for (std::size_t j = 0; j < n; ++j) {
      work(col, j) *= inv_pivot;
      inv(col, j) *= inv_pivot;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (i == col) continue;
      const double factor = work(i, col);
      if (factor == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) {
        work(i, j) -= factor * work(col, j);
        inv(i, j) -= factor * inv(col, j);
      }
    }
  }
  return inv;
}

double gram_inverse_norm(const Matrix& b) {
  if (b.rows() == 0 || b.cols() == 0) throw ConfigError("gram_inverse_norm: empty matrix");
  const std::size_t c = b.cols();
  Matrix gram(c, c);
  for (std::size_t i = 0; i < c; ++i) {
    for (std::size_t j = i; j < c; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < b.rows(); ++k) s += b(k, i) * b(k, j);
      gram(i, j) = s;
      gram(j, i) = s;
    }
  }
  const Matrix inv = invert_small(gram);
  return spectral_norm(inv, 1e-12);
}

Matrix orthonormalize_rows(const Matrix& a) {
  if (a.rows() == 0) throw ConfigError("orthonormalize_rows: empty matrix");
  if (a.rows() > a.cols())
    throw ConfigError("orthonormalize_rows: more rows than columns");
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  Matrix q = a;
  for (std::size_t i = 0; i < m; ++i) {
    double orig = 0.0;
    for (std::size_t j = 0; j < n; ++j) orig += q(i, j) * q(i, j);
    orig = std::sqrt(orig);
    // Two projection passes keep QQᵀ within 1e-12 of the identity.
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t k = 0; k < i; ++k) {
        double proj = 0.0;
        for (std::size_t j = 0; j < n; ++j) proj += q(i, j) * q(k, j);
        for (std::size_t j = 0; j < n; ++j) q(i, j) -= proj * q(k, j);
      }
    }
    double rem = 0.0;
    for (std::size_t j = 0; j < n; ++j) rem += q(i, j) * q(i, j);
    rem = std::sqrt(rem);
    if (orig == 0.0 || rem <= 1e-10 * orig)
      throw NumericalError("orthonormalize_rows: numerically dependent rows");
    for (std::size_t j = 0; j < n; ++j) q(i, j) /= rem;
  }
  return q;
}

}  // namespace gso
