#pragma once

#include <cstddef>
#include <vector>

namespace gso {

using Vector = std::vector<double>;

/// Dense row-major matrix. The only storage type used by the toolkit;
/// problems are desk scale, so there is no sparse variant and no BLAS.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double value = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, value) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

double dot(const Vector& a, const Vector& b);
double norm2(const Vector& v);
double norm1(const Vector& v);
double norm_inf(const Vector& v);
// Plain l_p norm, p > 0. Specialized code paths for p = 1 and p = 2.
double norm_p(const Vector& v, double p);

Vector matvec(const Matrix& a, const Vector& x);
Vector transpose_matvec(const Matrix& a, const Vector& y);
Matrix transpose(const Matrix& a);

/// Largest singular value via power iteration on AᵀA.
/// Start vector is the normalized all-ones vector so runs are deterministic;
/// if that direction is annihilated the iteration falls back to basis vectors.
double spectral_norm(const Matrix& a, double tol = 1e-10, std::size_t max_iter = 20000);

/// In-place Gauss-Jordan inverse of a small square matrix with partial
/// pivoting. A pivot below 1e-10 times the largest pivot seen is treated as
/// rank deficiency.
Matrix invert_small(const Matrix& m);

/// Spectral norm of (BᵀB)⁻¹ for a full-column-rank B (columns <= 8 or so).
double gram_inverse_norm(const Matrix& b);

/// Returns a matrix with the same row span and orthonormal rows
/// (two passes of modified Gram-Schmidt). Requires rows <= cols and
/// linearly independent rows.
Matrix orthonormalize_rows(const Matrix& a);

}  // namespace gso
