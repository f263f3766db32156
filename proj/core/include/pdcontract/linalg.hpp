#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <vector>

#include "pdcontract/errors.hpp"

namespace pdc {

using Vector = std::vector<double>;

/// Dense real matrix, row-major. Sizes here are desk scale (n up to a few
/// hundred), so everything is stored densely and algorithms are direct.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);
  static Matrix diagonal(const Vector& d);
  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }
  bool square() const { return rows_ == cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);
Vector operator*(const Matrix& a, const Vector& v);

Matrix transpose(const Matrix& a);
Matrix kron(const Matrix& a, const Matrix& b);
double frobenius_norm(const Matrix& a);
double max_abs(const Matrix& a);

/// max |M_ij - M_ji| <= tol * (1 + max|M|)
bool symmetric_within(const Matrix& m, double tol = 1e-12);
void require_finite(const Matrix& m, const char* what);
void require_finite(const Vector& v, const char* what);

// Small vector helpers shared across modules.
double dot(const Vector& a, const Vector& b);
double norm2(const Vector& v);
double norm_inf(const Vector& v);
Vector operator+(const Vector& a, const Vector& b);
Vector operator-(const Vector& a, const Vector& b);
Vector operator*(double s, const Vector& a);

/// Eigenvalues ascending; eigenvectors are the matching orthonormal columns.
struct SpectralData {
  Vector eigenvalues;
  Matrix eigenvectors;
};

/// Symmetric eigendecomposition by cyclic Jacobi rotations (deterministic
/// row-cyclic sweep order, off-diagonal tolerance 1e-12 relative). Columns
/// are sign-normalized so the first nonzero component is positive, which
/// keeps downstream spectral factors reproducible across runs.
SpectralData sym_eig(const Matrix& m);

/// Singular values, ascending, computed as square roots of the eigenvalues
/// of the smaller Gram matrix. Returns min(rows, cols) values.
Vector singular_values(const Matrix& a);

/// mu_2(M) = lambda_max((M + M^T)/2), the matrix measure induced by the
/// Euclidean norm.
double matrix_measure_2(const Matrix& m);

/// mu_{2,P^{1/2}}(M) = mu_2(S M S^-1) with S the SPD square root of P.
double weighted_matrix_measure(const Matrix& m, const Matrix& p);

/// SPD square root via eigendecomposition; result is symmetric.
Matrix sqrt_spd(const Matrix& p);

/// ||v||_{2,P^{1/2}} = sqrt(v^T P v).
double weighted_norm(const Vector& v, const Matrix& p);

/// Full complex spectrum of a general real square matrix: Householder
/// reduction to Hessenberg form followed by shifted QR iteration
/// (deflation tolerance 1e-10, at most 100*n steps; running out is an
/// explicit ConvergenceError). Sorted by (real, imag) ascending.
std::vector<std::complex<double>> general_eigenvalues(const Matrix& m);

/// True iff every eigenvalue has real part < -1e-10.
bool is_hurwitz(const Matrix& m);

/// Dense LU solve with partial pivoting and one refinement pass. Rejects
/// systems whose condition estimate (sigma_max/sigma_min) exceeds 1e12.
Vector solve_linear(const Matrix& m, const Vector& rhs);

/// Prefactored weighted metric: caches P^{1/2} and P^{-1/2} for repeated
/// measure/norm evaluations against the same P.
class WeightedMetric {
 public:
  explicit WeightedMetric(Matrix p);

  const Matrix& weight() const { return p_; }
  const Matrix& sqrt() const { return sqrt_; }
  double lambda_min() const { return lambda_min_; }
  double lambda_max() const { return lambda_max_; }

  double measure(const Matrix& m) const;
  double norm(const Vector& v) const;

 private:
  Matrix p_;
  Matrix sqrt_;
  Matrix sqrt_inv_;
  double lambda_min_ = 0.0;
  double lambda_max_ = 0.0;
};

}  // namespace pdc
