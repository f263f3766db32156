#include "pdcontract/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace pdc {

namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(std::string(op) + ": shape mismatch");
  }
}

void require_square(const Matrix& m, const char* op) {
  if (!m.square() || m.rows() == 0) {
    throw DimensionError(std::string(op) + ": square matrix required");
  }
}

}  // namespace

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(const Vector& d) {
  Matrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  Matrix m(r, c);
  std::size_t i = 0;
  for (const auto& row : rows) {
    if (row.size() != c) throw DimensionError("from_rows: ragged rows");
    std::size_t j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "add");
  Matrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < out.data().size(); ++i) out.data()[i] = a.data()[i] + b.data()[i];
  return out;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "sub");
  Matrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < out.data().size(); ++i) out.data()[i] = a.data()[i] - b.data()[i];
  return out;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw DimensionError("matmul: inner dimensions differ");
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  }
  return out;
}

Matrix operator*(double s, const Matrix& a) {
  Matrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < out.data().size(); ++i) out.data()[i] = s * a.data()[i];
  return out;
}

Vector operator*(const Matrix& a, const Vector& v) {
  if (a.cols() != v.size()) throw DimensionError("matvec: dimension mismatch");
  Vector out(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * v[j];
    out[i] = s;
  }
  return out;
}

Matrix transpose(const Matrix& a) {
  Matrix out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  return out;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const double aij = a(i, j);
      if (aij == 0.0) continue;
      for (std::size_t p = 0; p < b.rows(); ++p)
        for (std::size_t q = 0; q < b.cols(); ++q)
          out(i * b.rows() + p, j * b.cols() + q) = aij * b(p, q);
    }
  return out;
}

double frobenius_norm(const Matrix& a) {
  double s = 0.0;
  for (double v : a.data()) s += v * v;
  return std::sqrt(s);
}

double max_abs(const Matrix& a) {
  double s = 0.0;
  for (double v : a.data()) s = std::max(s, std::abs(v));
  return s;
}

bool symmetric_within(const Matrix& m, double tol) {
  if (!m.square()) return false;
  double worst = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i + 1; j < m.cols(); ++j)
      worst = std::max(worst, std::abs(m(i, j) - m(j, i)));
  return worst <= tol * (1.0 + max_abs(m));
}

void require_finite(const Matrix& m, const char* what) {
  for (double v : m.data())
    if (!std::isfinite(v)) throw Error(std::string(what) + ": non-finite entry");
}

void require_finite(const Vector& v, const char* what) {
  for (double x : v)
    if (!std::isfinite(x)) throw Error(std::string(what) + ": non-finite entry");
}

double dot(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw DimensionError("dot: dimension mismatch");
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double norm2(const Vector& v) { return std::sqrt(dot(v, v)); }

double norm_inf(const Vector& v) {
  double s = 0.0;
  for (double x : v) s = std::max(s, std::abs(x));
  return s;
}

Vector operator+(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw DimensionError("vector add: dimension mismatch");
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

Vector operator-(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw DimensionError("vector sub: dimension mismatch");
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

Vector operator*(double s, const Vector& a) {
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = s * a[i];
  return out;
}

SpectralData sym_eig(const Matrix& m) {
  require_square(m, "sym_eig");
  require_finite(m, "sym_eig");
  if (!symmetric_within(m)) throw SymmetryError("sym_eig: matrix is not symmetric");

  const std::size_t n = m.rows();
  Matrix a = m;
  // Symmetrize exactly so the sweep works on a clean input.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double avg = 0.5 * (a(i, j) + a(j, i));
      a(i, j) = avg;
      a(j, i) = avg;
    }
  Matrix u = Matrix::identity(n);

  const double stop = 1e-12 * (1.0 + frobenius_norm(m));
  const std::size_t max_sweeps = 64;
  bool converged = false;
  for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += 2.0 * a(i, j) * a(i, j);
    off = std::sqrt(off);
    if (off <= stop) {
      converged = true;
      break;
    }
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double app = a(p, p);
        const double aqq = a(q, q);
        const double theta = (aqq - app) / (2.0 * apq);
        double t;
        if (std::abs(theta) > 1e150) {
          t = 1.0 / (2.0 * theta);  // avoid overflow in theta*theta
        } else {
          t = ((theta >= 0.0) ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        }
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const double tau = s / (1.0 + c);

        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = akp - s * (akq + tau * akp);
          a(p, k) = a(k, p);
          a(k, q) = akq + s * (akp - tau * akq);
          a(q, k) = a(k, q);
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double ukp = u(k, p);
          const double ukq = u(k, q);
          u(k, p) = ukp - s * (ukq + tau * ukp);
          u(k, q) = ukq + s * (ukp - tau * ukq);
        }
      }
    }
  }
  if (!converged) {
    // One last check: the sweeps above may have finished the job exactly
    // at the budget boundary.
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += 2.0 * a(i, j) * a(i, j);
    if (std::sqrt(off) > stop) throw ConvergenceError("sym_eig: Jacobi sweeps did not converge");
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });

  SpectralData out;
  out.eigenvalues.resize(n);
  out.eigenvectors = Matrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t src = order[j];
    out.eigenvalues[j] = a(src, src);
    double colmax = 0.0;
    for (std::size_t i = 0; i < n; ++i) colmax = std::max(colmax, std::abs(u(i, src)));
    double sign = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (std::abs(u(i, src)) > 1e-12 * colmax) {
        sign = (u(i, src) > 0.0) ? 1.0 : -1.0;
        break;
      }
    }
    for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, j) = sign * u(i, src);
  }
  return out;
}

Vector singular_values(const Matrix& a) {
  if (a.rows() == 0 || a.cols() == 0) throw DimensionError("singular_values: empty matrix");
  require_finite(a, "singular_values");
  // Gram matrix of the smaller side, so tall and wide inputs both yield
  // exactly min(rows, cols) values.
  const bool wide = a.cols() >= a.rows();
  const Matrix g = wide ? a * transpose(a) : transpose(a) * a;
  SpectralData s = sym_eig(g);
  Vector out(s.eigenvalues.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::sqrt(std::max(0.0, s.eigenvalues[i]));
  return out;
}

double matrix_measure_2(const Matrix& m) {
  require_square(m, "matrix_measure_2");
  require_finite(m, "matrix_measure_2");
  const std::size_t n = m.rows();
  Matrix sym(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) sym(i, j) = 0.5 * (m(i, j) + m(j, i));
  const SpectralData s = sym_eig(sym);
  return s.eigenvalues.back();
}

Matrix sqrt_spd(const Matrix& p) {
  require_square(p, "sqrt_spd");
  const SpectralData s = sym_eig(p);
  const double scale = 1.0 + std::abs(s.eigenvalues.back());
  if (s.eigenvalues.front() <= 1e-12 * scale) {
    throw DefinitenessError("sqrt_spd: matrix is not positive definite");
  }
  const std::size_t n = p.rows();
  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      double v = 0.0;
      for (std::size_t k = 0; k < n; ++k)
        v += s.eigenvectors(i, k) * std::sqrt(s.eigenvalues[k]) * s.eigenvectors(j, k);
      out(i, j) = v;
      out(j, i) = v;
    }
  return out;
}

double weighted_norm(const Vector& v, const Matrix& p) {
  if (!p.square() || p.rows() != v.size()) {
    throw DimensionError("weighted_norm: dimension mismatch");
  }
  const Vector pv = p * v;
  const double q = dot(v, pv);
  if (q < -1e-10 * (1.0 + dot(v, v))) {
    throw DefinitenessError("weighted_norm: weight is not positive semidefinite");
  }
  return std::sqrt(std::max(0.0, q));
}

WeightedMetric::WeightedMetric(Matrix p) : p_(std::move(p)) {
  require_square(p_, "WeightedMetric");
  const SpectralData s = sym_eig(p_);
  lambda_min_ = s.eigenvalues.front();
  lambda_max_ = s.eigenvalues.back();
  if (lambda_min_ <= 1e-12 * (1.0 + std::abs(lambda_max_))) {
    throw DefinitenessError("WeightedMetric: weight is not positive definite");
  }
  const std::size_t n = p_.rows();
  sqrt_ = Matrix(n, n);
  sqrt_inv_ = Matrix(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      double a = 0.0;
      double b = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        const double w = s.eigenvectors(i, k) * s.eigenvectors(j, k);
        const double r = std::sqrt(s.eigenvalues[k]);
        a += w * r;
        b += w / r;
      }
      sqrt_(i, j) = a;
      sqrt_(j, i) = a;
      sqrt_inv_(i, j) = b;
      sqrt_inv_(j, i) = b;
    }
}

double WeightedMetric::measure(const Matrix& m) const {
  if (!m.square() || m.rows() != p_.rows()) {
    throw DimensionError("WeightedMetric::measure: dimension mismatch");
  }
  return matrix_measure_2(sqrt_ * m * sqrt_inv_);
}

double WeightedMetric::norm(const Vector& v) const { return weighted_norm(v, p_); }

double weighted_matrix_measure(const Matrix& m, const Matrix& p) {
  require_square(m, "weighted_matrix_measure");
  if (p.rows() != m.rows()) throw DimensionError("weighted_matrix_measure: dimension mismatch");
  WeightedMetric metric(p);
  return metric.measure(m);
}

namespace {

using Complex = std::complex<double>;

// Eigenvalues of a complex 2x2 block.
std::pair<Complex, Complex> eig2(Complex a, Complex b, Complex c, Complex d) {
  const Complex half_tr = 0.5 * (a + d);
  const Complex disc = std::sqrt(0.25 * (a - d) * (a - d) + b * c);
  return {half_tr + disc, half_tr - disc};
}

// Householder reduction of a real square matrix to upper Hessenberg form.
Matrix hessenberg(const Matrix& m) {
  Matrix h = m;
  const std::size_t n = h.rows();
  if (n < 3) return h;
  for (std::size_t k = 0; k + 2 < n; ++k) {
    double xnorm = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) xnorm += h(i, k) * h(i, k);
    xnorm = std::sqrt(xnorm);
    if (xnorm <= 1e-300) continue;
    Vector v(n, 0.0);
    const double x0 = h(k + 1, k);
    const double alpha = (x0 >= 0.0) ? -xnorm : xnorm;
    v[k + 1] = x0 - alpha;
    for (std::size_t i = k + 2; i < n; ++i) v[i] = h(i, k);
    double vnorm = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) vnorm += v[i] * v[i];
    vnorm = std::sqrt(vnorm);
    if (vnorm <= 1e-300) continue;
    for (std::size_t i = k + 1; i < n; ++i) v[i] /= vnorm;
    // H <- (I - 2vv^T) H (I - 2vv^T)
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t i = k + 1; i < n; ++i) s += v[i] * h(i, j);
      for (std::size_t i = k + 1; i < n; ++i) h(i, j) -= 2.0 * v[i] * s;
    }
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = k + 1; j < n; ++j) s += h(i, j) * v[j];
      for (std::size_t j = k + 1; j < n; ++j) h(i, j) -= 2.0 * s * v[j];
    }
    for (std::size_t i = k + 2; i < n; ++i) h(i, k) = 0.0;
  }
  return h;
}

struct Givens {
  double c = 1.0;   // real by construction
  Complex s = 0.0;  // complex
};

Givens make_givens(Complex a, Complex b) {
  Givens g;
  const double r = std::sqrt(std::norm(a) + std::norm(b));
  if (r <= 1e-300) return g;
  const double amag = std::abs(a);
  if (amag <= 1e-300) {
    g.c = 0.0;
    g.s = 1.0;
    return g;
  }
  g.c = amag / r;
  g.s = (a / amag) * std::conj(b) / r;
  return g;
}

}  // namespace

std::vector<Complex> general_eigenvalues(const Matrix& m) {
  require_square(m, "general_eigenvalues");
  require_finite(m, "general_eigenvalues");
  const std::size_t n = m.rows();

  const Matrix hr = hessenberg(m);
  std::vector<Complex> h(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) h[i * n + j] = Complex(hr(i, j), 0.0);
  auto at = [&](std::size_t i, std::size_t j) -> Complex& { return h[i * n + j]; };

  std::vector<Complex> eig(n);
  const double tol = 1e-10;
  const std::size_t max_steps = 100 * n;
  std::size_t steps = 0;
  std::size_t stall = 0;

  auto negligible = [&](std::size_t i) {
    return std::abs(at(i, i - 1)) <=
           tol * (1.0 + std::abs(at(i - 1, i - 1)) + std::abs(at(i, i)));
  };

  std::size_t mend = n - 1;  // active trailing index
  while (true) {
    // Deflate converged trailing 1x1 blocks.
    while (mend > 0 && negligible(mend)) {
      at(mend, mend - 1) = 0.0;
      eig[mend] = at(mend, mend);
      --mend;
      stall = 0;
    }
    if (mend == 0) {
      eig[0] = at(0, 0);
      break;
    }

    // Active block [l, mend]: walk up to the first negligible subdiagonal.
    std::size_t l = mend;
    while (l > 0 && !negligible(l)) --l;
    if (l > 0) at(l, l - 1) = 0.0;

    if (mend - l == 1) {
      const auto [e1, e2] = eig2(at(l, l), at(l, mend), at(mend, l), at(mend, mend));
      eig[mend] = e1;
      eig[l] = e2;
      if (l == 0) break;
      mend = l - 1;
      stall = 0;
      continue;
    }

    // Shifted QR step on the active block.
    ++steps;
    ++stall;
    if (steps > max_steps) {
      throw ConvergenceError("general_eigenvalues: QR iteration exceeded 100*n steps");
    }
    Complex shift;
    if (stall % 15 == 0) {
      // Exceptional shift to break symmetric-modulus stalls.
      shift = at(mend, mend) + Complex(1.5 * std::abs(at(mend, mend - 1)), 0.0);
    } else {
      const auto [e1, e2] =
          eig2(at(mend - 1, mend - 1), at(mend - 1, mend), at(mend, mend - 1), at(mend, mend));
      shift = (std::abs(e1 - at(mend, mend)) < std::abs(e2 - at(mend, mend))) ? e1 : e2;
    }

    for (std::size_t i = l; i <= mend; ++i) at(i, i) -= shift;
    // Explicit QR factorization of the shifted block by Givens rotations,
    // followed by the reversed products (RQ), all block-local.
    std::vector<Givens> rots(mend - l);
    for (std::size_t k = l; k < mend; ++k) {
      const Givens g = make_givens(at(k, k), at(k + 1, k));
      rots[k - l] = g;
      for (std::size_t j = k; j <= mend; ++j) {
        const Complex top = at(k, j);
        const Complex bot = at(k + 1, j);
        at(k, j) = g.c * top + g.s * bot;
        at(k + 1, j) = -std::conj(g.s) * top + g.c * bot;
      }
    }
    for (std::size_t k = l; k < mend; ++k) {
      const Givens g = rots[k - l];
      const std::size_t last = std::min(k + 1, mend);
      for (std::size_t i = l; i <= last; ++i) {
        const Complex left = at(i, k);
        const Complex right = at(i, k + 1);
        at(i, k) = g.c * left + std::conj(g.s) * right;
        at(i, k + 1) = -g.s * left + g.c * right;
      }
    }
    for (std::size_t i = l; i <= mend; ++i) at(i, i) += shift;
  }

  std::sort(eig.begin(), eig.end(), [](const Complex& a, const Complex& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return eig;
}

bool is_hurwitz(const Matrix& m) {
  const auto eig = general_eigenvalues(m);
  for (const auto& lambda : eig) {
    if (lambda.real() >= -1e-10) return false;
  }
  return true;
}

namespace {

struct LuFactors {
  Matrix lu;
  std::vector<std::size_t> perm;
};

LuFactors lu_decompose(const Matrix& m) {
  const std::size_t n = m.rows();
  LuFactors f{m, std::vector<std::size_t>(n)};
  std::iota(f.perm.begin(), f.perm.end(), 0);
  const double tiny = 1e-14 * (1.0 + max_abs(m));
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    double best = std::abs(f.lu(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      const double v = std::abs(f.lu(i, k));
      if (v > best) {
        best = v;
        piv = i;
      }
    }
    if (best <= tiny) throw SingularityError("solve_linear: pivot vanished, matrix is singular");
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(f.lu(k, j), f.lu(piv, j));
      std::swap(f.perm[k], f.perm[piv]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      f.lu(i, k) /= f.lu(k, k);
      const double lik = f.lu(i, k);
      for (std::size_t j = k + 1; j < n; ++j) f.lu(i, j) -= lik * f.lu(k, j);
    }
  }
  return f;
}

Vector lu_solve(const LuFactors& f, const Vector& rhs) {
  const std::size_t n = rhs.size();
  Vector x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = rhs[f.perm[i]];
  for (std::size_t i = 1; i < n; ++i) {
    double s = x[i];
    for (std::size_t j = 0; j < i; ++j) s -= f.lu(i, j) * x[j];
    x[i] = s;
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = x[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= f.lu(i, j) * x[j];
    x[i] = s / f.lu(i, i);
  }
  return x;
}

}  // namespace

Vector solve_linear(const Matrix& m, const Vector& rhs) {
  require_square(m, "solve_linear");
  if (m.rows() != rhs.size()) throw DimensionError("solve_linear: dimension mismatch");
  require_finite(m, "solve_linear");
  require_finite(rhs, "solve_linear");

  const Vector sv = singular_values(m);
  if (sv.front() <= 0.0 || sv.back() / sv.front() > 1e12) {
    throw SingularityError("solve_linear: condition estimate exceeds 1e12");
  }

  const LuFactors f = lu_decompose(m);
  Vector x = lu_solve(f, rhs);
  // One refinement pass tightens the residual on mildly conditioned systems.
  Vector r = rhs - m * x;
  const Vector dx = lu_solve(f, r);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] += dx[i];
  return x;
}

}  // namespace pdc
