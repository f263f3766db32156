#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "pdcontract/linalg.hpp"

namespace pdc {

/// Twice-differentiable objective with declared convexity constants:
/// ell_inf * I <= Hessian <= ell_sup * I. For quadratics the constants come
/// from the spectrum; user-supplied evaluators declare them and are
/// spot-validated by sampling only.
struct SmoothObjective {
  std::size_t dimension = 0;
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> gradient;
  std::function<Matrix(const Vector&)> hessian;
  double ell_inf = 0.0;
  double ell_sup = 0.0;

  void validate() const;
};

/// f(x) = 1/2 x^T Q x + q^T x with symmetric PSD Q.
class QuadraticObjective {
 public:
  QuadraticObjective(Matrix Q, Vector q);

  std::size_t dimension() const { return q_.size(); }
  const Matrix& Q() const { return Q_; }
  const Vector& q() const { return q_; }
  double value(const Vector& x) const;
  Vector gradient(const Vector& x) const;
  double ell_inf() const { return ell_inf_; }
  double ell_sup() const { return ell_sup_; }
  SmoothObjective as_smooth() const;

 private:
  Matrix Q_;
  Vector q_;
  double ell_inf_ = 0.0;
  double ell_sup_ = 0.0;
};

/// Full-row-rank equality constraint A x = b with 1 <= k < n; extreme
/// singular values of A are cached at construction.
class EqualityConstraint {
 public:
  EqualityConstraint(Matrix A, Vector b);

  const Matrix& A() const { return A_; }
  const Vector& b() const { return b_; }
  std::size_t rows() const { return A_.rows(); }
  std::size_t cols() const { return A_.cols(); }
  double sigma_min() const { return sigma_min_; }
  double sigma_max() const { return sigma_max_; }

 private:
  Matrix A_;
  Vector b_;
  double sigma_min_ = 0.0;
  double sigma_max_ = 0.0;
};

struct ConstrainedProblem {
  SmoothObjective objective;
  EqualityConstraint constraint;

  ConstrainedProblem(SmoothObjective obj, EqualityConstraint con);
};

struct QuadraticProblem {
  QuadraticObjective objective;
  EqualityConstraint constraint;

  QuadraticProblem(QuadraticObjective obj, EqualityConstraint con);
  ConstrainedProblem as_problem() const;
};

/// Overdetermined least squares min ||H x - z||_2 with full column rank H.
class LeastSquaresInstance {
 public:
  LeastSquaresInstance(Matrix H, Vector z);

  const Matrix& H() const { return H_; }
  const Vector& z() const { return z_; }
  std::size_t sample_count() const { return H_.rows(); }
  std::size_t dimension() const { return H_.cols(); }
  Vector row(std::size_t i) const;
  double max_row_norm_sq() const;

  /// Node objective f_i(w) = 1/2 (h_i^T w - z_i)^2.
  SmoothObjective node_objective(std::size_t i) const;

 private:
  Matrix H_;
  Vector z_;
};

/// Time-varying objective family f(x, t) over a fixed full-row-rank A with
/// moving right-hand side b(t). beta1 bounds ||b'(t)||_2 and beta2 bounds
/// ||d/dt grad f(x, t)||_2; ell_inf/ell_sup hold uniformly in t.
struct TimeVaryingProblem {
  std::size_t dimension = 0;
  std::function<double(const Vector&, double)> value;
  std::function<Vector(const Vector&, double)> gradient;
  std::function<Matrix(const Vector&, double)> hessian;
  std::function<Vector(const Vector&, double)> grad_rate;  // d/dt grad f
  Matrix A;
  std::function<Vector(double)> b;
  std::function<Vector(double)> b_rate;
  double beta1 = 0.0;
  double beta2 = 0.0;
  double ell_inf = 0.0;
  double ell_sup = 0.0;
  double sigma_min = 0.0;
  double sigma_max = 0.0;

  /// Frozen-time instance as an exact quadratic (built-in families only;
  /// empty otherwise).
  std::function<QuadraticProblem(double)> frozen_quadratic;

  std::size_t constraint_rows() const { return A.rows(); }
  void validate() const;
};

/// One node of a time-varying distributed problem.
struct TVNodeObjective {
  std::size_t dimension = 0;
  std::function<double(const Vector&, double)> value;
  std::function<Vector(const Vector&, double)> gradient;
  std::function<Matrix(const Vector&, double)> hessian;
  std::function<Vector(const Vector&, double)> grad_rate;
  double ell_inf = 0.0;
  double ell_sup = 0.0;
  double beta1 = 0.0;
};

struct TVDistributedProblem {
  std::size_t dimension = 0;
  std::vector<TVNodeObjective> nodes;

  void validate() const;
  std::vector<double> ell_inf_vector() const;
  std::vector<double> ell_sup_vector() const;
  std::vector<double> beta1_vector() const;
};

/// Central finite difference of grad f in t, step 1e-5; the default
/// grad_rate when no analytic evaluator is supplied.
Vector fd_grad_rate(const std::function<Vector(const Vector&, double)>& gradient, const Vector& x,
                    double t, double step = 1e-5);

/// Solves the stationarity system Q x + q + A^T nu = 0, A x = b.
std::pair<Vector, Vector> kkt_solve(const QuadraticObjective& obj, const EqualityConstraint& con);

/// x* from the normal equations H^T H x = H^T z.
Vector ls_solution(const LeastSquaresInstance& ls);

/// Solves sum_i grad f_i(v) = 0 by damped Newton (exact in one step for
/// quadratics). Requires sum_i ell_inf,i > 0.
Vector distributed_optimum(const std::vector<SmoothObjective>& objectives);

/// lambda_min(diag(h_1 h_1^T, ..., h_N h_N^T) + rho (L kron I_n)); errors if
/// the result is not strictly positive.
double ell_star(const LeastSquaresInstance& ls, const Matrix& L, double rho);

// ---- built-in time-varying parametric families ----

/// base + amplitude * sin(frequency * t) * direction
struct SinusoidalVector {
  Vector base;
  Vector direction;
  double amplitude = 0.0;
  double frequency = 1.0;

  Vector at(double t) const;
  Vector rate(double t) const;
  double rate_bound() const;  // amplitude * frequency * ||direction||_2
};

/// Moving-target quadratic f(x, t) = 1/2 (x - r(t))^T Q (x - r(t)) subject
/// to A x = b(t).
TimeVaryingProblem make_moving_target_problem(Matrix Q, SinusoidalVector target, Matrix A,
                                              SinusoidalVector b);

TVNodeObjective make_moving_target_node(Matrix Q, SinusoidalVector target);

/// Frozen optimum of a TV distributed problem at time t: solves
/// sum_i grad f_i(v, t) = 0 by damped Newton from the warm start.
Vector tv_distributed_frozen_optimum(const TVDistributedProblem& p, double t, Vector warm_start);

// ---- problem definition files (JSON syntax) ----

QuadraticProblem load_quadratic_problem(const std::string& path);
LeastSquaresInstance load_least_squares(const std::string& path);
/// {"n": ..., "objectives": [{"Q": ..., "q": ...}, ...]}
std::vector<QuadraticObjective> load_node_objectives(const std::string& path);
TimeVaryingProblem load_tv_problem(const std::string& path);
TVDistributedProblem load_tv_distributed_problem(const std::string& path);

}  // namespace pdc
