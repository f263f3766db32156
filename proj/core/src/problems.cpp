#include "pdcontract/problems.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

namespace pdc {

void SmoothObjective::validate() const {
  if (dimension == 0) throw DimensionError("SmoothObjective: dimension >= 1 required");
  if (!value || !gradient || !hessian) throw Error("SmoothObjective: missing evaluator");
  if (!std::isfinite(ell_inf) || !std::isfinite(ell_sup) || ell_inf < 0.0 || ell_sup < ell_inf) {
    throw Error("SmoothObjective: need 0 <= ell_inf <= ell_sup");
  }
}

QuadraticObjective::QuadraticObjective(Matrix Q, Vector q) : Q_(std::move(Q)), q_(std::move(q)) {
  if (!Q_.square() || Q_.rows() != q_.size() || q_.empty()) {
    throw DimensionError("QuadraticObjective: Q must be n x n matching q");
  }
  require_finite(Q_, "QuadraticObjective");
  require_finite(q_, "QuadraticObjective");
  if (!symmetric_within(Q_)) throw SymmetryError("QuadraticObjective: Q must be symmetric");
  const SpectralData s = sym_eig(Q_);
  if (s.eigenvalues.front() < -1e-10 * (1.0 + std::abs(s.eigenvalues.back()))) {
    throw DefinitenessError("QuadraticObjective: Q must be positive semidefinite");
  }
  ell_inf_ = std::max(0.0, s.eigenvalues.front());
  ell_sup_ = std::max(0.0, s.eigenvalues.back());
}

double QuadraticObjective::value(const Vector& x) const {
  return 0.5 * dot(x, Q_ * x) + dot(q_, x);
}

Vector QuadraticObjective::gradient(const Vector& x) const { return Q_ * x + q_; }

SmoothObjective QuadraticObjective::as_smooth() const {
  SmoothObjective s;
  s.dimension = dimension();
  const Matrix Q = Q_;
  const Vector q = q_;
  s.value = [Q, q](const Vector& x) { return 0.5 * dot(x, Q * x) + dot(q, x); };
  s.gradient = [Q, q](const Vector& x) { return Q * x + q; };
  s.hessian = [Q](const Vector&) { return Q; };
  s.ell_inf = ell_inf_;
  s.ell_sup = ell_sup_;
  return s;
}

EqualityConstraint::EqualityConstraint(Matrix A, Vector b) : A_(std::move(A)), b_(std::move(b)) {
  if (A_.rows() == 0) throw Error("EqualityConstraint: k >= 1 required (unconstrained problems are out of scope)");
  if (A_.rows() >= A_.cols()) throw DimensionError("EqualityConstraint: need k < n");
  if (A_.rows() != b_.size()) throw DimensionError("EqualityConstraint: A and b disagree");
  require_finite(A_, "EqualityConstraint");
  require_finite(b_, "EqualityConstraint");
  const Vector sv = singular_values(A_);
  sigma_min_ = sv.front();
  sigma_max_ = sv.back();
  if (sigma_min_ <= 1e-10) throw Error("EqualityConstraint: A is not full row rank");
}

ConstrainedProblem::ConstrainedProblem(SmoothObjective obj, EqualityConstraint con)
    : objective(std::move(obj)), constraint(std::move(con)) {
  objective.validate();
  if (objective.dimension != constraint.cols()) {
    throw DimensionError("ConstrainedProblem: objective and constraint dimensions disagree");
  }
}

QuadraticProblem::QuadraticProblem(QuadraticObjective obj, EqualityConstraint con)
    : objective(std::move(obj)), constraint(std::move(con)) {
  if (objective.dimension() != constraint.cols()) {
    throw DimensionError("QuadraticProblem: objective and constraint dimensions disagree");
  }
}

ConstrainedProblem QuadraticProblem::as_problem() const {
  return ConstrainedProblem(objective.as_smooth(), constraint);
}

LeastSquaresInstance::LeastSquaresInstance(Matrix H, Vector z) : H_(std::move(H)), z_(std::move(z)) {
  if (H_.rows() != z_.size()) throw DimensionError("LeastSquaresInstance: H and z disagree");
  if (H_.cols() >= H_.rows()) throw DimensionError("LeastSquaresInstance: need n < N");
  require_finite(H_, "LeastSquaresInstance");
  require_finite(z_, "LeastSquaresInstance");
  const Vector sv = singular_values(H_);
  if (sv.front() <= 1e-10) throw Error("LeastSquaresInstance: H is not full column rank");
}

Vector LeastSquaresInstance::row(std::size_t i) const {
  Vector h(H_.cols());
  for (std::size_t j = 0; j < H_.cols(); ++j) h[j] = H_(i, j);
  return h;
}

double LeastSquaresInstance::max_row_norm_sq() const {
  double best = 0.0;
  for (std::size_t i = 0; i < H_.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < H_.cols(); ++j) s += H_(i, j) * H_(i, j);
    best = std::max(best, s);
  }
  return best;
}

SmoothObjective LeastSquaresInstance::node_objective(std::size_t i) const {
  SmoothObjective s;
  s.dimension = dimension();
  const Vector h = row(i);
  const double zi = z_[i];
  s.value = [h, zi](const Vector& w) {
    const double r = dot(h, w) - zi;
    return 0.5 * r * r;
  };
  s.gradient = [h, zi](const Vector& w) { return (dot(h, w) - zi) * h; };
  s.hessian = [h](const Vector&) {
    Matrix m(h.size(), h.size());
    for (std::size_t a = 0; a < h.size(); ++a)
      for (std::size_t b = 0; b < h.size(); ++b) m(a, b) = h[a] * h[b];
    return m;
  };
  s.ell_inf = 0.0;
  s.ell_sup = dot(h, h);
  return s;
}

void TimeVaryingProblem::validate() const {
  if (dimension == 0) throw DimensionError("TimeVaryingProblem: dimension >= 1 required");
  if (!value || !gradient || !hessian || !grad_rate || !b || !b_rate) {
    throw Error("TimeVaryingProblem: missing evaluator");
  }
  if (A.rows() == 0 || A.rows() >= A.cols() || A.cols() != dimension) {
    throw DimensionError("TimeVaryingProblem: need 1 <= k < n constraint");
  }
  if (ell_inf <= 0.0 || ell_sup < ell_inf) {
    throw Error("TimeVaryingProblem: uniform strong convexity 0 < ell_inf <= ell_sup required");
  }
  if (beta1 < 0.0 || beta2 < 0.0) throw Error("TimeVaryingProblem: beta bounds must be >= 0");
}

void TVDistributedProblem::validate() const {
  if (dimension == 0) throw DimensionError("TVDistributedProblem: dimension >= 1 required");
  if (nodes.size() < 2) throw Error("TVDistributedProblem: at least two nodes required");
  for (const auto& node : nodes) {
    if (node.dimension != dimension) throw DimensionError("TVDistributedProblem: node dimension mismatch");
    if (!node.value || !node.gradient || !node.hessian || !node.grad_rate) {
      throw Error("TVDistributedProblem: missing node evaluator");
    }
    if (node.ell_inf <= 0.0 || node.ell_sup < node.ell_inf || node.beta1 < 0.0) {
      throw Error("TVDistributedProblem: invalid node constants");
    }
  }
}

std::vector<double> TVDistributedProblem::ell_inf_vector() const {
  std::vector<double> out;
  out.reserve(nodes.size());
  for (const auto& n : nodes) out.push_back(n.ell_inf);
  return out;
}

std::vector<double> TVDistributedProblem::ell_sup_vector() const {
  std::vector<double> out;
  out.reserve(nodes.size());
  for (const auto& n : nodes) out.push_back(n.ell_sup);
  return out;
}

std::vector<double> TVDistributedProblem::beta1_vector() const {
  std::vector<double> out;
  out.reserve(nodes.size());
  for (const auto& n : nodes) out.push_back(n.beta1);
  return out;
}

Vector fd_grad_rate(const std::function<Vector(const Vector&, double)>& gradient, const Vector& x,
                    double t, double step) {
  const Vector hi = gradient(x, t + step);
  const Vector lo = gradient(x, t - step);
  Vector out(hi.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (hi[i] - lo[i]) / (2.0 * step);
  return out;
}

std::pair<Vector, Vector> kkt_solve(const QuadraticObjective& obj, const EqualityConstraint& con) {
  const std::size_t n = obj.dimension();
  const std::size_t k = con.rows();
  if (con.cols() != n) throw DimensionError("kkt_solve: dimension mismatch");
  Matrix kkt(n + k, n + k);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) kkt(i, j) = obj.Q()(i, j);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      kkt(n + i, j) = con.A()(i, j);
      kkt(j, n + i) = con.A()(i, j);
    }
  Vector rhs(n + k);
  for (std::size_t i = 0; i < n; ++i) rhs[i] = -obj.q()[i];
  for (std::size_t i = 0; i < k; ++i) rhs[n + i] = con.b()[i];
  const Vector sol = solve_linear(kkt, rhs);
  return {Vector(sol.begin(), sol.begin() + n), Vector(sol.begin() + n, sol.end())};
}

Vector ls_solution(const LeastSquaresInstance& ls) {
  const Matrix ht = transpose(ls.H());
  return solve_linear(ht * ls.H(), ht * ls.z());
}

Vector distributed_optimum(const std::vector<SmoothObjective>& objectives) {
  if (objectives.empty()) throw Error("distributed_optimum: no objectives");
  const std::size_t n = objectives.front().dimension;
  double aggregate = 0.0;
  for (const auto& f : objectives) {
    f.validate();
    if (f.dimension != n) throw DimensionError("distributed_optimum: node dimension mismatch");
    aggregate += f.ell_inf;
  }
  if (aggregate <= 0.0) {
    throw AssumptionError("(A6)", "distributed_optimum: aggregate objective is not strongly convex");
  }

  auto grad_sum = [&](const Vector& v) {
    Vector g(n, 0.0);
    for (const auto& f : objectives) {
      const Vector gi = f.gradient(v);
      for (std::size_t i = 0; i < n; ++i) g[i] += gi[i];
    }
    return g;
  };

  Vector v(n, 0.0);
  Vector g = grad_sum(v);
  for (std::size_t it = 0; it < 100; ++it) {
    if (norm2(g) <= 1e-12) return v;
    Matrix hess(n, n);
    for (const auto& f : objectives) hess = hess + f.hessian(v);
    const Vector step = solve_linear(hess, g);
    double damping = 1.0;
    const double g0 = norm2(g);
    for (std::size_t half = 0; half < 40; ++half) {
      const Vector trial = v - damping * step;
      const Vector gt = grad_sum(trial);
      if (norm2(gt) < g0) {
        v = trial;
        g = gt;
        break;
      }
      damping *= 0.5;
      if (half + 1 == 40) throw ConvergenceError("distributed_optimum: line search failed");
    }
  }
  if (norm2(g) > 1e-9) throw ConvergenceError("distributed_optimum: Newton did not converge in 100 iterations");
  return v;
}

double ell_star(const LeastSquaresInstance& ls, const Matrix& L, double rho) {
  if (rho <= 0.0) throw Error("ell_star: rho > 0 required");
  const std::size_t N = ls.sample_count();
  const std::size_t n = ls.dimension();
  if (!L.square() || L.rows() != N) throw DimensionError("ell_star: Laplacian size must match sample count");
  Matrix m = rho * kron(L, Matrix::identity(n));
  for (std::size_t i = 0; i < N; ++i) {
    const Vector h = ls.row(i);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) m(i * n + a, i * n + b) += h[a] * h[b];
  }
  const SpectralData s = sym_eig(m);
  const double lam = s.eigenvalues.front();
  if (lam <= 1e-12) {
    throw AssumptionError("(A4)", "ell_star: kernels of the data blocks and the Laplacian overlap");
  }
  return lam;
}

Vector SinusoidalVector::at(double t) const {
  Vector out(base.size());
  const double s = amplitude * std::sin(frequency * t);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = base[i] + s * direction[i];
  return out;
}

Vector SinusoidalVector::rate(double t) const {
  Vector out(base.size());
  const double s = amplitude * frequency * std::cos(frequency * t);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = s * direction[i];
  return out;
}

double SinusoidalVector::rate_bound() const { return std::abs(amplitude * frequency) * norm2(direction); }

TimeVaryingProblem make_moving_target_problem(Matrix Q, SinusoidalVector target, Matrix A,
                                              SinusoidalVector b) {
  if (target.base.size() != target.direction.size() || b.base.size() != b.direction.size()) {
    throw DimensionError("make_moving_target_problem: base/direction size mismatch");
  }
  const std::size_t n = target.base.size();
  if (Q.rows() == 0) Q = Matrix::identity(n);
  QuadraticObjective probe(Q, Vector(n, 0.0));  // validates symmetry/PSD, computes spectrum
  if (probe.ell_inf() <= 0.0) {
    throw AssumptionError("(A2)", "make_moving_target_problem: Q must be positive definite");
  }
  // Reuse the constraint validation (rank, shape) once up front.
  EqualityConstraint con(A, b.base);

  TimeVaryingProblem p;
  p.dimension = n;
  const Matrix Qc = Q;
  p.value = [Qc, target](const Vector& x, double t) {
    const Vector d = x - target.at(t);
    return 0.5 * dot(d, Qc * d);
  };
  p.gradient = [Qc, target](const Vector& x, double t) { return Qc * (x - target.at(t)); };
  p.hessian = [Qc](const Vector&, double) { return Qc; };
  p.grad_rate = [Qc, target](const Vector&, double t) { return -1.0 * (Qc * target.rate(t)); };
  p.A = A;
  p.b = [b](double t) { return b.at(t); };
  p.b_rate = [b](double t) { return b.rate(t); };
  p.beta1 = b.rate_bound();
  {
    Vector qdir = Qc * target.direction;
    p.beta2 = std::abs(target.amplitude * target.frequency) * norm2(qdir);
  }
  p.ell_inf = probe.ell_inf();
  p.ell_sup = probe.ell_sup();
  p.sigma_min = con.sigma_min();
  p.sigma_max = con.sigma_max();
  const Matrix Af = A;
  p.frozen_quadratic = [Qc, target, Af, b](double t) {
    Vector q = -1.0 * (Qc * target.at(t));
    return QuadraticProblem(QuadraticObjective(Qc, q), EqualityConstraint(Af, b.at(t)));
  };
  p.validate();
  return p;
}

TVNodeObjective make_moving_target_node(Matrix Q, SinusoidalVector target) {
  if (target.base.size() != target.direction.size()) {
    throw DimensionError("make_moving_target_node: base/direction size mismatch");
  }
  const std::size_t n = target.base.size();
  if (Q.rows() == 0) Q = Matrix::identity(n);
  QuadraticObjective probe(Q, Vector(n, 0.0));
  if (probe.ell_inf() <= 0.0) {
    throw AssumptionError("(A6)", "make_moving_target_node: Q must be positive definite");
  }
  TVNodeObjective node;
  node.dimension = n;
  const Matrix Qc = Q;
  node.value = [Qc, target](const Vector& x, double t) {
    const Vector d = x - target.at(t);
    return 0.5 * dot(d, Qc * d);
  };
  node.gradient = [Qc, target](const Vector& x, double t) { return Qc * (x - target.at(t)); };
  node.hessian = [Qc](const Vector&, double) { return Qc; };
  node.grad_rate = [Qc, target](const Vector&, double t) { return -1.0 * (Qc * target.rate(t)); };
  node.ell_inf = probe.ell_inf();
  node.ell_sup = probe.ell_sup();
  Vector qdir = Qc * target.direction;
  node.beta1 = std::abs(target.amplitude * target.frequency) * norm2(qdir);
  return node;
}

Vector tv_distributed_frozen_optimum(const TVDistributedProblem& p, double t, Vector warm_start) {
  const std::size_t n = p.dimension;
  if (warm_start.size() != n) warm_start.assign(n, 0.0);
  auto grad_sum = [&](const Vector& v) {
    Vector g(n, 0.0);
    for (const auto& node : p.nodes) {
      const Vector gi = node.gradient(v, t);
      for (std::size_t i = 0; i < n; ++i) g[i] += gi[i];
    }
    return g;
  };
  Vector v = std::move(warm_start);
  Vector g = grad_sum(v);
  for (std::size_t it = 0; it < 100; ++it) {
    if (norm2(g) <= 1e-12) return v;
    Matrix hess(n, n);
    for (const auto& node : p.nodes) hess = hess + node.hessian(v, t);
    const Vector step = solve_linear(hess, g);
    v = v - step;
    g = grad_sum(v);
  }
  if (norm2(g) > 1e-9) {
    throw ConvergenceError("tv_distributed_frozen_optimum: Newton did not converge");
  }
  return v;
}

// ---- JSON problem files ----

namespace {

using nlohmann::json;

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open problem file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error("failed to parse " + path + ": " + e.what());
  }
  return j;
}

Matrix matrix_field(const json& j, const std::string& key, const std::string& path) {
  if (!j.contains(key)) throw Error(path + ": missing field '" + key + "'");
  const auto& rows = j.at(key);
  if (!rows.is_array() || rows.empty()) throw Error(path + ": '" + key + "' must be a nested array");
  const std::size_t r = rows.size();
  const std::size_t c = rows.front().size();
  Matrix m(r, c);
  for (std::size_t i = 0; i < r; ++i) {
    if (rows[i].size() != c) throw Error(path + ": '" + key + "' has ragged rows");
    for (std::size_t k = 0; k < c; ++k) m(i, k) = rows[i][k].get<double>();
  }
  return m;
}

Vector vector_field(const json& j, const std::string& key, const std::string& path) {
  if (!j.contains(key)) throw Error(path + ": missing field '" + key + "'");
  const auto& arr = j.at(key);
  if (!arr.is_array()) throw Error(path + ": '" + key + "' must be an array");
  Vector v(arr.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = arr[i].get<double>();
  return v;
}

SinusoidalVector sinusoid_field(const json& j, const std::string& key, const std::string& path) {
  if (!j.contains(key)) throw Error(path + ": missing field '" + key + "'");
  const auto& s = j.at(key);
  SinusoidalVector out;
  out.base = vector_field(s, "base", path);
  out.direction = vector_field(s, "direction", path);
  out.amplitude = s.value("amplitude", 0.0);
  out.frequency = s.value("frequency", 1.0);
  return out;
}

}  // namespace

QuadraticProblem load_quadratic_problem(const std::string& path) {
  const json j = read_json(path);
  QuadraticObjective obj(matrix_field(j, "Q", path), vector_field(j, "q", path));
  EqualityConstraint con(matrix_field(j, "A", path), vector_field(j, "b", path));
  return QuadraticProblem(std::move(obj), std::move(con));
}

LeastSquaresInstance load_least_squares(const std::string& path) {
  const json j = read_json(path);
  return LeastSquaresInstance(matrix_field(j, "H", path), vector_field(j, "z", path));
}

std::vector<QuadraticObjective> load_node_objectives(const std::string& path) {
  const json j = read_json(path);
  if (!j.contains("objectives") || !j.at("objectives").is_array()) {
    throw Error(path + ": missing 'objectives' array");
  }
  std::vector<QuadraticObjective> out;
  for (const auto& node : j.at("objectives")) {
    out.emplace_back(matrix_field(node, "Q", path), vector_field(node, "q", path));
  }
  if (out.size() < 2) throw Error(path + ": at least two node objectives required");
  const std::size_t n = out.front().dimension();
  for (const auto& o : out) {
    if (o.dimension() != n) throw DimensionError(path + ": node dimensions disagree");
  }
  return out;
}

TimeVaryingProblem load_tv_problem(const std::string& path) {
  const json j = read_json(path);
  const std::string family = j.value("family", "moving-target");
  if (family != "moving-target") throw Error(path + ": unknown TV family '" + family + "'");
  SinusoidalVector target = sinusoid_field(j, "target", path);
  Matrix Q = j.contains("Q") ? matrix_field(j, "Q", path) : Matrix();
  Matrix A = matrix_field(j, "A", path);
  SinusoidalVector b = sinusoid_field(j, "b", path);
  return make_moving_target_problem(std::move(Q), std::move(target), std::move(A), std::move(b));
}

TVDistributedProblem load_tv_distributed_problem(const std::string& path) {
  const json j = read_json(path);
  const std::string family = j.value("family", "moving-target");
  if (family != "moving-target") throw Error(path + ": unknown TV family '" + family + "'");
  if (!j.contains("nodes") || !j.at("nodes").is_array()) throw Error(path + ": missing 'nodes' array");
  TVDistributedProblem p;
  for (const auto& node : j.at("nodes")) {
    SinusoidalVector target = sinusoid_field(node, "target", path);
    Matrix Q = node.contains("Q") ? matrix_field(node, "Q", path) : Matrix();
    p.nodes.push_back(make_moving_target_node(std::move(Q), std::move(target)));
  }
  if (p.nodes.empty()) throw Error(path + ": no nodes");
  p.dimension = p.nodes.front().dimension;
  p.validate();
  return p;
}

}  // namespace pdc
