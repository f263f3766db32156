#include "pdcontract/contraction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace pdc {

std::string to_string(CertificateKind kind) {
  switch (kind) {
    case CertificateKind::standard: return "standard";
    case CertificateKind::augmented: return "augmented";
    case CertificateKind::distributed: return "distributed";
    case CertificateKind::tv_distributed: return "tv-distributed";
  }
  return "unknown";
}

namespace {

void require_epsilon(double epsilon) {
  if (!(epsilon > 0.0) || !(epsilon < 1.0)) throw Error("epsilon must lie in (0, 1)");
}

/// [[I_n, alpha A^T], [alpha A, I_k]] for a (possibly reduced) constraint A.
Matrix block_metric(const Matrix& A, double alpha) {
  const std::size_t k = A.rows();
  const std::size_t n = A.cols();
  Matrix P = Matrix::identity(n + k);
  for (std::size_t r = 0; r < k; ++r)
    for (std::size_t j = 0; j < n; ++j) {
      P(j, n + r) = alpha * A(r, j);
      P(n + r, j) = alpha * A(r, j);
    }
  return P;
}

MetricCertificate finish_certificate(CertificateKind kind, double epsilon, double alpha, double c,
                                     Matrix P) {
  MetricCertificate cert;
  cert.kind = kind;
  cert.epsilon = epsilon;
  cert.alpha = alpha;
  cert.c = c;
  const SpectralData s = sym_eig(P);
  cert.lambda_min_P = s.eigenvalues.front();
  cert.lambda_max_P = s.eigenvalues.back();
  cert.P = std::move(P);
  if (cert.lambda_min_P <= 0.0) {
    throw DefinitenessError("certificate metric is not positive definite");
  }
  return cert;
}

double rate_multiplier(double sigma_min, double sigma_max) {
  return 0.75 * sigma_max * sigma_min * sigma_min / (sigma_max + 1.0);
}

}  // namespace

double alpha_eps(double ell_inf, double ell_sup, double sigma_min, double sigma_max,
                 double epsilon) {
  require_epsilon(epsilon);
  if (!(ell_inf > 0.0) || !(ell_sup > 0.0) || !(sigma_min > 0.0) || !(sigma_max > 0.0)) {
    throw Error("alpha_eps: all constants must be positive");
  }
  return epsilon * ell_inf /
         (sigma_max * sigma_max + 0.75 * sigma_max * sigma_min * sigma_min + ell_sup * ell_sup);
}

MetricCertificate standard_certificate(const ConstrainedProblem& p, double epsilon) {
  require_epsilon(epsilon);
  if (p.objective.ell_inf <= 0.0) {
    throw AssumptionError("(A2)",
                          "standard_certificate: objective is not strongly convex; "
                          "use the augmented certificate instead");
  }
  const double sm = p.constraint.sigma_min();
  const double sM = p.constraint.sigma_max();
  const double alpha = alpha_eps(p.objective.ell_inf, p.objective.ell_sup, sm, sM, epsilon);
  const double c = alpha * rate_multiplier(sm, sM);
  return finish_certificate(CertificateKind::standard, epsilon, alpha, c,
                            block_metric(p.constraint.A(), alpha));
}

MetricCertificate standard_certificate(const TimeVaryingProblem& p, double epsilon) {
  require_epsilon(epsilon);
  p.validate();
  const double alpha = alpha_eps(p.ell_inf, p.ell_sup, p.sigma_min, p.sigma_max, epsilon);
  const double c = alpha * rate_multiplier(p.sigma_min, p.sigma_max);
  return finish_certificate(CertificateKind::standard, epsilon, alpha, c,
                            block_metric(p.A, alpha));
}

MetricCertificate augmented_certificate(const ConstrainedProblem& p, double rho, double epsilon) {
  require_epsilon(epsilon);
  if (!(rho > 0.0)) throw Error("augmented_certificate: rho > 0 required");
  const std::size_t n = p.objective.dimension;
  const Matrix AtA = transpose(p.constraint.A()) * p.constraint.A();

  // Kernel-overlap spot check for the standing assumption: the augmented
  // Hessian must be positive definite at sampled states.
  std::mt19937_64 rng(0x5eedbeefULL);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (std::size_t sample = 0; sample < 20; ++sample) {
    Vector x(n);
    for (double& v : x) v = 2.0 * unit(rng);
    Matrix aug = p.objective.hessian(x) + rho * AtA;
    const SpectralData s = sym_eig(aug);
    if (s.eigenvalues.front() <= 1e-10 * (1.0 + std::abs(s.eigenvalues.back()))) {
      throw AssumptionError("(A4)",
                            "augmented_certificate: ker(hess f) and ker(A) overlap at a sample");
    }
  }

  const double sm = p.constraint.sigma_min();
  const double sM = p.constraint.sigma_max();
  const double ell_sup = p.objective.ell_sup;
  const double alpha = epsilon * rho * sm * sm /
                       ((1.0 + rho) * sM * sM + 0.75 * sM * sm * sm + ell_sup * ell_sup);
  const double c = alpha * rate_multiplier(sm, sM);
  return finish_certificate(CertificateKind::augmented, epsilon, alpha, c,
                            block_metric(p.constraint.A(), alpha));
}

double distributed_rate(const std::vector<double>& ell_inf, const std::vector<double>& ell_sup,
                        double lambda2, double lambdaN, double epsilon) {
  require_epsilon(epsilon);
  if (ell_inf.empty() || ell_inf.size() != ell_sup.size()) {
    throw DimensionError("distributed_rate: constant vectors disagree");
  }
  const double min_inf = *std::min_element(ell_inf.begin(), ell_inf.end());
  if (min_inf <= 0.0) {
    throw AssumptionError("(A6)", "distributed_rate: every node objective must be strongly convex");
  }
  double sup_inf = 0.0;
  for (double v : ell_sup) sup_inf = std::max(sup_inf, v);
  if (!(lambda2 > 0.0) || !(lambdaN >= lambda2)) {
    throw Error("distributed_rate: need 0 < lambda2 <= lambdaN");
  }
  return 0.75 * epsilon * (lambdaN * lambda2 * lambda2 / (lambdaN + 1.0)) * min_inf /
         (lambdaN * lambdaN + 0.75 * lambdaN * lambda2 * lambda2 + sup_inf * sup_inf);
}

MetricCertificate distributed_certificate(const std::vector<double>& ell_inf,
                                          const std::vector<double>& ell_sup,
                                          const LaplacianSpectrum& spec, std::size_t n,
                                          double epsilon) {
  const double lambda2 = spec.lambda2();
  const double lambdaN = spec.lambdaN();
  const double c = distributed_rate(ell_inf, ell_sup, lambda2, lambdaN, epsilon);
  const double min_inf = *std::min_element(ell_inf.begin(), ell_inf.end());
  double sup_inf = 0.0;
  for (double v : ell_sup) sup_inf = std::max(sup_inf, v);
  const double alpha =
      epsilon * min_inf /
      (lambdaN * lambdaN + 0.75 * lambdaN * lambda2 * lambda2 + sup_inf * sup_inf);
  return finish_certificate(CertificateKind::distributed, epsilon, alpha, c,
                            block_metric(reduced_constraint(spec, n), alpha));
}

double distributed_ls_rate(double ell_star, double lambda2, double lambdaN, double rho,
                           double h_max_sq, double epsilon) {
  require_epsilon(epsilon);
  if (!(ell_star > 0.0)) {
    throw AssumptionError("(A4)", "distributed_ls_rate: ell_star must be positive");
  }
  if (!(rho > 0.0) || !(lambda2 > 0.0) || !(lambdaN >= lambda2) || h_max_sq < 0.0) {
    throw Error("distributed_ls_rate: invalid constants");
  }
  const double coupled = lambdaN + rho * h_max_sq;
  return epsilon * 0.75 * (lambdaN * lambda2 * lambda2 / (lambdaN + 1.0)) * ell_star /
         (lambdaN * lambdaN + 0.75 * lambdaN * lambda2 * lambda2 + coupled * coupled);
}

MetricCertificate distributed_ls_certificate(double ell_star, const LaplacianSpectrum& spec,
                                             std::size_t n, double rho, double h_max_sq,
                                             double epsilon) {
  const double lambda2 = spec.lambda2();
  const double lambdaN = spec.lambdaN();
  const double c = distributed_ls_rate(ell_star, lambda2, lambdaN, rho, h_max_sq, epsilon);
  const double coupled = lambdaN + rho * h_max_sq;
  const double alpha =
      epsilon * ell_star /
      (lambdaN * lambdaN + 0.75 * lambdaN * lambda2 * lambda2 + coupled * coupled);
  return finish_certificate(CertificateKind::distributed, epsilon, alpha, c,
                            block_metric(reduced_constraint(spec, n), alpha));
}

MetricCertificate tv_distributed_certificate(const std::vector<double>& ell_inf,
                                             const std::vector<double>& ell_sup,
                                             const LaplacianSpectrum& spec, std::size_t n,
                                             double epsilon) {
  MetricCertificate cert = distributed_certificate(ell_inf, ell_sup, spec, n, epsilon);
  cert.kind = CertificateKind::tv_distributed;
  // The time-varying statement certifies the slower rate without the
  // lambda_N factor in the numerator.
  cert.c = cert.alpha * 0.75 * spec.lambda2() * spec.lambda2() / (spec.lambdaN() + 1.0);
  return cert;
}

double tv_tracking_rho(double ell_inf, double ell_sup, double sigma_min, double sigma_max,
                       double beta1, double beta2, double lambda_max_P) {
  if (!(ell_inf > 0.0) || !(ell_sup > 0.0) || !(sigma_min > 0.0) || !(sigma_max > 0.0) ||
      !(lambda_max_P > 0.0)) {
    throw Error("tv_tracking_rho: constants must be positive");
  }
  if (beta1 < 0.0 || beta2 < 0.0) throw Error("tv_tracking_rho: beta bounds must be >= 0");
  const double dual_rate =
      (ell_sup / (sigma_min * sigma_min)) * (beta1 + (sigma_max / ell_inf) * beta2);
  return lambda_max_P * (beta2 / ell_inf + (sigma_max / ell_inf + 1.0) * dual_rate);
}

double tv_distributed_tracking_rho(const std::vector<double>& beta1,
                                   const std::vector<double>& ell_inf,
                                   const std::vector<double>& ell_sup, double lambda2,
                                   std::size_t node_count, double lambda_max_P) {
  if (beta1.size() != ell_inf.size() || beta1.size() != ell_sup.size() || beta1.empty()) {
    throw DimensionError("tv_distributed_tracking_rho: constant vectors disagree");
  }
  if (!(lambda2 > 0.0) || !(lambda_max_P > 0.0)) {
    throw Error("tv_distributed_tracking_rho: constants must be positive");
  }
  double beta_l1 = 0.0;
  double inf_l1 = 0.0;
  double sup_max = 0.0;
  for (std::size_t i = 0; i < beta1.size(); ++i) {
    if (beta1[i] < 0.0) throw Error("tv_distributed_tracking_rho: beta bounds must be >= 0");
    beta_l1 += beta1[i];
    inf_l1 += ell_inf[i];
    sup_max = std::max(sup_max, ell_sup[i]);
  }
  if (!(inf_l1 > 0.0)) throw Error("tv_distributed_tracking_rho: ell_inf must sum positive");
  return lambda_max_P * (beta_l1 / inf_l1) * static_cast<double>(node_count) +
         lambda_max_P * (beta_l1 / lambda2) * (sup_max / inf_l1 + 1.0);
}

double TrackingBound::operator()(double t) const {
  if (t < 0.0) throw Error("TrackingBound: t >= 0 required");
  const double floor = rho / c;
  return (delta0 - floor) * std::exp(-c * t) + floor;
}

double sampled_measure_check(const VectorField& field, const Matrix& P,
                             const std::vector<MeasureSample>& samples, const Matrix* projector) {
  if (samples.empty()) throw Error("sampled_measure_check: at least one sample required");
  const WeightedMetric metric(P);
  const Matrix* V = projector;
  Matrix Vt;
  if (V) Vt = transpose(*V);
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& sample : samples) {
    Matrix J = field.jacobian_at(sample.state, sample.t);
    if (V) J = (*V) * J * Vt;
    worst = std::max(worst, metric.measure(J));
  }
  return worst;
}

double integral_contractivity_check(const VectorField& field, const Matrix& P, double rate,
                                    const std::vector<StatePair>& pairs) {
  if (pairs.empty()) throw Error("integral_contractivity_check: at least one pair required");
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& pair : pairs) {
    const Vector fa = field(pair.a, pair.t);
    const Vector fb = field(pair.b, pair.t);
    const Vector diff = pair.a - pair.b;
    const Vector pdiff = P * diff;
    const double lhs = dot(pdiff, fa - fb);
    const double quad = dot(pdiff, diff);
    worst = std::max(worst, lhs + rate * quad);
  }
  return worst;
}

double fitted_decay_rate(const Vector& times, const Vector& distances, double start_fraction,
                         double floor) {
  if (times.size() != distances.size() || times.size() < 2) {
    throw DimensionError("fitted_decay_rate: need matching series with >= 2 points");
  }
  const double t_start = start_fraction * times.back();
  double sum_t = 0.0, sum_y = 0.0, sum_tt = 0.0, sum_ty = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < t_start) continue;
    if (distances[i] < floor) break;  // truncate before log underflow
    const double y = -std::log(distances[i]);
    sum_t += times[i];
    sum_y += y;
    sum_tt += times[i] * times[i];
    sum_ty += times[i] * y;
    ++count;
  }
  if (count < 2) throw Error("fitted_decay_rate: fit window has fewer than two points");
  const double denom = static_cast<double>(count) * sum_tt - sum_t * sum_t;
  if (denom <= 0.0) throw Error("fitted_decay_rate: degenerate fit window");
  return (static_cast<double>(count) * sum_ty - sum_t * sum_y) / denom;
}

double empirical_rate(const VectorField& field, const Matrix& P,
                      const std::vector<std::pair<Vector, Vector>>& initial_pairs,
                      const IntegratorConfig& cfg) {
  if (initial_pairs.size() < 2) throw Error("empirical_rate: at least two trajectory pairs required");
  const WeightedMetric metric(P);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& [za, zb] : initial_pairs) {
    if (norm2(za - zb) == 0.0) {
      throw Error("empirical_rate: degenerate pair (identical initial conditions)");
    }
    const Trajectory ta = integrate(field, za, cfg);
    const Trajectory tb = integrate(field, zb, cfg);
    Vector distances(ta.times.size());
    for (std::size_t i = 0; i < ta.times.size(); ++i) {
      distances[i] = metric.norm(ta.states[i] - tb.states[i]);
    }
    if (distances.back() > 0.1 * distances.front()) {
      throw Error("empirical_rate: horizon too short, d(T)/d(0) > 0.1");
    }
    best = std::min(best, fitted_decay_rate(ta.times, distances));
  }
  return best;
}

double empirical_rate_seeded(const VectorField& field, const Matrix& P, std::uint64_t seed,
                             std::size_t pair_count, const IntegratorConfig& cfg, double box) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-box, box);
  std::vector<std::pair<Vector, Vector>> pairs;
  pairs.reserve(pair_count);
  for (std::size_t p = 0; p < pair_count; ++p) {
    Vector a(field.dimension), b(field.dimension);
    for (double& v : a) v = unit(rng);
    for (double& v : b) v = unit(rng);
    pairs.emplace_back(std::move(a), std::move(b));
  }
  return empirical_rate(field, P, pairs, cfg);
}

Vector projected_dual_offset(const LaplacianSpectrum& spec, std::size_t n,
                             const Vector& grad_at_consensus) {
  const std::size_t N = spec.node_count();
  if (grad_at_consensus.size() != N * n) {
    throw DimensionError("projected_dual_offset: gradient stack dimension mismatch");
  }
  Vector y((N - 1) * n, 0.0);
  for (std::size_t r = 0; r + 1 < N; ++r) {
    const double lam = spec.eigenvalues[r + 1];
    for (std::size_t j = 0; j < N; ++j) {
      const double w = spec.R(r, j);
      if (w == 0.0) continue;
      for (std::size_t d = 0; d < n; ++d) {
        y[r * n + d] -= w * grad_at_consensus[j * n + d] / lam;
      }
    }
  }
  return y;
}

Vector projected_error(const LaplacianSpectrum& spec, std::size_t n, const Vector& state,
                       const Vector& consensus_point, const Vector& dual_offset) {
  const std::size_t N = spec.node_count();
  if (state.size() != 2 * N * n || consensus_point.size() != n ||
      dual_offset.size() != (N - 1) * n) {
    throw DimensionError("projected_error: dimension mismatch");
  }
  Vector err((2 * N - 1) * n, 0.0);
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t d = 0; d < n; ++d) {
      err[i * n + d] = state[i * n + d] - consensus_point[d];
    }
  for (std::size_t r = 0; r + 1 < N; ++r) {
    for (std::size_t d = 0; d < n; ++d) {
      double s = -dual_offset[r * n + d];
      for (std::size_t j = 0; j < N; ++j) {
        const double w = spec.R(r, j);
        if (w != 0.0) s += w * state[N * n + j * n + d];
      }
      err[N * n + r * n + d] = s;
    }
  }
  return err;
}

}  // namespace pdc
