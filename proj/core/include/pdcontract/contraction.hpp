#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pdcontract/dynamics.hpp"
#include "pdcontract/graphs.hpp"
#include "pdcontract/linalg.hpp"
#include "pdcontract/problems.hpp"

namespace pdc {

enum class CertificateKind { standard, augmented, distributed, tv_distributed };

std::string to_string(CertificateKind kind);

/// A weighted-metric contraction certificate: the flow contracts at rate c
/// in the norm ||.||_{2,P^{1/2}}. For the standard and augmented kinds P has
/// the block form [[I_n, alpha A^T], [alpha A, I_k]], positive definite
/// exactly when alpha * sigma_max(A) < 1; the distributed kinds use the
/// reduced constraint (Lambda R) kron I_n in place of A.
struct MetricCertificate {
  CertificateKind kind = CertificateKind::standard;
  double epsilon = 0.0;
  double alpha = 0.0;
  double c = 0.0;
  Matrix P;
  double lambda_max_P = 0.0;
  double lambda_min_P = 0.0;
};

/// alpha_eps = eps * ell_inf / (sigma_max^2 + (3/4) sigma_max sigma_min^2 + ell_sup^2).
/// Always below 1/sigma_max, so the block metric stays positive definite.
double alpha_eps(double ell_inf, double ell_sup, double sigma_min, double sigma_max,
                 double epsilon);

/// Certificate for the standard primal-dual flow of a strongly convex
/// problem; rate c = alpha_eps * (3/4) sigma_max sigma_min^2 / (sigma_max + 1).
MetricCertificate standard_certificate(const ConstrainedProblem& p, double epsilon);

/// Same certificate built from a time-varying problem's uniform constants.
MetricCertificate standard_certificate(const TimeVaryingProblem& p, double epsilon);

/// Certificate for the augmented flow with gain rho; valid for merely
/// convex objectives as long as ker(hess f) and ker(A) only share zero
/// (spot-checked by sampling).
MetricCertificate augmented_certificate(const ConstrainedProblem& p, double rho, double epsilon);

/// Consensus rate
/// (3 eps / 4) * (lambda_N lambda_2^2 / (lambda_N + 1))
///             * min_i ell_inf,i / (lambda_N^2 + (3/4) lambda_N lambda_2^2 + max_i ell_sup,i^2).
double distributed_rate(const std::vector<double>& ell_inf, const std::vector<double>& ell_sup,
                        double lambda2, double lambdaN, double epsilon);

MetricCertificate distributed_certificate(const std::vector<double>& ell_inf,
                                          const std::vector<double>& ell_sup,
                                          const LaplacianSpectrum& spec, std::size_t n,
                                          double epsilon);

/// Least-squares consensus rate
/// eps * (3/4) * (lambda_N lambda_2^2 / (lambda_N + 1))
///     * ell_star / (lambda_N^2 + (3/4) lambda_N lambda_2^2 + (lambda_N + rho h_max_sq)^2).
double distributed_ls_rate(double ell_star, double lambda2, double lambdaN, double rho,
                           double h_max_sq, double epsilon);

MetricCertificate distributed_ls_certificate(double ell_star, const LaplacianSpectrum& spec,
                                             std::size_t n, double rho, double h_max_sq,
                                             double epsilon);

/// Same metric as the distributed certificate but the slower time-varying
/// rate c = alpha * (3/4) lambda_2^2 / (lambda_N + 1).
MetricCertificate tv_distributed_certificate(const std::vector<double>& ell_inf,
                                             const std::vector<double>& ell_sup,
                                             const LaplacianSpectrum& spec, std::size_t n,
                                             double epsilon);

/// Tracking-bound numerator for the time-varying standard flow.
double tv_tracking_rho(double ell_inf, double ell_sup, double sigma_min, double sigma_max,
                       double beta1, double beta2, double lambda_max_P);

/// Tracking-bound numerator for the time-varying consensus flow.
double tv_distributed_tracking_rho(const std::vector<double>& beta1,
                                   const std::vector<double>& ell_inf,
                                   const std::vector<double>& ell_sup, double lambda2,
                                   std::size_t node_count, double lambda_max_P);

/// bound(t) = (delta0 - rho/c) e^{-c t} + rho/c.
struct TrackingBound {
  double delta0 = 0.0;
  double rho = 0.0;
  double c = 0.0;

  double operator()(double t) const;
  double ultimate() const { return rho / c; }
};

struct MeasureSample {
  Vector state;
  double t = 0.0;
};

/// Max over samples of the weighted measure of the Jacobian (projected as
/// V J V^T when a projector is given). Diagnostic: the caller compares the
/// result against -c.
double sampled_measure_check(const VectorField& field, const Matrix& P,
                             const std::vector<MeasureSample>& samples,
                             const Matrix* projector = nullptr);

struct StatePair {
  Vector a;
  Vector b;
  double t = 0.0;
};

/// Worst pairwise slack of the one-sided inequality
/// (x - y)^T P (F(x,t) - F(y,t)) <= -c ||x - y||^2_{2,P^{1/2}};
/// nonpositive (up to rounding) when the certificate is valid. An inflated
/// rate yields a positive slack, reported rather than thrown.
double integral_contractivity_check(const VectorField& field, const Matrix& P, double rate,
                                    const std::vector<StatePair>& pairs);

/// Least-squares slope of -log d(t) over the fit window
/// [start_fraction * T, first time d < floor].
double fitted_decay_rate(const Vector& times, const Vector& distances,
                         double start_fraction = 0.1, double floor = 1e-12);

/// Integrates each pair of initial conditions, measures their weighted
/// distance on the grid, fits the decay per pair and returns the minimum
/// fitted rate. Requires >= 2 pairs, distinct initial conditions, and a
/// horizon long enough that d(T)/d(0) <= 0.1.
double empirical_rate(const VectorField& field, const Matrix& P,
                      const std::vector<std::pair<Vector, Vector>>& initial_pairs,
                      const IntegratorConfig& cfg);

/// Seeded convenience wrapper: draws `pair_count` initial pairs uniformly
/// from [-box, box]^dim.
double empirical_rate_seeded(const VectorField& field, const Matrix& P, std::uint64_t seed,
                             std::size_t pair_count, const IntegratorConfig& cfg,
                             double box = 1.0);

// ---- consensus projection helpers (partial-contraction coordinates) ----

/// The projected dual offset y* = -(Lambda^{-1} R kron I_n) grad f(x*),
/// the unique value of (R kron I_n) nu over the equilibrium set.
Vector projected_dual_offset(const LaplacianSpectrum& spec, std::size_t n,
                             const Vector& grad_at_consensus);

/// V (z - z*) for a stacked state z = (x, nu): the pair
/// (x - 1_N kron v,  (R kron I_n) nu - y*).
Vector projected_error(const LaplacianSpectrum& spec, std::size_t n, const Vector& state,
                       const Vector& consensus_point, const Vector& dual_offset);

}  // namespace pdc
