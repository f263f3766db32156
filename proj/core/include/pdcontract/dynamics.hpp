#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "pdcontract/graphs.hpp"
#include "pdcontract/linalg.hpp"
#include "pdcontract/problems.hpp"

namespace pdc {

/// A vector field dz/dt = F(z, t) with an optional analytic Jacobian.
/// Fields are immutable once built and safe to evaluate concurrently.
struct VectorField {
  std::size_t dimension = 0;
  std::string name;
  std::function<void(const Vector& z, double t, Vector& dz)> rhs;
  std::function<Matrix(const Vector& z, double t)> jacobian;  // may be empty

  Vector operator()(const Vector& z, double t) const;
  /// Analytic Jacobian when available, otherwise central finite differences.
  Matrix jacobian_at(const Vector& z, double t) const;
};

/// Central finite-difference Jacobian, step 1e-6 * (1 + ||z||).
Matrix finite_difference_jacobian(const VectorField& field, const Vector& z, double t);

struct IntegratorConfig {
  double step = 0.0;
  double horizon = 0.0;
  double blowup_guard = 1e9;

  IntegratorConfig(double h, double T, double guard = 1e9);
  std::size_t step_count() const;
};

/// Uniform-grid record of an integrated trajectory.
struct Trajectory {
  double step = 0.0;
  std::string field_name;
  Vector times;
  std::vector<Vector> states;

  std::size_t dimension() const { return states.empty() ? 0 : states.front().size(); }
};

/// Thrown when the state norm trips the blow-up guard; carries everything
/// integrated so far so callers can keep the partial record.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& message, Trajectory partial)
      : Error(message), partial_(std::move(partial)) {}
  const Trajectory& partial() const { return partial_; }

 private:
  Trajectory partial_;
};

/// dx = -grad f(x) - A^T nu,  dnu = A x - b.
VectorField pd_field(const ConstrainedProblem& p);

/// dx = -grad f(x) - A^T nu - rho A^T A x + rho A^T b,  dnu = A x - b.
/// Same equilibria as pd_field for every rho > 0.
VectorField augmented_pd_field(const ConstrainedProblem& p, double rho);

/// Stacked consensus dynamics over a connected graph:
/// dx = -grad f(x) - (L kron I_n) nu,  dnu = (L kron I_n) x.
VectorField distributed_pd_field(std::vector<SmoothObjective> objectives,
                                 const LaplacianSpectrum& spec, std::size_t n);

/// Least-squares consensus dynamics with Laplacian augmentation gain rho:
/// dx = -grad f(x) - rho (L kron I_n) x - (L kron I_n) nu,  dnu = (L kron I_n) x,
/// where f sums the per-node residual objectives.
VectorField distributed_ls_field(const LeastSquaresInstance& ls, const LaplacianSpectrum& spec,
                                 double rho);

/// dx = -grad f(x, t) - A^T nu,  dnu = A x - b(t).
VectorField tv_pd_field(const TimeVaryingProblem& p);

/// Time-varying consensus dynamics (constraint graph fixed).
VectorField tv_distributed_pd_field(const TVDistributedProblem& p, const LaplacianSpectrum& spec);

/// Classical fixed-step fourth-order Runge-Kutta. Deterministic: the grid,
/// stage order and accumulation order never vary between runs.
Trajectory integrate(const VectorField& field, Vector z0, const IntegratorConfig& cfg);

/// Header "t,z_0,...,z_{m-1}", one row per grid point, %.17g formatting.
void write_trajectory_csv(const Trajectory& traj, std::ostream& out);

/// Default step rule: h * (ell_sup + sigma_max^2 + 1) = 0.1.
double default_step(double ell_sup, double sigma_max);

/// (1^T kron I_n) nu for a stacked distributed state (x, nu) of size 2nN:
/// the conserved dual sum.
Vector dual_sum(const Vector& state, std::size_t node_count, std::size_t n);

}  // namespace pdc
