#include "pdcontract/dynamics.hpp"

#include <cmath>
#include <cstdio>
#include <memory>
#include <ostream>

namespace pdc {

Vector VectorField::operator()(const Vector& z, double t) const {
  Vector dz(dimension, 0.0);
  rhs(z, t, dz);
  return dz;
}

Matrix VectorField::jacobian_at(const Vector& z, double t) const {
  if (jacobian) return jacobian(z, t);
  return finite_difference_jacobian(*this, z, t);
}

Matrix finite_difference_jacobian(const VectorField& field, const Vector& z, double t) {
  const std::size_t m = field.dimension;
  if (z.size() != m) throw DimensionError("finite_difference_jacobian: state dimension mismatch");
  const double h = 1e-6 * (1.0 + norm2(z));
  Matrix jac(m, m);
  Vector zp = z;
  Vector fp(m), fm(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double orig = zp[j];
    zp[j] = orig + h;
    field.rhs(zp, t, fp);
    zp[j] = orig - h;
    field.rhs(zp, t, fm);
    zp[j] = orig;
    for (std::size_t i = 0; i < m; ++i) jac(i, j) = (fp[i] - fm[i]) / (2.0 * h);
  }
  return jac;
}

IntegratorConfig::IntegratorConfig(double h, double T, double guard)
    : step(h), horizon(T), blowup_guard(guard) {
  if (!(h > 0.0) || !(T > 0.0) || h > T) throw Error("IntegratorConfig: need 0 < h <= T");
  if (!(guard > 0.0)) throw Error("IntegratorConfig: blow-up guard must be positive");
  const double ratio = T / h;
  if (std::abs(ratio - std::round(ratio)) > 1e-6 * ratio + 1e-9) {
    throw Error("IntegratorConfig: horizon must be an integer number of steps");
  }
}

std::size_t IntegratorConfig::step_count() const {
  return static_cast<std::size_t>(std::llround(horizon / step));
}

namespace {

// Shared helpers for the stacked distributed fields.

void laplacian_apply(const Matrix& L, const Vector& blocks, std::size_t n, Vector& out,
                     std::size_t out_offset) {
  const std::size_t N = L.rows();
  for (std::size_t i = 0; i < N; ++i) {
    for (std::size_t d = 0; d < n; ++d) out[out_offset + i * n + d] = 0.0;
    for (std::size_t j = 0; j < N; ++j) {
      const double lij = L(i, j);
      if (lij == 0.0) continue;
      for (std::size_t d = 0; d < n; ++d) out[out_offset + i * n + d] += lij * blocks[j * n + d];
    }
  }
}

void check_dim(const Vector& z, std::size_t dim, const char* name) {
  if (z.size() != dim) throw DimensionError(std::string(name) + ": state dimension mismatch");
}

}  // namespace

VectorField pd_field(const ConstrainedProblem& p) {
  const std::size_t n = p.objective.dimension;
  const std::size_t k = p.constraint.rows();
  const Matrix A = p.constraint.A();
  const Matrix At = transpose(A);
  const Vector b = p.constraint.b();
  const auto grad = p.objective.gradient;
  const auto hess = p.objective.hessian;

  VectorField f;
  f.dimension = n + k;
  f.name = "pd";
  f.rhs = [n, k, A, At, b, grad](const Vector& z, double, Vector& dz) {
    check_dim(z, n + k, "pd_field");
    dz.assign(n + k, 0.0);
    const Vector x(z.begin(), z.begin() + n);
    const Vector g = grad(x);
    for (std::size_t i = 0; i < n; ++i) {
      double s = -g[i];
      for (std::size_t r = 0; r < k; ++r) s -= At(i, r) * z[n + r];
      dz[i] = s;
    }
    for (std::size_t r = 0; r < k; ++r) {
      double s = -b[r];
      for (std::size_t j = 0; j < n; ++j) s += A(r, j) * z[j];
      dz[n + r] = s;
    }
  };
  f.jacobian = [n, k, A, hess](const Vector& z, double) {
    const Vector x(z.begin(), z.begin() + n);
    const Matrix H = hess(x);
    Matrix J(n + k, n + k);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) J(i, j) = -H(i, j);
    for (std::size_t r = 0; r < k; ++r)
      for (std::size_t j = 0; j < n; ++j) {
        J(j, n + r) = -A(r, j);
        J(n + r, j) = A(r, j);
      }
    return J;
  };
  return f;
}

VectorField augmented_pd_field(const ConstrainedProblem& p, double rho) {
  if (!(rho > 0.0)) throw Error("augmented_pd_field: rho > 0 required");
  const std::size_t n = p.objective.dimension;
  const std::size_t k = p.constraint.rows();
  const Matrix A = p.constraint.A();
  const Matrix AtA = transpose(A) * A;
  const Matrix At = transpose(A);
  const Vector Atb = At * p.constraint.b();
  const Vector b = p.constraint.b();
  const auto grad = p.objective.gradient;
  const auto hess = p.objective.hessian;

  VectorField f;
  f.dimension = n + k;
  f.name = "pd-aug";
  f.rhs = [n, k, A, At, AtA, Atb, b, grad, rho](const Vector& z, double, Vector& dz) {
    check_dim(z, n + k, "augmented_pd_field");
    dz.assign(n + k, 0.0);
    const Vector x(z.begin(), z.begin() + n);
    const Vector g = grad(x);
    for (std::size_t i = 0; i < n; ++i) {
      double s = -g[i] + rho * Atb[i];
      for (std::size_t r = 0; r < k; ++r) s -= At(i, r) * z[n + r];
      for (std::size_t j = 0; j < n; ++j) s -= rho * AtA(i, j) * z[j];
      dz[i] = s;
    }
    for (std::size_t r = 0; r < k; ++r) {
      double s = -b[r];
      for (std::size_t j = 0; j < n; ++j) s += A(r, j) * z[j];
      dz[n + r] = s;
    }
  };
  f.jacobian = [n, k, A, AtA, hess, rho](const Vector& z, double) {
    const Vector x(z.begin(), z.begin() + n);
    const Matrix H = hess(x);
    Matrix J(n + k, n + k);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) J(i, j) = -H(i, j) - rho * AtA(i, j);
    for (std::size_t r = 0; r < k; ++r)
      for (std::size_t j = 0; j < n; ++j) {
        J(j, n + r) = -A(r, j);
        J(n + r, j) = A(r, j);
      }
    return J;
  };
  return f;
}

VectorField distributed_pd_field(std::vector<SmoothObjective> objectives,
                                 const LaplacianSpectrum& spec, std::size_t n) {
  const std::size_t N = spec.node_count();
  if (N < 2) throw Error("distributed_pd_field: at least two nodes required");
  if (objectives.size() != N) throw DimensionError("distributed_pd_field: one objective per node required");
  for (const auto& f : objectives) {
    f.validate();
    if (f.dimension != n) throw DimensionError("distributed_pd_field: node dimension mismatch");
  }
  const Matrix L = spec.L;

  VectorField f;
  f.dimension = 2 * n * N;
  f.name = "pd-distributed";
  auto objs = std::make_shared<std::vector<SmoothObjective>>(std::move(objectives));
  f.rhs = [objs, L, n, N](const Vector& z, double, Vector& dz) {
    check_dim(z, 2 * n * N, "distributed_pd_field");
    dz.assign(2 * n * N, 0.0);
    const Vector x(z.begin(), z.begin() + n * N);
    const Vector nu(z.begin() + n * N, z.end());
    laplacian_apply(L, nu, n, dz, 0);            // (L kron I) nu into dx slot
    laplacian_apply(L, x, n, dz, n * N);         // (L kron I) x into dnu slot
    for (std::size_t i = 0; i < N; ++i) {
      const Vector xi(x.begin() + i * n, x.begin() + (i + 1) * n);
      const Vector gi = (*objs)[i].gradient(xi);
      for (std::size_t d = 0; d < n; ++d) dz[i * n + d] = -gi[d] - dz[i * n + d];
    }
  };
  f.jacobian = [objs, L, n, N](const Vector& z, double) {
    const std::size_t half = n * N;
    Matrix J(2 * half, 2 * half);
    for (std::size_t i = 0; i < N; ++i) {
      const Vector xi(z.begin() + i * n, z.begin() + (i + 1) * n);
      const Matrix Hi = (*objs)[i].hessian(xi);
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) J(i * n + a, i * n + b) = -Hi(a, b);
    }
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < N; ++j) {
        const double lij = L(i, j);
        if (lij == 0.0) continue;
        for (std::size_t d = 0; d < n; ++d) {
          J(i * n + d, half + j * n + d) = -lij;
          J(half + i * n + d, j * n + d) = lij;
        }
      }
    return J;
  };
  return f;
}

VectorField distributed_ls_field(const LeastSquaresInstance& ls, const LaplacianSpectrum& spec,
                                 double rho) {
  if (!(rho > 0.0)) throw Error("distributed_ls_field: rho > 0 required");
  const std::size_t N = spec.node_count();
  if (ls.sample_count() != N) {
    throw DimensionError("distributed_ls_field: one data row per node required");
  }
  const std::size_t n = ls.dimension();
  const Matrix L = spec.L;
  std::vector<Vector> rows(N);
  for (std::size_t i = 0; i < N; ++i) rows[i] = ls.row(i);
  const Vector z_data = ls.z();

  VectorField f;
  f.dimension = 2 * n * N;
  f.name = "pd-distributed-ls";
  f.rhs = [rows, z_data, L, n, N, rho](const Vector& z, double, Vector& dz) {
    check_dim(z, 2 * n * N, "distributed_ls_field");
    dz.assign(2 * n * N, 0.0);
    const Vector x(z.begin(), z.begin() + n * N);
    const Vector nu(z.begin() + n * N, z.end());
    Vector lx(n * N, 0.0);
    laplacian_apply(L, x, n, lx, 0);
    laplacian_apply(L, nu, n, dz, 0);
    for (std::size_t i = 0; i < N; ++i) {
      double resid = -z_data[i];
      for (std::size_t d = 0; d < n; ++d) resid += rows[i][d] * x[i * n + d];
      for (std::size_t d = 0; d < n; ++d) {
        dz[i * n + d] = -resid * rows[i][d] - rho * lx[i * n + d] - dz[i * n + d];
        dz[n * N + i * n + d] = lx[i * n + d];
      }
    }
  };
  f.jacobian = [rows, L, n, N, rho](const Vector&, double) {
    const std::size_t half = n * N;
    Matrix J(2 * half, 2 * half);
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) J(i * n + a, i * n + b) = -rows[i][a] * rows[i][b];
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < N; ++j) {
        const double lij = L(i, j);
        if (lij == 0.0) continue;
        for (std::size_t d = 0; d < n; ++d) {
          J(i * n + d, j * n + d) -= rho * lij;
          J(i * n + d, half + j * n + d) = -lij;
          J(half + i * n + d, j * n + d) = lij;
        }
      }
    return J;
  };
  return f;
}

VectorField tv_pd_field(const TimeVaryingProblem& p) {
  p.validate();
  const std::size_t n = p.dimension;
  const std::size_t k = p.constraint_rows();
  const Matrix A = p.A;
  const Matrix At = transpose(A);
  const auto grad = p.gradient;
  const auto hess = p.hessian;
  const auto b = p.b;

  VectorField f;
  f.dimension = n + k;
  f.name = "pd-tv";
  f.rhs = [n, k, A, At, grad, b](const Vector& z, double t, Vector& dz) {
    check_dim(z, n + k, "tv_pd_field");
    dz.assign(n + k, 0.0);
    const Vector x(z.begin(), z.begin() + n);
    const Vector g = grad(x, t);
    const Vector bt = b(t);
    for (std::size_t i = 0; i < n; ++i) {
      double s = -g[i];
      for (std::size_t r = 0; r < k; ++r) s -= At(i, r) * z[n + r];
      dz[i] = s;
    }
    for (std::size_t r = 0; r < k; ++r) {
      double s = -bt[r];
      for (std::size_t j = 0; j < n; ++j) s += A(r, j) * z[j];
      dz[n + r] = s;
    }
  };
  f.jacobian = [n, k, A, hess](const Vector& z, double t) {
    const Vector x(z.begin(), z.begin() + n);
    const Matrix H = hess(x, t);
    Matrix J(n + k, n + k);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) J(i, j) = -H(i, j);
    for (std::size_t r = 0; r < k; ++r)
      for (std::size_t j = 0; j < n; ++j) {
        J(j, n + r) = -A(r, j);
        J(n + r, j) = A(r, j);
      }
    return J;
  };
  return f;
}

VectorField tv_distributed_pd_field(const TVDistributedProblem& p, const LaplacianSpectrum& spec) {
  p.validate();
  const std::size_t N = spec.node_count();
  if (p.nodes.size() != N) {
    throw DimensionError("tv_distributed_pd_field: one node objective per graph node required");
  }
  const std::size_t n = p.dimension;
  const Matrix L = spec.L;
  auto nodes = std::make_shared<std::vector<TVNodeObjective>>(p.nodes);

  VectorField f;
  f.dimension = 2 * n * N;
  f.name = "pd-distributed-tv";
  f.rhs = [nodes, L, n, N](const Vector& z, double t, Vector& dz) {
    check_dim(z, 2 * n * N, "tv_distributed_pd_field");
    dz.assign(2 * n * N, 0.0);
    const Vector x(z.begin(), z.begin() + n * N);
    const Vector nu(z.begin() + n * N, z.end());
    laplacian_apply(L, nu, n, dz, 0);
    laplacian_apply(L, x, n, dz, n * N);
    for (std::size_t i = 0; i < N; ++i) {
      const Vector xi(x.begin() + i * n, x.begin() + (i + 1) * n);
      const Vector gi = (*nodes)[i].gradient(xi, t);
      for (std::size_t d = 0; d < n; ++d) dz[i * n + d] = -gi[d] - dz[i * n + d];
    }
  };
  f.jacobian = [nodes, L, n, N](const Vector& z, double t) {
    const std::size_t half = n * N;
    Matrix J(2 * half, 2 * half);
    for (std::size_t i = 0; i < N; ++i) {
      const Vector xi(z.begin() + i * n, z.begin() + (i + 1) * n);
      const Matrix Hi = (*nodes)[i].hessian(xi, t);
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) J(i * n + a, i * n + b) = -Hi(a, b);
    }
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < N; ++j) {
        const double lij = L(i, j);
        if (lij == 0.0) continue;
        for (std::size_t d = 0; d < n; ++d) {
          J(i * n + d, half + j * n + d) = -lij;
          J(half + i * n + d, j * n + d) = lij;
        }
      }
    return J;
  };
  return f;
}

Trajectory integrate(const VectorField& field, Vector z0, const IntegratorConfig& cfg) {
  if (z0.size() != field.dimension) throw DimensionError("integrate: initial state dimension mismatch");
  require_finite(z0, "integrate");

  const std::size_t steps = cfg.step_count();
  const double h = cfg.step;

  Trajectory traj;
  traj.step = h;
  traj.field_name = field.name;
  traj.times.reserve(steps + 1);
  traj.states.reserve(steps + 1);
  traj.times.push_back(0.0);
  traj.states.push_back(z0);

  const std::size_t m = field.dimension;
  Vector k1(m), k2(m), k3(m), k4(m), work(m);
  Vector z = std::move(z0);

  for (std::size_t s = 0; s < steps; ++s) {
    const double t = static_cast<double>(s) * h;
    field.rhs(z, t, k1);
    for (std::size_t i = 0; i < m; ++i) work[i] = z[i] + 0.5 * h * k1[i];
    field.rhs(work, t + 0.5 * h, k2);
    for (std::size_t i = 0; i < m; ++i) work[i] = z[i] + 0.5 * h * k2[i];
    field.rhs(work, t + 0.5 * h, k3);
    for (std::size_t i = 0; i < m; ++i) work[i] = z[i] + h * k3[i];
    field.rhs(work, t + h, k4);
    for (std::size_t i = 0; i < m; ++i) {
      z[i] += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }

    double norm = 0.0;
    bool finite = true;
    for (double v : z) {
      if (!std::isfinite(v)) {
        finite = false;
        break;
      }
      norm += v * v;
    }
    if (!finite || std::sqrt(norm) > cfg.blowup_guard) {
      throw DivergenceError("integrate: state exceeded the blow-up guard", std::move(traj));
    }
    traj.times.push_back(static_cast<double>(s + 1) * h);
    traj.states.push_back(z);
  }
  return traj;
}

void write_trajectory_csv(const Trajectory& traj, std::ostream& out) {
  const std::size_t m = traj.dimension();
  out << "t";
  for (std::size_t i = 0; i < m; ++i) out << ",z_" << i;
  out << "\n";
  char buf[32];
  for (std::size_t row = 0; row < traj.times.size(); ++row) {
    std::snprintf(buf, sizeof(buf), "%.17g", traj.times[row]);
    out << buf;
    for (std::size_t i = 0; i < m; ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g", traj.states[row][i]);
      out << ',' << buf;
    }
    out << "\n";
  }
}

double default_step(double ell_sup, double sigma_max) {
  return 0.1 / (ell_sup + sigma_max * sigma_max + 1.0);
}

Vector dual_sum(const Vector& state, std::size_t node_count, std::size_t n) {
  if (state.size() != 2 * node_count * n) throw DimensionError("dual_sum: state dimension mismatch");
  Vector out(n, 0.0);
  for (std::size_t i = 0; i < node_count; ++i)
    for (std::size_t d = 0; d < n; ++d) out[d] += state[node_count * n + i * n + d];
  return out;
}

}  // namespace pdc
