#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <random>
#include <string>

#include "pdcontract/contraction.hpp"
#include "pdcontract/dynamics.hpp"
#include "pdcontract/graphs.hpp"
#include "pdcontract/problems.hpp"
#include "pdcontract/sampling.hpp"
#include "pdcontract/scenario.hpp"

namespace pdc {

namespace {

const char* kFmt = "%.17g";

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), kFmt, v);
  return buf;
}

IntegratorConfig make_config(double h, double horizon, double guard = 1e9) {
  if (!(h > 0.0) || !(horizon > 0.0)) throw Error("integration setup: need positive h and T");
  auto steps = static_cast<std::size_t>(std::ceil(horizon / h - 1e-9));
  steps = std::max<std::size_t>(steps, 1);
  return IntegratorConfig(h, static_cast<double>(steps) * h, guard);
}

Vector seeded_state(std::uint64_t seed, std::size_t dim, double box) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-box, box);
  Vector z(dim);
  for (double& v : z) v = unit(rng);
  return z;
}

Vector concat(const Vector& a, const Vector& b) {
  Vector out;
  out.reserve(a.size() + b.size());
  out.insert(out.end(), a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

// ---- per-kind setups ----

struct StandardSetup {
  QuadraticProblem problem;
  MetricCertificate cert;
  VectorField field;
  Vector zstar;
  double step;
};

StandardSetup standard_setup(const Scenario& s) {
  QuadraticProblem qp = load_quadratic_problem(s.problem_path);
  ConstrainedProblem cp = qp.as_problem();
  const bool augmented = s.kind == ScenarioKind::augmented;
  MetricCertificate cert = augmented ? augmented_certificate(cp, s.rho, s.epsilon)
                                     : standard_certificate(cp, s.epsilon);
  VectorField field = augmented ? augmented_pd_field(cp, s.rho) : pd_field(cp);
  auto [xstar, nustar] = kkt_solve(qp.objective, qp.constraint);
  const double sM = qp.constraint.sigma_max();
  const double stiffness =
      augmented ? qp.objective.ell_sup() + s.rho * sM * sM : qp.objective.ell_sup();
  const double h = s.step > 0.0 ? s.step : default_step(stiffness, sM);
  return {std::move(qp), std::move(cert), std::move(field), concat(xstar, nustar), h};
}

struct DistributedSetup {
  std::vector<SmoothObjective> objectives;
  LaplacianSpectrum spec;
  std::size_t n = 0;
  MetricCertificate cert;
  VectorField field;
  Vector vstar;        // consensus point
  Vector dual_offset;  // y* = (R kron I) nu*
  double step = 0.0;
  double ell_star_value = 0.0;  // distributed-ls only
  double h_max_sq = 0.0;        // distributed-ls only
};

Vector stacked_gradient(const std::vector<SmoothObjective>& objectives, const Vector& v) {
  Vector out;
  for (const auto& f : objectives) {
    const Vector g = f.gradient(v);
    out.insert(out.end(), g.begin(), g.end());
  }
  return out;
}

DistributedSetup distributed_setup(const Scenario& s) {
  DistributedSetup d;
  d.spec = spectral_factors(laplacian(load_graph(s.graph_path)));
  const std::size_t N = d.spec.node_count();

  if (s.kind == ScenarioKind::distributed) {
    std::vector<QuadraticObjective> nodes = load_node_objectives(s.problem_path);
    if (nodes.size() != N) {
      throw Error("scenario: node objective count does not match the graph");
    }
    d.n = nodes.front().dimension();
    std::vector<double> ell_inf, ell_sup;
    for (const auto& q : nodes) {
      d.objectives.push_back(q.as_smooth());
      ell_inf.push_back(q.ell_inf());
      ell_sup.push_back(q.ell_sup());
    }
    d.cert = distributed_certificate(ell_inf, ell_sup, d.spec, d.n, s.epsilon);
    d.field = distributed_pd_field(d.objectives, d.spec, d.n);
    d.vstar = distributed_optimum(d.objectives);
    const double sup_max = *std::max_element(ell_sup.begin(), ell_sup.end());
    d.step = s.step > 0.0 ? s.step : default_step(sup_max, d.spec.lambdaN());
  } else {
    LeastSquaresInstance ls = load_least_squares(s.problem_path);
    if (ls.sample_count() != N) {
      throw Error("scenario: least-squares rows do not match the graph");
    }
    d.n = ls.dimension();
    d.ell_star_value = ell_star(ls, d.spec.L, s.rho);
    d.h_max_sq = ls.max_row_norm_sq();
    d.cert = distributed_ls_certificate(d.ell_star_value, d.spec, d.n, s.rho, d.h_max_sq,
                                        s.epsilon);
    d.field = distributed_ls_field(ls, d.spec, s.rho);
    for (std::size_t i = 0; i < N; ++i) d.objectives.push_back(ls.node_objective(i));
    d.vstar = ls_solution(ls);
    d.step = s.step > 0.0 ? s.step
                          : default_step(d.h_max_sq + s.rho * d.spec.lambdaN(), d.spec.lambdaN());
  }
  d.dual_offset = projected_dual_offset(d.spec, d.n, stacked_gradient(d.objectives, d.vstar));
  return d;
}

Vector distributed_equilibrium_state(const DistributedSetup& d) {
  const std::size_t N = d.spec.node_count();
  Vector z(2 * N * d.n, 0.0);
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t a = 0; a < d.n; ++a) z[i * d.n + a] = d.vstar[a];
  // nu = (R^T kron I) y* satisfies grad f(x*) + (L kron I) nu = 0.
  for (std::size_t j = 0; j < N; ++j)
    for (std::size_t a = 0; a < d.n; ++a) {
      double v = 0.0;
      for (std::size_t r = 0; r + 1 < N; ++r) v += d.spec.R(r, j) * d.dual_offset[r * d.n + a];
      z[N * d.n + j * d.n + a] = v;
    }
  return z;
}

void base_constants(Report& r, const MetricCertificate& cert) {
  r.add("epsilon", cert.epsilon);
  r.add("alpha", cert.alpha);
  r.add("c", cert.c);
  r.add("lambda_max_P", cert.lambda_max_P);
  r.add("lambda_min_P", cert.lambda_min_P);
}

int prop1_suite(std::uint64_t seed, std::size_t n, std::size_t k, std::size_t count) {
  int pass = 0;
  for (std::size_t i = 0; i < count; ++i) {
    sampling::Rng rng(seed + i);
    const Matrix B = sampling::random_spd(rng, n, 0.5, 3.0);
    const Matrix A = sampling::random_full_row_rank(rng, k, n, 0.5, 2.0);
    if (is_hurwitz(sampling::saddle_matrix(B, A))) ++pass;
  }
  return pass;
}

// Tracking run shared by cmd_track and cmd_verify. Returns the worst
// violation value (measured - bound*(1+1e-6) - 10 h^4).
struct TrackResult {
  double max_violation = 0.0;
  double final_error = 0.0;
  double rho_track = 0.0;
  double delta0 = 0.0;
};

TrackResult run_tracking(const Scenario& s, Report& report, std::ostream* csv) {
  TrackResult result;
  if (s.kind == ScenarioKind::tv) {
    const TimeVaryingProblem p = load_tv_problem(s.problem_path);
    const MetricCertificate cert = standard_certificate(p, s.epsilon);
    const VectorField field = tv_pd_field(p);
    const double h = s.step > 0.0 ? s.step : default_step(p.ell_sup, p.sigma_max);
    const double T = s.horizon > 0.0 ? s.horizon : 100.0;
    const IntegratorConfig cfg = make_config(h, T);
    const WeightedMetric metric(cert.P);
    if (!p.frozen_quadratic) throw Error("track: TV problem has no frozen-quadratic oracle");

    auto frozen_state = [&](double t) {
      const QuadraticProblem qp = p.frozen_quadratic(t);
      auto [xs, ns] = kkt_solve(qp.objective, qp.constraint);
      return concat(xs, ns);
    };

    Vector z0 = s.start_at_equilibrium ? frozen_state(0.0)
                                       : seeded_state(s.seed, field.dimension, 2.0);
    const Trajectory traj = integrate(field, z0, cfg);

    result.rho_track = tv_tracking_rho(p.ell_inf, p.ell_sup, p.sigma_min, p.sigma_max, p.beta1,
                                       p.beta2, cert.lambda_max_P);
    result.delta0 = metric.norm(traj.states.front() - frozen_state(0.0));
    const TrackingBound bound{result.delta0, result.rho_track, cert.c};
    const double slack = 10.0 * std::pow(cfg.step, 4);

    if (csv) *csv << "t,weighted_error,bound,margin\n";
    double worst = -std::numeric_limits<double>::infinity();
    double measured_final = 0.0;
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
      const double t = traj.times[i];
      const double measured = metric.norm(traj.states[i] - frozen_state(t));
      const double allowed = bound(t) * (1.0 + 1e-6) + slack;
      worst = std::max(worst, measured - allowed);
      measured_final = measured;
      if (csv) {
        *csv << fmt(t) << ',' << fmt(measured) << ',' << fmt(bound(t)) << ','
             << fmt(allowed - measured) << "\n";
      }
    }
    result.max_violation = std::max(0.0, worst);
    result.final_error = measured_final;

    base_constants(report, cert);
    report.add("beta_1", p.beta1);
    report.add("beta_2", p.beta2);
    report.add("tracking_rho", result.rho_track);
    report.add("ultimate_bound", result.rho_track / cert.c);
    report.add("delta_0", result.delta0);
    report.add("h", cfg.step);
    report.add("T", cfg.horizon);
    report.check_le("max_bound_violation", worst, 0.0);
    return result;
  }

  // tv-distributed
  const TVDistributedProblem p = load_tv_distributed_problem(s.problem_path);
  const LaplacianSpectrum spec = spectral_factors(laplacian(load_graph(s.graph_path)));
  if (p.nodes.size() != spec.node_count()) {
    throw Error("scenario: TV node count does not match the graph");
  }
  const std::size_t n = p.dimension;
  const std::size_t N = spec.node_count();
  const auto ell_inf = p.ell_inf_vector();
  const auto ell_sup = p.ell_sup_vector();
  const auto beta1 = p.beta1_vector();
  const MetricCertificate cert = tv_distributed_certificate(ell_inf, ell_sup, spec, n, s.epsilon);
  const VectorField field = tv_distributed_pd_field(p, spec);
  const double sup_max = *std::max_element(ell_sup.begin(), ell_sup.end());
  const double h = s.step > 0.0 ? s.step : default_step(sup_max, spec.lambdaN());
  const double T = s.horizon > 0.0 ? s.horizon : 100.0;
  const IntegratorConfig cfg = make_config(h, T);
  const WeightedMetric metric(cert.P);

  auto node_grad_stack = [&](const Vector& v, double t) {
    Vector out;
    for (const auto& node : p.nodes) {
      const Vector g = node.gradient(v, t);
      out.insert(out.end(), g.begin(), g.end());
    }
    return out;
  };

  Vector xstar = tv_distributed_frozen_optimum(p, 0.0, Vector(n, 0.0));
  Vector z0;
  if (s.start_at_equilibrium) {
    const Vector y0 = projected_dual_offset(spec, n, node_grad_stack(xstar, 0.0));
    z0.assign(2 * N * n, 0.0);
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t a = 0; a < n; ++a) z0[i * n + a] = xstar[a];
    for (std::size_t j = 0; j < N; ++j)
      for (std::size_t a = 0; a < n; ++a) {
        double v = 0.0;
        for (std::size_t r = 0; r + 1 < N; ++r) v += spec.R(r, j) * y0[r * n + a];
        z0[N * n + j * n + a] = v;
      }
  } else {
    z0 = seeded_state(s.seed, field.dimension, 2.0);
  }
  const Trajectory traj = integrate(field, z0, cfg);

  result.rho_track =
      tv_distributed_tracking_rho(beta1, ell_inf, ell_sup, spec.lambda2(), N, cert.lambda_max_P);
  const double slack = 10.0 * std::pow(cfg.step, 4);

  if (csv) *csv << "t,weighted_error,bound,margin\n";
  double worst = -std::numeric_limits<double>::infinity();
  double measured_final = 0.0;
  double delta0 = 0.0;
  TrackingBound bound{0.0, result.rho_track, cert.c};
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const double t = traj.times[i];
    xstar = tv_distributed_frozen_optimum(p, t, xstar);
    const Vector ystar = projected_dual_offset(spec, n, node_grad_stack(xstar, t));
    const double measured = metric.norm(projected_error(spec, n, traj.states[i], xstar, ystar));
    if (i == 0) {
      delta0 = measured;
      bound.delta0 = measured;
    }
    const double allowed = bound(t) * (1.0 + 1e-6) + slack;
    worst = std::max(worst, measured - allowed);
    measured_final = measured;
    if (csv) {
      *csv << fmt(t) << ',' << fmt(measured) << ',' << fmt(bound(t)) << ','
           << fmt(allowed - measured) << "\n";
    }
  }
  result.max_violation = std::max(0.0, worst);
  result.final_error = measured_final;
  result.delta0 = delta0;

  base_constants(report, cert);
  report.add("lambda_2", spec.lambda2());
  report.add("lambda_N", spec.lambdaN());
  report.add("tracking_rho", result.rho_track);
  report.add("ultimate_bound", result.rho_track / cert.c);
  report.add("delta_0", delta0);
  report.add("h", cfg.step);
  report.add("T", cfg.horizon);
  report.check_le("max_bound_violation", worst, 0.0);
  return result;
}

}  // namespace

Report cmd_rates(const Scenario& s) {
  Report r;
  r.scenario = s.name;
  r.command = "rates";
  r.kind = to_string(s.kind);

  switch (s.kind) {
    case ScenarioKind::standard:
    case ScenarioKind::augmented: {
      QuadraticProblem qp = load_quadratic_problem(s.problem_path);
      ConstrainedProblem cp = qp.as_problem();
      const MetricCertificate cert = s.kind == ScenarioKind::augmented
                                         ? augmented_certificate(cp, s.rho, s.epsilon)
                                         : standard_certificate(cp, s.epsilon);
      base_constants(r, cert);
      r.add("ell_inf", qp.objective.ell_inf());
      r.add("ell_sup", qp.objective.ell_sup());
      r.add("sigma_min", qp.constraint.sigma_min());
      r.add("sigma_max", qp.constraint.sigma_max());
      if (s.kind == ScenarioKind::augmented) r.add("rho", s.rho);
      break;
    }
    case ScenarioKind::distributed:
    case ScenarioKind::distributed_ls: {
      const DistributedSetup d = distributed_setup(s);
      base_constants(r, d.cert);
      r.add("lambda_2", d.spec.lambda2());
      r.add("lambda_N", d.spec.lambdaN());
      if (s.kind == ScenarioKind::distributed_ls) {
        r.add("rho", s.rho);
        r.add("ell_star", d.ell_star_value);
        // The displayed bound in the source analysis omits the gain from
        // the Laplacian term; report both readings.
        LeastSquaresInstance ls = load_least_squares(s.problem_path);
        r.add("ell_star_unit_rho", ell_star(ls, d.spec.L, 1.0));
        r.add("h_max_sq", d.h_max_sq);
      }
      break;
    }
    case ScenarioKind::tv: {
      const TimeVaryingProblem p = load_tv_problem(s.problem_path);
      const MetricCertificate cert = standard_certificate(p, s.epsilon);
      base_constants(r, cert);
      r.add("beta_1", p.beta1);
      r.add("beta_2", p.beta2);
      const double rho_track = tv_tracking_rho(p.ell_inf, p.ell_sup, p.sigma_min, p.sigma_max,
                                               p.beta1, p.beta2, cert.lambda_max_P);
      r.add("tracking_rho", rho_track);
      r.add("ultimate_bound", rho_track / cert.c);
      break;
    }
    case ScenarioKind::tv_distributed: {
      const TVDistributedProblem p = load_tv_distributed_problem(s.problem_path);
      const LaplacianSpectrum spec = spectral_factors(laplacian(load_graph(s.graph_path)));
      if (p.nodes.size() != spec.node_count()) {
        throw Error("scenario: TV node count does not match the graph");
      }
      const MetricCertificate cert =
          tv_distributed_certificate(p.ell_inf_vector(), p.ell_sup_vector(), spec, p.dimension,
                                     s.epsilon);
      base_constants(r, cert);
      r.add("lambda_2", spec.lambda2());
      r.add("lambda_N", spec.lambdaN());
      const double rho_track =
          tv_distributed_tracking_rho(p.beta1_vector(), p.ell_inf_vector(), p.ell_sup_vector(),
                                      spec.lambda2(), spec.node_count(), cert.lambda_max_P);
      r.add("tracking_rho", rho_track);
      r.add("ultimate_bound", rho_track / cert.c);
      break;
    }
  }
  return r;
}

Report cmd_simulate(const Scenario& s, std::ostream& csv_out) {
  Report r;
  r.scenario = s.name;
  r.command = "simulate";
  r.kind = to_string(s.kind);

  if (s.kind == ScenarioKind::tv || s.kind == ScenarioKind::tv_distributed) {
    throw Error("simulate applies to time-invariant kinds; use track for tv scenarios");
  }

  if (s.kind == ScenarioKind::standard || s.kind == ScenarioKind::augmented) {
    const StandardSetup setup = standard_setup(s);
    const double T = s.horizon > 0.0 ? s.horizon : 20.0 / setup.cert.c;
    const IntegratorConfig cfg = make_config(setup.step, T);
    const Vector z0 = s.start_at_equilibrium ? setup.zstar
                                             : seeded_state(s.seed, setup.field.dimension, 2.0);
    const WeightedMetric metric(setup.cert.P);

    Trajectory traj;
    bool diverged = false;
    try {
      traj = integrate(setup.field, z0, cfg);
    } catch (DivergenceError& e) {
      traj = e.partial();  // keep the partial record, then re-raise below
      diverged = true;
    }

    const double w0 = metric.norm(traj.states.front() - setup.zstar);
    csv_out << "t,weighted_error,euclidean_error,kkt_residual,envelope\n";
    double worst_violation = -std::numeric_limits<double>::infinity();
    double final_weighted = 0.0;
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
      const double t = traj.times[i];
      const Vector diff = traj.states[i] - setup.zstar;
      const double weighted = metric.norm(diff);
      const double envelope = w0 * std::exp(-setup.cert.c * t);
      worst_violation = std::max(worst_violation, weighted - envelope);
      final_weighted = weighted;
      csv_out << fmt(t) << ',' << fmt(weighted) << ',' << fmt(norm2(diff)) << ','
              << fmt(norm2(setup.field(traj.states[i], t))) << ',' << fmt(envelope) << "\n";
    }
    if (diverged) throw DivergenceError("simulate: trajectory tripped the blow-up guard", traj);

    base_constants(r, setup.cert);
    r.add("h", cfg.step);
    r.add("T", cfg.horizon);
    r.check_le("max_envelope_violation", worst_violation, 1e-6 * (1.0 + w0));
    r.check_le("final_weighted_error",
               final_weighted, w0 * std::exp(-setup.cert.c * cfg.horizon) + 1e-6);
    return r;
  }

  // distributed kinds
  const DistributedSetup d = distributed_setup(s);
  const double T = s.horizon > 0.0 ? s.horizon : 20.0 / d.cert.c;
  const IntegratorConfig cfg = make_config(d.step, T);
  const Vector z0 = s.start_at_equilibrium ? distributed_equilibrium_state(d)
                                           : seeded_state(s.seed, d.field.dimension, 2.0);
  const WeightedMetric metric(d.cert.P);
  const std::size_t N = d.spec.node_count();

  Trajectory traj;
  bool diverged = false;
  try {
    traj = integrate(d.field, z0, cfg);
  } catch (DivergenceError& e) {
    traj = e.partial();
    diverged = true;
  }

  const Vector sum0 = dual_sum(traj.states.front(), N, d.n);
  const double w0 = metric.norm(projected_error(d.spec, d.n, traj.states.front(), d.vstar,
                                                d.dual_offset));
  csv_out << "t,weighted_error,euclidean_error,kkt_residual,dual_sum_drift,max_node_error,"
             "envelope\n";
  double worst_violation = -std::numeric_limits<double>::infinity();
  double worst_drift = 0.0;
  double final_node_error = 0.0;
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const double t = traj.times[i];
    const Vector err = projected_error(d.spec, d.n, traj.states[i], d.vstar, d.dual_offset);
    const double weighted = metric.norm(err);
    const double envelope = w0 * std::exp(-d.cert.c * t);
    const double drift = norm2(dual_sum(traj.states[i], N, d.n) - sum0);
    double node_err = 0.0;
    for (std::size_t node = 0; node < N; ++node) {
      double e2 = 0.0;
      for (std::size_t a = 0; a < d.n; ++a) {
        const double diff = traj.states[i][node * d.n + a] - d.vstar[a];
        e2 += diff * diff;
      }
      node_err = std::max(node_err, std::sqrt(e2));
    }
    worst_violation = std::max(worst_violation, weighted - envelope);
    worst_drift = std::max(worst_drift, drift);
    final_node_error = node_err;
    csv_out << fmt(t) << ',' << fmt(weighted) << ',' << fmt(norm2(err)) << ','
            << fmt(norm2(d.field(traj.states[i], t))) << ',' << fmt(drift) << ','
            << fmt(node_err) << ',' << fmt(envelope) << "\n";
  }
  if (diverged) throw DivergenceError("simulate: trajectory tripped the blow-up guard", traj);

  base_constants(r, d.cert);
  r.add("lambda_2", d.spec.lambda2());
  r.add("lambda_N", d.spec.lambdaN());
  if (s.kind == ScenarioKind::distributed_ls) {
    r.add("rho", s.rho);
    r.add("ell_star", d.ell_star_value);
  }
  r.add("h", cfg.step);
  r.add("T", cfg.horizon);
  r.check_le("max_envelope_violation", worst_violation, 1e-6 * (1.0 + w0));
  r.check_le("dual_sum_drift", worst_drift, 1e-9);
  const double node_threshold =
      std::max(1e-6, w0 * std::exp(-d.cert.c * cfg.horizon) / std::sqrt(d.cert.lambda_min_P));
  r.check_le("final_max_node_error", final_node_error, node_threshold);
  return r;
}

Report cmd_track(const Scenario& s, std::ostream& csv_out) {
  Report r;
  r.scenario = s.name;
  r.command = "track";
  r.kind = to_string(s.kind);
  if (s.kind != ScenarioKind::tv && s.kind != ScenarioKind::tv_distributed) {
    throw Error("track applies to tv scenarios only");
  }
  const TrackResult result = run_tracking(s, r, &csv_out);
  csv_out << "# max_violation," << fmt(result.max_violation) << "\n";
  return r;
}

Report cmd_verify(const Scenario& s) {
  Report r;
  r.scenario = s.name;
  r.command = "verify";
  r.kind = to_string(s.kind);

  switch (s.kind) {
    case ScenarioKind::standard: {
      QuadraticProblem qp = load_quadratic_problem(s.problem_path);
      if (qp.objective.ell_inf() <= 0.0) {
        // Weakly contractive regime: measure sits at zero, pairwise
        // Euclidean distances never grow, rate fit is skipped.
        ConstrainedProblem cp = qp.as_problem();
        const VectorField field = pd_field(cp);
        const auto samples = sampling::sample_states(s.seed + 1, field.dimension, 50, 2.0);
        const double measure =
            sampled_measure_check(field, Matrix::identity(field.dimension), samples);
        r.add("epsilon", s.epsilon);
        r.add("alpha", 0.0);
        r.add("c", 0.0);
        r.add("lambda_max_P", 1.0);
        r.check_le("euclidean_measure", measure, 1e-8);

        const double h = s.step > 0.0
                             ? s.step
                             : default_step(qp.objective.ell_sup(), qp.constraint.sigma_max());
        const IntegratorConfig cfg = make_config(h, s.horizon > 0.0 ? s.horizon : 50.0);
        const auto pairs = sampling::sample_initial_pairs(s.seed + 2, field.dimension, 10, 2.0);
        double worst_step_growth = -std::numeric_limits<double>::infinity();
        for (const auto& [za, zb] : pairs) {
          const Trajectory ta = integrate(field, za, cfg);
          const Trajectory tb = integrate(field, zb, cfg);
          for (std::size_t i = 1; i < ta.states.size(); ++i) {
            const double prev = norm2(ta.states[i - 1] - tb.states[i - 1]);
            const double curr = norm2(ta.states[i] - tb.states[i]);
            worst_step_growth = std::max(worst_step_growth, curr - prev);
          }
        }
        r.check_le("non_expansion_step_growth", worst_step_growth, 1e-8);
        return r;
      }

      const StandardSetup setup = standard_setup(s);
      base_constants(r, setup.cert);
      const auto samples = sampling::sample_states(s.seed + 1, setup.field.dimension, 200, 2.0);
      r.check_le("sampled_measure", sampled_measure_check(setup.field, setup.cert.P, samples),
                 -setup.cert.c + 1e-8);
      const auto pairs = sampling::sample_pairs(s.seed + 2, setup.field.dimension, 100, 2.0);
      r.check_le("integral_slack",
                 integral_contractivity_check(setup.field, setup.cert.P, setup.cert.c, pairs),
                 1e-8);
      r.check_le("kkt_residual", norm2(setup.field(setup.zstar, 0.0)), 1e-9);
      const IntegratorConfig cfg = make_config(setup.step, 10.0 / setup.cert.c);
      const double fitted =
          empirical_rate_seeded(setup.field, setup.cert.P, s.seed + 3, 2, cfg, 1.0);
      r.add("empirical_rate", fitted);
      r.check_ge("empirical_rate_vs_certificate", fitted, 0.95 * setup.cert.c);
      const std::size_t n = setup.problem.objective.dimension();
      const std::size_t k = setup.problem.constraint.rows();
      const int hurwitz_pass = prop1_suite(s.seed + 4, n, k, 20);
      r.check_ge("prop1_hurwitz_suite", hurwitz_pass, 20.0);
      return r;
    }

    case ScenarioKind::augmented: {
      const StandardSetup setup = standard_setup(s);
      base_constants(r, setup.cert);
      const auto samples = sampling::sample_states(s.seed + 1, setup.field.dimension, 200, 2.0);
      r.check_le("sampled_measure", sampled_measure_check(setup.field, setup.cert.P, samples),
                 -setup.cert.c + 1e-8);
      const auto pairs = sampling::sample_pairs(s.seed + 2, setup.field.dimension, 100, 2.0);
      r.check_le("integral_slack",
                 integral_contractivity_check(setup.field, setup.cert.P, setup.cert.c, pairs),
                 1e-8);
      // Augmentation keeps the original equilibria.
      r.check_le("equilibrium_residual", norm2(setup.field(setup.zstar, 0.0)), 1e-9);
      const double T = s.horizon > 0.0 ? s.horizon : 20.0 / setup.cert.c;
      const IntegratorConfig cfg = make_config(setup.step, T);
      const Vector z0 = seeded_state(s.seed, setup.field.dimension, 2.0);
      const Trajectory traj = integrate(setup.field, z0, cfg);
      r.check_le("final_error_vs_kkt", norm2(traj.states.back() - setup.zstar), 1e-6);
      return r;
    }

    case ScenarioKind::distributed:
    case ScenarioKind::distributed_ls: {
      const DistributedSetup d = distributed_setup(s);
      base_constants(r, d.cert);
      r.add("lambda_2", d.spec.lambda2());
      r.add("lambda_N", d.spec.lambdaN());

      const std::size_t N = d.spec.node_count();
      const Matrix Lambda = Matrix::diagonal(d.spec.nonzero_eigenvalues());
      const Matrix RLRt = d.spec.R * d.spec.L * transpose(d.spec.R);
      r.check_le("rlr_residual", frobenius_norm(RLRt - Lambda), 1e-10);
      r.check_le("rr_residual",
                 frobenius_norm(d.spec.R * transpose(d.spec.R) - Matrix::identity(N - 1)), 1e-10);
      r.check_le("rl_commutation", frobenius_norm(d.spec.R * d.spec.L - Lambda * d.spec.R), 1e-10);
      const Matrix V = build_V(d.spec, d.n);
      r.check_le("v_orthonormal",
                 frobenius_norm(V * transpose(V) - Matrix::identity(V.rows())), 1e-10);
      const Vector sv = singular_values(reduced_constraint(d.spec, d.n));
      r.check_le("sigma_min_reduced", std::abs(sv.front() - d.spec.lambda2()), 1e-10);
      r.check_le("sigma_max_reduced", std::abs(sv.back() - d.spec.lambdaN()), 1e-10);

      const auto samples = sampling::sample_states(s.seed + 1, d.field.dimension, 50, 2.0);
      r.check_le("projected_measure", sampled_measure_check(d.field, d.cert.P, samples, &V),
                 -d.cert.c + 1e-8);

      const double T = s.horizon > 0.0 ? s.horizon : 20.0 / d.cert.c;
      const IntegratorConfig cfg = make_config(d.step, T);
      const Vector z0 = seeded_state(s.seed, d.field.dimension, 2.0);
      const Trajectory traj = integrate(d.field, z0, cfg);
      const Vector sum0 = dual_sum(traj.states.front(), N, d.n);
      double worst_drift = 0.0;
      for (const auto& state : traj.states) {
        worst_drift = std::max(worst_drift, norm2(dual_sum(state, N, d.n) - sum0));
      }
      r.check_le("dual_sum_drift", worst_drift, 1e-9);
      double node_err = 0.0;
      for (std::size_t node = 0; node < N; ++node) {
        double e2 = 0.0;
        for (std::size_t a = 0; a < d.n; ++a) {
          const double diff = traj.states.back()[node * d.n + a] - d.vstar[a];
          e2 += diff * diff;
        }
        node_err = std::max(node_err, std::sqrt(e2));
      }
      r.check_le("final_max_node_error", node_err, 1e-6);
      return r;
    }

    case ScenarioKind::tv:
    case ScenarioKind::tv_distributed: {
      // Frozen-equilibrium consistency, then the tracking-bound run.
      if (s.kind == ScenarioKind::tv) {
        const TimeVaryingProblem p = load_tv_problem(s.problem_path);
        const VectorField field = tv_pd_field(p);
        double worst = 0.0;
        for (double t : {0.0, 1.7, 5.3}) {
          const QuadraticProblem qp = p.frozen_quadratic(t);
          auto [xs, ns] = kkt_solve(qp.objective, qp.constraint);
          worst = std::max(worst, norm2(field(concat(xs, ns), t)));
        }
        r.check_le("frozen_equilibrium_residual", worst, 1e-9);
      } else {
        const TVDistributedProblem p = load_tv_distributed_problem(s.problem_path);
        const LaplacianSpectrum spec = spectral_factors(laplacian(load_graph(s.graph_path)));
        const VectorField field = tv_distributed_pd_field(p, spec);
        const std::size_t N = spec.node_count();
        const std::size_t n = p.dimension;
        double worst = 0.0;
        for (double t : {0.0, 1.7, 5.3}) {
          const Vector xs = tv_distributed_frozen_optimum(p, t, Vector(n, 0.0));
          Vector grads;
          for (const auto& node : p.nodes) {
            const Vector g = node.gradient(xs, t);
            grads.insert(grads.end(), g.begin(), g.end());
          }
          const Vector ys = projected_dual_offset(spec, n, grads);
          Vector z(2 * N * n, 0.0);
          for (std::size_t i = 0; i < N; ++i)
            for (std::size_t a = 0; a < n; ++a) z[i * n + a] = xs[a];
          for (std::size_t j = 0; j < N; ++j)
            for (std::size_t a = 0; a < n; ++a) {
              double v = 0.0;
              for (std::size_t rr = 0; rr + 1 < N; ++rr) v += spec.R(rr, j) * ys[rr * n + a];
              z[N * n + j * n + a] = v;
            }
          worst = std::max(worst, norm2(field(z, t)));
        }
        r.check_le("frozen_equilibrium_residual", worst, 1e-9);
      }
      run_tracking(s, r, nullptr);
      return r;
    }
  }
  throw Error("cmd_verify: unhandled scenario kind");
}

}  // namespace pdc
