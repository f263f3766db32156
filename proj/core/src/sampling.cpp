#include "pdcontract/sampling.hpp"

#include <cmath>
#include <set>

namespace pdc::sampling {

namespace {

Vector random_unit_box(Rng& rng, std::size_t n, double box) {
  std::uniform_real_distribution<double> dist(-box, box);
  Vector v(n);
  for (double& x : v) x = dist(rng);
  return v;
}

}  // namespace

Matrix random_orthogonal(Rng& rng, std::size_t n) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix q(n, n);
  for (std::size_t col = 0; col < n; ++col) {
    Vector v(n);
    for (double& x : v) x = gauss(rng);
    // Gram-Schmidt against earlier columns, twice for stability.
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t prev = 0; prev < col; ++prev) {
        double proj = 0.0;
        for (std::size_t i = 0; i < n; ++i) proj += q(i, prev) * v[i];
        for (std::size_t i = 0; i < n; ++i) v[i] -= proj * q(i, prev);
      }
    }
    double nrm = norm2(v);
    if (nrm < 1e-8) {
      // Essentially impossible for Gaussian draws; restart the column.
      --col;
      continue;
    }
    for (std::size_t i = 0; i < n; ++i) q(i, col) = v[i] / nrm;
  }
  return q;
}

Matrix random_spd(Rng& rng, std::size_t n, double eig_lo, double eig_hi) {
  std::uniform_real_distribution<double> eig(eig_lo, eig_hi);
  const Matrix u = random_orthogonal(rng, n);
  Vector lam(n);
  for (double& v : lam) v = eig(rng);
  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += u(i, k) * lam[k] * u(j, k);
      out(i, j) = s;
      out(j, i) = s;
    }
  return out;
}

Matrix random_full_row_rank(Rng& rng, std::size_t k, std::size_t n, double sv_lo, double sv_hi) {
  if (k >= n) throw DimensionError("random_full_row_rank: need k < n");
  std::uniform_real_distribution<double> sv(sv_lo, sv_hi);
  const Matrix u = random_orthogonal(rng, k);
  const Matrix v = random_orthogonal(rng, n);
  Matrix a(k, n);
  for (std::size_t r = 0; r < k; ++r) {
    const double s = sv(rng);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < n; ++j) a(i, j) += u(i, r) * s * v(j, r);
  }
  return a;
}

QuadraticProblem random_quadratic_problem(std::uint64_t seed, std::size_t n, std::size_t k) {
  Rng rng(seed);
  Matrix Q = random_spd(rng, n, 0.6, 2.0);
  Vector q = random_unit_box(rng, n, 1.0);
  Matrix A = random_full_row_rank(rng, k, n, 0.9, 1.6);
  Vector b = random_unit_box(rng, k, 1.0);
  return QuadraticProblem(QuadraticObjective(std::move(Q), std::move(q)),
                          EqualityConstraint(std::move(A), std::move(b)));
}

Graph random_connected_graph(std::uint64_t seed, std::size_t node_count) {
  for (std::uint64_t attempt = 0; attempt < 1000; ++attempt) {
    Rng rng(seed + 0x9e3779b97f4a7c15ULL * attempt);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t i = 0; i < node_count; ++i)
      for (std::size_t j = i + 1; j < node_count; ++j)
        if (coin(rng) < 0.5) edges.emplace_back(i, j);
    try {
      return Graph(node_count, std::move(edges));
    } catch (const ConnectivityError&) {
      continue;
    } catch (const Error&) {
      continue;  // e.g. empty edge set
    }
  }
  throw Error("random_connected_graph: failed to draw a connected graph");
}

LeastSquaresInstance random_least_squares(std::uint64_t seed, std::size_t sample_count,
                                          std::size_t dimension) {
  Rng rng(seed);
  std::uniform_real_distribution<double> entry(-1.0, 1.0);
  for (std::uint64_t attempt = 0; attempt < 100; ++attempt) {
    Matrix H(sample_count, dimension);
    for (std::size_t i = 0; i < sample_count; ++i)
      for (std::size_t j = 0; j < dimension; ++j) H(i, j) = entry(rng);
    Vector z(sample_count);
    for (double& v : z) v = entry(rng);
    try {
      return LeastSquaresInstance(std::move(H), std::move(z));
    } catch (const Error&) {
      continue;  // rank-deficient draw; redraw
    }
  }
  throw Error("random_least_squares: failed to draw a full-rank instance");
}

std::vector<MeasureSample> sample_states(std::uint64_t seed, std::size_t dim, std::size_t count,
                                         double box) {
  Rng rng(seed);
  std::vector<MeasureSample> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back({random_unit_box(rng, dim, box), 0.0});
  }
  return out;
}

std::vector<StatePair> sample_pairs(std::uint64_t seed, std::size_t dim, std::size_t count,
                                    double box) {
  Rng rng(seed);
  std::vector<StatePair> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    StatePair p;
    p.a = random_unit_box(rng, dim, box);
    p.b = random_unit_box(rng, dim, box);
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<std::pair<Vector, Vector>> sample_initial_pairs(std::uint64_t seed, std::size_t dim,
                                                            std::size_t count, double box) {
  Rng rng(seed);
  std::vector<std::pair<Vector, Vector>> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    out.emplace_back(random_unit_box(rng, dim, box), random_unit_box(rng, dim, box));
  }
  return out;
}

Matrix saddle_matrix(const Matrix& B, const Matrix& A) {
  if (!B.square() || A.cols() != B.rows()) throw DimensionError("saddle_matrix: shape mismatch");
  const std::size_t n = B.rows();
  const std::size_t k = A.rows();
  Matrix s(n + k, n + k);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) s(i, j) = -B(i, j);
  for (std::size_t r = 0; r < k; ++r)
    for (std::size_t j = 0; j < n; ++j) {
      s(j, n + r) = -A(r, j);
      s(n + r, j) = A(r, j);
    }
  return s;
}

}  // namespace pdc::sampling
