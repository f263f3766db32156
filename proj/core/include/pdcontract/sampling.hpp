#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "pdcontract/contraction.hpp"
#include "pdcontract/graphs.hpp"
#include "pdcontract/linalg.hpp"
#include "pdcontract/problems.hpp"

namespace pdc::sampling {

using Rng = std::mt19937_64;

Matrix random_orthogonal(Rng& rng, std::size_t n);
Matrix random_spd(Rng& rng, std::size_t n, double eig_lo, double eig_hi);
/// k x n (k < n) with singular values drawn from [sv_lo, sv_hi].
Matrix random_full_row_rank(Rng& rng, std::size_t k, std::size_t n, double sv_lo, double sv_hi);

/// Strongly convex quadratic test problem: Q eigenvalues in [0.6, 2],
/// constraint singular values in [0.9, 1.6], q and b in [-1, 1].
QuadraticProblem random_quadratic_problem(std::uint64_t seed, std::size_t n, std::size_t k);

/// Erdos-Renyi draw (p = 0.5) rejected until connected; deterministic in
/// the seed.
Graph random_connected_graph(std::uint64_t seed, std::size_t node_count);

LeastSquaresInstance random_least_squares(std::uint64_t seed, std::size_t sample_count,
                                          std::size_t dimension);

std::vector<MeasureSample> sample_states(std::uint64_t seed, std::size_t dim, std::size_t count,
                                         double box);
std::vector<StatePair> sample_pairs(std::uint64_t seed, std::size_t dim, std::size_t count,
                                    double box);
std::vector<std::pair<Vector, Vector>> sample_initial_pairs(std::uint64_t seed, std::size_t dim,
                                                            std::size_t count, double box);

/// [[-B, -A^T], [A, 0]]
Matrix saddle_matrix(const Matrix& B, const Matrix& A);

}  // namespace pdc::sampling
