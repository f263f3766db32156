#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "pdcontract/linalg.hpp"

namespace pdc {

/// Undirected, unweighted, connected graph on nodes 0..N-1.
struct Graph {
  std::size_t node_count = 0;
  std::vector<std::pair<std::size_t, std::size_t>> edges;  // normalized u < v, sorted

  Graph(std::size_t n, std::vector<std::pair<std::size_t, std::size_t>> e);

  static Graph path(std::size_t n);
  static Graph cycle(std::size_t n);
  static Graph complete(std::size_t n);

  std::vector<std::vector<std::size_t>> adjacency_lists() const;
};

/// Edge-list text format: one "u v" pair per line, 0-indexed; node count is
/// max index + 1. Blank lines and lines starting with '#' are skipped.
Graph load_graph(const std::string& path);

/// Combinatorial Laplacian L = D - A.
Matrix laplacian(const Graph& g);

/// Spectral reduction of a connected-graph Laplacian: eigenvalues ascending
/// with the leading zero, and the orthonormal row block R spanning the
/// nonzero spectrum, so that R L R^T = diag(lambda_2..lambda_N), R L = Lambda R
/// and R R^T = I.
struct LaplacianSpectrum {
  Matrix L;
  Vector eigenvalues;  // ascending, eigenvalues[0] ~ 0
  Matrix R;            // (N-1) x N

  std::size_t node_count() const { return L.rows(); }
  double lambda2() const { return eigenvalues[1]; }
  double lambdaN() const { return eigenvalues.back(); }
  Vector nonzero_eigenvalues() const {
    return Vector(eigenvalues.begin() + 1, eigenvalues.end());
  }
};

LaplacianSpectrum spectral_factors(const Matrix& L);

/// V = diag(I_{nN}, R kron I_n), the (2N-1)n x 2Nn projector with
/// orthonormal rows that quotients out the consensus direction of the duals.
Matrix build_V(const LaplacianSpectrum& spec, std::size_t n);

/// Reduced constraint block (Lambda R) kron I_n; its extreme singular
/// values equal lambda_2 and lambda_N.
Matrix reduced_constraint(const LaplacianSpectrum& spec, std::size_t n);

}  // namespace pdc
