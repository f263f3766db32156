#include "pdcontract/graphs.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace pdc {

Graph::Graph(std::size_t n, std::vector<std::pair<std::size_t, std::size_t>> e)
    : node_count(n), edges(std::move(e)) {
  if (node_count < 2) throw Error("Graph: at least two nodes required");
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (auto& [u, v] : edges) {
    if (u == v) throw Error("Graph: self-loop rejected");
    if (u >= node_count || v >= node_count) throw Error("Graph: edge endpoint out of range");
    if (u > v) std::swap(u, v);
    if (!seen.insert({u, v}).second) throw Error("Graph: duplicate edge rejected");
  }
  std::sort(edges.begin(), edges.end());

  // Connectivity by traversal.
  std::vector<char> visited(node_count, 0);
  std::vector<std::size_t> stack{0};
  visited[0] = 1;
  const auto adj = adjacency_lists();
  while (!stack.empty()) {
    const std::size_t u = stack.back();
    stack.pop_back();
    for (std::size_t v : adj[u]) {
      if (!visited[v]) {
        visited[v] = 1;
        stack.push_back(v);
      }
    }
  }
  for (char c : visited) {
    if (!c) throw ConnectivityError("Graph: not connected");
  }
}

Graph Graph::path(std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> e;
  for (std::size_t i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  return Graph(n, std::move(e));
}

Graph Graph::cycle(std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> e;
  for (std::size_t i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  e.emplace_back(0, n - 1);
  return Graph(n, std::move(e));
}

Graph Graph::complete(std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> e;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) e.emplace_back(i, j);
  return Graph(n, std::move(e));
}

std::vector<std::vector<std::size_t>> Graph::adjacency_lists() const {
  std::vector<std::vector<std::size_t>> adj(node_count);
  for (const auto& [u, v] : edges) {
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  return adj;
}

Graph load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("load_graph: cannot open " + path);
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  std::size_t max_index = 0;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream row(line);
    long long u = -1;
    long long v = -1;
    if (!(row >> u >> v) || u < 0 || v < 0) {
      throw Error("load_graph: malformed edge line '" + line + "' in " + path);
    }
    edges.emplace_back(static_cast<std::size_t>(u), static_cast<std::size_t>(v));
    max_index = std::max({max_index, static_cast<std::size_t>(u), static_cast<std::size_t>(v)});
  }
  if (edges.empty()) throw Error("load_graph: no edges in " + path);
  return Graph(max_index + 1, std::move(edges));
}

Matrix laplacian(const Graph& g) {
  Matrix L(g.node_count, g.node_count);
  for (const auto& [u, v] : g.edges) {
    L(u, u) += 1.0;
    L(v, v) += 1.0;
    L(u, v) -= 1.0;
    L(v, u) -= 1.0;
  }
  return L;
}

LaplacianSpectrum spectral_factors(const Matrix& L) {
  if (!L.square() || L.rows() < 2) throw DimensionError("spectral_factors: Laplacian must be square, N >= 2");
  require_finite(L, "spectral_factors");
  if (!symmetric_within(L)) throw SymmetryError("spectral_factors: Laplacian must be symmetric");
  const std::size_t n = L.rows();
  for (std::size_t i = 0; i < n; ++i) {
    double row_sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      row_sum += L(i, j);
      if (i != j) {
        const double v = L(i, j);
        if (std::abs(v) > 1e-9 && std::abs(v + 1.0) > 1e-9) {
          throw Error("spectral_factors: off-diagonal entries must be 0 or -1");
        }
      }
    }
    if (std::abs(row_sum) > 1e-9 * (1.0 + max_abs(L))) {
      throw Error("spectral_factors: row sums must vanish");
    }
  }

  const SpectralData s = sym_eig(L);
  if (std::abs(s.eigenvalues.front()) > 1e-9 * (1.0 + s.eigenvalues.back())) {
    throw Error("spectral_factors: smallest eigenvalue is not zero");
  }
  if (s.eigenvalues[1] <= 1e-10) {
    throw ConnectivityError("spectral_factors: lambda_2 <= tolerance, graph is disconnected");
  }

  LaplacianSpectrum out;
  out.L = L;
  out.eigenvalues = s.eigenvalues;
  out.R = Matrix(n - 1, n);
  for (std::size_t r = 0; r + 1 < n; ++r)
    for (std::size_t j = 0; j < n; ++j) out.R(r, j) = s.eigenvectors(j, r + 1);
  return out;
}

Matrix build_V(const LaplacianSpectrum& spec, std::size_t n) {
  if (n == 0) throw DimensionError("build_V: n >= 1 required");
  const std::size_t N = spec.node_count();
  const std::size_t rows = n * N + n * (N - 1);
  const std::size_t cols = 2 * n * N;
  Matrix V(rows, cols);
  for (std::size_t i = 0; i < n * N; ++i) V(i, i) = 1.0;
  for (std::size_t r = 0; r + 1 < N; ++r)
    for (std::size_t j = 0; j < N; ++j) {
      const double w = spec.R(r, j);
      if (w == 0.0) continue;
      for (std::size_t d = 0; d < n; ++d) V(n * N + r * n + d, n * N + j * n + d) = w;
    }
  return V;
}

Matrix reduced_constraint(const LaplacianSpectrum& spec, std::size_t n) {
  const std::size_t N = spec.node_count();
  Matrix lam_r(N - 1, N);
  for (std::size_t r = 0; r + 1 < N; ++r)
    for (std::size_t j = 0; j < N; ++j) lam_r(r, j) = spec.eigenvalues[r + 1] * spec.R(r, j);
  return kron(lam_r, Matrix::identity(n));
}

}  // namespace pdc
