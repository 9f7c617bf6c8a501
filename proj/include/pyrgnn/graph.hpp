#pragma once

// Graph representation, symmetric normalization and spectral-radius
// estimation for sparse symmetric matrices.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "pyrgnn/errors.hpp"
#include "pyrgnn/random.hpp"

namespace pyrgnn {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Triplet = Eigen::Triplet<double>;

/// Builds an n x n sparse matrix; duplicate entries are summed and indices sorted.
inline SparseMatrix sparse_from_triplets(Index rows, Index cols, const std::vector<Triplet>& triplets) {
  SparseMatrix m(rows, cols);
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.makeCompressed();
  return m;
}

/// Undirected weighted adjacency from an edge list; each pair is mirrored.
inline SparseMatrix adjacency_from_edges(Index n, const std::vector<std::tuple<Index, Index, double>>& edges) {
  std::vector<Triplet> t;
  t.reserve(edges.size() * 2);
  for (const auto& [i, j, w] : edges) {
    if (i < 0 || j < 0 || i >= n || j >= n) throw IndexError("edge endpoint outside vertex range");
    if (i == j) throw InvalidArgument("self-loops are not allowed");
    t.emplace_back(i, j, w);
    t.emplace_back(j, i, w);
  }
  return sparse_from_triplets(n, n, t);
}

inline bool is_symmetric(const SparseMatrix& a) {
  if (a.rows() != a.cols()) return false;
  const SparseMatrix at = a.transpose();
  if (at.nonZeros() != a.nonZeros()) return false;
  for (Index r = 0; r < a.outerSize(); ++r) {
    SparseMatrix::InnerIterator x(a, r);
    SparseMatrix::InnerIterator y(at, r);
    for (; x && y; ++x, ++y) {
      if (x.col() != y.col() || x.value() != y.value()) return false;
    }
    if (x || y) return false;
  }
  return true;
}

inline bool has_zero_diagonal(const SparseMatrix& a) {
  for (Index r = 0; r < a.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(a, r); it; ++it)
      if (it.col() == r && it.value() != 0.0) return false;
  return true;
}

/// Weighted degree (row sums).
inline Vector row_sums(const SparseMatrix& a) {
  Vector d = Vector::Zero(a.rows());
  for (Index r = 0; r < a.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(a, r); it; ++it) d[r] += it.value();
  return d;
}

/// Number of stored off-diagonal entries with a nonzero value.
inline std::size_t stored_nonzeros(const SparseMatrix& a) {
  std::size_t n = 0;
  for (Index r = 0; r < a.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(a, r); it; ++it)
      if (it.value() != 0.0 && it.col() != r) ++n;
  return n;
}

/// Undirected edge count of a symmetric matrix (each edge once).
inline std::size_t undirected_edges(const SparseMatrix& a) { return stored_nonzeros(a) / 2; }

/// Validates the adjacency invariants shared by input and pooled graphs.
inline void check_adjacency(const SparseMatrix& a) {
  if (a.rows() != a.cols()) throw DimensionMismatch("adjacency must be square");
  if (a.rows() < 1) throw InvalidArgument("graph needs at least one vertex");
  if (!has_zero_diagonal(a)) throw InvalidArgument("adjacency has self-loops");
  if (!is_symmetric(a)) throw InvalidArgument("adjacency is not symmetric");
  for (Index r = 0; r < a.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(a, r); it; ++it)
      if (!(it.value() >= 0.0) || !std::isfinite(it.value()))
        throw InvalidArgument("adjacency weights must be finite and non-negative");
}

/// An undirected graph: sparse symmetric adjacency plus dense vertex features.
///
/// Pooled graphs may carry explicit vertex strengths that differ from the
/// adjacency row sums (a decimated graph remembers the weight it lost to
/// sparsification). When absent the strength of a vertex is its weighted
/// degree.
class Graph {
 public:
  Graph(SparseMatrix adjacency, Matrix features, std::optional<int> label = std::nullopt,
        std::optional<Vector> strengths = std::nullopt)
      : adjacency_(std::move(adjacency)),
        features_(std::move(features)),
        label_(label),
        strengths_(std::move(strengths)) {
    adjacency_.makeCompressed();
    check_adjacency(adjacency_);
    if (features_.cols() < 1) throw InvalidArgument("feature dimension must be at least 1");
    if (features_.rows() != adjacency_.rows())
      throw DimensionMismatch("feature rows must match vertex count");
    if (strengths_ && strengths_->size() != adjacency_.rows())
      throw DimensionMismatch("strength vector must match vertex count");
  }

  Index num_vertices() const { return adjacency_.rows(); }
  Index feature_dim() const { return features_.cols(); }
  std::size_t num_edges() const { return undirected_edges(adjacency_); }

  const SparseMatrix& adjacency() const { return adjacency_; }
  const Matrix& features() const { return features_; }
  std::optional<int> label() const { return label_; }
  const std::optional<Vector>& strengths() const { return strengths_; }

  Vector degrees() const { return strengths_ ? *strengths_ : row_sums(adjacency_); }

  Graph with_label(std::optional<int> label) const {
    Graph g = *this;
    g.label_ = label;
    return g;
  }

 private:
  SparseMatrix adjacency_;
  Matrix features_;
  std::optional<int> label_;
  std::optional<Vector> strengths_;
};

/// D^{-1/2} A D^{-1/2}; zero-degree vertices give zero rows and columns.
struct NormalizedAdjacency {
  SparseMatrix matrix;
  Vector source_degrees;

  Index size() const { return matrix.rows(); }
};

inline NormalizedAdjacency normalize(const SparseMatrix& adjacency, const Vector& degrees) {
  if (degrees.size() != adjacency.rows()) throw DimensionMismatch("degree vector size");
  Vector inv_sqrt(degrees.size());
  for (Index i = 0; i < degrees.size(); ++i)
    inv_sqrt[i] = degrees[i] > 0.0 ? 1.0 / std::sqrt(degrees[i]) : 0.0;
  SparseMatrix m = adjacency;
  for (Index r = 0; r < m.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(m, r); it; ++it)
      it.valueRef() = it.value() * inv_sqrt[r] * inv_sqrt[it.col()];
  m.makeCompressed();
  return {std::move(m), degrees};
}

inline NormalizedAdjacency normalize(const SparseMatrix& adjacency) {
  return normalize(adjacency, row_sums(adjacency));
}

inline NormalizedAdjacency normalize(const Graph& graph) {
  return normalize(graph.adjacency(), graph.degrees());
}

struct SpectralEstimate {
  double value = 0.0;
  double residual = 0.0;
  int iterations_used = 0;
};

struct PowerOptions {
  double tolerance = 1e-8;
  int max_iterations = 10000;
  std::uint64_t seed = 0x5eed;
};

namespace detail {

// Power iteration for the dominant eigenvalue of a symmetric positive
// semi-definite operator B of size n. Returns (lambda, residual, iterations)
// where residual = ||B x - lambda x|| for the final unit vector x.
template <typename Apply>
SpectralEstimate power_psd(Index n, Apply&& apply_b, const PowerOptions& opts, bool& converged) {
  SpectralEstimate est;
  converged = true;
  if (n == 0) return est;
  Rng rng(opts.seed);
  Vector x(n);
  for (Index i = 0; i < n; ++i) x[i] = rng.uniform(-1.0, 1.0);
  x.normalize();
  Vector bx(n);
  for (int it = 1; it <= opts.max_iterations; ++it) {
    apply_b(x, bx);
    const double lambda = x.dot(bx);
    const double residual = (bx - lambda * x).norm();
    est.value = std::max(lambda, 0.0);
    est.residual = residual;
    est.iterations_used = it;
    if (residual <= opts.tolerance) return est;
    const double norm = bx.norm();
    if (norm == 0.0) {
      est.value = 0.0;
      est.residual = 0.0;
      return est;
    }
    x = bx / norm;
  }
  converged = false;
  return est;
}

}  // namespace detail

/// Largest absolute eigenvalue of a symmetric matrix by power iteration on S^2.
///
/// Iterating on the square sidesteps the +rho/-rho oscillation of bipartite
/// spectra. Throws NonConvergence (carrying the estimate) when the eigen
/// residual is still above tolerance after the iteration budget.
inline SpectralEstimate spectral_radius(const SparseMatrix& s, const PowerOptions& opts = {}) {
  if (s.rows() != s.cols()) throw DimensionMismatch("spectral_radius needs a square matrix");
  if (!(opts.tolerance > 0.0)) throw InvalidArgument("tolerance must be positive");
  Vector tmp(s.rows());
  bool ok = true;
  SpectralEstimate est = detail::power_psd(
      s.rows(),
      [&](const Vector& x, Vector& out) {
        tmp.noalias() = s * x;
        out.noalias() = s * tmp;
      },
      opts, ok);
  est.value = std::sqrt(est.value);
  if (!ok)
    throw NonConvergence("power iteration did not reach tolerance", est.value, est.residual);
  return est;
}

inline SpectralEstimate spectral_radius(const SparseMatrix& s, double tolerance, int max_power_iterations) {
  PowerOptions opts;
  opts.tolerance = tolerance;
  opts.max_iterations = max_power_iterations;
  return spectral_radius(s, opts);
}

/// Same as spectral_radius but returns the estimate instead of throwing.
inline std::pair<SpectralEstimate, bool> spectral_radius_lenient(const SparseMatrix& s,
                                                                 const PowerOptions& opts = {}) {
  try {
    return {spectral_radius(s, opts), true};
  } catch (const NonConvergence& e) {
    return {SpectralEstimate{e.estimate(), e.residual(), opts.max_iterations}, false};
  }
}

/// Largest singular value of a dense matrix via power iteration on M^T M.
inline SpectralEstimate spectral_norm(const Matrix& m, const PowerOptions& opts = {}) {
  Vector tmp(m.rows());
  bool ok = true;
  SpectralEstimate est = detail::power_psd(
      m.cols(),
      [&](const Vector& x, Vector& out) {
        tmp.noalias() = m * x;
        out.noalias() = m.transpose() * tmp;
      },
      opts, ok);
  est.value = std::sqrt(est.value);
  if (!ok)
    throw NonConvergence("power iteration did not reach tolerance", est.value, est.residual);
  return est;
}

struct GraphStats {
  Index vertices = 0;
  std::size_t edges = 0;
  double rho = 0.0;
  bool rho_converged = true;
};

inline GraphStats graph_stats(const SparseMatrix& adjacency, const Vector& degrees, const PowerOptions& opts = {}) {
  GraphStats s;
  s.vertices = adjacency.rows();
  s.edges = undirected_edges(adjacency);
  auto [est, ok] = spectral_radius_lenient(normalize(adjacency, degrees).matrix, opts);
  s.rho = est.value;
  s.rho_converged = ok;
  return s;
}

/// (N, M, rho(normalized adjacency)) with M counting each undirected edge once.
inline GraphStats graph_stats(const Graph& graph, const PowerOptions& opts = {}) {
  return graph_stats(graph.adjacency(), graph.degrees(), opts);
}

/// Combinatorial Laplacian diag(strengths) - A.
inline SparseMatrix laplacian(const SparseMatrix& adjacency, const Vector& strengths) {
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(adjacency.nonZeros() + adjacency.rows()));
  for (Index r = 0; r < adjacency.outerSize(); ++r) {
    t.emplace_back(r, r, strengths[r]);
    for (SparseMatrix::InnerIterator it(adjacency, r); it; ++it) t.emplace_back(r, it.col(), -it.value());
  }
  return sparse_from_triplets(adjacency.rows(), adjacency.cols(), t);
}

/// Connected components by breadth-first traversal; returns component id per vertex.
inline std::vector<int> connected_components(const SparseMatrix& a, int* count = nullptr) {
  const Index n = a.rows();
  std::vector<int> comp(static_cast<std::size_t>(n), -1);
  std::vector<Index> queue;
  int next = 0;
  for (Index s = 0; s < n; ++s) {
    if (comp[s] >= 0) continue;
    comp[s] = next;
    queue.assign(1, s);
    for (std::size_t q = 0; q < queue.size(); ++q) {
      const Index v = queue[q];
      for (SparseMatrix::InnerIterator it(a, v); it; ++it) {
        if (it.value() == 0.0 || comp[it.col()] >= 0) continue;
        comp[it.col()] = next;
        queue.push_back(it.col());
      }
    }
    ++next;
  }
  if (count) *count = next;
  return comp;
}

}  // namespace pyrgnn
