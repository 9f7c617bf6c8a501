#pragma once

// Topological pooling: greedy normalized heavy-edge matching with padding
// (Graclus-style), NMF soft clustering, and node decimation with Kron
// reduction. All three only look at the adjacency, so pyramids are built once
// per graph and reused across reservoir configurations.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

#include "pyrgnn/graph.hpp"
#include "pyrgnn/pyramid.hpp"
#include "pyrgnn/random.hpp"

namespace pyrgnn {

enum class PartitionMethod { SpectralSign, GreedySwap };

struct NdpConfig {
  double delta = 0.1;
  PartitionMethod partition_method = PartitionMethod::SpectralSign;
  /// Dropped-set size above which the Kron solve switches to conjugate gradient.
  Index direct_solve_limit = 2000;

  void validate() const {
    if (!(delta >= 0.0 && delta < 1.0)) throw InvalidArgument("NDP delta must lie in [0, 1)");
  }
};

struct NmfConfig {
  int iterations = 200;
  int max_restarts = 3;
  /// Number of clusters; 0 selects ceil(N / 2).
  Index clusters = 0;
};

struct PoolOptions {
  NdpConfig ndp;
  NmfConfig nmf;
  std::uint64_t seed = 0;
};

/// One pooling step. pool has padded_size rows (>= input vertices).
struct PoolResult {
  SparseMatrix adjacency;
  Vector strengths;
  SparseMatrix pool;
  Index padded_size = 0;
};

// ---------------------------------------------------------------------------
// Graclus-style matching
// ---------------------------------------------------------------------------

struct Matching {
  std::vector<Index> cluster_of;  // vertex -> cluster id
  Index clusters = 0;
  Index singletons = 0;
};

/// Greedy heavy-edge matching on w(i,j) * (1/d_i + 1/d_j), visiting vertices in seeded random order.
inline Matching graclus_match(const SparseMatrix& a, std::uint64_t seed) {
  const Index n = a.rows();
  const Vector d = row_sums(a);
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  Rng rng(derive_seed(seed, "graclus-order"));
  rng.shuffle(order);

  Matching m;
  m.cluster_of.assign(static_cast<std::size_t>(n), -1);
  for (Index v : order) {
    if (m.cluster_of[v] >= 0) continue;
    Index best = -1;
    double best_w = 0.0;
    for (SparseMatrix::InnerIterator it(a, v); it; ++it) {
      const Index u = it.col();
      if (u == v || m.cluster_of[u] >= 0 || it.value() <= 0.0) continue;
      const double w = it.value() * (1.0 / d[v] + 1.0 / d[u]);
      if (w > best_w) {
        best_w = w;
        best = u;
      }
    }
    m.cluster_of[v] = m.clusters;
    if (best >= 0) {
      m.cluster_of[best] = m.clusters;
    } else {
      ++m.singletons;
    }
    ++m.clusters;
  }
  return m;
}

/// S^T A S for a hard assignment, diagonal removed.
inline SparseMatrix coarsen_by_assignment(const SparseMatrix& a, const std::vector<Index>& cluster_of,
                                          Index clusters, Index padded_clusters) {
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(a.nonZeros()));
  for (Index r = 0; r < a.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(a, r); it; ++it) {
      const Index cr = cluster_of[r];
      const Index cc = cluster_of[it.col()];
      if (cr != cc) t.emplace_back(cr, cc, it.value());
    }
  (void)clusters;
  return sparse_from_triplets(padded_clusters, padded_clusters, t);
}

namespace detail {

// Pooling matrix of one padded level. Rows [0, n_real) are the real
// vertices, followed by padding rows. Columns [0, next_real) are real
// clusters, followed by padding clusters. Every column receives exactly two
// rows: real singletons get one padding partner, padding clusters two.
inline SparseMatrix padded_assignment(const std::vector<Index>& cluster_of, Index n_real, Index next_real,
                                      Index next_padded, Index* padded_rows) {
  std::vector<int> members(static_cast<std::size_t>(next_real), 0);
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(2 * next_padded));
  for (Index v = 0; v < n_real; ++v) {
    t.emplace_back(v, cluster_of[v], 1.0);
    ++members[cluster_of[v]];
  }
  Index row = n_real;
  for (Index c = 0; c < next_real; ++c)
    if (members[c] == 1) t.emplace_back(row++, c, 1.0);
  for (Index c = next_real; c < next_padded; ++c) {
    t.emplace_back(row++, c, 1.0);
    t.emplace_back(row++, c, 1.0);
  }
  *padded_rows = row;
  return sparse_from_triplets(row, next_padded, t);
}

}  // namespace detail

/// One level of matching: pairs become clusters, every unmatched vertex is
/// paired with an isolated padding vertex, so the padded input count is even
/// and the output has half of it.
inline PoolResult pool_graclus(const SparseMatrix& a, std::uint64_t seed = 0) {
  const Matching m = graclus_match(a, seed);
  PoolResult r;
  r.adjacency = coarsen_by_assignment(a, m.cluster_of, m.clusters, m.clusters);
  r.strengths = row_sums(r.adjacency);
  r.pool = detail::padded_assignment(m.cluster_of, a.rows(), m.clusters, m.clusters, &r.padded_size);
  return r;
}

// ---------------------------------------------------------------------------
// NMF pooling
// ---------------------------------------------------------------------------

struct NmfFactors {
  Matrix basis;       // Q, N x K
  Matrix assignment;  // Sf, K x N
  double error = 0.0;
  int restarts = 0;
};

/// A ~ Q Sf by Lee-Seung multiplicative updates on the Frobenius objective.
inline NmfFactors nmf_factorize(const Matrix& a, Index k, int iterations, std::uint64_t seed, int max_restarts = 3) {
  if (k < 1) throw InvalidArgument("NMF rank must be >= 1");
  if ((a.array() < 0.0).any()) throw InvalidArgument("NMF needs a non-negative matrix");
  const Index n = a.rows();
  constexpr double tiny = 1e-12;
  for (int attempt = 0; attempt <= max_restarts; ++attempt) {
    Rng rng(derive_seed(seed, "nmf-init", static_cast<std::uint64_t>(attempt)));
    Matrix q(n, k);
    Matrix s(k, a.cols());
    for (Index j = 0; j < k; ++j)
      for (Index i = 0; i < n; ++i) q(i, j) = rng.uniform_open_zero();
    for (Index j = 0; j < a.cols(); ++j)
      for (Index i = 0; i < k; ++i) s(i, j) = rng.uniform_open_zero();
    for (int it = 0; it < iterations; ++it) {
      const Matrix qta = q.transpose() * a;
      const Matrix qtq = q.transpose() * q;
      s.array() *= qta.array() / ((qtq * s).array() + tiny);
      const Matrix ast = a * s.transpose();
      const Matrix sst = s * s.transpose();
      q.array() *= ast.array() / ((q * sst).array() + tiny);
    }
    const double err = (a - q * s).norm();
    if (std::isfinite(err)) return {std::move(q), std::move(s), err, attempt};
  }
  throw FactorizationFailure("NMF reconstruction error is not finite after restarts");
}

/// Dense symmetric matrix to sparse adjacency: symmetrized, zero diagonal,
/// entries at or below `floor` dropped.
inline SparseMatrix dense_to_adjacency(const Matrix& m, double floor) {
  std::vector<Triplet> t;
  const Index n = m.rows();
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) {
      if (i == j) continue;
      const double w = 0.5 * (m(i, j) + m(j, i));
      if (w > floor) t.emplace_back(i, j, w);
    }
  return sparse_from_triplets(n, n, t);
}

inline PoolResult pool_nmf(const SparseMatrix& a, Index k, const NmfConfig& config = {}, std::uint64_t seed = 0) {
  const Index n = a.rows();
  if (k < 1) throw InvalidArgument("NMF needs K >= 1");
  const Matrix dense = Matrix(a);
  const NmfFactors f = nmf_factorize(dense, k, config.iterations, seed, config.max_restarts);
  const Matrix s = f.assignment.transpose();  // N x K pooling matrix
  const Matrix coarse = s.transpose() * dense * s;
  const double scale = coarse.cwiseAbs().maxCoeff();
  PoolResult r;
  r.adjacency = dense_to_adjacency(coarse, 1e-12 * scale);
  r.strengths = row_sums(r.adjacency);
  r.pool = s.sparseView(0.0, 0.0);
  r.pool.makeCompressed();
  r.padded_size = n;
  return r;
}

inline PoolResult pool_nmf(const SparseMatrix& a, const NmfConfig& config = {}, std::uint64_t seed = 0) {
  const Index k = config.clusters > 0 ? config.clusters : (a.rows() + 1) / 2;
  return pool_nmf(a, k, config, seed);
}

// ---------------------------------------------------------------------------
// Node decimation pooling
// ---------------------------------------------------------------------------

/// Eigenvector of the largest Laplacian eigenvalue by power iteration on
/// (L + shift I) with shift = 0 (L is positive semi-definite, so the largest
/// magnitude is the largest eigenvalue).
inline Vector top_laplacian_eigenvector(const SparseMatrix& lap, std::uint64_t seed, int max_iterations = 5000,
                                        double tolerance = 1e-10) {
  const Index n = lap.rows();
  Rng rng(derive_seed(seed, "ndp-eigvec"));
  Vector x(n);
  for (Index i = 0; i < n; ++i) x[i] = rng.uniform(-1.0, 1.0);
  x.normalize();
  Vector y(n);
  for (int it = 0; it < max_iterations; ++it) {
    y.noalias() = lap * x;
    const double lambda = x.dot(y);
    const double res = (y - lambda * x).norm();
    const double norm = y.norm();
    if (norm == 0.0) return x;
    x = y / norm;
    if (res <= tolerance * std::max(1.0, std::abs(lambda))) break;
  }
  return x;
}

inline double cut_weight(const SparseMatrix& a, const std::vector<char>& side) {
  double w = 0.0;
  for (Index r = 0; r < a.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(a, r); it; ++it)
      if (it.col() > r && side[r] != side[it.col()]) w += it.value();
  return w;
}

/// Balanced MAXCUT approximation. Returns keep flags with exactly ceil(N/2)
/// kept vertices: the eigenvector is oriented so its positive side is the
/// larger one, and the ceil(N/2) largest entries are kept (ties by index).
inline std::vector<char> maxcut_partition(const SparseMatrix& a, const Vector& strengths, PartitionMethod method,
                                          std::uint64_t seed) {
  const Index n = a.rows();
  std::vector<char> keep(static_cast<std::size_t>(n), 0);
  if (n == 1) {
    keep[0] = 1;
    return keep;
  }
  Vector u = top_laplacian_eigenvector(laplacian(a, strengths), seed);
  const Index positives = (u.array() >= 0.0).count();
  if (positives * 2 < n) u = -u;
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index x, Index y) { return u[x] > u[y]; });
  const Index kept = (n + 1) / 2;
  for (Index i = 0; i < kept; ++i) keep[order[i]] = 1;

  if (method == PartitionMethod::GreedySwap) {
    // Pair swaps keep the balance; each accepted swap strictly raises the cut.
    auto gain_of = [&](Index v) {
      // Cut change from flipping v alone.
      double g = 0.0;
      for (SparseMatrix::InnerIterator it(a, v); it; ++it)
        g += (keep[it.col()] == keep[v]) ? it.value() : -it.value();
      return g;
    };
    bool improved = true;
    int rounds = 0;
    while (improved && rounds++ < 100) {
      improved = false;
      for (Index x = 0; x < n; ++x) {
        if (!keep[x]) continue;
        const double gx = gain_of(x);
        Index best = -1;
        double best_gain = 1e-12;
        for (Index y = 0; y < n; ++y) {
          if (keep[y]) continue;
          const double axy = a.coeff(x, y);
          const double g = gx + gain_of(y) - 2.0 * axy;
          if (g > best_gain) {
            best_gain = g;
            best = y;
          }
        }
        if (best >= 0) {
          keep[x] = 0;
          keep[best] = 1;
          improved = true;
        }
      }
    }
  }
  return keep;
}

struct KronResult {
  Matrix reduced_laplacian;  // over kept vertices, in ascending vertex order
  std::vector<Index> kept;
  int fallbacks = 0;
};

/// Moves one vertex of every dropped component that has no link to a kept
/// vertex (and no grounding weight) into the kept set. Such components make
/// L(V-, V-) singular.
inline int repair_partition(const SparseMatrix& a, const Vector& strengths, std::vector<char>& keep) {
  const Index n = a.rows();
  const Vector sums = row_sums(a);
  int moved = 0;
  std::vector<int> comp(static_cast<std::size_t>(n), -1);
  std::vector<Index> queue;
  for (Index s = 0; s < n; ++s) {
    if (keep[s] || comp[s] >= 0) continue;
    comp[s] = static_cast<int>(s);
    queue.assign(1, s);
    bool anchored = false;
    for (std::size_t q = 0; q < queue.size(); ++q) {
      const Index v = queue[q];
      if (strengths[v] - sums[v] > 1e-12 * std::max(1.0, strengths[v])) anchored = true;
      for (SparseMatrix::InnerIterator it(a, v); it; ++it) {
        if (it.value() <= 0.0) continue;
        if (keep[it.col()]) {
          anchored = true;
        } else if (comp[it.col()] < 0) {
          comp[it.col()] = static_cast<int>(s);
          queue.push_back(it.col());
        }
      }
    }
    if (!anchored) {
      keep[*std::min_element(queue.begin(), queue.end())] = 1;
      ++moved;
    }
  }
  return moved;
}

/// Schur complement of the Laplacian onto the kept vertices.
inline KronResult kron_reduce(const SparseMatrix& a, const Vector& strengths, std::vector<char> keep,
                              Index direct_solve_limit = 2000) {
  const Index n = a.rows();
  KronResult out;
  out.fallbacks = repair_partition(a, strengths, keep);
  std::vector<Index> pos(static_cast<std::size_t>(n));
  std::vector<Index> dropped;
  for (Index v = 0; v < n; ++v) {
    if (keep[v]) {
      pos[v] = static_cast<Index>(out.kept.size());
      out.kept.push_back(v);
    } else {
      pos[v] = static_cast<Index>(dropped.size());
      dropped.push_back(v);
    }
  }
  const Index np = static_cast<Index>(out.kept.size());
  const Index nm = static_cast<Index>(dropped.size());
  const SparseMatrix lap = laplacian(a, strengths);

  Matrix l_pp = Matrix::Zero(np, np);
  std::vector<Triplet> t_mm, t_mp;
  for (Index r = 0; r < lap.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(lap, r); it; ++it) {
      const Index c = it.col();
      if (keep[r] && keep[c]) l_pp(pos[r], pos[c]) += it.value();
      else if (!keep[r] && !keep[c]) t_mm.emplace_back(pos[r], pos[c], it.value());
      else if (!keep[r] && keep[c]) t_mp.emplace_back(pos[r], pos[c], it.value());
    }
  if (nm == 0) {
    out.reduced_laplacian = std::move(l_pp);
    return out;
  }
  Eigen::SparseMatrix<double> l_mm(nm, nm);
  l_mm.setFromTriplets(t_mm.begin(), t_mm.end());
  Eigen::SparseMatrix<double> l_mp(nm, np);
  l_mp.setFromTriplets(t_mp.begin(), t_mp.end());
  const Matrix rhs = Matrix(l_mp);

  Matrix solved(nm, np);
  if (nm <= direct_solve_limit) {
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(l_mm);
    if (ldlt.info() != Eigen::Success) throw SingularReduction("factorization of L(V-,V-) failed");
    solved = ldlt.solve(rhs);
    if (ldlt.info() != Eigen::Success) throw SingularReduction("solve with L(V-,V-) failed");
  } else {
    Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg(l_mm);
    cg.setTolerance(1e-12);
    cg.setMaxIterations(static_cast<Index>(10 * nm));
    for (Index j = 0; j < np; ++j) {
      solved.col(j) = cg.solve(rhs.col(j));
      if (cg.info() != Eigen::Success) throw SingularReduction("conjugate gradient did not converge");
    }
  }
  Matrix reduced = l_pp - rhs.transpose() * solved;
  out.reduced_laplacian = 0.5 * (reduced + reduced.transpose());
  return out;
}

/// Node decimation: balanced MAXCUT split, Kron reduction onto the kept side,
/// then removal of edges lighter than delta times the heaviest edge. The
/// reduced Laplacian's diagonal is kept as the vertex strength of the pooled
/// graph, so weight removed by sparsification still counts in normalization.
inline PoolResult pool_ndp(const SparseMatrix& a, const Vector& strengths, const NdpConfig& config = {},
                           std::uint64_t seed = 0, KronResult* kron_out = nullptr,
                           SparseMatrix* unsparsified = nullptr) {
  config.validate();
  std::vector<char> keep = maxcut_partition(a, strengths, config.partition_method, seed);
  KronResult kron = kron_reduce(a, strengths, std::move(keep), config.direct_solve_limit);
  const Index np = static_cast<Index>(kron.kept.size());
  const Matrix& lr = kron.reduced_laplacian;

  std::vector<Triplet> full;
  double max_w = 0.0;
  for (Index j = 0; j < np; ++j)
    for (Index i = 0; i < np; ++i) {
      if (i == j) continue;
      const double w = -lr(i, j);
      if (w < 1e-12) continue;
      full.emplace_back(i, j, w);
      max_w = std::max(max_w, w);
    }
  std::vector<Triplet> sparse;
  const double threshold = config.delta * max_w;
  for (const auto& t : full)
    if (t.value() >= threshold) sparse.push_back(t);

  PoolResult r;
  r.adjacency = sparse_from_triplets(np, np, sparse);
  r.strengths = lr.diagonal().cwiseMax(0.0);
  // Strength is never below the weight that remains attached.
  r.strengths = r.strengths.cwiseMax(row_sums(r.adjacency));
  std::vector<Triplet> sel;
  for (Index k = 0; k < np; ++k) sel.emplace_back(kron.kept[k], k, 1.0);
  r.pool = sparse_from_triplets(a.rows(), np, sel);
  r.padded_size = a.rows();
  if (unsparsified) *unsparsified = sparse_from_triplets(np, np, full);
  if (kron_out) *kron_out = std::move(kron);
  return r;
}

inline PoolResult pool_ndp(const SparseMatrix& a, const NdpConfig& config = {}, std::uint64_t seed = 0) {
  return pool_ndp(a, row_sums(a), config, seed);
}

// ---------------------------------------------------------------------------
// Pyramid assembly
// ---------------------------------------------------------------------------

namespace detail {

inline SparseMatrix identity(Index n) {
  SparseMatrix s(n, n);
  s.setIdentity();
  s.makeCompressed();
  return s;
}

// Multi-level matching with a balanced padding tree: the coarsest level has
// its real clusters only, and each finer level has exactly twice as many
// (padded) vertices as the next one.
inline GraphPyramid build_graclus(const SparseMatrix& a, std::size_t levels, std::uint64_t seed) {
  std::vector<SparseMatrix> real_adj{a};
  std::vector<Matching> matchings;
  for (std::size_t l = 1; l < levels; ++l) {
    const Matching m = graclus_match(real_adj.back(), derive_seed(seed, "graclus-level", l));
    real_adj.push_back(coarsen_by_assignment(real_adj.back(), m.cluster_of, m.clusters, m.clusters));
    matchings.push_back(m);
  }
  // Padded sizes from the top.
  std::vector<Index> padded(levels);
  padded[levels - 1] = real_adj.back().rows();
  for (std::size_t l = levels - 1; l-- > 0;) padded[l] = 2 * padded[l + 1];

  GraphPyramid p;
  p.method = PoolMethod::Graclus;
  p.adjacencies.push_back(a);
  for (std::size_t l = 0; l + 1 < levels; ++l) {
    Index rows = 0;
    const Index n_real = real_adj[l].rows();
    SparseMatrix s = padded_assignment(matchings[l].cluster_of, n_real, real_adj[l + 1].rows(), padded[l + 1], &rows);
    if (rows != padded[l]) throw PoolCollapse("padding tree is inconsistent");
    p.pool_matrices.push_back(std::move(s));
    // Next level: real clusters first, padding vertices are isolated.
    const SparseMatrix& next = real_adj[l + 1];
    std::vector<Triplet> t;
    for (Index r = 0; r < next.outerSize(); ++r)
      for (SparseMatrix::InnerIterator it(next, r); it; ++it) t.emplace_back(r, it.col(), it.value());
    p.adjacencies.push_back(sparse_from_triplets(padded[l + 1], padded[l + 1], t));
  }
  return p;
}

}  // namespace detail

/// Builds the L-level pyramid of a graph. The first level is the input adjacency.
inline GraphPyramid build_pyramid(const SparseMatrix& adjacency, const Vector& strengths, PoolMethod method,
                                  std::size_t levels, const PoolOptions& options = {}) {
  if (levels < 1) throw InvalidArgument("pyramid needs at least one level");
  check_adjacency(adjacency);
  GraphPyramid p;
  if (method == PoolMethod::Graclus && levels > 1) {
    p = detail::build_graclus(adjacency, levels, options.seed);
  } else {
    p.method = method;
    p.adjacencies.push_back(adjacency);
    p.strengths.push_back(strengths);
    for (std::size_t l = 1; l < levels; ++l) {
      const SparseMatrix& cur = p.adjacencies.back();
      const Vector& cur_s = p.strengths.back();
      const std::uint64_t seed = derive_seed(options.seed, "pool-level", l);
      PoolResult r;
      switch (method) {
        case PoolMethod::NoPool:
          r.adjacency = cur;
          r.strengths = cur_s;
          r.pool = detail::identity(cur.rows());
          break;
        case PoolMethod::Nmf:
          r = pool_nmf(cur, options.nmf, seed);
          break;
        case PoolMethod::Ndp:
          r = pool_ndp(cur, cur_s, options.ndp, seed);
          break;
        case PoolMethod::Graclus:
          break;
      }
      if (r.adjacency.rows() < 1) throw PoolCollapse("pooling produced an empty graph");
      p.pool_matrices.push_back(std::move(r.pool));
      p.adjacencies.push_back(std::move(r.adjacency));
      p.strengths.push_back(std::move(r.strengths));
    }
  }
  if (method == PoolMethod::Graclus) {
    p.strengths.clear();
    p.strengths.push_back(strengths);
    for (std::size_t l = 1; l < p.adjacencies.size(); ++l) p.strengths.push_back(row_sums(p.adjacencies[l]));
  }
  p.finalize();
  return p;
}

inline GraphPyramid build_pyramid(const Graph& graph, PoolMethod method, std::size_t levels,
                                  const PoolOptions& options = {}) {
  return build_pyramid(graph.adjacency(), graph.degrees(), method, levels, options);
}

}  // namespace pyrgnn
