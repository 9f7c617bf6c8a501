#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <algorithm>

#include "pyrgnn/pooling.hpp"
#include "test_support.hpp"

using namespace pyrgnn;

namespace {

SparseMatrix path3() { return adjacency_from_edges(3, {{0, 1, 1.0}, {1, 2, 1.0}}); }

// Dense Schur complement L(+,+) - L(+,-) L(-,-)^{-1} L(-,+).
Matrix dense_schur(const SparseMatrix& a, const std::vector<Index>& kept) {
  const Matrix l = Matrix(laplacian(a, row_sums(a)));
  std::vector<Index> dropped;
  for (Index v = 0; v < a.rows(); ++v)
    if (std::find(kept.begin(), kept.end(), v) == kept.end()) dropped.push_back(v);
  const auto np = static_cast<Index>(kept.size());
  const auto nm = static_cast<Index>(dropped.size());
  Matrix pp(np, np), pm(np, nm), mm(nm, nm);
  for (Index i = 0; i < np; ++i) {
    for (Index j = 0; j < np; ++j) pp(i, j) = l(kept[i], kept[j]);
    for (Index j = 0; j < nm; ++j) pm(i, j) = l(kept[i], dropped[j]);
  }
  for (Index i = 0; i < nm; ++i)
    for (Index j = 0; j < nm; ++j) mm(i, j) = l(dropped[i], dropped[j]);
  if (nm == 0) return pp;
  return pp - pm * mm.fullPivLu().solve(pm.transpose());
}

}  // namespace

TEST(Graclus, SingleEdge) {
  const auto r = pool_graclus(adjacency_from_edges(2, {{0, 1, 1.0}}));
  EXPECT_EQ(r.adjacency.rows(), 1);
  EXPECT_EQ(r.adjacency.nonZeros(), 0);
  EXPECT_EQ(Matrix(r.pool), Matrix::Ones(2, 1));
}

TEST(Graclus, PathPadsOneVertex) {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const auto r = pool_graclus(path3(), seed);
    EXPECT_EQ(r.adjacency.rows(), 2);
    EXPECT_EQ(r.padded_size, 4);
    EXPECT_EQ(r.pool.rows(), 4);
    // Every column pools exactly two (real or padding) vertices.
    const Matrix s(r.pool);
    for (Index c = 0; c < 2; ++c) EXPECT_EQ(s.col(c).sum(), 2.0);
    EXPECT_DOUBLE_EQ(r.adjacency.coeff(0, 1), 1.0);
  }
}

TEST(Graclus, PrefersHeavyNormalizedEdge) {
  // 0-1 heavy, 1-2 light: vertex 1 always pairs with 0.
  const SparseMatrix a = adjacency_from_edges(3, {{0, 1, 5.0}, {1, 2, 1.0}});
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const auto m = graclus_match(a, seed);
    if (m.cluster_of[2] != m.cluster_of[1]) {
      EXPECT_EQ(m.cluster_of[0], m.cluster_of[1]);
    }
  }
}

TEST(Graclus, StarExpandsPastInput) {
  // A star matches one leaf; every other leaf needs a padding partner.
  std::vector<std::tuple<Index, Index, double>> e;
  for (Index leaf = 1; leaf < 20; ++leaf) e.emplace_back(0, leaf, 1.0);
  const SparseMatrix a = adjacency_from_edges(20, e);
  const auto r = pool_graclus(a, 1);
  EXPECT_EQ(r.adjacency.rows(), 19);
  EXPECT_GT(r.padded_size, 20);
}

TEST(Graclus, BalancedPyramid) {
  Rng rng(3);
  const SparseMatrix a = fixtures::erdos_renyi(40, 0.08, rng);
  const auto p = build_pyramid(a, row_sums(a), PoolMethod::Graclus, 3, PoolOptions{{}, {}, 5});
  ASSERT_EQ(p.levels(), 3u);
  EXPECT_EQ(p.pool_matrices[0].rows(), 2 * p.pool_matrices[0].cols());
  EXPECT_EQ(p.pool_matrices[1].rows(), 2 * p.pool_matrices[1].cols());
  EXPECT_EQ(p.pool_matrices[0].cols(), p.pool_matrices[1].rows());
  for (const auto& s : p.pool_matrices) {
    const Matrix d(s);
    EXPECT_TRUE(((d.array() == 0.0) || (d.array() == 1.0)).all());
    EXPECT_TRUE((d.colwise().sum().array() == 2.0).all());
    EXPECT_TRUE((d.rowwise().sum().array() <= 1.0).all());
  }
}

TEST(Nmf, DisjointEdgesSeparate) {
  const SparseMatrix a = adjacency_from_edges(4, {{0, 1, 1.0}, {2, 3, 1.0}});
  NmfConfig cfg;
  cfg.iterations = 2000;
  const auto r = pool_nmf(a, 2, cfg, 7);
  const Matrix s(r.pool);
  ASSERT_EQ(s.rows(), 4);
  ASSERT_EQ(s.cols(), 2);
  EXPECT_TRUE((s.array() >= 0.0).all());
  Index c0, c2;
  s.row(0).maxCoeff(&c0);
  s.row(2).maxCoeff(&c2);
  EXPECT_NE(c0, c2);
  Index c1, c3;
  s.row(1).maxCoeff(&c1);
  s.row(3).maxCoeff(&c3);
  EXPECT_EQ(c0, c1);
  EXPECT_EQ(c2, c3);
  const double total = Matrix(r.adjacency).sum();
  EXPECT_LT(total, 1e-3);
}

TEST(Nmf, HigherRankFitsBetter) {
  Rng rng(5);
  const Matrix a(fixtures::random_connected(12, 0.3, rng));
  const double half = nmf_factorize(a, 6, 500, 1).error;
  const double full = nmf_factorize(a, 12, 500, 1).error;
  EXPECT_LE(full, half);
}

TEST(Nmf, CoarsenedGraphIsDenser) {
  Rng rng(6);
  const SparseMatrix a = fixtures::random_connected(30, 0.02, rng, false);
  const auto r = pool_nmf(a, NmfConfig{}, 3);
  EXPECT_EQ(r.adjacency.rows(), 15);
  const double in = static_cast<double>(a.nonZeros()) / (30.0 * 30.0);
  const double out = static_cast<double>(r.adjacency.nonZeros()) / (15.0 * 15.0);
  EXPECT_GT(out, in);
}

TEST(Nmf, RejectsBadInput) {
  EXPECT_THROW(nmf_factorize(Matrix::Identity(2, 2), 0, 10, 1), InvalidArgument);
  EXPECT_THROW(nmf_factorize(-Matrix::Identity(2, 2), 1, 10, 1), InvalidArgument);
}

TEST(Nmf, PyramidHalves) {
  Rng rng(7);
  const SparseMatrix a = fixtures::random_connected(16, 0.2, rng);
  const auto p = build_pyramid(a, row_sums(a), PoolMethod::Nmf, 3);
  EXPECT_EQ(p.vertices(0), 16);
  EXPECT_EQ(p.vertices(1), 8);
  EXPECT_EQ(p.vertices(2), 4);
}

TEST(Ndp, PathKronWeight) {
  KronResult kron;
  SparseMatrix full;
  NdpConfig cfg;
  const auto r = pool_ndp(path3(), row_sums(path3()), cfg, 1, &kron, &full);
  ASSERT_EQ(kron.kept, (std::vector<Index>{0, 2}));
  EXPECT_NEAR(full.coeff(0, 1), 0.5, 1e-12);
  EXPECT_NEAR(r.adjacency.coeff(0, 1), 0.5, 1e-12);
  Matrix expected(2, 2);
  expected << 0.5, -0.5, -0.5, 0.5;
  EXPECT_LT((kron.reduced_laplacian - expected).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Ndp, KronMatchesDenseSchur) {
  Rng rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const Index n = 2 + static_cast<Index>(rng.below(7));
    const SparseMatrix a = fixtures::random_connected(n, 0.4, rng);
    KronResult kron;
    pool_ndp(a, row_sums(a), NdpConfig{}, static_cast<std::uint64_t>(trial), &kron);
    const Matrix oracle = dense_schur(a, kron.kept);
    EXPECT_LT((kron.reduced_laplacian - oracle).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(Ndp, KeepsHalfAndStaysConnected) {
  Rng rng(9);
  for (int trial = 0; trial < 30; ++trial) {
    const Index n = 4 + static_cast<Index>(rng.below(40));
    const SparseMatrix a = fixtures::random_connected(n, 0.1, rng);
    KronResult kron;
    SparseMatrix full;
    const auto r = pool_ndp(a, row_sums(a), NdpConfig{}, 3, &kron, &full);
    EXPECT_EQ(r.adjacency.rows(), (n + 1) / 2);
    EXPECT_EQ(kron.fallbacks, 0);
    int components = 0;
    connected_components(full, &components);
    EXPECT_EQ(components, 1);
    // Selection matrix: one 1 per column.
    const Matrix s(r.pool);
    EXPECT_TRUE((s.colwise().sum().array() == 1.0).all());
  }
}

TEST(Ndp, SpectralPartitionCutsBipartiteGraphExactly) {
  // Even cycle: the top Laplacian eigenvector alternates in sign.
  std::vector<std::tuple<Index, Index, double>> e;
  for (Index v = 0; v < 8; ++v) e.emplace_back(v, (v + 1) % 8, 1.0);
  const SparseMatrix a = adjacency_from_edges(8, e);
  const auto keep = maxcut_partition(a, row_sums(a), PartitionMethod::SpectralSign, 1);
  EXPECT_DOUBLE_EQ(cut_weight(a, keep), 8.0);
}

TEST(Ndp, GreedySwapNeverCutsLess) {
  Rng rng(10);
  for (int trial = 0; trial < 20; ++trial) {
    const SparseMatrix a = fixtures::random_connected(20, 0.2, rng);
    const Vector s = row_sums(a);
    const double base = cut_weight(a, maxcut_partition(a, s, PartitionMethod::SpectralSign, 4));
    const auto swapped = maxcut_partition(a, s, PartitionMethod::GreedySwap, 4);
    EXPECT_GE(cut_weight(a, swapped), base - 1e-12);
    EXPECT_EQ(std::count(swapped.begin(), swapped.end(), 1), 10);
  }
}

TEST(Ndp, RepairsUnanchoredDroppedComponent) {
  // Two disjoint edges; keeping only vertex 0 leaves {2, 3} without a kept neighbour.
  const SparseMatrix a = adjacency_from_edges(4, {{0, 1, 1.0}, {2, 3, 1.0}});
  std::vector<char> keep{1, 0, 0, 0};
  const auto r = kron_reduce(a, row_sums(a), keep);
  EXPECT_EQ(r.fallbacks, 1);
  EXPECT_EQ(r.kept, (std::vector<Index>{0, 2}));
  EXPECT_LT((r.reduced_laplacian - dense_schur(a, r.kept)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Ndp, ConjugateGradientMatchesDirect) {
  Rng rng(11);
  const SparseMatrix a = fixtures::random_connected(60, 0.05, rng);
  std::vector<char> keep(60, 0);
  for (Index v = 0; v < 60; v += 3) keep[v] = 1;
  const auto direct = kron_reduce(a, row_sums(a), keep);
  const auto cg = kron_reduce(a, row_sums(a), keep, 1);
  EXPECT_LT((direct.reduced_laplacian - cg.reduced_laplacian).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Ndp, SparsificationDropsLightEdges) {
  Rng rng(12);
  const SparseMatrix a = fixtures::random_connected(30, 0.3, rng);
  NdpConfig keep_all;
  keep_all.delta = 0.0;
  NdpConfig sparse;
  sparse.delta = 0.5;
  const auto dense_r = pool_ndp(a, row_sums(a), keep_all, 2);
  const auto sparse_r = pool_ndp(a, row_sums(a), sparse, 2);
  EXPECT_LT(sparse_r.adjacency.nonZeros(), dense_r.adjacency.nonZeros());
  EXPECT_LT((sparse_r.strengths - dense_r.strengths).cwiseAbs().maxCoeff(), 1e-10);
  const double max_w = Matrix(dense_r.adjacency).maxCoeff();
  for (Index r = 0; r < sparse_r.adjacency.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(sparse_r.adjacency, r); it; ++it) EXPECT_GE(it.value(), 0.5 * max_w);
  NdpConfig bad;
  bad.delta = 1.0;
  EXPECT_THROW(bad.validate(), InvalidArgument);
}

TEST(Ndp, PooledRadiusBelowOne) {
  Rng rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    const SparseMatrix a = fixtures::random_connected(40, 0.1, rng, false);
    const auto r = pool_ndp(a, row_sums(a), NdpConfig{}, 1);
    const double rho = spectral_radius(normalize(r.adjacency, r.strengths).matrix).value;
    EXPECT_LE(rho, 1.0 + 1e-8);
  }
}

TEST(Pyramid, SingleLevelForEveryMethod) {
  Rng rng(14);
  const SparseMatrix a = fixtures::random_connected(9, 0.3, rng);
  for (auto m : {PoolMethod::NoPool, PoolMethod::Graclus, PoolMethod::Nmf, PoolMethod::Ndp}) {
    const auto p = build_pyramid(a, row_sums(a), m, 1);
    EXPECT_EQ(p.levels(), 1u);
    EXPECT_TRUE(p.pool_matrices.empty());
    EXPECT_EQ(Matrix(p.adjacencies[0]), Matrix(a));
  }
}

TEST(Pyramid, NoPoolRepeatsInput) {
  Rng rng(15);
  const SparseMatrix a = fixtures::random_connected(9, 0.3, rng);
  const auto p = build_pyramid(a, row_sums(a), PoolMethod::NoPool, 3);
  for (std::size_t l = 0; l < 3; ++l) EXPECT_EQ(Matrix(p.adjacencies[l]), Matrix(a));
  for (const auto& s : p.pool_matrices) EXPECT_EQ(Matrix(s), Matrix(Matrix::Identity(9, 9)));
}

TEST(Pyramid, NdpShrinksAndBottomsOut) {
  const auto p = build_pyramid(path3(), row_sums(path3()), PoolMethod::Ndp, 4);
  EXPECT_EQ(p.vertices(0), 3);
  EXPECT_EQ(p.vertices(1), 2);
  EXPECT_EQ(p.vertices(2), 1);
  EXPECT_EQ(p.vertices(3), 1);
}

TEST(Pyramid, Names) {
  for (auto m : {PoolMethod::NoPool, PoolMethod::Graclus, PoolMethod::Nmf, PoolMethod::Ndp})
    EXPECT_EQ(parse_pool_method(to_string(m)), m);
  EXPECT_THROW(parse_pool_method("bogus"), InvalidArgument);
  EXPECT_THROW(build_pyramid(path3(), row_sums(path3()), PoolMethod::Ndp, 0), InvalidArgument);
}
