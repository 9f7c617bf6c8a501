#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include "json.hpp"
#include "pyrgnn/datasets.hpp"

using namespace pyrgnn;
namespace fs = std::filesystem;

namespace {

const fs::path kData = PYRGNN_TEST_DATA;

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("pyrgnn_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

DatasetBundle labelled_bundle(std::vector<int> labels) {
  DatasetBundle b;
  b.name = "toy";
  b.feature_dim = 1;
  for (int l : labels) {
    b.graphs.emplace_back(adjacency_from_edges(2, {{0, 1, 1.0}}), Matrix::Ones(2, 1), l);
    b.labels.push_back(l);
  }
  return b;
}

}  // namespace

TEST(Synthetic, ConfigValidation) {
  auto c = SyntheticConfig::preset(Difficulty::Easy, 2, 1);
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = SyntheticConfig::preset(Difficulty::Easy, 30, 1);
  c.knn_k = 0;
  EXPECT_THROW(c.validate(), InvalidArgument);
  EXPECT_EQ(SyntheticConfig::preset(Difficulty::Easy, 30, 1).knn_k, 5);
  EXPECT_EQ(SyntheticConfig::preset(Difficulty::Hard, 30, 1).knn_k, 4);
  EXPECT_LT(SyntheticConfig::preset(Difficulty::Easy, 30, 1).cluster_spread,
            SyntheticConfig::preset(Difficulty::Hard, 30, 1).cluster_spread);
  EXPECT_EQ(SyntheticConfig::small(Difficulty::Hard, 1).n_graphs, 300);
  EXPECT_EQ(parse_difficulty("hard"), Difficulty::Hard);
  EXPECT_THROW(parse_difficulty("medium"), InvalidArgument);
}

TEST(Synthetic, GraphInvariants) {
  for (auto d : {Difficulty::Easy, Difficulty::Hard}) {
    const auto b = generate_synthetic(SyntheticConfig::preset(d, 60, 3));
    ASSERT_EQ(b.size(), 60u);
    EXPECT_EQ(b.feature_dim, 5);
    for (const auto& g : b.graphs) {
      EXPECT_TRUE(is_symmetric(g.adjacency()));
      EXPECT_TRUE(has_zero_diagonal(g.adjacency()));
      EXPECT_GE(g.num_vertices(), 100);
      EXPECT_LE(g.num_vertices(), 195);
      const Matrix& x = g.features();
      EXPECT_TRUE(((x.array() == 0.0) || (x.array() == 1.0)).all());
      EXPECT_TRUE((x.rowwise().sum().array() == 1.0).all());
      // Every colour is used by 20..39 points.
      for (Index c = 0; c < 5; ++c) {
        EXPECT_GE(x.col(c).sum(), 20.0);
        EXPECT_LE(x.col(c).sum(), 39.0);
      }
      // Unit weights, minimum degree from the k-NN rule.
      const Vector deg = row_sums(g.adjacency());
      EXPECT_GE(deg.minCoeff(), d == Difficulty::Easy ? 5.0 : 3.0);
    }
  }
}

TEST(Synthetic, BalancedLabelsAndDeterminism) {
  const auto a = generate_synthetic(SyntheticConfig::preset(Difficulty::Easy, 100, 9));
  std::map<int, int> counts;
  for (int l : a.labels) ++counts[l];
  ASSERT_EQ(counts.size(), 3u);
  for (const auto& [l, c] : counts) EXPECT_LE(std::abs(c - 100 / 3), 1);
  const auto b = generate_synthetic(SyntheticConfig::preset(Difficulty::Easy, 100, 9));
  const auto c = generate_synthetic(SyntheticConfig::preset(Difficulty::Easy, 100, 10));
  bool any_diff = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(Matrix(a.graphs[i].adjacency()), Matrix(b.graphs[i].adjacency()));
    EXPECT_EQ(a.graphs[i].features(), b.graphs[i].features());
    any_diff |= a.graphs[i].num_vertices() != c.graphs[i].num_vertices();
  }
  EXPECT_TRUE(any_diff);
}

TEST(Synthetic, HardHasFewerEdgesThanEasy) {
  const auto easy = corpus_stats(generate_synthetic(SyntheticConfig::preset(Difficulty::Easy, 150, 1)).graphs);
  const auto hard = corpus_stats(generate_synthetic(SyntheticConfig::preset(Difficulty::Hard, 150, 1)).graphs);
  EXPECT_LT(hard.avg_stored_entries, easy.avg_stored_entries);
  EXPECT_NEAR(easy.avg_vertices, 147.82, 0.15 * 147.82);
  EXPECT_NEAR(easy.avg_stored_entries, 922.66, 0.15 * 922.66);
  EXPECT_NEAR(hard.avg_stored_entries, 572.32, 0.15 * 572.32);
}

TEST(Knn, UnionSymmetrization) {
  // Collinear points 0, 1, 3: with k = 1, point 2's nearest is 1, point 0's is 1.
  const std::vector<Point2> pts{{0.0, 0.0}, {1.0, 0.0}, {3.0, 0.0}};
  const Matrix a(knn_adjacency(pts, 1));
  Matrix expected(3, 3);
  expected << 0, 1, 0, 1, 0, 1, 0, 1, 0;
  EXPECT_EQ(a, expected);
  // Counting the point itself leaves no neighbours at k = 1.
  EXPECT_EQ(knn_adjacency(pts, 1, true).nonZeros(), 0);
  EXPECT_EQ(Matrix(knn_adjacency(pts, 2, true)), expected);
}

TEST(Knn, TiesGoToLowerIndex) {
  // Point 1 is equidistant from 0 and 2; point 2 prefers 3, so only 1's choice decides 1-2.
  const std::vector<Point2> pts{{-1.0, 0.0}, {0.0, 0.0}, {1.0, 0.0}, {1.1, 0.0}};
  const SparseMatrix a = knn_adjacency(pts, 1);
  EXPECT_EQ(a.coeff(1, 0), 1.0);
  EXPECT_EQ(a.coeff(1, 2), 0.0);
}

TEST(LoadTud, TriangleAndEdge) {
  const auto b = load_tud(kData / "tiny", "TINY");
  ASSERT_EQ(b.size(), 2u);
  EXPECT_EQ(b.graphs[0].num_vertices(), 3);
  EXPECT_EQ(b.graphs[0].num_edges(), 3u);
  EXPECT_EQ(b.graphs[1].num_vertices(), 2);
  EXPECT_EQ(b.graphs[1].num_edges(), 1u);
  // Labels 1 and -1 remap to 1 and 0.
  EXPECT_EQ(b.labels, (std::vector<int>{1, 0}));
  // Degree surrogate.
  EXPECT_EQ(b.feature_dim, 1);
  EXPECT_EQ(b.graphs[0].features(), Matrix::Constant(3, 1, 2.0));
  EXPECT_EQ(b.graphs[1].features(), Matrix::Constant(2, 1, 1.0));
}

TEST(LoadTud, LabelsAndAttributesConcatenate) {
  const auto b = load_tud(kData / "labeled", "LAB");
  EXPECT_EQ(b.feature_dim, 5);  // 3 one-hot label slots + 2 attributes
  Matrix x0(3, 5);
  x0 << 1, 0, 0, 0.5, -1.0, 0, 0, 1, 1.5, 2.0, 0, 1, 0, 0.25, 0.0;
  EXPECT_EQ(b.graphs[0].features(), x0);
  EXPECT_EQ(b.labels, (std::vector<int>{0, 1}));
}

TEST(LoadTud, Errors) {
  EXPECT_THROW(load_tud(kData / "cross", "X"), IndexError);
  EXPECT_THROW(load_tud(kData / "range", "R"), IndexError);
  try {
    load_tud(kData / "garbled", "G");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_NE(e.file().find("G_A.txt"), std::string::npos);
  }
  EXPECT_THROW(load_tud(kData / "missing", "M"), IoError);
}

TEST(WriteTud, RoundTrip) {
  const auto dir = scratch_dir("roundtrip");
  const auto cfg = SyntheticConfig::preset(Difficulty::Hard, 12, 4);
  const auto b = generate_synthetic(cfg);
  write_synthetic(b, cfg, dir);
  const auto back = load_tud(dir, b.name);
  ASSERT_EQ(back.size(), b.size());
  EXPECT_EQ(back.labels, b.labels);
  EXPECT_EQ(back.feature_dim, b.feature_dim);
  for (std::size_t i = 0; i < b.size(); ++i) {
    EXPECT_EQ(Matrix(back.graphs[i].adjacency()), Matrix(b.graphs[i].adjacency()));
    EXPECT_EQ(back.graphs[i].features(), b.graphs[i].features());
  }
  std::ifstream mf(dir / (b.name + "_manifest.json"));
  const auto manifest = nlohmann::json::parse(mf);
  EXPECT_EQ(manifest["difficulty"], "hard");
  EXPECT_EQ(manifest["seed"], 4);
  EXPECT_EQ(manifest["config"]["knn_k"], 4);
  fs::remove_all(dir);
}

TEST(WriteTud, WeightedAttributesRoundTrip) {
  const auto dir = scratch_dir("weighted");
  DatasetBundle b;
  b.name = "W";
  b.feature_dim = 2;
  Matrix x(3, 2);
  x << 0.1, -2.0, 1.0 / 3.0, 4.0, 5.5, 0.0;
  b.graphs.emplace_back(adjacency_from_edges(3, {{0, 1, 0.25}, {1, 2, 1.0 / 7.0}}), x, 0);
  b.graphs.emplace_back(adjacency_from_edges(2, {{0, 1, 2.0}}), Matrix::Ones(2, 2), 1);
  b.labels = {0, 1};
  write_tud(b, dir, "W");
  EXPECT_TRUE(fs::exists(dir / "W_edge_weights.txt"));
  const auto back = load_tud(dir, "W");
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(Matrix(back.graphs[i].adjacency()), Matrix(b.graphs[i].adjacency()));
    EXPECT_EQ(back.graphs[i].features(), b.graphs[i].features());
  }
  fs::remove_all(dir);
}

TEST(Folds, SizesAndStratification) {
  std::vector<int> labels;
  for (int i = 0; i < 100; ++i) labels.push_back(i < 50 ? 0 : 1);
  const auto b = make_folds(labelled_bundle(labels), 5, 0.1, 3);
  ASSERT_EQ(b.folds.size(), 5u);
  std::set<std::size_t> all_tests;
  for (const auto& f : b.folds) {
    EXPECT_EQ(f.test.size(), 20u);
    int zeros = 0;
    for (auto i : f.test) zeros += b.labels[i] == 0;
    EXPECT_EQ(zeros, 10);
    EXPECT_EQ(f.val.size(), 8u);
    EXPECT_EQ(f.train.size(), 72u);
    std::set<std::size_t> seen(f.test.begin(), f.test.end());
    for (auto i : f.val) EXPECT_TRUE(seen.insert(i).second);
    for (auto i : f.train) EXPECT_TRUE(seen.insert(i).second);
    EXPECT_EQ(seen.size(), 100u);
    all_tests.insert(f.test.begin(), f.test.end());
  }
  EXPECT_EQ(all_tests.size(), 100u);
}

TEST(Folds, Deterministic) {
  std::vector<int> labels;
  for (int i = 0; i < 60; ++i) labels.push_back(i % 3);
  const auto a = make_folds(labelled_bundle(labels), 5, 0.1, 11);
  const auto b = make_folds(labelled_bundle(labels), 5, 0.1, 11);
  const auto c = make_folds(labelled_bundle(labels), 5, 0.1, 12);
  bool differs = false;
  for (std::size_t f = 0; f < 5; ++f) {
    EXPECT_EQ(a.folds[f].test, b.folds[f].test);
    EXPECT_EQ(a.folds[f].val, b.folds[f].val);
    differs |= a.folds[f].test != c.folds[f].test;
  }
  EXPECT_TRUE(differs);
}

TEST(Folds, Errors) {
  EXPECT_THROW(make_folds(labelled_bundle({0, 0, 0, 1, 1}), 3, 0.1, 1), TooFewSamples);
  EXPECT_THROW(make_folds(labelled_bundle({0, 1}), 1, 0.1, 1), InvalidArgument);
  EXPECT_THROW(make_folds(labelled_bundle({0, 1}), 2, 1.0, 1), InvalidArgument);
}

TEST(Bundle, Validation) {
  auto b = labelled_bundle({0, 2});
  EXPECT_THROW(b.validate(), InvalidArgument);
  b = labelled_bundle({0, 1});
  b.labels.push_back(0);
  EXPECT_THROW(b.validate(), DimensionMismatch);
}
