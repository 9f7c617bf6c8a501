#include <gtest/gtest.h>

#include <atomic>
#include <sstream>

#include "pyrgnn/datasets.hpp"
#include "pyrgnn/readout.hpp"
#include "test_support.hpp"

using namespace pyrgnn;

namespace {

// n samples per class around well separated class means in h dimensions.
void blobs(int classes, int per_class, Index h, double sep, Rng& rng, Matrix& z, std::vector<int>& y) {
  z.resize(classes * per_class, h);
  y.clear();
  Matrix means = fixtures::random_features(classes, h, rng) * sep;
  for (int c = 0; c < classes; ++c)
    for (int i = 0; i < per_class; ++i) {
      const Index r = c * per_class + i;
      for (Index j = 0; j < h; ++j) z(r, j) = means(c, j) + rng.normal();
      y.push_back(c);
    }
}

DatasetBundle tiny_corpus(std::uint64_t seed) {
  auto b = generate_synthetic(SyntheticConfig::preset(Difficulty::Easy, 30, seed));
  return make_folds(std::move(b), 2, 0.1, seed);
}

Protocol tiny_protocol(int jobs) {
  Protocol p;
  p.n_configs = 2;
  p.n_seeds = 1;
  p.seed = 5;
  p.jobs = jobs;
  return p;
}

}  // namespace

TEST(Ridge, HandSolvedNormalEquations) {
  // Z = [1 1; 2 1; 3 1], Y = [1 0; 0 1; 0 1], alpha = 1:
  // [15 6; 6 4] B = [1 5; 1 2]  ->  B = [-1/12 1/3; 3/8 0].
  Matrix z(3, 1);
  z << 1, 2, 3;
  const auto m = fit_ridge(z, {0, 1, 1}, 1.0, 0, false);
  EXPECT_NEAR(m.weights(0, 0), -1.0 / 12.0, 1e-14);
  EXPECT_NEAR(m.weights(0, 1), 1.0 / 3.0, 1e-14);
  EXPECT_NEAR(m.bias[0], 3.0 / 8.0, 1e-14);
  EXPECT_NEAR(m.bias[1], 0.0, 1e-14);
}

TEST(Ridge, NormalEquationResidual) {
  Rng rng(1);
  for (double alpha : {1e-2, 1.0, 1e2}) {
    Matrix z;
    std::vector<int> y;
    blobs(4, 50, 30, 1.0, rng, z, y);
    const auto m = fit_ridge(z, y, alpha);
    EXPECT_LT(normal_equation_residual(m, z, y), 1e-8);
  }
}

TEST(Ridge, SeparatesBlobs) {
  Rng rng(2);
  Matrix z;
  std::vector<int> y;
  blobs(3, 100, 10, 4.0, rng, z, y);
  const auto m = fit_ridge(z, y, 1.0);
  EXPECT_GT(accuracy(predict(m, z), y), 0.95);
}

TEST(Ridge, ShuffledLabelsGiveChance) {
  Rng rng(3);
  Matrix z;
  std::vector<int> y;
  blobs(3, 300, 20, 3.0, rng, z, y);
  std::vector<std::size_t> idx(y.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  rng.shuffle(idx);
  const std::vector<std::size_t> tr(idx.begin(), idx.begin() + 600), ts(idx.begin() + 600, idx.end());
  std::vector<int> ytr, yts;
  for (auto i : tr) ytr.push_back(y[i]);
  for (auto i : ts) yts.push_back(y[i]);
  rng.shuffle(ytr);
  const auto m = fit_ridge(detail::rows_of(z, tr), ytr, 1.0);
  EXPECT_NEAR(accuracy(predict(m, detail::rows_of(z, ts)), yts), 1.0 / 3.0, 0.1);
}

TEST(Ridge, ConstantColumnsAreHarmless) {
  Matrix z(4, 2);
  z << 1, 5, 2, 5, 3, 5, 4, 5;
  const auto m = fit_ridge(z, {0, 0, 1, 1}, 0.1);
  EXPECT_EQ(m.scale[1], 1.0);
  EXPECT_EQ(predict(m, z), (std::vector<int>{0, 0, 1, 1}));
}

TEST(Ridge, Errors) {
  Matrix z = Matrix::Ones(3, 2);
  EXPECT_THROW(fit_ridge(z, {0, 1, 0}, 0.0), InvalidArgument);
  EXPECT_THROW(fit_ridge(z, {0, 1}, 1.0), DimensionMismatch);
  EXPECT_THROW(fit_ridge(z, {0, 1, 2}, 1.0, 5), TooFewSamples);
  const auto m = fit_ridge(z, {0, 1, 0}, 1.0);
  EXPECT_THROW(predict(m, Matrix::Ones(2, 3)), DimensionMismatch);
}

TEST(Ridge, TiesGoToSmallestClass) {
  RidgeModel m;
  m.weights = Matrix::Zero(1, 3);
  m.bias = Vector::Zero(3);
  m.mean = Vector::Zero(1);
  m.scale = Vector::Ones(1);
  EXPECT_EQ(predict(m, Matrix::Ones(2, 1)), (std::vector<int>{0, 0}));
}

TEST(Lda, SeparatesClasses) {
  Rng rng(4);
  Matrix z;
  std::vector<int> y;
  blobs(3, 80, 12, 3.0, rng, z, y);
  const Matrix p = lda_project(z, y, 2);
  ASSERT_EQ(p.rows(), z.rows());
  ASSERT_EQ(p.cols(), 2);
  // Nearest projected class mean recovers the label.
  Matrix means = Matrix::Zero(3, 2);
  for (int i = 0; i < p.rows(); ++i) means.row(y[i]) += p.row(i) / 80.0;
  int hits = 0;
  for (int i = 0; i < p.rows(); ++i) {
    Index best;
    (means.rowwise() - p.row(i)).rowwise().squaredNorm().minCoeff(&best);
    hits += best == y[i];
  }
  EXPECT_GT(hits, 0.95 * p.rows());
  EXPECT_LT(p.colwise().mean().cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_EQ(p, lda_project(z, y, 2));
}

TEST(Lda, DimensionLimits) {
  Rng rng(5);
  Matrix z;
  std::vector<int> y;
  blobs(2, 20, 4, 2.0, rng, z, y);
  EXPECT_THROW(lda_project(z, y, 2), InvalidArgument);
  EXPECT_THROW(lda_project(z, y, 0), InvalidArgument);
  EXPECT_EQ(lda_project(z, y, 1).cols(), 1);
}

TEST(ParallelFor, CoversAndPropagates) {
  std::vector<std::atomic<int>> hits(100);
  parallel_for(100, 4, [&](std::size_t i) { hits[i]++; });
  for (auto& h : hits) EXPECT_EQ(h.load(), 1);
  EXPECT_THROW(parallel_for(50, 3,
                            [](std::size_t i) {
                              if (i == 17) throw InvalidArgument("boom");
                            }),
               InvalidArgument);
}

TEST(Selection, HidesTestLabels) {
  Fold f{{0, 1}, {2}, {3, 4}};
  const SelectionView v({0, 1, 2, 0, 1}, f);
  EXPECT_EQ(v.labels_of({0, 1, 2}), (std::vector<int>{0, 1, 2}));
  EXPECT_THROW(v.labels_of({3}), PreconditionViolated);
}

TEST(Protocol, ConfigsInRangeAndDeterministic) {
  Protocol p;
  p.seed = 9;
  const auto a = sample_configs(p);
  const auto b = sample_configs(p);
  ASSERT_EQ(a.size(), 100u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_GE(a[i].rho_target, 0.1);
    EXPECT_LT(a[i].rho_target, 0.9);
    EXPECT_GE(a[i].omega_in, 0.1);
    EXPECT_LT(a[i].omega_hid, 0.8);
    EXPECT_EQ(a[i].rho_target, b[i].rho_target);
  }
  EXPECT_EQ(p.alpha_grid, (std::vector<double>{1e2, 1e1, 1e0, 1e-1, 1e-2}));
  EXPECT_EQ(p.n_seeds, 3);
  Protocol bad;
  bad.alpha_grid = {1.0, -1.0};
  EXPECT_THROW(bad.validate(), InvalidArgument);
}

TEST(NestedCv, SmallRunIsDeterministicAcrossJobCounts) {
  const auto bundle = tiny_corpus(3);
  Architecture arch;
  arch.method = PoolMethod::Ndp;
  arch.hidden_units = 10;
  const auto r1 = nested_cv(bundle, arch, tiny_protocol(1));
  const auto r2 = nested_cv(bundle, arch, tiny_protocol(3));
  ASSERT_EQ(r1.folds.size(), 2u);
  for (const auto& f : r1.folds) {
    EXPECT_GE(f.accuracy, 0.0);
    EXPECT_LE(f.accuracy, 1.0);
    EXPECT_GT(f.train_time_s, 0.0);
    EXPECT_GT(f.test_time_s, 0.0);
  }
  EXPECT_EQ(to_json(r1, false).dump(), to_json(r2, false).dump());
  EXPECT_FALSE(to_json(r1, false).contains("t_tr_s"));
  EXPECT_TRUE(to_json(r1).contains("t_tr_s"));
}

TEST(NestedCv, NeedsFolds) {
  auto b = generate_synthetic(SyntheticConfig::preset(Difficulty::Easy, 6, 1));
  EXPECT_THROW(nested_cv(b, Architecture{}, tiny_protocol(1)), PreconditionViolated);
}

TEST(CvReport, CsvAndSummary) {
  CvReport r;
  r.dataset = "B-easy";
  r.method = PoolMethod::Ndp;
  r.levels = 2;
  r.hidden_units = 50;
  r.folds.push_back(FoldResult{0, 0.9, 0.9, 2.0, 1.0, {}});
  r.folds.push_back(FoldResult{1, 0.7, 0.8, 4.0, 1.0, {}});
  EXPECT_DOUBLE_EQ(r.mean(), 0.8);
  EXPECT_NEAR(r.stddev(), 0.1, 1e-15);
  EXPECT_DOUBLE_EQ(r.train_time_s(), 3.0);
  std::ostringstream os;
  write_cv_csv(os, r, true);
  std::istringstream in(os.str());
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_EQ(header, std::string(kCvHeader) + ",ratio");
  EXPECT_EQ(row.rfind("B-easy,ndp,2,50,0,0.9", 0), 0u);
  EXPECT_EQ(std::count(row.begin(), row.end(), ','), std::count(header.begin(), header.end(), ','));
  EXPECT_NE(row.find(",0.29999999999999999"), std::string::npos);  // 0.9 / 3 s
}
