#pragma once

// Linear readout over graph embeddings: one-hot ridge regression, the nested
// model-selection protocol, and LDA projection.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "json.hpp"

#include "pyrgnn/datasets.hpp"
#include "pyrgnn/errors.hpp"
#include "pyrgnn/graph.hpp"
#include "pyrgnn/pooling.hpp"
#include "pyrgnn/random.hpp"
#include "pyrgnn/reservoir.hpp"

namespace pyrgnn {

// ---------------------------------------------------------------------------
// Ridge
// ---------------------------------------------------------------------------

struct RidgeModel {
  Matrix weights;  // H x C
  Vector bias;     // C
  double alpha = 1.0;
  // Per-dimension standardization learned on the training set.
  Vector mean;
  Vector scale;

  int num_classes() const { return static_cast<int>(weights.cols()); }
};

namespace detail {

inline int class_count(const std::vector<int>& labels) {
  if (labels.empty()) throw InvalidArgument("no labels");
  int c = 0;
  for (int l : labels) {
    if (l < 0) throw InvalidArgument("labels must be non-negative");
    c = std::max(c, l + 1);
  }
  return c;
}

inline Matrix standardized(const Matrix& z, const Vector& mean, const Vector& scale) {
  return (z.rowwise() - mean.transpose()).array().rowwise() / scale.transpose().array();
}

/// [Z_std | 1]
inline Matrix augmented(const Matrix& z, const RidgeModel& m) {
  Matrix out(z.rows(), z.cols() + 1);
  out.leftCols(z.cols()) = standardized(z, m.mean, m.scale);
  out.col(z.cols()).setOnes();
  return out;
}

inline Matrix one_hot(const std::vector<int>& labels, int classes) {
  Matrix y = Matrix::Zero(static_cast<Index>(labels.size()), classes);
  for (std::size_t i = 0; i < labels.size(); ++i) y(static_cast<Index>(i), labels[i]) = 1.0;
  return y;
}

}  // namespace detail

/// Solves (Z^T Z + alpha I) B = Z^T Y with Z the standardized, bias-augmented
/// embeddings and Y one-hot targets. classes = 0 infers the count from labels.
inline RidgeModel fit_ridge(const Matrix& embeddings, const std::vector<int>& labels, double alpha,
                            int classes = 0, bool standardize = true) {
  if (!(alpha > 0.0)) throw InvalidArgument("alpha must be positive");
  if (static_cast<std::size_t>(embeddings.rows()) != labels.size())
    throw DimensionMismatch("one label per embedding row");
  const int c = std::max(classes, detail::class_count(labels));
  if (embeddings.rows() < c) throw TooFewSamples("ridge needs at least as many samples as classes");

  RidgeModel m;
  m.alpha = alpha;
  const Index h = embeddings.cols();
  if (standardize) {
    m.mean = embeddings.colwise().mean().transpose();
    m.scale.resize(h);
    for (Index j = 0; j < h; ++j) {
      const double var = (embeddings.col(j).array() - m.mean[j]).square().mean();
      m.scale[j] = var > 0.0 ? std::sqrt(var) : 1.0;
    }
  } else {
    m.mean = Vector::Zero(h);
    m.scale = Vector::Ones(h);
  }
  const Matrix z = detail::augmented(embeddings, m);
  Matrix gram = z.transpose() * z;
  gram.diagonal().array() += alpha;
  const Matrix rhs = z.transpose() * detail::one_hot(labels, c);
  const Matrix b = gram.llt().solve(rhs);
  m.weights = b.topRows(h);
  m.bias = b.row(h).transpose();
  return m;
}

/// ||(Z^T Z + alpha I) B - Z^T Y|| / ||Z^T Y|| for a fitted model on its training data.
inline double normal_equation_residual(const RidgeModel& m, const Matrix& embeddings, const std::vector<int>& labels) {
  const Matrix z = detail::augmented(embeddings, m);
  Matrix b(m.weights.rows() + 1, m.weights.cols());
  b.topRows(m.weights.rows()) = m.weights;
  b.row(m.weights.rows()) = m.bias.transpose();
  Matrix gram = z.transpose() * z;
  gram.diagonal().array() += m.alpha;
  const Matrix rhs = z.transpose() * detail::one_hot(labels, m.num_classes());
  const double scale = rhs.norm();
  return (gram * b - rhs).norm() / (scale > 0.0 ? scale : 1.0);
}

inline Matrix decision_scores(const RidgeModel& m, const Matrix& embeddings) {
  if (embeddings.cols() != m.weights.rows()) throw DimensionMismatch("embedding width does not match the model");
  return (detail::standardized(embeddings, m.mean, m.scale) * m.weights).rowwise() + m.bias.transpose();
}

/// Argmax class per row; ties go to the smallest class id.
inline std::vector<int> predict(const RidgeModel& m, const Matrix& embeddings) {
  const Matrix s = decision_scores(m, embeddings);
  std::vector<int> out(static_cast<std::size_t>(s.rows()));
  for (Index i = 0; i < s.rows(); ++i) {
    Index best = 0;
    for (Index c = 1; c < s.cols(); ++c)
      if (s(i, c) > s(i, best)) best = c;
    out[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return out;
}

inline double accuracy(const std::vector<int>& predicted, const std::vector<int>& truth) {
  if (predicted.size() != truth.size()) throw DimensionMismatch("prediction count");
  if (truth.empty()) return 0.0;
  std::size_t hit = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hit += predicted[i] == truth[i];
  return static_cast<double>(hit) / static_cast<double>(truth.size());
}

// ---------------------------------------------------------------------------
// LDA
// ---------------------------------------------------------------------------

/// Projects onto the top out_dim discriminant directions of the generalized
/// problem S_b v = lambda (S_w + 1e-6 I) v. Each direction is signed so that
/// its first nonzero component is positive; data are centred on the global mean.
inline Matrix lda_project(const Matrix& embeddings, const std::vector<int>& labels, int out_dim) {
  if (static_cast<std::size_t>(embeddings.rows()) != labels.size())
    throw DimensionMismatch("one label per embedding row");
  const int c = detail::class_count(labels);
  if (out_dim < 1 || out_dim > c - 1)
    throw InvalidArgument("LDA output dimension must lie in [1, classes - 1] = [1, " + std::to_string(c - 1) + "]");
  const Index h = embeddings.cols();
  if (out_dim > h) throw InvalidArgument("LDA output dimension exceeds the embedding width");

  const Vector mu = embeddings.colwise().mean().transpose();
  Matrix means = Matrix::Zero(c, h);
  std::vector<double> counts(static_cast<std::size_t>(c), 0.0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    means.row(labels[i]) += embeddings.row(static_cast<Index>(i));
    counts[static_cast<std::size_t>(labels[i])] += 1.0;
  }
  Matrix sb = Matrix::Zero(h, h);
  for (int k = 0; k < c; ++k) {
    if (counts[static_cast<std::size_t>(k)] == 0.0) continue;
    means.row(k) /= counts[static_cast<std::size_t>(k)];
    const Vector d = means.row(k).transpose() - mu;
    sb += counts[static_cast<std::size_t>(k)] * d * d.transpose();
  }
  Matrix sw = Matrix::Zero(h, h);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const Vector d = embeddings.row(static_cast<Index>(i)).transpose() - means.row(labels[i]).transpose();
    sw += d * d.transpose();
  }
  sw.diagonal().array() += 1e-6;

  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> solver(sb, sw);
  if (solver.info() != Eigen::Success) throw NonConvergence("LDA eigenproblem failed", 0.0, 0.0);
  // Eigenvalues are ascending; take the last out_dim columns in reverse.
  Matrix basis(h, out_dim);
  for (int k = 0; k < out_dim; ++k) {
    Vector v = solver.eigenvectors().col(h - 1 - k);
    for (Index j = 0; j < h; ++j) {
      if (std::abs(v[j]) > 1e-12) {
        if (v[j] < 0.0) v = -v;
        break;
      }
    }
    basis.col(k) = v;
  }
  return (embeddings.rowwise() - mu.transpose()) * basis;
}

// ---------------------------------------------------------------------------
// Parallel helper
// ---------------------------------------------------------------------------

inline int default_jobs() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : static_cast<int>(n);
}

/// Calls body(i) for i in [0, n) on up to jobs threads. The first exception
/// is rethrown after all workers have stopped.
inline void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(jobs, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto run = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(n);
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

// ---------------------------------------------------------------------------
// Nested model selection
// ---------------------------------------------------------------------------

struct HyperConfig {
  double rho_target = 0.9;
  double omega_in = 0.5;
  double omega_hid = 0.5;
  double alpha = 1.0;
};

struct Architecture {
  PoolMethod method = PoolMethod::NoPool;
  std::size_t levels = 2;
  int hidden_units = 50;
};

struct Protocol {
  int n_configs = 100;
  int n_seeds = 3;
  std::vector<double> alpha_grid{1e2, 1e1, 1e0, 1e-1, 1e-2};
  double rho_min = 0.1, rho_max = 0.9;
  double omega_min = 0.1, omega_max = 0.8;
  double epsilon = 1e-5;
  int max_iter = 50;
  PoolOptions pooling;
  std::uint64_t seed = 0;
  int jobs = 1;

  void validate() const {
    if (n_configs < 1 || n_seeds < 1) throw InvalidArgument("need at least one config and one seed");
    if (alpha_grid.empty()) throw InvalidArgument("alpha grid is empty");
    for (double a : alpha_grid)
      if (!(a > 0.0)) throw InvalidArgument("alpha values must be positive");
  }
};

struct FoldResult {
  int fold = 0;
  double accuracy = 0.0;
  double val_accuracy = 0.0;
  double train_time_s = 0.0;
  double test_time_s = 0.0;
  HyperConfig best;
};

struct CvReport {
  std::string dataset;
  PoolMethod method = PoolMethod::NoPool;
  std::size_t levels = 0;
  int hidden_units = 0;
  std::vector<FoldResult> folds;
  double pyramid_time_s = 0.0;

  std::vector<double> per_fold_accuracy() const {
    std::vector<double> out;
    for (const auto& f : folds) out.push_back(f.accuracy);
    return out;
  }
  double mean() const {
    if (folds.empty()) return 0.0;
    double s = 0.0;
    for (const auto& f : folds) s += f.accuracy;
    return s / static_cast<double>(folds.size());
  }
  /// Population standard deviation over folds.
  double stddev() const {
    if (folds.empty()) return 0.0;
    const double m = mean();
    double s = 0.0;
    for (const auto& f : folds) s += (f.accuracy - m) * (f.accuracy - m);
    return std::sqrt(s / static_cast<double>(folds.size()));
  }
  double train_time_s() const {
    double s = 0.0;
    for (const auto& f : folds) s += f.train_time_s;
    return folds.empty() ? 0.0 : s / static_cast<double>(folds.size());
  }
  double test_time_s() const {
    double s = 0.0;
    for (const auto& f : folds) s += f.test_time_s;
    return folds.empty() ? 0.0 : s / static_cast<double>(folds.size());
  }
};

inline constexpr const char* kCvHeader =
    "dataset,method,L,H,fold,accuracy,t_tr_s,t_ts_s,best_rho,best_omega_in,best_omega_hid,best_alpha";

inline void write_cv_csv(std::ostream& os, const CvReport& r, bool ratio_column = false) {
  os << kCvHeader << (ratio_column ? ",ratio" : "") << '\n';
  char buf[320];
  for (const auto& f : r.folds) {
    std::snprintf(buf, sizeof buf, ",%zu,%d,%d,%.17g,%.6f,%.6f,%.17g,%.17g,%.17g,%.17g", r.levels, r.hidden_units,
                  f.fold, f.accuracy, f.train_time_s, f.test_time_s, f.best.rho_target, f.best.omega_in,
                  f.best.omega_hid, f.best.alpha);
    os << r.dataset << ',' << to_string(r.method) << buf;
    if (ratio_column) {
      const double t = f.train_time_s + f.test_time_s;
      std::snprintf(buf, sizeof buf, ",%.17g", t > 0.0 ? f.accuracy / t : 0.0);
      os << buf;
    }
    os << '\n';
  }
}

/// JSON form of the report. include_timing = false drops every wall-clock
/// field, which leaves a document that depends only on data and seed.
inline nlohmann::json to_json(const CvReport& r, bool include_timing = true) {
  nlohmann::json folds = nlohmann::json::array();
  for (const auto& f : r.folds) {
    nlohmann::json j = {{"dataset", r.dataset},
                        {"method", std::string(to_string(r.method))},
                        {"L", r.levels},
                        {"H", r.hidden_units},
                        {"fold", f.fold},
                        {"accuracy", f.accuracy},
                        {"val_accuracy", f.val_accuracy},
                        {"best_rho", f.best.rho_target},
                        {"best_omega_in", f.best.omega_in},
                        {"best_omega_hid", f.best.omega_hid},
                        {"best_alpha", f.best.alpha}};
    if (include_timing) {
      j["t_tr_s"] = f.train_time_s;
      j["t_ts_s"] = f.test_time_s;
    }
    folds.push_back(std::move(j));
  }
  nlohmann::json out = {{"dataset", r.dataset},
                        {"method", std::string(to_string(r.method))},
                        {"L", r.levels},
                        {"H", r.hidden_units},
                        {"mean_accuracy", r.mean()},
                        {"std_accuracy", r.stddev()},
                        {"folds", std::move(folds)}};
  if (include_timing) {
    out["t_tr_s"] = r.train_time_s();
    out["t_ts_s"] = r.test_time_s();
    out["pyramid_time_s"] = r.pyramid_time_s;
  }
  return out;
}

/// The first n HyperConfigs drawn from the protocol seed (alpha left at its default).
inline std::vector<HyperConfig> sample_configs(const Protocol& p) {
  Rng rng(derive_seed(p.seed, "hyper-configs"));
  std::vector<HyperConfig> out(static_cast<std::size_t>(p.n_configs));
  for (auto& c : out) {
    c.rho_target = rng.uniform(p.rho_min, p.rho_max);
    c.omega_in = rng.uniform(p.omega_min, p.omega_max);
    c.omega_hid = rng.uniform(p.omega_min, p.omega_max);
  }
  return out;
}

/// Graphs and pyramids shared by every configuration of a protocol run.
struct PreparedCorpus {
  const std::vector<Graph>* graphs = nullptr;
  std::vector<GraphPyramid> pyramids;
  Index feature_dim = 0;
  double pyramid_time_s = 0.0;
};

inline PreparedCorpus prepare_corpus(const std::vector<Graph>& graphs, Index feature_dim, const Architecture& arch,
                                     const PoolOptions& pooling, int jobs,
                                     const std::function<GraphPyramid(std::size_t)>& pyramid_source = {}) {
  PreparedCorpus pc;
  pc.graphs = &graphs;
  pc.feature_dim = feature_dim;
  pc.pyramids.resize(graphs.size());
  const auto t0 = std::chrono::steady_clock::now();
  parallel_for(graphs.size(), jobs, [&](std::size_t i) {
    if (pyramid_source) {
      pc.pyramids[i] = pyramid_source(i);
    } else {
      PoolOptions o = pooling;
      o.seed = derive_seed(pooling.seed, "graph-pyramid", i);
      pc.pyramids[i] = build_pyramid(graphs[i], arch.method, arch.levels, o);
    }
  });
  pc.pyramid_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return pc;
}

inline ReservoirConfig reservoir_config(const HyperConfig& h, const Architecture& arch, const Protocol& p,
                                        std::uint64_t seed) {
  ReservoirConfig rc;
  rc.hidden_units = arch.hidden_units;
  rc.rho_target = h.rho_target;
  rc.omega_in = h.omega_in;
  rc.omega_hid = h.omega_hid;
  rc.epsilon = p.epsilon;
  rc.max_iter = p.max_iter;
  rc.seed = seed;
  return rc;
}

/// Embeds the selected graphs (rows follow `which`). Graphs with no vertices
/// embed to zero.
inline Matrix embed_corpus(const PreparedCorpus& pc, const std::vector<ReservoirLayer>& layers,
                           const ReservoirConfig& rc, const std::vector<std::size_t>& which, int jobs) {
  Matrix out = Matrix::Zero(static_cast<Index>(which.size()), rc.hidden_units);
  parallel_for(which.size(), jobs, [&](std::size_t r) {
    const std::size_t i = which[r];
    const Graph& g = (*pc.graphs)[i];
    if (g.num_vertices() == 0) return;
    out.row(static_cast<Index>(r)) = embed_stack(layers, pc.pyramids[i], g.features(), rc).embedding.transpose();
  });
  return out;
}

/// Labels of the selection phase: test-fold entries are hidden (-1).
class SelectionView {
 public:
  SelectionView(const std::vector<int>& labels, const Fold& fold) : labels_(labels.size(), -1) {
    for (std::size_t i : fold.train) labels_[i] = labels[i];
    for (std::size_t i : fold.val) labels_[i] = labels[i];
    train_ = fold.train;
    val_ = fold.val;
  }

  const std::vector<std::size_t>& train() const { return train_; }
  const std::vector<std::size_t>& val() const { return val_; }

  std::vector<int> labels_of(const std::vector<std::size_t>& idx) const {
    std::vector<int> out;
    out.reserve(idx.size());
    for (std::size_t i : idx) {
      if (labels_[i] < 0) throw PreconditionViolated("selection touched a held-out label");
      out.push_back(labels_[i]);
    }
    return out;
  }

 private:
  std::vector<int> labels_;
  std::vector<std::size_t> train_;
  std::vector<std::size_t> val_;
};

namespace detail {

inline Matrix rows_of(const Matrix& m, const std::vector<std::size_t>& idx) {
  Matrix out(static_cast<Index>(idx.size()), m.cols());
  for (std::size_t r = 0; r < idx.size(); ++r) out.row(static_cast<Index>(r)) = m.row(static_cast<Index>(idx[r]));
  return out;
}

}  // namespace detail

/// Reservoir seed of (config, repetition).
inline std::uint64_t reservoir_seed(const Protocol& p, std::size_t config, int repetition) {
  return derive_seed(p.seed, "reservoir", config * 64 + static_cast<std::size_t>(repetition));
}

/// Nested model selection over the bundle's external folds.
///
/// The configurations are drawn once and shared by all folds, so each
/// (config, seed) pair embeds the corpus once; per fold the best
/// (config, alpha) by mean validation accuracy over seeds is refit on
/// train + validation and scored on the test fold, averaged over the seeds.
inline CvReport nested_cv(const DatasetBundle& bundle, const Architecture& arch, const Protocol& protocol,
                          const std::function<GraphPyramid(std::size_t)>& pyramid_source = {},
                          std::ostream* log = nullptr) {
  protocol.validate();
  if (bundle.folds.empty()) throw PreconditionViolated("bundle has no folds");
  const int classes = bundle.num_classes();
  const std::size_t n_folds = bundle.folds.size();
  const std::size_t n_alpha = protocol.alpha_grid.size();

  CvReport report;
  report.dataset = bundle.name;
  report.method = arch.method;
  report.levels = arch.levels;
  report.hidden_units = arch.hidden_units;

  const PreparedCorpus pc =
      prepare_corpus(bundle.graphs, bundle.feature_dim, arch, protocol.pooling, protocol.jobs, pyramid_source);
  report.pyramid_time_s = pc.pyramid_time_s;

  std::vector<SelectionView> views;
  for (const auto& f : bundle.folds) views.emplace_back(bundle.labels, f);
  std::vector<std::size_t> all(bundle.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;

  // val_acc[fold][config][alpha], summed over seeds.
  const std::vector<HyperConfig> configs = sample_configs(protocol);
  std::vector<std::vector<std::vector<double>>> val_acc(
      n_folds, std::vector<std::vector<double>>(configs.size(), std::vector<double>(n_alpha, 0.0)));
  for (std::size_t c = 0; c < configs.size(); ++c) {
    for (int s = 0; s < protocol.n_seeds; ++s) {
      const ReservoirConfig rc = reservoir_config(configs[c], arch, protocol, reservoir_seed(protocol, c, s));
      const auto layers = init_stack(rc, bundle.feature_dim, arch.levels);
      const Matrix emb = embed_corpus(pc, layers, rc, all, protocol.jobs);
      for (std::size_t f = 0; f < n_folds; ++f) {
        const auto& v = views[f];
        const Matrix ztr = detail::rows_of(emb, v.train());
        const Matrix zva = detail::rows_of(emb, v.val());
        const auto ytr = v.labels_of(v.train());
        const auto yva = v.labels_of(v.val());
        for (std::size_t a = 0; a < n_alpha; ++a) {
          const RidgeModel m = fit_ridge(ztr, ytr, protocol.alpha_grid[a], classes);
          val_acc[f][c][a] += accuracy(predict(m, zva), yva);
        }
      }
    }
    if (log && (c + 1) % 10 == 0) *log << "  configs " << c + 1 << '/' << configs.size() << '\n' << std::flush;
  }

  for (std::size_t f = 0; f < n_folds; ++f) {
    // Selection: strict improvement keeps the earliest (config, alpha) on ties.
    std::size_t best_c = 0, best_a = 0;
    for (std::size_t c = 0; c < configs.size(); ++c)
      for (std::size_t a = 0; a < n_alpha; ++a)
        if (val_acc[f][c][a] > val_acc[f][best_c][best_a]) {
          best_c = c;
          best_a = a;
        }
    FoldResult fr;
    fr.fold = static_cast<int>(f);
    fr.best = configs[best_c];
    fr.best.alpha = protocol.alpha_grid[best_a];
    fr.val_accuracy = val_acc[f][best_c][best_a] / protocol.n_seeds;

    // Final evaluation; the only place test labels are read.
    const Fold& fold = bundle.folds[f];
    std::vector<std::size_t> fit_idx = fold.train;
    fit_idx.insert(fit_idx.end(), fold.val.begin(), fold.val.end());
    std::vector<int> yfit, ytest;
    for (std::size_t i : fit_idx) yfit.push_back(bundle.labels[i]);
    for (std::size_t i : fold.test) ytest.push_back(bundle.labels[i]);
    double acc = 0.0, t_tr = 0.0, t_ts = 0.0;
    for (int s = 0; s < protocol.n_seeds; ++s) {
      const ReservoirConfig rc = reservoir_config(fr.best, arch, protocol, reservoir_seed(protocol, best_c, s));
      const auto t0 = std::chrono::steady_clock::now();
      const auto layers = init_stack(rc, bundle.feature_dim, arch.levels);
      const Matrix zfit = embed_corpus(pc, layers, rc, fit_idx, protocol.jobs);
      const RidgeModel m = fit_ridge(zfit, yfit, fr.best.alpha, classes);
      const auto t1 = std::chrono::steady_clock::now();
      const Matrix ztest = embed_corpus(pc, layers, rc, fold.test, protocol.jobs);
      acc += accuracy(predict(m, ztest), ytest);
      const auto t2 = std::chrono::steady_clock::now();
      t_tr += std::chrono::duration<double>(t1 - t0).count();
      t_ts += std::chrono::duration<double>(t2 - t1).count();
    }
    fr.accuracy = acc / protocol.n_seeds;
    fr.train_time_s = t_tr / protocol.n_seeds + pc.pyramid_time_s;
    fr.test_time_s = t_ts / protocol.n_seeds;
    report.folds.push_back(fr);
  }
  return report;
}

}  // namespace pyrgnn
