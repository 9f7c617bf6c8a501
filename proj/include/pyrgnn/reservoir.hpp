#pragma once

// Untrained reservoir layers iterated to their fixed point and stacked over a
// coarsening pyramid.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>

#include "pyrgnn/graph.hpp"
#include "pyrgnn/pyramid.hpp"
#include "pyrgnn/random.hpp"

namespace pyrgnn {

struct ReservoirConfig {
  int hidden_units = 50;
  double rho_target = 0.9;
  double omega_in = 0.5;
  double omega_hid = 0.5;
  double epsilon = 1e-5;
  int max_iter = 50;
  std::uint64_t seed = 0;

  void validate() const {
    if (hidden_units < 1) throw InvalidArgument("hidden_units must be >= 1");
    if (!(rho_target > 0.0 && rho_target < 1.0)) throw InvalidArgument("rho_target must lie in (0, 1)");
    if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
    if (max_iter < 1) throw InvalidArgument("max_iter must be >= 1");
  }
};

/// Largest eigenvalue modulus of a general dense square matrix.
inline double dense_spectral_radius(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::EigenSolver<Matrix> solver(m, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) throw NonConvergence("eigenvalue solver failed", 0.0, 0.0);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

/// One reservoir layer: recurrent weights W (H x H) and input weights V (H_in x H).
class ReservoirLayer {
 public:
  ReservoirLayer(Matrix recurrent, Matrix input, int layer_index)
      : recurrent_(std::move(recurrent)), input_(std::move(input)), layer_index_(layer_index) {
    if (recurrent_.rows() != recurrent_.cols()) throw DimensionMismatch("W must be square");
    if (input_.cols() != recurrent_.rows()) throw DimensionMismatch("V must have H columns");
    spectral_radius_ = dense_spectral_radius(recurrent_);
    PowerOptions opts;
    opts.tolerance = 1e-12;
    opts.max_iterations = 100000;
    spectral_norm_ = pyrgnn::spectral_norm(recurrent_, opts).value;
  }

  const Matrix& recurrent() const { return recurrent_; }
  const Matrix& input() const { return input_; }
  int layer_index() const { return layer_index_; }
  Index input_dim() const { return input_.rows(); }
  Index hidden_units() const { return recurrent_.rows(); }

  /// rho(W), largest eigenvalue modulus.
  double spectral_radius() const { return spectral_radius_; }
  /// ||W||_2, largest singular value.
  double spectral_norm() const { return spectral_norm_; }

 private:
  Matrix recurrent_;
  Matrix input_;
  int layer_index_;
  double spectral_radius_ = 0.0;
  double spectral_norm_ = 0.0;
};

/// Random layer; layer_index starts at 1 and selects omega_in (1) or omega_hid (>1).
inline ReservoirLayer init_layer(const ReservoirConfig& config, Index input_dim, int layer_index) {
  config.validate();
  if (input_dim < 1) throw InvalidArgument("input_dim must be >= 1");
  const Index h = config.hidden_units;
  for (std::uint64_t attempt = 0; attempt < 16; ++attempt) {
    Rng rng(derive_seed(config.seed, "reservoir-layer",
                        static_cast<std::uint64_t>(layer_index) * 1024 + attempt));
    Matrix w(h, h);
    for (Index j = 0; j < h; ++j)
      for (Index i = 0; i < h; ++i) w(i, j) = rng.uniform(-1.0, 1.0);
    const double rho = dense_spectral_radius(w);
    if (!(rho >= 1e-12)) continue;
    w *= config.rho_target / rho;
    const double omega = layer_index <= 1 ? config.omega_in : config.omega_hid;
    Matrix v(input_dim, h);
    for (Index j = 0; j < h; ++j)
      for (Index i = 0; i < input_dim; ++i) v(i, j) = omega * rng.uniform(-1.0, 1.0);
    return ReservoirLayer(std::move(w), std::move(v), layer_index);
  }
  throw DegenerateSpectrum("sampled recurrent matrix has vanishing spectral radius");
}

/// Layers 1..levels with equal width; layer 1 reads input_dim features.
inline std::vector<ReservoirLayer> init_stack(const ReservoirConfig& config, Index input_dim, std::size_t levels) {
  std::vector<ReservoirLayer> layers;
  layers.reserve(levels);
  for (std::size_t l = 1; l <= levels; ++l)
    layers.push_back(init_layer(config, l == 1 ? input_dim : config.hidden_units, static_cast<int>(l)));
  return layers;
}

struct FixedPointResult {
  Matrix states;
  int iterations = 0;
  bool converged = false;
  double final_delta = 0.0;
  std::vector<double> deltas;
};

/// tanh(A_norm H W + XV) with XV supplied pre-multiplied.
inline Matrix reservoir_step(const ReservoirLayer& layer, const NormalizedAdjacency& adj, const Matrix& xv,
                             const Matrix& state) {
  Matrix pre = xv;
  if (adj.matrix.nonZeros() > 0) {
    const Matrix spread = adj.matrix * state;
    pre.noalias() += spread * layer.recurrent();
  }
  return pre.unaryExpr([](double v) { return std::tanh(v); });
}

/// Iterates H[t+1] = tanh(A_norm H[t] W + X V) from H[0] (zero by default)
/// until the Frobenius distance between consecutive states drops below
/// epsilon or max_iter maps have been applied.
inline FixedPointResult iterate_to_fixed_point(const ReservoirLayer& layer, const NormalizedAdjacency& adj,
                                               const Matrix& inputs, const ReservoirConfig& config,
                                               const Matrix* initial = nullptr) {
  const Index n = adj.size();
  const Index h = layer.hidden_units();
  if (inputs.rows() != n) throw DimensionMismatch("input rows must match vertex count");
  if (inputs.cols() != layer.input_dim()) throw DimensionMismatch("input columns must match V rows");
  if (!(config.epsilon > 0.0) || config.max_iter < 1) throw InvalidArgument("bad stopping rule");

  // Row-major working storage: the sparse product streams rows of the state.
  using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const RowMatrix xv = inputs * layer.input();
  FixedPointResult out;
  RowMatrix state = RowMatrix::Zero(n, h);
  if (initial) {
    if (initial->rows() != n || initial->cols() != h) throw DimensionMismatch("initial state shape");
    state = *initial;
  }
  RowMatrix pre(n, h);
  RowMatrix spread(n, h);
  const bool has_edges = adj.matrix.nonZeros() > 0;
  out.deltas.reserve(static_cast<std::size_t>(config.max_iter));
  for (int t = 1; t <= config.max_iter; ++t) {
    pre = xv;
    if (has_edges) {
      spread.noalias() = adj.matrix * state;
      pre.noalias() += spread * layer.recurrent();
    }
    double sq = 0.0;
    double* s = state.data();
    const double* p = pre.data();
    for (Index k = 0; k < n * h; ++k) {
      const double next = std::tanh(p[k]);
      const double d = next - s[k];
      sq += d * d;
      s[k] = next;
    }
    const double delta = std::sqrt(sq);
    out.deltas.push_back(delta);
    out.iterations = t;
    out.final_delta = delta;
    if (delta < config.epsilon) {
      out.converged = true;
      break;
    }
  }
  out.states = std::move(state);
  return out;
}

/// S^T H with strict shape checking.
inline Matrix apply_pool(const SparseMatrix& pool, const Matrix& states) {
  if (pool.rows() != states.rows()) throw DimensionMismatch("pooling matrix rows must match state rows");
  return pool.transpose() * states;
}

struct EmbedResult {
  Vector embedding;
  std::vector<FixedPointResult> per_layer;
  std::vector<double> layer_ms;
};

/// Runs the layers over the pyramid and sums the rows of the last layer's states.
inline EmbedResult embed_stack(const std::vector<ReservoirLayer>& layers, const GraphPyramid& pyramid,
                               const Matrix& features, const ReservoirConfig& config) {
  const std::size_t levels = pyramid.levels();
  if (layers.size() != levels) throw DimensionMismatch("need one reservoir layer per pyramid level");
  if (pyramid.normalized.size() != levels) throw InvalidArgument("pyramid was not finalized");
  EmbedResult out;
  out.per_layer.reserve(levels);
  Matrix x = features;
  for (std::size_t l = 0; l < levels; ++l) {
    const auto& layer = layers[l];
    if (x.cols() != layer.input_dim()) throw DimensionMismatch("layer input dimension mismatch");
    if (x.rows() != pyramid.vertices(l)) throw DimensionMismatch("features do not match pyramid level");
    const auto t0 = std::chrono::steady_clock::now();
    FixedPointResult r = iterate_to_fixed_point(layer, pyramid.normalized[l], x, config);
    if (l + 1 < levels) {
      const SparseMatrix& s = pyramid.pool_matrices[l];
      if (s.rows() > r.states.rows()) {
        // Padding vertices hold zero states.
        Matrix padded = Matrix::Zero(s.rows(), r.states.cols());
        padded.topRows(r.states.rows()) = r.states;
        x = apply_pool(s, padded);
      } else {
        x = apply_pool(s, r.states);
      }
    } else {
      out.embedding = r.states.colwise().sum().transpose();
    }
    const auto t1 = std::chrono::steady_clock::now();
    out.layer_ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
    out.per_layer.push_back(std::move(r));
  }
  return out;
}

}  // namespace pyrgnn
