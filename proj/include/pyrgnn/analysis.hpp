#pragma once

// Convergence theory of contractive reservoir layers: contraction
// coefficient, iteration bound, and the per-layer cost model.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "pyrgnn/graph.hpp"
#include "pyrgnn/pyramid.hpp"
#include "pyrgnn/reservoir.hpp"

namespace pyrgnn {

struct ConvergenceBound {
  double contraction = 0.0;      // K = rho(A_norm) * ||W||_2
  double first_step_norm = 0.0;  // H1 = ||tanh(XV)||_F
  std::optional<int> iterations;  // T; empty when the bound does not apply
  double epsilon = 0.0;

  bool applicable() const { return iterations.has_value(); }
};

/// ceil((ln eps + ln(1 - K) - ln H1) / ln K), clamped to at least one
/// iteration. Empty when K is outside (0, 1) or H1 == 0.
inline std::optional<int> iteration_bound(double contraction, double first_step_norm, double epsilon) {
  if (!(contraction > 0.0 && contraction < 1.0) || !(first_step_norm > 0.0) || !(epsilon > 0.0))
    return std::nullopt;
  const double t = (std::log(epsilon) + std::log(1.0 - contraction) - std::log(first_step_norm)) /
                   std::log(contraction);
  const double c = std::ceil(t);
  if (c >= static_cast<double>(std::numeric_limits<int>::max())) return std::numeric_limits<int>::max();
  return std::max(1, static_cast<int>(c));
}

inline ConvergenceBound compute_bound(const ReservoirLayer& layer, const NormalizedAdjacency& adj, const Matrix& x,
                                      double epsilon, const PowerOptions& opts = {}) {
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
  ConvergenceBound b;
  b.epsilon = epsilon;
  const double rho = spectral_radius_lenient(adj.matrix, opts).first.value;
  b.contraction = rho * layer.spectral_norm();
  b.first_step_norm = (x * layer.input()).unaryExpr([](double v) { return std::tanh(v); }).norm();
  b.iterations = iteration_bound(b.contraction, b.first_step_norm, epsilon);
  return b;
}

/// True iff the observed run stopped within T + 1 maps. The stopping rule
/// compares consecutive iterates, and ||H[T+1] - H[T]|| <= K^T H1 < eps, so
/// the run stops at map T + 1 at the latest.
inline bool verify_bound(const ConvergenceBound& bound, const FixedPointResult& observed) {
  if (!bound.applicable()) throw PreconditionViolated("iteration bound is not applicable (K >= 1 or H1 = 0)");
  if (!observed.converged) throw PreconditionViolated("fixed-point run did not converge");
  return observed.iterations <= *bound.iterations + 1;
}

struct CostEstimate {
  double per_iteration = 0.0;
  double total = 0.0;
  int layer_index = 0;
};

/// M H + N H^2 per iteration, times the observed iteration count, per level.
inline std::vector<CostEstimate> estimate_cost(const GraphPyramid& pyramid,
                                               const std::vector<FixedPointResult>& per_layer, Index hidden) {
  if (per_layer.size() != pyramid.levels()) throw DimensionMismatch("one fixed-point result per level");
  std::vector<CostEstimate> out;
  const double h = static_cast<double>(hidden);
  for (std::size_t l = 0; l < per_layer.size(); ++l) {
    CostEstimate c;
    c.layer_index = static_cast<int>(l) + 1;
    const double n = static_cast<double>(pyramid.vertices(l));
    const double m = static_cast<double>(undirected_edges(pyramid.adjacencies[l]));
    c.per_iteration = m * h + n * h * h;
    c.total = per_layer[l].iterations * c.per_iteration;
    out.push_back(c);
  }
  return out;
}

/// One row of the per-run analysis report.
struct AnalysisRow {
  std::string graph_id;
  int level = 0;
  Index vertices = 0;
  std::size_t edges = 0;
  double rho = 0.0;
  double contraction = 0.0;
  std::optional<int> bound;
  int observed = 0;
  double est_cost = 0.0;
  double wall_ms = 0.0;
};

inline constexpr const char* kAnalysisHeader = "graph_id,level,N,M,rho,K,T_bound,T_observed,est_cost,wall_ms";

inline void write_analysis_row(std::ostream& os, const AnalysisRow& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf, ",%d,%lld,%zu,%.10g,%.10g,", r.level, static_cast<long long>(r.vertices), r.edges,
                r.rho, r.contraction);
  os << r.graph_id << buf;
  if (r.bound) os << *r.bound;
  else os << "inapplicable";
  std::snprintf(buf, sizeof buf, ",%d,%.10g,%.6f", r.observed, r.est_cost, r.wall_ms);
  os << buf << '\n';
}

/// Analysis rows for one embedded graph, one per pyramid level.
inline std::vector<AnalysisRow> analyze_embedding(const std::string& graph_id, const GraphPyramid& pyramid,
                                                  const std::vector<ReservoirLayer>& layers,
                                                  const Matrix& features, const EmbedResult& result,
                                                  double epsilon) {
  std::vector<AnalysisRow> rows;
  const auto costs = estimate_cost(pyramid, result.per_layer, layers.front().hidden_units());
  Matrix x = features;
  for (std::size_t l = 0; l < pyramid.levels(); ++l) {
    AnalysisRow r;
    r.graph_id = graph_id;
    r.level = static_cast<int>(l) + 1;
    r.vertices = pyramid.vertices(l);
    r.edges = undirected_edges(pyramid.adjacencies[l]);
    const ConvergenceBound b = compute_bound(layers[l], pyramid.normalized[l], x, epsilon);
    r.rho = layers[l].spectral_norm() > 0.0 ? b.contraction / layers[l].spectral_norm()
                                             : spectral_radius_lenient(pyramid.normalized[l].matrix).first.value;
    r.contraction = b.contraction;
    r.bound = b.iterations;
    r.observed = result.per_layer[l].iterations;
    r.est_cost = costs[l].total;
    r.wall_ms = result.layer_ms[l];
    rows.push_back(r);
    if (l + 1 < pyramid.levels()) {
      const SparseMatrix& s = pyramid.pool_matrices[l];
      Matrix padded = Matrix::Zero(s.rows(), result.per_layer[l].states.cols());
      padded.topRows(result.per_layer[l].states.rows()) = result.per_layer[l].states;
      x = apply_pool(s, padded);
    }
  }
  return rows;
}

}  // namespace pyrgnn
