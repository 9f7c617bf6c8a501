#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "pyrgnn/graph.hpp"

namespace pyrgnn {

enum class PoolMethod { NoPool, Graclus, Nmf, Ndp };

inline std::string_view to_string(PoolMethod m) {
  switch (m) {
    case PoolMethod::NoPool: return "nopool";
    case PoolMethod::Graclus: return "graclus";
    case PoolMethod::Nmf: return "nmf";
    case PoolMethod::Ndp: return "ndp";
  }
  return "?";
}

inline PoolMethod parse_pool_method(std::string_view name) {
  if (name == "nopool" || name == "none" || name == "no-pool") return PoolMethod::NoPool;
  if (name == "graclus") return PoolMethod::Graclus;
  if (name == "nmf") return PoolMethod::Nmf;
  if (name == "ndp") return PoolMethod::Ndp;
  throw InvalidArgument("unknown pooling method '" + std::string(name) + "'");
}

/// Pre-computed coarsening pyramid of one graph.
///
/// Level 0 is the input adjacency. pool_matrices[l] maps level l to level
/// l + 1 and may have more rows than level l has vertices: the extra rows are
/// padding vertices (zero features) introduced by balanced clustering.
struct GraphPyramid {
  PoolMethod method = PoolMethod::NoPool;
  std::vector<SparseMatrix> adjacencies;
  std::vector<Vector> strengths;
  std::vector<SparseMatrix> pool_matrices;
  std::vector<NormalizedAdjacency> normalized;

  std::size_t levels() const { return adjacencies.size(); }

  Index vertices(std::size_t level) const { return adjacencies.at(level).rows(); }

  /// Vertex count including padding at the input of pool_matrices[level].
  Index padded_size(std::size_t level) const {
    return level < pool_matrices.size() ? pool_matrices[level].rows() : vertices(level);
  }

  /// Checks shapes and fills the normalized adjacencies.
  void finalize() {
    if (adjacencies.empty()) throw InvalidArgument("pyramid needs at least one level");
    if (pool_matrices.size() + 1 != adjacencies.size())
      throw DimensionMismatch("pyramid needs L-1 pooling matrices for L levels");
    if (strengths.empty()) {
      for (const auto& a : adjacencies) strengths.push_back(row_sums(a));
    }
    if (strengths.size() != adjacencies.size()) throw DimensionMismatch("strengths per level");
    for (std::size_t l = 0; l < adjacencies.size(); ++l) {
      check_adjacency(adjacencies[l]);
      if (strengths[l].size() != adjacencies[l].rows()) throw DimensionMismatch("strength vector size");
    }
    for (std::size_t l = 0; l < pool_matrices.size(); ++l) {
      if (pool_matrices[l].rows() < adjacencies[l].rows())
        throw DimensionMismatch("pooling matrix has fewer rows than its level");
      if (pool_matrices[l].cols() != adjacencies[l + 1].rows())
        throw DimensionMismatch("pooling matrix columns must match the next level");
    }
    normalized.clear();
    for (std::size_t l = 0; l < adjacencies.size(); ++l)
      normalized.push_back(normalize(adjacencies[l], strengths[l]));
  }
};

}  // namespace pyrgnn
