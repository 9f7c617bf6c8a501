#pragma once

// On-disk cache of pre-computed pyramids. Pyramids do not depend on reservoir
// hyper-parameters, so one file per (dataset, graph, method, levels, delta,
// seed) serves every configuration of a run.
//
// Layout (little-endian): "PYRC", u32 version, u32 levels, u32 pool count,
// u32 method; then each adjacency and pool matrix as u32 rows, u32 cols,
// u64 nnz and nnz (u32 row, u32 col, f64 value) triplets; then each strength
// vector as u32 size and f64 values.

#include <bit>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <string>

#include "pyrgnn/errors.hpp"
#include "pyrgnn/graph.hpp"
#include "pyrgnn/pooling.hpp"
#include "pyrgnn/pyramid.hpp"
#include "pyrgnn/random.hpp"

namespace pyrgnn {

static_assert(std::endian::native == std::endian::little, "pyramid cache assumes a little-endian host");

inline constexpr std::uint32_t kCacheVersion = 1;

namespace detail {

template <typename T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get(std::istream& is) {
  T v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof v)) throw IoError("truncated pyramid cache file");
  return v;
}

inline void put_matrix(std::ostream& os, const SparseMatrix& m) {
  put<std::uint32_t>(os, static_cast<std::uint32_t>(m.rows()));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(m.cols()));
  put<std::uint64_t>(os, static_cast<std::uint64_t>(m.nonZeros()));
  for (Index r = 0; r < m.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(m, r); it; ++it) {
      put<std::uint32_t>(os, static_cast<std::uint32_t>(it.row()));
      put<std::uint32_t>(os, static_cast<std::uint32_t>(it.col()));
      put<double>(os, it.value());
    }
}

inline SparseMatrix get_matrix(std::istream& is) {
  const auto rows = get<std::uint32_t>(is);
  const auto cols = get<std::uint32_t>(is);
  const auto nnz = get<std::uint64_t>(is);
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(nnz));
  for (std::uint64_t k = 0; k < nnz; ++k) {
    const auto r = get<std::uint32_t>(is);
    const auto c = get<std::uint32_t>(is);
    const auto v = get<double>(is);
    if (r >= rows || c >= cols) throw IoError("pyramid cache entry out of range");
    t.emplace_back(r, c, v);
  }
  return sparse_from_triplets(rows, cols, t);
}

}  // namespace detail

inline void write_pyramid(std::ostream& os, const GraphPyramid& p) {
  os.write("PYRC", 4);
  detail::put<std::uint32_t>(os, kCacheVersion);
  detail::put<std::uint32_t>(os, static_cast<std::uint32_t>(p.levels()));
  detail::put<std::uint32_t>(os, static_cast<std::uint32_t>(p.pool_matrices.size()));
  detail::put<std::uint32_t>(os, static_cast<std::uint32_t>(p.method));
  for (const auto& a : p.adjacencies) detail::put_matrix(os, a);
  for (const auto& s : p.pool_matrices) detail::put_matrix(os, s);
  for (const auto& s : p.strengths) {
    detail::put<std::uint32_t>(os, static_cast<std::uint32_t>(s.size()));
    for (Index i = 0; i < s.size(); ++i) detail::put<double>(os, s[i]);
  }
  if (!os) throw IoError("failed to write pyramid cache");
}

inline GraphPyramid read_pyramid(std::istream& is) {
  char magic[4];
  if (!is.read(magic, 4) || std::string(magic, 4) != "PYRC") throw IoError("not a pyramid cache file");
  if (detail::get<std::uint32_t>(is) != kCacheVersion) throw IoError("unsupported pyramid cache version");
  const auto levels = detail::get<std::uint32_t>(is);
  const auto pools = detail::get<std::uint32_t>(is);
  const auto method = detail::get<std::uint32_t>(is);
  if (method > static_cast<std::uint32_t>(PoolMethod::Ndp)) throw IoError("bad pooling method in cache");
  GraphPyramid p;
  p.method = static_cast<PoolMethod>(method);
  for (std::uint32_t l = 0; l < levels; ++l) p.adjacencies.push_back(detail::get_matrix(is));
  for (std::uint32_t l = 0; l < pools; ++l) p.pool_matrices.push_back(detail::get_matrix(is));
  for (std::uint32_t l = 0; l < levels; ++l) {
    Vector s(detail::get<std::uint32_t>(is));
    for (Index i = 0; i < s.size(); ++i) s[i] = detail::get<double>(is);
    p.strengths.push_back(std::move(s));
  }
  p.finalize();
  return p;
}

struct CacheKey {
  std::string dataset;
  std::size_t graph_id = 0;
  PoolMethod method = PoolMethod::NoPool;
  std::size_t levels = 1;
  double delta = 0.1;
  std::uint64_t seed = 0;

  std::string filename() const {
    char buf[96];
    std::snprintf(buf, sizeof buf, "_%zu_%s_L%zu_d%.6g_s%016llx.pyr", graph_id, std::string(to_string(method)).c_str(),
                  levels, delta, static_cast<unsigned long long>(seed));
    std::string safe;
    for (char c : dataset) safe += (std::isalnum(static_cast<unsigned char>(c)) || c == '-') ? c : '_';
    return safe + buf;
  }
};

/// Cache directory from PYRGNN_CACHE_DIR, if set and non-empty.
inline std::optional<std::filesystem::path> cache_dir_from_env() {
  const char* v = std::getenv("PYRGNN_CACHE_DIR");
  if (!v || !*v) return std::nullopt;
  return std::filesystem::path(v);
}

/// Loads the pyramid from dir if present, otherwise builds and stores it.
/// A corrupt file is rebuilt and overwritten.
inline GraphPyramid cached_pyramid(const std::filesystem::path& dir, const CacheKey& key, const Graph& graph,
                                   const PoolOptions& options) {
  const auto path = dir / key.filename();
  if (std::ifstream in(path, std::ios::binary); in) {
    try {
      return read_pyramid(in);
    } catch (const Error&) {
    }
  }
  PoolOptions o = options;
  o.seed = key.seed;
  GraphPyramid p = build_pyramid(graph, key.method, key.levels, o);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  // Write to a temporary name first so concurrent readers never see a partial file.
  const auto tmp = path.string() + ".tmp" + std::to_string(std::hash<std::string>{}(path.string()) ^ key.graph_id);
  {
    std::ofstream out(tmp, std::ios::binary);
    if (out) write_pyramid(out, p);
  }
  std::filesystem::rename(tmp, path, ec);
  return p;
}

}  // namespace pyrgnn
