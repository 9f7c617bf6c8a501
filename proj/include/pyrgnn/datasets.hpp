#pragma once

// Graph-classification corpora: the synthetic easy/hard benchmark, the
// TUD-style text layout (read and write), and stratified fold assignment.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "pyrgnn/graph.hpp"
#include "pyrgnn/random.hpp"
#include "pyrgnn/synthetic_geometry.hpp"

namespace pyrgnn {

/// One external fold: held-out test indices and the train/validation split of the rest.
struct Fold {
  std::vector<std::size_t> train;
  std::vector<std::size_t> val;
  std::vector<std::size_t> test;
};

struct DatasetBundle {
  std::string name;
  std::vector<Graph> graphs;
  std::vector<int> labels;
  std::vector<Fold> folds;
  Index feature_dim = 0;

  std::size_t size() const { return graphs.size(); }

  int num_classes() const {
    return labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
  }

  void validate() const {
    if (graphs.size() != labels.size()) throw DimensionMismatch("one label per graph");
    const int c = num_classes();
    std::vector<char> seen(static_cast<std::size_t>(std::max(c, 0)), 0);
    for (int l : labels) {
      if (l < 0) throw InvalidArgument("class ids must be non-negative");
      seen[static_cast<std::size_t>(l)] = 1;
    }
    if (std::find(seen.begin(), seen.end(), 0) != seen.end())
      throw InvalidArgument("class ids must be contiguous from 0");
    for (const auto& g : graphs)
      if (g.feature_dim() != feature_dim) throw DimensionMismatch("all graphs need the bundle feature dimension");
    for (const auto& f : folds) {
      std::set<std::size_t> all;
      for (const auto* part : {&f.train, &f.val, &f.test})
        for (std::size_t i : *part) {
          if (i >= graphs.size()) throw IndexError("fold index out of range");
          if (!all.insert(i).second) throw InvalidArgument("fold parts overlap");
        }
    }
  }
};

// ---------------------------------------------------------------------------
// Synthetic benchmark
// ---------------------------------------------------------------------------

enum class Difficulty { Easy, Hard };

inline std::string_view to_string(Difficulty d) { return d == Difficulty::Easy ? "easy" : "hard"; }

inline Difficulty parse_difficulty(std::string_view s) {
  if (s == "easy") return Difficulty::Easy;
  if (s == "hard") return Difficulty::Hard;
  throw InvalidArgument("difficulty must be 'easy' or 'hard'");
}

enum class Shape { Blob = 0, Moons = 1, Circles = 2 };

/// Left-to-right shape arrangement of each class. All classes use the same
/// multiset of shapes, so neither the colors nor the shapes alone identify
/// the class; only which color carries which shape does.
inline constexpr Shape kClassLayouts[3][synthetic_geometry::kClusters] = {
    {Shape::Blob, Shape::Circles, Shape::Moons, Shape::Circles, Shape::Blob},
    {Shape::Circles, Shape::Moons, Shape::Blob, Shape::Blob, Shape::Circles},
    {Shape::Moons, Shape::Blob, Shape::Circles, Shape::Circles, Shape::Blob},
};

struct SyntheticConfig {
  Difficulty difficulty = Difficulty::Easy;
  int n_graphs = 1800;
  int knn_k = synthetic_geometry::kEasyK;
  /// Whether the point itself counts as one of its k nearest neighbours.
  bool knn_include_self = synthetic_geometry::kEasyIncludeSelf;
  double cluster_spread = synthetic_geometry::kEasySpread;
  /// Horizontal distance between neighbouring cluster centres.
  double cluster_spacing = synthetic_geometry::kSpacing;
  int points_min = synthetic_geometry::kPointsMin;
  int points_max = synthetic_geometry::kPointsMax;
  std::uint64_t seed = 0;

  static SyntheticConfig preset(Difficulty d, int n_graphs, std::uint64_t seed) {
    SyntheticConfig c;
    c.difficulty = d;
    c.n_graphs = n_graphs;
    c.seed = seed;
    c.knn_k = d == Difficulty::Easy ? synthetic_geometry::kEasyK : synthetic_geometry::kHardK;
    c.knn_include_self = d == Difficulty::Easy ? synthetic_geometry::kEasyIncludeSelf : synthetic_geometry::kHardIncludeSelf;
    c.cluster_spread = d == Difficulty::Easy ? synthetic_geometry::kEasySpread : synthetic_geometry::kHardSpread;
    return c;
  }

  /// The reduced "small" variant of a preset.
  static SyntheticConfig small(Difficulty d, std::uint64_t seed) { return preset(d, 300, seed); }

  void validate() const {
    if (knn_k < 1 || (knn_include_self && knn_k < 2)) throw InvalidArgument("knn_k leaves no neighbours");
    if (n_graphs < 3) throw InvalidArgument("n_graphs must be >= 3");
    if (points_min < knn_k || points_max < points_min) throw InvalidArgument("bad points-per-cluster range");
    if (!(cluster_spread > 0.0)) throw InvalidArgument("cluster_spread must be positive");
    if (!(cluster_spacing > 0.0)) throw InvalidArgument("cluster_spacing must be positive");
  }
};

inline nlohmann::json to_json(const SyntheticConfig& c) {
  return {{"difficulty", std::string(to_string(c.difficulty))},
          {"n_graphs", c.n_graphs},
          {"knn_k", c.knn_k},
          {"knn_include_self", c.knn_include_self},
          {"cluster_spread", c.cluster_spread},
          {"cluster_spacing", c.cluster_spacing},
          {"points_per_cluster", {c.points_min, c.points_max}},
          {"seed", c.seed}};
}

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

inline void sample_shape(Shape shape, int count, double spread, Point2 center, Rng& rng, std::vector<Point2>& out) {
  using namespace synthetic_geometry;
  switch (shape) {
    case Shape::Blob: {
      const double s = spread * kBlobSigmaScale;
      for (int i = 0; i < count; ++i) out.push_back({center.x + s * rng.normal(), center.y + s * rng.normal()});
      break;
    }
    case Shape::Moons: {
      // Two interleaved half circles of radius 0.6, centred on the cluster.
      const int outer = (count + 1) / 2;
      for (int i = 0; i < count; ++i) {
        const double t = std::numbers::pi * rng.uniform();
        double x, y;
        if (i < outer) {
          x = std::cos(t) - 0.5;
          y = std::sin(t) - 0.25;
        } else {
          x = 0.5 - std::cos(t);
          y = 0.25 - std::sin(t);
        }
        out.push_back({center.x + 0.6 * x + spread * rng.normal(), center.y + 0.6 * y + spread * rng.normal()});
      }
      break;
    }
    case Shape::Circles: {
      const int outer = (count + 1) / 2;
      for (int i = 0; i < count; ++i) {
        const double t = 2.0 * std::numbers::pi * rng.uniform();
        const double r = i < outer ? 1.0 : kInnerCircleRatio;
        out.push_back({center.x + r * std::cos(t) + spread * rng.normal(),
                       center.y + r * std::sin(t) + spread * rng.normal()});
      }
      break;
    }
  }
}

/// Union-symmetrized k-NN adjacency without self-loops. With include_self the
/// point is the first of its own k neighbours, so it links to k - 1 others.
/// Distance ties go to the lower index.
inline SparseMatrix knn_adjacency(const std::vector<Point2>& pts, int k, bool include_self = false) {
  const Index n = static_cast<Index>(pts.size());
  const int neighbours = std::max(0, std::min<int>(include_self ? k - 1 : k, static_cast<int>(n) - 1));
  std::vector<std::pair<double, Index>> cand;
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(2 * n * std::max(neighbours, 0)));
  for (Index i = 0; i < n; ++i) {
    cand.clear();
    for (Index j = 0; j < n; ++j) {
      if (j == i) continue;
      const double dx = pts[i].x - pts[j].x;
      const double dy = pts[i].y - pts[j].y;
      cand.emplace_back(dx * dx + dy * dy, j);
    }
    std::partial_sort(cand.begin(), cand.begin() + neighbours, cand.end());
    for (int q = 0; q < neighbours; ++q) {
      t.emplace_back(i, cand[q].second, 1.0);
      t.emplace_back(cand[q].second, i, 1.0);
    }
  }
  SparseMatrix a = sparse_from_triplets(n, n, t);
  for (Index r = 0; r < a.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(a, r); it; ++it) it.valueRef() = 1.0;  // union, not sum
  return a;
}

/// One synthetic graph of the given class.
inline Graph synthetic_graph(const SyntheticConfig& config, int label, Rng& rng) {
  using namespace synthetic_geometry;
  std::vector<Point2> pts;
  std::vector<int> color;
  for (int c = 0; c < kClusters; ++c) {
    const int count = static_cast<int>(rng.between(config.points_min, config.points_max));
    const Point2 center{c * config.cluster_spacing + rng.uniform(-kCenterJitter, kCenterJitter),
                        rng.uniform(-kCenterJitter, kCenterJitter)};
    sample_shape(kClassLayouts[label][c], count, config.cluster_spread, center, rng, pts);
    color.insert(color.end(), static_cast<std::size_t>(count), c);
  }
  const Index n = static_cast<Index>(pts.size());
  Matrix x = Matrix::Zero(n, kClusters);
  for (Index i = 0; i < n; ++i) x(i, color[static_cast<std::size_t>(i)]) = 1.0;
  return Graph(knn_adjacency(pts, config.knn_k, config.knn_include_self), std::move(x), label);
}

/// Balanced corpus: graph i has class i mod 3; each graph has its own derived seed.
inline DatasetBundle generate_synthetic(const SyntheticConfig& config) {
  config.validate();
  DatasetBundle b;
  b.name = std::string("B-") + std::string(to_string(config.difficulty));
  b.feature_dim = synthetic_geometry::kClusters;
  b.graphs.reserve(static_cast<std::size_t>(config.n_graphs));
  for (int i = 0; i < config.n_graphs; ++i) {
    const int label = i % 3;
    Rng rng(derive_seed(config.seed, "synthetic-graph", static_cast<std::uint64_t>(i)));
    b.graphs.push_back(synthetic_graph(config, label, rng));
    b.labels.push_back(label);
  }
  return b;
}

struct CorpusStats {
  double avg_vertices = 0.0;
  double avg_edges = 0.0;         // undirected, each edge once
  double avg_stored_entries = 0.0;  // nonzeros of the adjacency (each edge twice)
};

inline CorpusStats corpus_stats(const std::vector<Graph>& graphs) {
  CorpusStats s;
  if (graphs.empty()) return s;
  for (const auto& g : graphs) {
    s.avg_vertices += static_cast<double>(g.num_vertices());
    s.avg_edges += static_cast<double>(g.num_edges());
  }
  s.avg_vertices /= static_cast<double>(graphs.size());
  s.avg_edges /= static_cast<double>(graphs.size());
  s.avg_stored_entries = 2.0 * s.avg_edges;
  return s;
}

// ---------------------------------------------------------------------------
// TUD-style text layout
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start <= line.size()) {
    std::size_t end = line.find(',', start);
    if (end == std::string_view::npos) end = line.size();
    std::string_view f = line.substr(start, end - start);
    while (!f.empty() && (f.front() == ' ' || f.front() == '\t')) f.remove_prefix(1);
    while (!f.empty() && (f.back() == ' ' || f.back() == '\t' || f.back() == '\r')) f.remove_suffix(1);
    out.push_back(f);
    start = end + 1;
  }
  return out;
}

inline long long parse_int(std::string_view s, const std::string& file, std::size_t line) {
  long long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw ParseError(file, line, "expected an integer, got '" + std::string(s) + "'");
  return v;
}

inline double parse_real(std::string_view s, const std::string& file, std::size_t line) {
  const std::string tmp(s);
  char* end = nullptr;
  const double v = std::strtod(tmp.c_str(), &end);
  if (tmp.empty() || end != tmp.c_str() + tmp.size())
    throw ParseError(file, line, "expected a real number, got '" + tmp + "'");
  return v;
}

/// Non-empty lines of a file, with their 1-based line numbers.
inline std::vector<std::pair<std::size_t, std::string>> read_lines(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw IoError("cannot open " + p.string());
  std::vector<std::pair<std::size_t, std::string>> out;
  std::string line;
  std::size_t no = 0;
  while (std::getline(in, line)) {
    ++no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    out.emplace_back(no, line);
  }
  return out;
}

inline std::string fmt_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

/// Reads <dir>/<name>_A.txt, _graph_indicator.txt, _graph_labels.txt and the
/// optional _node_labels.txt / _node_attributes.txt / _edge_weights.txt.
inline DatasetBundle load_tud(const std::filesystem::path& dir, const std::string& name) {
  namespace fs = std::filesystem;
  auto file = [&](const char* suffix) { return dir / (name + suffix); };
  if (!fs::exists(file("_A.txt"))) throw IoError("missing " + file("_A.txt").string());

  // Graph membership of every vertex.
  const std::string ind_name = file("_graph_indicator.txt").string();
  const auto ind_lines = detail::read_lines(ind_name);
  std::vector<std::size_t> graph_of;
  std::vector<Index> local;
  std::map<long long, std::size_t> graph_ids;
  std::vector<Index> counts;
  graph_of.reserve(ind_lines.size());
  for (const auto& [no, text] : ind_lines) {
    const long long gid = detail::parse_int(detail::split_fields(text).at(0), ind_name, no);
    auto [it, fresh] = graph_ids.emplace(gid, graph_ids.size());
    if (fresh) counts.push_back(0);
    graph_of.push_back(it->second);
    local.push_back(counts[it->second]++);
  }
  const std::size_t n_graphs = graph_ids.size();
  const std::size_t n_vertices = graph_of.size();
  // graph_ids is ordered by id; renumber graphs in id order.
  std::vector<std::size_t> order_of(n_graphs);
  {
    std::size_t k = 0;
    for (const auto& [gid, first_seen] : graph_ids) order_of[first_seen] = k++;
    for (auto& g : graph_of) g = order_of[g];
    std::vector<Index> c2(n_graphs);
    for (std::size_t i = 0; i < n_graphs; ++i) c2[order_of[i]] = counts[i];
    counts = c2;
  }

  // Graph labels, remapped to 0..C-1.
  const std::string gl_name = file("_graph_labels.txt").string();
  const auto gl_lines = detail::read_lines(gl_name);
  if (gl_lines.size() != n_graphs) throw ParseError(gl_name, gl_lines.empty() ? 0 : gl_lines.back().first,
                                                    "expected one label per graph");
  std::vector<long long> raw_labels;
  for (const auto& [no, text] : gl_lines)
    raw_labels.push_back(detail::parse_int(detail::split_fields(text).at(0), gl_name, no));
  std::set<long long> distinct(raw_labels.begin(), raw_labels.end());
  std::map<long long, int> remap;
  for (long long v : distinct) remap.emplace(v, static_cast<int>(remap.size()));

  // Edges (1-indexed, both directions usually present).
  const std::string a_name = file("_A.txt").string();
  const auto a_lines = detail::read_lines(a_name);
  std::vector<double> weights(a_lines.size(), 1.0);
  if (fs::exists(file("_edge_weights.txt"))) {
    const std::string w_name = file("_edge_weights.txt").string();
    const auto w_lines = detail::read_lines(w_name);
    if (w_lines.size() != a_lines.size()) throw ParseError(w_name, 0, "expected one weight per edge line");
    for (std::size_t i = 0; i < w_lines.size(); ++i)
      weights[i] = detail::parse_real(detail::split_fields(w_lines[i].second).at(0), w_name, w_lines[i].first);
  }
  std::vector<std::map<std::pair<Index, Index>, double>> edges(n_graphs);
  for (std::size_t e = 0; e < a_lines.size(); ++e) {
    const auto& [no, text] = a_lines[e];
    const auto f = detail::split_fields(text);
    if (f.size() < 2) throw ParseError(a_name, no, "expected 'u, v'");
    const long long u = detail::parse_int(f[0], a_name, no);
    const long long v = detail::parse_int(f[1], a_name, no);
    if (u < 1 || v < 1 || static_cast<std::size_t>(u) > n_vertices || static_cast<std::size_t>(v) > n_vertices)
      throw IndexError(a_name + ":" + std::to_string(no) + ": vertex id outside 1.." + std::to_string(n_vertices));
    const std::size_t gu = graph_of[static_cast<std::size_t>(u - 1)];
    const std::size_t gv = graph_of[static_cast<std::size_t>(v - 1)];
    if (gu != gv)
      throw IndexError(a_name + ":" + std::to_string(no) + ": edge joins vertices of different graphs");
    Index lu = local[static_cast<std::size_t>(u - 1)];
    Index lv = local[static_cast<std::size_t>(v - 1)];
    if (lu == lv) continue;  // self-loops are dropped
    if (lu > lv) std::swap(lu, lv);
    edges[gu][{lu, lv}] = weights[e];
  }

  // Vertex features.
  std::vector<long long> node_labels;
  long long nl_min = 0, nl_max = -1;
  if (fs::exists(file("_node_labels.txt"))) {
    const std::string nl_name = file("_node_labels.txt").string();
    const auto lines = detail::read_lines(nl_name);
    if (lines.size() != n_vertices) throw ParseError(nl_name, 0, "expected one node label per vertex");
    for (const auto& [no, text] : lines)
      node_labels.push_back(detail::parse_int(detail::split_fields(text).at(0), nl_name, no));
    nl_min = *std::min_element(node_labels.begin(), node_labels.end());
    nl_max = *std::max_element(node_labels.begin(), node_labels.end());
  }
  std::vector<std::vector<double>> attrs;
  std::size_t attr_dim = 0;
  if (fs::exists(file("_node_attributes.txt"))) {
    const std::string na_name = file("_node_attributes.txt").string();
    const auto lines = detail::read_lines(na_name);
    if (lines.size() != n_vertices) throw ParseError(na_name, 0, "expected one attribute row per vertex");
    for (const auto& [no, text] : lines) {
      std::vector<double> row;
      for (auto f : detail::split_fields(text)) row.push_back(detail::parse_real(f, na_name, no));
      if (attrs.empty()) attr_dim = row.size();
      if (row.size() != attr_dim) throw ParseError(na_name, no, "inconsistent attribute width");
      attrs.push_back(std::move(row));
    }
  }
  const Index label_dim = node_labels.empty() ? 0 : static_cast<Index>(nl_max - nl_min + 1);
  const bool surrogate = label_dim == 0 && attr_dim == 0;
  const Index feature_dim = surrogate ? 1 : label_dim + static_cast<Index>(attr_dim);

  std::vector<Matrix> feats(n_graphs);
  for (std::size_t g = 0; g < n_graphs; ++g) feats[g] = Matrix::Zero(counts[g], feature_dim);
  for (std::size_t v = 0; v < n_vertices; ++v) {
    Matrix& x = feats[graph_of[v]];
    const Index r = local[v];
    if (label_dim > 0) x(r, static_cast<Index>(node_labels[v] - nl_min)) = 1.0;
    for (std::size_t k = 0; k < attr_dim; ++k) x(r, label_dim + static_cast<Index>(k)) = attrs[v][k];
  }

  DatasetBundle b;
  b.name = name;
  b.feature_dim = feature_dim;
  b.graphs.reserve(n_graphs);
  for (std::size_t g = 0; g < n_graphs; ++g) {
    std::vector<std::tuple<Index, Index, double>> list;
    list.reserve(edges[g].size());
    for (const auto& [uv, w] : edges[g]) list.emplace_back(uv.first, uv.second, w);
    SparseMatrix a = adjacency_from_edges(counts[g], list);
    if (surrogate) feats[g].col(0) = row_sums(a);
    const int label = remap.at(raw_labels[g]);
    b.graphs.emplace_back(std::move(a), std::move(feats[g]), label);
    b.labels.push_back(label);
  }
  b.validate();
  return b;
}

/// Writes the bundle in the TUD layout. One-hot feature matrices are written
/// as node labels, anything else as node attributes; non-unit edge weights
/// go to <name>_edge_weights.txt.
inline void write_tud(const DatasetBundle& bundle, const std::filesystem::path& dir, const std::string& name) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  auto open = [&](const char* suffix) {
    std::ofstream f(dir / (name + suffix), std::ios::binary);
    if (!f) throw IoError("cannot write " + (dir / (name + suffix)).string());
    return f;
  };
  bool one_hot = true;
  bool unit_weights = true;
  for (const auto& g : bundle.graphs) {
    const Matrix& x = g.features();
    for (Index r = 0; r < x.rows() && one_hot; ++r) {
      int ones = 0;
      for (Index c = 0; c < x.cols(); ++c) {
        if (x(r, c) == 1.0) ++ones;
        else if (x(r, c) != 0.0) ones = 99;
      }
      one_hot = ones == 1;
    }
    for (Index r = 0; r < g.adjacency().outerSize(); ++r)
      for (SparseMatrix::InnerIterator it(g.adjacency(), r); it; ++it)
        if (it.value() != 1.0) unit_weights = false;
  }
  auto fa = open("_A.txt");
  auto fi = open("_graph_indicator.txt");
  auto fl = open("_graph_labels.txt");
  std::ofstream fn, fw;
  if (one_hot) fn = open("_node_labels.txt");
  else fn = open("_node_attributes.txt");
  if (!unit_weights) fw = open("_edge_weights.txt");

  std::size_t offset = 0;
  for (std::size_t g = 0; g < bundle.graphs.size(); ++g) {
    const Graph& gr = bundle.graphs[g];
    const SparseMatrix& a = gr.adjacency();
    for (Index r = 0; r < a.outerSize(); ++r)
      for (SparseMatrix::InnerIterator it(a, r); it; ++it) {
        fa << offset + static_cast<std::size_t>(r) + 1 << ", " << offset + static_cast<std::size_t>(it.col()) + 1
           << '\n';
        if (!unit_weights) fw << detail::fmt_real(it.value()) << '\n';
      }
    const Matrix& x = gr.features();
    for (Index r = 0; r < gr.num_vertices(); ++r) {
      fi << g + 1 << '\n';
      if (one_hot) {
        Index c = 0;
        x.row(r).maxCoeff(&c);
        fn << c << '\n';
      } else {
        for (Index c = 0; c < x.cols(); ++c) fn << (c ? ", " : "") << detail::fmt_real(x(r, c));
        fn << '\n';
      }
    }
    fl << bundle.labels[g] << '\n';
    offset += static_cast<std::size_t>(gr.num_vertices());
  }
}

/// Writes the TUD files plus <name>_manifest.json describing the generator run.
inline void write_synthetic(const DatasetBundle& bundle, const SyntheticConfig& config,
                            const std::filesystem::path& dir) {
  write_tud(bundle, dir, bundle.name);
  const CorpusStats s = corpus_stats(bundle.graphs);
  nlohmann::json manifest = {
      {"name", bundle.name},
      {"difficulty", std::string(to_string(config.difficulty))},
      {"seed", config.seed},
      {"graphs", bundle.size()},
      {"classes", bundle.num_classes()},
      {"config", to_json(config)},
      {"avg_vertices", s.avg_vertices},
      {"avg_edges", s.avg_edges},
  };
  std::ofstream f(dir / (bundle.name + "_manifest.json"), std::ios::binary);
  if (!f) throw IoError("cannot write manifest");
  f << manifest.dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// Folds
// ---------------------------------------------------------------------------

/// Stratified external folds; each fold's remaining samples get a seeded,
/// stratified hold-out of val_fraction for validation.
inline DatasetBundle make_folds(DatasetBundle bundle, int n_external, double val_fraction, std::uint64_t seed) {
  if (n_external < 2) throw InvalidArgument("need at least 2 external folds");
  if (!(val_fraction > 0.0 && val_fraction < 1.0)) throw InvalidArgument("val_fraction must lie in (0, 1)");
  const int classes = bundle.num_classes();
  std::vector<std::vector<std::size_t>> by_class(static_cast<std::size_t>(classes));
  for (std::size_t i = 0; i < bundle.labels.size(); ++i) by_class[static_cast<std::size_t>(bundle.labels[i])].push_back(i);
  for (const auto& members : by_class)
    if (static_cast<int>(members.size()) < n_external)
      throw TooFewSamples("a class has fewer samples than external folds");

  std::vector<int> fold_of(bundle.labels.size(), 0);
  Rng rng(derive_seed(seed, "external-folds"));
  int next = 0;
  for (auto& members : by_class) {
    rng.shuffle(members);
    for (std::size_t i : members) {
      fold_of[i] = next;
      next = (next + 1) % n_external;
    }
  }
  bundle.folds.assign(static_cast<std::size_t>(n_external), Fold{});
  for (int f = 0; f < n_external; ++f) {
    Fold& fold = bundle.folds[static_cast<std::size_t>(f)];
    Rng hold(derive_seed(seed, "holdout", static_cast<std::uint64_t>(f)));
    for (const auto& members : by_class) {
      std::vector<std::size_t> rest;
      for (std::size_t i : members) {
        if (fold_of[i] == f) fold.test.push_back(i);
        else rest.push_back(i);
      }
      std::sort(rest.begin(), rest.end());
      hold.shuffle(rest);
      const auto n_val = static_cast<std::size_t>(std::llround(val_fraction * static_cast<double>(rest.size())));
      fold.val.insert(fold.val.end(), rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(n_val));
      fold.train.insert(fold.train.end(), rest.begin() + static_cast<std::ptrdiff_t>(n_val), rest.end());
    }
    std::sort(fold.test.begin(), fold.test.end());
    std::sort(fold.val.begin(), fold.val.end());
    std::sort(fold.train.begin(), fold.train.end());
  }
  return bundle;
}

}  // namespace pyrgnn
