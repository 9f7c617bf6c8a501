#pragma once

// Command-line front end: generate, embed, classify, project.
//
// Exit codes: 0 success, 1 usage, 2 data error, 3 numerical failure.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pyrgnn/pyrgnn.hpp"

namespace pyrgnn::cli {

enum Exit : int { kOk = 0, kUsage = 1, kData = 2, kNumerical = 3 };

struct DatasetArgs {
  std::string dir;
  std::string name;
};

/// The dataset name inside dir: the given one, or the prefix of the only *_A.txt file.
inline std::string resolve_name(const DatasetArgs& d) {
  if (!d.name.empty()) return d.name;
  namespace fs = std::filesystem;
  if (!fs::is_directory(d.dir)) throw IoError("dataset directory not found: " + d.dir);
  std::vector<std::string> found;
  for (const auto& e : fs::directory_iterator(d.dir)) {
    const std::string f = e.path().filename().string();
    if (f.size() > 6 && f.ends_with("_A.txt")) found.push_back(f.substr(0, f.size() - 6));
  }
  if (found.size() != 1)
    throw IoError("cannot infer the dataset name in " + d.dir + " (found " + std::to_string(found.size()) +
                  " edge files); pass --name");
  return found.front();
}

inline std::uint64_t pooling_seed(std::uint64_t master) { return derive_seed(master, "pooling"); }

/// Pyramid builder honouring PYRGNN_CACHE_DIR; empty when caching is off.
inline std::function<GraphPyramid(std::size_t)> cache_source(const DatasetBundle& b, const std::string& name,
                                                             PoolMethod method, std::size_t levels,
                                                             const PoolOptions& opts) {
  const auto dir = cache_dir_from_env();
  if (!dir) return {};
  return [&b, name, method, levels, opts, dir = *dir](std::size_t i) {
    CacheKey key{name, i, method, levels, opts.ndp.delta, derive_seed(opts.seed, "graph-pyramid", i)};
    return cached_pyramid(dir, key, b.graphs[i], opts);
  };
}

inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void open_out(std::ofstream& f, const std::string& path) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  f.open(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path);
}

struct Globals {
  std::uint64_t seed = 0;
  int jobs = default_jobs();
};

// ---------------------------------------------------------------------------

struct GenerateArgs {
  std::string difficulty = "easy";
  int n = 1800;
  bool small = false;
  std::string out;
};

inline int cmd_generate(const Globals& g, const GenerateArgs& a, std::ostream& out) {
  const Difficulty d = parse_difficulty(a.difficulty);
  SyntheticConfig cfg = a.small ? SyntheticConfig::small(d, g.seed) : SyntheticConfig::preset(d, a.n, g.seed);
  DatasetBundle b = generate_synthetic(cfg);
  if (a.small) b.name += "-small";
  write_synthetic(b, cfg, a.out);
  const CorpusStats s = corpus_stats(b.graphs);
  out << "wrote " << b.size() << " graphs (" << b.name << ") to " << a.out << "; avg N " << s.avg_vertices
      << ", avg edges " << s.avg_edges << '\n';
  return kOk;
}

// ---------------------------------------------------------------------------

struct EmbedArgs {
  DatasetArgs data;
  std::string method = "nopool";
  std::size_t levels = 2;
  int hidden = 50;
  double rho = 0.9;
  double omega_in = 0.5;
  double omega_hid = 0.5;
  double epsilon = 1e-5;
  int max_iter = 50;
  double delta = 0.1;
  std::string out = "embeddings.csv";
  std::string analysis;
};

inline int cmd_embed(const Globals& g, const EmbedArgs& a, std::ostream& out) {
  const std::string name = resolve_name(a.data);
  const DatasetBundle b = load_tud(a.data.dir, name);
  ReservoirConfig rc;
  rc.hidden_units = a.hidden;
  rc.rho_target = a.rho;
  rc.omega_in = a.omega_in;
  rc.omega_hid = a.omega_hid;
  rc.epsilon = a.epsilon;
  rc.max_iter = a.max_iter;
  rc.seed = derive_seed(g.seed, "reservoir");
  rc.validate();
  const PoolMethod method = parse_pool_method(a.method);
  PoolOptions po;
  po.ndp.delta = a.delta;
  po.seed = pooling_seed(g.seed);

  Architecture arch{method, a.levels, a.hidden};
  const PreparedCorpus pc =
      prepare_corpus(b.graphs, b.feature_dim, arch, po, g.jobs, cache_source(b, name, method, a.levels, po));
  const auto layers = init_stack(rc, b.feature_dim, a.levels);

  std::vector<EmbedResult> results(b.size());
  parallel_for(b.size(), g.jobs, [&](std::size_t i) {
    results[i] = embed_stack(layers, pc.pyramids[i], b.graphs[i].features(), rc);
  });

  std::ofstream emb;
  open_out(emb, a.out);
  emb << "graph_id,label";
  for (int j = 0; j < a.hidden; ++j) emb << ",e" << j;
  emb << '\n';
  for (std::size_t i = 0; i < b.size(); ++i) {
    emb << i << ',' << b.labels[i];
    for (Index j = 0; j < results[i].embedding.size(); ++j) emb << ',' << fmt(results[i].embedding[j]);
    emb << '\n';
  }

  std::string analysis_path = a.analysis;
  if (analysis_path.empty()) {
    std::filesystem::path p(a.out);
    analysis_path = (p.parent_path() / (p.stem().string() + "_analysis.csv")).string();
  }
  std::ofstream rep;
  open_out(rep, analysis_path);
  rep << kAnalysisHeader << '\n';
  double total_ms = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    for (const auto& row :
         analyze_embedding(std::to_string(i), pc.pyramids[i], layers, b.graphs[i].features(), results[i], a.epsilon))
      write_analysis_row(rep, row);
    for (double ms : results[i].layer_ms) total_ms += ms;
  }
  out << "embedded " << b.size() << " graphs with " << to_string(method) << " (L=" << a.levels << ", H=" << a.hidden
      << ") in " << total_ms / 1000.0 << " s; pyramids " << pc.pyramid_time_s << " s\n"
      << "embeddings: " << a.out << "\nanalysis:   " << analysis_path << '\n';
  return kOk;
}

// ---------------------------------------------------------------------------

struct ClassifyArgs {
  DatasetArgs data;
  std::string method = "nopool";
  std::size_t levels = 2;
  int hidden = 50;
  int configs = 100;
  int seeds = 3;
  int folds = 5;
  double val_fraction = 0.1;
  std::vector<double> alphas{1e2, 1e1, 1e0, 1e-1, 1e-2};
  double epsilon = 1e-5;
  int max_iter = 50;
  double delta = 0.1;
  bool smoke = false;
  bool ratio_report = false;
  std::string report = "cv_report";
};

inline int cmd_classify(const Globals& g, ClassifyArgs a, std::ostream& out) {
  if (a.smoke) {
    a.folds = 2;
    a.configs = 2;
    a.seeds = 1;
  }
  const std::string name = resolve_name(a.data);
  const DatasetBundle b = make_folds(load_tud(a.data.dir, name), a.folds, a.val_fraction, derive_seed(g.seed, "folds"));
  Architecture arch{parse_pool_method(a.method), a.levels, a.hidden};
  Protocol p;
  p.n_configs = a.configs;
  p.n_seeds = a.seeds;
  p.alpha_grid = a.alphas;
  p.epsilon = a.epsilon;
  p.max_iter = a.max_iter;
  p.pooling.ndp.delta = a.delta;
  p.pooling.seed = pooling_seed(g.seed);
  p.seed = g.seed;
  p.jobs = g.jobs;
  const CvReport r = nested_cv(b, arch, p, cache_source(b, name, arch.method, a.levels, p.pooling));

  std::ofstream csv, json;
  open_out(csv, a.report + ".csv");
  write_cv_csv(csv, r, a.ratio_report);
  open_out(json, a.report + ".json");
  nlohmann::json j = to_json(r);
  if (a.ratio_report) {
    const double t = r.train_time_s() + r.test_time_s();
    j["ratio"] = t > 0.0 ? r.mean() / t : 0.0;
  }
  json << j.dump(2) << '\n';

  char buf[256];
  std::snprintf(buf, sizeof buf, "%s %s L=%zu H=%d: accuracy %.2f +- %.2f %%, t_tr %.2f s, t_ts %.2f s\n",
                b.name.c_str(), std::string(to_string(arch.method)).c_str(), a.levels, a.hidden, 100.0 * r.mean(),
                100.0 * r.stddev(), r.train_time_s(), r.test_time_s());
  out << buf;
  if (a.ratio_report) {
    const double t = r.train_time_s() + r.test_time_s();
    std::snprintf(buf, sizeof buf, "accuracy / (t_tr + t_ts) = %.6g per s\n", t > 0.0 ? r.mean() / t : 0.0);
    out << buf;
  }
  out << "report: " << a.report << ".csv, " << a.report << ".json\n";
  return kOk;
}

// ---------------------------------------------------------------------------

struct ProjectArgs {
  std::string embeddings;
  std::string labels;
  int dim = 2;
  std::string out = "projection.csv";
};

/// Reads a graph_id,label,e0,... file; returns ids, labels and the embedding matrix.
inline void read_embeddings(const std::string& path, std::vector<std::string>& ids, std::vector<int>& labels,
                            Matrix& z) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path, 1, "empty file");
  std::vector<std::vector<double>> rows;
  std::size_t no = 1;
  while (std::getline(in, line)) {
    ++no;
    if (line.empty()) continue;
    const auto f = detail::split_fields(line);
    if (f.size() < 3) throw ParseError(path, no, "expected graph_id,label,e0,...");
    ids.emplace_back(f[0]);
    labels.push_back(static_cast<int>(detail::parse_int(f[1], path, no)));
    std::vector<double> r;
    for (std::size_t k = 2; k < f.size(); ++k) r.push_back(detail::parse_real(f[k], path, no));
    if (!rows.empty() && r.size() != rows.front().size()) throw ParseError(path, no, "inconsistent row width");
    rows.push_back(std::move(r));
  }
  if (rows.empty()) throw ParseError(path, no, "no embeddings");
  z.resize(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) z(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
}

inline int cmd_project(const ProjectArgs& a, std::ostream& out, std::ostream& err) {
  std::vector<std::string> ids;
  std::vector<int> labels;
  Matrix z;
  read_embeddings(a.embeddings, ids, labels, z);
  if (!a.labels.empty()) {
    const auto lines = detail::read_lines(a.labels);
    if (lines.size() != labels.size()) throw ParseError(a.labels, 0, "expected one label per embedding row");
    for (std::size_t i = 0; i < lines.size(); ++i)
      labels[i] = static_cast<int>(detail::parse_int(lines[i].second, a.labels, lines[i].first));
  }
  // Remap to contiguous class ids.
  std::map<int, int> remap;
  for (int l : labels) remap.emplace(l, 0);
  int next = 0;
  for (auto& [k, v] : remap) v = next++;
  for (int& l : labels) l = remap.at(l);
  const int classes = static_cast<int>(remap.size());
  if (a.dim > classes - 1) {
    err << "error: LDA yields at most classes - 1 = " << classes - 1 << " dimension(s) for " << classes
        << " classes; pass --dim " << std::max(classes - 1, 1) << '\n';
    return kUsage;
  }
  const Matrix p = lda_project(z, labels, a.dim);
  std::ofstream f;
  open_out(f, a.out);
  f << "graph_id,label";
  for (int k = 1; k <= a.dim; ++k) f << ",dim" << k;
  f << '\n';
  for (Index i = 0; i < p.rows(); ++i) {
    f << ids[static_cast<std::size_t>(i)] << ',' << labels[static_cast<std::size_t>(i)];
    for (Index k = 0; k < p.cols(); ++k) f << ',' << fmt(p(i, k));
    f << '\n';
  }
  out << "projected " << p.rows() << " embeddings to " << a.dim << "-D: " << a.out << '\n';
  return kOk;
}

// ---------------------------------------------------------------------------

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Reservoir graph embeddings over coarsening pyramids"};
  app.set_config("--config", "", "TOML file with flag values; command-line flags override it");
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand
  Globals g;
  app.add_option("--seed", g.seed, "Master seed for all randomness")->capture_default_str();
  app.add_option("--jobs", g.jobs, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);

  const std::map<std::string, std::string> methods{
      {"nopool", "nopool"}, {"graclus", "graclus"}, {"nmf", "nmf"}, {"ndp", "ndp"}};
  auto dataset_flags = [](CLI::App* sub, DatasetArgs& d) {
    sub->add_option("--dataset", d.dir, "Directory with the TUD-style files")->required();
    sub->add_option("--name", d.name, "Dataset name (file prefix); inferred when the directory holds one");
  };

  GenerateArgs ga;
  auto* gen = app.add_subcommand("generate", "Write a synthetic easy/hard corpus in the TUD layout");
  gen->add_option("--difficulty", ga.difficulty, "easy or hard")
      ->capture_default_str()
      ->check(CLI::IsMember({"easy", "hard"}));
  gen->add_option("--n", ga.n, "Number of graphs")->capture_default_str()->check(CLI::Range(3, 10000000));
  gen->add_flag("--small", ga.small, "Write the reduced small variant (300 graphs)");
  gen->add_option("--out", ga.out, "Output directory")->required();

  EmbedArgs ea;
  auto* emb = app.add_subcommand("embed", "Embed every graph of a dataset and write the analysis report");
  dataset_flags(emb, ea.data);
  emb->add_option("--method", ea.method, "Pooling: nopool, graclus, nmf, ndp")
      ->capture_default_str()
      ->transform(CLI::IsMember(methods, CLI::ignore_case));
  emb->add_option("--levels", ea.levels, "Pyramid levels L")->capture_default_str()->check(CLI::Range(1, 16));
  emb->add_option("--hidden", ea.hidden, "Reservoir units H")->capture_default_str()->check(CLI::PositiveNumber);
  emb->add_option("--rho", ea.rho, "Target spectral radius of W")->capture_default_str();
  emb->add_option("--omega-in", ea.omega_in, "Input scaling of layer 1")->capture_default_str();
  emb->add_option("--omega-hid", ea.omega_hid, "Input scaling of layers > 1")->capture_default_str();
  emb->add_option("--epsilon", ea.epsilon, "Fixed-point tolerance")->capture_default_str();
  emb->add_option("--max-iter", ea.max_iter, "Iteration cap")->capture_default_str();
  emb->add_option("--delta", ea.delta, "NDP sparsification threshold")->capture_default_str();
  emb->add_option("--out", ea.out, "Embeddings CSV")->capture_default_str();
  emb->add_option("--analysis", ea.analysis, "Analysis CSV (default: <out stem>_analysis.csv)");

  ClassifyArgs ca;
  auto* cls = app.add_subcommand("classify", "Nested cross-validated classification");
  dataset_flags(cls, ca.data);
  cls->add_option("--method", ca.method, "Pooling: nopool, graclus, nmf, ndp")
      ->capture_default_str()
      ->transform(CLI::IsMember(methods, CLI::ignore_case));
  cls->add_option("--levels", ca.levels, "Pyramid levels L")->capture_default_str()->check(CLI::Range(1, 16));
  cls->add_option("--hidden", ca.hidden, "Reservoir units H")->capture_default_str()->check(CLI::PositiveNumber);
  cls->add_option("--configs", ca.configs, "Random hyper-parameter draws")->capture_default_str();
  cls->add_option("--seeds", ca.seeds, "Reservoir initializations per draw")->capture_default_str();
  cls->add_option("--folds", ca.folds, "External folds")->capture_default_str();
  cls->add_option("--val-fraction", ca.val_fraction, "Validation hold-out fraction")->capture_default_str();
  cls->add_option("--alphas", ca.alphas, "Ridge regularization grid")->capture_default_str()->delimiter(',');
  cls->add_option("--epsilon", ca.epsilon, "Fixed-point tolerance")->capture_default_str();
  cls->add_option("--max-iter", ca.max_iter, "Iteration cap")->capture_default_str();
  cls->add_option("--delta", ca.delta, "NDP sparsification threshold")->capture_default_str();
  cls->add_flag("--smoke", ca.smoke, "Small protocol for quick checks: 2 folds, 2 draws, 1 seed");
  cls->add_flag("--ratio-report", ca.ratio_report, "Also report accuracy / (t_tr + t_ts)");
  cls->add_option("--report", ca.report, "Output prefix for <prefix>.csv and <prefix>.json")->capture_default_str();

  ProjectArgs pa;
  auto* prj = app.add_subcommand("project", "LDA projection of an embeddings CSV");
  prj->add_option("--embeddings", pa.embeddings, "CSV written by 'embed'")->required();
  prj->add_option("--labels", pa.labels, "Optional file with one label per row, overriding the CSV labels");
  prj->add_option("--dim", pa.dim, "Output dimensions (at most classes - 1)")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  prj->add_option("--out", pa.out, "Output CSV")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*gen) return cmd_generate(g, ga, out);
    if (*emb) return cmd_embed(g, ea, out);
    if (*cls) return cmd_classify(g, ca, out);
    if (*prj) return cmd_project(pa, out, err);
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const NonConvergence& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const DegenerateSpectrum& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const PoolCollapse& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const FactorizationFailure& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const SingularReduction& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const Error& e) {
    err << "data error: " << e.what() << '\n';
    return kData;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "data error: " << e.what() << '\n';
    return kData;
  }
  return kUsage;
}

}  // namespace pyrgnn::cli
