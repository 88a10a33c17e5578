// Command-line front end over the cueboot headers.
//
// Subcommands mirror the pipeline stages: ingest -> indicators -> sweep ->
// hp-classify -> learn-patterns / pattern-classify -> bootstrap -> report.
// Every stage writes a manifest holding the effective configuration, its
// hash, and content hashes of each input and output, so identical inputs and
// seeds reproduce byte-identical artifacts no matter where the output
// directory lives.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include <cueboot/cueboot.hpp>

namespace fs = std::filesystem;
using namespace cueboot;

namespace {

int exit_code_for(errc c) {
  switch (c) {
    case errc::parse_error:
    case errc::duplicate_id:
    case errc::dangling_reference:
    case errc::invalid_argument:
    case errc::io_error:
    case errc::missing_ia:
      return 2;  // malformed or mismatched input
    case errc::no_annotations:
    case errc::insufficient_data:
    case errc::insufficient_annotators:
    case errc::empty_corpus:
      return 3;  // well-formed input, not enough of it
    case errc::no_feasible_config:
      return 4;
    case errc::empty_pool:
    case errc::empty_input:
    case errc::missing_gold:
      return 5;  // a pipeline stage produced nothing usable
  }
  return 2;
}

// ---------------------------------------------------------------------
// deterministic worker pools
//
// Sweeps and corpus classification fan out across hardware threads. Each
// worker owns a disjoint index range and writes to pre-sized slots, and the
// coordinating thread does all file IO, so results are identical to a
// serial run.

template <typename Fn>
void parallel_chunks(std::size_t n, Fn fn) {
  std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, n);
  if (workers <= 1) {
    if (n > 0) fn(std::size_t{0}, n);
    return;
  }
  std::size_t chunk = (n + workers - 1) / workers;
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (std::size_t w = 0; w * chunk < n; ++w) {
    std::size_t begin = w * chunk;
    std::size_t end = std::min(n, begin + chunk);
    pool.emplace_back([&fn, &errors, w, begin, end] {
      try {
        fn(begin, end);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::vector<std::pair<Utterance, Classification>> classify_hp_parallel(
    const std::vector<LabeledUtterance>& rows, const std::vector<Indicator>& indicators,
    const HPConfig& config) {
  config.validate();
  std::vector<std::pair<Utterance, Classification>> out(rows.size());
  parallel_chunks(rows.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i)
      out[i] = {rows[i].utterance, classify_one(rows[i].utterance, indicators, config)};
  });
  return out;
}

std::vector<std::pair<Utterance, Classification>> classify_pattern_parallel(
    const std::vector<LabeledUtterance>& rows, const std::vector<ExtractionPattern>& patterns,
    const PatternConfig& config, const PretagMap* pretagged) {
  config.validate();
  std::vector<std::pair<Utterance, Classification>> out(rows.size());
  parallel_chunks(rows.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i)
      out[i] = {rows[i].utterance,
                classify_patterns(rows[i].utterance, patterns, config, pretagged)};
  });
  return out;
}

// Partitions the outer grid axis across workers; each slice keeps the
// library's row order and the caller re-sorts anyway.
std::vector<SweepResult> sweep_parallel(const std::vector<LabeledUtterance>& train,
                                        const std::vector<Indicator>& indicators, Regime regime,
                                        const SweepGrids& grids) {
  const bool ia = regime == Regime::IA_FEATURES;
  if (grids.theta1s.empty() ||
      (ia ? grids.betas.empty() || grids.alphas.empty() : grids.theta2s.empty()))
    throw error(errc::invalid_argument, "sweep grids must be non-empty");
  std::size_t n = ia ? grids.betas.size() : grids.theta1s.size();
  std::vector<std::vector<SweepResult>> parts(n);
  parallel_chunks(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      SweepGrids slice = grids;
      if (ia)
        slice.betas = {grids.betas[i]};
      else
        slice.theta1s = {grids.theta1s[i]};
      parts[i] = sweep(train, indicators, regime, slice);
    }
  });
  std::vector<SweepResult> out;
  for (auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

std::vector<SweepResult> sweep_patterns_parallel(
    const std::vector<LabeledUtterance>& eval_set,
    const std::vector<std::pair<Utterance, Label>>& source, const SweepGrids& grids,
    const PretagMap* pretagged) {
  if (grids.theta1s.empty() || grids.theta2s.empty())
    throw error(errc::invalid_argument, "sweep grids must be non-empty");
  if (source.empty()) throw error(errc::empty_input, "no classified utterances to learn from");
  std::vector<std::vector<SweepResult>> parts(grids.theta1s.size());
  parallel_chunks(grids.theta1s.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      SweepGrids slice = grids;
      slice.theta1s = {grids.theta1s[i]};
      parts[i] = sweep_patterns(eval_set, source, slice, pretagged);
    }
  });
  std::vector<SweepResult> out;
  for (auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

// Total order: best row first, ties broken all the way down so the written
// table is unique for a given result set.
void sort_results(std::vector<SweepResult>& results) {
  std::sort(results.begin(), results.end(), [](const SweepResult& x, const SweepResult& y) {
    if (x.f1 != y.f1) return x.f1 > y.f1;
    if (x.precision != y.precision) return x.precision > y.precision;
    if (x.recall != y.recall) return x.recall > y.recall;
    return x.config.key() < y.config.key();
  });
}

// ---------------------------------------------------------------------
// run configuration: defaults, then --config file, then flags

struct RunConfig {
  Task task = Task::SARCASM_BINARY;
  std::uint64_t seed = 13;
  GoldThresholds thresholds;
  std::vector<SplitSpec> split_spec;  // empty -> proportional default at ingest
  std::size_t annotators_per_utterance = 0;
  std::size_t chi2_min_freq = 2;
  std::size_t chi2_top_k = 100;
  double min_recall = 0.0;
  SweepGrids grids = SweepGrids::defaults();
  SweepGrids pattern_grids = SweepGrids::defaults();
};

Task task_from_flag(const std::string& s) {
  if (s == "sarcasm") return Task::SARCASM_BINARY;
  if (s == "nasty") return Task::NASTY_SCALAR;
  throw error(errc::invalid_argument, "unknown task '" + s + "' (want sarcasm|nasty)");
}

SplitName split_from_flag(const std::string& s) {
  auto name = split_from_name(s);
  if (!name) throw error(errc::invalid_argument, "unknown split '" + s + "'");
  return *name;
}

json grids_to_json(const SweepGrids& g) {
  json obj;
  obj["betas"] = g.betas;
  obj["alphas"] = g.alphas;
  obj["theta1s"] = g.theta1s;
  obj["theta2s"] = g.theta2s;
  return obj;
}

void grids_from_json(SweepGrids& g, const json& obj) {
  if (obj.contains("betas")) g.betas = obj.at("betas").get<std::vector<double>>();
  if (obj.contains("alphas")) g.alphas = obj.at("alphas").get<std::vector<double>>();
  if (obj.contains("theta1s")) g.theta1s = obj.at("theta1s").get<std::vector<int>>();
  if (obj.contains("theta2s")) g.theta2s = obj.at("theta2s").get<std::vector<double>>();
}

json split_spec_to_json(const std::vector<SplitSpec>& spec) {
  json arr = json::array();
  for (const auto& s : spec) {
    json obj;
    obj["name"] = split_name(s.name);
    obj["class"] = s.class_count;
    if (s.counter_count) obj["counter"] = *s.counter_count;
    arr.push_back(obj);
  }
  return arr;
}

void apply_config_file(RunConfig& rc, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw error(errc::io_error, "cannot open config '" + path + "'");
  json obj;
  try {
    obj = json::parse(in);
  } catch (const json::exception& e) {
    throw error(errc::parse_error, path + ": " + e.what());
  }
  try {
    if (obj.contains("task")) rc.task = task_from_flag(obj.at("task").get<std::string>());
    if (obj.contains("seed")) rc.seed = obj.at("seed").get<std::uint64_t>();
    if (obj.contains("thresholds")) {
      const auto& t = obj.at("thresholds");
      if (t.contains("sarc_min")) rc.thresholds.sarc_min = t.at("sarc_min").get<double>();
      if (t.contains("nasty_max")) rc.thresholds.nasty_max = t.at("nasty_max").get<double>();
      if (t.contains("nice_min")) rc.thresholds.nice_min = t.at("nice_min").get<double>();
    }
    if (obj.contains("splits")) {
      rc.split_spec.clear();
      for (const auto& s : obj.at("splits")) {
        SplitSpec spec;
        spec.name = split_from_flag(s.at("name").get<std::string>());
        spec.class_count = s.at("class").get<std::size_t>();
        if (s.contains("counter") && !s.at("counter").is_null())
          spec.counter_count = s.at("counter").get<std::size_t>();
        rc.split_spec.push_back(spec);
      }
    }
    if (obj.contains("annotators_per_utterance"))
      rc.annotators_per_utterance = obj.at("annotators_per_utterance").get<std::size_t>();
    if (obj.contains("chi2")) {
      const auto& c = obj.at("chi2");
      if (c.contains("min_freq")) rc.chi2_min_freq = c.at("min_freq").get<std::size_t>();
      if (c.contains("top_k")) rc.chi2_top_k = c.at("top_k").get<std::size_t>();
    }
    if (obj.contains("min_recall")) rc.min_recall = obj.at("min_recall").get<double>();
    if (obj.contains("grids")) grids_from_json(rc.grids, obj.at("grids"));
    if (obj.contains("pattern_grids")) grids_from_json(rc.pattern_grids, obj.at("pattern_grids"));
  } catch (const json::exception& e) {
    throw error(errc::parse_error, path + ": " + e.what());
  }
}

json run_config_json(const RunConfig& rc) {
  json obj;
  obj["task"] = task_name(rc.task);
  obj["seed"] = rc.seed;
  obj["thresholds"] = {{"sarc_min", rc.thresholds.sarc_min},
                       {"nasty_max", rc.thresholds.nasty_max},
                       {"nice_min", rc.thresholds.nice_min}};
  obj["splits"] = split_spec_to_json(rc.split_spec);
  obj["annotators_per_utterance"] = rc.annotators_per_utterance;
  obj["chi2"] = {{"min_freq", rc.chi2_min_freq}, {"top_k", rc.chi2_top_k}};
  obj["min_recall"] = rc.min_recall;
  obj["grids"] = grids_to_json(rc.grids);
  obj["pattern_grids"] = grids_to_json(rc.pattern_grids);
  return obj;
}

// ---------------------------------------------------------------------
// manifests

struct Manifest {
  std::string command;
  std::string hash;
  json effective;
  json inputs = json::object();
  json outputs = json::object();
  json summary = json::object();
};

Manifest begin_manifest(const std::string& command, const RunConfig& rc, json params) {
  Manifest m;
  m.command = command;
  json eff = run_config_json(rc);
  eff["command"] = command;
  eff["params"] = std::move(params);
  m.hash = config_hash(eff);
  m.effective = std::move(eff);
  return m;
}

void write_manifest(const std::string& path, const Manifest& m) {
  json obj;
  obj["command"] = m.command;
  obj["config_hash"] = m.hash;
  obj["effective_config"] = m.effective;
  obj["inputs"] = m.inputs;
  obj["outputs"] = m.outputs;
  obj["summary"] = m.summary;
  std::ofstream out(path);
  if (!out) throw error(errc::io_error, "cannot write '" + path + "'");
  out << obj.dump(2) << "\n";
}

std::string join(const std::string& dir, const char* name) {
  return (fs::path(dir) / name).string();
}

json parse_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw error(errc::io_error, "cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw error(errc::parse_error, path + ": " + e.what());
  }
}

// ---------------------------------------------------------------------
// option storage

struct Opts {
  // global
  std::string task = "sarcasm";
  std::uint64_t seed = 13;
  std::string config;
  std::string out = ".";
  std::string pretagged;
  // inputs
  std::string corpus, labeled, splits, indicators, classifications, patterns, hp_config,
      pattern_config;
  // indicators
  std::string source = "both";
  std::string mt_split = "mt_exp_dev";
  std::string chi2_split = "hp_train";
  std::vector<std::size_t> ita_ks;
  std::size_t resamples = 20;
  // sweep / classify
  std::string regime;
  std::string split;
  std::string stats_from = "hp_train";
  std::string eval_split;  // pattern selection scores on the pool split unless overridden
  int theta1 = 2;
  double theta2 = 0.0;
  double alpha = 0.0;
  double beta = 1.0;
  bool has_theta2 = false, has_alpha = false, has_beta = false;
  double min_recall = 0.0;
  bool has_min_recall = false;
  // patterns
  int pattern_theta1 = 2;
  double pattern_theta2 = 0.55;
  bool has_pattern_theta1 = false, has_pattern_theta2 = false;
  std::size_t rounds = 2;
  // report
  std::vector<std::string> sweep_files;
  std::vector<std::string> metrics_files;
};

RunConfig resolve(const Opts& o, const CLI::App& app) {
  RunConfig rc;
  if (!o.config.empty()) apply_config_file(rc, o.config);
  if (app.count("--task")) rc.task = task_from_flag(o.task);
  if (app.count("--seed")) rc.seed = o.seed;
  return rc;
}

HPConfig build_hp_config(const Opts& o) {
  if (!o.hp_config.empty()) {
    try {
      return hp_config_from_json(parse_json_file(o.hp_config));
    } catch (const json::exception& e) {
      throw error(errc::parse_error, o.hp_config + ": " + e.what());
    }
  }
  if (o.regime.empty())
    throw error(errc::invalid_argument, "need --hp-config FILE or --regime with thresholds");
  HPConfig c;
  c.regime = regime_from_name(o.regime);
  c.theta1 = o.theta1;
  if (c.regime == Regime::IA_FEATURES) {
    if (!o.has_alpha || !o.has_beta)
      throw error(errc::invalid_argument, "ia regime needs --alpha and --beta");
    c.alpha = o.alpha;
    c.beta = o.beta;
  } else {
    if (!o.has_theta2)
      throw error(errc::invalid_argument, "regime '" + o.regime + "' needs --theta2");
    c.theta2 = o.theta2;
  }
  c.validate();
  return c;
}

const PretagMap* load_pretagged(const Opts& o, PretagMap& storage) {
  if (o.pretagged.empty()) return nullptr;
  storage = read_pretagged(o.pretagged);
  return &storage;
}

std::vector<std::pair<std::string, Label>> to_predictions(
    const std::vector<std::pair<Utterance, Classification>>& rows) {
  std::vector<std::pair<std::string, Label>> out;
  out.reserve(rows.size());
  for (const auto& [u, c] : rows) out.emplace_back(u.id, c.label);
  return out;
}

void write_metrics_json(const std::string& path, const Metrics& m, const std::string& stage,
                        const std::string& hash) {
  json obj = metrics_to_json(m);
  obj["stage"] = stage;
  obj["config_hash"] = hash;
  std::ofstream out(path);
  if (!out) throw error(errc::io_error, "cannot write '" + path + "'");
  out << obj.dump(2) << "\n";
}

// ---------------------------------------------------------------------
// subcommands

std::vector<SplitSpec> default_split_spec(const std::vector<LabeledUtterance>& labeled) {
  std::size_t n_class = 0, n_counter = 0;
  for (const auto& lu : labeled) (lu.class_label == Label::CLASS ? n_class : n_counter)++;
  // 20/30/25/25 percent of the class pool; counters mirror the last three.
  std::vector<SplitSpec> spec;
  spec.push_back({SplitName::MT_EXP_DEV, n_class / 5, std::nullopt});
  spec.push_back({SplitName::HP_TRAIN, n_class * 3 / 10, n_counter * 3 / 10});
  spec.push_back({SplitName::HP_DEV_TEST, n_class / 4, n_counter / 4});
  spec.push_back({SplitName::PE_EVAL, n_class / 4, n_counter / 4});
  return spec;
}

void cmd_ingest(Opts& o, const CLI::App& app) {
  RunConfig rc = resolve(o, app);
  auto corpus = load_corpus(o.corpus);
  validate_corpus(corpus);
  auto labeled = derive_gold_labels(corpus.utterances, corpus.annotations, rc.task, rc.thresholds);
  if (rc.split_spec.empty()) rc.split_spec = default_split_spec(labeled);
  auto splits = make_splits(labeled, rc.split_spec, rc.seed);

  auto m = begin_manifest("ingest", rc, json::object());
  fs::create_directories(o.out);
  auto labeled_path = join(o.out, "labeled.jsonl");
  auto splits_path = join(o.out, "splits.json");
  write_labeled(labeled_path, labeled);
  write_splits(splits_path, splits);
  m.inputs["corpus"] = content_hash(o.corpus);
  m.outputs["labeled.jsonl"] = content_hash(labeled_path);
  m.outputs["splits.json"] = content_hash(splits_path);
  m.summary["utterances"] = corpus.utterances.size();
  m.summary["labeled"] = labeled.size();
  json per_split = json::object();
  for (const auto& s : splits) per_split[split_name(s.name)] = s.members.size();
  m.summary["splits"] = per_split;
  write_manifest(join(o.out, "ingest_manifest.json"), m);
  std::cout << "ingest: " << labeled.size() << " labeled of " << corpus.utterances.size()
            << " utterances -> " << o.out << "\n";
}

void cmd_indicators(Opts& o, const CLI::App& app) {
  RunConfig rc = resolve(o, app);
  bool want_mt = o.source == "mt" || o.source == "both";
  bool want_chi2 = o.source == "chi2" || o.source == "both";
  if (!want_mt && !want_chi2)
    throw error(errc::invalid_argument, "unknown --source '" + o.source + "' (want mt|chi2|both)");
  auto splits = read_splits(o.splits);

  json params;
  params["source"] = o.source;
  params["mt_split"] = o.mt_split;
  params["chi2_split"] = o.chi2_split;
  if (!o.ita_ks.empty()) {
    params["ita_ks"] = o.ita_ks;
    params["resamples"] = o.resamples;
  }
  auto m = begin_manifest("indicators", rc, params);
  m.inputs["splits"] = content_hash(o.splits);
  fs::create_directories(o.out);

  if (want_mt || !o.ita_ks.empty()) {
    if (o.corpus.empty())
      throw error(errc::invalid_argument, "mt mining reads annotator spans; pass --corpus");
    auto corpus = load_corpus(o.corpus);
    validate_corpus(corpus);
    m.inputs["corpus"] = content_hash(o.corpus);
    const auto& split = find_split(splits, split_from_flag(o.mt_split));
    std::vector<Utterance> utterances;
    for (const auto& u : corpus.utterances)
      if (split.members.count(u.id)) utterances.push_back(u);
    if (utterances.empty())
      throw error(errc::empty_corpus, "split '" + o.mt_split + "' selects no utterances");
    std::vector<IndicatorAnnotation> spans;
    for (const auto& s : corpus.indicator_spans)
      if (split.members.count(s.utterance_id)) spans.push_back(s);

    std::map<std::string, std::size_t> declared;
    std::map<std::string, std::set<std::string>> seen;
    for (const auto& s : spans) seen[s.utterance_id].insert(s.annotator_id);
    for (const auto& u : utterances) {
      auto it = seen.find(u.id);
      std::size_t observed = it == seen.end() ? 0 : it->second.size();
      declared[u.id] = std::max(rc.annotators_per_utterance, observed);
    }

    if (want_mt) {
      auto mined = aggregate_mt_indicators(utterances, spans, declared);
      auto p = join(o.out, "indicators_mt.tsv");
      write_indicators_tsv(p, mined, m.hash, rc.seed);
      m.outputs["indicators_mt.tsv"] = content_hash(p);
      m.summary["mt_indicators"] = mined.size();
    }
    if (!o.ita_ks.empty()) {
      auto points = ita_curve(spans, utterances, o.ita_ks, o.resamples, rc.seed);
      auto p = join(o.out, "ita.tsv");
      std::ofstream out(p);
      if (!out) throw error(errc::io_error, "cannot write '" + p + "'");
      out << "# config " << m.hash << " seed " << rc.seed << "\n";
      out << "k\tmean_correlation\n";
      char buf[32];
      for (const auto& pt : points) {
        std::snprintf(buf, sizeof buf, "%.6f", pt.mean_correlation);
        out << pt.k << '\t' << buf << '\n';
      }
      out.close();
      m.outputs["ita.tsv"] = content_hash(p);
    }
  }

  if (want_chi2) {
    if (o.labeled.empty())
      throw error(errc::invalid_argument, "chi2 mining needs gold labels; pass --labeled");
    auto labeled = read_labeled(o.labeled);
    m.inputs["labeled"] = content_hash(o.labeled);
    auto subset = split_subset(labeled, find_split(splits, split_from_flag(o.chi2_split)));
    auto mined = select_chi2_indicators(subset, rc.chi2_min_freq, rc.chi2_top_k);
    auto p = join(o.out, "indicators_chi2.tsv");
    write_indicators_tsv(p, mined, m.hash, rc.seed);
    m.outputs["indicators_chi2.tsv"] = content_hash(p);
    m.summary["chi2_indicators"] = mined.size();
  }

  write_manifest(join(o.out, "indicators_manifest.json"), m);
  std::cout << "indicators: " << m.summary.dump() << " -> " << o.out << "\n";
}

void cmd_sweep(Opts& o, const CLI::App& app) {
  RunConfig rc = resolve(o, app);
  if (o.has_min_recall) rc.min_recall = o.min_recall;
  auto labeled = read_labeled(o.labeled);
  auto splits = read_splits(o.splits);
  const bool pattern_regime = o.regime == "pattern";
  std::string split = !o.split.empty() ? o.split : (pattern_regime ? "pe_eval" : "hp_train");

  json params;
  params["regime"] = o.regime;
  params["split"] = split;
  params["min_recall"] = rc.min_recall;
  auto m = begin_manifest("sweep", rc, params);
  m.inputs["labeled"] = content_hash(o.labeled);
  m.inputs["splits"] = content_hash(o.splits);

  std::vector<SweepResult> results;
  if (pattern_regime) {
    auto eval_set = split_subset(labeled, find_split(splits, split_from_flag(split)));
    std::vector<std::pair<Utterance, Label>> source;
    for (const auto& lu : eval_set) source.emplace_back(lu.utterance, lu.class_label);
    PretagMap storage;
    const PretagMap* pretag = load_pretagged(o, storage);
    if (pretag) m.inputs["pretagged"] = content_hash(o.pretagged);
    results = sweep_patterns_parallel(eval_set, source, rc.pattern_grids, pretag);
  } else {
    Regime regime = regime_from_name(o.regime);
    auto train = split_subset(labeled, find_split(splits, split_from_flag(split)));
    auto inds = read_indicators_tsv(o.indicators);
    m.inputs["indicators"] = content_hash(o.indicators);
    if (regime != Regime::IA_FEATURES) inds = indicators_with_stats_from(inds, train);
    results = sweep_parallel(train, inds, regime, rc.grids);
  }
  sort_results(results);

  fs::create_directories(o.out);
  auto sweep_path = join(o.out, "sweep.tsv");
  write_sweep_tsv(sweep_path, results, o.regime, m.hash, rc.seed);
  m.outputs["sweep.tsv"] = content_hash(sweep_path);
  m.summary["rows"] = results.size();

  auto best = select_best(results, SelectionPolicy{rc.min_recall});
  json best_json;
  if (pattern_regime) {
    best_json["theta1"] = best.theta1;
    best_json["theta2"] = best.theta2;
  } else {
    best_json = hp_config_to_json(best);
  }
  best_json["config_hash"] = m.hash;
  auto best_path = join(o.out, "best_config.json");
  {
    std::ofstream out(best_path);
    if (!out) throw error(errc::io_error, "cannot write '" + best_path + "'");
    out << best_json.dump(2) << "\n";
  }
  m.outputs["best_config.json"] = content_hash(best_path);
  m.summary["best"] = format_params(best, best.regime == Regime::IA_FEATURES && !pattern_regime);
  write_manifest(join(o.out, "sweep_manifest.json"), m);
  std::cout << "sweep: " << results.size() << " rows, best "
            << m.summary["best"].get<std::string>() << " -> " << o.out << "\n";
}

void cmd_hp_classify(Opts& o, const CLI::App& app) {
  RunConfig rc = resolve(o, app);
  auto labeled = read_labeled(o.labeled);
  HPConfig cfg = build_hp_config(o);
  std::string split = o.split.empty() ? "hp_dev_test" : o.split;

  json params;
  params["hp_config"] = hp_config_to_json(cfg);
  params["split"] = o.splits.empty() ? "all" : split;
  params["stats_from"] = o.stats_from;
  auto m = begin_manifest("hp-classify", rc, params);
  m.inputs["labeled"] = content_hash(o.labeled);
  if (!o.hp_config.empty()) m.inputs["hp_config"] = content_hash(o.hp_config);

  std::vector<LabeledUtterance> subset = labeled;
  std::vector<LabeledUtterance> stats_set = labeled;
  if (!o.splits.empty()) {
    auto splits = read_splits(o.splits);
    m.inputs["splits"] = content_hash(o.splits);
    subset = split_subset(labeled, find_split(splits, split_from_flag(split)));
    stats_set = split_subset(labeled, find_split(splits, split_from_flag(o.stats_from)));
  }
  auto inds = read_indicators_tsv(o.indicators);
  m.inputs["indicators"] = content_hash(o.indicators);
  if (cfg.regime != Regime::IA_FEATURES) inds = indicators_with_stats_from(inds, stats_set);

  auto rows = classify_hp_parallel(subset, inds, cfg);
  auto metrics = evaluate(to_predictions(rows), subset);

  fs::create_directories(o.out);
  auto cls_path = join(o.out, "classifications.jsonl");
  write_classifications(cls_path, rows);
  auto metrics_path = join(o.out, "metrics.json");
  write_metrics_json(metrics_path, metrics, "hp", m.hash);
  m.outputs["classifications.jsonl"] = content_hash(cls_path);
  m.outputs["metrics.json"] = content_hash(metrics_path);
  std::size_t predicted = 0;
  for (const auto& [u, c] : rows)
    if (c.label == Label::CLASS) ++predicted;
  m.summary["classified"] = rows.size();
  m.summary["predicted_class"] = predicted;
  write_manifest(join(o.out, "hp_classify_manifest.json"), m);
  std::cout << render_metrics_table({{"hp", metrics}});
}

void cmd_learn_patterns(Opts& o, const CLI::App& app) {
  RunConfig rc = resolve(o, app);
  auto labeled = read_labeled(o.labeled);
  std::map<std::string, const Utterance*> by_id;
  for (const auto& lu : labeled) by_id[lu.utterance.id] = &lu.utterance;

  auto cls = read_classifications(o.classifications);
  std::vector<std::pair<Utterance, Label>> classified;
  for (const auto& [id, label] : cls) {
    auto it = by_id.find(id);
    if (it == by_id.end())
      throw error(errc::dangling_reference,
                  "classification references unknown utterance '" + id + "'");
    classified.emplace_back(*it->second, label);
  }

  PatternConfig pc{o.pattern_theta1, o.pattern_theta2};
  json params;
  params["theta1"] = pc.theta1;
  params["theta2"] = pc.theta2;
  auto m = begin_manifest("learn-patterns", rc, params);
  m.inputs["labeled"] = content_hash(o.labeled);
  m.inputs["classifications"] = content_hash(o.classifications);

  PretagMap storage;
  const PretagMap* pretag = load_pretagged(o, storage);
  if (pretag) m.inputs["pretagged"] = content_hash(o.pretagged);
  auto patterns = learn_patterns(classified, pc, pretag);

  fs::create_directories(o.out);
  auto pat_path = join(o.out, "patterns.json");
  write_patterns_json(pat_path, patterns);
  m.outputs["patterns.json"] = content_hash(pat_path);
  m.summary["patterns"] = patterns.size();
  write_manifest(join(o.out, "learn_patterns_manifest.json"), m);
  std::cout << "learn-patterns: " << patterns.size() << " patterns -> " << o.out << "\n";
}

void cmd_pattern_classify(Opts& o, const CLI::App& app) {
  RunConfig rc = resolve(o, app);
  auto labeled = read_labeled(o.labeled);
  std::string split = o.split.empty() ? "pe_eval" : o.split;
  PatternConfig pc{o.pattern_theta1, o.pattern_theta2};

  json params;
  params["theta1"] = pc.theta1;
  params["theta2"] = pc.theta2;
  params["split"] = o.splits.empty() ? "all" : split;
  auto m = begin_manifest("pattern-classify", rc, params);
  m.inputs["labeled"] = content_hash(o.labeled);
  m.inputs["patterns"] = content_hash(o.patterns);

  std::vector<LabeledUtterance> subset = labeled;
  if (!o.splits.empty()) {
    auto splits = read_splits(o.splits);
    m.inputs["splits"] = content_hash(o.splits);
    subset = split_subset(labeled, find_split(splits, split_from_flag(split)));
  }
  auto patterns = read_patterns_json(o.patterns);
  PretagMap storage;
  const PretagMap* pretag = load_pretagged(o, storage);
  if (pretag) m.inputs["pretagged"] = content_hash(o.pretagged);

  auto rows = classify_pattern_parallel(subset, patterns, pc, pretag);
  auto metrics = evaluate(to_predictions(rows), subset);

  fs::create_directories(o.out);
  auto cls_path = join(o.out, "classifications.jsonl");
  write_classifications(cls_path, rows);
  auto metrics_path = join(o.out, "metrics.json");
  write_metrics_json(metrics_path, metrics, "pattern", m.hash);
  m.outputs["classifications.jsonl"] = content_hash(cls_path);
  m.outputs["metrics.json"] = content_hash(metrics_path);
  m.summary["classified"] = rows.size();
  write_manifest(join(o.out, "pattern_classify_manifest.json"), m);
  std::cout << render_metrics_table({{"pattern", metrics}});
}

void cmd_bootstrap(Opts& o, const CLI::App& app) {
  RunConfig rc = resolve(o, app);
  auto labeled = read_labeled(o.labeled);
  auto splits = read_splits(o.splits);
  std::string dev_split = o.split.empty() ? "hp_dev_test" : o.split;
  auto dev = split_subset(labeled, find_split(splits, split_from_flag(dev_split)));

  HPConfig cfg = build_hp_config(o);
  auto inds = read_indicators_tsv(o.indicators);
  if (cfg.regime != Regime::IA_FEATURES)
    inds = indicators_with_stats_from(
        inds, split_subset(labeled, find_split(splits, split_from_flag(o.stats_from))));

  PretagMap storage;
  const PretagMap* pretag = load_pretagged(o, storage);

  if (o.has_pattern_theta1 != o.has_pattern_theta2)
    throw error(errc::invalid_argument, "--pattern-theta1 and --pattern-theta2 go together");

  json params;
  params["hp_config"] = hp_config_to_json(cfg);
  params["split"] = dev_split;
  params["stats_from"] = o.stats_from;
  params["rounds"] = o.rounds;
  if (!o.pattern_config.empty()) {
    params["pattern_config"] = "file";
  } else if (o.has_pattern_theta1) {
    params["pattern_config"] = json{{"theta1", o.pattern_theta1}, {"theta2", o.pattern_theta2}};
  } else {
    params["pattern_config"] = "selected";
    params["eval_split"] = o.eval_split.empty() ? dev_split : o.eval_split;
    if (o.has_min_recall)
      params["pattern_min_recall"] = o.min_recall;
    else
      params["pattern_min_recall"] = "phase1";
  }
  auto m = begin_manifest("bootstrap", rc, params);
  m.inputs["labeled"] = content_hash(o.labeled);
  m.inputs["splits"] = content_hash(o.splits);
  m.inputs["indicators"] = content_hash(o.indicators);
  if (!o.hp_config.empty()) m.inputs["hp_config"] = content_hash(o.hp_config);
  if (pretag) m.inputs["pretagged"] = content_hash(o.pretagged);

  auto state = run_phase1(dev, inds, cfg);
  Metrics phase1 = state.metrics_history.front();

  PatternConfig pc;
  if (!o.pattern_config.empty()) {
    m.inputs["pattern_config"] = content_hash(o.pattern_config);
    json obj = parse_json_file(o.pattern_config);
    try {
      pc.theta1 = obj.at("theta1").get<int>();
      pc.theta2 = obj.at("theta2").get<double>();
    } catch (const json::exception& e) {
      throw error(errc::parse_error, o.pattern_config + ": " + e.what());
    }
  } else if (o.has_pattern_theta1) {
    pc = PatternConfig{o.pattern_theta1, o.pattern_theta2};
  } else {
    // Pick (theta1, theta2) for the material phase 2 actually learns from:
    // candidate patterns come out of the phase-1 pool's predicted labels and
    // are scored against gold, keeping at least the recall phase 1 already
    // achieves.
    std::vector<LabeledUtterance> eval_storage;
    const std::vector<LabeledUtterance>* eval_set = &dev;
    if (!o.eval_split.empty()) {
      eval_storage = split_subset(labeled, find_split(splits, split_from_flag(o.eval_split)));
      eval_set = &eval_storage;
    }
    auto results =
        sweep_patterns_parallel(*eval_set, state.classified_pool, rc.pattern_grids, pretag);
    double floor = o.has_min_recall ? o.min_recall : phase1.recall;
    auto best = select_best(results, SelectionPolicy{floor});
    pc = PatternConfig{best.theta1, best.theta2};
  }
  pc.validate();

  iterate(state, dev, pc, o.rounds, pretag);

  fs::create_directories(o.out);
  auto pat_path = join(o.out, "patterns.json");
  write_patterns_json(pat_path, state.pattern_set);
  std::vector<std::pair<Utterance, Classification>> pool_rows;
  for (const auto& [u, label] : state.classified_pool)
    pool_rows.push_back({u, Classification{label, {}}});
  auto pool_path = join(o.out, "pool.jsonl");
  write_classifications(pool_path, pool_rows);

  std::vector<std::pair<std::string, Metrics>> table;
  json history = json::array();
  for (std::size_t i = 0; i < state.metrics_history.size(); ++i) {
    std::string stage = i == 0   ? "phase1"
                        : i == 1 ? "phase2"
                                 : "round" + std::to_string(i + 1);
    json row = metrics_to_json(state.metrics_history[i]);
    row["stage"] = stage;
    history.push_back(row);
    table.emplace_back(stage, state.metrics_history[i]);
  }
  m.outputs["patterns.json"] = content_hash(pat_path);
  m.outputs["pool.jsonl"] = content_hash(pool_path);
  m.summary["history"] = history;
  m.summary["iterations"] = state.iteration;
  m.summary["converged"] = state.converged;
  m.summary["patterns"] = state.pattern_set.size();
  m.summary["pattern_config"] = json{{"theta1", pc.theta1}, {"theta2", pc.theta2}};
  std::size_t pool_class = 0;
  for (const auto& [u, label] : state.classified_pool)
    if (label == Label::CLASS) ++pool_class;
  m.summary["pool"] = state.classified_pool.size();
  m.summary["pool_class"] = pool_class;
  write_manifest(join(o.out, "bootstrap_manifest.json"), m);
  std::cout << render_metrics_table(table);
}

std::string align_tsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw error(errc::io_error, "cannot open '" + path + "'");
  std::ostringstream out;
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      out << line << "\n";
      continue;
    }
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string col;
    while (std::getline(ss, col, '\t')) cols.push_back(col);
    rows.push_back(std::move(cols));
  }
  std::vector<std::size_t> widths;
  for (const auto& r : rows)
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (widths.size() <= i) widths.resize(i + 1, 0);
      widths[i] = std::max(widths[i], r[i].size());
    }
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) out << "  ";
      out << r[i];
      if (i + 1 < r.size()) out << std::string(widths[i] - r[i].size(), ' ');
    }
    out << "\n";
  }
  return out.str();
}

void cmd_report(Opts& o, const CLI::App& app) {
  RunConfig rc = resolve(o, app);
  if (o.sweep_files.empty() && o.metrics_files.empty())
    throw error(errc::empty_input, "nothing to report; pass --sweep and/or --metrics");

  json params;
  params["sweeps"] = o.sweep_files.size();
  params["metrics"] = o.metrics_files.size();
  auto m = begin_manifest("report", rc, params);

  std::string text;
  for (const auto& p : o.sweep_files) {
    m.inputs[fs::path(p).filename().string()] = content_hash(p);
    text += align_tsv(p);
    text += "\n";
  }
  std::vector<std::pair<std::string, Metrics>> rows;
  for (const auto& p : o.metrics_files) {
    m.inputs[fs::path(p).filename().string()] = content_hash(p);
    json obj = parse_json_file(p);
    std::string stage = obj.contains("stage") ? obj.at("stage").get<std::string>()
                                              : fs::path(p).stem().string();
    try {
      rows.emplace_back(stage, metrics_from_json(obj));
    } catch (const json::exception& e) {
      throw error(errc::parse_error, p + ": " + e.what());
    }
  }
  if (!rows.empty()) text += render_metrics_table(rows);

  std::cout << text;
  fs::create_directories(o.out);
  auto report_path = join(o.out, "report.txt");
  {
    std::ofstream out(report_path);
    if (!out) throw error(errc::io_error, "cannot write '" + report_path + "'");
    out << text;
  }
  m.outputs["report.txt"] = content_hash(report_path);
  write_manifest(join(o.out, "report_manifest.json"), m);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cue mining, high-precision classification, and pattern bootstrapping"};
  app.require_subcommand(1);
  Opts o;

  app.add_option("--task", o.task, "target label: sarcasm|nasty")->capture_default_str();
  app.add_option("--seed", o.seed, "RNG seed for splits and sampling")->capture_default_str();
  app.add_option("--config", o.config, "JSON run configuration");
  app.add_option("--out", o.out, "output directory")->capture_default_str();
  app.add_option("--pretagged", o.pretagged, "JSONL of pre-tagged utterances (bypasses the tagger)");

  auto* ing = app.add_subcommand("ingest", "derive gold labels and dataset splits from a corpus");
  ing->fallthrough();
  ing->add_option("--corpus", o.corpus, "corpus JSONL")->required();

  auto* ind = app.add_subcommand("indicators", "mine cue indicators");
  ind->fallthrough();
  ind->add_option("--labeled", o.labeled, "labeled JSONL (chi2 mining)");
  ind->add_option("--splits", o.splits, "splits JSON")->required();
  ind->add_option("--corpus", o.corpus, "corpus JSONL (mt mining reads spans from it)");
  ind->add_option("--source", o.source, "mt|chi2|both")->capture_default_str();
  ind->add_option("--mt-split", o.mt_split, "split mined for mt indicators")->capture_default_str();
  ind->add_option("--chi2-split", o.chi2_split, "split mined for chi2 indicators")
      ->capture_default_str();
  ind->add_option("--ita", o.ita_ks, "annotator counts for the agreement curve")->delimiter(',');
  ind->add_option("--resamples", o.resamples, "resamples per agreement point")
      ->capture_default_str();

  auto* sw = app.add_subcommand("sweep", "exhaust a threshold grid and select the best config");
  sw->fallthrough();
  sw->add_option("--labeled", o.labeled, "labeled JSONL")->required();
  sw->add_option("--splits", o.splits, "splits JSON")->required();
  sw->add_option("--indicators", o.indicators, "indicators TSV (ia/percent/chi2 regimes)");
  sw->add_option("--regime", o.regime, "ia|percent|chi2|pattern")->required();
  sw->add_option("--split", o.split, "split swept over (default hp_train; pattern: pe_eval)");
  sw->add_option("--min-recall", o.min_recall, "recall floor for selection")
      ->capture_default_str();

  auto* hp = app.add_subcommand("hp-classify", "run the high-precision classifier over a split");
  hp->fallthrough();
  hp->add_option("--labeled", o.labeled, "labeled JSONL")->required();
  hp->add_option("--splits", o.splits, "splits JSON (omit to classify everything)");
  hp->add_option("--split", o.split, "split to classify (default hp_dev_test)");
  hp->add_option("--stats-from", o.stats_from, "split that restates freq/pct stats")
      ->capture_default_str();
  hp->add_option("--indicators", o.indicators, "indicators TSV")->required();
  hp->add_option("--hp-config", o.hp_config, "classifier config JSON (from sweep)");
  hp->add_option("--regime", o.regime, "ia|percent|chi2 (with inline thresholds)");
  hp->add_option("--theta1", o.theta1, "frequency threshold")->capture_default_str();
  hp->add_option("--theta2", o.theta2, "class-share threshold");
  hp->add_option("--alpha", o.alpha, "medium-agreement bound");
  hp->add_option("--beta", o.beta, "strong-agreement bound");

  auto* lp = app.add_subcommand("learn-patterns", "induce extraction patterns from classifications");
  lp->fallthrough();
  lp->add_option("--labeled", o.labeled, "labeled JSONL (utterance text)")->required();
  lp->add_option("--classifications", o.classifications, "classifications JSONL")->required();
  lp->add_option("--theta1", o.pattern_theta1, "pattern frequency threshold")
      ->capture_default_str();
  lp->add_option("--theta2", o.pattern_theta2, "pattern class-share threshold")
      ->capture_default_str();

  auto* pcls = app.add_subcommand("pattern-classify", "run the pattern classifier over a split");
  pcls->fallthrough();
  pcls->add_option("--labeled", o.labeled, "labeled JSONL")->required();
  pcls->add_option("--splits", o.splits, "splits JSON (omit to classify everything)");
  pcls->add_option("--split", o.split, "split to classify (default pe_eval)");
  pcls->add_option("--patterns", o.patterns, "patterns JSON")->required();
  pcls->add_option("--theta1", o.pattern_theta1, "pattern frequency threshold")
      ->capture_default_str();
  pcls->add_option("--theta2", o.pattern_theta2, "pattern class-share threshold")
      ->capture_default_str();

  auto* bs = app.add_subcommand("bootstrap", "phase 1 + pattern rounds until convergence");
  bs->fallthrough();
  bs->add_option("--labeled", o.labeled, "labeled JSONL")->required();
  bs->add_option("--splits", o.splits, "splits JSON")->required();
  bs->add_option("--indicators", o.indicators, "indicators TSV")->required();
  bs->add_option("--hp-config", o.hp_config, "classifier config JSON (from sweep)");
  bs->add_option("--regime", o.regime, "ia|percent|chi2 (with inline thresholds)");
  bs->add_option("--theta1", o.theta1, "frequency threshold")->capture_default_str();
  bs->add_option("--theta2", o.theta2, "class-share threshold");
  bs->add_option("--alpha", o.alpha, "medium-agreement bound");
  bs->add_option("--beta", o.beta, "strong-agreement bound");
  bs->add_option("--split", o.split, "pool split (default hp_dev_test)");
  bs->add_option("--stats-from", o.stats_from, "split that restates freq/pct stats")
      ->capture_default_str();
  bs->add_option("--eval-split", o.eval_split,
                 "split that scores pattern selection (default: the pool split)");
  bs->add_option("--pattern-config", o.pattern_config, "pattern config JSON (from sweep)");
  bs->add_option("--pattern-theta1", o.pattern_theta1, "pattern frequency threshold");
  bs->add_option("--pattern-theta2", o.pattern_theta2, "pattern class-share threshold");
  bs->add_option("--rounds", o.rounds, "max pattern rounds")->capture_default_str();
  bs->add_option("--min-recall", o.min_recall,
                 "recall floor for pattern selection (default: phase-1 recall)");

  auto* rep = app.add_subcommand("report", "render sweep tables and metrics");
  rep->fallthrough();
  rep->add_option("--sweep", o.sweep_files, "sweep TSVs to render");
  rep->add_option("--metrics", o.metrics_files, "metrics JSONs to tabulate");

  try {
    app.parse(argc, argv);
    if (*hp || *bs) {
      const CLI::App* active = *hp ? hp : bs;
      o.has_theta2 = active->count("--theta2") > 0;
      o.has_alpha = active->count("--alpha") > 0;
      o.has_beta = active->count("--beta") > 0;
    }
    if (*bs) {
      o.has_pattern_theta1 = bs->count("--pattern-theta1") > 0;
      o.has_pattern_theta2 = bs->count("--pattern-theta2") > 0;
      o.has_min_recall = bs->count("--min-recall") > 0;
    }
    if (*sw) o.has_min_recall = sw->count("--min-recall") > 0;

    if (*ing)
      cmd_ingest(o, app);
    else if (*ind)
      cmd_indicators(o, app);
    else if (*sw)
      cmd_sweep(o, app);
    else if (*hp)
      cmd_hp_classify(o, app);
    else if (*lp)
      cmd_learn_patterns(o, app);
    else if (*pcls)
      cmd_pattern_classify(o, app);
    else if (*bs)
      cmd_bootstrap(o, app);
    else if (*rep)
      cmd_report(o, app);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const error& e) {
    std::cerr << "cueboot: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "cueboot: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
