#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cueboot/bootstrap.hpp"
#include "cueboot/corpus.hpp"
#include "cueboot/error.hpp"
#include "cueboot/hp_classifier.hpp"
#include "cueboot/indicators.hpp"
#include "cueboot/patterns.hpp"
#include "cueboot/pos_tagger.hpp"

namespace cueboot {

using json = nlohmann::json;

/// FNV-1a over the canonical JSON encoding of a config; stamped into every
/// output so artifacts can be traced to the exact configuration.
inline std::string config_hash(const json& config) {
  std::string s = config.dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

/// Same digest over raw file bytes. Manifests record these for their inputs
/// and outputs instead of paths, so reruns in different directories compare
/// byte-for-byte.
inline std::string content_hash(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw error(errc::io_error, "cannot open '" + path + "' for hashing");
  std::uint64_t h = 1469598103934665603ull;
  char c;
  while (in.get(c)) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace detail {

inline std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw error(errc::io_error, "cannot open '" + path + "' for reading");
  return in;
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw error(errc::io_error, "cannot open '" + path + "' for writing");
  return out;
}

inline json parse_line(const std::string& line, const std::string& path, std::size_t lineno) {
  try {
    return json::parse(line);
  } catch (const json::exception& e) {
    throw error(errc::parse_error,
                path + ":" + std::to_string(lineno) + ": " + e.what());
  }
}

template <typename T>
inline T field(const json& obj, const char* key, const std::string& path, std::size_t lineno) {
  auto it = obj.find(key);
  if (it == obj.end())
    throw error(errc::parse_error,
                path + ":" + std::to_string(lineno) + ": missing field '" + key + "'");
  try {
    return it->get<T>();
  } catch (const json::exception& e) {
    throw error(errc::parse_error,
                path + ":" + std::to_string(lineno) + ": field '" + key + "': " + e.what());
  }
}

inline Task task_from_string(const std::string& s, const std::string& path, std::size_t lineno) {
  if (s == "sarcasm") return Task::SARCASM_BINARY;
  if (s == "nasty") return Task::NASTY_SCALAR;
  throw error(errc::parse_error,
              path + ":" + std::to_string(lineno) + ": unknown task '" + s + "'");
}

}  // namespace detail

/// JSONL corpus loader. Each line is one utterance object carrying its
/// annotations and indicator spans; an annotation or span may override the
/// line's id with an explicit "utterance_id" (the hook that makes dangling
/// references representable in a file). Integrity-checks the result.
inline Corpus load_corpus(const std::string& path) {
  auto in = detail::open_in(path);
  Corpus corpus;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json obj = detail::parse_line(line, path, lineno);
    Utterance u;
    u.id = detail::field<std::string>(obj, "id", path, lineno);
    u.response_text = detail::field<std::string>(obj, "response", path, lineno);
    if (obj.contains("quote") && !obj["quote"].is_null())
      u.quote_text = obj["quote"].get<std::string>();
    if (obj.contains("source") && !obj["source"].is_null())
      u.source = obj["source"].get<std::string>();
    corpus.utterances.push_back(u);

    if (obj.contains("annotations")) {
      for (const auto& a : obj["annotations"]) {
        AnnotationRecord rec;
        rec.utterance_id = a.value("utterance_id", u.id);
        rec.annotator_id = detail::field<std::string>(a, "annotator", path, lineno);
        rec.task = detail::task_from_string(detail::field<std::string>(a, "task", path, lineno),
                                            path, lineno);
        rec.value = detail::field<double>(a, "value", path, lineno);
        corpus.annotations.push_back(std::move(rec));
      }
    }
    if (obj.contains("indicator_spans")) {
      for (const auto& s : obj["indicator_spans"]) {
        IndicatorAnnotation span;
        span.utterance_id = s.value("utterance_id", u.id);
        span.annotator_id = detail::field<std::string>(s, "annotator", path, lineno);
        span.start = detail::field<std::size_t>(s, "start", path, lineno);
        span.end = detail::field<std::size_t>(s, "end", path, lineno);
        corpus.indicator_spans.push_back(std::move(span));
      }
    }
  }
  validate_corpus(corpus);
  std::map<std::string, const Utterance*> by_id;
  for (const auto& u : corpus.utterances) by_id[u.id] = &u;
  for (auto& s : corpus.indicator_spans)
    s.phrase = by_id.at(s.utterance_id)->response_text.substr(s.start, s.end - s.start);
  return corpus;
}

// -- splits ------------------------------------------------------------

inline void write_splits(const std::string& path, const std::vector<DatasetSplit>& splits) {
  // one compact line per split, in allocation order
  auto out = detail::open_out(path);
  out << "{\n";
  for (std::size_t i = 0; i < splits.size(); ++i) {
    json ids = json::array();
    for (const auto& id : splits[i].members) ids.push_back(id);  // set order: sorted
    out << "  \"" << split_name(splits[i].name) << "\": " << ids.dump()
        << (i + 1 < splits.size() ? ",\n" : "\n");
  }
  out << "}\n";
}

inline std::vector<DatasetSplit> read_splits(const std::string& path) {
  nlohmann::ordered_json obj;
  try {
    obj = nlohmann::ordered_json::parse(detail::open_in(path));
  } catch (const json::exception& e) {
    throw error(errc::parse_error, path + ": " + e.what());
  }
  std::vector<DatasetSplit> out;
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    auto name = split_from_name(it.key());
    if (!name) continue;  // unknown keys are skippable metadata
    DatasetSplit s;
    s.name = *name;
    for (const auto& id : it.value()) s.members.insert(id.get<std::string>());
    out.push_back(std::move(s));
  }
  return out;
}

// -- labeled utterances ------------------------------------------------

inline void write_labeled(const std::string& path, const std::vector<LabeledUtterance>& labeled) {
  auto out = detail::open_out(path);
  for (const auto& lu : labeled) {
    json obj;
    obj["id"] = lu.utterance.id;
    obj["response"] = lu.utterance.response_text;
    if (lu.utterance.quote_text) obj["quote"] = *lu.utterance.quote_text;
    obj["label"] = label_name(lu.class_label);
    obj["mean_score"] = lu.mean_score;
    obj["task"] = task_name(lu.task);
    out << obj.dump() << "\n";
  }
}

inline std::vector<LabeledUtterance> read_labeled(const std::string& path) {
  auto in = detail::open_in(path);
  std::vector<LabeledUtterance> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json obj = detail::parse_line(line, path, lineno);
    LabeledUtterance lu;
    lu.utterance.id = detail::field<std::string>(obj, "id", path, lineno);
    lu.utterance.response_text = detail::field<std::string>(obj, "response", path, lineno);
    if (obj.contains("quote") && !obj["quote"].is_null())
      lu.utterance.quote_text = obj["quote"].get<std::string>();
    std::string label = detail::field<std::string>(obj, "label", path, lineno);
    if (label == "class")
      lu.class_label = Label::CLASS;
    else if (label == "counter")
      lu.class_label = Label::COUNTER;
    else
      throw error(errc::parse_error,
                  path + ":" + std::to_string(lineno) + ": unknown label '" + label + "'");
    lu.mean_score = obj.value("mean_score", 0.0);
    lu.task = detail::task_from_string(obj.value("task", "sarcasm"), path, lineno);
    out.push_back(std::move(lu));
  }
  return out;
}

// -- indicators (TSV) --------------------------------------------------

inline void write_indicators_tsv(const std::string& path, const std::vector<Indicator>& indicators,
                                 const std::string& hash, std::uint64_t seed) {
  auto out = detail::open_out(path);
  out << "# config " << hash << " seed " << seed << "\n";
  out << "ngram\tsource\tfreq\tia\tpct_class\tchi2\n";
  char buf[64];
  for (const auto& ind : indicators) {
    out << ind.ngram.joined() << '\t' << source_name(ind.source) << '\t' << ind.freq << '\t';
    if (ind.ia) {
      std::snprintf(buf, sizeof buf, "%.6f", *ind.ia);
      out << buf;
    }
    out << '\t';
    std::snprintf(buf, sizeof buf, "%.6f", ind.pct_class);
    out << buf << '\t';
    if (ind.chi2) {
      std::snprintf(buf, sizeof buf, "%.6f", *ind.chi2);
      out << buf;
    }
    out << '\n';
  }
}

inline std::vector<Indicator> read_indicators_tsv(const std::string& path) {
  auto in = detail::open_in(path);
  std::vector<Indicator> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (line.rfind("ngram\t", 0) == 0) continue;  // header row
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string col;
    while (std::getline(ss, col, '\t')) cols.push_back(col);
    while (cols.size() < 6) cols.push_back("");
    if (cols.size() != 6)
      throw error(errc::parse_error, path + ":" + std::to_string(lineno) + ": expected 6 columns");
    Indicator ind;
    for (const auto& tok : tokenize(cols[0])) ind.ngram.tokens.push_back(tok);
    if (ind.ngram.tokens.empty())
      throw error(errc::parse_error, path + ":" + std::to_string(lineno) + ": empty ngram");
    if (cols[1] == "mt")
      ind.source = IndicatorSource::MT;
    else if (cols[1] == "chi2")
      ind.source = IndicatorSource::CHI2;
    else
      throw error(errc::parse_error,
                  path + ":" + std::to_string(lineno) + ": unknown source '" + cols[1] + "'");
    ind.freq = std::stoull(cols[2]);
    if (!cols[3].empty()) ind.ia = std::stod(cols[3]);
    if (!cols[4].empty()) ind.pct_class = std::stod(cols[4]);
    if (!cols[5].empty()) ind.chi2 = std::stod(cols[5]);
    out.push_back(std::move(ind));
  }
  return out;
}

// -- sweep results (TSV) -----------------------------------------------

inline std::string format_params(const HPConfig& c, bool ia_regime) {
  char buf[96];
  if (ia_regime)
    std::snprintf(buf, sizeof buf, "beta=%.2f,alpha=%.2f,theta1=%d", c.beta, c.alpha, c.theta1);
  else
    std::snprintf(buf, sizeof buf, "theta1=%d,theta2=%.2f", c.theta1, c.theta2);
  return buf;
}

/// One row per result, mirroring the shape of the reported tables:
/// P and R as whole percents, F with two decimals.
inline void write_sweep_tsv(const std::string& path, const std::vector<SweepResult>& results,
                            const std::string& regime_label, const std::string& hash,
                            std::uint64_t seed) {
  auto out = detail::open_out(path);
  out << "# config " << hash << " seed " << seed << "\n";
  out << "regime\tparams\tP\tR\tF\ttp\n";
  char buf[32];
  for (const auto& r : results) {
    out << regime_label << '\t'
        << format_params(r.config, r.config.regime == Regime::IA_FEATURES &&
                                       regime_label != "pattern")
        << '\t' << static_cast<long>(std::lround(r.precision * 100)) << "%\t"
        << static_cast<long>(std::lround(r.recall * 100)) << "%\t";
    std::snprintf(buf, sizeof buf, "%.2f", r.f1);
    out << buf << '\t' << r.true_positives << '\n';
  }
}

// -- configs (JSON) ----------------------------------------------------

inline json hp_config_to_json(const HPConfig& c) {
  json obj;
  obj["regime"] = regime_name(c.regime);
  obj["theta1"] = c.theta1;
  if (c.regime == Regime::IA_FEATURES) {
    obj["alpha"] = c.alpha;
    obj["beta"] = c.beta;
  } else {
    obj["theta2"] = c.theta2;
  }
  return obj;
}

inline HPConfig hp_config_from_json(const json& obj) {
  HPConfig c;
  c.regime = regime_from_name(obj.at("regime").get<std::string>());
  c.theta1 = obj.at("theta1").get<int>();
  if (c.regime == Regime::IA_FEATURES) {
    c.alpha = obj.at("alpha").get<double>();
    c.beta = obj.at("beta").get<double>();
  } else {
    c.theta2 = obj.at("theta2").get<double>();
  }
  c.validate();
  return c;
}

// -- patterns (JSON array) ----------------------------------------------

inline void write_patterns_json(const std::string& path,
                                const std::vector<ExtractionPattern>& patterns) {
  json arr = json::array();
  for (const auto& p : patterns) {
    json obj;
    obj["template"] = template_name(p.pattern_template);
    obj["fill"] = p.fill;
    obj["freq"] = p.freq;
    obj["pct_class"] = p.pct_class;
    arr.push_back(obj);
  }
  detail::open_out(path) << arr.dump(2) << "\n";
}

inline std::vector<ExtractionPattern> read_patterns_json(const std::string& path) {
  json arr;
  try {
    arr = json::parse(detail::open_in(path));
  } catch (const json::exception& e) {
    throw error(errc::parse_error, path + ": " + e.what());
  }
  std::vector<ExtractionPattern> out;
  for (const auto& obj : arr) {
    ExtractionPattern p;
    p.pattern_template = template_from_name(obj.at("template").get<std::string>());
    p.fill = obj.at("fill").get<std::string>();
    p.freq = obj.at("freq").get<std::size_t>();
    p.pct_class = obj.at("pct_class").get<double>();
    out.push_back(std::move(p));
  }
  return out;
}

// -- pre-tagged input ----------------------------------------------------

inline PretagMap read_pretagged(const std::string& path) {
  auto in = detail::open_in(path);
  PretagMap out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json obj = detail::parse_line(line, path, lineno);
    std::string id = detail::field<std::string>(obj, "id", path, lineno);
    std::vector<PosToken> tokens;
    for (const auto& pair : detail::field<json>(obj, "tagged", path, lineno)) {
      if (!pair.is_array() || pair.size() != 2)
        throw error(errc::parse_error,
                    path + ":" + std::to_string(lineno) + ": tagged entries must be [surface, tag]");
      PosToken t;
      t.surface = pair[0].get<std::string>();
      t.tag = tag_from_name(pair[1].get<std::string>());
      // the live tokenizer lowercases, so the bypass must match
      for (auto& ch : t.surface)
        ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
      t.lowercased = t.surface;
      tokens.push_back(std::move(t));
    }
    out[id] = std::move(tokens);
  }
  return out;
}

// -- classifications (JSONL) ---------------------------------------------

inline void write_classifications(const std::string& path,
                                  const std::vector<std::pair<Utterance, Classification>>& rows) {
  auto out = detail::open_out(path);
  for (const auto& [u, c] : rows) {
    json obj;
    obj["id"] = u.id;
    obj["label"] = label_name(c.label);
    json ev = json::array();
    for (const auto& e : c.evidence) {
      json eo;
      eo["item"] = e.item;
      eo["position"] = e.position;
      eo["detail"] = e.detail;
      ev.push_back(eo);
    }
    obj["evidence"] = ev;
    out << obj.dump() << "\n";
  }
}

inline std::vector<std::pair<std::string, Label>> read_classifications(const std::string& path) {
  auto in = detail::open_in(path);
  std::vector<std::pair<std::string, Label>> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json obj = detail::parse_line(line, path, lineno);
    std::string id = detail::field<std::string>(obj, "id", path, lineno);
    std::string label = detail::field<std::string>(obj, "label", path, lineno);
    Label l;
    if (label == "class")
      l = Label::CLASS;
    else if (label == "counter")
      l = Label::COUNTER;
    else if (label == "abstain")
      l = Label::ABSTAIN;
    else
      throw error(errc::parse_error,
                  path + ":" + std::to_string(lineno) + ": unknown label '" + label + "'");
    out.emplace_back(std::move(id), l);
  }
  return out;
}

// -- metrics & manifest ---------------------------------------------------

inline json metrics_to_json(const Metrics& m) {
  json obj;
  obj["precision"] = m.precision;
  obj["recall"] = m.recall;
  obj["f1"] = m.f1;
  obj["tp"] = m.tp;
  obj["fp"] = m.fp;
  obj["fn"] = m.fn;
  obj["tn"] = m.tn;
  return obj;
}

inline Metrics metrics_from_json(const json& obj) {
  Metrics m;
  m.precision = obj.at("precision").get<double>();
  m.recall = obj.at("recall").get<double>();
  m.f1 = obj.at("f1").get<double>();
  m.tp = obj.at("tp").get<std::size_t>();
  m.fp = obj.at("fp").get<std::size_t>();
  m.fn = obj.at("fn").get<std::size_t>();
  m.tn = obj.at("tn").get<std::size_t>();
  return m;
}

/// Fixed-width metrics table for the report command.
inline std::string render_metrics_table(const std::vector<std::pair<std::string, Metrics>>& rows) {
  std::size_t label_w = 5;
  for (const auto& [label, _] : rows) label_w = std::max(label_w, label.size());
  std::ostringstream out;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-*s  %5s  %5s  %6s  %6s  %6s  %6s  %6s\n",
                static_cast<int>(label_w), "stage", "P", "R", "F", "tp", "fp", "fn", "tn");
  out << buf;
  for (const auto& [label, m] : rows) {
    std::snprintf(buf, sizeof buf, "%-*s  %4ld%%  %4ld%%  %6.2f  %6zu  %6zu  %6zu  %6zu\n",
                  static_cast<int>(label_w), label.c_str(),
                  std::lround(m.precision * 100), std::lround(m.recall * 100), m.f1, m.tp, m.fp,
                  m.fn, m.tn);
    out << buf;
  }
  return out.str();
}

}  // namespace cueboot
