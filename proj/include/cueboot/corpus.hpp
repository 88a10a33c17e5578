#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cueboot/error.hpp"
#include "cueboot/rng.hpp"

namespace cueboot {

enum class Task { SARCASM_BINARY, NASTY_SCALAR };

inline const char* task_name(Task t) {
  return t == Task::SARCASM_BINARY ? "sarcasm" : "nasty";
}

/// One dialogue turn. The quote is context only and is never classified.
struct Utterance {
  std::string id;
  std::string response_text;
  std::optional<std::string> quote_text;
  std::optional<std::string> source;
};

struct AnnotationRecord {
  std::string utterance_id;
  std::string annotator_id;
  Task task = Task::SARCASM_BINARY;
  double value = 0.0;  // binary task: {0,1}; scalar task: [-5, +5]
};

/// A span an annotator selected as a cue, with character offsets into the
/// response text. `phrase` always equals the covered slice.
struct IndicatorAnnotation {
  std::string utterance_id;
  std::string annotator_id;
  std::size_t start = 0;
  std::size_t end = 0;
  std::string phrase;
};

enum class Label { CLASS, COUNTER, ABSTAIN };

inline const char* label_name(Label l) {
  switch (l) {
    case Label::CLASS:   return "class";
    case Label::COUNTER: return "counter";
    case Label::ABSTAIN: return "abstain";
  }
  return "?";
}

struct LabeledUtterance {
  Utterance utterance;
  Label class_label = Label::COUNTER;  // CLASS = sarc/nasty, COUNTER = notsarc/nice
  Task task = Task::SARCASM_BINARY;
  double mean_score = 0.0;
};

enum class SplitName { MT_EXP_DEV, HP_TRAIN, HP_DEV_TEST, PE_EVAL };

inline const char* split_name(SplitName s) {
  switch (s) {
    case SplitName::MT_EXP_DEV:  return "mt_exp_dev";
    case SplitName::HP_TRAIN:    return "hp_train";
    case SplitName::HP_DEV_TEST: return "hp_dev_test";
    case SplitName::PE_EVAL:     return "pe_eval";
  }
  return "?";
}

inline std::optional<SplitName> split_from_name(const std::string& s) {
  if (s == "mt_exp_dev") return SplitName::MT_EXP_DEV;
  if (s == "hp_train") return SplitName::HP_TRAIN;
  if (s == "hp_dev_test") return SplitName::HP_DEV_TEST;
  if (s == "pe_eval") return SplitName::PE_EVAL;
  return std::nullopt;
}

struct DatasetSplit {
  SplitName name = SplitName::HP_TRAIN;
  std::set<std::string> members;
};

/// Gold-label thresholds. Strict inequalities throughout: a nasty-task mean
/// inside [nasty_max, nice_min] is dropped, a sarcasm mean <= sarc_min is the
/// counter class.
struct GoldThresholds {
  double sarc_min = 0.5;
  double nasty_max = -1.0;
  double nice_min = 1.0;
};

struct Corpus {
  std::vector<Utterance> utterances;
  std::vector<AnnotationRecord> annotations;
  std::vector<IndicatorAnnotation> indicator_spans;
};

/// Referential-integrity and range checks shared by every ingest path.
inline void validate_corpus(const Corpus& c) {
  std::set<std::string> ids;
  for (const auto& u : c.utterances) {
    if (u.response_text.empty())
      throw error(errc::parse_error, "utterance '" + u.id + "' has empty response");
    if (!ids.insert(u.id).second)
      throw error(errc::duplicate_id, "utterance id '" + u.id + "' appears twice");
  }
  for (const auto& a : c.annotations) {
    if (!ids.count(a.utterance_id))
      throw error(errc::dangling_reference,
                  "annotation references missing utterance id '" + a.utterance_id + "'");
    if (a.task == Task::SARCASM_BINARY && a.value != 0.0 && a.value != 1.0)
      throw error(errc::parse_error, "sarcasm annotation value must be 0 or 1 (utterance '" +
                                         a.utterance_id + "')");
    if (a.task == Task::NASTY_SCALAR && (a.value < -5.0 || a.value > 5.0))
      throw error(errc::parse_error, "nasty annotation value out of [-5,5] (utterance '" +
                                         a.utterance_id + "')");
  }
  std::map<std::string, const Utterance*> by_id;
  for (const auto& u : c.utterances) by_id[u.id] = &u;
  for (const auto& s : c.indicator_spans) {
    auto it = by_id.find(s.utterance_id);
    if (it == by_id.end())
      throw error(errc::dangling_reference,
                  "indicator span references missing utterance id '" + s.utterance_id + "'");
    const std::string& text = it->second->response_text;
    if (!(s.start < s.end && s.end <= text.size()))
      throw error(errc::parse_error, "indicator span [" + std::to_string(s.start) + "," +
                                         std::to_string(s.end) + ") out of range for utterance '" +
                                         s.utterance_id + "'");
    if (!s.phrase.empty() && s.phrase != text.substr(s.start, s.end - s.start))
      throw error(errc::parse_error,
                  "indicator span phrase mismatch for utterance '" + s.utterance_id + "'");
  }
}

/// Derives binary gold labels from raw annotation values.
///
/// Sarcasm task: mean > sarc_min -> CLASS, else COUNTER.
/// Nasty task: mean < nasty_max -> CLASS, mean > nice_min -> COUNTER,
/// anything in between is dropped from the labeled set.
/// Every passed utterance must carry at least one annotation for the task.
inline std::vector<LabeledUtterance> derive_gold_labels(
    const std::vector<Utterance>& utterances,
    const std::vector<AnnotationRecord>& annotations, Task task,
    const GoldThresholds& thresholds = {}) {
  std::map<std::string, std::pair<double, std::size_t>> sums;  // id -> (sum, count)
  for (const auto& a : annotations) {
    if (a.task != task) continue;
    auto& acc = sums[a.utterance_id];
    acc.first += a.value;
    acc.second += 1;
  }
  std::vector<LabeledUtterance> out;
  out.reserve(utterances.size());
  for (const auto& u : utterances) {
    auto it = sums.find(u.id);
    if (it == sums.end() || it->second.second == 0)
      throw error(errc::no_annotations, "utterance '" + u.id + "' has no '" +
                                            std::string(task_name(task)) + "' annotations");
    double mean = it->second.first / static_cast<double>(it->second.second);
    LabeledUtterance lu;
    lu.utterance = u;
    lu.task = task;
    lu.mean_score = mean;
    if (task == Task::SARCASM_BINARY) {
      lu.class_label = mean > thresholds.sarc_min ? Label::CLASS : Label::COUNTER;
    } else {
      if (mean < thresholds.nasty_max) {
        lu.class_label = Label::CLASS;
      } else if (mean > thresholds.nice_min) {
        lu.class_label = Label::COUNTER;
      } else {
        continue;  // boundary band: dropped
      }
    }
    out.push_back(std::move(lu));
  }
  return out;
}

/// One requested split: per-class member counts. A missing counter_count means
/// the split takes class members only (the MT development set).
struct SplitSpec {
  SplitName name = SplitName::HP_TRAIN;
  std::size_t class_count = 0;
  std::optional<std::size_t> counter_count;
};

/// Partitions labeled utterances into pairwise-disjoint splits with exactly
/// the requested per-class counts, sampled uniformly from `seed`.
inline std::vector<DatasetSplit> make_splits(const std::vector<LabeledUtterance>& labeled,
                                             const std::vector<SplitSpec>& spec,
                                             std::uint64_t seed) {
  std::vector<std::string> class_pool, counter_pool;
  for (const auto& lu : labeled) {
    (lu.class_label == Label::CLASS ? class_pool : counter_pool).push_back(lu.utterance.id);
  }
  std::sort(class_pool.begin(), class_pool.end());
  std::sort(counter_pool.begin(), counter_pool.end());
  std::mt19937_64 rng(seed);
  deterministic_shuffle(class_pool, rng);
  deterministic_shuffle(counter_pool, rng);

  std::vector<DatasetSplit> out;
  std::size_t class_at = 0, counter_at = 0;
  for (const auto& s : spec) {
    DatasetSplit split;
    split.name = s.name;
    if (class_at + s.class_count > class_pool.size())
      throw error(errc::insufficient_data,
                  std::string("not enough CLASS utterances for split ") + split_name(s.name) +
                      " (need " + std::to_string(s.class_count) + ", have " +
                      std::to_string(class_pool.size() - class_at) + ")");
    for (std::size_t i = 0; i < s.class_count; ++i) split.members.insert(class_pool[class_at++]);
    if (s.counter_count) {
      if (counter_at + *s.counter_count > counter_pool.size())
        throw error(errc::insufficient_data,
                    std::string("not enough COUNTER utterances for split ") + split_name(s.name) +
                        " (need " + std::to_string(*s.counter_count) + ", have " +
                        std::to_string(counter_pool.size() - counter_at) + ")");
      for (std::size_t i = 0; i < *s.counter_count; ++i)
        split.members.insert(counter_pool[counter_at++]);
    }
    out.push_back(std::move(split));
  }
  return out;
}

/// The labeled subset belonging to one split, in the labeled list's order.
inline std::vector<LabeledUtterance> split_subset(const std::vector<LabeledUtterance>& labeled,
                                                  const DatasetSplit& split) {
  std::vector<LabeledUtterance> out;
  for (const auto& lu : labeled)
    if (split.members.count(lu.utterance.id)) out.push_back(lu);
  return out;
}

inline const DatasetSplit& find_split(const std::vector<DatasetSplit>& splits, SplitName name) {
  for (const auto& s : splits)
    if (s.name == name) return s;
  throw error(errc::dangling_reference, std::string("no split named '") + split_name(name) + "'");
}

}  // namespace cueboot
