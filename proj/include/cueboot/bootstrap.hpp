#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "cueboot/corpus.hpp"
#include "cueboot/error.hpp"
#include "cueboot/hp_classifier.hpp"
#include "cueboot/indicators.hpp"
#include "cueboot/patterns.hpp"

namespace cueboot {

struct Metrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
};

/// Scores predictions against gold with CLASS as the positive label. ABSTAIN
/// predictions count as negatives (false negatives when gold is CLASS).
/// Every prediction id must have a gold label; gold entries without a
/// prediction are outside the evaluated population.
inline Metrics evaluate(const std::vector<std::pair<std::string, Label>>& predictions,
                        const std::vector<LabeledUtterance>& gold) {
  std::map<std::string, Label> gold_by_id;
  for (const auto& lu : gold) gold_by_id[lu.utterance.id] = lu.class_label;

  Metrics m;
  for (const auto& [id, predicted] : predictions) {
    auto it = gold_by_id.find(id);
    if (it == gold_by_id.end())
      throw error(errc::missing_gold, "no gold label for utterance '" + id + "'");
    bool gold_pos = it->second == Label::CLASS;
    bool pred_pos = predicted == Label::CLASS;
    if (pred_pos)
      (gold_pos ? m.tp : m.fp)++;
    else
      (gold_pos ? m.fn : m.tn)++;
  }
  m.precision = m.tp + m.fp == 0 ? 0.0 : static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fp);
  m.recall = m.tp + m.fn == 0 ? 0.0 : static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn);
  m.f1 = m.precision + m.recall == 0.0 ? 0.0
                                       : 2.0 * m.precision * m.recall / (m.precision + m.recall);
  return m;
}

/// State threaded through the two-phase pipeline. hp_pool holds the phase-1
/// output untouched; classified_pool holds the latest round's labels.
/// metrics_history[0] scores phase 1; each pattern round appends one entry.
struct BootstrapState {
  std::size_t iteration = 0;
  std::vector<Indicator> indicator_set;
  std::vector<ExtractionPattern> pattern_set;
  std::vector<std::pair<Utterance, Label>> hp_pool;
  std::vector<std::pair<Utterance, Label>> classified_pool;
  std::vector<Metrics> metrics_history;
  bool converged = false;
};

/// Phase 1: the HP classifier labels the dev-test pool; its metrics against
/// the pool's own gold labels become metrics_history[0].
inline BootstrapState run_phase1(const std::vector<LabeledUtterance>& dev_test,
                                 const std::vector<Indicator>& indicators,
                                 const HPConfig& config) {
  BootstrapState state;
  state.indicator_set = indicators;
  std::vector<std::pair<std::string, Label>> predictions;
  for (const auto& lu : dev_test) {
    auto c = classify_one(lu.utterance, indicators, config);
    state.hp_pool.emplace_back(lu.utterance, c.label);
    predictions.emplace_back(lu.utterance.id, c.label);
  }
  state.classified_pool = state.hp_pool;
  state.metrics_history.push_back(evaluate(predictions, dev_test));
  return state;
}

namespace detail {

inline bool same_patterns(const std::vector<ExtractionPattern>& a,
                          const std::vector<ExtractionPattern>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].pattern_template != b[i].pattern_template || a[i].fill != b[i].fill ||
        a[i].freq != b[i].freq || a[i].pct_class != b[i].pct_class)
      return false;
  return true;
}

}  // namespace detail

/// Phase 2: patterns are learned from the current pool's predicted labels,
/// the pattern classifier relabels the pool, and the result is scored
/// against the pool's gold labels. One call = one bootstrap round.
inline Metrics run_phase2(BootstrapState& state, const std::vector<LabeledUtterance>& gold,
                          const PatternConfig& config, const PretagMap* pretagged = nullptr) {
  if (state.classified_pool.empty())
    throw error(errc::empty_pool, "phase 1 produced no classified pool");
  auto learned = learn_patterns(state.classified_pool, config, pretagged);
  if (state.iteration > 0 && detail::same_patterns(learned, state.pattern_set)) {
    state.converged = true;  // fixed point: relabeling would change nothing
    return state.metrics_history.back();
  }
  state.pattern_set = std::move(learned);

  std::vector<std::pair<Utterance, Label>> relabeled;
  std::vector<std::pair<std::string, Label>> predictions;
  for (const auto& [u, _] : state.classified_pool) {
    auto c = classify_patterns(u, state.pattern_set, config, pretagged);
    relabeled.emplace_back(u, c.label);
    predictions.emplace_back(u.id, c.label);
  }
  state.classified_pool = std::move(relabeled);
  auto metrics = evaluate(predictions, gold);
  state.metrics_history.push_back(metrics);
  state.iteration += 1;
  return metrics;
}

/// Runs up to `rounds` pattern rounds from a fresh phase-1 state, stopping
/// early at a pattern-set fixed point (state.converged — informational).
inline BootstrapState& iterate(BootstrapState& state, const std::vector<LabeledUtterance>& gold,
                               const PatternConfig& config, std::size_t rounds,
                               const PretagMap* pretagged = nullptr) {
  if (rounds < 1) throw error(errc::invalid_argument, "rounds must be >= 1");
  for (std::size_t r = 0; r < rounds && !state.converged; ++r)
    run_phase2(state, gold, config, pretagged);
  return state;
}

}  // namespace cueboot
