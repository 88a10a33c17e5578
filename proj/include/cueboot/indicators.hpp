#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cueboot/corpus.hpp"
#include "cueboot/error.hpp"
#include "cueboot/rng.hpp"
#include "cueboot/text.hpp"

namespace cueboot {

enum class IndicatorSource { MT, CHI2 };

inline const char* source_name(IndicatorSource s) {
  return s == IndicatorSource::MT ? "mt" : "chi2";
}

/// A lexical cue: an n-gram with its frequency and reliability statistics.
/// FREQ counts distinct utterances containing the n-gram; IA is the fraction
/// of exposed annotators who selected it (MT source only); pct_class is the
/// fraction of containing utterances labeled with the target class.
struct Indicator {
  Ngram ngram;
  IndicatorSource source = IndicatorSource::CHI2;
  std::size_t freq = 0;
  std::optional<double> ia;
  double pct_class = 0.0;
  std::optional<double> chi2;
};

struct ItaPoint {
  std::size_t k = 0;
  double mean_correlation = 0.0;
};

namespace detail {

struct PresenceCounts {
  std::size_t in_class = 0;
  std::size_t in_counter = 0;
};

/// Per-n-gram presence counts over a labeled set (presence = at least one
/// occurrence in the utterance; each utterance counted once).
inline std::map<Ngram, PresenceCounts> presence_table(
    const std::vector<LabeledUtterance>& labeled, int n_max = 3) {
  std::map<Ngram, PresenceCounts> table;
  for (const auto& lu : labeled) {
    auto tokens = tokenize(lu.utterance.response_text);
    std::set<Ngram> seen;
    for (auto& g : extract_ngrams(tokens, n_max)) seen.insert(std::move(g));
    for (const auto& g : seen) {
      auto& c = table[g];
      if (lu.class_label == Label::CLASS)
        ++c.in_class;
      else
        ++c.in_counter;
    }
  }
  return table;
}

inline double chi2_from_table(double a, double b, double c, double d) {
  const double n = a + b + c + d;
  const double r1 = a + b, r2 = c + d, c1 = a + c, c2 = b + d;
  if (r1 == 0 || r2 == 0 || c1 == 0 || c2 == 0) return 0.0;
  const double diff = a * d - b * c;
  return n * diff * diff / (r1 * r2 * c1 * c2);
}

}  // namespace detail

/// Pearson chi-square of the 2x2 utterance-level presence table
///   a = CLASS utterances containing the n-gram, b = COUNTER containing,
///   c = CLASS not containing,               d = COUNTER not containing.
/// Returns 0 when any marginal is 0.
inline double chi2_score(const Ngram& ngram, const std::vector<LabeledUtterance>& labeled) {
  if (labeled.empty()) throw error(errc::empty_corpus, "chi2_score on empty labeled set");
  std::size_t a = 0, b = 0, c = 0, d = 0;
  for (const auto& lu : labeled) {
    auto tokens = tokenize(lu.utterance.response_text);
    bool present = contains_ngram(tokens, ngram);
    if (lu.class_label == Label::CLASS)
      (present ? a : c)++;
    else
      (present ? b : d)++;
  }
  return detail::chi2_from_table(static_cast<double>(a), static_cast<double>(b),
                                 static_cast<double>(c), static_cast<double>(d));
}

/// Mines chi-square indicators from a labeled set: n-grams with utterance
/// frequency >= min_freq, ranked by chi2 descending, top_k kept per n-gram
/// order. Ties break by (freq desc, lexicographic).
inline std::vector<Indicator> select_chi2_indicators(
    const std::vector<LabeledUtterance>& labeled, std::size_t min_freq, std::size_t top_k,
    int n_max = 3) {
  if (labeled.empty()) throw error(errc::empty_corpus, "select_chi2_indicators on empty set");
  std::size_t n_class = 0, n_counter = 0;
  for (const auto& lu : labeled)
    (lu.class_label == Label::CLASS ? n_class : n_counter)++;

  auto table = detail::presence_table(labeled, n_max);
  std::vector<Indicator> out;
  for (int n = 1; n <= n_max; ++n) {
    std::vector<Indicator> order_n;
    for (const auto& [gram, counts] : table) {
      if (gram.size() != static_cast<std::size_t>(n)) continue;
      std::size_t freq = counts.in_class + counts.in_counter;
      if (freq < min_freq) continue;
      Indicator ind;
      ind.ngram = gram;
      ind.source = IndicatorSource::CHI2;
      ind.freq = freq;
      ind.pct_class = static_cast<double>(counts.in_class) / static_cast<double>(freq);
      ind.chi2 = detail::chi2_from_table(
          static_cast<double>(counts.in_class), static_cast<double>(counts.in_counter),
          static_cast<double>(n_class - counts.in_class),
          static_cast<double>(n_counter - counts.in_counter));
      order_n.push_back(std::move(ind));
    }
    std::sort(order_n.begin(), order_n.end(), [](const Indicator& x, const Indicator& y) {
      if (*x.chi2 != *y.chi2) return *x.chi2 > *y.chi2;
      if (x.freq != y.freq) return x.freq > y.freq;
      return x.ngram < y.ngram;
    });
    if (order_n.size() > top_k) order_n.resize(top_k);
    for (auto& ind : order_n) out.push_back(std::move(ind));
  }
  return out;
}

namespace detail {

/// All 1..3-grams of one annotator span, in the span's own tokenization.
inline std::set<Ngram> span_grams(const IndicatorAnnotation& span, int n_max = 3) {
  auto tokens = tokenize(span.phrase);
  std::set<Ngram> grams;
  for (auto& g : extract_ngrams(tokens, n_max)) grams.insert(std::move(g));
  return grams;
}

}  // namespace detail

/// Aggregates human span selections into MT indicators.
///
/// Candidates are the 1..3-grams covered by at least one span. For each
/// candidate, FREQ counts the distinct utterances (in the given set) whose
/// response contains it, and IA pools, over those containing utterances, the
/// annotators who selected a covering span against the annotators who saw the
/// utterance.
inline std::vector<Indicator> aggregate_mt_indicators(
    const std::vector<Utterance>& utterances, const std::vector<IndicatorAnnotation>& spans,
    const std::map<std::string, std::size_t>& annotators_per_utterance, int n_max = 3) {
  std::map<std::string, const Utterance*> by_id;
  for (const auto& u : utterances) by_id[u.id] = &u;

  // utterance -> annotator -> grams covered by that annotator's spans
  std::map<std::string, std::map<std::string, std::set<Ngram>>> covered;
  std::set<Ngram> candidates;
  for (const auto& s : spans) {
    auto it = by_id.find(s.utterance_id);
    if (it == by_id.end())
      throw error(errc::dangling_reference,
                  "span references utterance '" + s.utterance_id + "' outside the given set");
    IndicatorAnnotation resolved = s;
    if (resolved.phrase.empty())
      resolved.phrase = it->second->response_text.substr(s.start, s.end - s.start);
    auto grams = detail::span_grams(resolved, n_max);
    auto& per_annotator = covered[s.utterance_id][s.annotator_id];
    per_annotator.insert(grams.begin(), grams.end());
    candidates.insert(grams.begin(), grams.end());
  }

  std::vector<std::pair<const Utterance*, std::vector<std::string>>> tokenized;
  tokenized.reserve(utterances.size());
  for (const auto& u : utterances) tokenized.emplace_back(&u, tokenize(u.response_text));

  std::vector<Indicator> out;
  for (const auto& gram : candidates) {
    std::size_t freq = 0;
    std::size_t selected = 0, exposed = 0;
    for (const auto& [u, tokens] : tokenized) {
      if (!contains_ngram(tokens, gram)) continue;
      ++freq;
      std::size_t sel_here = 0;
      std::size_t annotators_here = 0;
      auto cit = covered.find(u->id);
      if (cit != covered.end()) {
        annotators_here = cit->second.size();
        for (const auto& [annotator, grams] : cit->second)
          if (grams.count(gram)) ++sel_here;
      }
      auto ait = annotators_per_utterance.find(u->id);
      if (ait == annotators_per_utterance.end())
        throw error(errc::dangling_reference,
                    "no annotator count for utterance '" + u->id + "'");
      selected += sel_here;
      exposed += std::max(ait->second, annotators_here);
    }
    if (freq == 0) continue;  // span text not present verbatim in any utterance
    Indicator ind;
    ind.ngram = gram;
    ind.source = IndicatorSource::MT;
    ind.freq = freq;
    ind.ia = exposed == 0 ? 0.0 : static_cast<double>(selected) / static_cast<double>(exposed);
    ind.pct_class = 1.0;  // the MT development set holds class members only
    out.push_back(std::move(ind));
  }
  return out;
}

/// Restates FREQ and pct_class over a labeled set (the HP-train statistics the
/// percent and chi-square feature regimes threshold on). IA and chi2 carry
/// over unchanged; indicators absent from the set keep freq 0 and never fire.
inline std::vector<Indicator> indicators_with_stats_from(
    const std::vector<Indicator>& indicators, const std::vector<LabeledUtterance>& labeled) {
  auto table = detail::presence_table(labeled);
  std::vector<Indicator> out;
  out.reserve(indicators.size());
  for (const auto& ind : indicators) {
    Indicator restated = ind;
    auto it = table.find(ind.ngram);
    if (it == table.end()) {
      restated.freq = 0;
      restated.pct_class = 0.0;
    } else {
      restated.freq = it->second.in_class + it->second.in_counter;
      restated.pct_class =
          static_cast<double>(it->second.in_class) / static_cast<double>(restated.freq);
    }
    out.push_back(std::move(restated));
  }
  return out;
}

namespace detail {

/// Pearson correlation of two selection-count vectors. Zero-variance vectors
/// correlate 1 with an identical vector and 0 with anything else.
inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return x == y ? 1.0 : 0.0;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace detail

/// Mean pairwise annotator agreement as a function of annotator count.
///
/// For each k: sample k annotators per utterance, build each annotator's
/// selection-count vector over the utterance's n-gram vocabulary, average all
/// pairwise Pearson correlations, then average over utterances and resamples.
/// Deterministic under `seed`.
inline std::vector<ItaPoint> ita_curve(const std::vector<IndicatorAnnotation>& spans,
                                       const std::vector<Utterance>& utterances,
                                       const std::vector<std::size_t>& k_values,
                                       std::size_t resamples, std::uint64_t seed,
                                       int n_max = 3) {
  if (resamples == 0) throw error(errc::invalid_argument, "resamples must be >= 1");
  if (utterances.empty()) throw error(errc::empty_corpus, "ita_curve on empty utterance set");
  std::size_t k_max = 0;
  for (auto k : k_values) {
    if (k < 2) throw error(errc::invalid_argument, "k must be >= 2");
    k_max = std::max(k_max, k);
  }

  struct Prepared {
    std::vector<Ngram> vocab;
    std::vector<std::string> annotators;                     // sorted
    std::map<std::string, std::map<Ngram, double>> counts;   // annotator -> gram -> #spans covering
  };
  std::vector<Prepared> prepared;
  for (const auto& u : utterances) {
    Prepared p;
    auto tokens = tokenize(u.response_text);
    std::set<Ngram> vocab;
    for (auto& g : extract_ngrams(tokens, n_max)) vocab.insert(std::move(g));
    p.vocab.assign(vocab.begin(), vocab.end());
    for (const auto& s : spans) {
      if (s.utterance_id != u.id) continue;
      IndicatorAnnotation resolved = s;
      if (resolved.phrase.empty())
        resolved.phrase = u.response_text.substr(s.start, s.end - s.start);
      for (const auto& g : detail::span_grams(resolved, n_max)) p.counts[s.annotator_id][g] += 1.0;
    }
    for (const auto& [annotator, _] : p.counts) p.annotators.push_back(annotator);
    if (p.annotators.size() < k_max)
      throw error(errc::insufficient_annotators,
                  "utterance '" + u.id + "' has " + std::to_string(p.annotators.size()) +
                      " annotators, need " + std::to_string(k_max));
    prepared.push_back(std::move(p));
  }

  std::vector<ItaPoint> out;
  for (auto k : k_values) {
    double total = 0.0;
    for (std::size_t r = 0; r < resamples; ++r) {
      std::mt19937_64 rng(mix_seed(seed, k, r));
      double per_utterance_sum = 0.0;
      std::size_t per_utterance_n = 0;
      for (const auto& p : prepared) {
        auto chosen = sample_without_replacement(p.annotators, k, rng);
        std::vector<std::vector<double>> vectors;
        vectors.reserve(chosen.size());
        for (const auto& annotator : chosen) {
          std::vector<double> v(p.vocab.size(), 0.0);
          auto it = p.counts.find(annotator);
          if (it != p.counts.end()) {
            for (std::size_t i = 0; i < p.vocab.size(); ++i) {
              auto git = it->second.find(p.vocab[i]);
              if (git != it->second.end()) v[i] = git->second;
            }
          }
          vectors.push_back(std::move(v));
        }
        double pair_sum = 0.0;
        std::size_t pairs = 0;
        for (std::size_t i = 0; i < vectors.size(); ++i)
          for (std::size_t j = i + 1; j < vectors.size(); ++j) {
            pair_sum += detail::pearson(vectors[i], vectors[j]);
            ++pairs;
          }
        if (pairs > 0) {
          per_utterance_sum += pair_sum / static_cast<double>(pairs);
          ++per_utterance_n;
        }
      }
      if (per_utterance_n > 0) total += per_utterance_sum / static_cast<double>(per_utterance_n);
    }
    out.push_back(ItaPoint{k, total / static_cast<double>(resamples)});
  }
  return out;
}

}  // namespace cueboot
