#pragma once

#include <algorithm>
#include <cstdint>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "cueboot/corpus.hpp"
#include "cueboot/error.hpp"
#include "cueboot/indicators.hpp"
#include "cueboot/text.hpp"

namespace cueboot {

enum class Regime { IA_FEATURES, PERCENT_FEATURES, CHI2_FEATURES };

inline const char* regime_name(Regime r) {
  switch (r) {
    case Regime::IA_FEATURES: return "ia";
    case Regime::PERCENT_FEATURES: return "percent";
    case Regime::CHI2_FEATURES: return "chi2";
  }
  return "?";
}

inline Regime regime_from_name(const std::string& s) {
  if (s == "ia") return Regime::IA_FEATURES;
  if (s == "percent") return Regime::PERCENT_FEATURES;
  if (s == "chi2") return Regime::CHI2_FEATURES;
  throw error(errc::invalid_argument, "unknown regime '" + s + "'");
}

/// Thresholds for one classifier regime. theta1 gates FREQ everywhere;
/// theta2 gates pct_class (percent and chi2 regimes); alpha/beta bound the
/// IA strength tiers. alpha == beta is allowed (the full sweep grid contains
/// that corner; the MEDIUM band is then empty).
struct HPConfig {
  Regime regime = Regime::PERCENT_FEATURES;
  int theta1 = 1;
  double theta2 = 0.0;
  double alpha = 0.0;
  double beta = 1.0;

  void validate() const {
    if (theta1 < 1) throw error(errc::invalid_argument, "theta1 must be >= 1");
    if (regime == Regime::IA_FEATURES) {
      if (!(0.0 <= alpha && alpha <= beta && beta <= 1.0))
        throw error(errc::invalid_argument, "need 0 <= alpha <= beta <= 1");
    } else if (!(0.0 <= theta2 && theta2 <= 1.0)) {
      throw error(errc::invalid_argument, "theta2 must be in [0,1]");
    }
  }

  /// Tie-break order for select_best and stable sweep output.
  std::tuple<int, double, double, double> key() const { return {theta1, theta2, alpha, beta}; }
};

enum class Strength { WEAK, MEDIUM, STRONG };

inline const char* strength_name(Strength s) {
  switch (s) {
    case Strength::WEAK: return "weak";
    case Strength::MEDIUM: return "medium";
    case Strength::STRONG: return "strong";
  }
  return "?";
}

/// WEAK if IA < alpha, MEDIUM if alpha <= IA < beta, STRONG if IA >= beta.
/// Perfect agreement (IA = 1) is STRONG.
inline Strength strength_tier(const Indicator& indicator, double alpha, double beta) {
  if (!indicator.ia)
    throw error(errc::missing_ia, "indicator '" + indicator.ngram.joined() + "' has no IA");
  double ia = *indicator.ia;
  if (ia >= beta) return Strength::STRONG;
  if (ia >= alpha) return Strength::MEDIUM;
  return Strength::WEAK;
}

struct Evidence {
  std::string item;          // space-joined n-gram, or "template:fill" for patterns
  std::size_t position = 0;  // token offset of the first match
  std::string detail;        // tier or firing note
};

struct Classification {
  Label label = Label::ABSTAIN;
  std::vector<Evidence> evidence;
};

namespace detail {

/// Indices of indicators whose n-gram occurs in the token sequence.
inline std::vector<std::size_t> matched_indicators(const std::vector<std::string>& tokens,
                                                   const std::vector<Indicator>& indicators) {
  std::set<Ngram> seen;
  for (auto& g : extract_ngrams(tokens, 3)) seen.insert(std::move(g));
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < indicators.size(); ++i)
    if (seen.count(indicators[i].ngram)) out.push_back(i);
  return out;
}

inline Label ia_label(std::size_t strong, std::size_t medium) {
  if (strong >= 1 || medium >= 2) return Label::CLASS;
  return Label::COUNTER;  // 0 strong and <= 1 medium: the two rules are exhaustive
}

inline Label percent_label(std::size_t firing) {
  return firing >= 2 ? Label::CLASS : Label::COUNTER;
}

}  // namespace detail

/// IA regime: distinct matched indicators with FREQ >= theta1 are tiered by
/// IA; one STRONG or two MEDIUM indicators classify; WEAK carries no signal.
inline Classification classify_ia(const Utterance& utterance,
                                  const std::vector<Indicator>& indicators,
                                  const HPConfig& config) {
  auto tokens = tokenize(utterance.response_text);
  Classification out;
  std::size_t strong = 0, medium = 0;
  for (auto idx : detail::matched_indicators(tokens, indicators)) {
    const auto& ind = indicators[idx];
    if (ind.freq < static_cast<std::size_t>(config.theta1)) continue;
    Strength tier = strength_tier(ind, config.alpha, config.beta);
    if (tier == Strength::WEAK) continue;
    (tier == Strength::STRONG ? strong : medium)++;
    auto pos = find_ngram(tokens, ind.ngram);
    out.evidence.push_back({ind.ngram.joined(), pos.empty() ? 0 : pos.front(),
                            strength_name(tier)});
  }
  out.label = detail::ia_label(strong, medium);
  return out;
}

/// Percent / chi2 regimes: an indicator fires when matched with
/// FREQ >= theta1 and pct_class >= theta2; two distinct firing indicators
/// classify, fewer predict the counter-class.
inline Classification classify_percent(const Utterance& utterance,
                                       const std::vector<Indicator>& indicators,
                                       const HPConfig& config) {
  auto tokens = tokenize(utterance.response_text);
  Classification out;
  std::size_t firing = 0;
  for (auto idx : detail::matched_indicators(tokens, indicators)) {
    const auto& ind = indicators[idx];
    if (ind.freq < static_cast<std::size_t>(config.theta1)) continue;
    if (ind.pct_class < config.theta2) continue;
    ++firing;
    auto pos = find_ngram(tokens, ind.ngram);
    out.evidence.push_back({ind.ngram.joined(), pos.empty() ? 0 : pos.front(), "firing"});
  }
  out.label = detail::percent_label(firing);
  return out;
}

inline Classification classify_one(const Utterance& utterance,
                                   const std::vector<Indicator>& indicators,
                                   const HPConfig& config) {
  return config.regime == Regime::IA_FEATURES ? classify_ia(utterance, indicators, config)
                                              : classify_percent(utterance, indicators, config);
}

inline std::vector<std::pair<Utterance, Classification>> classify_corpus(
    const std::vector<Utterance>& corpus, const std::vector<Indicator>& indicators,
    const HPConfig& config) {
  config.validate();
  std::vector<std::pair<Utterance, Classification>> out;
  out.reserve(corpus.size());
  for (const auto& u : corpus) out.emplace_back(u, classify_one(u, indicators, config));
  return out;
}

struct SweepResult {
  HPConfig config;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t true_positives = 0;
};

inline SweepResult make_sweep_result(const HPConfig& config, std::size_t tp, std::size_t fp,
                                     std::size_t gold_positives) {
  SweepResult r;
  r.config = config;
  r.true_positives = tp;
  r.precision = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
  r.recall = gold_positives == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(gold_positives);
  r.f1 = r.precision + r.recall == 0.0
             ? 0.0
             : 2.0 * r.precision * r.recall / (r.precision + r.recall);
  return r;
}

struct SweepGrids {
  std::vector<double> betas;
  std::vector<double> alphas;
  std::vector<int> theta1s;
  std::vector<double> theta2s;

  static SweepGrids defaults() {
    SweepGrids g;
    g.betas = {0.70, 0.75, 0.80, 0.85, 0.90, 0.95, 1.00};
    g.alphas = {0.35, 0.40, 0.45, 0.50, 0.55, 0.60, 0.65, 0.70};
    g.theta1s = {2, 4, 6, 8, 10};
    g.theta2s = {0.55, 0.60, 0.65, 0.70, 0.75, 0.80, 0.85, 0.90, 0.95, 1.00};
    return g;
  }
};

/// Exhausts the grid for one regime over a gold-labeled set. IA regime walks
/// beta x alpha x theta1; the others theta1 x theta2. CLASS is the positive
/// label and the recall denominator is every gold-CLASS utterance in train.
inline std::vector<SweepResult> sweep(const std::vector<LabeledUtterance>& train,
                                      const std::vector<Indicator>& indicators, Regime regime,
                                      const SweepGrids& grids) {
  const bool ia = regime == Regime::IA_FEATURES;
  if (grids.theta1s.empty() || (ia ? grids.betas.empty() || grids.alphas.empty()
                                   : grids.theta2s.empty()))
    throw error(errc::invalid_argument, "sweep grids must be non-empty");

  std::size_t gold_positives = 0;
  std::vector<std::vector<std::size_t>> matches(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) {
    if (train[i].class_label == Label::CLASS) ++gold_positives;
    matches[i] = detail::matched_indicators(tokenize(train[i].utterance.response_text), indicators);
  }

  auto score = [&](const HPConfig& config) {
    std::size_t tp = 0, fp = 0;
    for (std::size_t i = 0; i < train.size(); ++i) {
      std::size_t strong = 0, medium = 0, firing = 0;
      for (auto idx : matches[i]) {
        const auto& ind = indicators[idx];
        if (ind.freq < static_cast<std::size_t>(config.theta1)) continue;
        if (ia) {
          Strength tier = strength_tier(ind, config.alpha, config.beta);
          if (tier == Strength::STRONG)
            ++strong;
          else if (tier == Strength::MEDIUM)
            ++medium;
        } else if (ind.pct_class >= config.theta2) {
          ++firing;
        }
      }
      Label predicted = ia ? detail::ia_label(strong, medium) : detail::percent_label(firing);
      if (predicted == Label::CLASS)
        (train[i].class_label == Label::CLASS ? tp : fp)++;
    }
    return make_sweep_result(config, tp, fp, gold_positives);
  };

  std::vector<SweepResult> results;
  if (ia) {
    for (double beta : grids.betas)
      for (double alpha : grids.alphas)
        for (int theta1 : grids.theta1s) {
          HPConfig c;
          c.regime = regime;
          c.theta1 = theta1;
          c.alpha = alpha;
          c.beta = beta;
          if (c.alpha > c.beta) continue;  // grid corners outside the tier order
          results.push_back(score(c));
        }
  } else {
    for (int theta1 : grids.theta1s)
      for (double theta2 : grids.theta2s) {
        HPConfig c;
        c.regime = regime;
        c.theta1 = theta1;
        c.theta2 = theta2;
        results.push_back(score(c));
      }
  }
  return results;
}

struct SelectionPolicy {
  double min_recall = 0.0;
};

/// Among results meeting the recall floor, maximizes F1; ties fall to higher
/// precision, then higher recall, then the lowest (theta1, theta2, alpha,
/// beta) tuple.
inline HPConfig select_best(const std::vector<SweepResult>& results,
                            const SelectionPolicy& policy) {
  const SweepResult* best = nullptr;
  for (const auto& r : results) {
    if (r.recall < policy.min_recall) continue;
    if (!best) {
      best = &r;
      continue;
    }
    if (r.f1 != best->f1) {
      if (r.f1 > best->f1) best = &r;
    } else if (r.precision != best->precision) {
      if (r.precision > best->precision) best = &r;
    } else if (r.recall != best->recall) {
      if (r.recall > best->recall) best = &r;
    } else if (r.config.key() < best->config.key()) {
      best = &r;
    }
  }
  if (!best)
    throw error(errc::no_feasible_config,
                "no sweep result reaches min_recall " + std::to_string(policy.min_recall));
  return best->config;
}

}  // namespace cueboot
