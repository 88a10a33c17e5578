#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cueboot/chunker.hpp"
#include "cueboot/corpus.hpp"
#include "cueboot/error.hpp"
#include "cueboot/hp_classifier.hpp"
#include "cueboot/pos_tagger.hpp"

namespace cueboot {

/// The 13 syntactic template shapes. Lexical slots (part of the fill) are the
/// role names without placeholders; <subj>/<dobj>/<np> slots only require a
/// filler to be present.
enum class PatternTemplate {
  SUBJ_PASSIVE_VERB,       // <subj> was explained
  SUBJ_ACTIVE_VERB,        // <subj> appears
  SUBJ_ACTIVE_VERB_DOBJ,   // <subj> have problem
  SUBJ_VERB_INFINITIVE,    // <subj> have to do
  SUBJ_AUX_NOUN,           // <subj> is nothing
  ACTIVE_VERB_DOBJ,        // gives <dobj>
  INFINITIVE_DOBJ,         // to force <dobj>
  VERB_INFINITIVE_DOBJ,    // want to take <dobj>
  NOUN_AUX_DOBJ,           // fact is <dobj>
  NOUN_PREP_NP,            // argument against <np>
  ACTIVE_VERB_PREP_NP,     // looking for <np>
  PASSIVE_VERB_PREP_NP,    // was put in <np>
  INFINITIVE_PREP_NP,      // to go to <np>
};

inline constexpr int pattern_template_count = 13;

inline const char* template_name(PatternTemplate t) {
  switch (t) {
    case PatternTemplate::SUBJ_PASSIVE_VERB: return "subj_passive_verb";
    case PatternTemplate::SUBJ_ACTIVE_VERB: return "subj_active_verb";
    case PatternTemplate::SUBJ_ACTIVE_VERB_DOBJ: return "subj_active_verb_dobj";
    case PatternTemplate::SUBJ_VERB_INFINITIVE: return "subj_verb_infinitive";
    case PatternTemplate::SUBJ_AUX_NOUN: return "subj_aux_noun";
    case PatternTemplate::ACTIVE_VERB_DOBJ: return "active_verb_dobj";
    case PatternTemplate::INFINITIVE_DOBJ: return "infinitive_dobj";
    case PatternTemplate::VERB_INFINITIVE_DOBJ: return "verb_infinitive_dobj";
    case PatternTemplate::NOUN_AUX_DOBJ: return "noun_aux_dobj";
    case PatternTemplate::NOUN_PREP_NP: return "noun_prep_np";
    case PatternTemplate::ACTIVE_VERB_PREP_NP: return "active_verb_prep_np";
    case PatternTemplate::PASSIVE_VERB_PREP_NP: return "passive_verb_prep_np";
    case PatternTemplate::INFINITIVE_PREP_NP: return "infinitive_prep_np";
  }
  return "?";
}

inline PatternTemplate template_from_name(const std::string& s) {
  static const std::map<std::string, PatternTemplate> names = {
      {"subj_passive_verb", PatternTemplate::SUBJ_PASSIVE_VERB},
      {"subj_active_verb", PatternTemplate::SUBJ_ACTIVE_VERB},
      {"subj_active_verb_dobj", PatternTemplate::SUBJ_ACTIVE_VERB_DOBJ},
      {"subj_verb_infinitive", PatternTemplate::SUBJ_VERB_INFINITIVE},
      {"subj_aux_noun", PatternTemplate::SUBJ_AUX_NOUN},
      {"active_verb_dobj", PatternTemplate::ACTIVE_VERB_DOBJ},
      {"infinitive_dobj", PatternTemplate::INFINITIVE_DOBJ},
      {"verb_infinitive_dobj", PatternTemplate::VERB_INFINITIVE_DOBJ},
      {"noun_aux_dobj", PatternTemplate::NOUN_AUX_DOBJ},
      {"noun_prep_np", PatternTemplate::NOUN_PREP_NP},
      {"active_verb_prep_np", PatternTemplate::ACTIVE_VERB_PREP_NP},
      {"passive_verb_prep_np", PatternTemplate::PASSIVE_VERB_PREP_NP},
      {"infinitive_prep_np", PatternTemplate::INFINITIVE_PREP_NP}};
  auto it = names.find(s);
  if (it == names.end()) throw error(errc::parse_error, "unknown template '" + s + "'");
  return it->second;
}

using PatternInstance = std::pair<PatternTemplate, std::string>;

struct ExtractionPattern {
  PatternTemplate pattern_template = PatternTemplate::SUBJ_ACTIVE_VERB;
  std::string fill;
  std::size_t freq = 0;
  double pct_class = 0.0;
};

struct PatternConfig {
  int theta1 = 1;
  double theta2 = 0.0;

  void validate() const {
    if (theta1 < 1) throw error(errc::invalid_argument, "theta1 must be >= 1");
    if (!(0.0 <= theta2 && theta2 <= 1.0))
      throw error(errc::invalid_argument, "theta2 must be in [0,1]");
  }
};

namespace detail {

inline std::string surface_of(const std::vector<PosToken>& toks, std::size_t begin,
                              std::size_t end) {
  std::string s;
  for (std::size_t i = begin; i <= end; ++i) {
    if (!s.empty()) s += ' ';
    s += toks[i].lowercased;
  }
  return s;
}

}  // namespace detail

/// Every role adjacency matching one of the 13 shapes, with the lexical
/// slots' lowercased surfaces as the fill. Placeholder slots (<subj>, <dobj>,
/// <np>) must be occupied but contribute nothing to the fill. Lexical noun
/// slots require an NP headed by a NOUN token.
inline std::set<PatternInstance> instantiate_templates(const ChunkedSentence& chunked) {
  const auto& toks = chunked.tokens;
  auto a = detail::analyze(toks);
  std::set<PatternInstance> out;

  auto np_starting_at = [&](std::size_t pos) -> const detail::NounPhrase* {
    for (const auto& np : a.nps)
      if (np.begin == pos) return &np;
    return nullptr;
  };

  auto head_noun = [&](const detail::NounPhrase& np) -> std::string {
    return np.head == no_head ? std::string() : toks[np.head].lowercased;
  };

  auto prep_then_np = [&](std::size_t pos) -> const std::size_t* {
    for (const auto& p : a.preps)
      if (p == pos && np_starting_at(p + 1)) return &p;
    return nullptr;
  };

  // group -> infinitive group starting right after it
  auto infinitive_at = [&](std::size_t pos) -> const detail::VerbGroup* {
    for (const auto& g : a.groups)
      if (g.kind == detail::GroupKind::INFINITIVE && g.begin == pos) return &g;
    return nullptr;
  };

  for (const auto& g : a.groups) {
    std::string group_surface = detail::surface_of(toks, g.begin, g.end);
    std::string head_surface = toks[g.end].lowercased;
    bool has_subj = g.subj != no_head;

    switch (g.kind) {
      case detail::GroupKind::PASSIVE: {
        if (has_subj) out.insert({PatternTemplate::SUBJ_PASSIVE_VERB, group_surface});
        if (auto* p = prep_then_np(g.end + 1))
          out.insert({PatternTemplate::PASSIVE_VERB_PREP_NP,
                      group_surface + " " + toks[*p].lowercased});
        break;
      }
      case detail::GroupKind::ACTIVE: {
        if (has_subj) out.insert({PatternTemplate::SUBJ_ACTIVE_VERB, head_surface});
        if (g.dobj != no_head) {
          out.insert({PatternTemplate::ACTIVE_VERB_DOBJ, head_surface});
          if (has_subj) {
            std::string obj_noun = head_noun(a.nps[g.dobj]);
            if (!obj_noun.empty())
              out.insert({PatternTemplate::SUBJ_ACTIVE_VERB_DOBJ,
                          head_surface + " " + obj_noun});
          }
        }
        if (auto* p = prep_then_np(g.end + 1))
          out.insert({PatternTemplate::ACTIVE_VERB_PREP_NP,
                      head_surface + " " + toks[*p].lowercased});
        if (auto* inf = infinitive_at(g.end + 1)) {
          std::string inf_surface = detail::surface_of(toks, inf->begin, inf->end);
          if (has_subj)
            out.insert({PatternTemplate::SUBJ_VERB_INFINITIVE,
                        head_surface + " " + inf_surface});
          if (inf->dobj != no_head)
            out.insert({PatternTemplate::VERB_INFINITIVE_DOBJ,
                        head_surface + " " + inf_surface});
        }
        break;
      }
      case detail::GroupKind::INFINITIVE: {
        if (g.dobj != no_head) out.insert({PatternTemplate::INFINITIVE_DOBJ, group_surface});
        if (auto* p = prep_then_np(g.end + 1))
          out.insert({PatternTemplate::INFINITIVE_PREP_NP,
                      group_surface + " " + toks[*p].lowercased});
        break;
      }
    }
  }

  for (const auto& ap : a.aux_preds) {
    std::string aux_surface = toks[ap.pos].lowercased;
    if (ap.subj == no_head || ap.pred == no_head) continue;
    std::string pred_noun = head_noun(a.nps[ap.pred]);
    if (!pred_noun.empty())
      out.insert({PatternTemplate::SUBJ_AUX_NOUN, aux_surface + " " + pred_noun});
    std::string subj_noun = head_noun(a.nps[ap.subj]);
    if (!subj_noun.empty())
      out.insert({PatternTemplate::NOUN_AUX_DOBJ, subj_noun + " " + aux_surface});
  }

  // noun prep <np>: a NOUN-headed NP immediately followed by PREP + NP
  for (const auto& np : a.nps) {
    if (np.head == no_head) continue;
    if (auto* p = prep_then_np(np.end + 1))
      out.insert({PatternTemplate::NOUN_PREP_NP,
                  toks[np.head].lowercased + " " + toks[*p].lowercased});
  }

  return out;
}

using PretagMap = std::map<std::string, std::vector<PosToken>>;

/// Tags one utterance, honoring a pre-tagged bypass when its id is present.
inline std::vector<PosToken> tag_utterance(const Utterance& u, const PretagMap* pretagged) {
  if (pretagged) {
    auto it = pretagged->find(u.id);
    if (it != pretagged->end()) return it->second;
  }
  return pos_tag(u.response_text);
}

/// All pattern instances of an utterance (union over its sentences).
inline std::set<PatternInstance> utterance_instances(const Utterance& u,
                                                     const PretagMap* pretagged = nullptr) {
  std::set<PatternInstance> out;
  for (const auto& sentence : segment_sentences(tag_utterance(u, pretagged))) {
    auto inst = instantiate_templates(chunk(sentence));
    out.insert(inst.begin(), inst.end());
  }
  return out;
}

namespace detail {

struct InstanceStats {
  std::size_t freq = 0;
  std::size_t in_class = 0;
};

inline std::map<PatternInstance, InstanceStats> pattern_table(
    const std::vector<std::set<PatternInstance>>& instances, const std::vector<Label>& labels) {
  std::map<PatternInstance, InstanceStats> table;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    if (labels[i] == Label::ABSTAIN) continue;  // unlabeled text teaches nothing
    for (const auto& inst : instances[i]) {
      auto& st = table[inst];
      ++st.freq;
      if (labels[i] == Label::CLASS) ++st.in_class;
    }
  }
  return table;
}

inline std::vector<ExtractionPattern> retain_patterns(
    const std::map<PatternInstance, InstanceStats>& table, const PatternConfig& config) {
  std::vector<ExtractionPattern> out;
  for (const auto& [inst, st] : table) {
    double pct = static_cast<double>(st.in_class) / static_cast<double>(st.freq);
    if (st.freq >= static_cast<std::size_t>(config.theta1) && pct >= config.theta2)
      out.push_back({inst.first, inst.second, st.freq, pct});
  }
  // already sorted by (template, fill) via the map key order
  return out;
}

}  // namespace detail

/// Learns class-side patterns from (predicted-)labeled utterances: FREQ =
/// containing utterances, pct_class = fraction of those labeled CLASS; keeps
/// patterns with FREQ >= theta1 and pct_class >= theta2. Counter-class
/// patterns are never learned.
inline std::vector<ExtractionPattern> learn_patterns(
    const std::vector<std::pair<Utterance, Label>>& classified, const PatternConfig& config,
    const PretagMap* pretagged = nullptr) {
  config.validate();
  if (classified.empty()) throw error(errc::empty_input, "no classified utterances to learn from");
  std::vector<std::set<PatternInstance>> instances;
  std::vector<Label> labels;
  instances.reserve(classified.size());
  for (const auto& [u, label] : classified) {
    instances.push_back(utterance_instances(u, pretagged));
    labels.push_back(label);
  }
  return detail::retain_patterns(detail::pattern_table(instances, labels), config);
}

/// Two distinct matching patterns (re-checked against config) predict CLASS;
/// fewer predict the counter-class.
inline Classification classify_patterns(const Utterance& utterance,
                                        const std::vector<ExtractionPattern>& patterns,
                                        const PatternConfig& config,
                                        const PretagMap* pretagged = nullptr) {
  config.validate();
  auto instances = utterance_instances(utterance, pretagged);
  Classification out;
  std::size_t matching = 0;
  for (const auto& p : patterns) {
    if (p.freq < static_cast<std::size_t>(config.theta1) || p.pct_class < config.theta2) continue;
    if (instances.count({p.pattern_template, p.fill})) {
      ++matching;
      out.evidence.push_back({std::string(template_name(p.pattern_template)) + ":" + p.fill, 0,
                              "matched"});
    }
  }
  out.label = matching >= 2 ? Label::CLASS : Label::COUNTER;
  return out;
}

/// Grid sweep for the pattern classifier. Patterns are learned from
/// `source` (predicted labels; pass the eval set's own gold labels for a
/// training sweep) and scored on eval_set. Results reuse SweepResult with
/// theta1/theta2 carried in the config.
inline std::vector<SweepResult> sweep_patterns(
    const std::vector<LabeledUtterance>& eval_set,
    const std::vector<std::pair<Utterance, Label>>& source, const SweepGrids& grids,
    const PretagMap* pretagged = nullptr) {
  if (grids.theta1s.empty() || grids.theta2s.empty())
    throw error(errc::invalid_argument, "sweep grids must be non-empty");
  if (source.empty()) throw error(errc::empty_input, "no classified utterances to learn from");

  std::vector<std::set<PatternInstance>> source_instances;
  std::vector<Label> source_labels;
  for (const auto& [u, label] : source) {
    source_instances.push_back(utterance_instances(u, pretagged));
    source_labels.push_back(label);
  }
  auto table = detail::pattern_table(source_instances, source_labels);

  std::size_t gold_positives = 0;
  std::vector<std::set<PatternInstance>> eval_instances;
  for (const auto& lu : eval_set) {
    if (lu.class_label == Label::CLASS) ++gold_positives;
    eval_instances.push_back(utterance_instances(lu.utterance, pretagged));
  }

  std::vector<SweepResult> results;
  for (int theta1 : grids.theta1s)
    for (double theta2 : grids.theta2s) {
      PatternConfig pc{theta1, theta2};
      auto patterns = detail::retain_patterns(table, pc);
      std::set<PatternInstance> retained;
      for (const auto& p : patterns) retained.insert({p.pattern_template, p.fill});

      std::size_t tp = 0, fp = 0;
      for (std::size_t i = 0; i < eval_set.size(); ++i) {
        std::size_t matching = 0;
        for (const auto& inst : eval_instances[i])
          if (retained.count(inst)) ++matching;
        if (matching >= 2)
          (eval_set[i].class_label == Label::CLASS ? tp : fp)++;
      }
      HPConfig hc;
      hc.regime = Regime::PERCENT_FEATURES;  // carrier only; patterns have no regime
      hc.theta1 = theta1;
      hc.theta2 = theta2;
      results.push_back(make_sweep_result(hc, tp, fp, gold_positives));
    }
  return results;
}

}  // namespace cueboot
