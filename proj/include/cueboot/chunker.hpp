#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <string>
#include <tuple>
#include <vector>

#include "cueboot/pos_tagger.hpp"

namespace cueboot {

enum class Role { SUBJ, ACTIVE_VERB, PASSIVE_VERB, AUX, INFINITIVE, DOBJ, NP, PREP };

inline const char* role_name(Role r) {
  switch (r) {
    case Role::SUBJ: return "SUBJ";
    case Role::ACTIVE_VERB: return "ACTIVE_VERB";
    case Role::PASSIVE_VERB: return "PASSIVE_VERB";
    case Role::AUX: return "AUX";
    case Role::INFINITIVE: return "INFINITIVE";
    case Role::DOBJ: return "DOBJ";
    case Role::NP: return "NP";
    case Role::PREP: return "PREP";
  }
  return "?";
}

inline constexpr std::size_t no_head = std::numeric_limits<std::size_t>::max();

/// Token index range [begin, end] inclusive. head is the group's head verb
/// or the NP's last NOUN token (no_head when the NP has none).
struct RoleSpan {
  Role role;
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t head = no_head;
};

struct ChunkedSentence {
  std::vector<PosToken> tokens;
  std::vector<RoleSpan> roles;
};

/// Splits a tagged utterance into sentences after each ./!/? token.
inline std::vector<std::vector<PosToken>> segment_sentences(const std::vector<PosToken>& tokens) {
  std::vector<std::vector<PosToken>> out;
  std::vector<PosToken> cur;
  for (const auto& t : tokens) {
    cur.push_back(t);
    if (t.tag == Tag::PUNCT && (t.surface == "." || t.surface == "!" || t.surface == "?")) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

namespace detail {

enum class GroupKind { ACTIVE, PASSIVE, INFINITIVE };

struct VerbGroup {
  GroupKind kind = GroupKind::ACTIVE;
  std::size_t begin = 0;
  std::size_t end = 0;   // inclusive; the head verb
  std::size_t subj = no_head;  // index into Analysis::nps
  std::size_t dobj = no_head;
};

struct NounPhrase {
  std::size_t begin = 0;
  std::size_t end = 0;           // inclusive
  std::size_t head = no_head;    // last NOUN token
};

struct AuxPredicate {
  std::size_t pos = 0;           // the AUX/MODAL token
  std::size_t subj = no_head;    // index into nps
  std::size_t pred = no_head;    // the nominal predicate NP
};

struct Analysis {
  std::vector<NounPhrase> nps;
  std::vector<VerbGroup> groups;
  std::vector<AuxPredicate> aux_preds;
  std::vector<std::size_t> preps;  // PREP token positions
};

inline bool np_tag(Tag t) {
  return t == Tag::DET || t == Tag::ADJ || t == Tag::NOUN || t == Tag::PRON;
}

/// True when every token in (from, to) is an adverb (from < to, both exclusive).
inline bool only_advs_between(const std::vector<PosToken>& toks, std::size_t from, std::size_t to) {
  for (std::size_t i = from + 1; i < to; ++i)
    if (toks[i].tag != Tag::ADV) return false;
  return true;
}

inline Analysis analyze(const std::vector<PosToken>& toks) {
  Analysis a;
  const std::size_t n = toks.size();

  // verb groups: TO+VERB infinitives; AUX/MODAL(+ADV) runs headed by a VERB
  // (passive when a "be" form precedes a participle); bare VERBs are active.
  std::vector<char> in_group(n, 0);
  for (std::size_t i = 0; i < n;) {
    if (toks[i].tag == Tag::TO && i + 1 < n && toks[i + 1].tag == Tag::VERB) {
      a.groups.push_back({GroupKind::INFINITIVE, i, i + 1, no_head, no_head});
      in_group[i] = in_group[i + 1] = 1;
      i += 2;
    } else if (toks[i].tag == Tag::AUX || toks[i].tag == Tag::MODAL) {
      std::size_t j = i;
      bool has_be = false;
      while (j < n && (toks[j].tag == Tag::AUX || toks[j].tag == Tag::MODAL ||
                       toks[j].tag == Tag::ADV)) {
        if (toks[j].tag == Tag::AUX && lex::be_forms().count(toks[j].lowercased)) has_be = true;
        ++j;
      }
      if (j < n && toks[j].tag == Tag::VERB) {
        bool passive = has_be && is_participle_form(toks[j].lowercased);
        a.groups.push_back({passive ? GroupKind::PASSIVE : GroupKind::ACTIVE, i, j,
                            no_head, no_head});
        for (std::size_t k = i; k <= j; ++k) in_group[k] = 1;
        i = j + 1;
      } else {
        ++i;  // stranded aux; the nominal-predicate pass picks it up
      }
    } else if (toks[i].tag == Tag::VERB) {
      a.groups.push_back({GroupKind::ACTIVE, i, i, no_head, no_head});
      in_group[i] = 1;
      ++i;
    } else {
      ++i;
    }
  }

  // maximal DET/ADJ/NOUN/PRON runs
  for (std::size_t i = 0; i < n;) {
    if (np_tag(toks[i].tag)) {
      std::size_t j = i;
      while (j + 1 < n && np_tag(toks[j + 1].tag)) ++j;
      NounPhrase np{i, j, no_head};
      for (std::size_t k = i; k <= j; ++k)
        if (toks[k].tag == Tag::NOUN) np.head = k;
      a.nps.push_back(np);
      i = j + 1;
    } else {
      ++i;
    }
  }

  for (std::size_t i = 0; i < n; ++i)
    if (toks[i].tag == Tag::PREP) a.preps.push_back(i);

  auto np_ending_before = [&](std::size_t pos) -> std::size_t {
    for (std::size_t k = 0; k < a.nps.size(); ++k)
      if (a.nps[k].end < pos && only_advs_between(toks, a.nps[k].end, pos)) return k;
    return no_head;
  };
  auto np_starting_at = [&](std::size_t pos) -> std::size_t {
    for (std::size_t k = 0; k < a.nps.size(); ++k)
      if (a.nps[k].begin == pos) return k;
    return no_head;
  };
  auto np_after_advs = [&](std::size_t pos) -> std::size_t {
    for (std::size_t k = 0; k < a.nps.size(); ++k)
      if (a.nps[k].begin > pos && only_advs_between(toks, pos, a.nps[k].begin)) return k;
    return no_head;
  };

  for (auto& g : a.groups) {
    if (g.begin > 0) g.subj = np_ending_before(g.begin);
    if (g.kind != GroupKind::PASSIVE) g.dobj = np_starting_at(g.end + 1);
  }

  // AUX/MODAL outside any verb group, followed by a nominal predicate:
  // the copular frame behind "<subj> aux noun" and "noun aux <dobj>".
  for (std::size_t i = 0; i < n; ++i) {
    if (!in_group[i] && (toks[i].tag == Tag::AUX || toks[i].tag == Tag::MODAL)) {
      std::size_t pred = np_after_advs(i);
      if (pred == no_head) continue;
      AuxPredicate ap{i, no_head, pred};
      if (i > 0) ap.subj = np_ending_before(i);
      a.aux_preds.push_back(ap);
    }
  }

  return a;
}

}  // namespace detail

/// Finite-state role assignment over the tag sequence of one sentence.
inline ChunkedSentence chunk(const std::vector<PosToken>& tokens) {
  ChunkedSentence out;
  out.tokens = tokens;
  auto a = detail::analyze(tokens);

  for (const auto& np : a.nps) out.roles.push_back({Role::NP, np.begin, np.end, np.head});
  for (auto p : a.preps) out.roles.push_back({Role::PREP, p, p, no_head});
  for (const auto& g : a.groups) {
    Role r = g.kind == detail::GroupKind::PASSIVE    ? Role::PASSIVE_VERB
             : g.kind == detail::GroupKind::INFINITIVE ? Role::INFINITIVE
                                                       : Role::ACTIVE_VERB;
    out.roles.push_back({r, g.begin, g.end, g.end});
    if (g.subj != no_head) {
      const auto& np = a.nps[g.subj];
      out.roles.push_back({Role::SUBJ, np.begin, np.end, np.head});
    }
    if (g.dobj != no_head) {
      const auto& np = a.nps[g.dobj];
      out.roles.push_back({Role::DOBJ, np.begin, np.end, np.head});
    }
  }
  for (const auto& ap : a.aux_preds) {
    out.roles.push_back({Role::AUX, ap.pos, ap.pos, ap.pos});
    if (ap.subj != no_head) {
      const auto& np = a.nps[ap.subj];
      out.roles.push_back({Role::SUBJ, np.begin, np.end, np.head});
    }
    if (ap.pred != no_head) {
      const auto& np = a.nps[ap.pred];
      out.roles.push_back({Role::DOBJ, np.begin, np.end, np.head});
    }
  }
  auto key = [](const RoleSpan& s) {
    return std::tuple<int, std::size_t, std::size_t>(static_cast<int>(s.role), s.begin, s.end);
  };
  std::sort(out.roles.begin(), out.roles.end(),
            [&](const RoleSpan& x, const RoleSpan& y) { return key(x) < key(y); });
  out.roles.erase(std::unique(out.roles.begin(), out.roles.end(),
                              [&](const RoleSpan& x, const RoleSpan& y) { return key(x) == key(y); }),
                  out.roles.end());
  return out;
}

}  // namespace cueboot
