#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "cueboot/error.hpp"
#include "cueboot/text.hpp"

namespace cueboot {

enum class Tag { NOUN, PRON, VERB, AUX, MODAL, ADJ, ADV, DET, PREP, TO, PUNCT, OTHER };

inline const char* tag_name(Tag t) {
  switch (t) {
    case Tag::NOUN: return "NOUN";
    case Tag::PRON: return "PRON";
    case Tag::VERB: return "VERB";
    case Tag::AUX: return "AUX";
    case Tag::MODAL: return "MODAL";
    case Tag::ADJ: return "ADJ";
    case Tag::ADV: return "ADV";
    case Tag::DET: return "DET";
    case Tag::PREP: return "PREP";
    case Tag::TO: return "TO";
    case Tag::PUNCT: return "PUNCT";
    case Tag::OTHER: return "OTHER";
  }
  return "OTHER";
}

inline Tag tag_from_name(const std::string& s) {
  static const std::map<std::string, Tag> names = {
      {"NOUN", Tag::NOUN},   {"PRON", Tag::PRON}, {"VERB", Tag::VERB}, {"AUX", Tag::AUX},
      {"MODAL", Tag::MODAL}, {"ADJ", Tag::ADJ},   {"ADV", Tag::ADV},   {"DET", Tag::DET},
      {"PREP", Tag::PREP},   {"TO", Tag::TO},     {"PUNCT", Tag::PUNCT}, {"OTHER", Tag::OTHER}};
  auto it = names.find(s);
  if (it == names.end()) throw error(errc::parse_error, "unknown POS tag '" + s + "'");
  return it->second;
}

struct PosToken {
  std::string surface;
  Tag tag = Tag::OTHER;
  std::string lowercased;
};

namespace lex {

inline const std::set<std::string>& pronouns() {
  static const std::set<std::string> s = {
      "i", "you", "he", "she", "it", "we", "they", "me", "him", "her", "us", "them",
      "who", "whom", "what", "which", "someone", "somebody", "something", "anyone",
      "anybody", "anything", "everyone", "everybody", "everything", "nobody", "there",
      "myself", "yourself", "himself", "herself", "itself", "ourselves", "yourselves",
      "themselves"};
  return s;
}

inline const std::set<std::string>& determiners() {
  static const std::set<std::string> s = {
      "a", "an", "the", "this", "that", "these", "those", "any", "all", "some", "no",
      "every", "each", "another", "both", "few", "many", "much", "several", "most",
      "other", "such", "my", "your", "his", "its", "our", "their", "whose"};
  return s;
}

inline const std::set<std::string>& prepositions() {
  static const std::set<std::string> s = {
      "of", "in", "on", "at", "by", "for", "with", "from", "about", "against",
      "between", "into", "through", "during", "before", "after", "above", "below",
      "under", "over", "without", "within", "upon", "across", "behind", "beyond",
      "near", "since", "toward", "towards", "among", "around", "despite", "per",
      "via", "off", "onto", "out", "up", "down", "like"};
  return s;
}

inline const std::set<std::string>& be_forms() {
  static const std::set<std::string> s = {"am",     "is",    "are",    "was",    "were",
                                          "be",     "been",  "being",  "isn't",  "aren't",
                                          "wasn't", "weren't"};
  return s;
}

/// have/do forms are auxiliary only in verbal contexts; see the context pass.
inline const std::set<std::string>& have_do_forms() {
  static const std::set<std::string> s = {"have",    "has",     "had",    "do",      "does",
                                          "did",     "don't",   "doesn't", "didn't", "haven't",
                                          "hasn't",  "hadn't"};
  return s;
}

inline const std::set<std::string>& modals() {
  static const std::set<std::string> s = {"will",   "would",  "can",      "could",
                                          "shall",  "should", "may",      "might",
                                          "must",   "won't",  "wouldn't", "can't",
                                          "cannot", "couldn't", "shouldn't", "mustn't"};
  return s;
}

inline const std::set<std::string>& adverbs() {
  static const std::set<std::string> s = {
      "not", "never", "also", "very", "quite", "too", "really", "actually", "exactly",
      "just", "still", "yet", "soon", "often", "always", "sometimes", "usually",
      "rarely", "here", "again", "ago", "away", "back", "now", "then", "when", "why",
      "how", "perhaps", "probably", "indeed", "rather", "whatsoever", "instead",
      "anyway", "apparently", "certainly", "clearly", "ever", "even", "only",
      "already", "eventually", "finally", "nearly", "almost", "far", "please",
      "maybe", "else", "once", "twice", "together", "well"};
  return s;
}

/// Conjunctions and other closed-class words outside the role vocabulary.
inline const std::set<std::string>& others() {
  static const std::set<std::string> s = {"and", "or",       "but",    "nor",  "because",
                                          "although", "though", "while", "whereas", "unless",
                                          "whether",  "if",     "yes"};
  return s;
}

/// Nouns that suffix rules would otherwise mis-shelve ("nothing" is not a
/// gerund).
inline const std::set<std::string>& nouns() {
  static const std::set<std::string> s = {"nothing", "thing",   "things", "morning",
                                          "evening", "king",    "ring",   "wing",
                                          "string",  "spring",  "building", "feeling",
                                          "meaning", "beginning"};
  return s;
}

inline const std::set<std::string>& adjectives() {
  static const std::set<std::string> s = {
      "good", "bad", "new", "old", "great", "little", "big", "small", "long", "high",
      "low", "different", "large", "next", "early", "young", "important", "sure",
      "real", "best", "better", "worst", "worse", "sensible", "strange", "vast",
      "open", "gay", "unjust", "unfair", "free", "true", "false", "wrong", "same",
      "own", "whole", "full", "easy", "hard", "late", "last", "first", "second",
      "ad", "hoc", "avowed"};
  return s;
}

inline const std::set<std::string>& verbs() {
  static const std::set<std::string> s = {
      "think", "know", "want", "need", "try", "use", "make", "take", "go", "get",
      "give", "see", "say", "come", "find", "tell", "ask", "seem", "feel", "leave",
      "put", "set", "begin", "keep", "hold", "write", "stand", "hear", "let", "mean",
      "meet", "run", "pay", "sit", "speak", "lie", "lead", "read", "grow", "lose",
      "fall", "send", "build", "understand", "draw", "break", "spend", "cut", "rise",
      "drive", "buy", "wear", "choose", "encounter", "force", "abolish", "discuss",
      "attack", "explain", "appear", "look", "lack", "purchase", "prowl", "believe",
      "agree", "argue", "call", "claim", "consider", "continue", "decide", "expect",
      "happen", "help", "hope", "live", "love", "hate", "move", "play", "prove",
      "remember", "show", "start", "stop", "suggest", "support", "talk", "turn",
      "vote", "wait", "walk", "watch", "win", "wish", "work", "accept", "allow",
      "apply", "assume", "become", "bring", "cause", "change", "compare",
      "create", "define", "deny", "describe", "exist", "fail", "follow", "happen",
      "ignore", "imagine", "include", "involve", "learn", "listen", "matter", "note",
      "offer", "pass", "provide", "quote", "raise", "reach",
      "refer", "refuse", "remain", "reply", "require", "respond", "return", "seek",
      "sell", "serve", "share", "stay", "teach", "throw", "treat",
      "wonder", "add", "act", "care", "check", "deal", "die", "eat",
      "end", "fight", "fit", "fix", "found", "gain", "grant", "handle", "judge",
      "kill", "laugh", "mention", "miss", "notice", "occur", "pick",
      "pull", "push", "realize", "receive", "remove", "repeat",
      "report", "save", "shoot", "sign", "sound", "spread",
      "stick", "strike", "suppose", "trust", "back"};
  return s;
}

/// Irregular past participles not covered by the -ed/-en suffix fallback.
inline const std::set<std::string>& participles() {
  static const std::set<std::string> s = {
      "put", "set", "cut", "let", "hit", "hurt", "cost", "spread", "shut", "split",
      "burst", "bought", "brought", "caught", "taught", "thought", "fought",
      "sought", "told", "sold", "held", "kept", "left", "felt", "meant", "sent",
      "spent", "built", "lost", "found", "got", "made", "said", "paid", "laid",
      "heard", "done", "gone", "run", "come", "become", "overcome", "won", "dug",
      "hung", "stuck", "struck", "strung", "swung", "read", "led", "fed", "bled",
      "bred", "met", "lit", "slid", "understood", "stood", "begun", "sung", "drunk",
      "sunk", "worn", "torn", "born", "borne", "sworn", "drawn", "grown", "known",
      "thrown", "shown", "flown", "blown", "shone", "sat", "lain",
      "taken", "given", "seen", "eaten", "written", "driven", "risen", "chosen",
      "broken", "spoken", "frozen", "stolen", "fallen", "forgotten", "gotten",
      "hidden", "bitten", "beaten", "forbidden", "forgiven", "ridden", "shaken",
      "mistaken", "woken", "proven"};
  return s;
}

}  // namespace lex

inline bool is_punct_token(const std::string& tok) {
  return tok.size() >= 1 && !detail::is_word_byte(static_cast<unsigned char>(tok[0]));
}

inline bool starts_with_digit(const std::string& tok) {
  return !tok.empty() && tok[0] >= '0' && tok[0] <= '9';
}

inline bool ends_with(const std::string& s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

/// True when a VERB-tagged word can close a passive group ("was explained").
inline bool is_participle_form(const std::string& word) {
  if (lex::participles().count(word)) return true;
  if (word.size() >= 4 && (ends_with(word, "ed") || ends_with(word, "en"))) return true;
  return false;
}

namespace detail {

enum class Prelim { FIXED, HAVE_DO, TO };

struct PrelimToken {
  Tag tag = Tag::OTHER;
  Prelim kind = Prelim::FIXED;
};

inline PrelimToken prelim_tag(const std::string& word) {
  if (is_punct_token(word)) return {Tag::PUNCT, Prelim::FIXED};
  if (starts_with_digit(word)) return {Tag::OTHER, Prelim::FIXED};
  if (word == "to") return {Tag::PREP, Prelim::TO};
  if (lex::have_do_forms().count(word)) return {Tag::VERB, Prelim::HAVE_DO};
  if (lex::be_forms().count(word)) return {Tag::AUX, Prelim::FIXED};
  if (lex::modals().count(word)) return {Tag::MODAL, Prelim::FIXED};
  if (lex::pronouns().count(word)) return {Tag::PRON, Prelim::FIXED};
  if (lex::determiners().count(word)) return {Tag::DET, Prelim::FIXED};
  if (lex::prepositions().count(word)) return {Tag::PREP, Prelim::FIXED};
  if (lex::adverbs().count(word)) return {Tag::ADV, Prelim::FIXED};
  if (lex::others().count(word)) return {Tag::OTHER, Prelim::FIXED};
  if (lex::nouns().count(word)) return {Tag::NOUN, Prelim::FIXED};
  if (lex::adjectives().count(word)) return {Tag::ADJ, Prelim::FIXED};
  if (lex::verbs().count(word)) return {Tag::VERB, Prelim::FIXED};
  if (lex::participles().count(word)) return {Tag::VERB, Prelim::FIXED};
  // inflection: strip a plural/3sg -s and retry the verb list
  if (word.size() > 2 && word.back() == 's' && lex::verbs().count(word.substr(0, word.size() - 1)))
    return {Tag::VERB, Prelim::FIXED};
  if (ends_with(word, "ly") && word.size() > 3) return {Tag::ADV, Prelim::FIXED};
  if ((ends_with(word, "ing") || ends_with(word, "ed")) && word.size() > 4)
    return {Tag::VERB, Prelim::FIXED};
  if (ends_with(word, "tion") || ends_with(word, "sion") || ends_with(word, "ment") ||
      ends_with(word, "ness") || ends_with(word, "ance") || ends_with(word, "ence") ||
      ends_with(word, "ity"))
    return {Tag::NOUN, Prelim::FIXED};
  if (ends_with(word, "ous") || ends_with(word, "ful") || ends_with(word, "ive") ||
      ends_with(word, "ible") || ends_with(word, "able") || ends_with(word, "ical") ||
      ends_with(word, "ic") || ends_with(word, "al"))
    return {Tag::ADJ, Prelim::FIXED};
  return {Tag::NOUN, Prelim::FIXED};
}

}  // namespace detail

/// Deterministic rule-and-lexicon tagger over the closed coarse tagset.
/// Two context rules resolve right-to-left: "to" is TO before a verbal form
/// and PREP otherwise; have/do forms are AUX before verbal material (verbs,
/// auxiliaries, adverbs, modals, inverted pronouns) and main VERBs otherwise.
inline std::vector<PosToken> pos_tag(std::string_view text) {
  auto words = tokenize(text);
  std::vector<detail::PrelimToken> prelim(words.size());
  for (std::size_t i = 0; i < words.size(); ++i) prelim[i] = detail::prelim_tag(words[i]);

  for (std::size_t ri = words.size(); ri-- > 0;) {
    Tag next = ri + 1 < words.size() ? prelim[ri + 1].tag : Tag::PUNCT;
    if (prelim[ri].kind == detail::Prelim::TO) {
      prelim[ri].tag = (next == Tag::VERB || next == Tag::AUX) ? Tag::TO : Tag::PREP;
    } else if (prelim[ri].kind == detail::Prelim::HAVE_DO) {
      bool verbal = next == Tag::VERB || next == Tag::AUX || next == Tag::ADV ||
                    next == Tag::MODAL || next == Tag::PRON;
      prelim[ri].tag = verbal ? Tag::AUX : Tag::VERB;
    }
  }

  std::vector<PosToken> out;
  out.reserve(words.size());
  for (std::size_t i = 0; i < words.size(); ++i)
    out.push_back({words[i], prelim[i].tag, words[i]});
  return out;
}

}  // namespace cueboot
