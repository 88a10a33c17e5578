#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace cueboot {

/// An n-gram of 1..3 normalized tokens.
struct Ngram {
  std::vector<std::string> tokens;

  bool operator==(const Ngram& o) const { return tokens == o.tokens; }
  bool operator<(const Ngram& o) const { return tokens < o.tokens; }

  std::size_t size() const { return tokens.size(); }

  /// Tokens joined by single spaces, the form used in TSV output.
  std::string joined() const {
    std::string s;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (i) s += ' ';
      s += tokens[i];
    }
    return s;
  }
};

namespace detail {

inline bool is_word_byte(unsigned char c) {
  // Bytes >= 0x80 are UTF-8 continuation/lead bytes; keep them inside words
  // so multi-byte sequences are never split.
  return std::isalnum(c) || c >= 0x80;
}

}  // namespace detail

/// Canonical tokenizer: lowercased, punctuation split into standalone tokens,
/// whitespace collapsed. Apostrophes flanked by word characters stay inside
/// the token ("don't" is one token), so contractions survive as unigrams.
inline std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) {
      out.push_back(cur);
      cur.clear();
    }
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    unsigned char c = static_cast<unsigned char>(text[i]);
    if (std::isspace(c)) {
      flush();
    } else if (detail::is_word_byte(c)) {
      cur += static_cast<char>(std::tolower(c));
    } else if (c == '\'' && !cur.empty() && i + 1 < text.size() &&
               detail::is_word_byte(static_cast<unsigned char>(text[i + 1]))) {
      cur += '\'';
    } else {
      flush();
      out.push_back(std::string(1, static_cast<char>(c)));
    }
  }
  flush();
  return out;
}

/// All contiguous n-grams for n = 1..n_max, in reading order (a multiset:
/// repeated n-grams appear repeatedly).
inline std::vector<Ngram> extract_ngrams(const std::vector<std::string>& tokens,
                                         int n_max = 3) {
  std::vector<Ngram> out;
  for (int n = 1; n <= n_max; ++n) {
    if (tokens.size() < static_cast<std::size_t>(n)) break;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
      Ngram g;
      g.tokens.assign(tokens.begin() + i, tokens.begin() + i + n);
      out.push_back(std::move(g));
    }
  }
  return out;
}

/// Start offsets of every occurrence of `gram` as a contiguous token run.
inline std::vector<std::size_t> find_ngram(const std::vector<std::string>& tokens,
                                           const Ngram& gram) {
  std::vector<std::size_t> hits;
  if (gram.tokens.empty() || tokens.size() < gram.tokens.size()) return hits;
  for (std::size_t i = 0; i + gram.tokens.size() <= tokens.size(); ++i) {
    if (std::equal(gram.tokens.begin(), gram.tokens.end(), tokens.begin() + i))
      hits.push_back(i);
  }
  return hits;
}

inline bool contains_ngram(const std::vector<std::string>& tokens, const Ngram& gram) {
  if (gram.tokens.empty() || tokens.size() < gram.tokens.size()) return false;
  for (std::size_t i = 0; i + gram.tokens.size() <= tokens.size(); ++i) {
    if (std::equal(gram.tokens.begin(), gram.tokens.end(), tokens.begin() + i))
      return true;
  }
  return false;
}

}  // namespace cueboot
