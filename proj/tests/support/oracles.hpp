#pragma once

// Independent re-derivations used to cross-check library output. These are
// written against the textbook definitions, deliberately not sharing code
// with the implementations they check.

#include <cstddef>
#include <vector>

#include <cueboot/corpus.hpp>
#include <cueboot/text.hpp>

namespace cueboot::test {

/// Chi-squared via observed/expected cells: sum over the 2x2 presence table
/// of (O - E)^2 / E, with E from row/column marginals. Zero when any marginal
/// is zero (the statistic is undefined there; the library pins it to 0).
inline double chi2_oracle(const Ngram& gram, const std::vector<LabeledUtterance>& labeled) {
  double cells[2][2] = {{0, 0}, {0, 0}};  // [class?][with?]
  for (const auto& lu : labeled) {
    auto tokens = tokenize(lu.utterance.response_text);
    bool with = false;
    const std::size_t g = gram.tokens.size();
    for (std::size_t i = 0; !with && g > 0 && i + g <= tokens.size(); ++i) {
      bool hit = true;
      for (std::size_t j = 0; j < g; ++j)
        if (tokens[i + j] != gram.tokens[j]) {
          hit = false;
          break;
        }
      with = hit;
    }
    cells[lu.class_label == Label::CLASS ? 0 : 1][with ? 1 : 0] += 1.0;
  }
  double row[2] = {cells[0][0] + cells[0][1], cells[1][0] + cells[1][1]};
  double col[2] = {cells[0][0] + cells[1][0], cells[0][1] + cells[1][1]};
  double total = row[0] + row[1];
  if (row[0] == 0 || row[1] == 0 || col[0] == 0 || col[1] == 0) return 0.0;
  double stat = 0.0;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) {
      double expected = row[r] * col[c] / total;
      double diff = cells[r][c] - expected;
      stat += diff * diff / expected;
    }
  return stat;
}

/// Precision/recall/F1 recomputed from scratch off a confusion count.
struct PrfOracle {
  double precision = 0.0, recall = 0.0, f1 = 0.0;
};

inline PrfOracle prf_oracle(std::size_t tp, std::size_t fp, std::size_t fn) {
  PrfOracle o;
  if (tp + fp > 0) o.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  if (tp + fn > 0) o.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  if (o.precision + o.recall > 0)
    o.f1 = 2 * o.precision * o.recall / (o.precision + o.recall);
  return o;
}

}  // namespace cueboot::test
