#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include <cueboot/indicators.hpp>
#include <cueboot/rng.hpp>
#include "support/helpers.hpp"
#include "support/oracles.hpp"

using namespace cueboot;
using test::chi2_oracle;
using test::expect_error;
using test::lab;
using test::utt;

namespace {

std::vector<LabeledUtterance> hand_corpus() {
  // presence table for "zing": class 2/10, counter 0/10
  std::vector<LabeledUtterance> out;
  for (int i = 0; i < 10; ++i) {
    bool with = i < 2;
    out.push_back(lab("c" + std::to_string(i), with ? "what a zing there" : "plain words here",
                      Label::CLASS));
  }
  for (int i = 0; i < 10; ++i)
    out.push_back(lab("n" + std::to_string(i), "plain words here", Label::COUNTER));
  return out;
}

}  // namespace

TEST(Chi2, HandValue) {
  // N(ad-bc)^2 / ((a+b)(c+d)(a+c)(b+d)) with a=2 b=0 c=8 d=10 is 8000/3600
  EXPECT_NEAR(chi2_score(Ngram{{"zing"}}, hand_corpus()), 20.0 / 9.0, 1e-12);
}

TEST(Chi2, MatchesObservedExpectedOracle) {
  auto corpus = hand_corpus();
  for (const auto& g : {Ngram{{"zing"}}, Ngram{{"plain"}}, Ngram{{"plain", "words"}},
                        Ngram{{"what", "a", "zing"}}})
    EXPECT_NEAR(chi2_score(g, corpus), chi2_oracle(g, corpus), 1e-9) << g.joined();
}

TEST(Chi2, RandomCorporaAgreeWithOracle) {
  std::mt19937_64 rng(99);
  const std::vector<std::string> vocab = {"a", "b", "c", "d", "e", "f"};
  for (int trial = 0; trial < 60; ++trial) {
    std::vector<LabeledUtterance> corpus;
    std::size_t n = 2 + uniform_below(rng, 20);
    for (std::size_t i = 0; i < n; ++i) {
      std::string text;
      std::size_t len = 1 + uniform_below(rng, 6);
      for (std::size_t w = 0; w < len; ++w) {
        if (w) text += ' ';
        text += vocab[uniform_below(rng, vocab.size())];
      }
      corpus.push_back(lab("u" + std::to_string(i), text,
                           uniform_below(rng, 2) ? Label::CLASS : Label::COUNTER));
    }
    for (const auto& w : vocab) {
      Ngram g{{w}};
      EXPECT_NEAR(chi2_score(g, corpus), chi2_oracle(g, corpus), 1e-9);
    }
    Ngram big{{vocab[uniform_below(rng, vocab.size())], vocab[uniform_below(rng, vocab.size())]}};
    EXPECT_NEAR(chi2_score(big, corpus), chi2_oracle(big, corpus), 1e-9);
  }
}

TEST(Chi2, ZeroOnDegenerateMarginals) {
  auto corpus = hand_corpus();
  EXPECT_EQ(chi2_score(Ngram{{"unseen"}}, corpus), 0.0);  // with-column empty
  std::vector<LabeledUtterance> one_class = {lab("a", "x y", Label::CLASS),
                                             lab("b", "x", Label::CLASS)};
  EXPECT_EQ(chi2_score(Ngram{{"x"}}, one_class), 0.0);  // counter row empty
  std::vector<LabeledUtterance> saturated = {lab("a", "x", Label::CLASS),
                                             lab("b", "x", Label::COUNTER)};
  EXPECT_EQ(chi2_score(Ngram{{"x"}}, saturated), 0.0);  // without-column empty
}

TEST(Chi2, EmptyCorpusThrows) {
  expect_error(errc::empty_corpus, [] { chi2_score(Ngram{{"x"}}, {}); });
  expect_error(errc::empty_corpus, [] { select_chi2_indicators({}, 1, 5); });
}

TEST(SelectChi2, RanksAndBreaksTies) {
  // aa+bb always co-occur in class; cc+dd in counter: all four unigrams tie
  // on chi2 and freq, so order falls to the lexicographic tail
  std::vector<LabeledUtterance> corpus;
  for (int i = 0; i < 4; ++i) corpus.push_back(lab("c" + std::to_string(i), "aa bb", Label::CLASS));
  for (int i = 0; i < 4; ++i)
    corpus.push_back(lab("n" + std::to_string(i), "cc dd", Label::COUNTER));
  auto picked = select_chi2_indicators(corpus, 1, 3, 1);
  ASSERT_EQ(picked.size(), 3u);
  EXPECT_EQ(picked[0].ngram.joined(), "aa");
  EXPECT_EQ(picked[1].ngram.joined(), "bb");
  EXPECT_EQ(picked[2].ngram.joined(), "cc");
  EXPECT_DOUBLE_EQ(picked[0].pct_class, 1.0);
  EXPECT_DOUBLE_EQ(picked[2].pct_class, 0.0);
  EXPECT_EQ(picked[0].freq, 4u);
  EXPECT_EQ(picked[0].source, IndicatorSource::CHI2);
  ASSERT_TRUE(picked[0].chi2.has_value());
  EXPECT_NEAR(*picked[0].chi2, 8.0, 1e-12);
  EXPECT_FALSE(picked[0].ia.has_value());
}

TEST(SelectChi2, MinFreqFilters) {
  std::vector<LabeledUtterance> corpus;
  corpus.push_back(lab("c0", "rare", Label::CLASS));
  for (int i = 0; i < 3; ++i)
    corpus.push_back(lab("c" + std::to_string(i + 1), "common", Label::CLASS));
  for (int i = 0; i < 4; ++i)
    corpus.push_back(lab("n" + std::to_string(i), "other", Label::COUNTER));
  auto picked = select_chi2_indicators(corpus, 2, 10, 1);
  for (const auto& ind : picked) EXPECT_NE(ind.ngram.joined(), "rare");
}

TEST(SelectChi2, TopKAppliesPerOrder) {
  std::vector<LabeledUtterance> corpus;
  for (int i = 0; i < 3; ++i)
    corpus.push_back(lab("c" + std::to_string(i), "aa bb cc", Label::CLASS));
  for (int i = 0; i < 3; ++i)
    corpus.push_back(lab("n" + std::to_string(i), "dd ee ff", Label::COUNTER));
  auto picked = select_chi2_indicators(corpus, 1, 2, 3);
  std::size_t by_len[4] = {0, 0, 0, 0};
  for (const auto& ind : picked) by_len[ind.ngram.size()]++;
  EXPECT_EQ(by_len[1], 2u);
  EXPECT_EQ(by_len[2], 2u);
  EXPECT_EQ(by_len[3], 2u);
}

namespace {

IndicatorAnnotation span(std::string id, std::string who, std::size_t start, std::size_t end) {
  IndicatorAnnotation s;
  s.utterance_id = std::move(id);
  s.annotator_id = std::move(who);
  s.start = start;
  s.end = end;
  return s;
}

}  // namespace

TEST(MtAggregate, PooledAgreementHandValue) {
  std::vector<Utterance> utts = {utt("u1", "oh really now"), utt("u2", "oh fine")};
  std::vector<IndicatorAnnotation> spans = {
      span("u1", "A", 0, 9),  // "oh really"
      span("u1", "B", 0, 2),  // "oh"
      span("u2", "A", 0, 2),  // "oh"
  };
  std::map<std::string, std::size_t> declared = {{"u1", 3}, {"u2", 2}};
  auto mined = aggregate_mt_indicators(utts, spans, declared);
  std::map<std::string, Indicator> by_gram;
  for (const auto& ind : mined) by_gram[ind.ngram.joined()] = ind;
  ASSERT_EQ(by_gram.size(), 3u);

  // "oh": u1 2-of-3 selecting, u2 1-of-2; pooled (2+1)/(3+2)
  EXPECT_EQ(by_gram["oh"].freq, 2u);
  ASSERT_TRUE(by_gram["oh"].ia.has_value());
  EXPECT_NEAR(*by_gram["oh"].ia, 3.0 / 5.0, 1e-12);

  EXPECT_EQ(by_gram["really"].freq, 1u);
  EXPECT_NEAR(*by_gram["really"].ia, 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(*by_gram["oh really"].ia, 1.0 / 3.0, 1e-12);

  for (const auto& [_, ind] : by_gram) {
    EXPECT_EQ(ind.source, IndicatorSource::MT);
    EXPECT_DOUBLE_EQ(ind.pct_class, 1.0);  // class-only annotation round
    EXPECT_FALSE(ind.chi2.has_value());
  }
}

TEST(MtAggregate, ExposedCountFloorsAtObservedAnnotators) {
  // two annotators selected spans but only one was declared: denominator 2
  std::vector<Utterance> utts = {utt("u1", "oh my")};
  std::vector<IndicatorAnnotation> spans = {span("u1", "A", 0, 2), span("u1", "B", 0, 2)};
  std::map<std::string, std::size_t> declared = {{"u1", 1}};
  auto mined = aggregate_mt_indicators(utts, spans, declared);
  ASSERT_EQ(mined.size(), 1u);
  EXPECT_NEAR(*mined[0].ia, 1.0, 1e-12);
}

TEST(MtAggregate, SpanSliceThatCutsWordsYieldsNothing) {
  std::vector<Utterance> utts = {utt("u1", "oh really now")};
  std::vector<IndicatorAnnotation> spans = {span("u1", "A", 1, 5)};  // "h rea"
  std::map<std::string, std::size_t> declared = {{"u1", 1}};
  EXPECT_TRUE(aggregate_mt_indicators(utts, spans, declared).empty());
}

TEST(MtAggregate, DanglingReferencesThrow) {
  std::vector<Utterance> utts = {utt("u1", "oh")};
  std::map<std::string, std::size_t> declared = {{"u1", 1}};
  expect_error(errc::dangling_reference, [&] {
    aggregate_mt_indicators(utts, {span("u2", "A", 0, 2)}, declared);
  });
  expect_error(errc::dangling_reference, [&] {
    aggregate_mt_indicators(utts, {span("u1", "A", 0, 2)}, {});
  });
}

TEST(RestatedStats, RecomputedOnNewSet) {
  Indicator ind;
  ind.ngram = Ngram{{"zing"}};
  ind.source = IndicatorSource::MT;
  ind.freq = 99;
  ind.ia = 0.75;
  ind.pct_class = 1.0;
  std::vector<LabeledUtterance> labeled = {
      lab("a", "zing one", Label::CLASS),
      lab("b", "zing two", Label::CLASS),
      lab("c", "zing three", Label::COUNTER),
      lab("d", "none", Label::COUNTER),
  };
  auto restated = indicators_with_stats_from({ind}, labeled);
  ASSERT_EQ(restated.size(), 1u);
  EXPECT_EQ(restated[0].freq, 3u);
  EXPECT_NEAR(restated[0].pct_class, 2.0 / 3.0, 1e-12);
  EXPECT_EQ(*restated[0].ia, 0.75);  // agreement carries over untouched

  auto absent = indicators_with_stats_from({ind}, {lab("x", "nothing", Label::CLASS)});
  EXPECT_EQ(absent[0].freq, 0u);
}

TEST(ItaCurve, PerfectAgreementIsOne) {
  std::vector<Utterance> utts = {utt("u1", "oh really now"), utt("u2", "yeah right ok")};
  std::vector<IndicatorAnnotation> spans;
  for (const auto* who : {"A", "B", "C"}) {
    spans.push_back(span("u1", who, 0, 9));
    spans.push_back(span("u2", who, 0, 10));
  }
  auto curve = ita_curve(spans, utts, {2, 3}, 2, 5);
  ASSERT_EQ(curve.size(), 2u);
  EXPECT_EQ(curve[0].k, 2u);
  EXPECT_NEAR(curve[0].mean_correlation, 1.0, 1e-12);
  EXPECT_NEAR(curve[1].mean_correlation, 1.0, 1e-12);
}

TEST(ItaCurve, DisjointSelectionsAntiCorrelate) {
  // vocab {alpha, alpha beta, beta}; vectors [1,0,0] vs [0,0,1] give r = -1/2
  std::vector<Utterance> utts = {utt("u1", "alpha beta")};
  std::vector<IndicatorAnnotation> spans = {span("u1", "A", 0, 5), span("u1", "B", 6, 10)};
  auto curve = ita_curve(spans, utts, {2}, 3, 11);
  ASSERT_EQ(curve.size(), 1u);
  EXPECT_NEAR(curve[0].mean_correlation, -0.5, 1e-12);
}

TEST(ItaCurve, DeterministicInSeed) {
  std::vector<Utterance> utts = {utt("u1", "a b c d e")};
  std::vector<IndicatorAnnotation> spans = {span("u1", "A", 0, 1), span("u1", "B", 2, 3),
                                            span("u1", "C", 4, 5), span("u1", "D", 0, 3),
                                            span("u1", "E", 2, 5)};
  auto a = ita_curve(spans, utts, {2, 4}, 3, 77);
  auto b = ita_curve(spans, utts, {2, 4}, 3, 77);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    EXPECT_DOUBLE_EQ(a[i].mean_correlation, b[i].mean_correlation);
}

TEST(ItaCurve, ArgumentAndDataErrors) {
  std::vector<Utterance> utts = {utt("u1", "a b")};
  std::vector<IndicatorAnnotation> spans = {span("u1", "A", 0, 1), span("u1", "B", 2, 3)};
  expect_error(errc::invalid_argument, [&] { ita_curve(spans, utts, {1}, 1, 0); });
  expect_error(errc::invalid_argument, [&] { ita_curve(spans, utts, {2}, 0, 0); });
  expect_error(errc::empty_corpus, [&] { ita_curve(spans, {}, {2}, 1, 0); });
  expect_error(errc::insufficient_annotators, [&] { ita_curve(spans, utts, {3}, 1, 0); });
}
