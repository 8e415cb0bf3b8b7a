#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <set>

#include "test_support.hpp"
#include "threadlens/classify.hpp"

namespace threadlens {
namespace {

using L = sentiment_label;

double posterior_sum(const sentiment_result& r) {
  double s = 0.0;
  for (auto& [c, p] : r.posterior) s += p;
  return s;
}

// Two-document toy corpus: "good great" positive, "bad awful" negative.
struct toy {
  vocabulary vocab{{"awful", "bad", "good", "great"}, {1, 1, 1, 1}};
  std::vector<count_vector> matrix{{0, 0, 1, 1}, {1, 1, 0, 0}};
  std::vector<L> labels{L::positive, L::negative};
};

TEST(MultinomialNB, AddOneSmoothedLikelihoods) {
  toy t;
  const auto m = train_multinomial_nb(t.matrix, t.labels, t.vocab, 1.0);
  ASSERT_EQ(m.classes, (std::vector<L>{L::negative, L::positive}));
  const std::size_t good = *t.vocab.index_of("good");
  EXPECT_NEAR(std::exp(m.log_likelihood[1][good]), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(std::exp(m.log_likelihood[0][good]), 1.0 / 6.0, 1e-15);
  EXPECT_NEAR(std::exp(m.log_prior[0]), 0.5, 1e-15);
  for (const auto& row : m.log_likelihood) {
    double s = 0.0;
    for (double ll : row) s += std::exp(ll);
    EXPECT_NEAR(s, 1.0, 1e-9);
  }
}

TEST(MultinomialNB, PosteriorForSingleTerm) {
  toy t;
  const auto m = train_multinomial_nb(t.matrix, t.labels, t.vocab, 1.0);
  const auto r = predict_multinomial_nb(m, {0, 0, 1, 0});
  const double expected = (0.5 / 3.0) / (0.5 / 3.0 + 0.5 / 6.0);
  EXPECT_NEAR(expected, 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(r.probability(L::positive), expected, 1e-12);
  EXPECT_EQ(r.label, L::positive);
  EXPECT_NEAR(r.score, r.probability(L::positive) - r.probability(L::negative), 1e-15);
  ASSERT_EQ(r.contributing_terms.size(), 1u);
  EXPECT_EQ(r.contributing_terms[0].term, "good");
  EXPECT_NEAR(r.contributing_terms[0].contribution, std::log(2.0), 1e-12);
}

TEST(MultinomialNB, ZeroVectorGivesPriors) {
  const vocabulary v({"a", "b"}, {1, 1});
  const std::vector<count_vector> x{{1, 0}, {0, 1}, {1, 1}};
  const std::vector<L> y{L::positive, L::negative, L::positive};
  const auto m = train_multinomial_nb(x, y, v);
  const auto r = predict_multinomial_nb(m, {0, 0});
  EXPECT_NEAR(r.probability(L::positive), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(r.probability(L::negative), 1.0 / 3.0, 1e-15);
  EXPECT_TRUE(r.contributing_terms.empty());
}

TEST(MultinomialNB, SingleClassPriorIsOne) {
  const vocabulary v({"a"}, {1});
  const std::vector<count_vector> x{{1}, {2}};
  const std::vector<L> y{L::neutral, L::neutral};
  const auto m = train_multinomial_nb(x, y, v);
  ASSERT_EQ(m.log_prior.size(), 1u);
  EXPECT_EQ(m.log_prior[0], 0.0);
  const auto r = predict_multinomial_nb(m, {3});
  EXPECT_EQ(r.label, L::neutral);
  EXPECT_EQ(r.probability(L::neutral), 1.0);
}

TEST(MultinomialNB, SymmetricTieGoesToLowestCode) {
  const vocabulary v({"a", "b"}, {1, 1});
  const std::vector<count_vector> x{{1, 0}, {0, 1}};
  const std::vector<L> y{L::positive, L::negative};
  const auto m = train_multinomial_nb(x, y, v);
  const auto r = predict_multinomial_nb(m, {1, 1});
  EXPECT_EQ(r.probability(L::positive), r.probability(L::negative));
  EXPECT_EQ(r.label, L::negative);
  const auto r3 = predict_multinomial_nb(
      train_multinomial_nb(std::vector<count_vector>{{1, 0}, {0, 1}}, std::vector<L>{L::positive, L::neutral}, v),
      {0, 0});
  EXPECT_EQ(r3.label, L::neutral);
}

TEST(MultinomialNB, Errors) {
  toy t;
  auto code = [](auto&& f) {
    try {
      f();
    } catch (const error& e) {
      return e.code();
    }
    return errc::bad_request;
  };
  EXPECT_EQ(code([&] { train_multinomial_nb({}, {}, t.vocab); }), errc::empty_training_set);
  EXPECT_EQ(code([&] { train_multinomial_nb(t.matrix, t.labels, t.vocab, 0.0); }), errc::non_positive_alpha);
  EXPECT_EQ(code([&] { train_multinomial_nb(t.matrix, t.labels, t.vocab, -1.0); }), errc::non_positive_alpha);
  EXPECT_EQ(code([&] { train_multinomial_nb(t.matrix, std::vector<L>{L::positive}, t.vocab); }),
            errc::length_mismatch);
  const auto m = train_multinomial_nb(t.matrix, t.labels, t.vocab);
  EXPECT_EQ(code([&] { predict_multinomial_nb(m, {1, 2}); }), errc::dimension_mismatch);
}

// Duplicating every document k times: priors are unchanged, and the
// likelihoods are unchanged exactly when alpha is scaled by k as well
// (counts and totals both scale by k). With alpha held fixed the
// smoothing weight shrinks relative to the counts.
TEST(MultinomialNB, DuplicationInvariance) {
  std::mt19937 rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t vsize = 1 + rng() % 4, n = 1 + rng() % 5, k = 2 + rng() % 3;
    std::vector<std::string> terms;
    for (std::size_t i = 0; i < vsize; ++i) terms.push_back(std::string(1, static_cast<char>('a' + i)));
    const vocabulary v(terms, std::vector<std::size_t>(vsize, 1));
    std::vector<count_vector> x(n, count_vector(vsize));
    std::vector<L> y(n);
    for (std::size_t d = 0; d < n; ++d) {
      for (auto& c : x[d]) c = rng() % 3;
      y[d] = all_labels[rng() % 3];
    }
    std::vector<count_vector> xk;
    std::vector<L> yk;
    for (std::size_t rep = 0; rep < k; ++rep) {
      xk.insert(xk.end(), x.begin(), x.end());
      yk.insert(yk.end(), y.begin(), y.end());
    }
    const double alpha = 0.5 + (rng() % 4) * 0.5;
    const auto base = train_multinomial_nb(x, y, v, alpha);
    const auto fixed_alpha = train_multinomial_nb(xk, yk, v, alpha);
    const auto scaled_alpha = train_multinomial_nb(xk, yk, v, alpha * static_cast<double>(k));
    ASSERT_EQ(base.classes, scaled_alpha.classes);
    for (std::size_t c = 0; c < base.classes.size(); ++c) {
      EXPECT_NEAR(base.log_prior[c], fixed_alpha.log_prior[c], 1e-12);
      EXPECT_NEAR(base.log_prior[c], scaled_alpha.log_prior[c], 1e-12);
      for (std::size_t t = 0; t < vsize; ++t)
        EXPECT_NEAR(base.log_likelihood[c][t], scaled_alpha.log_likelihood[c][t], 1e-12);
    }
  }
}

// Positive rescaling of the unnormalized class scores (a constant shift in
// log space) never changes the label.
TEST(MultinomialNB, ArgmaxInvariantUnderScoreScaling) {
  std::mt19937 rng(12);
  std::uniform_real_distribution<double> u(-5.0, 0.0);
  for (int trial = 0; trial < 500; ++trial) {
    const vocabulary v({"a", "b"}, {1, 1});
    multinomial_nb_model m;
    m.vocab = v;
    m.classes = {L::negative, L::neutral, L::positive};
    m.log_prior = {u(rng), u(rng), u(rng)};
    m.log_likelihood = {{u(rng), u(rng)}, {u(rng), u(rng)}, {u(rng), u(rng)}};
    const count_vector q{static_cast<std::uint32_t>(rng() % 3), static_cast<std::uint32_t>(rng() % 3)};
    const auto before = predict_multinomial_nb(m, q);
    const double shift = std::log(0.01 + (rng() % 1000) / 10.0);
    for (auto& p : m.log_prior) p += shift;
    const auto after = predict_multinomial_nb(m, q);
    EXPECT_EQ(before.label, after.label);
  }
}

TEST(Posterior, NormalizedOnRandomModels) {
  std::mt19937 rng(21);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t vsize = 1 + rng() % 6, n = 1 + rng() % 8;
    std::vector<std::string> terms;
    for (std::size_t i = 0; i < vsize; ++i) terms.push_back("t" + std::string(1, static_cast<char>('a' + i)));
    const vocabulary v(terms, std::vector<std::size_t>(vsize, 1));
    std::vector<count_vector> x(n, count_vector(vsize));
    std::vector<L> y(n);
    for (std::size_t d = 0; d < n; ++d) {
      for (auto& c : x[d]) c = rng() % 5;
      y[d] = all_labels[rng() % 3];
    }
    count_vector q(vsize);
    for (auto& c : q) c = rng() % 40;
    for (const classifier_model& m :
         {classifier_model(train_multinomial_nb(x, y, v, 0.1 + (rng() % 20) / 10.0)),
          classifier_model(train_gaussian_nb(x, y, v))}) {
      const auto r = predict(m, q);
      EXPECT_NEAR(posterior_sum(r), 1.0, 1e-9);
      EXPECT_GE(r.score, -1.0);
      EXPECT_LE(r.score, 1.0);
      for (auto& [c, p] : r.posterior) EXPECT_LE(p, r.probability(r.label));
      for (std::size_t i = 1; i < r.contributing_terms.size(); ++i)
        EXPECT_GE(std::abs(r.contributing_terms[i - 1].contribution), std::abs(r.contributing_terms[i].contribution));
    }
  }
}

TEST(GaussianNB, MomentsAndEpsilon) {
  const vocabulary v({"f1", "f2"}, {1, 1});
  const std::vector<count_vector> x{{0, 2}, {0, 0}, {3, 1}};
  const std::vector<L> y{L::positive, L::positive, L::negative};
  const auto m = train_gaussian_nb(x, y, v);
  // Overall population variances: f1 = 2, f2 = 2/3; epsilon = 1e-9 * 2.
  EXPECT_DOUBLE_EQ(m.epsilon, 2e-9);
  const std::size_t pos = 1, neg = 0;
  EXPECT_DOUBLE_EQ(m.mean[pos][1], 1.0);
  EXPECT_DOUBLE_EQ(m.variance[pos][1], 1.0 + m.epsilon);
  EXPECT_DOUBLE_EQ(m.variance[pos][0], m.epsilon);
  EXPECT_DOUBLE_EQ(m.variance[neg][0], m.epsilon);
  EXPECT_DOUBLE_EQ(m.mean[neg][0], 3.0);
  for (const auto& row : m.variance)
    for (double s : row) EXPECT_GT(s, 0.0);
}

TEST(GaussianNB, ConstantFeatureUsesUnitEpsilonScale) {
  const vocabulary v({"a"}, {1});
  const std::vector<count_vector> x{{1}, {1}};
  const std::vector<L> y{L::positive, L::negative};
  const auto m = train_gaussian_nb(x, y, v);
  EXPECT_DOUBLE_EQ(m.epsilon, 1e-9);
  EXPECT_DOUBLE_EQ(m.variance[0][0], 1e-9);
  const auto r = predict_gaussian_nb(m, {1});
  EXPECT_NEAR(posterior_sum(r), 1.0, 1e-12);
  EXPECT_EQ(r.label, L::negative);
}

TEST(GaussianNB, TrainingVectorPredictsOwnClass) {
  const vocabulary v({"a", "b", "c"}, {1, 1, 1});
  const std::vector<count_vector> x{{2, 0, 1}, {0, 1, 0}, {1, 1, 3}};
  const std::vector<L> y{L::positive, L::negative, L::neutral};
  const auto m = train_gaussian_nb(x, y, v);
  for (std::size_t d = 0; d < x.size(); ++d) EXPECT_EQ(predict_gaussian_nb(m, x[d]).label, y[d]);
}

TEST(GaussianNB, EquidistantQueryTiesToLowerCode) {
  // Means 1 and 5, both with variance 1; the query sits halfway.
  const vocabulary v({"a"}, {1});
  const std::vector<count_vector> xs{{0}, {2}, {4}, {6}};
  const std::vector<L> ys{L::positive, L::positive, L::neutral, L::neutral};
  const auto m = train_gaussian_nb(xs, ys, v);
  const auto r = predict_gaussian_nb(m, {3});
  EXPECT_NEAR(r.probability(L::neutral), 0.5, 1e-12);
  EXPECT_EQ(r.label, L::neutral);
}

// Direct evaluation of the Gaussian density, normalized over classes.
TEST(GaussianNB, MatchesDirectDensityEvaluation) {
  const vocabulary v({"a", "b"}, {1, 1});
  const std::vector<count_vector> x{{1, 0}, {3, 2}, {0, 4}};
  const std::vector<L> y{L::positive, L::positive, L::negative};
  const auto m = train_gaussian_nb(x, y, v);
  // positive: means (2, 1), variances (1, 1); negative: mean (0, 4), variances 0.
  // Overall variances: a = 14/9, b = 8/3.
  const double eps = 1e-9 * (8.0 / 3.0);
  EXPECT_NEAR(m.epsilon, eps, 1e-20);
  auto density = [](double xv, double mu, double var) {
    return std::exp(-(xv - mu) * (xv - mu) / (2 * var)) / std::sqrt(2 * std::numbers::pi * var);
  };
  for (const count_vector& q : {count_vector{2, 2}, count_vector{1, 1}, count_vector{3, 0}}) {
    const double jp = (2.0 / 3.0) * density(q[0], 2, 1 + eps) * density(q[1], 1, 1 + eps);
    const double jn = (1.0 / 3.0) * density(q[0], 0, eps) * density(q[1], 4, eps);
    const auto r = predict_gaussian_nb(m, q);
    EXPECT_NEAR(r.probability(L::positive), jp / (jp + jn), 1e-9);
    EXPECT_EQ(r.label, L::positive);
  }
  const auto at_neg = predict_gaussian_nb(m, {0, 4});
  EXPECT_EQ(at_neg.label, L::negative);
}

// Priors, means and population variances do not change when every
// document is repeated.
TEST(GaussianNB, DuplicationInvariance) {
  const vocabulary v({"a", "b"}, {1, 1});
  const std::vector<count_vector> x{{1, 0}, {3, 2}, {0, 4}};
  const std::vector<L> y{L::positive, L::positive, L::negative};
  auto x2 = x;
  x2.insert(x2.end(), x.begin(), x.end());
  auto y2 = y;
  y2.insert(y2.end(), y.begin(), y.end());
  const auto a = train_gaussian_nb(x, y, v), b = train_gaussian_nb(x2, y2, v);
  EXPECT_NEAR(a.epsilon, b.epsilon, 1e-24);
  for (std::size_t c = 0; c < 2; ++c) {
    EXPECT_NEAR(a.log_prior[c], b.log_prior[c], 1e-15);
    for (std::size_t t = 0; t < 2; ++t) {
      EXPECT_NEAR(a.mean[c][t], b.mean[c][t], 1e-15);
      EXPECT_NEAR(a.variance[c][t], b.variance[c][t], 1e-15);
    }
  }
}

TEST(ClassifierModel, VariantAccessors) {
  toy t;
  const classifier_model m = train_gaussian_nb(t.matrix, t.labels, t.vocab);
  EXPECT_EQ(kind_of(m), classifier_kind::gaussian);
  EXPECT_EQ(vocab_of(m).size(), 4u);
  EXPECT_EQ(classes_of(m).size(), 2u);
  EXPECT_EQ(parse_classifier_kind("mnb"), classifier_kind::multinomial);
  EXPECT_EQ(parse_classifier_kind("gnb"), classifier_kind::gaussian);
  EXPECT_EQ(parse_classifier_kind("svm"), std::nullopt);
  EXPECT_EQ(to_string(classifier_kind::gaussian), "gnb");
}

// Lexicon

TEST(Lexicon, MeanOfMatchedWeights) {
  const lexicon lex{{"good", 0.8}, {"awful", -0.8}, {"great", 0.9}};
  const auto cancel = lexicon_score(processed_doc{{"good", "awful"}}, lex);
  EXPECT_DOUBLE_EQ(cancel.score, 0.0);
  EXPECT_EQ(cancel.label, L::neutral);
  const auto empty = lexicon_score(processed_doc{}, lex);
  EXPECT_EQ(empty.score, 0.0);
  EXPECT_EQ(empty.label, L::neutral);
  const auto pos = lexicon_score(processed_doc{{"good", "thread", "great"}}, lex);
  EXPECT_NEAR(pos.score, 0.85, 1e-15);
  EXPECT_EQ(pos.label, L::positive);
  EXPECT_TRUE(pos.posterior.empty());
  ASSERT_EQ(pos.contributing_terms.size(), 2u);
  EXPECT_EQ(pos.contributing_terms[0], (term_contribution{"great", 0.9}));
  EXPECT_EQ(pos.contributing_terms[1], (term_contribution{"good", 0.8}));
}

TEST(Lexicon, RejectsOutOfRangeWeights) {
  lexicon lex;
  EXPECT_THROW(lex.set("x", 1.5), error);
  EXPECT_THROW(lex.set("x", std::nan("")), error);
  lex.set("x", -1.0);
  EXPECT_EQ(*lex.find("x"), -1.0);
}

TEST(Lexicon, PermutationInvariantAndBounded) {
  std::mt19937 rng(31);
  const auto& lex = lexicon::english();
  std::vector<std::string> pool;
  for (auto& [t, w] : lex.weights()) pool.push_back(t);
  pool.push_back("thread");
  pool.push_back("fabric");
  for (int trial = 0; trial < 1000; ++trial) {
    processed_doc d;
    for (std::size_t i = 0, n = rng() % 12; i < n; ++i) d.tokens.push_back(pool[rng() % pool.size()]);
    const auto r = lexicon_score(d, lex);
    EXPECT_GE(r.score, -1.0);
    EXPECT_LE(r.score, 1.0);
    auto shuffled = d;
    std::shuffle(shuffled.tokens.begin(), shuffled.tokens.end(), rng);
    EXPECT_EQ(lexicon_score(shuffled, lex), r);
  }
}

TEST(Lexicon, ShippedFileMatchesBuiltIn) {
  const auto file = lexicon::load(testing::data_path("lexicon_en.tsv"));
  EXPECT_EQ(file.weights(), lexicon::english().weights());
  EXPECT_GE(file.size(), 30u);
  // Keys are matched against stemmed tokens, so each must be the stem of a
  // plain English word.
  const std::vector<std::string> words{
      "amazing", "awful",    "bad",       "beautiful",  "best",     "broken",   "cheap",     "comfortable",
      "disappointed", "durable", "excellent", "fast",  "flimsy",   "fray",     "good",      "great",
      "happy",   "hate",     "horrible",  "love",       "nice",     "perfect",  "please",    "poor",
      "quality", "recommend", "return",   "rough",      "satisfied", "slow",    "smooth",    "snapped",
      "soft",    "strong",   "tangled",   "terrible",   "useless",  "waste",    "weak",      "worst"};
  std::set<std::string> reachable;
  for (const auto& w : words) reachable.insert(stem(w));
  for (auto& [t, w] : file.weights()) {
    EXPECT_TRUE(reachable.count(t)) << t;
    EXPECT_GE(w, -1.0);
    EXPECT_LE(w, 1.0);
  }
}

TEST(Lexicon, LoadErrors) {
  testing::temp_dir dir;
  testing::write_file(dir / "bad.tsv", "good\t2.0\n");
  EXPECT_THROW(lexicon::load((dir / "bad.tsv").string()), error);
  testing::write_file(dir / "notab.tsv", "good 0.5\n");
  EXPECT_THROW(lexicon::load((dir / "notab.tsv").string()), error);
  EXPECT_THROW(lexicon::load((dir / "none.tsv").string()), error);
}

// Score maps

TEST(ScoreToLabel, Thresholds) {
  EXPECT_EQ(score_to_label(0.0), L::neutral);
  EXPECT_EQ(score_to_label(0.06), L::positive);
  EXPECT_EQ(score_to_label(-1.0), L::negative);
  EXPECT_EQ(score_to_label(0.05), L::neutral);
  EXPECT_EQ(score_to_label(-0.05), L::neutral);
  EXPECT_EQ(score_to_label(std::nextafter(0.05, 1.0)), L::positive);
  EXPECT_EQ(score_to_label(std::nextafter(-0.05, -1.0)), L::negative);
  EXPECT_EQ(score_to_label(0.2, {0.25}), L::neutral);
  EXPECT_THROW(score_to_label(1.0001), error);
  EXPECT_THROW(score_to_label(std::nan("")), error);
}

// Each score in [-1, 1] falls in exactly one band, and the bands are
// ordered negative < neutral < positive along the line.
TEST(ScoreToLabel, PartitionsInterval) {
  std::vector<L> seen;
  for (int i = -100000; i <= 100000; ++i) {
    const double s = i / 100000.0;
    const L l = score_to_label(s);
    const int expected = s > 0.05 ? 2 : (s < -0.05 ? 0 : 1);
    ASSERT_EQ(code(l), expected) << s;
    if (seen.empty() || seen.back() != l) seen.push_back(l);
  }
  EXPECT_EQ(seen, (std::vector<L>{L::negative, L::neutral, L::positive}));
}

TEST(ScoreToFivePoint, AffineMap) {
  EXPECT_EQ(score_to_five_point(0.0), 3);
  EXPECT_EQ(score_to_five_point(1.0), 5);
  EXPECT_EQ(score_to_five_point(-1.0), 1);
  EXPECT_EQ(score_to_five_point(0.3), 4);
  EXPECT_EQ(score_to_five_point(-0.3), 2);
  EXPECT_EQ(score_to_five_point(0.2), 3);
  EXPECT_THROW(score_to_five_point(-2.0), error);
}

TEST(Labels, CodesAndParsing) {
  EXPECT_EQ(code(L::negative), 0);
  EXPECT_EQ(code(L::neutral), 1);
  EXPECT_EQ(code(L::positive), 2);
  EXPECT_EQ(to_string(L::positive), "positive");
  EXPECT_EQ(parse_label("NEG"), L::negative);
  EXPECT_EQ(parse_label("2"), L::positive);
  EXPECT_EQ(parse_label("meh"), std::nullopt);
  EXPECT_EQ(label_from_code(1), L::neutral);
  EXPECT_EQ(label_from_code(3), std::nullopt);
}

}  // namespace
}  // namespace threadlens
