#include <gtest/gtest.h>

#include <sstream>

#include "test_support.hpp"
#include "threadlens/model_io.hpp"
#include "threadlens/store.hpp"

namespace threadlens {
namespace {

using L = sentiment_label;

struct fixture {
  vocabulary vocab{{"awful", "bad", "good", "great"}, {1, 2, 1, 3}};
  std::vector<count_vector> matrix{{0, 0, 1, 1}, {1, 1, 0, 0}, {0, 1, 0, 2}};
  std::vector<L> labels{L::positive, L::negative, L::neutral};
};

void expect_same_predictions(const classifier_model& a, const classifier_model& b) {
  for (const count_vector& q : {count_vector{0, 0, 0, 0}, count_vector{1, 0, 2, 0}, count_vector{0, 3, 1, 1}})
    EXPECT_EQ(predict(a, q), predict(b, q));
}

TEST(ModelIo, MultinomialRoundTripIsExact) {
  fixture f;
  const classifier_model m = train_multinomial_nb(f.matrix, f.labels, f.vocab, 0.3);
  testing::temp_dir dir;
  save_model(m, dir / "model");
  ASSERT_TRUE(model_exists(dir / "model"));
  const auto back = load_model(dir / "model");
  const auto& a = std::get<multinomial_nb_model>(m);
  const auto& b = std::get<multinomial_nb_model>(back);
  EXPECT_EQ(a.classes, b.classes);
  EXPECT_EQ(a.log_prior, b.log_prior);
  EXPECT_EQ(a.log_likelihood, b.log_likelihood);
  EXPECT_EQ(a.alpha, b.alpha);
  EXPECT_EQ(a.vocab.terms(), b.vocab.terms());
  expect_same_predictions(m, back);
  EXPECT_EQ(testing::read_file(dir / "model" / "vocabulary.tsv"), "awful\t1\nbad\t2\ngood\t1\ngreat\t3\n");
  EXPECT_EQ(testing::read_file(dir / "model" / "model.tsv").rfind("threadlens-model v1\nclassifier\tmnb\nalpha\t0.3\n", 0),
            0u);
}

TEST(ModelIo, GaussianRoundTripIsExact) {
  fixture f;
  const classifier_model m = train_gaussian_nb(f.matrix, f.labels, f.vocab);
  std::stringstream params;
  write_model_params(m, params);
  const auto back = read_model_params(params, f.vocab);
  const auto& a = std::get<gaussian_nb_model>(m);
  const auto& b = std::get<gaussian_nb_model>(back);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.variance, b.variance);
  EXPECT_EQ(a.epsilon, b.epsilon);
  expect_same_predictions(m, back);
}

TEST(ModelIo, IdenticalModelsGiveIdenticalBytes) {
  fixture f;
  std::stringstream a, b;
  write_model_params(train_multinomial_nb(f.matrix, f.labels, f.vocab), a);
  write_model_params(train_multinomial_nb(f.matrix, f.labels, f.vocab), b);
  EXPECT_EQ(a.str(), b.str());
}

TEST(ModelIo, RejectsCorruptFiles) {
  fixture f;
  std::stringstream good;
  write_model_params(train_multinomial_nb(f.matrix, f.labels, f.vocab), good);
  const std::string text = good.str();
  auto reject = [&](const std::string& s, const vocabulary& v) {
    std::istringstream in(s);
    try {
      read_model_params(in, v);
    } catch (const error& e) {
      return e.code() == errc::bad_model_file;
    }
    return false;
  };
  EXPECT_TRUE(reject("threadlens-model v2\n", f.vocab));
  EXPECT_TRUE(reject(text.substr(0, text.size() / 2), f.vocab));
  EXPECT_TRUE(reject(text, vocabulary({"a"}, {1})));
  std::string bad_prior = text;
  bad_prior.replace(bad_prior.find("class\tnegative\t") + 15, 1, "-5");
  EXPECT_TRUE(reject(bad_prior, f.vocab));
  std::string swapped = text;
  swapped.replace(swapped.find("class\tnegative"), 14, "class\tpositive");
  EXPECT_TRUE(reject(swapped, f.vocab));
  testing::temp_dir dir;
  EXPECT_FALSE(model_exists(dir.path()));
  EXPECT_THROW(load_model(dir.path()), error);
}

// jsonl logs and the store

TEST(JsonlLog, SkipsTornTailAndRepairsIt) {
  testing::temp_dir dir;
  const auto path = dir / "log.jsonl";
  testing::write_file(path, "{\"a\":1}\n{\"a\":2}\n{\"a\":");
  jsonl_log log(path);
  std::vector<int> seen;
  EXPECT_EQ(log.replay([&](const json& j) { seen.push_back(j["a"].get<int>()); }), 2u);
  EXPECT_EQ(seen, (std::vector<int>{1, 2}));
  log.repair();
  log.append({json{{"a", 3}}});
  seen.clear();
  log.replay([&](const json& j) { seen.push_back(j["a"].get<int>()); });
  EXPECT_EQ(seen, (std::vector<int>{1, 2, 3}));
}

TEST(JsonlLog, CorruptMiddleLineIsAnError) {
  testing::temp_dir dir;
  testing::write_file(dir / "log.jsonl", "{\"a\":1}\nnot json\n{\"a\":2}\n");
  jsonl_log log(dir / "log.jsonl");
  try {
    log.replay([](const json&) {});
    FAIL();
  } catch (const error& e) {
    EXPECT_EQ(e.code(), errc::corrupt_store);
  }
}

analyzed_review sample(const std::string& id, L label) {
  analyzed_review a;
  a.record.id = id;
  a.record.text = "text " + id + ", with \"quotes\"\nand lines";
  a.record.source = "src";
  a.record.time = *parse_iso8601("2024-05-06T07:08:09Z");
  a.record.rating = 4;
  a.result.label = label;
  a.result.score = 0.1234567890123;
  a.result.posterior = {{L::negative, 0.25}, {L::positive, 0.75}};
  a.result.contributing_terms = {{"good", 0.5}, {"bad", -0.25}};
  a.analyzed_at = *parse_iso8601("2024-05-06T08:00:00Z");
  return a;
}

TEST(Store, PersistsAcrossReopen) {
  testing::temp_dir dir;
  {
    store s(dir.path());
    EXPECT_TRUE(s.reviews().empty());
    s.append_reviews({sample("a", L::positive).record, sample("b", L::negative).record});
    s.append_analyzed({sample("a", L::positive)});
  }
  store s(dir.path());
  ASSERT_EQ(s.reviews().size(), 2u);
  EXPECT_EQ(s.reviews().records[1], sample("b", L::negative).record);
  ASSERT_EQ(s.analyzed().size(), 1u);
  EXPECT_EQ(s.analyzed()[0], sample("a", L::positive));
}

TEST(Store, ModelSwapAndRecovery) {
  testing::temp_dir dir;
  fixture f;
  const classifier_model m1 = train_multinomial_nb(f.matrix, f.labels, f.vocab, 1.0);
  const classifier_model m2 = train_multinomial_nb(f.matrix, f.labels, f.vocab, 2.0);
  store s(dir.path());
  EXPECT_FALSE(s.load_model());
  EXPECT_FALSE(s.load_report());
  s.save_model(m1, json{{"n", 1}});
  s.save_model(m2, json{{"n", 2}});
  EXPECT_EQ(std::get<multinomial_nb_model>(*s.load_model()).alpha, 2.0);
  EXPECT_EQ((*s.load_report())["n"], 2);
  EXPECT_FALSE(fs::exists(dir / "model.staging"));
  EXPECT_FALSE(fs::exists(dir / "model.old"));

  // Interrupted between moving the old model away and promoting the new one.
  fs::rename(dir / "model", dir / "model.staging");
  EXPECT_EQ(std::get<multinomial_nb_model>(*store(dir.path()).load_model()).alpha, 2.0);
  EXPECT_TRUE(model_exists(dir / "model"));
}

}  // namespace
}  // namespace threadlens
