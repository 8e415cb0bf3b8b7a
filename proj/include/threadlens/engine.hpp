#pragma once

#include <cstdint>
#include <functional>
#include <istream>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "threadlens/classify.hpp"
#include "threadlens/corpus.hpp"
#include "threadlens/dashboard.hpp"
#include "threadlens/error.hpp"
#include "threadlens/evaluate.hpp"
#include "threadlens/features.hpp"
#include "threadlens/json_io.hpp"
#include "threadlens/store.hpp"
#include "threadlens/textprep.hpp"

// Application core shared by the CLI and the HTTP service: ingestion into
// the store, analysis, training with holdout evaluation, and the active
// model.

namespace threadlens {

enum class analysis_method { automatic, model, lexicon, none };

inline std::optional<analysis_method> parse_analysis_method(std::string_view s) {
  if (s == "auto") return analysis_method::automatic;
  if (s == "model") return analysis_method::model;
  if (s == "lexicon") return analysis_method::lexicon;
  if (s == "none") return analysis_method::none;
  return std::nullopt;
}

struct analysis_options {
  stopword_list stopwords = stopword_list::english();
  lexicon lex = lexicon::english();
  label_thresholds thresholds;
};

/// Blank text yields a neutral result with score 0 whatever the method.
/// `model` may be null only for the lexicon method.
inline sentiment_result analyze_text(std::string_view text, analysis_method method, const classifier_model* model,
                                     const analysis_options& opts) {
  if (method == analysis_method::automatic) method = model ? analysis_method::model : analysis_method::lexicon;
  if (method == analysis_method::model && !model) throw error(errc::no_active_model, "no trained model is active");
  if (detail::blank(std::string(text))) return {};
  const processed_doc doc = preprocess(text, opts.stopwords);
  if (method == analysis_method::model) return predict(*model, doc);
  return lexicon_score(doc, opts.lex, opts.thresholds);
}

struct train_params {
  classifier_kind kind = classifier_kind::multinomial;
  double alpha = 1.0;
  double test_fraction = 0.2;
  std::uint64_t seed = 42;
};

struct training_outcome {
  classifier_model model;
  classification_report<sentiment_label> report;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
};

/// Uses records with an explicit label or a rating. Needs at least two
/// such records spanning two classes.
inline training_outcome train_on_corpus(const corpus& all, const train_params& params,
                                        const stopword_list& stopwords = stopword_list::english()) {
  corpus labeled;
  std::set<sentiment_label> classes;
  for (const auto& r : all.records)
    if (auto l = training_label(r)) {
      labeled.records.push_back(r);
      classes.insert(*l);
    }
  if (labeled.size() < 2 || classes.size() < 2)
    throw error(errc::insufficient_labeled_data, "training needs >= 2 labeled reviews spanning >= 2 classes (have " +
                                                     std::to_string(labeled.size()) + " in " +
                                                     std::to_string(classes.size()) + " classes)");
  if (!(params.alpha > 0.0)) throw error(errc::non_positive_alpha, "alpha must be > 0");

  auto [train, test] = holdout_split(labeled, params.test_fraction, params.seed);

  std::vector<processed_doc> train_docs;
  std::vector<sentiment_label> train_labels;
  for (const auto& r : train.records) {
    train_docs.push_back(preprocess(r.text, stopwords));
    train_labels.push_back(*training_label(r));
  }
  const vocabulary vocab = build_vocabulary(train_docs);
  std::vector<count_vector> matrix;
  matrix.reserve(train_docs.size());
  for (const auto& d : train_docs) matrix.push_back(vectorize(d, vocab));

  training_outcome out{params.kind == classifier_kind::multinomial
                           ? classifier_model(train_multinomial_nb(matrix, train_labels, vocab, params.alpha))
                           : classifier_model(train_gaussian_nb(matrix, train_labels, vocab)),
                       {}, train.size(), test.size()};

  std::vector<sentiment_label> y_true, y_pred;
  for (const auto& r : test.records) {
    y_true.push_back(*training_label(r));
    y_pred.push_back(predict(out.model, preprocess(r.text, stopwords)).label);
  }
  out.report = make_classification_report<sentiment_label>(y_true, y_pred);
  return out;
}

struct ingest_outcome {
  ingest_report report;
  std::size_t analyzed = 0;
};

/// Thread-safe facade over a store. Readers (analysis, queries) run
/// concurrently; ingestion and training serialize on a writer mutex. The
/// active model is an immutable shared object swapped in one step, so each
/// analysis sees exactly one model.
class engine {
 public:
  using clock_fn = std::function<timestamp()>;

  engine(fs::path data_dir, analysis_options opts = {}, clock_fn clock = now_utc)
      : store_(std::move(data_dir)), opts_(std::move(opts)), clock_(std::move(clock)) {
    if (auto m = store_.load_model()) model_ = std::make_shared<const classifier_model>(std::move(*m));
    last_report_ = store_.load_report();
  }

  const analysis_options& options() const { return opts_; }
  timestamp now() const { return clock_(); }

  std::shared_ptr<const classifier_model> model() const {
    std::lock_guard lock(model_mutex_);
    return model_;
  }

  std::optional<json> last_report() const {
    std::shared_lock lock(state_mutex_);
    return last_report_;
  }

  corpus reviews() const {
    std::shared_lock lock(state_mutex_);
    return store_.reviews();
  }

  std::vector<analyzed_review> analyzed() const {
    std::shared_lock lock(state_mutex_);
    return store_.analyzed();
  }

  /// Parses and cleans the CSV, drops rows that duplicate reviews already
  /// in the store (same dedup key or id), appends the rest and analyzes
  /// them with `method` unless it is `none`.
  ingest_outcome ingest(std::istream& csv_in, analysis_method method = analysis_method::automatic,
                        csv_schema schema = {}, std::string provenance = "upload") {
    std::lock_guard writer(writer_mutex_);
    const timestamp now = clock_();
    ingest_options io;
    io.schema = std::move(schema);
    io.now = now;
    io.stopwords = &opts_.stopwords;
    {
      std::shared_lock lock(state_mutex_);
      io.id_offset = store_.reviews().size();
    }
    auto [parsed, rep] = ingest_csv(csv_in, io, std::move(provenance));

    std::vector<review_record> fresh;
    {
      std::shared_lock lock(state_mutex_);
      std::set<std::pair<std::string, std::string>> keys;
      std::unordered_set<std::string> ids;
      for (const auto& r : store_.reviews().records) {
        keys.insert(dedup_key(r, opts_.stopwords));
        ids.insert(r.id);
      }
      for (auto& r : parsed.records) {
        if (ids.count(r.id) || !keys.insert(dedup_key(r, opts_.stopwords)).second) {
          ++rep.duplicates_removed;
          continue;
        }
        ids.insert(r.id);
        fresh.push_back(std::move(r));
      }
    }
    rep.rows_kept = fresh.size();

    std::vector<analyzed_review> results;
    if (method != analysis_method::none) {
      const auto m = model();
      for (const auto& r : fresh) results.push_back({r, analyze_text(r.text, method, m.get(), opts_), now});
    }
    std::unique_lock lock(state_mutex_);
    store_.append_reviews(fresh);
    store_.append_analyzed(results);
    return {rep, results.size()};
  }

  /// Analyzes ad-hoc text and records it in the analyzed store.
  analyzed_review analyze(std::string text, analysis_method method, std::string source = "api") {
    const auto m = model();
    analyzed_review a;
    a.result = analyze_text(text, method, m.get(), opts_);
    a.analyzed_at = clock_();
    a.record.text = std::move(text);
    a.record.source = std::move(source);
    a.record.time = a.analyzed_at;
    std::unique_lock lock(state_mutex_);
    a.record.id = "analysis-" + std::to_string(store_.analyzed().size() + 1);
    store_.append_analyzed({a});
    return a;
  }

  /// Trains on the labeled part of the store, evaluates on the holdout,
  /// persists the artifact and swaps it in.
  json train(const train_params& params) {
    std::lock_guard writer(writer_mutex_);
    const corpus snapshot = reviews();
    training_outcome out = train_on_corpus(snapshot, params, opts_.stopwords);
    json report = to_json(out.report);
    report["classifier"] = to_string(params.kind);
    report["train_size"] = out.train_size;
    report["test_size"] = out.test_size;
    store_.save_model(out.model, report);
    auto fresh = std::make_shared<const classifier_model>(std::move(out.model));
    {
      std::lock_guard lock(model_mutex_);
      model_ = std::move(fresh);
    }
    std::unique_lock lock(state_mutex_);
    last_report_ = report;
    return report;
  }

 private:
  store store_;
  analysis_options opts_;
  clock_fn clock_;

  mutable std::shared_mutex state_mutex_;
  std::mutex writer_mutex_;
  mutable std::mutex model_mutex_;
  std::shared_ptr<const classifier_model> model_;
  std::optional<json> last_report_;
};

}  // namespace threadlens
