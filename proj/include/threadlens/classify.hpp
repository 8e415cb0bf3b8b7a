#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "threadlens/error.hpp"
#include "threadlens/features.hpp"
#include "threadlens/label.hpp"
#include "threadlens/textprep.hpp"

namespace threadlens {

struct term_contribution {
  std::string term;
  double contribution = 0.0;

  friend bool operator==(const term_contribution&, const term_contribution&) = default;
};

struct sentiment_result {
  sentiment_label label = sentiment_label::neutral;
  double score = 0.0;
  /// Per-class probabilities in model class order; empty for lexicon scoring.
  std::vector<std::pair<sentiment_label, double>> posterior;
  /// Sorted by |contribution| descending, then term ascending.
  std::vector<term_contribution> contributing_terms;

  double probability(sentiment_label l) const {
    for (auto& [c, p] : posterior)
      if (c == l) return p;
    return 0.0;
  }

  friend bool operator==(const sentiment_result&, const sentiment_result&) = default;
};

namespace detail {

inline void sort_contributions(std::vector<term_contribution>& terms) {
  std::sort(terms.begin(), terms.end(), [](const term_contribution& a, const term_contribution& b) {
    const double ma = std::abs(a.contribution), mb = std::abs(b.contribution);
    if (ma != mb) return ma > mb;
    return a.term < b.term;
  });
}

inline double clamp_unit(double x) { return std::clamp(x, -1.0, 1.0); }

// Turns per-class log joint scores into a normalized posterior and picks
// the label. Classes are in ascending code order, so a strict comparison
// breaks ties toward the lowest code. Returns (top, runner-up) indices;
// runner-up equals top when there is a single class.
inline std::pair<std::size_t, std::size_t> finish_posterior(std::span<const sentiment_label> classes,
                                                            std::span<const double> log_joint,
                                                            sentiment_result& out) {
  std::size_t top = 0;
  for (std::size_t c = 1; c < log_joint.size(); ++c)
    if (log_joint[c] > log_joint[top]) top = c;
  std::size_t second = top;
  for (std::size_t c = 0; c < log_joint.size(); ++c) {
    if (c == top) continue;
    if (second == top || log_joint[c] > log_joint[second]) second = c;
  }

  const double shift = log_joint[top];
  std::vector<double> p(log_joint.size());
  double total = 0.0;
  for (std::size_t c = 0; c < p.size(); ++c) total += (p[c] = std::exp(log_joint[c] - shift));
  out.posterior.clear();
  for (std::size_t c = 0; c < p.size(); ++c) out.posterior.emplace_back(classes[c], p[c] / total);
  out.label = classes[top];
  out.score = clamp_unit(out.probability(sentiment_label::positive) -
                         out.probability(sentiment_label::negative));
  return {top, second};
}

inline std::vector<sentiment_label> sorted_classes(std::span<const sentiment_label> labels) {
  std::vector<sentiment_label> classes(labels.begin(), labels.end());
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  return classes;
}

inline void check_training_input(std::span<const count_vector> matrix, std::span<const sentiment_label> labels,
                                 const vocabulary& vocab) {
  if (matrix.empty()) throw error(errc::empty_training_set, "no training documents");
  if (matrix.size() != labels.size())
    throw error(errc::length_mismatch, "matrix has " + std::to_string(matrix.size()) + " rows but " +
                                           std::to_string(labels.size()) + " labels");
  for (const auto& row : matrix)
    if (row.size() != vocab.size())
      throw error(errc::dimension_mismatch, "row length " + std::to_string(row.size()) +
                                                " differs from vocabulary size " + std::to_string(vocab.size()));
}

inline void check_query(const count_vector& v, const vocabulary& vocab) {
  if (v.size() != vocab.size())
    throw error(errc::dimension_mismatch, "vector length " + std::to_string(v.size()) +
                                              " differs from vocabulary size " + std::to_string(vocab.size()));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Multinomial naive Bayes

struct multinomial_nb_model {
  std::vector<sentiment_label> classes;
  std::vector<double> log_prior;
  /// log_likelihood[c][t] = ln P(term t | class c).
  std::vector<std::vector<double>> log_likelihood;
  double alpha = 1.0;
  vocabulary vocab;
};

inline multinomial_nb_model train_multinomial_nb(std::span<const count_vector> matrix,
                                                 std::span<const sentiment_label> labels,
                                                 const vocabulary& vocab, double alpha = 1.0) {
  if (!(alpha > 0.0)) throw error(errc::non_positive_alpha, "alpha must be > 0");
  detail::check_training_input(matrix, labels, vocab);

  multinomial_nb_model m;
  m.alpha = alpha;
  m.vocab = vocab;
  m.classes = detail::sorted_classes(labels);
  const std::size_t k = m.classes.size(), v = vocab.size();

  std::vector<std::size_t> docs(k, 0);
  std::vector<std::vector<double>> counts(k, std::vector<double>(v, 0.0));
  std::vector<double> totals(k, 0.0);
  for (std::size_t d = 0; d < matrix.size(); ++d) {
    const auto c = static_cast<std::size_t>(
        std::lower_bound(m.classes.begin(), m.classes.end(), labels[d]) - m.classes.begin());
    ++docs[c];
    for (std::size_t t = 0; t < v; ++t) {
      counts[c][t] += matrix[d][t];
      totals[c] += matrix[d][t];
    }
  }

  const double n = static_cast<double>(matrix.size());
  m.log_prior.resize(k);
  m.log_likelihood.assign(k, std::vector<double>(v));
  for (std::size_t c = 0; c < k; ++c) {
    m.log_prior[c] = std::log(static_cast<double>(docs[c]) / n);
    const double denom = totals[c] + alpha * static_cast<double>(v);
    for (std::size_t t = 0; t < v; ++t) m.log_likelihood[c][t] = std::log((counts[c][t] + alpha) / denom);
  }
  return m;
}

inline sentiment_result predict_multinomial_nb(const multinomial_nb_model& m, const count_vector& x) {
  detail::check_query(x, m.vocab);
  const std::size_t k = m.classes.size();
  std::vector<double> joint(m.log_prior);
  for (std::size_t c = 0; c < k; ++c)
    for (std::size_t t = 0; t < x.size(); ++t)
      if (x[t]) joint[c] += static_cast<double>(x[t]) * m.log_likelihood[c][t];

  sentiment_result r;
  auto [top, second] = detail::finish_posterior(m.classes, joint, r);
  if (top != second) {
    for (std::size_t t = 0; t < x.size(); ++t)
      if (x[t])
        r.contributing_terms.push_back(
            {m.vocab.term(t), static_cast<double>(x[t]) * (m.log_likelihood[top][t] - m.log_likelihood[second][t])});
    detail::sort_contributions(r.contributing_terms);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Gaussian naive Bayes

struct gaussian_nb_model {
  std::vector<sentiment_label> classes;
  std::vector<double> log_prior;
  std::vector<std::vector<double>> mean;
  /// Population variance plus epsilon; always > 0.
  std::vector<std::vector<double>> variance;
  double epsilon = 0.0;
  vocabulary vocab;
};

/// epsilon = 1e-9 * (largest per-feature variance over all training rows,
/// or 1 when that is 0); added to every per-class variance.
inline gaussian_nb_model train_gaussian_nb(std::span<const count_vector> matrix,
                                           std::span<const sentiment_label> labels, const vocabulary& vocab) {
  detail::check_training_input(matrix, labels, vocab);

  gaussian_nb_model m;
  m.vocab = vocab;
  m.classes = detail::sorted_classes(labels);
  const std::size_t k = m.classes.size(), v = vocab.size(), n = matrix.size();

  std::vector<std::size_t> class_of(n);
  std::vector<std::size_t> docs(k, 0);
  for (std::size_t d = 0; d < n; ++d) {
    class_of[d] = static_cast<std::size_t>(
        std::lower_bound(m.classes.begin(), m.classes.end(), labels[d]) - m.classes.begin());
    ++docs[class_of[d]];
  }

  double max_var = 0.0;
  for (std::size_t t = 0; t < v; ++t) {
    double mu = 0.0;
    for (std::size_t d = 0; d < n; ++d) mu += matrix[d][t];
    mu /= static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t d = 0; d < n; ++d) ss += (matrix[d][t] - mu) * (matrix[d][t] - mu);
    max_var = std::max(max_var, ss / static_cast<double>(n));
  }
  m.epsilon = 1e-9 * (max_var > 0.0 ? max_var : 1.0);

  m.mean.assign(k, std::vector<double>(v, 0.0));
  m.variance.assign(k, std::vector<double>(v, 0.0));
  for (std::size_t d = 0; d < n; ++d)
    for (std::size_t t = 0; t < v; ++t) m.mean[class_of[d]][t] += matrix[d][t];
  for (std::size_t c = 0; c < k; ++c)
    for (std::size_t t = 0; t < v; ++t) m.mean[c][t] /= static_cast<double>(docs[c]);
  for (std::size_t d = 0; d < n; ++d)
    for (std::size_t t = 0; t < v; ++t) {
      const double dev = matrix[d][t] - m.mean[class_of[d]][t];
      m.variance[class_of[d]][t] += dev * dev;
    }
  m.log_prior.resize(k);
  for (std::size_t c = 0; c < k; ++c) {
    m.log_prior[c] = std::log(static_cast<double>(docs[c]) / static_cast<double>(n));
    for (std::size_t t = 0; t < v; ++t)
      m.variance[c][t] = m.variance[c][t] / static_cast<double>(docs[c]) + m.epsilon;
  }
  return m;
}

namespace detail {
inline double gaussian_log_density(double x, double mean, double variance) {
  const double dev = x - mean;
  return -0.5 * std::log(2.0 * std::numbers::pi * variance) - dev * dev / (2.0 * variance);
}
}  // namespace detail

inline sentiment_result predict_gaussian_nb(const gaussian_nb_model& m, const count_vector& x) {
  detail::check_query(x, m.vocab);
  const std::size_t k = m.classes.size();
  std::vector<double> joint(m.log_prior);
  for (std::size_t c = 0; c < k; ++c)
    for (std::size_t t = 0; t < x.size(); ++t)
      joint[c] += detail::gaussian_log_density(x[t], m.mean[c][t], m.variance[c][t]);

  sentiment_result r;
  auto [top, second] = detail::finish_posterior(m.classes, joint, r);
  if (top != second) {
    for (std::size_t t = 0; t < x.size(); ++t)
      if (x[t])
        r.contributing_terms.push_back(
            {m.vocab.term(t), detail::gaussian_log_density(x[t], m.mean[top][t], m.variance[top][t]) -
                                  detail::gaussian_log_density(x[t], m.mean[second][t], m.variance[second][t])});
    detail::sort_contributions(r.contributing_terms);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Either trained classifier behind one interface.

enum class classifier_kind { multinomial, gaussian };

constexpr std::string_view to_string(classifier_kind k) noexcept {
  return k == classifier_kind::multinomial ? "mnb" : "gnb";
}

inline std::optional<classifier_kind> parse_classifier_kind(std::string_view s) {
  if (s == "mnb" || s == "multinomial") return classifier_kind::multinomial;
  if (s == "gnb" || s == "gaussian") return classifier_kind::gaussian;
  return std::nullopt;
}

using classifier_model = std::variant<multinomial_nb_model, gaussian_nb_model>;

inline classifier_kind kind_of(const classifier_model& m) {
  return std::holds_alternative<multinomial_nb_model>(m) ? classifier_kind::multinomial : classifier_kind::gaussian;
}

inline const vocabulary& vocab_of(const classifier_model& m) {
  return std::visit([](const auto& x) -> const vocabulary& { return x.vocab; }, m);
}

inline const std::vector<sentiment_label>& classes_of(const classifier_model& m) {
  return std::visit([](const auto& x) -> const std::vector<sentiment_label>& { return x.classes; }, m);
}

inline sentiment_result predict(const classifier_model& m, const count_vector& x) {
  if (auto* mnb = std::get_if<multinomial_nb_model>(&m)) return predict_multinomial_nb(*mnb, x);
  return predict_gaussian_nb(std::get<gaussian_nb_model>(m), x);
}

inline sentiment_result predict(const classifier_model& m, const processed_doc& doc) {
  return predict(m, vectorize(doc, vocab_of(m)));
}

// ---------------------------------------------------------------------------
// Lexicon scoring

class lexicon {
 public:
  lexicon() = default;
  lexicon(std::initializer_list<std::pair<const std::string, double>> weights) {
    for (auto& [t, w] : weights) set(t, w);
  }

  void set(const std::string& term, double weight) {
    if (!(weight >= -1.0 && weight <= 1.0))
      throw error(errc::out_of_range, "lexicon weight for '" + term + "' not in [-1, 1]");
    weights_[term] = weight;
  }

  const double* find(const std::string& term) const {
    auto it = weights_.find(term);
    return it == weights_.end() ? nullptr : &it->second;
  }

  std::size_t size() const { return weights_.size(); }
  const std::map<std::string, double>& weights() const { return weights_; }

  /// Starter weights shipped as demo data (mirrors data/lexicon_en.tsv).
  static const lexicon& english();

  /// Lines "stem<TAB>weight"; '#' and blank lines ignored.
  static lexicon load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw error(errc::file_not_readable, path);
    lexicon lex;
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      auto tab = line.find('\t');
      if (tab == std::string::npos) throw error(errc::bad_config, "lexicon line without tab: " + line);
      double w = 0.0;
      try {
        w = std::stod(line.substr(tab + 1));
      } catch (const std::exception&) {
        throw error(errc::bad_config, "bad lexicon weight: " + line);
      }
      lex.set(line.substr(0, tab), w);
    }
    return lex;
  }

 private:
  std::map<std::string, double> weights_;
};

inline const lexicon& lexicon::english() {
  static const lexicon lex{
      {"amaz", +0.90},
      {"aw", -0.80},
      {"bad", -0.80},
      {"beauti", +0.80},
      {"best", +0.90},
      {"broken", -0.70},
      {"cheap", -0.40},
      {"comfort", +0.60},
      {"disappoint", -0.80},
      {"durabl", +0.70},
      {"excel", +1.00},
      {"fast", +0.40},
      {"flimsi", -0.70},
      {"frai", -0.60},
      {"good", +0.80},
      {"great", +0.90},
      {"happi", +0.70},
      {"hate", -0.90},
      {"horribl", -0.90},
      {"love", +0.90},
      {"nice", +0.60},
      {"perfect", +1.00},
      {"pleas", +0.70},
      {"poor", -0.70},
      {"qualiti", +0.30},
      {"recommend", +0.70},
      {"return", -0.30},
      {"rough", -0.50},
      {"satisfi", +0.70},
      {"slow", -0.40},
      {"smooth", +0.50},
      {"snap", -0.50},
      {"soft", +0.50},
      {"strong", +0.60},
      {"tangl", -0.50},
      {"terribl", -0.90},
      {"useless", -0.90},
      {"wast", -0.80},
      {"weak", -0.60},
      {"worst", -1.00},
  };
  return lex;
}

/// Mean weight of matched tokens (0 when none match), clamped to [-1, 1].
/// Accumulates per distinct term in term order so the result does not
/// depend on token order.
inline sentiment_result lexicon_score(const processed_doc& doc, const lexicon& lex, label_thresholds t = {}) {
  std::map<std::string, std::size_t> matched;
  for (const auto& tok : doc.tokens)
    if (lex.find(tok)) ++matched[tok];

  sentiment_result r;
  double sum = 0.0;
  std::size_t n = 0;
  for (auto& [term, count] : matched) {
    const double c = *lex.find(term) * static_cast<double>(count);
    sum += c;
    n += count;
    r.contributing_terms.push_back({term, c});
  }
  detail::sort_contributions(r.contributing_terms);
  r.score = n ? detail::clamp_unit(sum / static_cast<double>(n)) : 0.0;
  r.label = score_to_label(r.score, t);
  return r;
}

}  // namespace threadlens
