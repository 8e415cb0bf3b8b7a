#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "threadlens/corpus.hpp"
#include "threadlens/error.hpp"
#include "threadlens/label.hpp"
#include "threadlens/numfmt.hpp"

namespace threadlens {

template <class Label>
concept report_label = std::totally_ordered<Label> && std::copyable<Label>;

/// Rows are true classes, columns predicted classes.
template <report_label Label>
struct confusion_matrix {
  std::vector<Label> classes;
  std::vector<std::vector<std::size_t>> counts;

  std::size_t support(std::size_t i) const {
    std::size_t s = 0;
    for (auto c : counts[i]) s += c;
    return s;
  }
  std::size_t predicted(std::size_t j) const {
    std::size_t s = 0;
    for (const auto& row : counts) s += row[j];
    return s;
  }
  std::size_t total() const {
    std::size_t s = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) s += support(i);
    return s;
  }
  std::size_t trace() const {
    std::size_t s = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) s += counts[i][i];
    return s;
  }
};

namespace detail {

template <class Label>
void check_lengths(std::span<const Label> y_true, std::span<const Label> y_pred) {
  if (y_true.size() != y_pred.size())
    throw error(errc::length_mismatch, "y_true has " + std::to_string(y_true.size()) + " labels, y_pred has " +
                                           std::to_string(y_pred.size()));
  if (y_true.empty()) throw error(errc::length_mismatch, "label lists are empty");
}

}  // namespace detail

/// Class set is `classes` when given, otherwise the sorted union of labels
/// seen in either list.
template <report_label Label>
confusion_matrix<Label> make_confusion_matrix(std::span<const Label> y_true, std::span<const Label> y_pred,
                                              std::optional<std::vector<Label>> classes = std::nullopt) {
  detail::check_lengths(y_true, y_pred);
  confusion_matrix<Label> m;
  if (classes) {
    m.classes = std::move(*classes);
  } else {
    m.classes.assign(y_true.begin(), y_true.end());
    m.classes.insert(m.classes.end(), y_pred.begin(), y_pred.end());
    std::sort(m.classes.begin(), m.classes.end());
    m.classes.erase(std::unique(m.classes.begin(), m.classes.end()), m.classes.end());
  }
  auto index = [&](const Label& l) {
    auto it = std::find(m.classes.begin(), m.classes.end(), l);
    if (it == m.classes.end()) throw error(errc::unknown_label, "label not in class list");
    return static_cast<std::size_t>(it - m.classes.begin());
  };
  m.counts.assign(m.classes.size(), std::vector<std::size_t>(m.classes.size(), 0));
  for (std::size_t k = 0; k < y_true.size(); ++k) ++m.counts[index(y_true[k])][index(y_pred[k])];
  return m;
}

struct class_metrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
};

template <report_label Label>
struct classification_report {
  std::vector<std::pair<Label, class_metrics>> per_class;
  double accuracy = 0.0;
  class_metrics macro_avg;
  class_metrics weighted_avg;
  confusion_matrix<Label> matrix;

  std::size_t total() const { return macro_avg.support; }
};

namespace detail {
inline double safe_ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}
inline double harmonic(double p, double r) { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }
}  // namespace detail

/// Any ratio with a zero denominator is reported as 0.
template <report_label Label>
classification_report<Label> make_classification_report(const confusion_matrix<Label>& m) {
  classification_report<Label> rep;
  rep.matrix = m;
  const std::size_t total = m.total();
  const std::size_t k = m.classes.size();
  for (std::size_t i = 0; i < k; ++i) {
    class_metrics cm;
    const std::size_t tp = m.counts[i][i];
    cm.support = m.support(i);
    cm.precision = detail::safe_ratio(tp, m.predicted(i));
    cm.recall = detail::safe_ratio(tp, cm.support);
    cm.f1 = detail::harmonic(cm.precision, cm.recall);
    rep.per_class.emplace_back(m.classes[i], cm);
  }
  rep.accuracy = detail::safe_ratio(m.trace(), total);

  rep.macro_avg.support = rep.weighted_avg.support = total;
  // support * recall is tp for every class, so the weighted recall is
  // accumulated in integers and stays exact.
  std::size_t weighted_tp = 0;
  for (std::size_t i = 0; i < k; ++i) weighted_tp += m.counts[i][i];
  for (const auto& [label, cm] : rep.per_class) {
    rep.macro_avg.precision += cm.precision;
    rep.macro_avg.recall += cm.recall;
    rep.macro_avg.f1 += cm.f1;
    const double w = static_cast<double>(cm.support);
    rep.weighted_avg.precision += w * cm.precision;
    rep.weighted_avg.f1 += w * cm.f1;
  }
  if (k) {
    rep.macro_avg.precision /= static_cast<double>(k);
    rep.macro_avg.recall /= static_cast<double>(k);
    rep.macro_avg.f1 /= static_cast<double>(k);
  }
  if (total) {
    const double n = static_cast<double>(total);
    rep.weighted_avg.precision /= n;
    rep.weighted_avg.f1 /= n;
    rep.weighted_avg.recall = detail::safe_ratio(weighted_tp, total);
  }
  return rep;
}

template <report_label Label>
classification_report<Label> make_classification_report(std::span<const Label> y_true, std::span<const Label> y_pred,
                                                         std::optional<std::vector<Label>> classes = std::nullopt) {
  return make_classification_report(make_confusion_matrix(y_true, y_pred, std::move(classes)));
}

// ---------------------------------------------------------------------------
// Rendering

inline std::string display_label(int code) { return std::to_string(code); }
inline std::string display_label(sentiment_label l) { return std::string(to_string(l)); }

enum class support_format {
  /// Decimal when some class in the report has zero support, integer otherwise.
  automatic,
  integer,
  decimal,
};

struct render_options {
  int digits = 2;
  support_format support = support_format::automatic;
};

namespace detail {

inline std::string pad_left(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

inline std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace detail

/// Fixed-width text table: a header line (precision, recall, f1-score,
/// support), one row per class, then accuracy, macro avg and weighted avg.
template <report_label Label>
std::string render_report(const classification_report<Label>& rep, render_options opts = {}) {
  bool decimal = opts.support == support_format::decimal;
  if (opts.support == support_format::automatic)
    for (const auto& [l, cm] : rep.per_class)
      if (cm.support == 0) decimal = true;
  auto support = [&](std::size_t s) {
    return detail::pad_left(decimal ? std::to_string(s) + ".0" : std::to_string(s), 9);
  };
  auto num = [&](double v) { return detail::pad_left(detail::fixed(v, opts.digits), 9); };

  const std::string last_heading = "weighted avg";
  std::size_t width = std::max<std::size_t>(last_heading.size(), static_cast<std::size_t>(opts.digits));
  std::vector<std::string> names;
  for (const auto& [l, cm] : rep.per_class) {
    names.push_back(display_label(l));
    width = std::max(width, names.back().size());
  }

  std::string out = detail::pad_left("", width) + " ";
  for (const char* h : {"precision", "recall", "f1-score", "support"}) out += " " + detail::pad_left(h, 9);
  out += "\n\n";
  auto row = [&](const std::string& name, const class_metrics& cm) {
    out += detail::pad_left(name, width) + " " + " " + num(cm.precision) + " " + num(cm.recall) + " " + num(cm.f1) +
           " " + support(cm.support) + "\n";
  };
  for (std::size_t i = 0; i < names.size(); ++i) row(names[i], rep.per_class[i].second);
  out += "\n";
  out += detail::pad_left("accuracy", width) + " " + " " + std::string(9, ' ') + " " + std::string(9, ' ') + " " +
         num(rep.accuracy) + " " + support(rep.total()) + "\n";
  row("macro avg", rep.macro_avg);
  row(last_heading, rep.weighted_avg);
  return out;
}

/// Machine-readable rows: name<TAB>precision<TAB>recall<TAB>f1<TAB>support,
/// values at full precision; the accuracy row leaves precision and recall
/// empty.
template <report_label Label>
std::string render_report_tsv(const classification_report<Label>& rep) {
  std::string out = "row\tprecision\trecall\tf1-score\tsupport\n";
  auto row = [&](const std::string& name, const class_metrics& cm) {
    out += name + "\t" + full_precision(cm.precision) + "\t" + full_precision(cm.recall) + "\t" +
           full_precision(cm.f1) + "\t" + std::to_string(cm.support) + "\n";
  };
  for (const auto& [l, cm] : rep.per_class) row(display_label(l), cm);
  out += "accuracy\t\t\t" + full_precision(rep.accuracy) + "\t" + std::to_string(rep.total()) + "\n";
  row("macro avg", rep.macro_avg);
  row("weighted avg", rep.weighted_avg);
  return out;
}

// ---------------------------------------------------------------------------
// Holdout splitting

/// 64-bit LCG with Knuth's MMIX constants; state advances before each draw.
class lcg64 {
 public:
  static constexpr std::uint64_t multiplier = 6364136223846793005ULL;
  static constexpr std::uint64_t increment = 1442695040888963407ULL;

  explicit lcg64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ = state_ * multiplier + increment;
    return state_;
  }

  /// Uniform-ish value in [0, bound) from the high 32 bits.
  std::uint64_t below(std::uint64_t bound) { return (next() >> 32) % bound; }

 private:
  std::uint64_t state_;
};

/// Test-set size: round(n * fraction), at least 1 and at most n - 1 when n >= 2.
inline std::size_t holdout_test_size(std::size_t n, double fraction) {
  auto k = static_cast<std::size_t>(std::llround(static_cast<double>(n) * fraction));
  if (n >= 2) k = std::clamp<std::size_t>(k, 1, n - 1);
  return std::min(k, n);
}

struct split_indices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Fisher-Yates shuffle of 0..n-1 driven by lcg64(seed); the first k
/// shuffled positions form the test set. Both sides are returned in
/// ascending index order.
inline split_indices holdout_indices(std::size_t n, double test_fraction, std::uint64_t seed) {
  if (n == 0) throw error(errc::empty_corpus, "cannot split an empty corpus");
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw error(errc::bad_fraction, "test fraction must be in (0, 1)");
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  lcg64 rng(seed);
  for (std::size_t i = n - 1; i > 0; --i) std::swap(order[i], order[rng.below(i + 1)]);

  const std::size_t k = holdout_test_size(n, test_fraction);
  split_indices s;
  s.test.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
  s.train.assign(order.begin() + static_cast<std::ptrdiff_t>(k), order.end());
  std::sort(s.test.begin(), s.test.end());
  std::sort(s.train.begin(), s.train.end());
  return s;
}

inline std::pair<corpus, corpus> holdout_split(const corpus& c, double test_fraction, std::uint64_t seed) {
  const auto idx = holdout_indices(c.size(), test_fraction, seed);
  std::pair<corpus, corpus> out;
  out.first.provenance = out.second.provenance = c.provenance;
  for (auto i : idx.train) out.first.records.push_back(c.records[i]);
  for (auto i : idx.test) out.second.records.push_back(c.records[i]);
  return out;
}

}  // namespace threadlens
