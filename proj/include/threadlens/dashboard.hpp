#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cstddef>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "threadlens/classify.hpp"
#include "threadlens/corpus.hpp"
#include "threadlens/csv.hpp"
#include "threadlens/error.hpp"
#include "threadlens/textprep.hpp"
#include "threadlens/timeutil.hpp"

namespace threadlens {

struct analyzed_review {
  review_record record;
  sentiment_result result;
  timestamp analyzed_at{};

  friend bool operator==(const analyzed_review&, const analyzed_review&) = default;
};

/// Per-label tallies indexed by label code.
using label_counts = std::array<std::size_t, 3>;

struct sentiment_summary {
  label_counts counts{};
  std::array<double, 3> percentages{};
  std::size_t total = 0;

  std::size_t count(sentiment_label l) const { return counts[static_cast<std::size_t>(code(l))]; }
  double percentage(sentiment_label l) const { return percentages[static_cast<std::size_t>(code(l))]; }
};

inline sentiment_summary summarize(std::span<const analyzed_review> analyzed) {
  sentiment_summary s;
  for (const auto& a : analyzed) ++s.counts[static_cast<std::size_t>(code(a.result.label))];
  s.total = analyzed.size();
  if (s.total)
    for (std::size_t i = 0; i < 3; ++i)
      s.percentages[i] = 100.0 * static_cast<double>(s.counts[i]) / static_cast<double>(s.total);
  return s;
}

// ---------------------------------------------------------------------------
// Trends

enum class granularity { day, week, month };

constexpr std::string_view to_string(granularity g) noexcept {
  switch (g) {
    case granularity::day: return "day";
    case granularity::week: return "week";
    case granularity::month: return "month";
  }
  return "?";
}

inline std::optional<granularity> parse_granularity(std::string_view s) {
  if (s == "day") return granularity::day;
  if (s == "week") return granularity::week;
  if (s == "month") return granularity::month;
  return std::nullopt;
}

/// UTC start of the calendar period holding t; weeks start on Monday (ISO).
inline timestamp period_start(timestamp t, granularity g) {
  using namespace std::chrono;
  const sys_days d = floor<days>(t);
  switch (g) {
    case granularity::day: return d;
    case granularity::week: return d - days{weekday{d}.iso_encoding() - 1};
    case granularity::month: {
      const year_month_day ymd{d};
      return sys_days{ymd.year() / ymd.month() / 1};
    }
  }
  return d;
}

inline timestamp next_period(timestamp start, granularity g) {
  using namespace std::chrono;
  const sys_days d = floor<days>(start);
  switch (g) {
    case granularity::day: return d + days{1};
    case granularity::week: return d + days{7};
    case granularity::month: {
      const year_month_day ymd{d};
      return sys_days{(ymd.year() / ymd.month() + months{1}) / 1};
    }
  }
  return d;
}

struct trend_point {
  timestamp period{};
  label_counts counts{};

  std::size_t total() const { return counts[0] + counts[1] + counts[2]; }
};

struct trend_series {
  granularity unit = granularity::day;
  std::vector<trend_point> points;
};

/// Buckets by the review timestamp. Empty periods between the first and
/// last bucket are emitted with zero counts.
inline trend_series trend(std::span<const analyzed_review> analyzed, granularity g) {
  trend_series series;
  series.unit = g;
  if (analyzed.empty()) return series;
  std::map<timestamp, label_counts> buckets;
  for (const auto& a : analyzed) ++buckets[period_start(a.record.time, g)][static_cast<std::size_t>(code(a.result.label))];
  const timestamp last = buckets.rbegin()->first;
  for (timestamp p = buckets.begin()->first; p <= last; p = next_period(p, g)) {
    auto it = buckets.find(p);
    series.points.push_back({p, it == buckets.end() ? label_counts{} : it->second});
  }
  return series;
}

// ---------------------------------------------------------------------------
// Top terms

struct term_frequency_row {
  std::string term;
  std::size_t count = 0;
  /// Mean over reviews containing the term of the contribution recorded
  /// for it in the review's result (0 where none was recorded).
  double mean_contribution = 0.0;
};

/// Sorted by count descending, then term ascending.
struct term_frequency_table {
  std::vector<term_frequency_row> rows;
};

inline term_frequency_table top_terms(std::span<const analyzed_review> analyzed, sentiment_label label, std::size_t k,
                                      const stopword_list& stopwords = stopword_list::english()) {
  struct tally {
    std::size_t count = 0;
    std::size_t docs = 0;
    double contribution = 0.0;
  };
  std::map<std::string, tally> terms;
  for (const auto& a : analyzed) {
    if (a.result.label != label) continue;
    std::map<std::string, std::size_t> local;
    for (auto& t : preprocess(a.record.text, stopwords).tokens) ++local[t];
    for (auto& [term, n] : local) {
      auto& entry = terms[term];
      entry.count += n;
      ++entry.docs;
      for (const auto& c : a.result.contributing_terms)
        if (c.term == term) {
          entry.contribution += c.contribution;
          break;
        }
    }
  }
  term_frequency_table table;
  for (auto& [term, t] : terms)
    table.rows.push_back({term, t.count, t.contribution / static_cast<double>(t.docs)});
  std::stable_sort(table.rows.begin(), table.rows.end(),
                   [](const term_frequency_row& a, const term_frequency_row& b) { return a.count > b.count; });
  if (table.rows.size() > k) table.rows.resize(k);
  return table;
}

// ---------------------------------------------------------------------------
// CSV extract

inline constexpr std::string_view export_header = "id,source,timestamp,text,rating,label,score,analyzed_at";

inline std::string format_score(double score) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", score);
  std::string s = buf;
  if (s == "-0.000000") s = "0.000000";
  return s;
}

/// One row per review in input order. `label` is the record's own label
/// (empty when unlabeled) so the extract re-ingests to the same corpus;
/// `score` is the analysis score.
inline std::size_t write_export(std::span<const analyzed_review> analyzed, std::ostream& out) {
  out << export_header << "\r\n";
  for (const auto& a : analyzed) {
    const std::string ts = format_iso8601(a.record.time);
    const std::string rating = a.record.rating ? std::to_string(*a.record.rating) : std::string();
    const std::string_view label = a.record.label ? to_string(*a.record.label) : std::string_view();
    const std::string score = format_score(a.result.score);
    const std::string at = format_iso8601(a.analyzed_at);
    csv::write_row(out, {a.record.id, a.record.source, ts, a.record.text, rating, label, score, at});
  }
  return analyzed.size();
}

inline std::size_t export_csv(std::span<const analyzed_review> analyzed, const std::string& destination) {
  std::ofstream out(destination, std::ios::binary | std::ios::trunc);
  if (!out) throw error(errc::destination_not_writable, destination);
  const std::size_t n = write_export(analyzed, out);
  out.flush();
  if (!out) throw error(errc::destination_not_writable, destination);
  return n;
}

}  // namespace threadlens
