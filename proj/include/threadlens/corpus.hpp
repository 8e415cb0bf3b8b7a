#pragma once

#include <cstddef>
#include <cstdio>
#include <fstream>
#include <istream>
#include <optional>
#include <set>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "threadlens/csv.hpp"
#include "threadlens/error.hpp"
#include "threadlens/label.hpp"
#include "threadlens/textprep.hpp"
#include "threadlens/timeutil.hpp"

namespace threadlens {

struct review_record {
  std::string id;
  std::string source;
  timestamp time{};
  std::string text;
  std::optional<int> rating;
  std::optional<sentiment_label> label;

  friend bool operator==(const review_record&, const review_record&) = default;
};

/// Labels used for training: the explicit label, else one derived from
/// the rating, else none.
inline std::optional<sentiment_label> training_label(const review_record& r) {
  if (r.label) return r.label;
  if (r.rating) return rating_to_label(*r.rating);
  return std::nullopt;
}

/// Records in insertion order.
struct corpus {
  std::vector<review_record> records;
  std::string provenance;

  std::size_t size() const { return records.size(); }
  bool empty() const { return records.empty(); }

  friend bool operator==(const corpus&, const corpus&) = default;
};

/// rows_read = rows_kept + duplicates_removed + missing_dropped + parse_errors.
struct ingest_report {
  std::size_t rows_read = 0;
  std::size_t rows_kept = 0;
  std::size_t duplicates_removed = 0;
  std::size_t missing_dropped = 0;
  std::size_t parse_errors = 0;

  bool balanced() const {
    return rows_read == rows_kept + duplicates_removed + missing_dropped + parse_errors;
  }

  friend bool operator==(const ingest_report&, const ingest_report&) = default;
};

/// Column names in the input header. Only `text` is required to exist.
struct csv_schema {
  std::string id = "id";
  std::string source = "source";
  std::string timestamp = "timestamp";
  std::string text = "text";
  std::string rating = "rating";
  std::string label = "label";
};

struct ingest_options {
  csv_schema schema;
  /// Timestamp given to rows without one.
  std::optional<timestamp> now;
  /// Synthesized ids are "row-" + zero-padded (id_offset + 1-based row ordinal).
  std::size_t id_offset = 0;
  const stopword_list* stopwords = nullptr;
};

inline std::string synthesized_id(std::size_t ordinal) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "row-%06zu", ordinal);
  return buf;
}

namespace detail {

inline bool blank(const std::string& s) {
  return s.find_first_not_of(" \t\r\n\f\v") == std::string::npos;
}

}  // namespace detail

/// Dedup key: preprocessed tokens joined by single spaces, paired with source.
inline std::pair<std::string, std::string> dedup_key(const review_record& r, const stopword_list& stopwords) {
  std::string joined;
  for (const auto& t : preprocess(r.text, stopwords).tokens) {
    if (!joined.empty()) joined.push_back(' ');
    joined += t;
  }
  return {r.source, std::move(joined)};
}

/// Drops records with blank text and records whose dedup key was already
/// seen, keeping the first occurrence. Relative order is preserved.
inline std::pair<corpus, ingest_report> clean(const corpus& in,
                                              const stopword_list& stopwords = stopword_list::english()) {
  corpus out;
  out.provenance = in.provenance;
  ingest_report rep;
  rep.rows_read = in.size();
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& r : in.records) {
    if (detail::blank(r.text)) {
      ++rep.missing_dropped;
      continue;
    }
    if (!seen.insert(dedup_key(r, stopwords)).second) {
      ++rep.duplicates_removed;
      continue;
    }
    out.records.push_back(r);
  }
  rep.rows_kept = out.size();
  return {std::move(out), rep};
}

/// Parses an RFC-4180 CSV stream with a header row, then cleans it.
/// Rows with the wrong field count, an unparsable timestamp, rating or
/// label are counted as parse errors, as are rows that reuse an earlier
/// id with different text. Blank lines are skipped and not counted.
inline std::pair<corpus, ingest_report> ingest_csv(std::istream& in, const ingest_options& opts = {},
                                                   std::string provenance = "stream") {
  csv::reader reader(in);
  bool malformed = false;
  auto header = reader.next(&malformed);
  if (!header) throw error(errc::missing_text_column, "input has no header row");

  auto column = [&](const std::string& name) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < header->size(); ++i) {
      std::string h = (*header)[i];
      while (!h.empty() && (h.back() == ' ' || h.back() == '\t')) h.pop_back();
      while (!h.empty() && (h.front() == ' ' || h.front() == '\t')) h.erase(h.begin());
      if (h == name) return i;
    }
    return std::nullopt;
  };
  const auto text_col = column(opts.schema.text);
  if (!text_col) throw error(errc::missing_text_column, "no '" + opts.schema.text + "' column in header");
  const auto id_col = column(opts.schema.id);
  const auto source_col = column(opts.schema.source);
  const auto time_col = column(opts.schema.timestamp);
  const auto rating_col = column(opts.schema.rating);
  const auto label_col = column(opts.schema.label);
  const timestamp now = opts.now ? *opts.now : now_utc();

  corpus parsed;
  parsed.provenance = std::move(provenance);
  std::size_t rows_read = 0, parse_errors = 0;
  while (auto row = reader.next(&malformed)) {
    if (row->size() == 1 && (*row)[0].empty() && !malformed) continue;
    ++rows_read;
    if (malformed || row->size() != header->size()) {
      ++parse_errors;
      continue;
    }
    auto field = [&](const std::optional<std::size_t>& col) -> const std::string* {
      if (!col) return nullptr;
      return &(*row)[*col];
    };

    review_record r;
    if (auto* id = field(id_col); id && !detail::blank(*id)) r.id = *id;
    else r.id = synthesized_id(opts.id_offset + rows_read);
    if (auto* src = field(source_col)) r.source = *src;
    r.text = (*row)[*text_col];

    bool ok = true;
    if (auto* ts = field(time_col); ts && !detail::blank(*ts)) {
      if (auto t = parse_iso8601(*ts)) r.time = *t;
      else ok = false;
    } else {
      r.time = now;
    }
    if (auto* rt = field(rating_col); rt && !detail::blank(*rt)) {
      try {
        std::size_t used = 0;
        int v = std::stoi(*rt, &used);
        if (used != rt->size() || v < 1 || v > 5) ok = false;
        else r.rating = v;
      } catch (const std::exception&) {
        ok = false;
      }
    }
    if (auto* lb = field(label_col); lb && !detail::blank(*lb)) {
      if (auto l = parse_label(*lb)) r.label = *l;
      else ok = false;
    }
    if (!ok) {
      ++parse_errors;
      continue;
    }
    parsed.records.push_back(std::move(r));
  }

  auto [cleaned, rep] = clean(parsed, opts.stopwords ? *opts.stopwords : stopword_list::english());
  // Repeated ids that survive dedup carry different text: reject them.
  std::unordered_set<std::string> ids;
  std::erase_if(cleaned.records, [&](const review_record& r) {
    if (ids.insert(r.id).second) return false;
    ++parse_errors;
    return true;
  });
  rep.rows_read = rows_read;
  rep.rows_kept = cleaned.size();
  rep.parse_errors = parse_errors;
  return {std::move(cleaned), rep};
}

inline std::pair<corpus, ingest_report> ingest_csv(const std::string& path, const ingest_options& opts = {}) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw error(errc::file_not_readable, path);
  return ingest_csv(in, opts, path);
}

}  // namespace threadlens
