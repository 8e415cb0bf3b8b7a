#pragma once

#include <string>

#include "json.hpp"
#include "threadlens/classify.hpp"
#include "threadlens/corpus.hpp"
#include "threadlens/dashboard.hpp"
#include "threadlens/error.hpp"
#include "threadlens/evaluate.hpp"
#include "threadlens/timeutil.hpp"

// JSON shapes shared by the persisted logs and the HTTP API.

namespace threadlens {

using json = nlohmann::ordered_json;

namespace detail {
inline std::string require_string(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_string()) throw error(errc::bad_request, std::string("missing string '") + key + "'");
  return j[key].get<std::string>();
}
}  // namespace detail

inline json to_json(const review_record& r) {
  json j;
  j["id"] = r.id;
  j["source"] = r.source;
  j["timestamp"] = format_iso8601(r.time);
  j["text"] = r.text;
  j["rating"] = r.rating ? json(*r.rating) : json(nullptr);
  j["label"] = r.label ? json(to_string(*r.label)) : json(nullptr);
  return j;
}

inline review_record review_from_json(const json& j) {
  review_record r;
  r.id = detail::require_string(j, "id");
  r.source = detail::require_string(j, "source");
  auto t = parse_iso8601(detail::require_string(j, "timestamp"));
  if (!t) throw error(errc::bad_request, "bad timestamp");
  r.time = *t;
  r.text = detail::require_string(j, "text");
  if (j.contains("rating") && !j["rating"].is_null()) {
    const int v = j["rating"].get<int>();
    if (v < 1 || v > 5) throw error(errc::out_of_range, "rating not in 1..5");
    r.rating = v;
  }
  if (j.contains("label") && !j["label"].is_null()) {
    auto l = parse_label(j["label"].get<std::string>());
    if (!l) throw error(errc::unknown_label, j["label"].get<std::string>());
    r.label = *l;
  }
  return r;
}

inline json to_json(const sentiment_result& r) {
  json j;
  j["label"] = to_string(r.label);
  j["label_code"] = code(r.label);
  j["score"] = r.score;
  j["five_point"] = score_to_five_point(r.score);
  if (r.posterior.empty()) {
    j["posterior"] = nullptr;
  } else {
    json p = json::object();
    for (auto& [c, prob] : r.posterior) p[std::string(to_string(c))] = prob;
    j["posterior"] = p;
  }
  json terms = json::array();
  for (auto& t : r.contributing_terms) terms.push_back({{"term", t.term}, {"contribution", t.contribution}});
  j["contributing_terms"] = terms;
  return j;
}

inline sentiment_result result_from_json(const json& j) {
  sentiment_result r;
  auto l = parse_label(detail::require_string(j, "label"));
  if (!l) throw error(errc::unknown_label, "bad result label");
  r.label = *l;
  r.score = j.at("score").get<double>();
  if (j.contains("posterior") && j["posterior"].is_object())
    for (auto& [k, v] : j["posterior"].items()) {
      auto c = parse_label(k);
      if (!c) throw error(errc::unknown_label, k);
      r.posterior.emplace_back(*c, v.get<double>());
    }
  if (j.contains("contributing_terms"))
    for (auto& t : j["contributing_terms"])
      r.contributing_terms.push_back({t.at("term").get<std::string>(), t.at("contribution").get<double>()});
  return r;
}

inline json to_json(const analyzed_review& a) {
  json j;
  j["record"] = to_json(a.record);
  j["result"] = to_json(a.result);
  j["analyzed_at"] = format_iso8601(a.analyzed_at);
  return j;
}

inline analyzed_review analyzed_from_json(const json& j) {
  analyzed_review a;
  a.record = review_from_json(j.at("record"));
  a.result = result_from_json(j.at("result"));
  auto t = parse_iso8601(detail::require_string(j, "analyzed_at"));
  if (!t) throw error(errc::bad_request, "bad analyzed_at");
  a.analyzed_at = *t;
  return a;
}

inline json to_json(const ingest_report& r) {
  return {{"rows_read", r.rows_read},
          {"rows_kept", r.rows_kept},
          {"duplicates_removed", r.duplicates_removed},
          {"missing_dropped", r.missing_dropped},
          {"parse_errors", r.parse_errors}};
}

inline json to_json(const class_metrics& m) {
  return {{"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}, {"support", m.support}};
}

template <report_label Label>
json to_json(const classification_report<Label>& rep) {
  json j;
  json classes = json::array();
  json rows = json::array();
  for (auto& [l, m] : rep.per_class) {
    classes.push_back(display_label(l));
    json row = to_json(m);
    row["class"] = display_label(l);
    rows.push_back(row);
  }
  j["classes"] = classes;
  j["per_class"] = rows;
  j["accuracy"] = rep.accuracy;
  j["macro_avg"] = to_json(rep.macro_avg);
  j["weighted_avg"] = to_json(rep.weighted_avg);
  j["support"] = rep.total();
  j["confusion_matrix"] = rep.matrix.counts;
  j["text"] = render_report(rep);
  return j;
}

inline json to_json(const sentiment_summary& s) {
  json counts, pct;
  for (auto l : all_labels) {
    counts[std::string(to_string(l))] = s.count(l);
    pct[std::string(to_string(l))] = s.percentage(l);
  }
  return {{"total", s.total}, {"counts", counts}, {"percentages", pct}};
}

inline json to_json(const trend_series& t) {
  json points = json::array();
  for (auto& p : t.points) {
    json counts;
    for (auto l : all_labels) counts[std::string(to_string(l))] = p.counts[static_cast<std::size_t>(code(l))];
    points.push_back({{"period", format_iso8601(p.period)}, {"counts", counts}, {"total", p.total()}});
  }
  return {{"granularity", to_string(t.unit)}, {"points", points}};
}

inline json to_json(const term_frequency_table& t) {
  json rows = json::array();
  for (auto& r : t.rows) rows.push_back({{"term", r.term}, {"count", r.count}, {"mean_contribution", r.mean_contribution}});
  return {{"rows", rows}};
}

}  // namespace threadlens
