#pragma once

#include <algorithm>
#include <chrono>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "httplib.h"
#include "threadlens/config.hpp"
#include "threadlens/dashboard.hpp"
#include "threadlens/engine.hpp"
#include "threadlens/error.hpp"
#include "threadlens/json_io.hpp"

// HTTP API under /api/v1 (JSON bodies unless noted):
//
//   POST /reviews/ingest?analyze=auto|model|lexicon|none   raw CSV or multipart "file"
//   GET  /reviews?label=&source=&from=&to=&sort=timestamp|score&order=asc|desc&page=&page_size=
//   POST /analyze          {text, method?, source?}
//   POST /train            {classifier?, alpha?, test_fraction?, seed?}
//   GET  /report
//   GET  /dashboard/summary?label=&source=&from=&to=
//   GET  /dashboard/trends?granularity=day|week|month&...
//   GET  /dashboard/terms?label=&k=&...
//   GET  /export.csv?...   text/csv
//   GET  /healthz

namespace threadlens {

using query_params = std::map<std::string, std::string>;

/// Matches analyzed reviews (by result label) or corpus records (by their
/// effective label). `from`/`to` bound the review timestamp inclusively; a
/// date-only `to` covers that whole day.
struct review_filter {
  std::optional<sentiment_label> label;
  std::optional<std::string> source;
  std::optional<timestamp> from;
  std::optional<timestamp> to;

  bool matches(const review_record& r, std::optional<sentiment_label> effective) const {
    if (label && effective != label) return false;
    if (source && r.source != *source) return false;
    if (from && r.time < *from) return false;
    if (to && r.time > *to) return false;
    return true;
  }
  bool matches(const analyzed_review& a) const { return matches(a.record, a.result.label); }
};

namespace detail {

inline const std::string* param(const query_params& q, const std::string& key) {
  auto it = q.find(key);
  return it == q.end() || it->second.empty() ? nullptr : &it->second;
}

inline std::size_t positive_param(const query_params& q, const std::string& key, std::size_t fallback,
                                  std::size_t max) {
  const std::string* v = param(q, key);
  if (!v) return fallback;
  try {
    std::size_t used = 0;
    const long long n = std::stoll(*v, &used);
    if (used == v->size() && n >= 1 && static_cast<unsigned long long>(n) <= max) return static_cast<std::size_t>(n);
  } catch (const std::exception&) {
  }
  throw error(errc::bad_filter, "'" + key + "' must be an integer in 1.." + std::to_string(max));
}

}  // namespace detail

inline review_filter parse_filter(const query_params& q) {
  review_filter f;
  if (auto* l = detail::param(q, "label")) {
    f.label = parse_label(*l);
    if (!f.label) throw error(errc::bad_filter, "unknown label '" + *l + "'");
  }
  if (auto* s = detail::param(q, "source")) f.source = *s;
  if (auto* from = detail::param(q, "from")) {
    f.from = parse_iso8601(*from);
    if (!f.from) throw error(errc::bad_filter, "bad 'from' date '" + *from + "'");
  }
  if (auto* to = detail::param(q, "to")) {
    f.to = parse_iso8601(*to);
    if (!f.to) throw error(errc::bad_filter, "bad 'to' date '" + *to + "'");
    if (to->size() == 10) *f.to += std::chrono::days{1} - std::chrono::seconds{1};
  }
  if (f.from && f.to && *f.from > *f.to) throw error(errc::bad_filter, "'from' is after 'to'");
  return f;
}

inline int http_status(errc code) {
  switch (code) {
    case errc::no_active_model: return 409;
    case errc::insufficient_labeled_data: return 422;
    case errc::empty_corpus: return 422;
    case errc::bad_filter:
    case errc::bad_request:
    case errc::missing_text_column:
    case errc::non_positive_alpha:
    case errc::bad_fraction:
    case errc::out_of_range:
    case errc::unknown_label:
    case errc::length_mismatch:
      return 400;
    default: return 500;
  }
}

/// Request handlers, independent of the transport.
class service {
 public:
  service(engine& core, service_config config) : core_(core), config_(std::move(config)) {}

  engine& core() { return core_; }
  const service_config& config() const { return config_; }

  json ingest(std::istream& csv_in, const query_params& q) {
    analysis_method method = analysis_method::automatic;
    if (auto* m = detail::param(q, "analyze")) {
      auto parsed = parse_analysis_method(*m);
      if (!parsed) throw error(errc::bad_request, "unknown analyze method '" + *m + "'");
      method = *parsed;
    }
    auto out = core_.ingest(csv_in, method);
    json j = to_json(out.report);
    j["analyzed"] = out.analyzed;
    return j;
  }

  json analyze(const json& body) {
    if (!body.is_object()) throw error(errc::bad_request, "expected a JSON object");
    std::string text;
    if (body.contains("text")) {
      if (!body["text"].is_string()) throw error(errc::bad_request, "'text' must be a string");
      text = body["text"].get<std::string>();
    }
    analysis_method method = analysis_method::automatic;
    if (body.contains("method")) {
      auto m = body["method"].is_string() ? parse_analysis_method(body["method"].get<std::string>()) : std::nullopt;
      if (!m || *m == analysis_method::none) throw error(errc::bad_request, "method must be model, lexicon or auto");
      method = *m;
    }
    std::string source = body.contains("source") && body["source"].is_string() ? body["source"].get<std::string>() : "api";
    const analyzed_review a = core_.analyze(std::move(text), method, std::move(source));
    json j = to_json(a.result);
    j["id"] = a.record.id;
    j["analyzed_at"] = format_iso8601(a.analyzed_at);
    return j;
  }

  json train(const json& body) {
    if (!body.is_object()) throw error(errc::bad_request, "expected a JSON object");
    train_params p;
    p.kind = config_.classifier;
    p.alpha = config_.alpha;
    try {
      if (body.contains("classifier")) {
        auto k = parse_classifier_kind(body["classifier"].get<std::string>());
        if (!k) throw error(errc::bad_request, "classifier must be mnb or gnb");
        p.kind = *k;
      }
      if (body.contains("alpha")) p.alpha = body["alpha"].get<double>();
      if (body.contains("test_fraction")) p.test_fraction = body["test_fraction"].get<double>();
      if (body.contains("seed")) p.seed = body["seed"].get<std::uint64_t>();
    } catch (const json::exception& e) {
      throw error(errc::bad_request, e.what());
    }
    return core_.train(p);
  }

  std::optional<json> report() const { return core_.last_report(); }

  json reviews(const query_params& q) const {
    const review_filter f = parse_filter(q);
    const std::string sort = detail::param(q, "sort") ? *detail::param(q, "sort") : "timestamp";
    const std::string order = detail::param(q, "order") ? *detail::param(q, "order") : "asc";
    if (sort != "timestamp" && sort != "score") throw error(errc::bad_filter, "sort must be timestamp or score");
    if (order != "asc" && order != "desc") throw error(errc::bad_filter, "order must be asc or desc");
    const std::size_t page = detail::positive_param(q, "page", 1, 1'000'000);
    const std::size_t page_size = detail::positive_param(q, "page_size", 50, 1000);

    const corpus all = core_.reviews();
    std::map<std::string, analyzed_review> latest;
    for (auto& a : core_.analyzed()) latest.insert_or_assign(a.record.id, a);

    struct item {
      const review_record* record;
      const analyzed_review* analysis;
    };
    std::vector<item> items;
    for (const auto& r : all.records) {
      auto it = latest.find(r.id);
      const analyzed_review* a = it == latest.end() ? nullptr : &it->second;
      std::optional<sentiment_label> effective = a ? std::optional(a->result.label) : r.label;
      if (f.matches(r, effective)) items.push_back({&r, a});
    }
    const bool desc = order == "desc";
    std::stable_sort(items.begin(), items.end(), [&](const item& x, const item& y) {
      if (sort == "timestamp") return desc ? x.record->time > y.record->time : x.record->time < y.record->time;
      // Unanalyzed reviews sort last in either direction.
      if (!x.analysis || !y.analysis) return x.analysis && !y.analysis;
      return desc ? x.analysis->result.score > y.analysis->result.score
                  : x.analysis->result.score < y.analysis->result.score;
    });

    json out;
    out["total"] = items.size();
    out["page"] = page;
    out["page_size"] = page_size;
    json rows = json::array();
    for (std::size_t i = (page - 1) * page_size; i < items.size() && i < page * page_size; ++i) {
      json row;
      row["record"] = to_json(*items[i].record);
      row["result"] = items[i].analysis ? to_json(items[i].analysis->result) : json(nullptr);
      row["analyzed_at"] = items[i].analysis ? json(format_iso8601(items[i].analysis->analyzed_at)) : json(nullptr);
      rows.push_back(row);
    }
    out["items"] = rows;
    return out;
  }

  std::vector<analyzed_review> filtered(const review_filter& f) const {
    std::vector<analyzed_review> out;
    for (auto& a : core_.analyzed())
      if (f.matches(a)) out.push_back(a);
    return out;
  }

  json summary(const query_params& q) const { return to_json(summarize(filtered(parse_filter(q)))); }

  json trends(const query_params& q) const {
    granularity g = granularity::day;
    if (auto* v = detail::param(q, "granularity")) {
      auto parsed = parse_granularity(*v);
      if (!parsed) throw error(errc::bad_filter, "granularity must be day, week or month");
      g = *parsed;
    }
    return to_json(trend(filtered(parse_filter(q)), g));
  }

  json terms(const query_params& q) const {
    sentiment_label label = sentiment_label::positive;
    if (auto* l = detail::param(q, "label")) {
      auto parsed = parse_label(*l);
      if (!parsed) throw error(errc::bad_filter, "unknown label '" + *l + "'");
      label = *parsed;
    }
    const std::size_t k = detail::positive_param(q, "k", 10, 100000);
    json j = to_json(top_terms(filtered(parse_filter(q)), label, k, core_.options().stopwords));
    j["label"] = to_string(label);
    j["k"] = k;
    return j;
  }

  std::size_t export_csv(std::ostream& out, const query_params& q) const {
    return write_export(filtered(parse_filter(q)), out);
  }

  json health() const {
    return {{"status", "ok"}, {"model", core_.model() != nullptr}, {"reviews", core_.reviews().size()},
            {"analyzed", core_.analyzed().size()}};
  }

 private:
  engine& core_;
  service_config config_;
};

namespace detail {

inline query_params to_params(const httplib::Request& req) {
  query_params q;
  for (auto& [k, v] : req.params) q[k] = v;
  return q;
}

inline void send_json(httplib::Response& res, const json& j, int status = 200) {
  res.status = status;
  res.set_content(j.dump(), "application/json");
}

template <class F>
httplib::Server::Handler guarded(F&& f) {
  return [f = std::forward<F>(f)](const httplib::Request& req, httplib::Response& res) {
    try {
      f(req, res);
    } catch (const error& e) {
      send_json(res, {{"error", to_string(e.code())}, {"message", e.what()}}, http_status(e.code()));
    } catch (const json::exception& e) {
      send_json(res, {{"error", "BadRequest"}, {"message", e.what()}}, 400);
    } catch (const std::exception& e) {
      send_json(res, {{"error", "Internal"}, {"message", e.what()}}, 500);
    }
  };
}

}  // namespace detail

/// Registers every endpoint on `server`.
inline void mount(httplib::Server& server, service& svc) {
  using detail::guarded;
  using detail::send_json;
  const std::string api = "/api/v1";

  server.Get(api + "/healthz", guarded([&](const httplib::Request&, httplib::Response& res) {
               send_json(res, svc.health());
             }));
  server.Post(api + "/reviews/ingest", guarded([&](const httplib::Request& req, httplib::Response& res) {
                std::string body = req.body;
                if (req.is_multipart_form_data()) {
                  if (!req.has_file("file")) throw error(errc::bad_request, "multipart upload needs a 'file' part");
                  body = req.get_file_value("file").content;
                }
                std::istringstream in(body);
                send_json(res, svc.ingest(in, detail::to_params(req)));
              }));
  server.Get(api + "/reviews", guarded([&](const httplib::Request& req, httplib::Response& res) {
               send_json(res, svc.reviews(detail::to_params(req)));
             }));
  server.Post(api + "/analyze", guarded([&](const httplib::Request& req, httplib::Response& res) {
                send_json(res, svc.analyze(json::parse(req.body)));
              }));
  server.Post(api + "/train", guarded([&](const httplib::Request& req, httplib::Response& res) {
                send_json(res, svc.train(req.body.empty() ? json::object() : json::parse(req.body)));
              }));
  server.Get(api + "/report", guarded([&](const httplib::Request&, httplib::Response& res) {
               if (auto r = svc.report()) send_json(res, *r);
               else send_json(res, {{"error", "NoReport"}, {"message", "no model has been trained"}}, 404);
             }));
  server.Get(api + "/dashboard/summary", guarded([&](const httplib::Request& req, httplib::Response& res) {
               send_json(res, svc.summary(detail::to_params(req)));
             }));
  server.Get(api + "/dashboard/trends", guarded([&](const httplib::Request& req, httplib::Response& res) {
               send_json(res, svc.trends(detail::to_params(req)));
             }));
  server.Get(api + "/dashboard/terms", guarded([&](const httplib::Request& req, httplib::Response& res) {
               send_json(res, svc.terms(detail::to_params(req)));
             }));
  server.Get(api + "/export.csv", guarded([&](const httplib::Request& req, httplib::Response& res) {
               std::ostringstream out;
               svc.export_csv(out, detail::to_params(req));
               res.set_content(out.str(), "text/csv; charset=utf-8");
             }));
  if (!svc.config().static_dir.empty()) server.set_mount_point("/", svc.config().static_dir);
}

}  // namespace threadlens
