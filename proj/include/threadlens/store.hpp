#pragma once

#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <string>
#include <vector>

#include "threadlens/corpus.hpp"
#include "threadlens/dashboard.hpp"
#include "threadlens/error.hpp"
#include "threadlens/json_io.hpp"
#include "threadlens/model_io.hpp"

// Data directory layout:
//
//   reviews.jsonl    corpus log, one review_record per line
//   analyzed.jsonl   analyzed-review log, one analyzed_review per line
//   model/           active model artifact (see model_io.hpp)
//   report.json      classification report of the active model
//
// Logs are append-only. A torn final line (crash mid-write) is skipped on
// replay; any other unparsable line is an error.

namespace threadlens {

namespace fs = std::filesystem;

class jsonl_log {
 public:
  explicit jsonl_log(fs::path path) : path_(std::move(path)) {}

  const fs::path& path() const { return path_; }

  template <class F>
  std::size_t replay(F&& on_line) const {
    std::ifstream in(path_, std::ios::binary);
    if (!in) return 0;
    std::string line;
    std::size_t n = 0;
    std::vector<std::string> lines;
    while (std::getline(in, line)) lines.push_back(std::move(line));
    const bool torn_tail = !lines.empty() && !ends_with_newline();
    for (std::size_t i = 0; i < lines.size(); ++i) {
      if (lines[i].empty()) continue;
      json j;
      try {
        j = json::parse(lines[i]);
      } catch (const json::exception&) {
        if (i + 1 == lines.size() && torn_tail) break;
        throw error(errc::corrupt_store, path_.string() + ": corrupt line " + std::to_string(i + 1));
      }
      on_line(j);
      ++n;
    }
    return n;
  }

  /// Truncates a torn final line so later appends start on a fresh line.
  void repair() const {
    if (ends_with_newline()) return;
    std::ifstream in(path_, std::ios::binary);
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const auto last = content.rfind('\n');
    in.close();
    fs::resize_file(path_, last == std::string::npos ? 0 : last + 1);
  }

  void append(const std::vector<json>& rows) {
    if (rows.empty()) return;
    std::ofstream out(path_, std::ios::binary | std::ios::app);
    if (!out) throw error(errc::destination_not_writable, path_.string());
    for (const auto& j : rows) out << j.dump() << '\n';
    out.flush();
    if (!out) throw error(errc::destination_not_writable, path_.string());
  }

 private:
  bool ends_with_newline() const {
    std::ifstream in(path_, std::ios::binary | std::ios::ate);
    if (!in || in.tellg() == 0) return true;
    in.seekg(-1, std::ios::end);
    return in.get() == '\n';
  }

  fs::path path_;
};

/// File-backed stores; not synchronized (callers serialize writers).
class store {
 public:
  explicit store(fs::path dir)
      : dir_(std::move(dir)), reviews_(dir_ / "reviews.jsonl"), analyzed_(dir_ / "analyzed.jsonl") {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw error(errc::destination_not_writable, dir_.string() + ": " + ec.message());
    reviews_.replay([&](const json& j) { corpus_.records.push_back(review_from_json(j)); });
    analyzed_.replay([&](const json& j) { analyzed_list_.push_back(analyzed_from_json(j)); });
    reviews_.repair();
    analyzed_.repair();
    corpus_.provenance = reviews_.path().string();
  }

  const fs::path& dir() const { return dir_; }
  const corpus& reviews() const { return corpus_; }
  const std::vector<analyzed_review>& analyzed() const { return analyzed_list_; }

  void append_reviews(const std::vector<review_record>& rs) {
    std::vector<json> rows;
    for (auto& r : rs) rows.push_back(to_json(r));
    reviews_.append(rows);
    corpus_.records.insert(corpus_.records.end(), rs.begin(), rs.end());
  }

  void append_analyzed(const std::vector<analyzed_review>& as) {
    std::vector<json> rows;
    for (auto& a : as) rows.push_back(to_json(a));
    analyzed_.append(rows);
    analyzed_list_.insert(analyzed_list_.end(), as.begin(), as.end());
  }

  fs::path model_dir() const { return dir_ / "model"; }

  /// Recovers from an interrupted swap: a staged model with no active one
  /// is promoted.
  std::optional<classifier_model> load_model() const {
    const fs::path staged = dir_ / "model.staging";
    std::error_code ec;
    if (!model_exists(model_dir()) && model_exists(staged)) fs::rename(staged, model_dir(), ec);
    if (!model_exists(model_dir())) return std::nullopt;
    return threadlens::load_model(model_dir());
  }

  /// Write-new-then-rename so a reader never sees a half-written model.
  void save_model(const classifier_model& m, const json& report) const {
    const fs::path staged = dir_ / "model.staging";
    const fs::path old = dir_ / "model.old";
    std::error_code ec;
    fs::remove_all(staged, ec);
    fs::remove_all(old, ec);
    threadlens::save_model(m, staged);
    if (fs::exists(model_dir())) fs::rename(model_dir(), old);
    fs::rename(staged, model_dir());
    fs::remove_all(old, ec);

    const fs::path tmp = dir_ / "report.json.tmp";
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw error(errc::destination_not_writable, tmp.string());
      out << report.dump(2) << '\n';
    }
    fs::rename(tmp, dir_ / "report.json");
  }

  std::optional<json> load_report() const {
    std::ifstream in(dir_ / "report.json", std::ios::binary);
    if (!in) return std::nullopt;
    try {
      return json::parse(in);
    } catch (const json::exception&) {
      return std::nullopt;
    }
  }

 private:
  fs::path dir_;
  jsonl_log reviews_;
  jsonl_log analyzed_;
  corpus corpus_;
  std::vector<analyzed_review> analyzed_list_;
};

}  // namespace threadlens
