#pragma once

#include <cstdlib>
#include <fstream>
#include <functional>
#include <optional>
#include <string>

#include "json.hpp"
#include "threadlens/classify.hpp"
#include "threadlens/engine.hpp"
#include "threadlens/error.hpp"
#include "threadlens/textprep.hpp"

namespace threadlens {

/// Service settings. Precedence: environment > config file > defaults.
///
///   key               env var                      default
///   data_dir          THREADLENS_DATA_DIR          threadlens-data
///   host              THREADLENS_HOST              127.0.0.1
///   port              THREADLENS_PORT              8080
///   neutral_band      THREADLENS_NEUTRAL_BAND      0.05
///   stopwords_path    THREADLENS_STOPWORDS         (built-in list)
///   lexicon_path      THREADLENS_LEXICON           (built-in lexicon)
///   classifier        THREADLENS_CLASSIFIER        mnb
///   alpha             THREADLENS_ALPHA             1.0
///   static_dir        THREADLENS_STATIC_DIR        (none; serves the web UI when set)
struct service_config {
  std::string data_dir = "threadlens-data";
  std::string host = "127.0.0.1";
  int port = 8080;
  double neutral_band = 0.05;
  std::string stopwords_path;
  std::string lexicon_path;
  classifier_kind classifier = classifier_kind::multinomial;
  double alpha = 1.0;
  std::string static_dir;

  analysis_options analysis() const {
    analysis_options o;
    if (!stopwords_path.empty()) o.stopwords = stopword_list::load(stopwords_path);
    if (!lexicon_path.empty()) o.lex = lexicon::load(lexicon_path);
    o.thresholds.neutral_band = neutral_band;
    return o;
  }
};

using env_lookup = std::function<std::optional<std::string>(const char*)>;

inline std::optional<std::string> process_env(const char* name) {
  if (const char* v = std::getenv(name)) return std::string(v);
  return std::nullopt;
}

namespace detail {

inline void apply_setting(service_config& c, const std::string& key, const std::string& value) {
  try {
    if (key == "data_dir") c.data_dir = value;
    else if (key == "host") c.host = value;
    else if (key == "port") c.port = std::stoi(value);
    else if (key == "neutral_band") c.neutral_band = std::stod(value);
    else if (key == "stopwords_path") c.stopwords_path = value;
    else if (key == "lexicon_path") c.lexicon_path = value;
    else if (key == "static_dir") c.static_dir = value;
    else if (key == "alpha") c.alpha = std::stod(value);
    else if (key == "classifier") {
      auto k = parse_classifier_kind(value);
      if (!k) throw error(errc::bad_config, "unknown classifier '" + value + "'");
      c.classifier = *k;
    } else {
      throw error(errc::bad_config, "unknown config key '" + key + "'");
    }
  } catch (const std::logic_error&) {
    throw error(errc::bad_config, "bad value for '" + key + "': " + value);
  }
  if (c.port < 0 || c.port > 65535) throw error(errc::bad_config, "port out of range");
  if (!(c.neutral_band >= 0.0 && c.neutral_band < 1.0)) throw error(errc::bad_config, "neutral_band must be in [0, 1)");
  if (!(c.alpha > 0.0)) throw error(errc::bad_config, "alpha must be > 0");
}

}  // namespace detail

/// `path` may be empty (defaults + environment only). The file is a JSON
/// object with the keys listed above.
inline service_config load_config(const std::string& path, const env_lookup& env = process_env) {
  service_config c;
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw error(errc::file_not_readable, path);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw error(errc::bad_config, path + ": " + e.what());
    }
    if (!j.is_object()) throw error(errc::bad_config, path + ": expected a JSON object");
    for (auto& [key, value] : j.items())
      detail::apply_setting(c, key, value.is_string() ? value.get<std::string>() : value.dump());
  }
  static constexpr std::pair<const char*, const char*> vars[] = {
      {"THREADLENS_DATA_DIR", "data_dir"},         {"THREADLENS_HOST", "host"},
      {"THREADLENS_PORT", "port"},                 {"THREADLENS_NEUTRAL_BAND", "neutral_band"},
      {"THREADLENS_STOPWORDS", "stopwords_path"},  {"THREADLENS_LEXICON", "lexicon_path"},
      {"THREADLENS_CLASSIFIER", "classifier"},     {"THREADLENS_ALPHA", "alpha"},
      {"THREADLENS_STATIC_DIR", "static_dir"},
  };
  for (auto [var, key] : vars)
    if (auto v = env(var)) detail::apply_setting(c, key, *v);
  return c;
}

}  // namespace threadlens
