#pragma once

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "threadlens/config.hpp"
#include "threadlens/dashboard.hpp"
#include "threadlens/engine.hpp"
#include "threadlens/error.hpp"
#include "threadlens/evaluate.hpp"
#include "threadlens/model_io.hpp"
#include "threadlens/service.hpp"

// Batch front end over the engine. Exit codes: 0 success, 1 usage error,
// 2 data error.

namespace threadlens::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_usage = 1;
inline constexpr int exit_data = 2;

namespace detail {

struct usage_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::vector<int> read_label_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw error(errc::file_not_readable, path);
  std::vector<int> labels;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t");
    const std::string token = line.substr(first, last - first + 1);
    try {
      std::size_t used = 0;
      const int v = std::stoi(token, &used);
      if (used != token.size()) throw std::invalid_argument(token);
      labels.push_back(v);
    } catch (const std::logic_error&) {
      throw error(errc::unknown_label, path + ":" + std::to_string(lineno) + ": not an integer label: " + token);
    }
  }
  return labels;
}

inline timestamp parse_now(const std::string& s) {
  auto t = parse_iso8601(s);
  if (!t) throw usage_error("--now expects an ISO-8601 UTC timestamp, got '" + s + "'");
  return *t;
}

struct shared_flags {
  std::string now;
  std::string stopwords;
  std::string lexicon;
  double neutral_band = 0.05;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--now", now, "Fixed UTC time for generated timestamps (YYYY-MM-DDThh:mm:ssZ)");
    cmd->add_option("--stopwords", stopwords, "Stopword file (one word per line)");
    cmd->add_option("--lexicon", lexicon, "Lexicon file (stem<TAB>weight)");
    cmd->add_option("--neutral-band", neutral_band, "Half-width of the neutral score band")
        ->check(CLI::Range(0.0, 0.999999));
  }

  analysis_options analysis() const {
    analysis_options o;
    if (!stopwords.empty()) o.stopwords = stopword_list::load(stopwords);
    if (!lexicon.empty()) o.lex = lexicon::load(lexicon);
    o.thresholds.neutral_band = neutral_band;
    return o;
  }

  engine::clock_fn clock() const {
    if (now.empty()) return now_utc;
    const timestamp fixed = parse_now(now);
    return [fixed] { return fixed; };
  }
};

inline std::optional<render_options> parse_render(const std::string& support, int digits) {
  render_options r;
  r.digits = digits;
  if (support == "auto") r.support = support_format::automatic;
  else if (support == "int") r.support = support_format::integer;
  else if (support == "float") r.support = support_format::decimal;
  else return std::nullopt;
  return r;
}

}  // namespace detail

/// Runs one invocation; `args` excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"threadlens: review sentiment analysis (ingest, train, analyze, eval, export, serve)", "threadlens"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Load a review CSV into a store and analyze it");
  std::string ingest_in, ingest_store, ingest_method = "auto";
  detail::shared_flags ingest_flags;
  ingest->add_option("--in", ingest_in, "Input CSV (header: id,source,timestamp,text,rating,label)")->required();
  ingest->add_option("--store", ingest_store, "Store directory")->required();
  ingest->add_option("--analyze", ingest_method, "auto|model|lexicon|none")
      ->check(CLI::IsMember({"auto", "model", "lexicon", "none"}));
  ingest_flags.add_to(ingest);

  // train
  auto* train = app.add_subcommand("train", "Train a classifier on the store's labeled reviews");
  std::string train_store, train_classifier = "mnb", train_format = "text";
  train_params tp;
  detail::shared_flags train_flags;
  train->add_option("--store", train_store, "Store directory")->required();
  train->add_option("--classifier", train_classifier, "mnb|gnb")->check(CLI::IsMember({"mnb", "gnb"}));
  train->add_option("--alpha", tp.alpha, "Additive smoothing (mnb)")->check(CLI::PositiveNumber);
  train->add_option("--test-fraction", tp.test_fraction, "Holdout fraction in (0, 1)");
  train->add_option("--seed", tp.seed, "Split seed");
  train->add_option("--format", train_format, "text|json")->check(CLI::IsMember({"text", "json"}));
  train_flags.add_to(train);

  // analyze
  auto* analyze = app.add_subcommand("analyze", "Print 'label score' for text");
  std::string analyze_text_value, analyze_in, analyze_store, analyze_method = "auto";
  detail::shared_flags analyze_flags;
  auto* text_opt = analyze->add_option("--text", analyze_text_value, "Text to analyze");
  auto* in_opt = analyze->add_option("--in", analyze_in, "File with one text per line");
  text_opt->excludes(in_opt);
  analyze->add_option("--store", analyze_store, "Store whose trained model to use");
  analyze->add_option("--method", analyze_method, "auto|model|lexicon")
      ->check(CLI::IsMember({"auto", "model", "lexicon"}));
  analyze_flags.add_to(analyze);

  // eval
  auto* eval = app.add_subcommand("eval", "Classification report from label files");
  std::string eval_true, eval_pred, eval_support = "auto", eval_format = "text";
  int eval_digits = 2;
  eval->add_option("--true", eval_true, "True labels, one integer per line")->required();
  eval->add_option("--pred", eval_pred, "Predicted labels, one integer per line")->required();
  eval->add_option("--support-format", eval_support, "auto|int|float")
      ->check(CLI::IsMember({"auto", "int", "float"}));
  eval->add_option("--digits", eval_digits, "Decimal places")->check(CLI::Range(0, 10));
  eval->add_option("--format", eval_format, "text|tsv|json")->check(CLI::IsMember({"text", "tsv", "json"}));

  // export
  auto* exp = app.add_subcommand("export", "Write the analyzed reviews as a CSV extract");
  std::string export_store, export_out;
  exp->add_option("--store", export_store, "Store directory")->required();
  exp->add_option("--out", export_out, "Destination CSV")->required();

  // serve
  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  std::string serve_config, serve_data_dir;
  int serve_port = -1;
  serve->add_option("--config", serve_config, "JSON config file");
  serve->add_option("--port", serve_port, "Port (overrides config)")->check(CLI::Range(0, 65535));
  serve->add_option("--data-dir", serve_data_dir, "Data directory (overrides config)");

  std::vector<const char*> argv{"threadlens"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const auto subs = app.get_subcommands();
    err << (subs.empty() ? app.help() : subs.front()->help());
    return exit_usage;
  }

  try {
    if (*ingest) {
      auto clock = ingest_flags.clock();
      std::ifstream in(ingest_in, std::ios::binary);
      if (!in) throw error(errc::file_not_readable, ingest_in);
      engine core(ingest_store, ingest_flags.analysis(), std::move(clock));
      auto result = core.ingest(in, *parse_analysis_method(ingest_method), {}, ingest_in);
      const auto& r = result.report;
      out << "rows_read " << r.rows_read << "\nrows_kept " << r.rows_kept << "\nduplicates_removed "
          << r.duplicates_removed << "\nmissing_dropped " << r.missing_dropped << "\nparse_errors " << r.parse_errors
          << "\nanalyzed " << result.analyzed << "\n";
      return exit_ok;
    }

    if (*train) {
      tp.kind = *parse_classifier_kind(train_classifier);
      engine core(train_store, train_flags.analysis(), train_flags.clock());
      const json report = core.train(tp);
      if (train_format == "json") out << report.dump(2) << "\n";
      else out << report["text"].get<std::string>();
      return exit_ok;
    }

    if (*analyze) {
      if (!text_opt->count() && !in_opt->count()) throw detail::usage_error("analyze needs --text or --in");
      const auto opts = analyze_flags.analysis();
      std::optional<classifier_model> model;
      if (!analyze_store.empty() && model_exists(fs::path(analyze_store) / "model"))
        model = load_model(fs::path(analyze_store) / "model");
      const auto method = *parse_analysis_method(analyze_method);
      auto emit = [&](const std::string& text) {
        const auto r = analyze_text(text, method, model ? &*model : nullptr, opts);
        out << to_string(r.label) << ' ' << format_score(r.score) << '\n';
      };
      if (text_opt->count()) {
        emit(analyze_text_value);
      } else {
        std::ifstream in(analyze_in, std::ios::binary);
        if (!in) throw error(errc::file_not_readable, analyze_in);
        std::string line;
        while (std::getline(in, line)) {
          if (!line.empty() && line.back() == '\r') line.pop_back();
          emit(line);
        }
      }
      return exit_ok;
    }

    if (*eval) {
      const auto render = detail::parse_render(eval_support, eval_digits);
      const auto y_true = detail::read_label_file(eval_true);
      const auto y_pred = detail::read_label_file(eval_pred);
      const auto rep = make_classification_report<int>(y_true, y_pred);
      if (eval_format == "tsv") out << render_report_tsv(rep);
      else if (eval_format == "json") out << to_json(rep).dump(2) << "\n";
      else out << render_report(rep, *render);
      return exit_ok;
    }

    if (*exp) {
      if (!fs::exists(export_store)) throw error(errc::file_not_readable, export_store);
      engine core(export_store);
      const auto analyzed = core.analyzed();
      const std::size_t n = export_csv(analyzed, export_out);
      out << "wrote " << n << " rows to " << export_out << "\n";
      return exit_ok;
    }

    if (*serve) {
      service_config config = load_config(serve_config);
      if (serve_port >= 0) config.port = serve_port;
      if (!serve_data_dir.empty()) config.data_dir = serve_data_dir;
      engine core(config.data_dir, config.analysis());
      service svc(core, config);
      httplib::Server server;
      mount(server, svc);
      if (!server.bind_to_port(config.host, config.port)) {
        err << "error: cannot listen on " << config.host << ":" << config.port << "\n";
        return exit_data;
      }
      out << "threadlens listening on http://" << config.host << ":" << config.port << "/api/v1\n" << std::flush;
      server.listen_after_bind();
      return exit_ok;
    }
  } catch (const detail::usage_error& e) {
    err << "error: " << e.what() << "\n\n" << app.get_subcommands().front()->help();
    return exit_usage;
  } catch (const error& e) {
    err << "error: " << e.what() << "\n";
    return exit_data;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_data;
  }
  return exit_usage;
}

}  // namespace threadlens::cli
