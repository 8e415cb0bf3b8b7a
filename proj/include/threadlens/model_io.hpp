#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "threadlens/classify.hpp"
#include "threadlens/error.hpp"
#include "threadlens/features.hpp"
#include "threadlens/numfmt.hpp"

// Model artifact directory layout:
//
//   vocabulary.tsv   term<TAB>doc_frequency, sorted by term
//   model.tsv        "threadlens-model v1", then key<TAB>value lines and
//                    one block per class:
//                      class<TAB>label<TAB>log_prior
//                      log_likelihood<TAB>v1<TAB>...      (mnb)
//                      mean<TAB>...  variance<TAB>...     (gnb)
//
// Reals are written as the shortest text that round-trips, so equal models
// give byte-identical files.

namespace threadlens {

inline constexpr std::string_view model_header = "threadlens-model v1";

namespace detail {

inline void write_reals(std::ostream& out, std::string_view key, const std::vector<double>& xs) {
  out << key;
  for (double x : xs) out << '\t' << full_precision(x);
  out << '\n';
}

inline std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (;;) {
    auto tab = line.find('\t', start);
    parts.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) return parts;
    start = tab + 1;
  }
}

class model_reader {
 public:
  explicit model_reader(std::istream& in) : in_(in) {}

  std::vector<std::string> expect(std::string_view key, std::size_t min_fields = 2) {
    std::string line;
    if (!std::getline(in_, line)) fail("unexpected end of file, wanted '" + std::string(key) + "'");
    auto parts = split_tabs(line);
    if (parts[0] != key || parts.size() < min_fields) fail("expected '" + std::string(key) + "', got: " + line);
    return parts;
  }

  double real(const std::string& s) {
    auto v = parse_double(s);
    if (!v) fail("bad number '" + s + "'");
    return *v;
  }

  std::size_t count(const std::string& s) {
    try {
      std::size_t used = 0;
      auto v = std::stoull(s, &used);
      if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
    fail("bad count '" + s + "'");
  }

  std::vector<double> reals(std::string_view key, std::size_t n) {
    auto parts = expect(key, 1);
    if (parts.size() != n + 1)
      fail("'" + std::string(key) + "' has " + std::to_string(parts.size() - 1) + " values, want " + std::to_string(n));
    std::vector<double> xs;
    xs.reserve(n);
    for (std::size_t i = 1; i < parts.size(); ++i) xs.push_back(real(parts[i]));
    return xs;
  }

  [[noreturn]] static void fail(const std::string& why) { throw error(errc::bad_model_file, why); }

 private:
  std::istream& in_;
};

}  // namespace detail

inline void write_model_params(const classifier_model& model, std::ostream& out) {
  out << model_header << '\n';
  out << "classifier\t" << to_string(kind_of(model)) << '\n';
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, multinomial_nb_model>) out << "alpha\t" << full_precision(m.alpha) << '\n';
        else out << "epsilon\t" << full_precision(m.epsilon) << '\n';
        out << "vocabulary_size\t" << m.vocab.size() << '\n';
        out << "classes\t" << m.classes.size() << '\n';
        for (std::size_t c = 0; c < m.classes.size(); ++c) {
          out << "class\t" << to_string(m.classes[c]) << '\t' << full_precision(m.log_prior[c]) << '\n';
          if constexpr (std::is_same_v<T, multinomial_nb_model>) {
            detail::write_reals(out, "log_likelihood", m.log_likelihood[c]);
          } else {
            detail::write_reals(out, "mean", m.mean[c]);
            detail::write_reals(out, "variance", m.variance[c]);
          }
        }
      },
      model);
}

/// Throws BadModelFile unless priors and each class's term distribution
/// are normalized (within 1e-9) and every Gaussian variance is positive.
inline void check_model_invariants(const classifier_model& model) {
  auto normalized = [](auto&& logs) {
    double s = 0.0;
    for (double x : logs) s += std::exp(x);
    return std::abs(s - 1.0) <= 1e-9;
  };
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if (m.classes.empty() || m.log_prior.size() != m.classes.size())
          detail::model_reader::fail("model has no classes");
        if (!normalized(m.log_prior)) detail::model_reader::fail("class priors do not sum to 1");
        if constexpr (std::is_same_v<T, multinomial_nb_model>) {
          if (!(m.alpha > 0.0)) detail::model_reader::fail("alpha must be > 0");
          for (const auto& row : m.log_likelihood)
            if (!m.vocab.empty() && !normalized(row)) detail::model_reader::fail("term likelihoods do not sum to 1");
        } else {
          for (const auto& row : m.variance)
            for (double v : row)
              if (!(v > 0.0)) detail::model_reader::fail("non-positive variance");
        }
      },
      model);
}

inline classifier_model read_model_params(std::istream& in, vocabulary vocab) {
  std::string line;
  if (!std::getline(in, line) || line != model_header)
    detail::model_reader::fail("missing '" + std::string(model_header) + "' header");
  detail::model_reader r(in);
  const auto kind = parse_classifier_kind(r.expect("classifier")[1]);
  if (!kind) detail::model_reader::fail("unknown classifier kind");

  auto read_common = [&](auto& m) {
    const std::size_t v = r.count(r.expect("vocabulary_size")[1]);
    if (v != vocab.size()) detail::model_reader::fail("vocabulary size does not match vocabulary.tsv");
    const std::size_t k = r.count(r.expect("classes")[1]);
    m.vocab = std::move(vocab);
    return std::pair{v, k};
  };
  auto read_class = [&](auto& m) {
    auto parts = r.expect("class", 3);
    auto label = parse_label(parts[1]);
    if (!label) detail::model_reader::fail("unknown class label '" + parts[1] + "'");
    if (!m.classes.empty() && !(m.classes.back() < *label)) detail::model_reader::fail("classes not ascending");
    m.classes.push_back(*label);
    m.log_prior.push_back(r.real(parts[2]));
  };

  if (*kind == classifier_kind::multinomial) {
    multinomial_nb_model m;
    m.alpha = r.real(r.expect("alpha")[1]);
    auto [v, k] = read_common(m);
    for (std::size_t c = 0; c < k; ++c) {
      read_class(m);
      m.log_likelihood.push_back(r.reals("log_likelihood", v));
    }
    check_model_invariants(m);
    return m;
  }
  gaussian_nb_model m;
  m.epsilon = r.real(r.expect("epsilon")[1]);
  auto [v, k] = read_common(m);
  for (std::size_t c = 0; c < k; ++c) {
    read_class(m);
    m.mean.push_back(r.reals("mean", v));
    m.variance.push_back(r.reals("variance", v));
  }
  check_model_invariants(m);
  return m;
}

/// Writes vocabulary.tsv and model.tsv into `dir`, creating it. Files are
/// written under temporary names and renamed into place.
inline void save_model(const classifier_model& model, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  auto write = [&](const std::string& name, auto&& body) {
    const fs::path tmp = dir / (name + ".tmp");
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw error(errc::destination_not_writable, tmp.string());
      body(out);
      out.flush();
      if (!out) throw error(errc::destination_not_writable, tmp.string());
    }
    fs::rename(tmp, dir / name);
  };
  write("vocabulary.tsv", [&](std::ostream& out) { vocab_of(model).write(out); });
  write("model.tsv", [&](std::ostream& out) { write_model_params(model, out); });
}

inline classifier_model load_model(const std::filesystem::path& dir) {
  std::ifstream vin(dir / "vocabulary.tsv", std::ios::binary);
  if (!vin) throw error(errc::file_not_readable, (dir / "vocabulary.tsv").string());
  std::ifstream min(dir / "model.tsv", std::ios::binary);
  if (!min) throw error(errc::file_not_readable, (dir / "model.tsv").string());
  return read_model_params(min, vocabulary::read(vin));
}

inline bool model_exists(const std::filesystem::path& dir) {
  return std::filesystem::exists(dir / "model.tsv") && std::filesystem::exists(dir / "vocabulary.tsv");
}

}  // namespace threadlens
