#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "threadlens/error.hpp"
#include "threadlens/textprep.hpp"

namespace threadlens {

/// Dense bag-of-words counts, one slot per vocabulary term. A sparse
/// representation would be a drop-in replacement for large vocabularies.
using count_vector = std::vector<std::uint32_t>;

/// Sorted term list with document frequencies. Immutable once built.
class vocabulary {
 public:
  vocabulary() = default;

  /// Terms must be strictly ascending; each df must be >= 1.
  vocabulary(std::vector<std::string> terms, std::vector<std::size_t> doc_frequency)
      : terms_(std::move(terms)), df_(std::move(doc_frequency)) {
    if (terms_.size() != df_.size())
      throw error(errc::dimension_mismatch, "vocabulary terms and frequencies differ in length");
    for (std::size_t i = 0; i < terms_.size(); ++i) {
      if (i > 0 && !(terms_[i - 1] < terms_[i]))
        throw error(errc::bad_model_file, "vocabulary terms not strictly sorted at '" + terms_[i] + "'");
      if (df_[i] == 0) throw error(errc::bad_model_file, "zero document frequency for '" + terms_[i] + "'");
      index_.emplace(terms_[i], i);
    }
  }

  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }
  const std::vector<std::string>& terms() const { return terms_; }
  const std::string& term(std::size_t i) const { return terms_[i]; }
  std::size_t doc_frequency(std::size_t i) const { return df_[i]; }

  std::optional<std::size_t> index_of(const std::string& t) const {
    auto it = index_.find(t);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  friend bool operator==(const vocabulary& a, const vocabulary& b) {
    return a.terms_ == b.terms_ && a.df_ == b.df_;
  }

  /// Snapshot format: one "term<TAB>doc_frequency" line per term, sorted.
  void write(std::ostream& out) const {
    for (std::size_t i = 0; i < terms_.size(); ++i) out << terms_[i] << '\t' << df_[i] << '\n';
  }

  static vocabulary read(std::istream& in) {
    std::vector<std::string> terms;
    std::vector<std::size_t> df;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      auto tab = line.find('\t');
      if (tab == std::string::npos) throw error(errc::bad_model_file, "vocabulary line without tab: " + line);
      terms.push_back(line.substr(0, tab));
      try {
        df.push_back(std::stoull(line.substr(tab + 1)));
      } catch (const std::exception&) {
        throw error(errc::bad_model_file, "bad document frequency: " + line);
      }
    }
    return vocabulary(std::move(terms), std::move(df));
  }

 private:
  std::vector<std::string> terms_;
  std::vector<std::size_t> df_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct vocabulary_options {
  std::size_t min_df = 1;
  double max_df_ratio = 1.0;
};

inline vocabulary build_vocabulary(std::span<const processed_doc> docs, vocabulary_options opts = {}) {
  std::map<std::string, std::size_t> df;
  std::vector<std::string> seen;
  for (const auto& doc : docs) {
    seen = doc.tokens;
    std::sort(seen.begin(), seen.end());
    seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
    for (auto& t : seen) ++df[t];
  }
  const double max_df = opts.max_df_ratio * static_cast<double>(docs.size());
  std::vector<std::string> terms;
  std::vector<std::size_t> freq;
  for (auto& [term, n] : df) {
    if (n < opts.min_df || static_cast<double>(n) > max_df) continue;
    terms.push_back(term);
    freq.push_back(n);
  }
  return vocabulary(std::move(terms), std::move(freq));
}

/// Out-of-vocabulary tokens are ignored.
inline count_vector vectorize(const processed_doc& doc, const vocabulary& vocab) {
  count_vector counts(vocab.size(), 0);
  for (const auto& t : doc.tokens)
    if (auto i = vocab.index_of(t)) ++counts[*i];
  return counts;
}

}  // namespace threadlens
