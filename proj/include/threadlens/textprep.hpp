#pragma once

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "threadlens/error.hpp"
#include "threadlens/porter.hpp"

namespace threadlens {

/// Ordered lowercase alphabetic stems of one review.
struct processed_doc {
  std::vector<std::string> tokens;

  friend bool operator==(const processed_doc&, const processed_doc&) = default;
};

class stopword_list {
 public:
  stopword_list() = default;
  stopword_list(std::initializer_list<std::string_view> words) {
    for (auto w : words) insert(w);
  }

  void insert(std::string_view w) {
    std::string lower(w);
    for (char& c : lower)
      if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    words_.insert(std::move(lower));
  }

  bool contains(std::string_view w) const { return words_.count(std::string(w)) != 0; }
  std::size_t size() const { return words_.size(); }
  bool empty() const { return words_.empty(); }

  /// The shipped 174-word English list (mirrors data/stopwords_en.txt).
  static const stopword_list& english();

  /// One word per line, '#' lines and blank lines ignored.
  static stopword_list load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw error(errc::file_not_readable, path);
    stopword_list list;
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      auto first = line.find_first_not_of(" \t");
      if (first == std::string::npos || line[first] == '#') continue;
      auto last = line.find_last_not_of(" \t");
      list.insert(std::string_view(line).substr(first, last - first + 1));
    }
    return list;
  }

 private:
  std::unordered_set<std::string> words_;
};

inline const stopword_list& stopword_list::english() {
  static const stopword_list list{
      "i", "me", "my", "myself", "we", "our", "ours", "ourselves", "you", "your",
      "yours", "yourself", "yourselves", "he", "him", "his", "himself", "she", "her", "hers",
      "herself", "it", "its", "itself", "they", "them", "their", "theirs", "themselves", "what",
      "which", "who", "whom", "whose", "this", "that", "these", "those", "am", "is",
      "are", "was", "were", "be", "been", "being", "have", "has", "had", "having",
      "do", "does", "did", "doing", "a", "an", "the", "and", "but", "if",
      "or", "because", "as", "until", "while", "of", "at", "by", "for", "with",
      "about", "against", "between", "into", "through", "during", "before", "after", "above", "below",
      "to", "from", "up", "down", "in", "out", "on", "off", "over", "under",
      "again", "further", "then", "once", "here", "there", "when", "where", "why", "how",
      "all", "any", "both", "each", "few", "more", "most", "other", "some", "such",
      "no", "nor", "not", "only", "own", "same", "so", "than", "too", "very",
      "s", "t", "can", "will", "just", "don", "should", "now", "d", "ll",
      "m", "o", "re", "ve", "y", "ain", "aren", "couldn", "didn", "doesn",
      "hadn", "hasn", "haven", "isn", "ma", "mightn", "mustn", "needn", "shan", "shouldn",
      "wasn", "weren", "won", "wouldn", "also", "could", "would", "shall", "may", "might",
      "must", "ought", "cannot", "let", "us", "yet", "upon", "within", "without", "via",
      "among", "although", "though", "unless",
  };
  return list;
}

namespace detail {
constexpr bool is_ascii_alnum(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}
constexpr char ascii_lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }
}  // namespace detail

/// Lowercases, splits on every byte that is not an ASCII letter or digit,
/// and drops tokens containing a digit.
inline std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  bool has_digit = false;
  auto flush = [&] {
    if (!current.empty() && !has_digit) tokens.push_back(std::move(current));
    current.clear();
    has_digit = false;
  };
  for (char c : text) {
    if (!detail::is_ascii_alnum(c)) {
      flush();
      continue;
    }
    if (c >= '0' && c <= '9') has_digit = true;
    current.push_back(detail::ascii_lower(c));
  }
  flush();
  return tokens;
}

inline std::vector<std::string> remove_stopwords(std::vector<std::string> tokens,
                                                 const stopword_list& stopwords) {
  std::erase_if(tokens, [&](const std::string& t) { return stopwords.contains(t); });
  return tokens;
}

inline std::string stem(std::string_view token) { return porter::stem(token); }

inline processed_doc preprocess(std::string_view text,
                                const stopword_list& stopwords = stopword_list::english()) {
  processed_doc doc;
  doc.tokens = remove_stopwords(tokenize(text), stopwords);
  for (auto& t : doc.tokens) t = stem(t);
  return doc;
}

}  // namespace threadlens
