#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <utility>

// Porter (1980) suffix-stripping stemmer, steps 1a through 5b, without the
// later revisions (so "abli" -> "able" in step 2 and no "logi" rule).
// Input must be a lowercase ASCII word; other bytes are treated as
// consonants.

namespace threadlens::porter {

namespace detail {

class word {
 public:
  explicit word(std::string s) : b_(std::move(s)) {}

  std::string take() && { return std::move(b_); }
  const std::string& str() const { return b_; }

  bool consonant(std::size_t i) const {
    switch (b_[i]) {
      case 'a': case 'e': case 'i': case 'o': case 'u': return false;
      case 'y': return i == 0 || !consonant(i - 1);
      default: return true;
    }
  }

  // Number of VC sequences in b_[0, len).
  int measure(std::size_t len) const {
    int m = 0;
    std::size_t i = 0;
    while (i < len && consonant(i)) ++i;
    while (i < len) {
      while (i < len && !consonant(i)) ++i;
      if (i >= len) break;
      while (i < len && consonant(i)) ++i;
      ++m;
    }
    return m;
  }

  bool has_vowel(std::size_t len) const {
    for (std::size_t i = 0; i < len; ++i)
      if (!consonant(i)) return true;
    return false;
  }

  bool double_consonant(std::size_t len) const {
    return len >= 2 && b_[len - 1] == b_[len - 2] && consonant(len - 1);
  }

  // *o: stem ends consonant-vowel-consonant, final consonant not w, x or y.
  bool cvc(std::size_t len) const {
    if (len < 3 || !consonant(len - 1) || consonant(len - 2) || !consonant(len - 3)) return false;
    const char last = b_[len - 1];
    return last != 'w' && last != 'x' && last != 'y';
  }

  bool ends(std::string_view suffix) const {
    return b_.size() >= suffix.size() &&
           std::string_view(b_).substr(b_.size() - suffix.size()) == suffix;
  }

  std::size_t stem_len(std::string_view suffix) const { return b_.size() - suffix.size(); }

  void replace_suffix(std::string_view suffix, std::string_view with) {
    b_.erase(stem_len(suffix));
    b_.append(with);
  }

  std::size_t size() const { return b_.size(); }
  char back() const { return b_.back(); }
  void pop_back() { b_.pop_back(); }
  void push_back(char c) { b_.push_back(c); }

 private:
  std::string b_;
};

struct rule {
  std::string_view suffix;
  std::string_view replacement;
};

// Finds the first (longest, by table order) matching suffix and replaces
// it when the stem has measure > min_measure. A matched suffix whose
// condition fails ends the step.
template <std::size_t N>
void apply_measure_rules(word& w, const std::array<rule, N>& rules, int min_measure) {
  for (const rule& r : rules) {
    if (!w.ends(r.suffix)) continue;
    if (w.measure(w.stem_len(r.suffix)) > min_measure) w.replace_suffix(r.suffix, r.replacement);
    return;
  }
}

inline void step1a(word& w) {
  if (w.ends("sses")) w.replace_suffix("sses", "ss");
  else if (w.ends("ies")) w.replace_suffix("ies", "i");
  else if (w.ends("ss")) return;
  else if (w.ends("s")) w.pop_back();
}

inline void step1b(word& w) {
  if (w.ends("eed")) {
    if (w.measure(w.stem_len("eed")) > 0) w.pop_back();
    return;
  }
  std::string_view removed;
  if (w.ends("ed") && w.has_vowel(w.stem_len("ed"))) removed = "ed";
  else if (w.ends("ing") && w.has_vowel(w.stem_len("ing"))) removed = "ing";
  else return;

  w.replace_suffix(removed, "");
  if (w.ends("at") || w.ends("bl") || w.ends("iz")) {
    w.push_back('e');
  } else if (w.double_consonant(w.size())) {
    const char last = w.back();
    if (last != 'l' && last != 's' && last != 'z') w.pop_back();
  } else if (w.measure(w.size()) == 1 && w.cvc(w.size())) {
    w.push_back('e');
  }
}

inline void step1c(word& w) {
  if (w.ends("y") && w.has_vowel(w.size() - 1)) w.replace_suffix("y", "i");
}

inline void step2(word& w) {
  static constexpr std::array<rule, 20> rules{{
      {"ational", "ate"}, {"tional", "tion"}, {"enci", "ence"},   {"anci", "ance"},
      {"izer", "ize"},    {"abli", "able"},   {"alli", "al"},     {"entli", "ent"},
      {"eli", "e"},       {"ousli", "ous"},   {"ization", "ize"}, {"ation", "ate"},
      {"ator", "ate"},    {"alism", "al"},    {"iveness", "ive"}, {"fulness", "ful"},
      {"ousness", "ous"}, {"aliti", "al"},    {"iviti", "ive"},   {"biliti", "ble"},
  }};
  apply_measure_rules(w, rules, 0);
}

inline void step3(word& w) {
  static constexpr std::array<rule, 7> rules{{
      {"icate", "ic"}, {"ative", ""}, {"alize", "al"}, {"iciti", "ic"},
      {"ical", "ic"},  {"ful", ""},   {"ness", ""},
  }};
  apply_measure_rules(w, rules, 0);
}

inline void step4(word& w) {
  static constexpr std::array<std::string_view, 19> suffixes{
      "al",  "ance", "ence", "er",  "ic",  "able", "ible", "ant", "ement", "ment",
      "ent", "ion",  "ou",   "ism", "ate", "iti",  "ous",  "ive", "ize"};
  for (std::string_view suffix : suffixes) {
    if (!w.ends(suffix)) continue;
    const std::size_t len = w.stem_len(suffix);
    if (w.measure(len) <= 1) return;
    if (suffix == "ion") {
      const char c = len > 0 ? w.str()[len - 1] : '\0';
      if (c != 's' && c != 't') return;
    }
    w.replace_suffix(suffix, "");
    return;
  }
}

inline void step5a(word& w) {
  if (!w.ends("e")) return;
  const std::size_t len = w.size() - 1;
  const int m = w.measure(len);
  if (m > 1 || (m == 1 && !w.cvc(len))) w.pop_back();
}

inline void step5b(word& w) {
  if (w.back() == 'l' && w.double_consonant(w.size()) && w.measure(w.size()) > 1) w.pop_back();
}

}  // namespace detail

/// Returns the Porter stem of a lowercase alphabetic token.
inline std::string stem(std::string_view token) {
  if (token.empty()) return {};
  detail::word w{std::string(token)};
  detail::step1a(w);
  if (w.size() == 0) return std::move(w).take();
  detail::step1b(w);
  detail::step1c(w);
  detail::step2(w);
  detail::step3(w);
  detail::step4(w);
  if (w.size() == 0) return std::move(w).take();
  detail::step5a(w);
  if (w.size() > 0) detail::step5b(w);
  return std::move(w).take();
}

}  // namespace threadlens::porter
