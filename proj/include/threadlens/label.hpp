#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>

#include "threadlens/error.hpp"

namespace threadlens {

/// Integer codes are fixed: negative 0, neutral 1, positive 2.
enum class sentiment_label : int { negative = 0, neutral = 1, positive = 2 };

inline constexpr std::array<sentiment_label, 3> all_labels{
    sentiment_label::negative, sentiment_label::neutral, sentiment_label::positive};

constexpr int code(sentiment_label l) noexcept { return static_cast<int>(l); }

constexpr std::string_view to_string(sentiment_label l) noexcept {
  switch (l) {
    case sentiment_label::negative: return "negative";
    case sentiment_label::neutral: return "neutral";
    case sentiment_label::positive: return "positive";
  }
  return "?";
}

inline std::optional<sentiment_label> label_from_code(int c) {
  if (c < 0 || c > 2) return std::nullopt;
  return static_cast<sentiment_label>(c);
}

/// Accepts the names (any ASCII case), the short forms pos/neu/neg, or the
/// integer codes.
inline std::optional<sentiment_label> parse_label(std::string_view s) {
  std::string lower(s);
  for (char& c : lower)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  if (lower == "negative" || lower == "neg" || lower == "0") return sentiment_label::negative;
  if (lower == "neutral" || lower == "neu" || lower == "1") return sentiment_label::neutral;
  if (lower == "positive" || lower == "pos" || lower == "2") return sentiment_label::positive;
  return std::nullopt;
}

/// 1-2 negative, 3 neutral, 4-5 positive.
inline sentiment_label rating_to_label(int rating) {
  if (rating < 1 || rating > 5) throw error(errc::out_of_range, "rating " + std::to_string(rating) + " not in 1..5");
  if (rating <= 2) return sentiment_label::negative;
  if (rating == 3) return sentiment_label::neutral;
  return sentiment_label::positive;
}

/// Symmetric neutral band around 0 on the [-1, 1] scale.
struct label_thresholds {
  double neutral_band = 0.05;
};

inline void check_score(double score) {
  if (!(score >= -1.0 && score <= 1.0))
    throw error(errc::out_of_range, "score " + std::to_string(score) + " not in [-1, 1]");
}

inline sentiment_label score_to_label(double score, label_thresholds t = {}) {
  check_score(score);
  if (score > t.neutral_band) return sentiment_label::positive;
  if (score < -t.neutral_band) return sentiment_label::negative;
  return sentiment_label::neutral;
}

/// Maps [-1, 1] onto the 1..5 star scale: round(3 + 2s), halves away from zero.
inline int score_to_five_point(double score) {
  check_score(score);
  const long r = std::lround(3.0 + 2.0 * score);
  return static_cast<int>(r < 1 ? 1 : (r > 5 ? 5 : r));
}

}  // namespace threadlens
