#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace threadlens::csv {

using row = std::vector<std::string>;

/// Streaming RFC-4180 reader. Accepts CRLF or LF record terminators,
/// quoted fields with embedded separators, quotes and line breaks.
/// A leading UTF-8 byte order mark is skipped.
class reader {
 public:
  explicit reader(std::istream& in) : in_(in) {
    if (in_.peek() == 0xEF) {
      char bom[3] = {};
      in_.read(bom, 3);
      if (!(static_cast<unsigned char>(bom[1]) == 0xBB && static_cast<unsigned char>(bom[2]) == 0xBF)) {
        in_.clear();
        in_.seekg(0);
      }
    }
  }

  /// Reads the next record; nullopt at end of input. `malformed` is set
  /// when a quoted field is not closed or stray characters follow a
  /// closing quote.
  std::optional<row> next(bool* malformed = nullptr) {
    if (malformed) *malformed = false;
    int c = in_.get();
    if (c == std::char_traits<char>::eof()) return std::nullopt;

    row fields;
    std::string field;
    bool quoted = false;
    bool after_quote = false;
    for (;; c = in_.get()) {
      if (c == std::char_traits<char>::eof()) {
        if (quoted && malformed) *malformed = true;
        fields.push_back(std::move(field));
        return fields;
      }
      const char ch = static_cast<char>(c);
      if (quoted) {
        if (ch == '"') {
          if (in_.peek() == '"') {
            in_.get();
            field.push_back('"');
          } else {
            quoted = false;
            after_quote = true;
          }
        } else {
          field.push_back(ch);
        }
        continue;
      }
      if (ch == ',') {
        fields.push_back(std::move(field));
        field.clear();
        after_quote = false;
      } else if (ch == '\n' || ch == '\r') {
        if (ch == '\r' && in_.peek() == '\n') in_.get();
        fields.push_back(std::move(field));
        return fields;
      } else if (ch == '"' && field.empty() && !after_quote) {
        quoted = true;
      } else {
        if (after_quote && malformed) *malformed = true;
        field.push_back(ch);
      }
    }
  }

 private:
  std::istream& in_;
};

inline bool needs_quoting(std::string_view field) {
  return field.find_first_of(",\"\r\n") != std::string_view::npos;
}

inline void write_field(std::ostream& out, std::string_view field) {
  if (!needs_quoting(field)) {
    out << field;
    return;
  }
  out << '"';
  for (char ch : field) {
    if (ch == '"') out << '"';
    out << ch;
  }
  out << '"';
}

/// Writes one record terminated by CRLF.
inline void write_row(std::ostream& out, const std::vector<std::string_view>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    write_field(out, fields[i]);
  }
  out << "\r\n";
}

}  // namespace threadlens::csv
