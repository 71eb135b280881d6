#include "imbgan/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <system_error>

#include "imbgan/errors.hpp"

namespace imbgan::csv {

std::optional<Record> Reader::next() {
  while (true) {
    if (in_.peek() == std::char_traits<char>::eof()) return std::nullopt;
    Record record;
    record.line = line_ + 1;
    std::string field;
    bool in_quotes = false;
    bool any_char = false;
    bool done = false;
    while (!done) {
      const int raw = in_.get();
      if (raw == std::char_traits<char>::eof()) {
        done = true;
        if (in_quotes) {
          throw ParseError(record.line, record.fields.size() + 1,
                           "unterminated quoted field");
        }
        break;
      }
      const char c = static_cast<char>(raw);
      any_char = true;
      if (in_quotes) {
        if (c == '"') {
          if (in_.peek() == '"') {
            in_.get();
            field.push_back('"');
          } else {
            in_quotes = false;
          }
        } else {
          if (c == '\n') ++line_;
          field.push_back(c);
        }
        continue;
      }
      switch (c) {
        case '"':
          in_quotes = true;
          break;
        case ',':
          record.fields.push_back(std::move(field));
          field.clear();
          break;
        case '\r':
          if (in_.peek() == '\n') in_.get();
          [[fallthrough]];
        case '\n':
          ++line_;
          done = true;
          break;
        default:
          field.push_back(c);
      }
    }
    if (!any_char) return std::nullopt;
    record.fields.push_back(std::move(field));
    if (record.fields.size() == 1 &&
        record.fields.front().find_first_not_of(" \t") == std::string::npos) {
      continue;  // blank line
    }
    return record;
  }
}

std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) {
    return std::string(field);
  }
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string format_double(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

std::string format_fixed(double value, int decimals) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value,
                                    std::chars_format::fixed, decimals);
  return std::string(buffer, result.ptr);
}

std::optional<double> parse_double(std::string_view text) {
  const auto first = text.find_first_not_of(" \t");
  if (first == std::string_view::npos) return std::nullopt;
  const auto last = text.find_last_not_of(" \t");
  text = text.substr(first, last - first + 1);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto result =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (result.ec != std::errc() || result.ptr != text.data() + text.size()) {
    return std::nullopt;
  }
  return value;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << content;
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace imbgan::csv
