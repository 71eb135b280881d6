#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace imbgan::csv {

struct Record {
  std::size_t line = 0;  // 1-based physical line where the record starts
  std::vector<std::string> fields;
};

// RFC-4180 reader: comma separated, double-quote quoting with "" escapes,
// CRLF or LF line endings, quoted fields may span lines.
class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  // Next non-blank record, or nullopt at end of input.
  std::optional<Record> next();

 private:
  std::istream& in_;
  std::size_t line_ = 0;
};

std::string escape(std::string_view field);

// Shortest decimal text that parses back to the same double.
std::string format_double(double value);
// Fixed notation with the given number of decimals.
std::string format_fixed(double value, int decimals);

// Parses a whole field (surrounding blanks allowed) as a double.
std::optional<double> parse_double(std::string_view text);

// Writes `content` to `path`, throwing IoError on failure.
void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace imbgan::csv
