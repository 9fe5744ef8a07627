// Copyright 2026 The Minifleet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MINIFLEET_IO_CSV_HPP_
#define MINIFLEET_IO_CSV_HPP_

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace minifleet::io {

/// Parse failure with 1-based line location.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + message),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Shortest round-trip decimal representation (std::to_chars).
std::string format_double(double value);

/// Locale-independent full-string double parse; throws std::invalid_argument.
double parse_double(std::string_view text);

/// Quotes a field when it contains commas, quotes or newlines.
std::string csv_escape(std::string_view field);

/// Splits one CSV line, honoring double-quote escaping.
std::vector<std::string> split_csv_line(std::string_view line);

/// Reads a whole CSV file: first row is the header, the rest are data rows.
/// Blank lines are skipped. row_lines (optional) receives the 1-based file
/// line of each data row for error reporting.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> row_lines;
};
CsvTable read_csv(const std::filesystem::path& path);

/// FNV-1a 64-bit digest of a byte string / file, as fixed-width hex.
std::uint64_t fnv1a64(std::string_view bytes);
std::string digest_hex(std::uint64_t digest);
std::string file_digest(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace minifleet::io

#endif  // MINIFLEET_IO_CSV_HPP_
