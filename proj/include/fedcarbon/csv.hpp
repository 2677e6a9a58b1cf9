#pragma once

// Minimal comma-separated reader/writer for the bundled data files. None of
// the schemas need quoting, so fields are split on ',' and trimmed.

#include <cstddef>
#include <filesystem>
#include <istream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fedcarbon {

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ResolutionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CsvRow {
  std::size_t line = 0;  // 1-based line number in the source
  std::vector<std::string> fields;
};

struct CsvTable {
  std::string source;
  std::vector<std::string> header;
  std::vector<CsvRow> rows;

  /// Index of a header column; throws ParseError when absent.
  std::size_t column(std::string_view name) const;
  bool has_column(std::string_view name) const;
};

/// Reads a header line plus rows. Blank lines and lines starting with '#'
/// are skipped. Every row must have as many fields as the header.
CsvTable read_csv(std::istream& in, const std::string& source);
CsvTable read_csv_file(const std::filesystem::path& path);

/// Strict numeric parsing ("C" locale, whole field must be consumed).
double parse_double(std::string_view text, const std::string& where);
long long parse_int(std::string_view text, const std::string& where);

std::string trim(std::string_view text);

}  // namespace fedcarbon
