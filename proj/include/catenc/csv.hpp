#pragma once

#include "catenc/dataset.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace catenc {

using CsvRow = std::vector<std::string>;

// RFC-4180 reader: quoted fields, doubled quotes, CRLF or LF line ends.
// A UTF-8 byte-order mark on the first field is stripped.
std::vector<CsvRow> parse_csv(std::string_view text);

std::string csv_escape(std::string_view field);
void write_csv_row(std::ostream& out, const CsvRow& row);

// Shortest decimal string that round-trips to the same double.
std::string format_number(double v);

struct LoadReport {
  std::size_t rows_read = 0;
  std::size_t dropped_rows = 0;
  std::vector<std::string> warnings;
};

// Reads a header-row CSV. Every column other than the categorical and target
// columns is a continuous feature. Rows with an empty cell, "NA", or a
// non-numeric/non-finite value are dropped and counted in `report`.
Dataset load_csv(const std::filesystem::path& path, const std::string& categorical_column,
                 const std::string& target_column, LoadReport* report = nullptr);

// Writes columns x..., `categorical_column`, `target_column`.
void write_dataset_csv(const std::filesystem::path& path, const Dataset& ds,
                       const std::string& categorical_column = "cat",
                       const std::string& target_column = "y");

std::string read_file(const std::filesystem::path& path);

}  // namespace catenc
