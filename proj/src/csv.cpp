#include "catenc/csv.hpp"

#include "catenc/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

namespace catenc {

std::vector<CsvRow> parse_csv(std::string_view text) {
  if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
  std::vector<CsvRow> rows;
  CsvRow row;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (in_quotes) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(ch);
      }
      continue;
    }
    switch (ch) {
      case '"':
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        row.push_back(std::move(field));
        field.clear();
        field_started = true;
        break;
      case '\r':
        break;
      case '\n':
        if (field_started || !field.empty() || !row.empty()) {
          row.push_back(std::move(field));
          rows.push_back(std::move(row));
        }
        row.clear();
        field.clear();
        field_started = false;
        break;
      default:
        field.push_back(ch);
        field_started = true;
    }
  }
  if (in_quotes) throw IngestError("unterminated quoted field in CSV");
  if (field_started || !field.empty() || !row.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

void write_csv_row(std::ostream& out, const CsvRow& row) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out << ',';
    out << csv_escape(row[i]);
  }
  out << '\n';
}

std::string format_number(double v) {
  if (std::isnan(v)) return "NA";
  if (v == 0.0) return "0";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestError("cannot open file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

std::optional<double> parse_number(std::string_view cell) {
  while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) cell.remove_prefix(1);
  while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t')) cell.remove_suffix(1);
  if (cell.empty() || cell == "NA") return std::nullopt;
  if (cell.front() == '+') cell.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (res.ec != std::errc() || res.ptr != cell.data() + cell.size() || !std::isfinite(v))
    return std::nullopt;
  return v;
}

bool is_missing(std::string_view cell) { return cell.empty() || cell == "NA"; }

}  // namespace

Dataset load_csv(const std::filesystem::path& path, const std::string& categorical_column,
                 const std::string& target_column, LoadReport* report) {
  if (!std::filesystem::exists(path)) throw IngestError("input file not found: " + path.string());
  const auto rows = parse_csv(read_file(path));
  if (rows.empty()) throw IngestError("CSV has no header row: " + path.string());

  const auto& header = rows.front();
  int cat_col = -1;
  int target_col = -1;
  std::vector<std::size_t> feature_cols;
  std::vector<std::string> feature_names;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == categorical_column && cat_col < 0) {
      cat_col = static_cast<int>(c);
    } else if (header[c] == target_column && target_col < 0) {
      target_col = static_cast<int>(c);
    } else {
      feature_cols.push_back(c);
      feature_names.push_back(header[c]);
    }
  }
  if (cat_col < 0) throw IngestError("categorical column not found: " + categorical_column);
  if (target_col < 0) throw IngestError("target column not found: " + target_column);
  if (feature_cols.empty()) throw IngestError("CSV has no continuous feature columns");

  LoadReport local;
  LoadReport& rep = report ? *report : local;
  rep = LoadReport{};

  std::vector<std::vector<double>> xs;
  std::vector<double> ys;
  std::vector<std::string> labels;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    ++rep.rows_read;
    const auto line = std::to_string(r + 1);
    if (row.size() != header.size()) {
      ++rep.dropped_rows;
      rep.warnings.push_back("line " + line + ": expected " + std::to_string(header.size()) +
                             " fields, found " + std::to_string(row.size()));
      continue;
    }
    const auto& label = row[static_cast<std::size_t>(cat_col)];
    auto y = parse_number(row[static_cast<std::size_t>(target_col)]);
    bool ok = !is_missing(label) && y.has_value();
    std::vector<double> x;
    x.reserve(feature_cols.size());
    for (std::size_t c : feature_cols) {
      if (!ok) break;
      auto v = parse_number(row[c]);
      if (!v) {
        ok = false;
        break;
      }
      x.push_back(*v);
    }
    if (!ok) {
      ++rep.dropped_rows;
      rep.warnings.push_back("line " + line + ": missing or non-numeric value, row dropped");
      continue;
    }
    xs.push_back(std::move(x));
    ys.push_back(*y);
    labels.push_back(label);
  }
  if (xs.empty()) throw IngestError("no usable rows in " + path.string());

  Matrix x(static_cast<Eigen::Index>(xs.size()), static_cast<Eigen::Index>(feature_cols.size()));
  Vector y(static_cast<Eigen::Index>(ys.size()));
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t j = 0; j < feature_cols.size(); ++j)
      x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = xs[i][j];
    y(static_cast<Eigen::Index>(i)) = ys[i];
  }
  return Dataset::from_labels(std::move(x), labels, std::move(y), std::move(feature_names));
}

void write_dataset_csv(const std::filesystem::path& path, const Dataset& ds,
                       const std::string& categorical_column, const std::string& target_column) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IngestError("cannot write file: " + path.string());
  CsvRow header = ds.feature_names();
  header.push_back(categorical_column);
  header.push_back(target_column);
  write_csv_row(out, header);
  CsvRow row(ds.p() + 2);
  for (std::size_t i = 0; i < ds.n(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    for (std::size_t j = 0; j < ds.p(); ++j) row[j] = format_number(ds.x()(ii, static_cast<Eigen::Index>(j)));
    row[ds.p()] = ds.label_of_row(i);
    row[ds.p() + 1] = format_number(ds.y()(ii));
    write_csv_row(out, row);
  }
}

}  // namespace catenc
