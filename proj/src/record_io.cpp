#include "macsim/record_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string_view>

#include "macsim/error.hpp"

namespace macsim {
namespace {

std::vector<std::string> split_fields(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') {
      quoted = !quoted;
    } else if (c == ',' && !quoted) {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  fields.push_back(std::move(field));
  return fields;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

double parse_value(std::string_view text, const std::string& missing_token, std::size_t line_no) {
  text = trim(text);
  if (text == missing_token || (missing_token.empty() && text.empty())) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw IoError("line " + std::to_string(line_no) + ": '" + std::string(text) +
                  "' is not a number");
  }
  return v;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

RecordTable read_records(std::istream& in, const CsvOptions& options) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty CSV input");
  const auto header = split_fields(line);
  std::size_t id_pos = header.size();
  std::vector<std::string> columns;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const auto name = std::string(trim(header[c]));
    if (name == options.id_column) {
      id_pos = c;
    } else {
      columns.push_back(name);
    }
  }
  if (id_pos == header.size()) throw IoError("CSV header lacks id column '" + options.id_column + "'");

  RecordTable table(options.id_column, columns);
  std::vector<double> values(columns.size());
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty() || line == "\r") continue;
    const auto fields = split_fields(line);
    if (fields.size() != header.size()) {
      throw IoError("line " + std::to_string(line_no) + ": expected " +
                    std::to_string(header.size()) + " fields, got " +
                    std::to_string(fields.size()));
    }
    std::size_t k = 0;
    for (std::size_t c = 0; c < fields.size(); ++c) {
      if (c == id_pos) continue;
      values[k++] = parse_value(fields[c], options.missing_token, line_no);
    }
    table.add_record(std::string(trim(fields[id_pos])), values);
  }
  return table;
}

RecordTable read_records(const std::filesystem::path& path, const CsvOptions& options) {
  auto in = open_in(path);
  try {
    return read_records(in, options);
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

void write_records(std::ostream& out, const RecordTable& table, const CsvOptions& options) {
  out << table.id_column();
  for (const auto& c : table.columns()) out << ',' << c;
  out << '\n';
  for (std::size_t r = 0; r < table.size(); ++r) {
    out << table.id(r);
    for (std::size_t c = 0; c < table.column_count(); ++c) {
      const double v = table.value(r, c);
      out << ',' << (std::isnan(v) ? options.missing_token : format_number(v));
    }
    out << '\n';
  }
}

void write_records(const std::filesystem::path& path, const RecordTable& table,
                   const CsvOptions& options) {
  auto out = open_out(path);
  write_records(out, table, options);
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::vector<std::pair<std::string, std::string>> read_alignment(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw IoError(path.string() + ": empty alignment file");
  std::vector<std::pair<std::string, std::string>> pairs;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty() || line == "\r") continue;
    const auto f = split_fields(line);
    if (f.size() != 2) {
      throw IoError(path.string() + ": line " + std::to_string(line_no) + " needs two fields");
    }
    pairs.emplace_back(std::string(trim(f[0])), std::string(trim(f[1])));
  }
  return pairs;
}

void write_alignment(const std::filesystem::path& path, const AlignedPair& pair) {
  auto out = open_out(path);
  out << "x_id,y_id\n";
  for (std::size_t i = 0; i < pair.file_x.size(); ++i) {
    out << pair.file_x.id(i) << ',' << pair.file_y.id(pair.alignment[i]) << '\n';
  }
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace macsim
