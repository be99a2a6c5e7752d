#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "macsim/datamodel.hpp"

namespace macsim {

struct CsvOptions {
  std::string id_column = "RECID";
  std::string missing_token;  // empty field by default
};

/// Header row of column names, one record per row. The id column may sit at
/// any position; every other column must parse as a number or the missing
/// token. Throws IoError / ConfigError.
RecordTable read_records(std::istream& in, const CsvOptions& options = {});
RecordTable read_records(const std::filesystem::path& path, const CsvOptions& options = {});

void write_records(std::ostream& out, const RecordTable& table, const CsvOptions& options = {});
void write_records(const std::filesystem::path& path, const RecordTable& table,
                   const CsvOptions& options = {});

/// Two-column file of (x id, y id) true-match pairs with a header row.
std::vector<std::pair<std::string, std::string>> read_alignment(const std::filesystem::path& path);
void write_alignment(const std::filesystem::path& path, const AlignedPair& pair);

/// Shortest round-trip decimal text for v ("1980", "0.97").
std::string format_number(double v);

}  // namespace macsim
