#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace augsurv::cli {

/// Header plus rows of raw fields. Quoted fields may contain commas,
/// doubled quotes and line breaks.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of a header column; throws on unknown names.
  std::size_t column(const std::string& name) const;
};

CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::filesystem::path& path);

}  // namespace augsurv::cli
