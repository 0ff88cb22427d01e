// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <variant>
#include <vector>

namespace bsm::cli {

using Cell = std::variant<double, std::int64_t, std::string>;

// 9 significant digits; non-finite values print as inf/-inf/nan.
std::string format_double(double v);

// Writes "# config_hash=<hash>" and the header row on construction.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header, const std::string& config_hash);
  void row(const std::vector<Cell>& cells);
  [[nodiscard]] const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  std::size_t columns_;
};

}  // namespace bsm::cli
