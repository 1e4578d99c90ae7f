// Copyright 2026 The MTR Lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MTR_CSV_H_
#define MTR_CSV_H_

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mtr {

// Doubles print with %.17g so that values round-trip exactly.
std::string FormatDouble(double value);

// Comma-separated writer with a fixed header. Fields never contain commas,
// so no quoting is done.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path,
            std::vector<std::string> header);

  CsvWriter& Add(double value);
  CsvWriter& Add(int64_t value);
  CsvWriter& Add(int value) { return Add(static_cast<int64_t>(value)); }
  CsvWriter& Add(uint64_t value);
  CsvWriter& Add(std::string_view value);
  CsvWriter& Add(const char* value) { return Add(std::string_view(value)); }
  // Blank when empty.
  CsvWriter& Add(const std::optional<double>& value);
  // Throws FormatError unless the row has exactly one field per column.
  void EndRow();

 private:
  std::ofstream out_;
  size_t columns_;
  std::vector<std::string> fields_;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Throws FormatError for an unknown column.
  size_t Column(std::string_view name) const;
};

// Throws FormatError if the file is missing or a row's width differs from
// the header's.
CsvTable ReadCsv(const std::filesystem::path& path);

}  // namespace mtr

#endif  // MTR_CSV_H_
