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

#include "mtr/csv.h"

#include <cstdio>
#include <sstream>

#include "mtr/errors.h"

namespace mtr {
namespace {

std::vector<std::string> Split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

std::string FormatDouble(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path,
                     std::vector<std::string> header)
    : out_(path), columns_(header.size()) {
  if (!out_) throw FormatError("cannot write " + path.string());
  fields_ = std::move(header);
  EndRow();
}

CsvWriter& CsvWriter::Add(double value) {
  fields_.push_back(FormatDouble(value));
  return *this;
}

CsvWriter& CsvWriter::Add(int64_t value) {
  fields_.push_back(std::to_string(value));
  return *this;
}

CsvWriter& CsvWriter::Add(uint64_t value) {
  fields_.push_back(std::to_string(value));
  return *this;
}

CsvWriter& CsvWriter::Add(std::string_view value) {
  fields_.emplace_back(value);
  return *this;
}

CsvWriter& CsvWriter::Add(const std::optional<double>& value) {
  fields_.push_back(value ? FormatDouble(*value) : std::string());
  return *this;
}

void CsvWriter::EndRow() {
  if (fields_.size() != columns_) {
    throw FormatError("csv row has " + std::to_string(fields_.size()) +
                      " fields, expected " + std::to_string(columns_));
  }
  for (size_t i = 0; i < fields_.size(); ++i) {
    if (i > 0) out_ << ',';
    out_ << fields_[i];
  }
  out_ << '\n';
  fields_.clear();
}

size_t CsvTable::Column(std::string_view name) const {
  for (size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw FormatError("csv: no column '" + std::string(name) + "'");
}

CsvTable ReadCsv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) {
    throw FormatError(path.string() + ": missing header");
  }
  table.header = Split(line);
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    auto row = Split(line);
    if (row.size() != table.header.size()) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) +
                        ": expected " + std::to_string(table.header.size()) +
                        " fields, got " + std::to_string(row.size()));
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace mtr
