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

#ifndef MTR_IDX_H_
#define MTR_IDX_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "mtr/matrix.h"

namespace mtr {

inline constexpr uint32_t kIdxImageMagic = 2051;
inline constexpr uint32_t kIdxLabelMagic = 2049;

// Images and labels from a pair of IDX files (ubyte, big-endian headers).
struct IdxDataset {
  int rows = 0;
  int cols = 0;
  std::vector<uint8_t> pixels;  // count * rows * cols, row-major per image.
  std::vector<uint8_t> labels;

  size_t size() const { return labels.size(); }
  // Pixel scaled to [0, 1].
  double Pixel(size_t image, int r, int c) const;
  // count x (rows * cols) matrix of scaled pixels.
  Matrix Features() const;
  std::vector<int> Labels() const;
};

// Throws FormatError (naming the byte offset) on a bad magic, a truncated
// buffer or mismatched counts.
IdxDataset ParseIdx(std::span<const uint8_t> images,
                    std::span<const uint8_t> labels);

IdxDataset LoadIdx(const std::filesystem::path& images_path,
                   const std::filesystem::path& labels_path);

}  // namespace mtr

#endif  // MTR_IDX_H_
