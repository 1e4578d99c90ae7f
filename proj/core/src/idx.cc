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

#include "mtr/idx.h"

#include <fstream>
#include <iterator>
#include <string>

#include "mtr/errors.h"

namespace mtr {
namespace {

uint32_t ReadBigEndian(std::span<const uint8_t> bytes, size_t offset,
                       const char* file) {
  if (offset + 4 > bytes.size()) {
    throw FormatError(std::string(file) + ": truncated header at offset " +
                      std::to_string(offset));
  }
  return (uint32_t{bytes[offset]} << 24) | (uint32_t{bytes[offset + 1]} << 16) |
         (uint32_t{bytes[offset + 2]} << 8) | uint32_t{bytes[offset + 3]};
}

std::vector<uint8_t> ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

double IdxDataset::Pixel(size_t image, int r, int c) const {
  const size_t stride = static_cast<size_t>(rows) * cols;
  return pixels[image * stride + static_cast<size_t>(r) * cols + c] / 255.0;
}

Matrix IdxDataset::Features() const {
  const Eigen::Index n = static_cast<Eigen::Index>(size());
  const Eigen::Index stride = static_cast<Eigen::Index>(rows) * cols;
  Matrix out(n, stride);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < stride; ++j) {
      out(i, j) = pixels[static_cast<size_t>(i * stride + j)] / 255.0;
    }
  }
  return out;
}

std::vector<int> IdxDataset::Labels() const {
  return {labels.begin(), labels.end()};
}

IdxDataset ParseIdx(std::span<const uint8_t> images,
                    std::span<const uint8_t> labels) {
  const uint32_t image_magic = ReadBigEndian(images, 0, "images");
  if (image_magic != kIdxImageMagic) {
    throw FormatError("images: bad magic " + std::to_string(image_magic) +
                      " at offset 0 (expected 2051)");
  }
  const uint32_t n_images = ReadBigEndian(images, 4, "images");
  const uint32_t rows = ReadBigEndian(images, 8, "images");
  const uint32_t cols = ReadBigEndian(images, 12, "images");

  const uint32_t label_magic = ReadBigEndian(labels, 0, "labels");
  if (label_magic != kIdxLabelMagic) {
    throw FormatError("labels: bad magic " + std::to_string(label_magic) +
                      " at offset 0 (expected 2049)");
  }
  const uint32_t n_labels = ReadBigEndian(labels, 4, "labels");
  if (n_images != n_labels) {
    throw FormatError("count mismatch at offset 4: " +
                      std::to_string(n_images) + " images vs " +
                      std::to_string(n_labels) + " labels");
  }

  const uint64_t pixel_bytes = uint64_t{n_images} * rows * cols;
  if (images.size() < 16 + pixel_bytes) {
    throw FormatError("images: truncated pixel data at offset " +
                      std::to_string(images.size()) + " (expected " +
                      std::to_string(16 + pixel_bytes) + " bytes)");
  }
  if (labels.size() < 8 + uint64_t{n_labels}) {
    throw FormatError("labels: truncated label data at offset " +
                      std::to_string(labels.size()) + " (expected " +
                      std::to_string(8 + uint64_t{n_labels}) + " bytes)");
  }
  IdxDataset out;
  out.rows = static_cast<int>(rows);
  out.cols = static_cast<int>(cols);
  out.pixels.assign(images.begin() + 16, images.begin() + 16 + pixel_bytes);
  out.labels.assign(labels.begin() + 8, labels.begin() + 8 + n_labels);
  return out;
}

IdxDataset LoadIdx(const std::filesystem::path& images_path,
                   const std::filesystem::path& labels_path) {
  const std::vector<uint8_t> images = ReadFile(images_path);
  const std::vector<uint8_t> labels = ReadFile(labels_path);
  return ParseIdx(images, labels);
}

}  // namespace mtr
