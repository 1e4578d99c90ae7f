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

#ifndef MTR_RNG_H_
#define MTR_RNG_H_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace mtr {

// Deterministic, platform-independent random stream.
//
// Algorithm: xoshiro256** (Blackman & Vigna). The 256-bit state is filled by
// four SplitMix64 outputs seeded with `seed ^ FNV-1a-64(tag)`. Doubles use the
// top 53 bits of a draw; normals use the Box-Muller transform on two uniform
// draws (no cached second value). None of the distribution code relies on
// <random> distributions, whose output is implementation-defined.
//
// Child streams are derived from (seed, tag) only, never from how many values
// the parent has already produced.
class SeededRng {
 public:
  explicit SeededRng(uint64_t seed, std::string tag = "root");

  uint64_t seed() const { return seed_; }
  const std::string& tag() const { return tag_; }

  uint64_t NextU64();
  // Uniform on [0, 1).
  double Uniform01();
  double Uniform(double lo, double hi);
  // Uniform integer on [0, n). n must be positive.
  uint64_t UniformInt(uint64_t n);
  double Normal(double mean = 0.0, double stddev = 1.0);
  bool Bernoulli(double p);
  // Index drawn with probability proportional to `weights`.
  int Categorical(std::span<const double> weights);

  template <typename T>
  void Shuffle(std::span<T> values) {
    for (size_t i = values.size(); i > 1; --i) {
      const size_t j = static_cast<size_t>(UniformInt(i));
      std::swap(values[i - 1], values[j]);
    }
  }

 private:
  uint64_t seed_;
  std::string tag_;
  std::array<uint64_t, 4> state_;
};

// Child stream keyed by the parent's (seed, tag) and `tag`.
SeededRng DeriveRng(const SeededRng& base, std::string_view tag);

uint64_t Fnv1a64(std::string_view text);

}  // namespace mtr

#endif  // MTR_RNG_H_
