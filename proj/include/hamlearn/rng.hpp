// Copyright 2026 The hamlearn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>

namespace hamlearn {

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Counter-based random stream: draw i is a pure function of (key, i), so
/// any task can regenerate its numbers without shared generator state.
class CounterStream {
 public:
  constexpr CounterStream() = default;
  constexpr explicit CounterStream(std::uint64_t key) : key_(key) {}

  /// Child stream keyed by this stream plus a tag.
  constexpr CounterStream derive(std::uint64_t tag) const {
    return CounterStream(mix64(key_ ^ mix64(tag + 0x632be59bd9b4e019ULL)));
  }
  constexpr CounterStream derive(std::initializer_list<std::uint64_t> tags) const {
    CounterStream s = *this;
    for (auto t : tags) s = s.derive(t);
    return s;
  }

  constexpr std::uint64_t bits(std::uint64_t counter) const {
    return mix64(key_ + 0xd1b54a32d192ed03ULL * (counter + 1));
  }

  /// Uniform double in [0, 1) with 53 random bits.
  constexpr double uniform(std::uint64_t counter) const {
    return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
  }

  constexpr std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_ = 0;
};

/// Standard normal variate i of a stream (Box-Muller over draws 2i, 2i+1).
inline double normal(const CounterStream& stream, std::uint64_t i) {
  const double u1 = 1.0 - stream.uniform(2 * i);
  const double u2 = stream.uniform(2 * i + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace hamlearn
