// Copyright 2026 The trispin Authors
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

#include <doctest.h>

#include <random>
#include <set>
#include <vector>

#include "trispin/rng.hpp"

using trispin::Philox4x32;

TEST_CASE("Philox4x32-10 known-answer vectors") {
  using B = Philox4x32::Block;
  using K = Philox4x32::Key;
  CHECK(Philox4x32::generate(B{0, 0, 0, 0}, K{0, 0}) ==
        B{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(Philox4x32::generate(B{0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                             K{0xffffffffu, 0xffffffffu}) ==
        B{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  CHECK(Philox4x32::generate(B{0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                             K{0xa4093822u, 0x299f31d0u}) ==
        B{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
  static_assert(Philox4x32::generate(B{0, 0, 0, 0}, K{0, 0})[0] == 0x6627e8d5u);
}

TEST_CASE("engine output follows the counter") {
  Philox4x32 eng(0, 0);
  const auto first = Philox4x32::generate({0, 0, 0, 0}, {0, 0});
  const auto second = Philox4x32::generate({1, 0, 0, 0}, {0, 0});
  for (int i = 0; i < 4; ++i) CHECK(eng() == first[i]);
  for (int i = 0; i < 4; ++i) CHECK(eng() == second[i]);
}

TEST_CASE("streams are reproducible and distinct") {
  auto draw = [](std::uint64_t seed, std::uint64_t stream) {
    Philox4x32 eng(seed, stream);
    std::vector<std::uint32_t> v(16);
    for (auto& x : v) x = eng();
    return v;
  };
  CHECK(draw(42, 7) == draw(42, 7));
  CHECK(draw(42, 7) != draw(42, 8));
  CHECK(draw(42, 7) != draw(43, 7));
  // High bits of seed and stream both matter.
  CHECK(draw(1ull << 40, 0) != draw(0, 0));
  CHECK(draw(0, 1ull << 40) != draw(0, 0));
}

TEST_CASE("uniform_open01 stays inside the open interval") {
  Philox4x32 eng(123, 0);
  double sum = 0.0;
  const int n = 100000;
  std::set<double> seen;
  for (int i = 0; i < n; ++i) {
    const double u = trispin::uniform_open01(eng);
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    sum += u;
    if (i < 1000) seen.insert(u);
  }
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));
  CHECK(seen.size() == 1000);
}
