/*
 * Copyright 2026 The clustersim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <doctest.h>

#include "clustersim/streams.hpp"
#include "oracles.hpp"
#include "sweeps.hpp"

using namespace clustersim;
using namespace clustersim::streams;

namespace {

void put(Spm& spm, Address base, int width, const std::vector<std::uint32_t>& v) {
  for (std::size_t i = 0; i < v.size(); ++i) spm.write(static_cast<Address>(base + i * (width / 8)), width / 8, v[i]);
}

std::vector<std::uint32_t> indices_of(const MergeResult& r) {
  std::vector<std::uint32_t> v;
  for (const MergeItem& it : r.items) v.push_back(it.index);
  return v;
}

}  // namespace

TEST_SUITE("streams") {

TEST_CASE("affine examples") {
  AffineConfig cfg;
  cfg.base = 0x100;
  cfg.elem_bytes = 8;
  cfg.rank = 2;
  cfg.bounds = {3, 2, 1, 1};
  cfg.strides = {8, 24, 0, 0};
  CHECK(affine_addresses(cfg, kDefaultSpmBytes) == std::vector<Address>{0x100, 0x108, 0x110, 0x118, 0x120, 0x128});

  AffineConfig one;
  one.base = 0x40;
  one.bounds = {1, 1, 1, 1};
  CHECK(affine_addresses(one, kDefaultSpmBytes) == std::vector<Address>{0x40});

  AffineConfig four;
  four.base = 0x800;
  four.rank = 4;
  four.bounds = {2, 2, 2, 2};
  four.strides = {8, -64, 256, 1024};
  const auto got = affine_addresses(four, kDefaultSpmBytes);
  CHECK(got.size() == 16);
  CHECK(got == oracle::nested_loop_affine(four));
}

TEST_CASE("affine zero stride repeats addresses") {
  AffineConfig cfg;
  cfg.base = 0x10;
  cfg.rank = 2;
  cfg.bounds = {4, 3, 1, 1};
  cfg.strides = {0, 8, 0, 0};
  const auto got = affine_addresses(cfg, kDefaultSpmBytes);
  CHECK(got.size() == 12);
  CHECK(got[0] == got[3]);
  CHECK(got[4] == 0x18);
}

TEST_CASE("affine configuration errors are raised before any element") {
  AffineConfig cfg;
  cfg.base = kDefaultSpmBytes - 8;
  cfg.bounds = {2, 1, 1, 1};
  cfg.strides = {8, 0, 0, 0};
  EventLog log;
  CHECK_THROWS_AS(affine_addresses(cfg, kDefaultSpmBytes, &log), ConfigError);
  CHECK(log.empty());
  cfg.base = 0;
  cfg.rank = 5;
  CHECK_THROWS_AS(affine_addresses(cfg, kDefaultSpmBytes), ConfigError);
  cfg.rank = 1;
  cfg.elem_bytes = 3;
  CHECK_THROWS_AS(affine_addresses(cfg, kDefaultSpmBytes), ConfigError);
  cfg.elem_bytes = 8;
  cfg.bounds[0] = 0;
  CHECK_THROWS_AS(affine_addresses(cfg, kDefaultSpmBytes), ConfigError);
}

TEST_CASE("indirect examples") {
  Spm spm;
  put(spm, 0, 16, {3, 0, 2});
  IndirectConfig cfg;
  cfg.index = {0, 16, 3};
  cfg.data_base = 0x200;
  cfg.elem_bytes = 8;
  CHECK(indirect_addresses(cfg, spm) == std::vector<Address>{0x218, 0x200, 0x210});

  cfg.index.count = 0;
  CHECK(indirect_addresses(cfg, spm).empty());

  Spm small(4096);
  put(small, 0, 8, {1, 255});
  IndirectConfig top;
  top.index = {0, 8, 2};
  top.data_base = 4096 - 64;
  top.elem_bytes = 8;
  try {
    indirect_addresses(top, small);
    FAIL("expected a stream fault");
  } catch (const StreamFault& f) {
    CHECK(f.position() == 1);
  }
}

TEST_CASE("indirect gathers with blocks and explicit shifts") {
  Spm spm;
  put(spm, 0, 32, {2, 0});
  IndirectConfig cfg;
  cfg.index = {0, 32, 2};
  cfg.data_base = 0x400;
  cfg.elem_bytes = 8;
  cfg.index_shift = 5;
  cfg.block = 4;
  CHECK(indirect_addresses(cfg, spm) ==
        std::vector<Address>{0x440, 0x448, 0x450, 0x458, 0x400, 0x408, 0x410, 0x418});
  cfg.index.width_bits = 12;
  CHECK_THROWS_AS(indirect_addresses(cfg, spm), ConfigError);
}

TEST_CASE("merge examples") {
  const std::vector<std::uint32_t> a{0, 2, 5, 7}, b{2, 3, 5, 8};
  const MergeResult in = merge_indices(MergeMode::Intersect, a, b);
  CHECK(indices_of(in) == std::vector<std::uint32_t>{2, 5});
  const MergeResult un = merge_indices(MergeMode::Union, a, b);
  CHECK(indices_of(un) == std::vector<std::uint32_t>{0, 2, 3, 5, 7, 8});
  // Two-pointer trace: (0,2) (2,2) (5,3) (5,5) (7,8), then the right side is
  // exhausted.
  CHECK(in.comparisons == 5);
  CHECK(in.comparisons == oracle::two_pointer_comparisons(a, b, true));
  CHECK(un.comparisons == 5);
  CHECK(in.items[0].left_pos == 1u);
  CHECK(in.items[0].right_pos == 0u);
  CHECK(un.items[0].right_pos == std::nullopt);
}

TEST_CASE("merge emits comparison events and rejects unsorted input") {
  const std::vector<std::uint32_t> a{1, 4, 9}, b{4, 6};
  EventLog log;
  const MergeResult r = merge_indices(MergeMode::Intersect, a, b, &log);
  std::uint64_t cmp = 0;
  for (const StreamEvent& e : log) cmp += e.kind == StreamEvent::Kind::Comparison;
  CHECK(cmp == r.comparisons);

  EventLog again;
  merge_indices(MergeMode::Intersect, a, b, &again);
  CHECK(again == log);

  const std::vector<std::uint32_t> bad{1, 3, 3, 5};
  CHECK_THROWS_AS(merge_indices(MergeMode::Union, bad, a), StreamFault);
  const std::vector<std::uint32_t> down{5, 2};
  try {
    merge_indices(MergeMode::Intersect, a, down);
    FAIL("expected a fault");
  } catch (const StreamFault& f) {
    CHECK(f.position() == 1);
  }
}

TEST_CASE("merge_streams reads index arrays from the scratchpad") {
  Spm spm;
  put(spm, 0, 8, {0, 2, 5, 7});
  put(spm, 64, 16, {2, 3, 5, 8});
  MergeConfig cfg;
  cfg.left = {0, 8, 4};
  cfg.right = {64, 8, 4};
  put(spm, 64, 8, {2, 3, 5, 8});
  CHECK(indices_of(merge_streams(cfg, spm)) == std::vector<std::uint32_t>{2, 5});
}

TEST_CASE("joint index write-out") {
  Spm spm;
  const MergeResult in = merge_indices(MergeMode::Intersect, std::vector<std::uint32_t>{0, 2, 5, 7},
                                       std::vector<std::uint32_t>{2, 3, 5, 8});
  IndexWriter w{0x100, 16, 8};
  CHECK(emit_joint_indices(in, w, spm) == 2);
  CHECK(spm.bytes()[0x100] == 0x02);
  CHECK(spm.bytes()[0x101] == 0x00);
  CHECK(spm.bytes()[0x102] == 0x05);
  CHECK(spm.bytes()[0x103] == 0x00);

  Spm untouched;
  EventLog log;
  const MergeResult none = merge_indices(MergeMode::Intersect, std::vector<std::uint32_t>{1},
                                         std::vector<std::uint32_t>{2});
  CHECK(emit_joint_indices(none, w, untouched, &log) == 0);
  for (const StreamEvent& e : log) CHECK(e.kind != StreamEvent::Kind::WriteAddr);
  for (std::uint8_t byte : untouched.bytes()) REQUIRE(byte == 0);

  const MergeResult un = merge_indices(MergeMode::Union, std::vector<std::uint32_t>{1, 3},
                                       std::vector<std::uint32_t>{2, 4});
  CHECK(emit_joint_indices(un, IndexWriter{0, 32, 4}, spm) == 4);
  for (std::uint32_t k = 0; k < 4; ++k) CHECK(spm.read(k * 4, 4) == k + 1);

  CHECK_THROWS_AS(emit_joint_indices(un, IndexWriter{0, 32, 3}, spm), StreamFault);
  const MergeResult wide = merge_indices(MergeMode::Union, std::vector<std::uint32_t>{300},
                                         std::vector<std::uint32_t>{});
  CHECK_THROWS_AS(emit_joint_indices(wide, IndexWriter{0, 8, 4}, spm), StreamFault);
}

TEST_CASE("randomized merges match set and two-pointer oracles") {
  const sweeps::Outcome o = sweeps::random_merges(2000, 11);
  INFO(o.first);
  CHECK(o.ok());
}

TEST_CASE("randomized affine and indirect streams match loop oracles") {
  sweeps::Outcome o = sweeps::random_affine(2000, 12);
  o.merge(sweeps::random_indirect(500, 13));
  INFO(o.first);
  CHECK(o.ok());
}

}  // TEST_SUITE
