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

#pragma once

// Functional model of the three per-core stream units (SUs): affine address
// generation, index-driven (indirect) streams, cooperative intersection and
// union of sorted index streams, and joint-index write-out.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "clustersim/errors.hpp"

namespace clustersim::streams {

using Address = std::uint32_t;

inline constexpr std::size_t kDefaultSpmBytes = 128 * 1024;
inline constexpr int kMaxRank = 4;

/// Byte-addressed little-endian scratchpad image.
class Spm {
 public:
  explicit Spm(std::size_t bytes = kDefaultSpmBytes) : data_(bytes, 0) {}

  std::size_t size() const { return data_.size(); }
  std::uint64_t read(Address addr, int bytes) const;
  void write(Address addr, int bytes, std::uint64_t value);
  void clear() { std::fill(data_.begin(), data_.end(), std::uint8_t{0}); }
  std::span<const std::uint8_t> bytes() const { return data_; }

 private:
  void check(Address addr, int bytes) const;
  std::vector<std::uint8_t> data_;
};

/// A fault raised while a stream is running; `position` is the element index
/// at which it was detected.
class StreamFault : public Error {
 public:
  StreamFault(const std::string& what, std::size_t position)
      : Error(ErrorKind::Config, what), position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

struct AffineConfig {
  Address base = 0;
  int elem_bytes = 8;
  int rank = 1;
  std::array<std::uint32_t, kMaxRank> bounds{1, 1, 1, 1};
  /// Signed byte strides; dimension 0 is innermost.
  std::array<std::int64_t, kMaxRank> strides{0, 0, 0, 0};
};

struct IndexStream {
  Address base = 0;
  int width_bits = 16;
  std::uint32_t count = 0;
};

struct IndirectConfig {
  IndexStream index;
  Address data_base = 0;
  int elem_bytes = 8;
  /// Left shift applied to each index to form a byte offset; negative selects
  /// log2(elem_bytes).
  int index_shift = -1;
  /// Consecutive elements fetched per index (row-segment gathers).
  std::uint32_t block = 1;

  int effective_shift() const;
};

enum class MergeMode { Intersect, Union };

struct MergeConfig {
  MergeMode mode = MergeMode::Intersect;
  IndexStream left;
  IndexStream right;
  bool emit_indices = false;
};

struct MergeItem {
  std::uint32_t index;
  std::optional<std::uint32_t> left_pos;
  std::optional<std::uint32_t> right_pos;

  friend bool operator==(const MergeItem&, const MergeItem&) = default;
};

struct MergeResult {
  std::vector<MergeItem> items;
  std::uint64_t comparisons = 0;
};

struct StreamEvent {
  enum class Kind : std::uint8_t { ReadAddr, WriteAddr, IndexOut, Comparison };
  Kind kind;
  std::uint64_t value;
  std::uint8_t su;

  friend bool operator==(const StreamEvent&, const StreamEvent&) = default;
};
using EventLog = std::vector<StreamEvent>;

/// Number of elements an affine config generates (product of bounds).
std::uint64_t element_count(const AffineConfig& cfg);

/// Validates cfg against an SPM of `spm_bytes` (ConfigError before any
/// element is produced), then emits base + sum_d i_d * strides[d] with
/// dimension 0 varying fastest.
std::vector<Address> affine_addresses(const AffineConfig& cfg, std::size_t spm_bytes, EventLog* log = nullptr,
                                      std::uint8_t su = 0, bool write = false);

std::vector<std::uint32_t> read_indices(const IndexStream& stream, const Spm& spm);

/// For each index (array order) emits data_base + (index << shift) + k*elem
/// for k in [0, block). Raises StreamFault at the first out-of-SPM address.
std::vector<Address> indirect_addresses(const IndirectConfig& cfg, const Spm& spm, EventLog* log = nullptr,
                                        std::uint8_t su = 0);

/// Two-pointer merge of strictly increasing index sequences. One comparison
/// per step; the smaller head advances, equal heads advance together.
/// Intersection stops at the first exhausted input, union drains the other
/// input without comparing.
MergeResult merge_indices(MergeMode mode, std::span<const std::uint32_t> left,
                          std::span<const std::uint32_t> right, EventLog* log = nullptr);

/// merge_indices over index streams resident in the scratchpad.
MergeResult merge_streams(const MergeConfig& cfg, const Spm& spm, EventLog* log = nullptr);

/// Write-stream target of the third SU.
struct IndexWriter {
  Address base = 0;
  int width_bits = 16;
  std::uint32_t capacity = 0;  ///< elements available in the output region
};

/// Stores the merged indices contiguously at the writer's width. Overflowing
/// the region or the index width faults before anything is written.
std::size_t emit_joint_indices(const MergeResult& merged, const IndexWriter& writer, Spm& spm,
                               EventLog* log = nullptr);

}  // namespace clustersim::streams
