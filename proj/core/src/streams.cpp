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

#include "clustersim/streams.hpp"

#include <bit>
#include <limits>

namespace clustersim::streams {

namespace {

bool valid_elem_bytes(int b) { return b == 1 || b == 2 || b == 4 || b == 8; }
bool valid_index_width(int w) { return w == 8 || w == 16 || w == 32; }

std::string hex(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s;
  do {
    s.insert(s.begin(), digits[v & 0xf]);
    v >>= 4;
  } while (v != 0);
  return "0x" + s;
}

void log_event(EventLog* log, StreamEvent::Kind kind, std::uint64_t value, std::uint8_t su) {
  if (log != nullptr) log->push_back({kind, value, su});
}

void validate_index_stream(const IndexStream& s, const Spm& spm, const char* who) {
  if (!valid_index_width(s.width_bits))
    throw ConfigError(std::string(who) + ": index width must be 8, 16 or 32 bits");
  const std::uint64_t bytes = static_cast<std::uint64_t>(s.count) * (s.width_bits / 8);
  if (s.base % (s.width_bits / 8) != 0) throw ConfigError(std::string(who) + ": misaligned index array");
  if (s.base + bytes > spm.size()) throw ConfigError(std::string(who) + ": index array exceeds SPM");
}

}  // namespace

void Spm::check(Address addr, int bytes) const {
  if (static_cast<std::uint64_t>(addr) + bytes > data_.size()) {
    throw StreamFault("SPM access at " + hex(addr) + " (" + std::to_string(bytes) + " bytes) out of range", addr);
  }
}

std::uint64_t Spm::read(Address addr, int bytes) const {
  check(addr, bytes);
  std::uint64_t v = 0;
  for (int i = bytes - 1; i >= 0; --i) v = (v << 8) | data_[addr + i];
  return v;
}

void Spm::write(Address addr, int bytes, std::uint64_t value) {
  check(addr, bytes);
  for (int i = 0; i < bytes; ++i) {
    data_[addr + i] = static_cast<std::uint8_t>(value & 0xff);
    value >>= 8;
  }
}

int IndirectConfig::effective_shift() const {
  return index_shift >= 0 ? index_shift : std::countr_zero(static_cast<unsigned>(elem_bytes));
}

std::uint64_t element_count(const AffineConfig& cfg) {
  std::uint64_t n = 1;
  for (int d = 0; d < cfg.rank; ++d) n *= cfg.bounds[d];
  return n;
}

std::vector<Address> affine_addresses(const AffineConfig& cfg, std::size_t spm_bytes, EventLog* log,
                                      std::uint8_t su, bool write) {
  if (cfg.rank < 1 || cfg.rank > kMaxRank) throw ConfigError("affine stream: rank must be in 1..4");
  if (!valid_elem_bytes(cfg.elem_bytes)) throw ConfigError("affine stream: element size must be 1, 2, 4 or 8");
  if (cfg.base % cfg.elem_bytes != 0) throw ConfigError("affine stream: misaligned base " + hex(cfg.base));
  std::int64_t lo = cfg.base;
  std::int64_t hi = cfg.base;
  for (int d = 0; d < cfg.rank; ++d) {
    if (cfg.bounds[d] == 0) throw ConfigError("affine stream: bounds must be positive");
    if (cfg.strides[d] % cfg.elem_bytes != 0) throw ConfigError("affine stream: stride not element-aligned");
    const std::int64_t span = static_cast<std::int64_t>(cfg.bounds[d] - 1) * cfg.strides[d];
    (span < 0 ? lo : hi) += span;
  }
  if (lo < 0 || hi + cfg.elem_bytes > static_cast<std::int64_t>(spm_bytes)) {
    throw ConfigError("affine stream: addresses leave the SPM (range " + std::to_string(lo) + ".." +
                      std::to_string(hi + cfg.elem_bytes) + ")");
  }

  std::vector<Address> out;
  out.reserve(element_count(cfg));
  std::array<std::uint32_t, kMaxRank> idx{};
  const auto kind = write ? StreamEvent::Kind::WriteAddr : StreamEvent::Kind::ReadAddr;
  while (true) {
    std::int64_t a = cfg.base;
    for (int d = 0; d < cfg.rank; ++d) a += static_cast<std::int64_t>(idx[d]) * cfg.strides[d];
    out.push_back(static_cast<Address>(a));
    log_event(log, kind, static_cast<std::uint64_t>(a), su);
    int d = 0;
    for (; d < cfg.rank; ++d) {
      if (++idx[d] < cfg.bounds[d]) break;
      idx[d] = 0;
    }
    if (d == cfg.rank) break;
  }
  return out;
}

std::vector<std::uint32_t> read_indices(const IndexStream& stream, const Spm& spm) {
  validate_index_stream(stream, spm, "index stream");
  const int bytes = stream.width_bits / 8;
  std::vector<std::uint32_t> out(stream.count);
  for (std::uint32_t i = 0; i < stream.count; ++i)
    out[i] = static_cast<std::uint32_t>(spm.read(stream.base + i * bytes, bytes));
  return out;
}

std::vector<Address> indirect_addresses(const IndirectConfig& cfg, const Spm& spm, EventLog* log,
                                        std::uint8_t su) {
  if (!valid_elem_bytes(cfg.elem_bytes)) throw ConfigError("indirect stream: element size must be 1, 2, 4 or 8");
  if (cfg.data_base % cfg.elem_bytes != 0) throw ConfigError("indirect stream: misaligned data base");
  if (cfg.block == 0) throw ConfigError("indirect stream: block must be positive");
  const int shift = cfg.effective_shift();
  if (shift < 0 || shift > 31) throw ConfigError("indirect stream: index shift out of range");
  const std::vector<std::uint32_t> indices = read_indices(cfg.index, spm);

  std::vector<Address> out;
  out.reserve(indices.size() * cfg.block);
  for (std::size_t n = 0; n < indices.size(); ++n) {
    const std::uint64_t offset = static_cast<std::uint64_t>(indices[n]) << shift;
    for (std::uint32_t k = 0; k < cfg.block; ++k) {
      const std::uint64_t a = cfg.data_base + offset + static_cast<std::uint64_t>(k) * cfg.elem_bytes;
      if (a + cfg.elem_bytes > spm.size() || a % cfg.elem_bytes != 0) {
        throw StreamFault("indirect stream: index " + std::to_string(indices[n]) + " at position " +
                              std::to_string(n) + " resolves to " + hex(a) + ", outside the SPM",
                          n);
      }
      out.push_back(static_cast<Address>(a));
      log_event(log, StreamEvent::Kind::ReadAddr, a, su);
    }
  }
  return out;
}

MergeResult merge_indices(MergeMode mode, std::span<const std::uint32_t> left,
                          std::span<const std::uint32_t> right, EventLog* log) {
  MergeResult r;
  std::size_t i = 0;
  std::size_t j = 0;
  auto check_order = [](std::span<const std::uint32_t> s, std::size_t pos, const char* side) {
    if (pos > 0 && pos < s.size() && s[pos] <= s[pos - 1]) {
      throw StreamFault(std::string("merge: ") + side + " index stream not strictly increasing at position " +
                            std::to_string(pos),
                        pos);
    }
  };
  check_order(left, 0, "left");
  check_order(right, 0, "right");
  while (i < left.size() && j < right.size()) {
    ++r.comparisons;
    log_event(log, StreamEvent::Kind::Comparison, 1, 0);
    if (left[i] == right[j]) {
      r.items.push_back({left[i], static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)});
      ++i;
      ++j;
      check_order(left, i, "left");
      check_order(right, j, "right");
    } else if (left[i] < right[j]) {
      if (mode == MergeMode::Union) r.items.push_back({left[i], static_cast<std::uint32_t>(i), std::nullopt});
      ++i;
      check_order(left, i, "left");
    } else {
      if (mode == MergeMode::Union) r.items.push_back({right[j], std::nullopt, static_cast<std::uint32_t>(j)});
      ++j;
      check_order(right, j, "right");
    }
  }
  if (mode == MergeMode::Union) {
    for (; i < left.size(); ++i) {
      check_order(left, i, "left");
      r.items.push_back({left[i], static_cast<std::uint32_t>(i), std::nullopt});
    }
    for (; j < right.size(); ++j) {
      check_order(right, j, "right");
      r.items.push_back({right[j], std::nullopt, static_cast<std::uint32_t>(j)});
    }
  }
  return r;
}

MergeResult merge_streams(const MergeConfig& cfg, const Spm& spm, EventLog* log) {
  const std::vector<std::uint32_t> left = read_indices(cfg.left, spm);
  const std::vector<std::uint32_t> right = read_indices(cfg.right, spm);
  return merge_indices(cfg.mode, left, right, log);
}

std::size_t emit_joint_indices(const MergeResult& merged, const IndexWriter& writer, Spm& spm, EventLog* log) {
  if (!valid_index_width(writer.width_bits)) throw ConfigError("index writer: width must be 8, 16 or 32 bits");
  const int bytes = writer.width_bits / 8;
  if (writer.base % bytes != 0) throw ConfigError("index writer: misaligned base");
  const std::size_t n = merged.items.size();
  if (n > writer.capacity) {
    throw StreamFault("index writer: " + std::to_string(n) + " indices overflow a region of " +
                          std::to_string(writer.capacity),
                      writer.capacity);
  }
  if (static_cast<std::uint64_t>(writer.base) + static_cast<std::uint64_t>(writer.capacity) * bytes > spm.size())
    throw ConfigError("index writer: output region exceeds SPM");
  const std::uint64_t max_index =
      writer.width_bits == 32 ? std::numeric_limits<std::uint32_t>::max() : (std::uint64_t{1} << writer.width_bits) - 1;
  for (std::size_t k = 0; k < n; ++k) {
    if (merged.items[k].index > max_index)
      throw StreamFault("index writer: index does not fit the configured width", k);
  }
  for (std::size_t k = 0; k < n; ++k) {
    const Address a = writer.base + static_cast<Address>(k * bytes);
    spm.write(a, bytes, merged.items[k].index);
    log_event(log, StreamEvent::Kind::IndexOut, merged.items[k].index, 2);
    log_event(log, StreamEvent::Kind::WriteAddr, a, 2);
  }
  return n;
}

}  // namespace clustersim::streams
