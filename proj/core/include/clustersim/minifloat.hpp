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

// Bit-exact emulation of the worker FPU number formats.
//
// Every operation computes the exact real result of its operands and rounds
// once, to nearest with ties to even. Subnormals are supported throughout and
// any NaN result is the canonical quiet NaN (sign clear, payload zero apart
// from the quiet bit).

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace clustersim::minifloat {

enum class Format : std::uint8_t { FP64, FP32, FP16, FP16ALT, FP8, FP8ALT };

inline constexpr std::array<Format, 6> kAllFormats = {Format::FP64, Format::FP32,    Format::FP16,
                                                      Format::FP16ALT, Format::FP8, Format::FP8ALT};

struct FormatInfo {
  Format id;
  std::string_view name;
  int exp_bits;
  int mant_bits;

  constexpr int width() const { return 1 + exp_bits + mant_bits; }
  constexpr int bias() const { return (1 << (exp_bits - 1)) - 1; }
  /// SIMD lanes in the 64-bit FPU datapath.
  constexpr int lanes() const { return 64 / width(); }
  constexpr std::uint64_t mask() const {
    return width() == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << width()) - 1;
  }
};

constexpr FormatInfo info(Format f) {
  switch (f) {
    case Format::FP64: return {f, "FP64", 11, 52};
    case Format::FP32: return {f, "FP32", 8, 23};
    case Format::FP16: return {f, "FP16", 5, 10};
    case Format::FP16ALT: return {f, "FP16ALT", 8, 7};
    case Format::FP8: return {f, "FP8", 5, 2};
    case Format::FP8ALT: return {f, "FP8ALT", 4, 3};
  }
  return {Format::FP64, "FP64", 11, 52};
}

constexpr int width(Format f) { return info(f).width(); }
constexpr int lanes(Format f) { return info(f).lanes(); }
std::string_view to_string(Format f);
/// Case-insensitive; accepts the names above.
std::optional<Format> parse_format(std::string_view name);

/// A raw encoding tagged with its format. The constructor masks nothing:
/// out-of-range payloads are rejected with ConfigError.
class Bits {
 public:
  constexpr Bits() = default;
  Bits(Format format, std::uint64_t raw);

  Format format() const { return format_; }
  std::uint64_t raw() const { return raw_; }

  bool is_nan() const;
  bool is_inf() const;
  bool is_zero() const;
  bool sign() const;

  friend bool operator==(const Bits&, const Bits&) = default;

 private:
  Format format_ = Format::FP64;
  std::uint64_t raw_ = 0;
};

/// Canonical quiet NaN, signed infinity, signed zero and largest finite value.
Bits quiet_nan(Format f);
Bits infinity(Format f, bool negative = false);
Bits zero(Format f, bool negative = false);
Bits max_finite(Format f, bool negative = false);

/// Exact value of an encoding. Every supported format embeds in binary64, so
/// the result is exact.
double decode(Format f, std::uint64_t raw);
inline double decode(Bits b) { return decode(b.format(), b.raw()); }

/// Round a double to the nearest value of `f` (ties to even); overflow gives
/// signed infinity.
Bits encode(Format f, double x);

/// round(a*b + c), single rounding.
Bits fma(Bits a, Bits b, Bits c);
/// round(a*b + (-0)); the negative zero addend keeps the product's zero sign.
Bits mul(Bits a, Bits b);
/// round(a + b).
Bits add(Bits a, Bits b);
/// round(a + b + c), single rounding of the exact sum.
Bits add3(Bits a, Bits b, Bits c);

/// Widening sum-dot-product: round_dst(a*b + c*d + acc) with exact products
/// and one final rounding. Throws ConfigError for unsupported pairs.
Bits sdotp_widen(Format dst, Bits a, Bits b, Bits c, Bits d, Bits acc);
bool is_widening_pair(Format src, Format dst);

/// Value-preserving when representable, otherwise rounded to nearest even.
Bits convert(Format to, Bits x);

/// 64-bit packed SIMD register holding lanes(format) elements, lane 0 in the
/// least significant bits.
class SimdVector {
 public:
  explicit SimdVector(Format format, std::uint64_t packed = 0) : format_(format), packed_(packed) {}

  Format format() const { return format_; }
  std::uint64_t packed() const { return packed_; }
  int lane_count() const { return lanes(format_); }
  Bits lane(int i) const;
  void set_lane(int i, Bits value);

  friend bool operator==(const SimdVector&, const SimdVector&) = default;

 private:
  Format format_;
  std::uint64_t packed_;
};

/// Lane-wise fused multiply-add.
SimdVector simd_fma(const SimdVector& a, const SimdVector& b, const SimdVector& c);

namespace detail {
/// Generic multi-term exact path. Exposed so tests can check the binary64
/// hardware fast path against it.
Bits fma_generic(Bits a, Bits b, Bits c);
}  // namespace detail

}  // namespace clustersim::minifloat
