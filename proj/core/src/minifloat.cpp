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

#include "clustersim/minifloat.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstring>
#include <string>

#include "clustersim/errors.hpp"

namespace clustersim::minifloat {

namespace {

__extension__ typedef unsigned __int128 u128;

struct Unpacked {
  enum class Class { Zero, Finite, Inf, NaN } cls;
  bool neg;
  std::uint64_t mant;  // value = mant * 2^exp
  int exp;
};

Unpacked unpack(Format f, std::uint64_t raw) {
  const FormatInfo fi = info(f);
  const bool neg = (raw >> (fi.width() - 1)) & 1;
  const std::uint64_t exp_field = (raw >> fi.mant_bits) & ((std::uint64_t{1} << fi.exp_bits) - 1);
  const std::uint64_t mant_field = raw & ((std::uint64_t{1} << fi.mant_bits) - 1);
  const std::uint64_t exp_all_ones = (std::uint64_t{1} << fi.exp_bits) - 1;
  if (exp_field == exp_all_ones) {
    return {mant_field == 0 ? Unpacked::Class::Inf : Unpacked::Class::NaN, neg, 0, 0};
  }
  if (exp_field == 0) {
    if (mant_field == 0) return {Unpacked::Class::Zero, neg, 0, 0};
    return {Unpacked::Class::Finite, neg, mant_field, 1 - fi.bias() - fi.mant_bits};
  }
  return {Unpacked::Class::Finite, neg, mant_field | (std::uint64_t{1} << fi.mant_bits),
          static_cast<int>(exp_field) - fi.bias() - fi.mant_bits};
}

// Fixed-capacity unsigned integer, large enough to hold any exact sum of
// binary64 products aligned to the smallest exponent (~4.3k bits).
class Wide {
 public:
  static constexpr int kLimbs = 72;

  void add_shifted(u128 v, int shift) {
    const int limb = shift / 64;
    const int off = shift % 64;
    const auto lo = static_cast<std::uint64_t>(v);
    const auto hi = static_cast<std::uint64_t>(v >> 64);
    std::uint64_t p[3];
    if (off == 0) {
      p[0] = lo;
      p[1] = hi;
      p[2] = 0;
    } else {
      p[0] = lo << off;
      p[1] = (hi << off) | (lo >> (64 - off));
      p[2] = hi >> (64 - off);
    }
    grow(limb + 3);
    std::uint64_t carry = 0;
    int i = limb;
    for (int k = 0; k < 3; ++k, ++i) {
      const u128 s = static_cast<u128>(w_[i]) + p[k] + carry;
      w_[i] = static_cast<std::uint64_t>(s);
      carry = static_cast<std::uint64_t>(s >> 64);
    }
    for (; carry != 0; ++i) {
      grow(i + 1);
      const u128 s = static_cast<u128>(w_[i]) + carry;
      w_[i] = static_cast<std::uint64_t>(s);
      carry = static_cast<std::uint64_t>(s >> 64);
    }
  }

  int compare(const Wide& o) const {
    const int n = std::max(n_, o.n_);
    for (int i = n - 1; i >= 0; --i) {
      const std::uint64_t a = limb(i);
      const std::uint64_t b = o.limb(i);
      if (a != b) return a < b ? -1 : 1;
    }
    return 0;
  }

  // *this -= o, requires *this >= o.
  void subtract(const Wide& o) {
    std::uint64_t borrow = 0;
    for (int i = 0; i < n_; ++i) {
      const std::uint64_t b = o.limb(i);
      const u128 lhs = w_[i];
      const u128 rhs = static_cast<u128>(b) + borrow;
      w_[i] = static_cast<std::uint64_t>(lhs - rhs);
      borrow = lhs < rhs ? 1 : 0;
    }
  }

  bool is_zero() const {
    for (int i = 0; i < n_; ++i)
      if (w_[i] != 0) return false;
    return true;
  }

  int bit_length() const {
    for (int i = n_ - 1; i >= 0; --i)
      if (w_[i] != 0) return i * 64 + (64 - std::countl_zero(w_[i]));
    return 0;
  }

  bool bit(int pos) const { return (limb(pos / 64) >> (pos % 64)) & 1; }

  bool any_below(int pos) const {
    const int full = pos / 64;
    for (int i = 0; i < full && i < n_; ++i)
      if (w_[i] != 0) return true;
    const int rem = pos % 64;
    return rem != 0 && (limb(full) & ((std::uint64_t{1} << rem) - 1)) != 0;
  }

  // Bits [pos, pos + 64).
  std::uint64_t extract(int pos) const {
    const int i = pos / 64;
    const int off = pos % 64;
    if (off == 0) return limb(i);
    return (limb(i) >> off) | (limb(i + 1) << (64 - off));
  }

 private:
  std::uint64_t limb(int i) const { return i < n_ ? w_[i] : 0; }
  void grow(int n) {
    if (n > kLimbs) throw std::logic_error("minifloat: exact accumulator overflow");
    for (; n_ < n; ++n_) w_[n_] = 0;
  }

  std::array<std::uint64_t, kLimbs> w_;
  int n_ = 0;
};

Bits make(Format f, bool neg, std::uint64_t magnitude_bits) {
  const FormatInfo fi = info(f);
  return Bits(f, magnitude_bits | (neg ? std::uint64_t{1} << (fi.width() - 1) : 0));
}

// Round neg * m * 2^e to the target format. m must be non-zero.
Bits round_to(Format f, bool neg, const Wide& m, int e) {
  const FormatInfo fi = info(f);
  const int mant = fi.mant_bits;
  const int emin = 1 - fi.bias();
  const int top = e + m.bit_length() - 1;
  int q = std::max(top, emin) - mant;
  std::uint64_t sig;
  if (q <= e) {
    sig = m.extract(0) << (e - q);
  } else {
    const int s = q - e;
    sig = m.extract(s) & ((std::uint64_t{1} << (mant + 2)) - 1);
    const bool round = m.bit(s - 1);
    const bool sticky = m.any_below(s - 1);
    if (round && (sticky || (sig & 1))) ++sig;
    if (sig == (std::uint64_t{1} << (mant + 1))) {
      sig >>= 1;
      ++q;
    }
  }
  if (sig == 0) return zero(f, neg);
  const std::uint64_t hidden = std::uint64_t{1} << mant;
  if (sig < hidden) return make(f, neg, sig);
  const std::int64_t biased = static_cast<std::int64_t>(q) + mant + fi.bias();
  const std::int64_t max_biased = (std::int64_t{1} << fi.exp_bits) - 2;
  if (biased > max_biased) return infinity(f, neg);
  return make(f, neg, (static_cast<std::uint64_t>(biased) << mant) | (sig - hidden));
}

struct Term {
  bool neg;
  u128 mag;  // zero marks a (signed) zero term
  int exp;
};

Term product(const Unpacked& a, const Unpacked& b) {
  const bool neg = a.neg != b.neg;
  if (a.cls == Unpacked::Class::Zero || b.cls == Unpacked::Class::Zero) return {neg, 0, 0};
  return {neg, static_cast<u128>(a.mant) * b.mant, a.exp + b.exp};
}

Term addend(const Unpacked& a) {
  if (a.cls == Unpacked::Class::Zero) return {a.neg, 0, 0};
  return {a.neg, a.mant, a.exp};
}

// Exact sum of finite terms, rounded once into dst.
Bits sum_terms(Format dst, const Term* terms, int n) {
  int emin = 0;
  bool any = false;
  bool all_neg = true;
  for (int i = 0; i < n; ++i) {
    all_neg = all_neg && terms[i].neg;
    if (terms[i].mag == 0) continue;
    emin = any ? std::min(emin, terms[i].exp) : terms[i].exp;
    any = true;
  }
  if (!any) return zero(dst, all_neg);
  Wide pos;
  Wide negs;
  for (int i = 0; i < n; ++i) {
    if (terms[i].mag == 0) continue;
    (terms[i].neg ? negs : pos).add_shifted(terms[i].mag, terms[i].exp - emin);
  }
  const int cmp = pos.compare(negs);
  if (cmp == 0) return zero(dst, false);
  if (cmp > 0) {
    pos.subtract(negs);
    return round_to(dst, false, pos, emin);
  }
  negs.subtract(pos);
  return round_to(dst, true, negs, emin);
}

// Infinity/NaN resolution for a sum of products and addends. Returns true and
// sets `out` when the result is not finite.
struct SpecialScan {
  bool nan = false;
  bool pos_inf = false;
  bool neg_inf = false;

  void product(const Unpacked& a, const Unpacked& b) {
    using C = Unpacked::Class;
    if (a.cls == C::NaN || b.cls == C::NaN) {
      nan = true;
      return;
    }
    const bool a_inf = a.cls == C::Inf;
    const bool b_inf = b.cls == C::Inf;
    if (!a_inf && !b_inf) return;
    if (a.cls == C::Zero || b.cls == C::Zero) {
      nan = true;
      return;
    }
    ((a.neg != b.neg) ? neg_inf : pos_inf) = true;
  }

  void addend(const Unpacked& a) {
    using C = Unpacked::Class;
    if (a.cls == C::NaN) nan = true;
    if (a.cls == C::Inf) (a.neg ? neg_inf : pos_inf) = true;
  }

  bool resolve(Format dst, Bits& out) const {
    if (nan || (pos_inf && neg_inf)) {
      out = quiet_nan(dst);
      return true;
    }
    if (pos_inf || neg_inf) {
      out = infinity(dst, neg_inf);
      return true;
    }
    return false;
  }
};

void require_same(Format f, Bits b, const char* op) {
  if (b.format() != f) {
    throw ConfigError(std::string("minifloat::") + op + ": operand format mismatch (" +
                      std::string(to_string(b.format())) + " vs " + std::string(to_string(f)) + ")");
  }
}

Bits from_double_bits(double x) {
  std::uint64_t raw;
  std::memcpy(&raw, &x, sizeof raw);
  return Bits(Format::FP64, raw);
}

double to_double(std::uint64_t raw) {
  double x;
  std::memcpy(&x, &raw, sizeof x);
  return x;
}

}  // namespace

std::string_view to_string(Format f) { return info(f).name; }

std::optional<Format> parse_format(std::string_view name) {
  std::string upper(name);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  for (Format f : kAllFormats)
    if (info(f).name == upper) return f;
  return std::nullopt;
}

Bits::Bits(Format format, std::uint64_t raw) : format_(format), raw_(raw) {
  if ((raw & ~info(format).mask()) != 0) {
    throw ConfigError("minifloat::Bits: raw value does not fit in " + std::string(to_string(format)));
  }
}

bool Bits::is_nan() const { return unpack(format_, raw_).cls == Unpacked::Class::NaN; }
bool Bits::is_inf() const { return unpack(format_, raw_).cls == Unpacked::Class::Inf; }
bool Bits::is_zero() const { return unpack(format_, raw_).cls == Unpacked::Class::Zero; }
bool Bits::sign() const { return (raw_ >> (width(format_) - 1)) & 1; }

Bits quiet_nan(Format f) {
  const FormatInfo fi = info(f);
  const std::uint64_t exp_all = ((std::uint64_t{1} << fi.exp_bits) - 1) << fi.mant_bits;
  return Bits(f, exp_all | (std::uint64_t{1} << (fi.mant_bits - 1)));
}

Bits infinity(Format f, bool negative) {
  const FormatInfo fi = info(f);
  return make(f, negative, ((std::uint64_t{1} << fi.exp_bits) - 1) << fi.mant_bits);
}

Bits zero(Format f, bool negative) { return make(f, negative, 0); }

Bits max_finite(Format f, bool negative) {
  const FormatInfo fi = info(f);
  const std::uint64_t exp = ((std::uint64_t{1} << fi.exp_bits) - 2) << fi.mant_bits;
  return make(f, negative, exp | ((std::uint64_t{1} << fi.mant_bits) - 1));
}

double decode(Format f, std::uint64_t raw) {
  if (f == Format::FP64) return to_double(raw);
  const Unpacked u = unpack(f, raw & info(f).mask());
  switch (u.cls) {
    case Unpacked::Class::Zero: return u.neg ? -0.0 : 0.0;
    case Unpacked::Class::Inf: return u.neg ? -HUGE_VAL : HUGE_VAL;
    case Unpacked::Class::NaN: return std::nan("");
    case Unpacked::Class::Finite: break;
  }
  const double v = std::ldexp(static_cast<double>(u.mant), u.exp);
  return u.neg ? -v : v;
}

Bits encode(Format f, double x) {
  const Unpacked u = unpack(Format::FP64, from_double_bits(x).raw());
  switch (u.cls) {
    case Unpacked::Class::NaN: return quiet_nan(f);
    case Unpacked::Class::Inf: return infinity(f, u.neg);
    case Unpacked::Class::Zero: return zero(f, u.neg);
    case Unpacked::Class::Finite: break;
  }
  Wide m;
  m.add_shifted(u.mant, 0);
  return round_to(f, u.neg, m, u.exp);
}

Bits convert(Format to, Bits x) {
  const Unpacked u = unpack(x.format(), x.raw());
  switch (u.cls) {
    case Unpacked::Class::NaN: return quiet_nan(to);
    case Unpacked::Class::Inf: return infinity(to, u.neg);
    case Unpacked::Class::Zero: return zero(to, u.neg);
    case Unpacked::Class::Finite: break;
  }
  Wide m;
  m.add_shifted(u.mant, 0);
  return round_to(to, u.neg, m, u.exp);
}

namespace detail {

Bits fma_generic(Bits a, Bits b, Bits c) {
  const Format f = a.format();
  require_same(f, b, "fma");
  require_same(f, c, "fma");
  const Unpacked ua = unpack(f, a.raw());
  const Unpacked ub = unpack(f, b.raw());
  const Unpacked uc = unpack(f, c.raw());
  SpecialScan scan;
  scan.product(ua, ub);
  scan.addend(uc);
  Bits out;
  if (scan.resolve(f, out)) return out;
  const Term terms[2] = {product(ua, ub), addend(uc)};
  return sum_terms(f, terms, 2);
}

}  // namespace detail

Bits fma(Bits a, Bits b, Bits c) {
  if (a.format() == Format::FP64 && b.format() == Format::FP64 && c.format() == Format::FP64) {
    // Hardware binary64 FMA is exactly the single-rounding RNE operation.
    const double r = std::fma(to_double(a.raw()), to_double(b.raw()), to_double(c.raw()));
    if (std::isnan(r)) return quiet_nan(Format::FP64);
    return from_double_bits(r);
  }
  return detail::fma_generic(a, b, c);
}

Bits mul(Bits a, Bits b) { return fma(a, b, zero(a.format(), true)); }

Bits add(Bits a, Bits b) { return fma(a, encode(a.format(), 1.0), b); }

Bits add3(Bits a, Bits b, Bits c) {
  const Format f = a.format();
  require_same(f, b, "add3");
  require_same(f, c, "add3");
  const Unpacked ua = unpack(f, a.raw());
  const Unpacked ub = unpack(f, b.raw());
  const Unpacked uc = unpack(f, c.raw());
  SpecialScan scan;
  scan.addend(ua);
  scan.addend(ub);
  scan.addend(uc);
  Bits out;
  if (scan.resolve(f, out)) return out;
  const Term terms[3] = {addend(ua), addend(ub), addend(uc)};
  return sum_terms(f, terms, 3);
}

bool is_widening_pair(Format src, Format dst) {
  switch (src) {
    case Format::FP8:
    case Format::FP8ALT: return dst == Format::FP16 || dst == Format::FP16ALT;
    case Format::FP16:
    case Format::FP16ALT: return dst == Format::FP32;
    default: return false;
  }
}

Bits sdotp_widen(Format dst, Bits a, Bits b, Bits c, Bits d, Bits acc) {
  const Format src = a.format();
  if (!is_widening_pair(src, dst)) {
    throw ConfigError("minifloat::sdotp_widen: unsupported widening pair " + std::string(to_string(src)) +
                      " -> " + std::string(to_string(dst)));
  }
  require_same(src, b, "sdotp_widen");
  require_same(src, c, "sdotp_widen");
  require_same(src, d, "sdotp_widen");
  require_same(dst, acc, "sdotp_widen");
  const Unpacked ua = unpack(src, a.raw());
  const Unpacked ub = unpack(src, b.raw());
  const Unpacked uc = unpack(src, c.raw());
  const Unpacked ud = unpack(src, d.raw());
  const Unpacked uacc = unpack(dst, acc.raw());
  SpecialScan scan;
  scan.product(ua, ub);
  scan.product(uc, ud);
  scan.addend(uacc);
  Bits out;
  if (scan.resolve(dst, out)) return out;
  const Term terms[3] = {product(ua, ub), product(uc, ud), addend(uacc)};
  return sum_terms(dst, terms, 3);
}

Bits SimdVector::lane(int i) const {
  if (i < 0 || i >= lane_count()) throw ConfigError("SimdVector: lane index out of range");
  const int w = width(format_);
  return Bits(format_, (packed_ >> (i * w)) & info(format_).mask());
}

void SimdVector::set_lane(int i, Bits value) {
  if (i < 0 || i >= lane_count()) throw ConfigError("SimdVector: lane index out of range");
  require_same(format_, value, "SimdVector::set_lane");
  const int w = width(format_);
  const std::uint64_t m = info(format_).mask() << (i * w);
  packed_ = (packed_ & ~m) | (value.raw() << (i * w));
}

SimdVector simd_fma(const SimdVector& a, const SimdVector& b, const SimdVector& c) {
  if (a.format() != b.format() || a.format() != c.format())
    throw ConfigError("simd_fma: operand format mismatch");
  SimdVector r(a.format());
  for (int i = 0; i < a.lane_count(); ++i) r.set_lane(i, fma(a.lane(i), b.lane(i), c.lane(i)));
  return r;
}

}  // namespace clustersim::minifloat
