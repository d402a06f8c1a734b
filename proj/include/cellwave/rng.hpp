#pragma once

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>

namespace cellwave {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter generate(Counter ctr, Key key) {
    constexpr std::uint32_t kM0 = 0xD2511F53u, kM1 = 0xCD9E8D57u;
    constexpr std::uint32_t kW0 = 0x9E3779B9u, kW1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * ctr[0];
      const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * ctr[2];
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
      key[0] += kW0;
      key[1] += kW1;
    }
    return ctr;
  }
};

inline Philox4x32::Key philox_key(std::uint64_t seed) {
  return {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
}

namespace detail {

/// Natural log for x in (0, 1], about 1 ulp; no libm call so the draw path is
/// identical on every build.
inline double log_unit(double x) {
  // x = m 2^e with m in [0.5, 1); x is a normal number here
  const std::uint64_t bits = std::bit_cast<std::uint64_t>(x);
  int e = static_cast<int>((bits >> 52) & 0x7ff) - 1022;
  double m = std::bit_cast<double>((bits & 0x000fffffffffffffULL) | 0x3fe0000000000000ULL);
  const bool low = m < std::numbers::sqrt2 / 2.0;
  m = low ? 2.0 * m : m;
  e -= low;
  // log(m) = 2 atanh(s), s = (m-1)/(m+1), |s| <= 0.1716
  const double s = (m - 1.0) / (m + 1.0);
  const double s2 = s * s;
  double p = 1.0 / 23.0;
  for (int k = 21; k >= 3; k -= 2) p = p * s2 + 1.0 / k;
  const double log_m = 2.0 * s + 2.0 * s * s2 * p;
  return static_cast<double>(e) * std::numbers::ln2 + log_m;
}

/// sin and cos of 2 pi u for u in [0, 1).
inline void sincos_turn(double u, double& s, double& c) {
  const double q4 = 4.0 * u;                   // exact
  const int q = static_cast<int>(q4 + 0.5);   // quadrant 0..4
  const double phi = (q4 - q) * (std::numbers::pi / 2.0);  // [-pi/4, pi/4], q4 - q exact
  const double p2 = phi * phi;
  // Taylor to x^17 / x^16: truncation below 1e-16 on [-pi/4, pi/4]
  double sp = -1.0 / 355687428096000.0;
  sp = sp * p2 + 1.0 / 1307674368000.0;
  sp = sp * p2 - 1.0 / 6227020800.0;
  sp = sp * p2 + 1.0 / 39916800.0;
  sp = sp * p2 - 1.0 / 362880.0;
  sp = sp * p2 + 1.0 / 5040.0;
  sp = sp * p2 - 1.0 / 120.0;
  sp = sp * p2 + 1.0 / 6.0;
  const double sn = phi - phi * p2 * sp;
  double cp = 1.0 / 20922789888000.0;
  cp = cp * p2 - 1.0 / 87178291200.0;
  cp = cp * p2 + 1.0 / 479001600.0;
  cp = cp * p2 - 1.0 / 3628800.0;
  cp = cp * p2 + 1.0 / 40320.0;
  cp = cp * p2 - 1.0 / 720.0;
  cp = cp * p2 + 1.0 / 24.0;
  const double cs = 1.0 - 0.5 * p2 + p2 * p2 * cp;
  // rotate by q quarter turns without branching
  const bool odd = q & 1;
  const double a = odd ? cs : sn;
  const double b = odd ? sn : cs;
  const double sign_s = (q & 2) ? -1.0 : 1.0;
  const double sign_c = ((q + 1) & 2) ? -1.0 : 1.0;
  s = sign_s * a;
  c = sign_c * b;
}

}  // namespace detail

/// 53-bit uniform in the open interval (0, 1).
inline double uniform_open(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1p-53;
}

/// Two standard normals (Box-Muller) for draw pair `index` of `step` under
/// `seed`. Draw d of a step is component d % 2 of pair d / 2; the value depends
/// only on (seed, step, d), never on evaluation order.
inline std::array<double, 2> normal_pair(std::uint64_t seed, std::uint64_t step, std::uint64_t index) {
  const auto r = Philox4x32::generate(
      {static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
       static_cast<std::uint32_t>(step), static_cast<std::uint32_t>(step >> 32)},
      philox_key(seed));
  const double u1 = uniform_open(r[0], r[1]);
  const double u2 = static_cast<double>(((static_cast<std::uint64_t>(r[2]) << 32) | r[3]) >> 11) * 0x1p-53;
  const double rad = std::sqrt(-2.0 * detail::log_unit(u1));
  double s = 0.0, c = 0.0;
  detail::sincos_turn(u2, s, c);
  return {rad * c, rad * s};
}

inline double normal_draw(std::uint64_t seed, std::uint64_t step, std::uint64_t d) {
  return normal_pair(seed, step, d / 2)[d % 2];
}

/// Fill out[i] with draw (first + i) of `step`.
void fill_normals(std::uint64_t seed, std::uint64_t step, std::uint64_t first, std::span<double> out);

/// Sequential stream over a Philox counter; four 32-bit words per block.
class PhiloxStream {
 public:
  explicit PhiloxStream(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(philox_key(seed)), stream_(stream) {}

  std::uint32_t next_u32() {
    if (pos_ == 4) refill();
    return buf_[pos_++];
  }
  /// Uniform in (0, 1).
  double uniform() {
    const std::uint32_t hi = next_u32();
    return uniform_open(hi, next_u32());
  }
  double exponential(double rate) { return -std::log(uniform()) / rate; }
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform(), u2 = uniform();
    const double rad = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = rad * std::sin(theta);
    have_spare_ = true;
    return rad * std::cos(theta);
  }

 private:
  void refill() {
    buf_ = Philox4x32::generate({static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
                                 static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)},
                                key_);
    ++block_;
    pos_ = 0;
  }
  Philox4x32::Key key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  Philox4x32::Counter buf_{};
  int pos_ = 4;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace cellwave
