#include "cellwave/rng.hpp"

namespace cellwave {

namespace {

constexpr int kBatch = 16;

// Normal pairs p0 .. p0+kBatch-1 into out[0 .. 2*kBatch). Structure-of-arrays
// form of normal_pair so the rounds vectorise; results are identical.
void normal_batch(std::uint64_t seed, std::uint64_t step, std::uint64_t p0, double* out) {
  std::uint32_t c0[kBatch], c1[kBatch], c2[kBatch], c3[kBatch];
  for (int i = 0; i < kBatch; ++i) {
    const std::uint64_t idx = p0 + static_cast<std::uint64_t>(i);
    c0[i] = static_cast<std::uint32_t>(idx);
    c1[i] = static_cast<std::uint32_t>(idx >> 32);
    c2[i] = static_cast<std::uint32_t>(step);
    c3[i] = static_cast<std::uint32_t>(step >> 32);
  }
  auto key = philox_key(seed);
  for (int round = 0; round < 10; ++round) {
#pragma omp simd
    for (int i = 0; i < kBatch; ++i) {
      const std::uint64_t a = static_cast<std::uint64_t>(0xD2511F53u) * c0[i];
      const std::uint64_t b = static_cast<std::uint64_t>(0xCD9E8D57u) * c2[i];
      const std::uint32_t n0 = static_cast<std::uint32_t>(b >> 32) ^ c1[i] ^ key[0];
      const std::uint32_t n2 = static_cast<std::uint32_t>(a >> 32) ^ c3[i] ^ key[1];
      c1[i] = static_cast<std::uint32_t>(b);
      c3[i] = static_cast<std::uint32_t>(a);
      c0[i] = n0;
      c2[i] = n2;
    }
    key[0] += 0x9E3779B9u;
    key[1] += 0xBB67AE85u;
  }
#pragma omp simd
  for (int i = 0; i < kBatch; ++i) {
    const double u1 = uniform_open(c0[i], c1[i]);
    const double u2 =
        static_cast<double>(((static_cast<std::uint64_t>(c2[i]) << 32) | c3[i]) >> 11) * 0x1p-53;
    const double rad = std::sqrt(-2.0 * detail::log_unit(u1));
    double s = 0.0, c = 0.0;
    detail::sincos_turn(u2, s, c);
    out[2 * i] = rad * c;
    out[2 * i + 1] = rad * s;
  }
}

}  // namespace

void fill_normals(std::uint64_t seed, std::uint64_t step, std::uint64_t first, std::span<double> out) {
  std::size_t i = 0;
  std::uint64_t d = first;
  if (d % 2 == 1 && i < out.size()) {
    out[i++] = normal_pair(seed, step, d / 2)[1];
    ++d;
  }
  double buf[2 * kBatch];
  for (; i + 2 * kBatch <= out.size(); i += 2 * kBatch, d += 2 * kBatch) {
    normal_batch(seed, step, d / 2, buf);
    std::copy(buf, buf + 2 * kBatch, out.begin() + static_cast<std::ptrdiff_t>(i));
  }
  for (; i + 1 < out.size(); i += 2, d += 2) {
    const auto p = normal_pair(seed, step, d / 2);
    out[i] = p[0];
    out[i + 1] = p[1];
  }
  if (i < out.size()) out[i] = normal_pair(seed, step, d / 2)[0];
}

}  // namespace cellwave
