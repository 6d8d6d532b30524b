#pragma once

// Array cosine used on the hot paths (feature maps, basis tables).
//
// Reduction r = x - k pi/2 uses a three-part split of pi/2 whose leading
// part has 33 significant bits, so k * hi is exact for |k| < 2^20. On
// |r| <= pi/4 sin and cos are Taylor polynomials truncated past the
// double-precision noise floor. The loop is branch-free so it vectorizes;
// arrays holding any |x| above kVectorCosLimit fall back to std::cos.

#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>

namespace tribasis::detail {

inline constexpr double kVectorCosLimit = 1.0e5;

inline constexpr double kHalfPiHi =
    std::bit_cast<double>(std::bit_cast<std::uint64_t>(std::numbers::pi / 2) & ~((std::uint64_t{1} << 20) - 1));
inline constexpr double kHalfPiMid = std::numbers::pi / 2 - kHalfPiHi;
// pi/2 minus its double rounding.
inline constexpr double kHalfPiLo = 6.123233995736766036e-17;

inline constexpr double inverse_factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return 1.0 / f;
}

// Round to nearest integer by adding and removing 1.5 * 2^52; valid for
// |v| < 2^51. Unlike std::floor this vectorizes without -fno-trapping-math.
inline double round_nearest(double v) {
  constexpr double shift = 0x1.8p52;
  return (v + shift) - shift;
}

template <int K>
inline constexpr double kInvFactorial = inverse_factorial(K);

/// cos(x) for |x| <= kVectorCosLimit; accurate to a few ulp.
[[gnu::always_inline]] inline double reduced_cos(double x) {
  const double k = round_nearest(x * (2.0 / std::numbers::pi));
  const double r = ((x - k * kHalfPiHi) - k * kHalfPiMid) - k * kHalfPiLo;
  const double r2 = r * r;

  // sin r = r (1 - r^2/3! + ... - r^18/19!)
  double s = -kInvFactorial<19>;
  s = s * r2 + kInvFactorial<17>;
  s = s * r2 - kInvFactorial<15>;
  s = s * r2 + kInvFactorial<13>;
  s = s * r2 - kInvFactorial<11>;
  s = s * r2 + kInvFactorial<9>;
  s = s * r2 - kInvFactorial<7>;
  s = s * r2 + kInvFactorial<5>;
  s = s * r2 - kInvFactorial<3>;
  s = r + r * r2 * s;

  // cos r = 1 - r^2/2! + ... + r^18/18!
  double c = kInvFactorial<18>;
  c = c * r2 - kInvFactorial<16>;
  c = c * r2 + kInvFactorial<14>;
  c = c * r2 - kInvFactorial<12>;
  c = c * r2 + kInvFactorial<10>;
  c = c * r2 - kInvFactorial<8>;
  c = c * r2 + kInvFactorial<6>;
  c = c * r2 - kInvFactorial<4>;
  c = c * r2 + kInvFactorial<2>;
  c = 1.0 - r2 * c;

  // quadrant q = k mod 4 selects cos, -sin, -cos, sin; done arithmetically
  // so the loop body stays free of branches.
  const double q = k - 4.0 * round_nearest(k * 0.25 - 0.375);
  const double odd = q - 2.0 * round_nearest(q * 0.5 - 0.25);
  const double half = round_nearest((q + 1.0) * 0.5 - 0.25);
  const double sign = 1.0 - 2.0 * (half - 2.0 * round_nearest(half * 0.5 - 0.25));
  return sign * (c + odd * (s - c));
}

/// out[i] = scale * cos(in[i]); `out` may alias `in`.
inline void scaled_cos(const double* in, double* out, std::ptrdiff_t n, double scale) {
  bool in_range = true;
  for (std::ptrdiff_t i = 0; i < n; ++i) in_range &= std::abs(in[i]) <= kVectorCosLimit;
  if (!in_range) {
    for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = scale * std::cos(in[i]);
    return;
  }
#pragma omp simd
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = scale * reduced_cos(in[i]);
}

}  // namespace tribasis::detail
