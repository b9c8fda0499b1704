#pragma once

#include <cmath>

#ifdef __AVX2__
#include <immintrin.h>
#endif

namespace irrsio::simd {

// Four-wide double packs. The scalar pack mirrors the AVX2 lane layout and
// performs the same IEEE operations in the same order, so both backends
// produce bit-identical sums. No FMA and no approximate reciprocals anywhere.
struct ScalarPack {
  double v[4];

  static constexpr int width = 4;
  static ScalarPack load(const double* p) { return {{p[0], p[1], p[2], p[3]}}; }
  static ScalarPack set1(double x) { return {{x, x, x, x}}; }
  void store(double* p) const {
    p[0] = v[0];
    p[1] = v[1];
    p[2] = v[2];
    p[3] = v[3];
  }
  friend ScalarPack operator+(ScalarPack a, ScalarPack b) {
    return {{a.v[0] + b.v[0], a.v[1] + b.v[1], a.v[2] + b.v[2], a.v[3] + b.v[3]}};
  }
  friend ScalarPack operator-(ScalarPack a, ScalarPack b) {
    return {{a.v[0] - b.v[0], a.v[1] - b.v[1], a.v[2] - b.v[2], a.v[3] - b.v[3]}};
  }
  friend ScalarPack operator*(ScalarPack a, ScalarPack b) {
    return {{a.v[0] * b.v[0], a.v[1] * b.v[1], a.v[2] * b.v[2], a.v[3] * b.v[3]}};
  }
  friend ScalarPack operator/(ScalarPack a, ScalarPack b) {
    return {{a.v[0] / b.v[0], a.v[1] / b.v[1], a.v[2] / b.v[2], a.v[3] / b.v[3]}};
  }
  static ScalarPack sqrt(ScalarPack a) {
    return {{std::sqrt(a.v[0]), std::sqrt(a.v[1]), std::sqrt(a.v[2]),
             std::sqrt(a.v[3])}};
  }
  // Mask packs hold 0.0 / all-ones bit patterns, as the AVX2 compares do.
  static ScalarPack gt(ScalarPack a, ScalarPack b) {
    ScalarPack m;
    for (int i = 0; i < 4; ++i) m.v[i] = a.v[i] > b.v[i] ? 1.0 : 0.0;
    return m;
  }
  static ScalarPack mask_keep(ScalarPack mask, ScalarPack x) {
    ScalarPack r;
    for (int i = 0; i < 4; ++i) r.v[i] = mask.v[i] != 0.0 ? x.v[i] : 0.0;
    return r;
  }
};

#ifdef __AVX2__
struct Avx2Pack {
  __m256d v;

  static constexpr int width = 4;
  static Avx2Pack load(const double* p) { return {_mm256_loadu_pd(p)}; }
  static Avx2Pack set1(double x) { return {_mm256_set1_pd(x)}; }
  void store(double* p) const { _mm256_storeu_pd(p, v); }
  friend Avx2Pack operator+(Avx2Pack a, Avx2Pack b) { return {_mm256_add_pd(a.v, b.v)}; }
  friend Avx2Pack operator-(Avx2Pack a, Avx2Pack b) { return {_mm256_sub_pd(a.v, b.v)}; }
  friend Avx2Pack operator*(Avx2Pack a, Avx2Pack b) { return {_mm256_mul_pd(a.v, b.v)}; }
  friend Avx2Pack operator/(Avx2Pack a, Avx2Pack b) { return {_mm256_div_pd(a.v, b.v)}; }
  static Avx2Pack sqrt(Avx2Pack a) { return {_mm256_sqrt_pd(a.v)}; }
  static Avx2Pack gt(Avx2Pack a, Avx2Pack b) {
    return {_mm256_cmp_pd(a.v, b.v, _CMP_GT_OQ)};
  }
  static Avx2Pack mask_keep(Avx2Pack mask, Avx2Pack x) {
    return {_mm256_and_pd(mask.v, x.v)};
  }
};
#endif

}  // namespace irrsio::simd
