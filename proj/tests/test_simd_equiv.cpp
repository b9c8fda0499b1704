#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <random>
#include <vector>

#include "irrsio/kernels.hpp"
#include "irrsio/matrix.hpp"
#include "irrsio/simd/kernel_backend.hpp"

using namespace irrsio;

namespace {

bool bits_equal(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

struct RandomCase {
  std::vector<double> sx, sy, sz, cw, ox, oy, oz;
  std::vector<double> i00, i01, i02, i11, i12, i22, cn;
  double t[3];
  double eps2;
  simd::SymInv m;
  double coefneg;
};

RandomCase make_case(std::mt19937_64& rng, std::size_t n, int dim) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  RandomCase c;
  for (std::size_t j = 0; j < n; ++j) {
    c.sx.push_back(u(rng));
    c.sy.push_back(u(rng));
    c.sz.push_back(dim == 3 ? u(rng) : 0.0);
    c.cw.push_back(u(rng));
    c.ox.push_back(u(rng));
    c.oy.push_back(u(rng));
    c.oz.push_back(dim == 3 ? u(rng) : 0.0);
    const ConstantMatrix E = random_spd(dim, 2.0, rng());
    const FrozenMatrix fm = freeze(E);
    c.i00.push_back(fm.inv.i00);
    c.i01.push_back(fm.inv.i01);
    c.i02.push_back(fm.inv.i02);
    c.i11.push_back(fm.inv.i11);
    c.i12.push_back(fm.inv.i12);
    c.i22.push_back(fm.inv.i22);
    c.cn.push_back(fm.coefneg);
  }
  c.t[0] = u(rng);
  c.t[1] = u(rng);
  c.t[2] = dim == 3 ? u(rng) : 0.0;
  c.eps2 = 1e-4;
  const FrozenMatrix fm = freeze(random_spd(dim, 3.0, rng()));
  c.m = fm.inv;
  c.coefneg = fm.coefneg;
  return c;
}

}  // namespace

TEST_CASE("scalar and avx2 backends produce bit-identical sums") {
  if (!simd::avx2_supported()) {
    MESSAGE("CPU lacks AVX2; equivalence test skipped");
    return;
  }
  std::mt19937_64 rng(42);
  for (int rep = 0; rep < 40; ++rep) {
    const int dim = rep % 2 == 0 ? 3 : 2;
    // Sizes straddle the 4-lane block boundary to exercise tail padding.
    const std::size_t n = 1 + rng() % 133;
    RandomCase c = make_case(rng, n, dim);
    simd::PerSourceMats pm{c.i00.data(), c.i01.data(), c.i02.data(), c.i11.data(),
                           c.i12.data(), c.i22.data(), c.cn.data()};

    double a[3], b[3];
    simd::grad_sum_const(simd::Backend::scalar, dim, c.sx.data(), c.sy.data(),
                         c.sz.data(), c.cw.data(), n, c.t, c.m, c.coefneg, c.eps2, a);
    simd::grad_sum_const(simd::Backend::avx2, dim, c.sx.data(), c.sy.data(),
                         c.sz.data(), c.cw.data(), n, c.t, c.m, c.coefneg, c.eps2, b);
    for (int k = 0; k < 3; ++k) CHECK(bits_equal(a[k], b[k]));

    simd::grad_sum_var(simd::Backend::scalar, dim, c.sx.data(), c.sy.data(),
                       c.sz.data(), c.cw.data(), pm, n, c.t, c.eps2, a);
    simd::grad_sum_var(simd::Backend::avx2, dim, c.sx.data(), c.sy.data(), c.sz.data(),
                       c.cw.data(), pm, n, c.t, c.eps2, b);
    for (int k = 0; k < 3; ++k) CHECK(bits_equal(a[k], b[k]));

    const double s1 = simd::adjoint_dot_sum(simd::Backend::scalar, dim, c.sx.data(),
                                            c.sy.data(), c.sz.data(), c.ox.data(),
                                            c.oy.data(), c.oz.data(), pm, n, c.t,
                                            c.eps2);
    const double s2 = simd::adjoint_dot_sum(simd::Backend::avx2, dim, c.sx.data(),
                                            c.sy.data(), c.sz.data(), c.ox.data(),
                                            c.oy.data(), c.oz.data(), pm, n, c.t,
                                            c.eps2);
    CHECK(bits_equal(s1, s2));

    const double s3 = simd::adjoint_dot_sum_const(
        simd::Backend::scalar, dim, c.sx.data(), c.sy.data(), c.sz.data(), c.ox.data(),
        c.oy.data(), c.oz.data(), n, c.t, c.m, c.coefneg, c.eps2);
    const double s4 = simd::adjoint_dot_sum_const(
        simd::Backend::avx2, dim, c.sx.data(), c.sy.data(), c.sz.data(), c.ox.data(),
        c.oy.data(), c.oz.data(), n, c.t, c.m, c.coefneg, c.eps2);
    CHECK(bits_equal(s3, s4));
  }
}

TEST_CASE("backend sums match a plain reference accumulation") {
  // Not bitwise: plain accumulation rounds differently; 1e-13 relative.
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 10; ++rep) {
    const int dim = rep % 2 == 0 ? 3 : 2;
    const std::size_t n = 5 + rng() % 60;
    RandomCase c = make_case(rng, n, dim);

    double out[3];
    simd::grad_sum_const(simd::active_backend(), dim, c.sx.data(), c.sy.data(),
                         c.sz.data(), c.cw.data(), n, c.t, c.m, c.coefneg, c.eps2,
                         out);

    Vec3 ref{0, 0, 0};
    FrozenMatrix fm;
    fm.inv = c.m;
    fm.coefneg = c.coefneg;
    fm.dim = dim;
    double scale = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const Vec3 z{c.t[0] - c.sx[j], c.t[1] - c.sy[j], c.t[2] - c.sz[j]};
      if (norm2(z) <= c.eps2) continue;
      const Vec3 g = frozen_grad(fm, z);
      ref = ref + c.cw[j] * g;
      scale += std::abs(c.cw[j]) * norm(g);
    }
    for (int k = 0; k < 3; ++k)
      CHECK(std::abs(out[k] - ref[k]) <= 1e-13 * (scale + 1.0));
  }
}

TEST_CASE("target coinciding with a source is masked out, never NaN") {
  std::mt19937_64 rng(3);
  RandomCase c = make_case(rng, 9, 3);
  c.sx[4] = c.t[0];
  c.sy[4] = c.t[1];
  c.sz[4] = c.t[2];
  double out[3];
  simd::grad_sum_const(simd::active_backend(), 3, c.sx.data(), c.sy.data(),
                       c.sz.data(), c.cw.data(), 9, c.t, c.m, c.coefneg, 0.0, out);
  for (int k = 0; k < 3; ++k) CHECK(std::isfinite(out[k]));
}
