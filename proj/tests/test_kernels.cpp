#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "irrsio/kernels.hpp"

using namespace irrsio;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("fundamental solution closed forms") {
  const auto I3 = ConstantMatrix::identity(3);
  CHECK(fundamental_solution_const(I3, {1, 0, 0}) == doctest::Approx(1.0 / (4 * kPi)));
  // Homogeneity of degree -1 in 3-d.
  CHECK(fundamental_solution_const(I3, {2, 0, 0}) ==
        doctest::Approx(0.5 / (4 * kPi)));

  // Anisotropic: equal quadratic forms give equal values.
  const auto E = ConstantMatrix::diag(3, 4.0, 1.0, 1.0);
  const double v1 = fundamental_solution_const(E, {1, 0, 0});
  const double v2 = fundamental_solution_const(E, {0, 0.5, 0});
  CHECK(v1 == doctest::Approx(v2).epsilon(1e-14));
  // <E^-1 x, x> = 1/4 at (1,0,0), sqrt(det E) = 2.
  CHECK(v1 == doctest::Approx(2.0 / (8 * kPi)).epsilon(1e-14));

  const auto I2 = ConstantMatrix::identity(2);
  CHECK(fundamental_solution_const(I2, {1, 0, 0}) == doctest::Approx(0.0));
  CHECK(fundamental_solution_const(I2, {0.5, 0, 0}) ==
        doctest::Approx(-std::log(0.5) / (2 * kPi)));

  CHECK_THROWS_AS(fundamental_solution_const(I3, {0, 0, 0}), std::invalid_argument);
}

TEST_CASE("weak form oracle pins the normalization") {
  BumpSpec bump;
  bump.radius = 1.0;
  GridSpec fine;
  fine.cells_per_axis = 96;

  SUBCASE("identity, diag and random SPD in 3-d") {
    const double phi0 = bump_value(bump, {0, 0, 0});
    for (const auto& E :
         {ConstantMatrix::identity(3), ConstantMatrix::diag(3, 2, 1, 1),
          random_spd(3, 4.0, 99)}) {
      const double res = weak_form_check(E, bump, fine);
      CHECK(res < 1e-2 * phi0);
    }
  }

  SUBCASE("residual decreases monotonically under refinement") {
    const auto E = ConstantMatrix::diag(3, 2, 1, 1);
    double prev = 1e300;
    for (int cells : {32, 64, 128, 256}) {
      GridSpec g;
      g.cells_per_axis = cells;
      const double res = weak_form_check(E, bump, g);
      CHECK(res < prev);
      prev = res;
    }
  }

  SUBCASE("2-d log kernel satisfies the same identity") {
    const auto E2 = ConstantMatrix::diag(2, 2, 1);
    GridSpec g;
    g.cells_per_axis = 256;
    CHECK(weak_form_check(E2, bump, g) < 1e-2);
  }

  SUBCASE("too coarse grids are refused") {
    GridSpec g;
    g.cells_per_axis = 16;
    CHECK_THROWS_AS(weak_form_check(ConstantMatrix::identity(3), bump, g),
                    std::invalid_argument);
  }
}

TEST_CASE("gradient matches central finite differences") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int rep = 0; rep < 100; ++rep) {
    const int d = rep % 2 == 0 ? 3 : 2;
    const auto E = random_spd(d, 3.0, rng());
    Vec3 x{u(rng), u(rng), d == 3 ? u(rng) : 0.0};
    if (norm(x) < 0.1) x[0] += 0.5;
    const Vec3 g = grad1_fundamental_const(E, x);
    const double h = 1e-6 * norm(x);
    Vec3 fd{0, 0, 0};
    for (int j = 0; j < d; ++j) {
      Vec3 xp = x, xm = x;
      xp[j] += h;
      xm[j] -= h;
      fd[j] = (fundamental_solution_const(E, xp) - fundamental_solution_const(E, xm)) /
              (2 * h);
    }
    CHECK(norm(g - fd) <= 1e-5 * norm(g));
  }
}

TEST_CASE("oddness and homogeneity of the gradient") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int rep = 0; rep < 50; ++rep) {
    const int d = rep % 2 == 0 ? 3 : 2;
    const auto E = random_spd(d, 2.0, rng());
    const Vec3 x{u(rng) + 1.5, u(rng), d == 3 ? u(rng) : 0.0};
    const Vec3 g = grad1_fundamental_const(E, x);
    const Vec3 gneg = grad1_fundamental_const(E, -x);
    CHECK(gneg[0] == -g[0]);
    CHECK(gneg[1] == -g[1]);
    CHECK(gneg[2] == -g[2]);
    const Vec3 g2 = grad1_fundamental_const(E, 2.0 * x);
    const double expect = std::pow(2.0, -(d - 1));
    CHECK(norm(g2) == doctest::Approx(expect * norm(g)).epsilon(1e-10));
  }
}

TEST_CASE("frozen kernel") {
  SUBCASE("constant field is the Riesz-type kernel and exactly antisymmetric") {
    EllipticKernel k{MatrixField::identity(3), FreezeMode::at_first_arg};
    const Vec3 x{0.3, -0.2, 0.5}, y{-0.1, 0.4, 0.0};
    const Vec3 kxy = frozen_kernel(k, x, y);
    const Vec3 z = x - y;
    const Vec3 expect = (-1.0 / (4 * kPi * std::pow(norm(z), 3))) * z;
    CHECK(norm(kxy - expect) <= 1e-15);
    const Vec3 kyx = frozen_kernel(k, y, x);
    CHECK(kxy[0] == -kyx[0]);
    CHECK(kxy[1] == -kyx[1]);
    CHECK(kxy[2] == -kyx[2]);
  }

  SUBCASE("swap with the freezing point held fixed is odd") {
    EllipticKernel k{MatrixField::sin_perturbation(3, 1.0, 0.2),
                     FreezeMode::at_first_arg};
    const Vec3 x{0.3, 0.1, -0.2}, y{0.0, 0.25, 0.2};
    const FrozenMatrix fm = freeze(k.field(x));
    const Vec3 a = frozen_grad(fm, y - x);
    const Vec3 b = frozen_grad(fm, x - y);
    CHECK(a[0] == -b[0]);
    CHECK(a[1] == -b[1]);
    CHECK(a[2] == -b[2]);
  }

  SUBCASE("freeze-mode discrepancy vanishes faster than |h|^-n") {
    EllipticKernel ks{MatrixField::sin_perturbation(3, 1.0, 0.25),
                      FreezeMode::at_first_arg};
    EllipticKernel kt = ks;
    kt.mode = FreezeMode::at_second_arg;
    const Vec3 y{0.2, 0.1, -0.1};
    std::vector<double> lh, ld;
    for (double h : {1e-1, 1e-2, 1e-3, 1e-4}) {
      const Vec3 x = y + Vec3{h, 0.4 * h, -0.2 * h};
      const double diff = norm(frozen_kernel(ks, x, y) - frozen_kernel(kt, x, y));
      lh.push_back(std::log(norm(x - y)));
      ld.push_back(std::log(diff));
    }
    // Slope of the log-log fit should be near alpha - n = -1, well above -n.
    const double n = 4, sx = lh[0] + lh[1] + lh[2] + lh[3],
                 sy = ld[0] + ld[1] + ld[2] + ld[3];
    double sxx = 0, sxy = 0;
    for (int i = 0; i < 4; ++i) {
      sxx += lh[i] * lh[i];
      sxy += lh[i] * ld[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    CHECK(slope > -2.0 + 0.5);
    CHECK(slope == doctest::Approx(-1.0).epsilon(0.3));
  }

  SUBCASE("x == y rejected") {
    EllipticKernel k{MatrixField::identity(2), FreezeMode::at_first_arg};
    CHECK_THROWS_AS(frozen_kernel(k, {1, 1, 0}, {1, 1, 0}), std::invalid_argument);
  }
}

TEST_CASE("cz estimates") {
  SampleSpec spec;
  spec.pairs = 500;

  SUBCASE("identity field slope is exactly -n") {
    EllipticKernel k{MatrixField::identity(3), FreezeMode::at_first_arg};
    const CzReport rep = cz_estimate_check(k, spec);
    CHECK(rep.near_slope == doctest::Approx(-2.0).epsilon(1e-3));

    EllipticKernel k2{MatrixField::identity(2), FreezeMode::at_first_arg};
    const CzReport rep2 = cz_estimate_check(k2, spec);
    CHECK(rep2.near_slope == doctest::Approx(-1.0).epsilon(1e-3));
  }

  SUBCASE("sinusoidal alpha=1 field slope within 0.1 of -n") {
    EllipticKernel k{MatrixField::sin_perturbation(3, 1.0, 0.25),
                     FreezeMode::at_first_arg};
    const CzReport rep = cz_estimate_check(k, spec);
    CHECK(rep.near_slope >= -2.1);
    CHECK(rep.near_slope <= -1.9);
    CHECK(rep.smooth_quotient > 0.0);
    CHECK(std::isfinite(rep.smooth_quotient));
  }

  SUBCASE("far-field constant stable under sample doubling") {
    EllipticKernel k{MatrixField::identity(3), FreezeMode::at_first_arg};
    SampleSpec a = spec, b = spec;
    b.pairs = 2 * a.pairs;
    const double ca = cz_estimate_check(k, a).far_constant;
    const double cb = cz_estimate_check(k, b).far_constant;
    CHECK(std::abs(ca - cb) <= 0.25 * std::max(ca, cb));
  }

  SUBCASE("degenerate sample rejected") {
    EllipticKernel k{MatrixField::identity(3), FreezeMode::at_first_arg};
    SampleSpec bad = spec;
    bad.pairs = 5;
    CHECK_THROWS_AS(cz_estimate_check(k, bad), std::invalid_argument);
  }
}

TEST_CASE("symmetrization regression") {
  SUBCASE("constant field rejected") {
    EllipticKernel k{MatrixField::identity(3), FreezeMode::at_first_arg};
    SampleSpec spec;
    CHECK_THROWS_AS(symmetrization_check(k, spec), std::invalid_argument);
  }

  SUBCASE("alpha=1 field: slope near alpha - n = -1") {
    EllipticKernel k{MatrixField::sin_perturbation(3, 1.0, 0.25),
                     FreezeMode::at_first_arg};
    SampleSpec spec;
    spec.pairs = 1500;
    const auto rep = symmetrization_check(k, spec);
    CHECK(rep.slope == doctest::Approx(-1.0).epsilon(0.15));
  }

  SUBCASE("alpha=0.5 field: slope near -1.5") {
    EllipticKernel k{MatrixField::sin_perturbation(3, 0.5, 0.25),
                     FreezeMode::at_first_arg};
    SampleSpec spec;
    spec.pairs = 2500;
    const auto rep = symmetrization_check(k, spec);
    CHECK(rep.slope == doctest::Approx(-1.5).epsilon(0.14));
  }
}

TEST_CASE("ellipticity round trip on evaluated fields") {
  const auto field = MatrixField::sin_perturbation(3, 1.0, 0.3);
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int rep = 0; rep < 200; ++rep) {
    const Vec3 x{u(rng), u(rng), u(rng)};
    const auto A = field(x);
    const auto ev = A.eigenvalues();
    CHECK(ev[0] >= 1.0 / field.lambda() - 1e-9);
    CHECK(ev[2] <= field.lambda() + 1e-9);
  }
}
