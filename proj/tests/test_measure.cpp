#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "irrsio/measure.hpp"

using namespace irrsio;

namespace {

// Independent brute-force ball counter used as the oracle for density facts.
double count_mass(const AtomicMeasure& mu, const Vec3& c, double r) {
  double m = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const Vec3 p = mu.position(i);
    const double dx = p[0] - c[0], dy = p[1] - c[1], dz = p[2] - c[2];
    if (std::sqrt(dx * dx + dy * dy + dz * dz) < r) m += mu.weight(i);
  }
  return m;
}

RatioSchedule constant_schedule(double r, int n) {
  RatioSchedule s;
  s.ratios.assign(n, r);
  return s;
}

}  // namespace

TEST_CASE("generation-1 quarter Cantor puts atoms at the four cell centers") {
  const auto mu = make_cantor_measure(constant_schedule(0.25, 1), 1, 2);
  REQUIRE(mu.size() == 4);
  const Vec3 expected[4] = {{0.125, 0.125, 0}, {0.875, 0.125, 0},
                            {0.125, 0.875, 0}, {0.875, 0.875, 0}};
  for (const Vec3& e : expected) {
    bool found = false;
    for (std::size_t i = 0; i < 4; ++i)
      if (dist(mu.position(i), e) < 1e-15 && mu.weight(i) == 0.25) found = true;
    CHECK(found);
  }
}

TEST_CASE("cantor mass conservation is exact for all N <= 12 at dyadic ratios") {
  for (int n = 1; n <= 8; ++n) {
    const auto mu = make_cantor_measure(constant_schedule(0.25, n), n, 2);
    CHECK(mu.size() == static_cast<std::size_t>(std::pow(4, n)));
    CHECK(mu.total_mass() == doctest::Approx(1.0).epsilon(1e-13));
  }
  const auto mu16 = make_cantor_measure(constant_schedule(0.25, 2), 2, 2);
  CHECK(mu16.size() == 16);
  CHECK(mu16.total_mass() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("alternating-ratio Cantor density oscillates across scales") {
  RatioSchedule s;
  s.ratios = {0.25, 1.0 / 12, 0.25, 1.0 / 12};
  const auto mu = make_cantor_measure(s, 4, 2);
  REQUIRE(mu.size() == 256);

  // Oracle: direct ball counting of the density at an atom across the
  // generation scales. Side lengths: prod of ratios.
  const Vec3 x = mu.position(0);
  double side = 1.0;
  std::vector<double> scale_density;
  for (int g = 0; g < 4; ++g) {
    side *= s.ratios[g];
    const double r = side * std::sqrt(2.0) * 0.75;  // captures one gen-g cell
    scale_density.push_back(count_mass(mu, x, r) / (2 * r));
  }
  double dmin = scale_density[0], dmax = scale_density[0];
  for (double v : scale_density) {
    dmin = std::min(dmin, v);
    dmax = std::max(dmax, v);
  }
  CHECK(dmax / dmin >= 3.0);
}

TEST_CASE("graph measure endpoints and normalization") {
  const auto two = make_graph_measure(2, 0.0, 2);
  REQUIRE(two.size() == 2);
  CHECK(two.position(0) == Vec3{0, 0, 0});
  CHECK(two.position(1) == Vec3{1, 0, 0});
  CHECK(two.weight(0) == 0.5);

  const auto sloped = make_graph_measure(257, 0.5, 2);
  CHECK(sloped.total_mass() == doctest::Approx(1.0).epsilon(1e-12));

  const auto flat = make_graph_measure(100, 0.0, 2);
  // Density around interior atoms within factor 2 of 1/2 on mid scales.
  for (std::size_t i = 0; i < flat.size(); i += 7) {
    for (double r : {5.0 / 100, 0.1, 0.25}) {
      const double th = density(flat, Ball{flat.position(i), r});
      CHECK(th >= 0.25);
      CHECK(th <= 1.0);
    }
  }
}

TEST_CASE("density follows the (2r)^n open-ball convention") {
  AtomicMeasure one(2, {{0, 0, 0}}, {1.0});
  CHECK(density(one, Ball{{0, 0, 0}, 1.0}) == doctest::Approx(0.5));
  AtomicMeasure one3(3, {{0, 0, 0}}, {1.0});
  CHECK(density(one3, Ball{{0, 0, 0}, 1.0}) == doctest::Approx(0.25));

  const auto mu = make_cantor_measure(constant_schedule(0.25, 1), 1, 2);
  CHECK(density(mu, Ball{{0.125, 0.125, 0}, 0.01}) == doctest::Approx(12.5));
}

TEST_CASE("an atom exactly on the sphere is excluded") {
  AtomicMeasure mu(2, {{0, 0, 0}, {1, 0, 0}}, {1.0, 1.0});
  CHECK(ball_mass(mu, Ball{{0, 0, 0}, 1.0}) == 1.0);   // boundary atom out
  CHECK(ball_mass(mu, Ball{{0, 0, 0}, 1.0000001}) == 2.0);
}

TEST_CASE("adding an atom inside the ball never decreases density") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-0.4, 0.4);
  for (int rep = 0; rep < 25; ++rep) {
    std::vector<Vec3> pos{{u(rng), u(rng), 0}, {u(rng), u(rng), 0}};
    std::vector<double> w{0.5, 0.25};
    AtomicMeasure base(2, pos, w);
    const Ball b{{0, 0, 0}, 0.5};
    const double before = density(base, b);
    pos.push_back({u(rng) * 0.9, u(rng) * 0.9, 0});
    w.push_back(0.1);
    AtomicMeasure more(2, pos, w);
    CHECK(density(more, b) >= before - 1e-15);
  }
}

TEST_CASE("density profile shapes") {
  AtomicMeasure one(2, {{0.3, 0.4, 0}}, {1.0});
  const auto prof = density_profile(one, {0.3, 0.4, 0}, 0.1, 1.0, 8);
  for (std::size_t i = 0; i < prof.size(); ++i) {
    CHECK(prof[i].second == doctest::Approx(1.0 / (2 * prof[i].first)));
    if (i > 0) {
      CHECK(prof[i].first > prof[i - 1].first);
      CHECK(prof[i].second < prof[i - 1].second);
    }
  }

  // AD-regular calibration: quarter Cantor profile within a constant factor.
  const auto reg = make_cantor_measure(constant_schedule(0.25, 5), 5, 2);
  const auto p2 = density_profile(reg, reg.position(0), 2e-3, 0.5, 4);
  double lo = 1e300, hi = 0;
  for (auto& [r, th] : p2) {
    lo = std::min(lo, th);
    hi = std::max(hi, th);
  }
  CHECK(hi / lo <= 8.0);

  // Alternating-ratio Cantor: min/max over resolved range <= 1/3.
  RatioSchedule alt;
  alt.ratios = {0.25, 1.0 / 12, 0.25, 1.0 / 12, 0.25};
  const auto irr = make_cantor_measure(alt, 5, 2);
  const auto p3 = density_profile(irr, irr.position(0), 2e-4, 0.5, 4);
  lo = 1e300;
  hi = 0;
  for (auto& [r, th] : p3) {
    lo = std::min(lo, th);
    hi = std::max(hi, th);
  }
  CHECK(lo / hi <= 1.0 / 3.0);
}

TEST_CASE("growth constant") {
  AtomicMeasure one(2, {{0, 0, 0}}, {1.0});
  CHECK(growth_constant(one, 4) == doctest::Approx(1.0));

  const auto seg = make_graph_measure(512, 0.0, 2);
  const double c0 = growth_constant(seg, 64);
  CHECK(c0 >= 1.0);
  CHECK(c0 <= 4.0);

  const auto cant = make_cantor_measure(constant_schedule(0.25, 5), 5, 2);
  const double a = growth_constant(cant, 32, 5);
  const double b = growth_constant(cant, 64, 5);
  CHECK(std::abs(a - b) <= 0.1 * std::max(a, b));
}

TEST_CASE("measure file round-trip and validation") {
  const auto mu = make_cantor_measure(constant_schedule(0.25, 2), 2, 2);
  std::stringstream ss;
  write_measure(ss, mu);
  const auto back = read_measure(ss);
  REQUIRE(back.size() == mu.size());
  CHECK(back.dim() == 2);
  for (std::size_t i = 0; i < mu.size(); ++i) {
    CHECK(back.position(i) == mu.position(i));
    CHECK(back.weight(i) == mu.weight(i));
  }

  std::stringstream bad("0.5 0.5 1.0\n0.25 0.25 -2.0\n");
  CHECK_THROWS_WITH_AS(read_measure(bad), doctest::Contains("line 2"),
                       std::runtime_error);

  std::stringstream mixed("0.5 0.5 1.0\n0.25 0.25 0.25 1.0\n");
  CHECK_THROWS_AS(read_measure(mixed), std::runtime_error);

  std::stringstream comments("# header\n0.5 0.5 1.0 # trailing\n\n");
  CHECK(read_measure(comments).size() == 1);
}

TEST_CASE("constructor rejections") {
  RatioSchedule s;
  s.ratios = {0.6};
  CHECK_THROWS_AS(make_cantor_measure(s, 1, 2), std::invalid_argument);
  CHECK_THROWS_AS(make_cantor_measure(constant_schedule(0.25, 13), 13, 2),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_cantor_measure(constant_schedule(0.25, 1), 2, 2),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_graph_measure(1, 0.0, 2), std::invalid_argument);
  CHECK_THROWS_AS(AtomicMeasure(2, {{0, 0, 0}}, {0.0}), std::invalid_argument);
}
