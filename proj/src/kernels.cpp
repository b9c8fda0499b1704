#include "irrsio/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <stdexcept>

namespace irrsio {

namespace {

constexpr double kPi = 3.14159265358979323846;

double quadratic_form(const ConstantMatrix& inv, const Vec3& x) {
  const Vec3 w = inv.apply(x);
  return dot(w, x);
}

struct LineFit {
  double slope, intercept;
};

LineFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw std::runtime_error("fit_line: degenerate abscissae");
  const double slope = (n * sxy - sx * sy) / denom;
  return {slope, (sy - slope * sx) / n};
}

}  // namespace

double fundamental_solution_const(const ConstantMatrix& E, const Vec3& x) {
  if (norm2(x) == 0.0)
    throw std::invalid_argument("fundamental solution: x = 0 is the singularity");
  const ConstantMatrix inv = E.inverse();
  const double q = quadratic_form(inv, x);
  const double sdet = std::sqrt(E.det());
  if (E.dim == 3) return 1.0 / (4.0 * kPi * sdet) / std::sqrt(q);
  return -1.0 / (2.0 * kPi * sdet) * 0.5 * std::log(q);
}

FrozenMatrix freeze(const ConstantMatrix& E) {
  const ConstantMatrix inv = E.inverse();
  FrozenMatrix fm;
  fm.dim = E.dim;
  fm.inv = {inv.at(0, 0), inv.at(0, 1), inv.at(0, 2),
            inv.at(1, 1), inv.at(1, 2), inv.at(2, 2)};
  const double sdet = std::sqrt(E.det());
  fm.coefneg = E.dim == 3 ? -1.0 / (4.0 * kPi * sdet) : -1.0 / (2.0 * kPi * sdet);
  return fm;
}

Vec3 frozen_grad(const FrozenMatrix& fm, const Vec3& z) {
  const double w0 = fm.inv.i00 * z[0] + fm.inv.i01 * z[1] + fm.inv.i02 * z[2];
  const double w1 = fm.inv.i01 * z[0] + fm.inv.i11 * z[1] + fm.inv.i12 * z[2];
  const double w2 = fm.inv.i02 * z[0] + fm.inv.i12 * z[1] + fm.inv.i22 * z[2];
  const double q = w0 * z[0] + w1 * z[1] + w2 * z[2];
  const double den = fm.dim == 3 ? q * std::sqrt(q) : q;
  const double u = fm.coefneg / den;
  return {u * w0, u * w1, u * w2};
}

Vec3 grad1_fundamental_const(const ConstantMatrix& E, const Vec3& x) {
  if (norm2(x) == 0.0)
    throw std::invalid_argument("gradient: x = 0 is the singularity");
  return frozen_grad(freeze(E), x);
}

Vec3 frozen_kernel(const EllipticKernel& kern, const Vec3& x, const Vec3& y) {
  if (dist2(x, y) == 0.0) throw std::invalid_argument("frozen_kernel: x == y");
  const Vec3 freeze_at = kern.mode == FreezeMode::at_first_arg ? x : y;
  return frozen_grad(freeze(kern.field(freeze_at)), x - y);
}

double bump_value(const BumpSpec& b, const Vec3& x) {
  const double u = dist2(x, b.center) / (b.radius * b.radius);
  if (u >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - u));
}

Vec3 bump_gradient(const BumpSpec& b, const Vec3& x) {
  const Vec3 z = x - b.center;
  const double r2 = b.radius * b.radius;
  const double u = norm2(z) / r2;
  if (u >= 1.0) return {0, 0, 0};
  const double t = 1.0 - u;
  // d/du exp(1 - 1/t) = -exp(1 - 1/t) / t^2, du/dx = 2 z / r^2.
  const double f = std::exp(1.0 - 1.0 / t);
  const double scale = -f / (t * t) * 2.0 / r2;
  return scale * z;
}

double bump_hessian_trace(const BumpSpec& b, const ConstantMatrix& E) {
  const double tr = E.dim == 3 ? E.at(0, 0) + E.at(1, 1) + E.at(2, 2)
                               : E.at(0, 0) + E.at(1, 1);
  return -2.0 / (b.radius * b.radius) * tr;
}

double weak_form_check(const ConstantMatrix& E, const BumpSpec& bump,
                       const GridSpec& grid) {
  const int d = E.dim;
  const int cells = grid.cells_per_axis;
  if (cells < 32)
    throw std::invalid_argument("weak_form_check: grid too coarse for the bump "
                                "(need >= 32 cells per axis)");
  // The grid box covers the bump support.
  const double lo[3] = {bump.center[0] - bump.radius, bump.center[1] - bump.radius,
                        bump.center[2] - bump.radius};
  const double pitch = 2.0 * bump.radius / cells;
  if (pitch > bump.radius / 16.0)
    throw std::invalid_argument("weak_form_check: resolution too coarse relative "
                                "to the bump scale");
  const double h = grid.exclusion > 0.0 ? grid.exclusion : 3.0 * pitch;

  const ConstantMatrix inv = E.inverse();
  const FrozenMatrix fm = freeze(E);
  const int kz = d == 3 ? cells : 1;
  const double cellvol = d == 3 ? pitch * pitch * pitch : pitch * pitch;

  double total = 0.0, comp = 0.0;
  auto accumulate = [&](double v) {  // Kahan, fixed order
    const double y = v - comp;
    const double t = total + y;
    comp = (t - total) - y;
    total = t;
  };

  for (int iz = 0; iz < kz; ++iz) {
    const double z = d == 3 ? lo[2] + (iz + 0.5) * pitch : 0.0;
    for (int iy = 0; iy < cells; ++iy) {
      const double y = lo[1] + (iy + 0.5) * pitch;
      for (int ix = 0; ix < cells; ++ix) {
        const Vec3 p{lo[0] + (ix + 0.5) * pitch, y, z};
        const double q = quadratic_form(inv, p);
        if (q <= h * h) continue;
        const Vec3 g = frozen_grad(fm, p);  // grad Theta at p
        const Vec3 eg = E.apply(g);
        accumulate(dot(eg, bump_gradient(bump, p)) * cellvol);
      }
    }
  }
  // Excluded-region contribution to second order in h: the odd part
  // integrates to zero over the ellipsoid and the quadratic part gives
  // -(h^2 / 2d) tr(E Hess phi(0)).
  const double correction = -(h * h) / (2.0 * d) * bump_hessian_trace(bump, E);
  const double phi0 = bump_value(bump, {0, 0, 0});
  return std::abs(total + correction - phi0);
}

CzReport cz_estimate_check(const EllipticKernel& kern, const SampleSpec& spec) {
  if (spec.pairs < 10)
    throw std::invalid_argument("cz_estimate_check: need at least 10 sample pairs");
  if (!(spec.r_max / spec.r_min >= 100.0))
    throw std::invalid_argument("cz_estimate_check: pairs must span >= 2 decades");
  const int d = kern.field.dim();
  const int n = d - 1;
  const double gamma = std::min(kern.field.alpha(), 0.5);
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unif(-spec.box, spec.box);
  std::uniform_real_distribution<double> unit01(0.0, 1.0);

  auto random_dir = [&]() {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vec3 v{gauss(rng), gauss(rng), d == 3 ? gauss(rng) : 0.0};
    while (norm2(v) < 1e-12) v = {gauss(rng), gauss(rng), d == 3 ? gauss(rng) : 0.0};
    return (1.0 / norm(v)) * v;
  };
  auto random_point = [&]() {
    return Vec3{unif(rng), unif(rng), d == 3 ? unif(rng) : 0.0};
  };

  std::vector<double> logr, logk;
  double smooth_q = 0.0, far_c = 0.0;
  for (std::size_t s = 0; s < spec.pairs; ++s) {
    const Vec3 x = random_point();
    const double r =
        spec.r_min * std::pow(spec.r_max / spec.r_min, unit01(rng));
    const Vec3 dir = random_dir();
    const Vec3 y = x - r * dir;
    logr.push_back(std::log(r));
    logk.push_back(std::log(norm(frozen_kernel(kern, x, y))));

    // Smoothness quotient with 2|y - y'| <= |x - y|.
    const Vec3 yp = y + (0.25 * r) * random_dir();
    const double dk = norm(frozen_kernel(kern, x, y) - frozen_kernel(kern, x, yp)) +
                      norm(frozen_kernel(kern, y, x) - frozen_kernel(kern, yp, x));
    const double quot = dk * std::pow(r, n + gamma) / std::pow(dist(y, yp), gamma);
    smooth_q = std::max(smooth_q, quot);

    // Far field |x - y| in [1, 10].
    const double rf = 1.0 + 9.0 * unit01(rng);
    const Vec3 yf = x - rf * dir;
    const double kf = norm(frozen_kernel(kern, x, yf));
    far_c = std::max(far_c, kf * std::pow(rf, (n - 1) * 0.5));
  }
  const LineFit fit = fit_line(logr, logk);
  CzReport rep;
  rep.near_slope = fit.slope;
  rep.near_intercept = fit.intercept;
  rep.smooth_quotient = smooth_q;
  rep.far_constant = far_c;
  rep.gamma = gamma;
  return rep;
}

SymmetrizationReport symmetrization_check(const EllipticKernel& kern,
                                          const SampleSpec& spec) {
  if (kern.field.constant())
    throw std::invalid_argument(
        "symmetrization_check: constant field has identically zero defect");
  const int d = kern.field.dim();
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unif(-spec.box, spec.box);
  std::uniform_real_distribution<double> unit01(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  // Per-bin envelope maxima of |K~(x,y) + K~(y,x)|; the target inequality is
  // an upper bound, so we fit the envelope rather than the scatter mean. The
  // per-bin budget must be large enough that pairs straddling the Holder cusp
  // set of the field appear even in the smallest bins (cusp hit probability
  // scales like the bin radius).
  const int bins_per_decade = 4;
  const double decades = std::log10(spec.r_max / spec.r_min);
  const int bins = std::max(4, static_cast<int>(std::lround(decades * bins_per_decade)));
  std::vector<double> env(bins, 0.0), envr(bins, 0.0);
  const std::size_t per_bin = std::max<std::size_t>(spec.pairs, 256);
  for (int b = 0; b < bins; ++b) {
    const double rb =
        spec.r_min * std::pow(spec.r_max / spec.r_min, (b + 0.5) / bins);
    for (std::size_t s = 0; s < per_bin; ++s) {
      const Vec3 x{unif(rng), unif(rng), d == 3 ? unif(rng) : 0.0};
      Vec3 v{gauss(rng), gauss(rng), d == 3 ? gauss(rng) : 0.0};
      while (norm2(v) < 1e-12) v = {gauss(rng), gauss(rng), d == 3 ? gauss(rng) : 0.0};
      const Vec3 y = x + (rb / norm(v)) * v;
      const double defect = norm(frozen_kernel(kern, x, y) + frozen_kernel(kern, y, x));
      env[b] = std::max(env[b], defect);
    }
    envr[b] = rb;
  }
  std::vector<double> lx, ly;
  for (int b = 0; b < bins; ++b)
    if (env[b] > 0.0) {
      lx.push_back(std::log(envr[b]));
      ly.push_back(std::log(env[b]));
    }
  if (lx.size() < 3)
    throw std::runtime_error("symmetrization_check: defect vanished on samples");
  const LineFit fit = fit_line(lx, ly);
  return {fit.slope, std::exp(fit.intercept)};
}

}  // namespace irrsio
