#include "irrsio/operator.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "irrsio/parallel.hpp"

namespace irrsio {

PreparedSources::PreparedSources(const std::vector<Vec3>& points,
                                 const MatrixField& field) {
  build(points, field);
}

PreparedSources::PreparedSources(const AtomicMeasure& mu, const MatrixField& field) {
  std::vector<Vec3> pts(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) pts[i] = mu.position(i);
  build(pts, field);
}

void PreparedSources::build(const std::vector<Vec3>& points, const MatrixField& field) {
  dim_ = field.dim();
  constant_ = field.constant();
  const std::size_t n = points.size();
  x_.resize(n);
  y_.resize(n);
  z_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    x_[i] = points[i][0];
    y_[i] = points[i][1];
    z_[i] = points[i][2];
  }
  if (constant_) {
    const_fm_ = freeze(field({0, 0, 0}));
    return;
  }
  i00_.resize(n);
  i01_.resize(n);
  i02_.resize(n);
  i11_.resize(n);
  i12_.resize(n);
  i22_.resize(n);
  cn_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const FrozenMatrix fm = freeze(field(points[i]));
    i00_[i] = fm.inv.i00;
    i01_[i] = fm.inv.i01;
    i02_[i] = fm.inv.i02;
    i11_[i] = fm.inv.i11;
    i12_[i] = fm.inv.i12;
    i22_[i] = fm.inv.i22;
    cn_[i] = fm.coefneg;
  }
}

simd::PerSourceMats PreparedSources::mats() const {
  return {i00_.data(), i01_.data(), i02_.data(), i11_.data(),
          i12_.data(), i22_.data(), cn_.data()};
}

namespace {

void check_eps0_coincidence(const AtomicMeasure& mu, const std::vector<Vec3>& targets,
                            double eps) {
  if (eps > 0.0) return;
  for (std::size_t t = 0; t < targets.size(); ++t)
    for (std::size_t j = 0; j < mu.size(); ++j)
      if (dist2(targets[t], mu.position(j)) == 0.0)
        throw std::invalid_argument(
            "apply_T: eps = 0 but target " + std::to_string(t) +
            " coincides with atom " + std::to_string(j));
}

FieldSample apply_T_impl(const AtomicMeasure& mu, const EllipticKernel& kern,
                         const std::vector<double>& coef,
                         const std::vector<Vec3>& targets, double eps, int threads,
                         const char* tag) {
  if (eps < 0.0) throw std::invalid_argument("apply_T: eps must be >= 0");
  const PreparedSources ps(mu, kern.field);
  const double eps2 = eps * eps;
  const simd::Backend be = simd::active_backend();
  const int dim = ps.dim();
  FieldSample out;
  out.points = targets;
  out.vec_values.resize(targets.size());
  out.provenance = tag;

  parallel_for(targets.size(), resolve_threads(threads), [&](std::size_t t) {
    const double tp[3] = {targets[t][0], targets[t][1], targets[t][2]};
    double acc[3];
    if (kern.mode == FreezeMode::at_first_arg) {
      const FrozenMatrix fm =
          ps.constant_field() ? ps.constant_frozen() : freeze(kern.field(targets[t]));
      simd::grad_sum_const(be, dim, ps.xs(), ps.ys(), ps.zs(), coef.data(), ps.size(),
                           tp, fm.inv, fm.coefneg, eps2, acc);
    } else if (ps.constant_field()) {
      const FrozenMatrix fm = ps.constant_frozen();
      simd::grad_sum_const(be, dim, ps.xs(), ps.ys(), ps.zs(), coef.data(), ps.size(),
                           tp, fm.inv, fm.coefneg, eps2, acc);
    } else {
      simd::grad_sum_var(be, dim, ps.xs(), ps.ys(), ps.zs(), coef.data(), ps.mats(),
                         ps.size(), tp, eps2, acc);
    }
    out.vec_values[t] = {acc[0], acc[1], acc[2]};
  });
  return out;
}

}  // namespace

FieldSample apply_T(const AtomicMeasure& mu, const EllipticKernel& kern,
                    const std::vector<Vec3>& targets, double eps, int threads) {
  check_eps0_coincidence(mu, targets, eps);
  return apply_T_impl(mu, kern, mu.weights(), targets, eps, threads, "T_eps");
}

FieldSample apply_T_density(const AtomicMeasure& mu, const EllipticKernel& kern,
                            const std::vector<double>& f,
                            const std::vector<Vec3>& targets, double eps,
                            int threads) {
  if (f.size() != mu.size())
    throw std::invalid_argument("apply_T_density: f length must match atom count");
  check_eps0_coincidence(mu, targets, eps);
  std::vector<double> coef(mu.size());
  for (std::size_t j = 0; j < mu.size(); ++j) coef[j] = mu.weight(j) * f[j];
  return apply_T_impl(mu, kern, coef, targets, eps, threads, "T_density");
}

FieldSample apply_T_adjoint(const VectorMeasure& omega, const EllipticKernel& kern,
                            const std::vector<Vec3>& targets, double eps,
                            int threads) {
  if (eps < 0.0) throw std::invalid_argument("apply_T_adjoint: eps must be >= 0");
  if (omega.points.size() != omega.weights.size())
    throw std::invalid_argument("apply_T_adjoint: malformed vector measure");
  if (eps == 0.0)
    for (std::size_t t = 0; t < targets.size(); ++t)
      for (std::size_t j = 0; j < omega.size(); ++j)
        if (dist2(targets[t], omega.points[j]) == 0.0)
          throw std::invalid_argument(
              "apply_T_adjoint: eps = 0 but target " + std::to_string(t) +
              " coincides with source " + std::to_string(j));

  const PreparedSources ps(omega.points, kern.field);
  std::vector<double> ox(omega.size()), oy(omega.size()), oz(omega.size());
  for (std::size_t j = 0; j < omega.size(); ++j) {
    ox[j] = omega.weights[j][0];
    oy[j] = omega.weights[j][1];
    oz[j] = omega.weights[j][2];
  }
  const double eps2 = eps * eps;
  const simd::Backend be = simd::active_backend();
  FieldSample out;
  out.points = targets;
  out.scalar_values.resize(targets.size());
  out.provenance = "T_adjoint";
  parallel_for(targets.size(), resolve_threads(threads), [&](std::size_t t) {
    const double tp[3] = {targets[t][0], targets[t][1], targets[t][2]};
    if (ps.constant_field()) {
      const FrozenMatrix& fm = ps.constant_frozen();
      out.scalar_values[t] = simd::adjoint_dot_sum_const(
          be, ps.dim(), ps.xs(), ps.ys(), ps.zs(), ox.data(), oy.data(), oz.data(),
          ps.size(), tp, fm.inv, fm.coefneg, eps2);
    } else {
      out.scalar_values[t] =
          simd::adjoint_dot_sum(be, ps.dim(), ps.xs(), ps.ys(), ps.zs(), ox.data(),
                                oy.data(), oz.data(), ps.mats(), ps.size(), tp, eps2);
    }
  });
  return out;
}

Vec3 eval_T_sum(const PreparedSources& ps, const EllipticKernel& kern,
                const std::vector<double>& coef, const Vec3& target, double eps) {
  const double tp[3] = {target[0], target[1], target[2]};
  double acc[3];
  const simd::Backend be = simd::active_backend();
  if (ps.constant_field() || kern.mode == FreezeMode::at_first_arg) {
    const FrozenMatrix fm =
        ps.constant_field() ? ps.constant_frozen() : freeze(kern.field(target));
    simd::grad_sum_const(be, ps.dim(), ps.xs(), ps.ys(), ps.zs(), coef.data(),
                         ps.size(), tp, fm.inv, fm.coefneg, eps * eps, acc);
  } else {
    simd::grad_sum_var(be, ps.dim(), ps.xs(), ps.ys(), ps.zs(), coef.data(), ps.mats(),
                       ps.size(), tp, eps * eps, acc);
  }
  return {acc[0], acc[1], acc[2]};
}

double eval_Tstar_sum(const PreparedSources& ps, const std::vector<double>& ox,
                      const std::vector<double>& oy, const std::vector<double>& oz,
                      const Vec3& target, double eps) {
  const double tp[3] = {target[0], target[1], target[2]};
  const simd::Backend be = simd::active_backend();
  if (ps.constant_field()) {
    const FrozenMatrix& fm = ps.constant_frozen();
    return simd::adjoint_dot_sum_const(be, ps.dim(), ps.xs(), ps.ys(), ps.zs(),
                                       ox.data(), oy.data(), oz.data(), ps.size(), tp,
                                       fm.inv, fm.coefneg, eps * eps);
  }
  return simd::adjoint_dot_sum(be, ps.dim(), ps.xs(), ps.ys(), ps.zs(), ox.data(),
                               oy.data(), oz.data(), ps.mats(), ps.size(), tp,
                               eps * eps);
}

NormEstimate operator_norm_estimate(const AtomicMeasure& mu,
                                    const EllipticKernel& kern, double eps,
                                    int threads) {
  const std::size_t n = mu.size();
  if (n < 2) throw std::invalid_argument("operator_norm_estimate: need >= 2 atoms");
  const double dmin = mu.min_pair_distance();
  if (!(eps > 0.0 && eps < dmin))
    throw std::invalid_argument(
        "operator_norm_estimate: eps must lie in (0, min inter-atom distance)");

  const PreparedSources ps(mu, kern.field);
  const int dim = ps.dim();
  const double eps2 = eps * eps;
  const simd::Backend be = simd::active_backend();
  const int nthreads = resolve_threads(threads);

  std::vector<double> wsqrt(n);
  for (std::size_t j = 0; j < n; ++j) wsqrt[j] = std::sqrt(mu.weight(j));

  std::vector<double> v(n, 1.0 / std::sqrt(static_cast<double>(n)));
  std::vector<double> coef(n);
  std::vector<double> u0(n), u1(n), u2(n);
  std::vector<double> vnext(n);

  // Frozen matrices at each atom for the M^T pass (constant-field instances
  // go through the broadcast kernel instead).
  auto apply_M = [&](const std::vector<double>& vin) {
    for (std::size_t j = 0; j < n; ++j) coef[j] = wsqrt[j] * vin[j];
    parallel_for(n, nthreads, [&](std::size_t i) {
      const Vec3 xi = mu.position(i);
      const double tp[3] = {xi[0], xi[1], xi[2]};
      double acc[3];
      if (kern.mode == FreezeMode::at_first_arg && !ps.constant_field()) {
        const FrozenMatrix fm = freeze(kern.field(xi));
        simd::grad_sum_const(be, dim, ps.xs(), ps.ys(), ps.zs(), coef.data(), n, tp,
                             fm.inv, fm.coefneg, eps2, acc);
      } else if (ps.constant_field()) {
        const FrozenMatrix& fm = ps.constant_frozen();
        simd::grad_sum_const(be, dim, ps.xs(), ps.ys(), ps.zs(), coef.data(), n, tp,
                             fm.inv, fm.coefneg, eps2, acc);
      } else {
        simd::grad_sum_var(be, dim, ps.xs(), ps.ys(), ps.zs(), coef.data(), ps.mats(),
                           n, tp, eps2, acc);
      }
      u0[i] = wsqrt[i] * acc[0];
      u1[i] = wsqrt[i] * acc[1];
      u2[i] = wsqrt[i] * acc[2];
    });
  };
  auto apply_Mt = [&]() {
    parallel_for(n, nthreads, [&](std::size_t j) {
      const Vec3 xj = mu.position(j);
      const double tp[3] = {xj[0], xj[1], xj[2]};
      double s;
      if (kern.mode == FreezeMode::at_first_arg && !ps.constant_field()) {
        s = simd::adjoint_dot_sum(be, dim, ps.xs(), ps.ys(), ps.zs(), u0.data(),
                                  u1.data(), u2.data(), ps.mats(), n, tp, eps2);
      } else if (ps.constant_field()) {
        const FrozenMatrix& fm = ps.constant_frozen();
        s = simd::adjoint_dot_sum_const(be, dim, ps.xs(), ps.ys(), ps.zs(), u0.data(),
                                        u1.data(), u2.data(), n, tp, fm.inv,
                                        fm.coefneg, eps2);
      } else {
        // Matrix frozen at the second kernel argument: K~(x_i, x_j) carries
        // A(x_j), constant along this column sum.
        const FrozenMatrix fm = freeze(kern.field(xj));
        s = simd::adjoint_dot_sum_const(be, dim, ps.xs(), ps.ys(), ps.zs(), u0.data(),
                                        u1.data(), u2.data(), n, tp, fm.inv,
                                        fm.coefneg, eps2);
      }
      vnext[j] = wsqrt[j] * s;
    });
  };

  const int cap = 10000;
  double sigma_prev = -1.0;
  NormEstimate est;
  for (int it = 1; it <= cap; ++it) {
    apply_M(v);
    // The Mt pass needs u premultiplied by sqrt(w) on each row block; u
    // already carries it (rows of M are scaled by sqrt(w_i)).
    double unorm2 = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      unorm2 += u0[i] * u0[i] + u1[i] * u1[i] + u2[i] * u2[i];
    const double sigma = std::sqrt(unorm2);  // v is unit
    apply_Mt();
    double vnorm2 = 0.0;
    for (std::size_t j = 0; j < n; ++j) vnorm2 += vnext[j] * vnext[j];
    const double vn = std::sqrt(vnorm2);
    if (vn == 0.0) {
      // v is in the kernel of M; the estimate is exactly 0.
      return {0.0, it, 0.0};
    }
    for (std::size_t j = 0; j < n; ++j) v[j] = vnext[j] / vn;
    est.iterations = it;
    est.value = sigma;
    if (sigma_prev >= 0.0) {
      est.last_gap = std::abs(sigma - sigma_prev);
      if (est.last_gap <= 1e-6 * sigma) return est;
    }
    sigma_prev = sigma;
  }
  throw std::runtime_error("operator_norm_estimate: no convergence in 10^4 "
                           "iterations; last gap " +
                           std::to_string(est.last_gap));
}

double harmonicity_check(const VectorMeasure& omega, const EllipticKernel& kern,
                         const Vec3& probe, double h) {
  if (omega.size() == 0) return 0.0;
  double dmin2 = std::numeric_limits<double>::infinity();
  for (const Vec3& p : omega.points) dmin2 = std::min(dmin2, dist2(probe, p));
  const double dsupp = std::sqrt(dmin2);
  if (!(dsupp > 10.0 * h))
    throw std::invalid_argument("harmonicity_check: probe too close to supp omega");

  const int d = kern.field.dim();
  auto u = [&](const Vec3& x) {
    return apply_T_adjoint(omega, kern, {x}, 0.0).scalar_values[0];
  };
  auto grad_u = [&](const Vec3& x) {
    Vec3 g{0, 0, 0};
    for (int j = 0; j < d; ++j) {
      Vec3 xp = x, xm = x;
      xp[j] += h;
      xm[j] -= h;
      g[j] = (u(xp) - u(xm)) / (2 * h);
    }
    return g;
  };
  // F_i(x) = (A^*(x) grad u)_i = sum_j A_{ji}(x) du_j; residual = -div F.
  auto flux = [&](const Vec3& x, int i) {
    const ConstantMatrix A = kern.field(x);
    const Vec3 g = grad_u(x);
    double s = 0.0;
    for (int j = 0; j < d; ++j) s += A.at(j, i) * g[j];
    return s;
  };
  double div = 0.0;
  for (int i = 0; i < d; ++i) {
    Vec3 xp = probe, xm = probe;
    xp[i] += h;
    xm[i] -= h;
    div += (flux(xp, i) - flux(xm, i)) / (2 * h);
  }
  return std::abs(-div) * std::pow(dsupp, d);
}

}  // namespace irrsio
