#include "irrsio/variational.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "irrsio/parallel.hpp"

namespace irrsio {

SigmaKernel::SigmaKernel(const SmoothedMeasure& sm, const EllipticKernel& kern,
                         int threads)
    : nodes_(sm.nodes), w_(sm.node_w), kern_(kern), ps_(sm.nodes, kern.field),
      threads_(resolve_threads(threads)) {
  for (double w : w_) mass_ += w;
  if (nodes_.empty()) throw std::invalid_argument("SigmaKernel: empty sigma");
}

std::vector<Vec3> SigmaKernel::apply_T_at(const std::vector<double>& g,
                                          const std::vector<Vec3>& targets) const {
  if (g.size() != nodes_.size())
    throw std::invalid_argument("SigmaKernel: g length mismatch");
  std::vector<double> coef(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) coef[j] = g[j] * w_[j];
  std::vector<Vec3> out(targets.size());
  const simd::Backend be = simd::active_backend();
  const int dim = ps_.dim();
  parallel_for(targets.size(), threads_, [&](std::size_t t) {
    const double tp[3] = {targets[t][0], targets[t][1], targets[t][2]};
    double acc[3];
    if (kern_.mode == FreezeMode::at_first_arg) {
      const FrozenMatrix fm = ps_.constant_field() ? ps_.constant_frozen()
                                                   : freeze(kern_.field(targets[t]));
      simd::grad_sum_const(be, dim, ps_.xs(), ps_.ys(), ps_.zs(), coef.data(),
                           ps_.size(), tp, fm.inv, fm.coefneg, 0.0, acc);
    } else if (ps_.constant_field()) {
      const FrozenMatrix& fm = ps_.constant_frozen();
      simd::grad_sum_const(be, dim, ps_.xs(), ps_.ys(), ps_.zs(), coef.data(),
                           ps_.size(), tp, fm.inv, fm.coefneg, 0.0, acc);
    } else {
      simd::grad_sum_var(be, dim, ps_.xs(), ps_.ys(), ps_.zs(), coef.data(),
                         ps_.mats(), ps_.size(), tp, 0.0, acc);
    }
    out[t] = {acc[0], acc[1], acc[2]};
  });
  return out;
}

std::vector<Vec3> SigmaKernel::apply_T_nodes(const std::vector<double>& g) const {
  return apply_T_at(g, nodes_);
}

std::vector<double> SigmaKernel::apply_Tstar_at(
    const std::vector<Vec3>& omega, const std::vector<Vec3>& targets) const {
  if (omega.size() != nodes_.size())
    throw std::invalid_argument("SigmaKernel: omega length mismatch");
  std::vector<double> ox(omega.size()), oy(omega.size()), oz(omega.size());
  for (std::size_t j = 0; j < omega.size(); ++j) {
    ox[j] = omega[j][0];
    oy[j] = omega[j][1];
    oz[j] = omega[j][2];
  }
  std::vector<double> out(targets.size());
  const simd::Backend be = simd::active_backend();
  parallel_for(targets.size(), threads_, [&](std::size_t t) {
    const double tp[3] = {targets[t][0], targets[t][1], targets[t][2]};
    if (ps_.constant_field()) {
      const FrozenMatrix& fm = ps_.constant_frozen();
      out[t] = simd::adjoint_dot_sum_const(be, ps_.dim(), ps_.xs(), ps_.ys(),
                                           ps_.zs(), ox.data(), oy.data(), oz.data(),
                                           ps_.size(), tp, fm.inv, fm.coefneg, 0.0);
    } else {
      out[t] = simd::adjoint_dot_sum(be, ps_.dim(), ps_.xs(), ps_.ys(), ps_.zs(),
                                     ox.data(), oy.data(), oz.data(), ps_.mats(),
                                     ps_.size(), tp, 0.0);
    }
  });
  return out;
}

std::vector<double> SigmaKernel::apply_Tstar_nodes(
    const std::vector<Vec3>& omega) const {
  return apply_Tstar_at(omega, nodes_);
}

double functional_F(const std::vector<double>& g, const SigmaKernel& sk,
                    double lambda) {
  if (g.size() != sk.size()) throw std::invalid_argument("functional_F: g length");
  double gmax = 0.0;
  for (double v : g) {
    if (v < 0.0) throw std::invalid_argument("functional_F: g must be >= 0");
    gmax = std::max(gmax, v);
  }
  const std::vector<Vec3> tg = sk.apply_T_nodes(g);
  double quad = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    quad += norm2(tg[i]) * g[i] * sk.node_weights()[i];
  return lambda * gmax * sk.sigma_mass() + quad;
}

namespace {

void project_feasible(std::vector<double>& g, const SigmaKernel& sk) {
  const double target = sk.sigma_mass();
  for (int round = 0; round < 50; ++round) {
    for (double& v : g) v = std::max(v, 0.0);
    double s = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) s += g[i] * sk.node_weights()[i];
    if (!(s > 0.0)) {
      g.assign(g.size(), 1.0);
      s = target;
    }
    const double scale = target / s;
    for (double& v : g) v *= scale;
    double resid = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) resid += g[i] * sk.node_weights()[i];
    if (std::abs(resid - target) <= 1e-8 * target) break;
  }
}

}  // namespace

MinimizerReport minimize_F(const SigmaKernel& sk, double lambda, int budget) {
  if (!(lambda > 0.0)) throw std::invalid_argument("minimize_F: lambda must be > 0");
  if (budget < 1) throw std::invalid_argument("minimize_F: budget must be >= 1");
  const std::size_t m = sk.size();

  std::vector<double> g(m, 1.0);
  MinimizerReport rep;
  rep.F_init = functional_F(g, sk, lambda);
  rep.b.g = g;
  rep.b.lambda = lambda;
  rep.b.F_value = rep.F_init;

  double step_base = 0.0;
  for (int t = 1; t <= budget; ++t) {
    // Subgradient of the smooth part: w_k (|Tg|^2 + 2 T*([Tg] g sigma))(x_k).
    const std::vector<Vec3> tg = sk.apply_T_nodes(g);
    std::vector<Vec3> omega(m);
    for (std::size_t i = 0; i < m; ++i)
      omega[i] = (g[i] * sk.node_weights()[i]) * tg[i];
    const std::vector<double> tstar = sk.apply_Tstar_nodes(omega);

    double gmax = 0.0;
    for (double v : g) gmax = std::max(gmax, v);
    std::vector<std::size_t> argmax;
    for (std::size_t i = 0; i < m; ++i)
      if (g[i] >= gmax - 1e-9) argmax.push_back(i);

    std::vector<double> grad(m);
    double gnorm = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      grad[i] = sk.node_weights()[i] * (norm2(tg[i]) + 2.0 * tstar[i]);
      gnorm = std::max(gnorm, std::abs(grad[i]));
    }
    const double inf_share = lambda * sk.sigma_mass() / static_cast<double>(argmax.size());
    for (std::size_t i : argmax) {
      grad[i] += inf_share;
      gnorm = std::max(gnorm, std::abs(grad[i]));
    }
    if (gnorm == 0.0) break;
    if (step_base == 0.0) step_base = 0.25 / gnorm;

    const double step = step_base / std::sqrt(static_cast<double>(t));
    for (std::size_t i = 0; i < m; ++i) g[i] -= step * grad[i];
    project_feasible(g, sk);

    const double fval = functional_F(g, sk, lambda);
    rep.iterations = t;
    if (fval < rep.b.F_value) {
      rep.b.g = g;
      rep.b.F_value = fval;
    }
  }
  double resid = 0.0, supb = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    resid += rep.b.g[i] * sk.node_weights()[i];
    supb = std::max(supb, rep.b.g[i]);
  }
  rep.b.constraint_residual = std::abs(resid - sk.sigma_mass());
  rep.sup_b = supb;
  rep.F_final = rep.b.F_value;
  rep.converged = rep.F_final <= rep.F_init + 1e-9;
  return rep;
}

double pointwise_inequality_test(const MinimizerReport& rep, const SigmaKernel& sk,
                                 double lambda) {
  const std::vector<double>& b = rep.b.g;
  const std::vector<Vec3> tnu = sk.apply_T_nodes(b);
  std::vector<Vec3> omega(sk.size());
  for (std::size_t i = 0; i < sk.size(); ++i)
    omega[i] = (b[i] * sk.node_weights()[i]) * tnu[i];
  const std::vector<double> tstar = sk.apply_Tstar_nodes(omega);
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < sk.size(); ++i) {
    if (b[i] <= 1e-6) continue;
    worst = std::max(worst, norm2(tnu[i]) + 2.0 * tstar[i] - 6.0 * lambda);
  }
  return worst;
}

ExtendedScan extended_inequality_scan(const MinimizerReport& rep,
                                      const SigmaKernel& sk, double lambda,
                                      const std::vector<Vec3>& probes, double ell_q,
                                      double alpha) {
  ExtendedScan out;
  out.reference = lambda + std::pow(ell_q, alpha);
  if (probes.empty()) return out;
  const std::vector<double>& b = rep.b.g;
  const std::vector<Vec3> tnu_nodes = sk.apply_T_nodes(b);
  std::vector<Vec3> omega(sk.size());
  for (std::size_t i = 0; i < sk.size(); ++i)
    omega[i] = (b[i] * sk.node_weights()[i]) * tnu_nodes[i];
  const std::vector<Vec3> tnu = sk.apply_T_at(b, probes);
  const std::vector<double> tstar = sk.apply_Tstar_at(omega, probes);
  out.max_value = -std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < probes.size(); ++p)
    out.max_value = std::max(out.max_value, norm2(tnu[p]) + 4.0 * tstar[p]);
  out.ratio = out.max_value / out.reference;
  return out;
}

double variation_G(const std::vector<double>& b, const SigmaKernel& sk,
                   double lambda, const Ball& ball, double t) {
  if (b.size() != sk.size()) throw std::invalid_argument("variation_G: b length");
  double nu_mass = 0.0, nu_ball = 0.0, bmax = 0.0;
  for (std::size_t i = 0; i < sk.size(); ++i) {
    const double nu_i = b[i] * sk.node_weights()[i];
    nu_mass += nu_i;
    if (ball.contains(sk.nodes()[i])) nu_ball += nu_i;
    bmax = std::max(bmax, b[i]);
  }
  if (!(nu_ball > 0.0))
    throw std::invalid_argument("variation_G: ball misses supp nu");
  const double frac = nu_ball / nu_mass;
  std::vector<double> bt(sk.size());
  for (std::size_t i = 0; i < sk.size(); ++i) {
    const double chi = ball.contains(sk.nodes()[i]) ? 1.0 : 0.0;
    bt[i] = b[i] * (1.0 - t * chi) + t * b[i] * frac;
  }
  const std::vector<Vec3> tbt = sk.apply_T_nodes(bt);
  double quad = 0.0;
  for (std::size_t i = 0; i < sk.size(); ++i)
    quad += norm2(tbt[i]) * bt[i] * sk.node_weights()[i];
  return lambda * bmax * (1.0 + t * frac) * nu_mass + quad;
}

double variation_derivative_check(const std::vector<double>& b,
                                  const SigmaKernel& sk, double lambda,
                                  const Ball& ball) {
  const double h = 1e-4;
  const double g0 = variation_G(b, sk, lambda, ball, 0.0);
  const double g1 = variation_G(b, sk, lambda, ball, h);
  return (g1 - g0) / h;
}

}  // namespace irrsio
