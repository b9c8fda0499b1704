#include "irrsio/filtration.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

namespace irrsio {

StoppingParams StoppingParams::exhaustive_preset() {
  StoppingParams p;
  p.tau = 0.0;
  p.delta = std::numeric_limits<double>::infinity();
  p.exhaustive = true;
  return p;
}

void StoppingParams::validate() const {
  if (!(A >= 2.0)) throw std::invalid_argument("stopping params: A must be >= 2");
  if (!(eps0 > 0.0 && eps0 < 1.0))
    throw std::invalid_argument("stopping params: eps0 must be in (0,1)");
  if (!(kappa0 >= 0.0 && kappa0 < 1.0))
    throw std::invalid_argument("stopping params: kappa0 must be in [0,1)");
  if (exhaustive) return;
  if (!(tau > 0.0)) throw std::invalid_argument("stopping params: tau must be > 0");
  if (!(delta > 0.0 && delta < tau))
    throw std::invalid_argument("stopping params: require 0 < delta < tau");
}

namespace {

double inflated_theta(const DMLattice& lat, const AtomicMeasure& mu, const DMCube& s,
                      double A) {
  const double r = A * 28.0 * s.r;
  (void)lat;
  return ball_mass(mu, Ball{s.center, r}) / std::pow(2.0 * r, mu.n());
}

}  // namespace

StoppingChildren stopping_children(const DMLattice& lat, const AtomicMeasure& mu,
                                   int cube_id, const StoppingParams& params) {
  params.validate();
  StoppingChildren out;

  // HD: first-hit scan over strict descendants.
  std::deque<int> queue(lat.cube(cube_id).children.begin(),
                        lat.cube(cube_id).children.end());
  while (!queue.empty()) {
    const int id = queue.front();
    queue.pop_front();
    const DMCube& r = lat.cube(id);
    if (r.doubling && lat.theta(r, mu) > params.tau) {
      out.hd.push_back(id);
      continue;
    }
    if (r.children.empty()) {
      out.unstopped.push_back(id);
      continue;
    }
    for (int c : r.children) queue.push_back(c);
  }

  // LD inside each HD cube.
  for (int rid : out.hd) {
    std::deque<int> q2(lat.cube(rid).children.begin(), lat.cube(rid).children.end());
    while (!q2.empty()) {
      const int id = q2.front();
      q2.pop_front();
      const DMCube& s = lat.cube(id);
      if (s.doubling && inflated_theta(lat, mu, s, params.A) <= params.delta) {
        out.sigma1.push_back(id);
        continue;
      }
      if (s.children.empty()) {
        out.unstopped.push_back(id);
        continue;
      }
      for (int c : s.children) q2.push_back(c);
    }
  }
  return out;
}

Filtration build_filtration(const DMLattice& lat, const AtomicMeasure& mu,
                            const StoppingParams& params, int max_generations) {
  params.validate();
  if (max_generations < 0)
    throw std::invalid_argument("build_filtration: max_generations must be >= 0");
  Filtration filt;
  filt.params = params;

  FiltrationNode root;
  root.id = 0;
  root.cube_id = lat.root_id;
  root.generation = 0;
  root.resolved_leaf = lat.root().members.size() == 1;
  filt.nodes.push_back(root);
  filt.generations.push_back({0});

  for (int g = 0; g < max_generations; ++g) {
    if (static_cast<std::size_t>(g) >= filt.generations.size()) break;
    std::vector<int> next;
    for (int nid : filt.generations[static_cast<std::size_t>(g)]) {
      FiltrationNode& node = filt.nodes[static_cast<std::size_t>(nid)];
      if (node.resolved_leaf) continue;
      const StoppingChildren sc = stopping_children(lat, mu, node.cube_id, params);
      node.hd = sc.hd;
      node.sigma1 = sc.sigma1;
      node.unstopped = sc.unstopped;
      node.expanded = true;
      for (int cid : sc.sigma1) {
        FiltrationNode child;
        child.id = static_cast<int>(filt.nodes.size());
        child.cube_id = cid;
        child.generation = g + 1;
        child.parent_node = nid;
        child.resolved_leaf = lat.cube(cid).members.size() == 1;
        filt.nodes[static_cast<std::size_t>(nid)].sigma1_nodes.push_back(child.id);
        next.push_back(child.id);
        filt.nodes.push_back(std::move(child));
      }
    }
    if (next.empty()) break;
    filt.generations.push_back(std::move(next));
  }
  return filt;
}

namespace {

double cube_average(const std::vector<double>& f, const DMCube& q,
                    const AtomicMeasure& mu) {
  double num = 0.0, den = 0.0;
  for (std::size_t i : q.members) {
    num += f[i] * mu.weight(i);
    den += mu.weight(i);
  }
  return den > 0.0 ? num / den : 0.0;
}

}  // namespace

std::vector<double> martingale_difference(const std::vector<double>& f,
                                          const Filtration& filt, int node_id,
                                          const DMLattice& lat,
                                          const AtomicMeasure& mu) {
  if (f.size() != mu.size())
    throw std::invalid_argument("martingale_difference: f must cover all atoms");
  std::vector<double> out(mu.size(), 0.0);
  const FiltrationNode& node = filt.node(node_id);
  if (node.resolved_leaf) return out;
  const DMCube& q = lat.cube(node.cube_id);
  const double avg_q = cube_average(f, q, mu);
  for (std::size_t i : q.members) out[i] = -avg_q;
  for (int sid : node.sigma1) {
    const DMCube& s = lat.cube(sid);
    const double avg_s = cube_average(f, s, mu);
    for (std::size_t i : s.members) out[i] = avg_s - avg_q;
  }
  return out;
}

EnergyDecomposition decompose_energy(const std::vector<double>& f,
                                     const Filtration& filt, const DMLattice& lat,
                                     const AtomicMeasure& mu) {
  if (f.size() != mu.size())
    throw std::invalid_argument("decompose_energy: f must cover all atoms");
  EnergyDecomposition dec;
  const DMCube& root = lat.root();
  const double avg_root = cube_average(f, root, mu);
  dec.mean_term = avg_root * avg_root * lat.cube_mass(root, mu);
  dec.node_energy.assign(filt.nodes.size(), 0.0);

  dec.fully_resolving = true;
  for (const FiltrationNode& node : filt.nodes) {
    if (node.resolved_leaf) continue;
    if (!node.expanded) {
      dec.fully_resolving = false;
      continue;
    }
    const std::vector<double> d = martingale_difference(f, filt, node.id, lat, mu);
    double e = 0.0;
    for (std::size_t i : lat.cube(node.cube_id).members)
      e += mu.weight(i) * d[i] * d[i];
    dec.node_energy[static_cast<std::size_t>(node.id)] = e;
    // Exact coverage of Q by its Sigma_1 family?
    std::size_t covered = 0;
    for (int sid : node.sigma1) covered += lat.cube(sid).members.size();
    if (covered != lat.cube(node.cube_id).members.size()) dec.fully_resolving = false;
  }
  dec.total = dec.mean_term;
  for (double e : dec.node_energy) dec.total += e;
  double norm2f = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) norm2f += mu.weight(i) * f[i] * f[i];
  dec.defect = norm2f - dec.total;
  return dec;
}

DeltaEnergy delta_energy_of_T(const Filtration& filt, int node_id,
                              const DMLattice& lat, const AtomicMeasure& mu,
                              const EllipticKernel& kern, double eps, int threads) {
  const FiltrationNode& node = filt.node(node_id);
  const DMCube& q = lat.cube(node.cube_id);
  std::vector<Vec3> targets;
  targets.reserve(q.members.size());
  for (std::size_t i : q.members) targets.push_back(mu.position(i));
  const FieldSample tmu = apply_T(mu, kern, targets, eps, threads);

  DeltaEnergy de;
  const double mass = lat.cube_mass(q, mu);
  std::vector<double> comp(mu.size(), 0.0);
  for (int c = 0; c < mu.dim(); ++c) {
    for (std::size_t t = 0; t < q.members.size(); ++t)
      comp[q.members[t]] = tmu.vec_values[t][c];
    const std::vector<double> d = martingale_difference(comp, filt, node_id, lat, mu);
    for (std::size_t i : q.members) de.energy += mu.weight(i) * d[i] * d[i];
  }
  de.ratio = mass > 0.0 ? de.energy / mass : 0.0;
  return de;
}

FiniteFamily select_finite_family(const Filtration& filt, int node_id,
                                  const DMLattice& lat, const AtomicMeasure& mu,
                                  double eps0) {
  const FiltrationNode& node = filt.node(node_id);
  if (node.sigma1.empty())
    throw std::invalid_argument("select_finite_family: Sigma_1(Q) is empty");
  if (!(eps0 > 0.0 && eps0 < 1.0))
    throw std::invalid_argument("select_finite_family: eps0 must be in (0,1)");
  const double target = (1.0 - eps0) * lat.cube_mass(lat.cube(node.cube_id), mu);

  std::vector<std::pair<double, int>> ranked;
  for (int sid : node.sigma1)
    ranked.emplace_back(lat.cube_mass(lat.cube(sid), mu), sid);
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });

  FiniteFamily fam;
  for (const auto& [mass, sid] : ranked) {
    if (fam.mass > target) break;
    fam.cubes.push_back(sid);
    fam.mass += mass;
  }
  fam.shortfall = !(fam.mass > target);
  return fam;
}

std::vector<std::size_t> inner_region(const DMLattice& lat, const AtomicMeasure& mu,
                                      int cube_id, double kappa0) {
  if (kappa0 < 0.0) throw std::invalid_argument("inner_region: kappa0 must be >= 0");
  const DMCube& s = lat.cube(cube_id);
  const double cut = kappa0 * lat.ell(s);
  std::vector<char> in_s(mu.size(), 0);
  for (std::size_t i : s.members) in_s[i] = 1;
  std::vector<std::size_t> inner;
  for (std::size_t i : s.members) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < mu.size(); ++j)
      if (!in_s[j]) best = std::min(best, dist2(mu.position(i), mu.position(j)));
    if (std::sqrt(best) >= cut) inner.push_back(i);
  }
  return inner;
}

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.resize(static_cast<std::size_t>(n));
  w.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    // Newton iteration from the Chebyshev-like initial guess.
    double t = std::cos(3.14159265358979323846 * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double dp = n * (t * p1 - p0) / (t * t - 1.0);
      const double step = p1 / dp;
      t -= step;
      if (std::abs(step) < 1e-15) break;
    }
    double p0 = 1.0, p1 = t;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    const double dp = n * (t * p1 - p0) / (t * t - 1.0);
    x[static_cast<std::size_t>(n - 1 - i)] = t;
    w[static_cast<std::size_t>(n - 1 - i)] = 2.0 / ((1.0 - t * t) * dp * dp);
  }
}

SmoothedMeasure smoothed_measure(const Filtration& filt, int node_id,
                                 const DMLattice& lat, const AtomicMeasure& mu,
                                 const StoppingParams& params, int quad_per_cell) {
  if (quad_per_cell < 8)
    throw std::invalid_argument("smoothed_measure: quad_per_cell must be >= 8");
  const FiniteFamily fam =
      select_finite_family(filt, node_id, lat, mu, params.eps0);

  SmoothedMeasure sm;
  sm.dim = mu.dim();
  sm.source_cube = filt.node(node_id).cube_id;
  sm.ell_q = lat.ell(lat.cube(sm.source_cube));

  for (int sid : fam.cubes) {
    const DMCube& s = lat.cube(sid);
    const auto inner = inner_region(lat, mu, sid, params.kappa0);
    double mass = 0.0;
    for (std::size_t i : inner) mass += mu.weight(i);
    if (!(mass > 0.0)) continue;  // cell evaporated into the boundary collar

    SigmaCell cell;
    cell.cube_id = sid;
    cell.ball = Ball{s.center, 0.25 * s.r};
    cell.mass = mass;
    cell.node_begin = sm.nodes.size();

    const double R = cell.ball.radius;
    std::vector<double> glx, glw;
    if (mu.dim() == 2) {
      const int mr = std::max(2, static_cast<int>(std::lround(
                                     std::sqrt(quad_per_cell / 4.0))));
      const int ma = 4 * mr;
      gauss_legendre(mr, glx, glw);
      double vol = 0.0;
      std::vector<double> vw;
      std::vector<Vec3> pts;
      for (int ir = 0; ir < mr; ++ir) {
        const double rho = 0.5 * (glx[static_cast<std::size_t>(ir)] + 1.0) * R;
        const double wr = 0.5 * R * glw[static_cast<std::size_t>(ir)] * rho;
        for (int ia = 0; ia < ma; ++ia) {
          const double th = 2.0 * 3.14159265358979323846 * (ia + 0.5) / ma;
          const double wa = 2.0 * 3.14159265358979323846 / ma;
          pts.push_back({cell.ball.center[0] + rho * std::cos(th),
                         cell.ball.center[1] + rho * std::sin(th), 0.0});
          vw.push_back(wr * wa);
          vol += wr * wa;
        }
      }
      const double scale = mass / vol;
      for (std::size_t k = 0; k < pts.size(); ++k) {
        sm.nodes.push_back(pts[k]);
        sm.node_w.push_back(vw[k] * scale);
      }
    } else {
      const int mr = std::max(2, static_cast<int>(std::lround(
                                     std::cbrt(quad_per_cell / 4.0))));
      const int mt = mr;
      const int mp = 4 * mr;
      std::vector<double> gx, gw, ux, uw;
      gauss_legendre(mr, gx, gw);
      gauss_legendre(mt, ux, uw);
      double vol = 0.0;
      std::vector<double> vw;
      std::vector<Vec3> pts;
      for (int ir = 0; ir < mr; ++ir) {
        const double rho = 0.5 * (gx[static_cast<std::size_t>(ir)] + 1.0) * R;
        const double wr =
            0.5 * R * gw[static_cast<std::size_t>(ir)] * rho * rho;
        for (int it = 0; it < mt; ++it) {
          const double cu = ux[static_cast<std::size_t>(it)];
          const double su = std::sqrt(std::max(0.0, 1.0 - cu * cu));
          const double wt = uw[static_cast<std::size_t>(it)];
          for (int ip = 0; ip < mp; ++ip) {
            const double ph = 2.0 * 3.14159265358979323846 * (ip + 0.5) / mp;
            const double wp = 2.0 * 3.14159265358979323846 / mp;
            pts.push_back({cell.ball.center[0] + rho * su * std::cos(ph),
                           cell.ball.center[1] + rho * su * std::sin(ph),
                           cell.ball.center[2] + rho * cu});
            vw.push_back(wr * wt * wp);
            vol += wr * wt * wp;
          }
        }
      }
      const double scale = mass / vol;
      for (std::size_t k = 0; k < pts.size(); ++k) {
        sm.nodes.push_back(pts[k]);
        sm.node_w.push_back(vw[k] * scale);
      }
    }
    cell.node_count = sm.nodes.size() - cell.node_begin;
    sm.total_mass += cell.mass;
    sm.cells.push_back(cell);
  }
  return sm;
}

}  // namespace irrsio
