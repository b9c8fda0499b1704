#include "irrsio/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace irrsio {

double DMLattice::cube_mass(const DMCube& q, const AtomicMeasure& mu) const {
  double m = 0.0;
  for (std::size_t i : q.members) m += mu.weight(i);
  return m;
}

double DMLattice::theta(const DMCube& q, const AtomicMeasure& mu) const {
  return cube_mass(q, mu) / std::pow(ell(q), mu.n());
}

bool DMLattice::is_descendant(int id, int ancestor_id) const {
  while (id != -1) {
    if (id == ancestor_id) return true;
    id = cube(id).parent;
  }
  return false;
}

DMLattice build_lattice(const AtomicMeasure& mu, double C0, double A0, int depth) {
  if (mu.empty()) throw std::invalid_argument("build_lattice: empty measure");
  if (!(C0 > 1.0)) throw std::invalid_argument("build_lattice: C0 must be > 1");
  if (!(A0 >= 4.0))
    throw std::invalid_argument(
        "build_lattice: A0 must be >= 4 (nesting containment bound fails below)");
  if (depth < 1) throw std::invalid_argument("build_lattice: depth must be >= 1");

  const std::size_t n = mu.size();
  DMLattice lat;
  lat.params = {C0, A0, depth};

  // Root center: atom nearest the centroid, ties to the lowest index.
  const Vec3 cg = mu.centroid();
  std::size_t root_atom = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double d2 = dist2(mu.position(i), cg);
    if (d2 < best) {
      best = d2;
      root_atom = i;
    }
  }
  double r_needed = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    r_needed = std::max(r_needed, dist(mu.position(i), mu.position(root_atom)));

  int k0 = 0;
  if (r_needed > 0.0) {
    k0 = static_cast<int>(std::floor(-std::log(r_needed) / std::log(A0)));
    while (std::pow(A0, -k0) <= r_needed) --k0;
  }
  lat.k0 = k0;

  // Nested center sets: previous centers re-enter first and always survive
  // (they are separated by 10 A0^-(k-1) >= 40 A0^-k).
  std::vector<std::size_t> centers{root_atom};
  std::vector<std::vector<std::size_t>> level_centers{centers};
  std::vector<std::vector<int>> prelim;  // [rel level][atom] -> center slot
  prelim.push_back(std::vector<int>(n, 0));

  for (int rel = 1; rel <= depth; ++rel) {
    const int k = k0 + rel;
    const double sep = 10.0 * std::pow(A0, -k);
    const double sep2 = sep * sep;
    std::vector<std::size_t> cs = level_centers.back();
    for (std::size_t i = 0; i < n; ++i) {
      bool ok = true;
      const Vec3 p = mu.position(i);
      for (std::size_t c : cs)
        if (dist2(p, mu.position(c)) <= sep2) {
          ok = false;
          break;
        }
      if (ok) cs.push_back(i);
    }
    // Nearest-center preliminary assignment, ties to the lower atom index.
    std::vector<int> owner(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
      double bd = std::numeric_limits<double>::infinity();
      int slot = -1;
      const Vec3 p = mu.position(i);
      for (std::size_t s = 0; s < cs.size(); ++s) {
        const double d2 = dist2(p, mu.position(cs[s]));
        if (d2 < bd ||
            (d2 == bd && slot >= 0 && cs[s] < cs[static_cast<std::size_t>(slot)])) {
          bd = d2;
          slot = static_cast<int>(s);
        }
      }
      owner[i] = slot;
    }
    const bool all_singleton = cs.size() == n;
    level_centers.push_back(std::move(cs));
    prelim.push_back(std::move(owner));
    if (all_singleton) {
      // Every atom is its own center: deeper levels would repeat this
      // singleton partition, so refinement stops here.
      if (rel < depth) lat.truncated = true;
      break;
    }
  }

  const int built = static_cast<int>(level_centers.size()) - 1;

  // Finest level: preliminary assignment is final. Coarser levels: each fine
  // cube hangs, whole, under the cube owning its center atom.
  std::vector<std::vector<int>> cube_id_of;  // [rel][slot] -> cube id
  lat.level_ids.resize(static_cast<std::size_t>(built) + 1);
  lat.atom_owner.assign(static_cast<std::size_t>(built) + 1, std::vector<int>(n, -1));

  for (int rel = 0; rel <= built; ++rel) {
    const auto& cs = level_centers[static_cast<std::size_t>(rel)];
    std::vector<int> ids;
    for (std::size_t s = 0; s < cs.size(); ++s) {
      DMCube q;
      q.id = static_cast<int>(lat.cubes.size());
      q.level = k0 + rel;
      q.center_atom = cs[s];
      q.center = mu.position(cs[s]);
      q.r = std::pow(A0, -(k0 + rel));
      ids.push_back(q.id);
      lat.cubes.push_back(std::move(q));
    }
    lat.level_ids[static_cast<std::size_t>(rel)] = ids;
    cube_id_of.push_back(ids);
  }
  lat.root_id = cube_id_of[0][0];

  {
    const int rel = built;
    const auto& owner = prelim[static_cast<std::size_t>(rel)];
    for (std::size_t i = 0; i < n; ++i) {
      const int cid = cube_id_of[static_cast<std::size_t>(rel)]
                                [static_cast<std::size_t>(owner[i])];
      lat.cube(cid).members.push_back(i);
      lat.atom_owner[static_cast<std::size_t>(rel)][i] = cid;
    }
  }
  for (int rel = built - 1; rel >= 0; --rel) {
    const auto& owner = prelim[static_cast<std::size_t>(rel)];
    for (int fid : cube_id_of[static_cast<std::size_t>(rel) + 1]) {
      DMCube& fine = lat.cube(fid);
      const int slot = owner[fine.center_atom];
      const int cid =
          cube_id_of[static_cast<std::size_t>(rel)][static_cast<std::size_t>(slot)];
      fine.parent = cid;
      lat.cube(cid).children.push_back(fid);
      DMCube& coarse = lat.cube(cid);
      coarse.members.insert(coarse.members.end(), fine.members.begin(),
                            fine.members.end());
    }
    for (int cid : cube_id_of[static_cast<std::size_t>(rel)]) {
      auto& mem = lat.cube(cid).members;
      std::sort(mem.begin(), mem.end());
      for (std::size_t i : mem) lat.atom_owner[static_cast<std::size_t>(rel)][i] = cid;
    }
  }
  return lat;
}

void classify_doubling(DMLattice& lat, const AtomicMeasure& mu) {
  for (DMCube& q : lat.cubes) {
    const double inner = ball_mass(mu, Ball{q.center, q.r});
    const double outer = ball_mass(mu, Ball{q.center, 100.0 * q.r});
    q.doubling = outer <= lat.params.C0 * inner;
  }
}

namespace {

double dist_to_set(const AtomicMeasure& mu, const Vec3& x,
                   const std::vector<std::size_t>& set) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i : set) best = std::min(best, dist2(x, mu.position(i)));
  return std::sqrt(best);
}

}  // namespace

std::vector<BoundaryRow> small_boundary_report(const DMLattice& lat,
                                               const AtomicMeasure& mu, int cube_id,
                                               int l_max, double theta_base) {
  if (!(theta_base > 1.0))
    throw std::invalid_argument("small_boundary_report: theta base must be > 1");
  const DMCube& q = lat.cube(cube_id);
  std::vector<char> in_q(mu.size(), 0);
  for (std::size_t i : q.members) in_q[i] = 1;
  std::vector<std::size_t> outside;
  for (std::size_t i = 0; i < mu.size(); ++i)
    if (!in_q[i]) outside.push_back(i);

  const double m90 = ball_mass(mu, Ball{q.center, 90.0 * q.r});
  std::vector<BoundaryRow> rows;
  for (int l = 0; l <= l_max; ++l) {
    const double cut = std::pow(lat.params.A0, -(q.level + l));
    double mass = 0.0;
    for (std::size_t i : outside)  // external collar
      if (dist_to_set(mu, mu.position(i), q.members) < cut) mass += mu.weight(i);
    for (std::size_t i : q.members)  // internal collar
      if (!outside.empty() &&
          dist_to_set(mu, mu.position(i), outside) < cut)
        mass += mu.weight(i);
    rows.push_back({l, mass, std::pow(theta_base, -l) * m90});
  }
  return rows;
}

DoublingCover doubling_cover(const DMLattice& lat, int cube_id) {
  DoublingCover out;
  std::vector<int> stack{cube_id};
  while (!stack.empty()) {
    const int id = stack.back();
    stack.pop_back();
    const DMCube& q = lat.cube(id);
    if (q.doubling) {
      out.cover.push_back(id);
      continue;
    }
    if (q.children.empty()) {
      out.uncovered_cubes.push_back(id);
      out.uncovered_atoms.insert(out.uncovered_atoms.end(), q.members.begin(),
                                 q.members.end());
      continue;
    }
    for (auto it = q.children.rbegin(); it != q.children.rend(); ++it)
      stack.push_back(*it);
  }
  std::sort(out.uncovered_atoms.begin(), out.uncovered_atoms.end());
  return out;
}

ChainDecay chain_decay_check(const DMLattice& lat, const AtomicMeasure& mu,
                             int cube_q, int cube_r) {
  if (!lat.is_descendant(cube_r, cube_q))
    throw std::invalid_argument("chain_decay_check: R must be contained in Q");
  for (int id = lat.cube(cube_r).parent; id != -1 && id != cube_q;
       id = lat.cube(id).parent)
    if (lat.cube(id).doubling)
      throw std::invalid_argument("chain_decay_check: intermediate cube " +
                                  std::to_string(id) + " is doubling");

  const DMCube& Q = lat.cube(cube_q);
  const DMCube& R = lat.cube(cube_r);
  const int d = mu.dim();
  const int dj = R.level - Q.level;
  const double mq = ball_mass(mu, Ball{Q.center, 100.0 * Q.r});
  const double mr = ball_mass(mu, Ball{R.center, 100.0 * R.r});
  const double tq = mq / std::pow(200.0 * Q.r, mu.n());
  const double tr = mr / std::pow(200.0 * R.r, mu.n());
  ChainDecay cd;
  cd.mass_ratio = mr / mq;
  cd.mass_reference = std::pow(lat.params.A0, -10.0 * d * (dj - 1));
  cd.theta_ratio = tr / tq;
  cd.theta_reference = std::pow(lat.params.C0 * lat.params.A0, d) *
                       std::pow(lat.params.A0, -9.0 * d * (dj - 1));
  return cd;
}

LatticeInvariantReport run_lattice_invariants(const DMLattice& lat,
                                              const AtomicMeasure& mu) {
  LatticeInvariantReport rep;
  const std::size_t n = mu.size();

  rep.partition = true;
  for (int rel = 0; rel < lat.levels(); ++rel) {
    std::vector<int> seen(n, 0);
    for (int id : lat.level_ids[static_cast<std::size_t>(rel)])
      for (std::size_t i : lat.cube(id).members) ++seen[i];
    for (std::size_t i = 0; i < n; ++i)
      if (seen[i] != 1) rep.partition = false;
  }

  rep.nesting = true;
  for (const DMCube& q : lat.cubes) {
    if (q.id == lat.root_id) continue;
    if (q.parent < 0) {
      rep.nesting = false;
      continue;
    }
    const auto& pm = lat.cube(q.parent).members;
    for (std::size_t i : q.members)
      if (!std::binary_search(pm.begin(), pm.end(), i)) rep.nesting = false;
    if (lat.cube(q.parent).level != q.level - 1) rep.nesting = false;
  }

  rep.five_b_disjoint = true;
  for (int rel = 0; rel < lat.levels(); ++rel) {
    const auto& ids = lat.level_ids[static_cast<std::size_t>(rel)];
    for (std::size_t a = 0; a < ids.size(); ++a)
      for (std::size_t b = a + 1; b < ids.size(); ++b) {
        const DMCube& qa = lat.cube(ids[a]);
        const DMCube& qb = lat.cube(ids[b]);
        if (!(dist(qa.center, qb.center) > 5.0 * (qa.r + qb.r)))
          rep.five_b_disjoint = false;
      }
  }

  rep.containment = true;
  for (const DMCube& q : lat.cubes) {
    for (std::size_t i : q.members)
      if (!(dist(mu.position(i), q.center) <= 28.0 * q.r)) rep.containment = false;
    const double r2 = q.r * q.r;
    for (std::size_t i = 0; i < n; ++i)
      if (dist2(mu.position(i), q.center) < r2 &&
          !std::binary_search(q.members.begin(), q.members.end(), i))
        rep.containment = false;
  }

  rep.half_ball_cross_level = true;
  for (std::size_t a = 0; a < lat.cubes.size(); ++a)
    for (std::size_t b = a + 1; b < lat.cubes.size(); ++b) {
      const DMCube& qa = lat.cubes[a];
      const DMCube& qb = lat.cubes[b];
      if (dist(qa.center, qb.center) >= 0.5 * (qa.r + qb.r)) continue;
      if (!lat.is_descendant(qa.id, qb.id) && !lat.is_descendant(qb.id, qa.id))
        rep.half_ball_cross_level = false;
    }
  return rep;
}

void dump_lattice(std::ostream& out, const DMLattice& lat, const AtomicMeasure& mu) {
  char buf[256];
  for (const DMCube& q : lat.cubes) {
    if (mu.dim() == 2)
      std::snprintf(buf, sizeof buf, "%d %d %d %.17g %.17g %.17g %d %zu\n", q.id,
                    q.level, q.parent, q.center[0], q.center[1], q.r,
                    q.doubling ? 1 : 0, q.members.size());
    else
      std::snprintf(buf, sizeof buf, "%d %d %d %.17g %.17g %.17g %.17g %d %zu\n", q.id,
                    q.level, q.parent, q.center[0], q.center[1], q.center[2], q.r,
                    q.doubling ? 1 : 0, q.members.size());
    out << buf;
  }
}

}  // namespace irrsio
