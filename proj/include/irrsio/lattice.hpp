#pragma once

#include <vector>

#include "irrsio/measure.hpp"

namespace irrsio {

/// One cube of the hierarchical decomposition. B(Q) = B(center, r) with
/// r = A0^-k; members always include the center atom, every member lies
/// within 28 r of the center, and every atom inside B(Q) is a member.
struct DMCube {
  int id = -1;
  int level = 0;  // absolute level k (root sits at k0, possibly negative)
  std::size_t center_atom = 0;
  Vec3 center{0, 0, 0};
  double r = 0.0;
  std::vector<std::size_t> members;  // ascending atom indices
  int parent = -1;
  std::vector<int> children;
  bool doubling = false;
};

struct LatticeParams {
  double C0 = 2.0;
  double A0 = 8.0;
  int depth = 6;
};

/// Hierarchy of cubes built by a greedy nested-net variant: level-k centers
/// form a maximal 10 A0^-k separated atom subset (previous centers first,
/// then ascending atom order), atoms go to their nearest center, and whole
/// fine cubes hang under the coarse cube that owns their center atom. The
/// construction guarantees the partition, nesting, 5B-disjointness,
/// B(Q)-containment, Q inside 28 B(Q) and cross-level half-ball properties
/// for A0 >= 4; the small-boundary and chain-decay estimates are reported,
/// not guaranteed.
class DMLattice {
 public:
  LatticeParams params;
  int k0 = 0;
  bool truncated = false;  // depth hit the resolution floor (all singletons)
  std::vector<DMCube> cubes;                 // id-indexed
  std::vector<std::vector<int>> level_ids;   // per level (0 = root level k0)
  std::vector<std::vector<int>> atom_owner;  // [level][atom] -> cube id
  int root_id = 0;

  int levels() const { return static_cast<int>(level_ids.size()); }
  const DMCube& cube(int id) const { return cubes[static_cast<std::size_t>(id)]; }
  DMCube& cube(int id) { return cubes[static_cast<std::size_t>(id)]; }
  const DMCube& root() const { return cubes[static_cast<std::size_t>(root_id)]; }

  /// Side length l(Q) = 56 C0 A0^-k.
  double ell(const DMCube& q) const { return 56.0 * params.C0 * q.r; }
  /// Cube density Theta(Q) = mu(Q) / l(Q)^n.
  double theta(const DMCube& q, const AtomicMeasure& mu) const;
  double cube_mass(const DMCube& q, const AtomicMeasure& mu) const;
  /// True when q is a (weak) descendant of ancestor_id.
  bool is_descendant(int id, int ancestor_id) const;
};

DMLattice build_lattice(const AtomicMeasure& mu, double C0, double A0, int depth);
inline DMLattice build_lattice(const AtomicMeasure& mu, const LatticeParams& p) {
  return build_lattice(mu, p.C0, p.A0, p.depth);
}

/// Sets the doubling flag: mu(B(x,100r)) <= C0 mu(B(x,r)).
void classify_doubling(DMLattice& lat, const AtomicMeasure& mu);

struct BoundaryRow {
  int l;
  double mass;       // mu(N_l(Q))
  double reference;  // theta^-l * mu(90 B(Q))
};

/// Report-only: masses of the boundary collars N_l(Q) against a geometric
/// reference curve with configurable base theta > 1.
std::vector<BoundaryRow> small_boundary_report(const DMLattice& lat,
                                               const AtomicMeasure& mu, int cube_id,
                                               int l_max, double theta_base = 2.0);

struct DoublingCover {
  std::vector<int> cover;            // maximal doubling descendants (or Q itself)
  std::vector<int> uncovered_cubes;  // finest-level cubes on all-non-doubling chains
  std::vector<std::size_t> uncovered_atoms;
};

DoublingCover doubling_cover(const DMLattice& lat, int cube_id);

struct ChainDecay {
  double mass_ratio;        // mu(100B(R)) / mu(100B(Q))
  double mass_reference;    // A0^(-10 d (J(R)-J(Q)-1))
  double theta_ratio;       // Theta(100B(R)) / Theta(100B(Q))
  double theta_reference;   // (C0 A0)^d A0^(-9 d (J(R)-J(Q)-1))
};

/// Report-only decay diagnostics along a chain whose strict intermediate
/// cubes are all non-doubling; rejects chains with a doubling intermediate.
ChainDecay chain_decay_check(const DMLattice& lat, const AtomicMeasure& mu,
                             int cube_q, int cube_r);

struct LatticeInvariantReport {
  bool partition = false;
  bool nesting = false;
  bool five_b_disjoint = false;
  bool containment = false;
  bool half_ball_cross_level = false;
  bool ok() const {
    return partition && nesting && five_b_disjoint && containment &&
           half_ball_cross_level;
  }
};

/// Exhaustive verification of the guaranteed lattice properties.
LatticeInvariantReport run_lattice_invariants(const DMLattice& lat,
                                              const AtomicMeasure& mu);

/// Dump format, one cube per line: `id level parent center... r doubling n_members`.
void dump_lattice(std::ostream& out, const DMLattice& lat, const AtomicMeasure& mu);

}  // namespace irrsio
