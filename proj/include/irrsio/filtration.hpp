#pragma once

#include <vector>

#include "irrsio/kernels.hpp"
#include "irrsio/lattice.hpp"
#include "irrsio/measure.hpp"

namespace irrsio {

/// Stopping thresholds. tau is the high-density cutoff on cube densities,
/// delta the low-density cutoff on A-inflated ball densities, A the ball
/// inflation, eps0 the finite-family mass slack, kappa0 the inner-region
/// margin. The exhaustive preset (tau = 0, delta = +inf) makes both rules
/// fire at the first doubling descendant so the filtration resolves all the
/// way to single atoms; it skips the delta < tau plateau check.
struct StoppingParams {
  double tau = 0.25;
  double delta = 1e-3;
  double A = 20.0;
  double eps0 = 0.01;
  double kappa0 = 0.05;
  bool exhaustive = false;

  static StoppingParams exhaustive_preset();
  void validate() const;
};

struct StoppingChildren {
  std::vector<int> hd;         // HD(Q): maximal doubling descendants, theta > tau
  std::vector<int> sigma1;     // union of LD(R) over R in HD(Q)
  std::vector<int> unstopped;  // leaf cubes reached without firing
};

/// One stopping step below cube Q: HD by a top-down first-hit scan, then LD
/// inside each HD cube with the inflated-ball density mu(B(x, A 28 r)) over
/// (2 A 28 r)^n. Chains that exhaust the lattice land in `unstopped`.
StoppingChildren stopping_children(const DMLattice& lat, const AtomicMeasure& mu,
                                   int cube_id, const StoppingParams& params);

struct FiltrationNode {
  int id = -1;
  int cube_id = -1;
  int generation = 0;
  int parent_node = -1;
  std::vector<int> hd;
  std::vector<int> sigma1;        // cube ids
  std::vector<int> sigma1_nodes;  // node ids, parallel to sigma1
  std::vector<int> unstopped;     // cube ids
  bool resolved_leaf = false;     // single-atom cell, recursion stops
  bool expanded = false;
};

struct Filtration {
  StoppingParams params;
  std::vector<FiltrationNode> nodes;
  std::vector<std::vector<int>> generations;  // node ids per generation

  const FiltrationNode& node(int id) const {
    return nodes[static_cast<std::size_t>(id)];
  }
};

/// Breadth-first construction of the stopping-time tree starting from the
/// lattice root. Single-atom cells become resolved leaves.
Filtration build_filtration(const DMLattice& lat, const AtomicMeasure& mu,
                            const StoppingParams& params, int max_generations);

/// Delta_Q f: <f>_S on each S in Sigma_1(Q) minus <f>_Q on all of Q; atoms
/// of Q outside the union keep just the -<f>_Q term. Returned over all
/// atoms (zero off Q). Resolved leaves return the zero function.
std::vector<double> martingale_difference(const std::vector<double>& f,
                                          const Filtration& filt, int node_id,
                                          const DMLattice& lat,
                                          const AtomicMeasure& mu);

struct EnergyDecomposition {
  double mean_term = 0.0;
  std::vector<double> node_energy;  // indexed by filtration node id
  double total = 0.0;               // mean + sum of energies
  double defect = 0.0;              // |f|^2 - total (trapped energy)
  bool fully_resolving = false;
};

EnergyDecomposition decompose_energy(const std::vector<double>& f,
                                     const Filtration& filt, const DMLattice& lat,
                                     const AtomicMeasure& mu);

struct DeltaEnergy {
  double energy = 0.0;  // ||Delta_Q (T mu)||^2 summed over components
  double ratio = 0.0;   // energy / mu(Q)
};

/// Evaluates T mu on the atoms of Q (componentwise) and returns the
/// martingale-difference energy of the node.
DeltaEnergy delta_energy_of_T(const Filtration& filt, int node_id,
                              const DMLattice& lat, const AtomicMeasure& mu,
                              const EllipticKernel& kern, double eps,
                              int threads = 0);

struct FiniteFamily {
  std::vector<int> cubes;  // Sigma_1'(Q), greedy largest-mass selection
  double mass = 0.0;
  bool shortfall = false;  // Sigma_1 could not reach (1 - eps0) mu(Q)
};

FiniteFamily select_finite_family(const Filtration& filt, int node_id,
                                  const DMLattice& lat, const AtomicMeasure& mu,
                                  double eps0);

/// I_kappa0(S): atoms of S at distance >= kappa0 l(S) from supp mu minus S.
std::vector<std::size_t> inner_region(const DMLattice& lat, const AtomicMeasure& mu,
                                      int cube_id, double kappa0);

struct SigmaCell {
  int cube_id;
  Ball ball;    // (1/4) B(S)
  double mass;  // mu(I_kappa0(S))
  std::size_t node_begin;
  std::size_t node_count;
};

/// sigma: per selected cell, normalized Lebesgue measure on (1/4)B(S) carried
/// by a product quadrature rule, scaled to total mass mu(I_kappa0(S)).
struct SmoothedMeasure {
  int dim = 2;
  int source_cube = -1;
  double ell_q = 0.0;  // l(Q) of the generating cube
  std::vector<SigmaCell> cells;
  std::vector<Vec3> nodes;
  std::vector<double> node_w;
  double total_mass = 0.0;

  std::size_t size() const { return nodes.size(); }
};

SmoothedMeasure smoothed_measure(const Filtration& filt, int node_id,
                                 const DMLattice& lat, const AtomicMeasure& mu,
                                 const StoppingParams& params, int quad_per_cell);

/// Gauss-Legendre nodes/weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w);

}  // namespace irrsio
