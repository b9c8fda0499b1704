#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "irrsio/geometry.hpp"

namespace irrsio {

/// Finite weighted point set in R^d, d in {2,3}. Positions are stored as
/// structure-of-arrays so the kernel backends can stream them; pz is all
/// zeros for d == 2. The codimension-one density exponent is n = d - 1.
class AtomicMeasure {
 public:
  AtomicMeasure() = default;
  AtomicMeasure(int dim, std::vector<Vec3> positions, std::vector<double> weights);

  int dim() const { return dim_; }
  int n() const { return dim_ - 1; }
  std::size_t size() const { return w_.size(); }
  bool empty() const { return w_.empty(); }
  double total_mass() const { return total_mass_; }

  Vec3 position(std::size_t i) const { return {px_[i], py_[i], pz_[i]}; }
  double weight(std::size_t i) const { return w_[i]; }

  const std::vector<double>& xs() const { return px_; }
  const std::vector<double>& ys() const { return py_; }
  const std::vector<double>& zs() const { return pz_; }
  const std::vector<double>& weights() const { return w_; }

  /// Sub-measure from an atom index subset (indices kept in ascending order).
  AtomicMeasure restrict_to(const std::vector<std::size_t>& indices) const;

  /// Minimum positive pairwise atom distance; +inf for fewer than 2 atoms.
  double min_pair_distance() const;
  /// Diameter of the support (max pairwise distance); 0 for a single atom.
  double support_diameter() const;
  Vec3 centroid() const;

 private:
  int dim_ = 2;
  std::vector<double> px_, py_, pz_, w_;
  double total_mass_ = 0.0;
};

/// Contraction-ratio schedule for the corner Cantor construction. Every
/// ratio must lie in (0, 1/2) so sibling cells cannot overlap.
struct RatioSchedule {
  std::vector<double> ratios;
  int corners = 4;

  void validate() const;
};

/// Block-alternating schedule (len_a ratios `a`, then len_b ratios `b`,
/// repeating) -- the generator used for the totally irregular instances.
RatioSchedule two_plateau_schedule(double ratio_a, int len_a, double ratio_b,
                                   int len_b, int generations);

/// 4^N atoms at the generation-N corner-Cantor cell centers on the unit
/// square (z = 0 plane for dim == 3), each with weight 4^-N.
AtomicMeasure make_cantor_measure(const RatioSchedule& schedule, int generations,
                                  int dim);

/// Equally spaced, equally weighted atoms on the graph of a fixed zigzag
/// Lipschitz function over [0,1]; a line segment when slope == 0.
AtomicMeasure make_graph_measure(std::size_t num_atoms, double lipschitz_slope,
                                 int dim);

/// mu(B) / (2r)^n with the open-ball convention.
double density(const AtomicMeasure& mu, const Ball& ball);

/// Ball mass only (open ball).
double ball_mass(const AtomicMeasure& mu, const Ball& ball);

/// Densities on a geometric radius grid, ascending in radius.
std::vector<std::pair<double, double>> density_profile(const AtomicMeasure& mu,
                                                       const Vec3& x, double r_min,
                                                       double r_max, int per_decade);

/// Empirical polynomial-growth constant: max over sampled (atom, radius)
/// pairs of mu(B(x,r)) / r^n. Deterministic for a fixed seed.
double growth_constant(const AtomicMeasure& mu, int sample_count,
                       std::uint64_t seed = 1);

/// Text format, one atom per line: `x y [z] weight`, '#' starts a comment.
AtomicMeasure read_measure(std::istream& in);
AtomicMeasure read_measure_file(const std::string& path);
void write_measure(std::ostream& out, const AtomicMeasure& mu);
void write_measure_file(const std::string& path, const AtomicMeasure& mu);

}  // namespace irrsio
