#pragma once

#include <string>
#include <vector>

#include "irrsio/kernels.hpp"
#include "irrsio/measure.hpp"

namespace irrsio {

/// Vector-valued atomic measure (for omega = [T nu] nu and nu e).
struct VectorMeasure {
  int dim = 2;
  std::vector<Vec3> points;
  std::vector<Vec3> weights;

  std::size_t size() const { return points.size(); }
};

/// Sampled field values with their sample points and a provenance tag.
struct FieldSample {
  std::vector<Vec3> points;
  std::vector<Vec3> vec_values;       // populated by T-type operators
  std::vector<double> scalar_values;  // populated by T*-type operators
  std::string provenance;
};

/// Per-source data prepared once and reused across targets: positions in
/// structure-of-arrays form plus the frozen matrix at every source.
class PreparedSources {
 public:
  PreparedSources(const std::vector<Vec3>& points, const MatrixField& field);
  PreparedSources(const AtomicMeasure& mu, const MatrixField& field);

  int dim() const { return dim_; }
  std::size_t size() const { return x_.size(); }
  const double* xs() const { return x_.data(); }
  const double* ys() const { return y_.data(); }
  const double* zs() const { return z_.data(); }
  simd::PerSourceMats mats() const;
  bool constant_field() const { return constant_; }
  const FrozenMatrix& constant_frozen() const { return const_fm_; }

 private:
  void build(const std::vector<Vec3>& points, const MatrixField& field);
  int dim_ = 2;
  bool constant_ = true;
  FrozenMatrix const_fm_{};
  std::vector<double> x_, y_, z_;
  std::vector<double> i00_, i01_, i02_, i11_, i12_, i22_, cn_;
};

/// T_eps mu at the given targets: sum over |x - y_j| > eps of K~(x, y_j) w_j,
/// in ascending atom order with compensated summation. eps == 0 requires
/// every target to stay off the atoms.
FieldSample apply_T(const AtomicMeasure& mu, const EllipticKernel& kern,
                    const std::vector<Vec3>& targets, double eps, int threads = 0);

/// T(f mu): identical to apply_T on the reweighted measure (w_j f_j).
FieldSample apply_T_density(const AtomicMeasure& mu, const EllipticKernel& kern,
                            const std::vector<double>& f,
                            const std::vector<Vec3>& targets, double eps,
                            int threads = 0);

/// T* omega (x) = sum_j K~(y_j, x) . omega_j; the matrix freezes at y_j.
FieldSample apply_T_adjoint(const VectorMeasure& omega, const EllipticKernel& kern,
                            const std::vector<Vec3>& targets, double eps,
                            int threads = 0);

/// Low-level sums on prepared sources with caller-supplied coefficients;
/// these skip the eps == 0 coincidence scan (exact coincidences drop out of
/// the strict distance mask, the principal-value reading at nodes).
Vec3 eval_T_sum(const PreparedSources& ps, const EllipticKernel& kern,
                const std::vector<double>& coef, const Vec3& target, double eps);
double eval_Tstar_sum(const PreparedSources& ps, const std::vector<double>& ox,
                      const std::vector<double>& oy, const std::vector<double>& oz,
                      const Vec3& target, double eps);

struct NormEstimate {
  double value = 0.0;
  int iterations = 0;
  double last_gap = 0.0;
};

/// Largest singular value of the (d N) x N matrix [K~(x_i, x_j) sqrt(w_i w_j)],
/// i != j, by power iteration on the normal matrix. Deterministic all-ones
/// start, relative tolerance 1e-6, iteration cap 10^4.
NormEstimate operator_norm_estimate(const AtomicMeasure& mu,
                                    const EllipticKernel& kern, double eps,
                                    int threads = 0);

/// Scale-normalized second-order finite-difference residual of
/// -div(A^*(x) grad T* omega)(probe); requires dist(probe, supp omega) > 10 h.
double harmonicity_check(const VectorMeasure& omega, const EllipticKernel& kern,
                         const Vec3& probe, double h);

}  // namespace irrsio
