#pragma once

#include <cstdint>
#include <vector>

#include "irrsio/geometry.hpp"
#include "irrsio/matrix.hpp"
#include "irrsio/simd/kernel_backend.hpp"

namespace irrsio {

/// Fundamental solution of -div(E grad u) = delta_0 for a constant SPD
/// matrix E, evaluated at x != 0:
///   d = 3:  (4 pi sqrt(det E))^-1 <E^-1 x, x>^-1/2
///   d = 2: -(2 pi sqrt(det E))^-1 log <E^-1 x, x>^1/2
/// Signs and constants are pinned by the weak-form oracle below.
double fundamental_solution_const(const ConstantMatrix& E, const Vec3& x);

/// Exact analytic gradient of the above; odd, homogeneous of degree -(d-1).
Vec3 grad1_fundamental_const(const ConstantMatrix& E, const Vec3& x);

/// Per-matrix precomputation shared by the batched kernel sums:
/// grad Theta(z; E) = coefneg / den(q) * (E^-1 z), q = <E^-1 z, z>.
struct FrozenMatrix {
  simd::SymInv inv;
  double coefneg;  // -1/(4 pi sqrt det) in 3-d, -1/(2 pi sqrt det) in 2-d
  int dim;
};
FrozenMatrix freeze(const ConstantMatrix& E);
Vec3 frozen_grad(const FrozenMatrix& fm, const Vec3& z);

enum class FreezeMode { at_first_arg, at_second_arg };

/// Operator kernel K~(x, y) = grad_1 Theta(x - y, 0; A(.)) with the matrix
/// field frozen at the first argument (default) or the second.
struct EllipticKernel {
  MatrixField field;
  FreezeMode mode = FreezeMode::at_first_arg;
};

/// K~(x, y); throws when x == y.
Vec3 frozen_kernel(const EllipticKernel& kern, const Vec3& x, const Vec3& y);

/// Bump spec for the weak-form oracle: the standard mollifier profile
/// exp(1 - 1/(1 - |x/radius|^2)) on |x| < radius, zero outside.
struct BumpSpec {
  Vec3 center{0, 0, 0};  // must stay away from the kernel pole at 0
  double radius = 1.0;
};
double bump_value(const BumpSpec& b, const Vec3& x);
Vec3 bump_gradient(const BumpSpec& b, const Vec3& x);
/// tr(E . Hess phi(0)); the mollifier Hessian at its center is -(2/r^2) I.
double bump_hessian_trace(const BumpSpec& b, const ConstantMatrix& E);

struct GridSpec {
  int cells_per_axis = 128;
  double exclusion = 0.0;  // ellipsoid <E^-1 x, x> <= h^2; 0 = 3 * pitch
};

/// Weak-form residual | quad(E grad Theta . grad phi) + correction - phi(0) |.
/// Midpoint quadrature over the bump support, excluding the ellipsoid
/// q(x) <= h^2 around the pole; the analytic correction for the excluded
/// region is -(h^2 / 2d) tr(E Hess phi(0)). This is the oracle that fixes
/// the normalization of the fundamental solution.
double weak_form_check(const ConstantMatrix& E, const BumpSpec& bump,
                       const GridSpec& grid);

struct SampleSpec {
  std::size_t pairs = 400;
  double r_min = 1e-3;
  double r_max = 1e-1;
  double box = 0.5;  // base points drawn from [-box, box]^d
  std::uint64_t seed = 7;
};

struct CzReport {
  double near_slope = 0.0;       // log|K| vs log|x-y| fit on |x-y| <= r_max
  double near_intercept = 0.0;
  double smooth_quotient = 0.0;  // sup |K(x,y)-K(x,y')| |x-y|^(n+g) / |y-y'|^g
  double far_constant = 0.0;     // sup over |x-y| in [1,10] of |K| |x-y|^((n-1)/2)
  double gamma = 0.0;
};

/// Calderon-Zygmund size/smoothness diagnostics for the frozen kernel.
/// gamma defaults to min(alpha, 1/2).
CzReport cz_estimate_check(const EllipticKernel& kern, const SampleSpec& spec);

struct SymmetrizationReport {
  double slope = 0.0;      // envelope fit of log|K~(x,y)+K~(y,x)| vs log|x-y|
  double constant = 0.0;   // fitted envelope constant
};

/// Regression of the antisymmetry defect against |x - y|. Uses per-decade
/// envelope maxima, matching the upper-bound character of the target
/// estimate. Constant fields are rejected: their defect is identically 0.
SymmetrizationReport symmetrization_check(const EllipticKernel& kern,
                                          const SampleSpec& spec);

}  // namespace irrsio
