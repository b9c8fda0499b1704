#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>

#include "irrsio/geometry.hpp"

namespace irrsio {

/// Symmetric positive definite d x d matrix (d in {2,3}) with an ellipticity
/// bound Lambda: all eigenvalues must lie in [1/Lambda, Lambda].
struct ConstantMatrix {
  int dim = 3;
  // Row-major 3x3 storage; for dim == 2 the third row/column is (0,0,1).
  std::array<double, 9> a{1, 0, 0, 0, 1, 0, 0, 0, 1};
  double lambda = 1.0;

  static ConstantMatrix identity(int dim);
  static ConstantMatrix diag(int dim, double d0, double d1, double d2 = 1.0);
  /// From arbitrary entries; symmetrized as (e_ij + e_ji)/2 before use.
  static ConstantMatrix from_entries(int dim, const std::array<double, 9>& entries,
                                     double lambda);

  double at(int i, int j) const { return a[static_cast<std::size_t>(3 * i + j)]; }
  Vec3 apply(const Vec3& x) const;
  Vec3 apply_transpose(const Vec3& x) const { return apply(x); }

  double det() const;
  ConstantMatrix inverse() const;
  /// Ascending eigenvalues (third entry is the padding 1 for dim == 2).
  std::array<double, 3> eigenvalues() const;

  /// Throws unless symmetric to 1e-12 and eigenvalues lie in [1/L, L].
  void validate() const;
};

enum class FieldType { identity, diag, sin_perturbation };

/// Matrix field x -> A(x) with Holder regularity exponent alpha. The
/// sin_perturbation family is A(x) = I + eps * S(x) where S is symmetric
/// with entries |sin(<k,x> + phase)|^alpha / d, so |S| stays small enough
/// that eps <= 0.3 keeps the ellipticity constant below 2.
class MatrixField {
 public:
  static MatrixField identity(int dim);
  static MatrixField diagonal(int dim, double d0, double d1, double d2 = 1.0);
  static MatrixField sin_perturbation(int dim, double alpha, double epsilon);
  /// Arbitrary evaluator for tests; caller supplies alpha and Lambda.
  static MatrixField custom(int dim, std::function<ConstantMatrix(const Vec3&)> eval,
                            double alpha, double holder_const, double lambda);

  int dim() const { return dim_; }
  double alpha() const { return alpha_; }
  double holder_const() const { return holder_const_; }
  double lambda() const { return lambda_; }
  bool constant() const { return type_ != FieldType::sin_perturbation && !custom_; }
  FieldType type() const { return type_; }
  double epsilon() const { return epsilon_; }

  ConstantMatrix operator()(const Vec3& x) const;

 private:
  int dim_ = 3;
  FieldType type_ = FieldType::identity;
  double alpha_ = 1.0;
  double holder_const_ = 0.0;
  double lambda_ = 1.0;
  double epsilon_ = 0.0;
  std::array<double, 3> diag_{1, 1, 1};
  std::function<ConstantMatrix(const Vec3&)> custom_;
};

/// Deterministic random SPD matrix with eigenvalues spread across
/// [1/lambda, lambda]; used by calibration tests.
ConstantMatrix random_spd(int dim, double lambda, std::uint64_t seed);

}  // namespace irrsio
