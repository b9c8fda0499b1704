#include "irrsio/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace irrsio {

namespace {

void check_dim(int dim) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("matrix: dim must be 2 or 3");
}

}  // namespace

ConstantMatrix ConstantMatrix::identity(int dim) {
  check_dim(dim);
  ConstantMatrix m;
  m.dim = dim;
  m.lambda = 1.0;
  return m;
}

ConstantMatrix ConstantMatrix::diag(int dim, double d0, double d1, double d2) {
  check_dim(dim);
  ConstantMatrix m;
  m.dim = dim;
  if (dim == 2) d2 = 1.0;
  m.a = {d0, 0, 0, 0, d1, 0, 0, 0, d2};
  double hi = std::max({d0, d1, dim == 3 ? d2 : d0});
  double lo = std::min({d0, d1, dim == 3 ? d2 : d0});
  if (!(lo > 0.0)) throw std::invalid_argument("diag matrix must be positive");
  m.lambda = std::max(hi, 1.0 / lo);
  m.validate();
  return m;
}

ConstantMatrix ConstantMatrix::from_entries(int dim, const std::array<double, 9>& e,
                                            double lambda) {
  check_dim(dim);
  ConstantMatrix m;
  m.dim = dim;
  m.lambda = lambda;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      m.a[static_cast<std::size_t>(3 * i + j)] =
          0.5 * (e[static_cast<std::size_t>(3 * i + j)] +
                 e[static_cast<std::size_t>(3 * j + i)]);
  if (dim == 2) {
    m.a[2] = m.a[5] = m.a[6] = m.a[7] = 0.0;
    m.a[8] = 1.0;
  }
  m.validate();
  return m;
}

Vec3 ConstantMatrix::apply(const Vec3& x) const {
  return {at(0, 0) * x[0] + at(0, 1) * x[1] + at(0, 2) * x[2],
          at(1, 0) * x[0] + at(1, 1) * x[1] + at(1, 2) * x[2],
          at(2, 0) * x[0] + at(2, 1) * x[1] + at(2, 2) * x[2]};
}

double ConstantMatrix::det() const {
  if (dim == 2) return at(0, 0) * at(1, 1) - at(0, 1) * at(1, 0);
  return at(0, 0) * (at(1, 1) * at(2, 2) - at(1, 2) * at(2, 1)) -
         at(0, 1) * (at(1, 0) * at(2, 2) - at(1, 2) * at(2, 0)) +
         at(0, 2) * (at(1, 0) * at(2, 1) - at(1, 1) * at(2, 0));
}

ConstantMatrix ConstantMatrix::inverse() const {
  ConstantMatrix inv;
  inv.dim = dim;
  inv.lambda = lambda;
  const double d = det();
  if (!(std::abs(d) > 0.0)) throw std::runtime_error("matrix: singular");
  if (dim == 2) {
    inv.a = {at(1, 1) / d, -at(0, 1) / d, 0, -at(1, 0) / d, at(0, 0) / d, 0, 0, 0, 1};
    return inv;
  }
  const auto cof = [&](int i, int j) {
    const int i1 = (i + 1) % 3, i2 = (i + 2) % 3;
    const int j1 = (j + 1) % 3, j2 = (j + 2) % 3;
    return at(i1, j1) * at(i2, j2) - at(i1, j2) * at(i2, j1);
  };
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      inv.a[static_cast<std::size_t>(3 * i + j)] = cof(j, i) / d;
  return inv;
}

std::array<double, 3> ConstantMatrix::eigenvalues() const {
  if (dim == 2) {
    const double tr = at(0, 0) + at(1, 1);
    const double dd = at(0, 0) * at(1, 1) - at(0, 1) * at(1, 0);
    const double disc = std::sqrt(std::max(0.0, tr * tr / 4 - dd));
    return {tr / 2 - disc, tr / 2 + disc, 1.0};
  }
  // Classical Jacobi sweeps; the matrices here are tiny and well scaled.
  double m[3][3];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m[i][j] = at(i, j);
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = std::abs(m[0][1]) + std::abs(m[0][2]) + std::abs(m[1][2]);
    if (off < 1e-15) break;
    for (int p = 0; p < 3; ++p)
      for (int q = p + 1; q < 3; ++q) {
        if (std::abs(m[p][q]) < 1e-18) continue;
        const double theta = (m[q][q] - m[p][p]) / (2 * m[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1));
        const double c = 1 / std::sqrt(t * t + 1), s = t * c;
        for (int k = 0; k < 3; ++k) {
          const double mkp = m[k][p], mkq = m[k][q];
          m[k][p] = c * mkp - s * mkq;
          m[k][q] = s * mkp + c * mkq;
        }
        for (int k = 0; k < 3; ++k) {
          const double mpk = m[p][k], mqk = m[q][k];
          m[p][k] = c * mpk - s * mqk;
          m[q][k] = s * mpk + c * mqk;
        }
      }
  }
  std::array<double, 3> ev{m[0][0], m[1][1], m[2][2]};
  std::sort(ev.begin(), ev.end());
  return ev;
}

void ConstantMatrix::validate() const {
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j)
      if (std::abs(at(i, j) - at(j, i)) > 1e-12)
        throw std::invalid_argument("matrix: not symmetric");
  const auto ev = eigenvalues();
  const double lo = ev[0];
  const double hi = dim == 2 ? std::max(ev[0], ev[1]) : ev[2];
  const double slack = 1e-9;
  if (!(lo >= 1.0 / lambda - slack && hi <= lambda + slack))
    throw std::invalid_argument("matrix: eigenvalues escape [1/Lambda, Lambda]");
}

MatrixField MatrixField::identity(int dim) {
  check_dim(dim);
  MatrixField f;
  f.dim_ = dim;
  f.type_ = FieldType::identity;
  f.alpha_ = 1.0;
  f.holder_const_ = 0.0;
  f.lambda_ = 1.0;
  return f;
}

MatrixField MatrixField::diagonal(int dim, double d0, double d1, double d2) {
  MatrixField f;
  f.dim_ = dim;
  f.type_ = FieldType::diag;
  f.alpha_ = 1.0;
  f.holder_const_ = 0.0;
  f.diag_ = {d0, d1, dim == 3 ? d2 : 1.0};
  f.lambda_ = ConstantMatrix::diag(dim, d0, d1, d2).lambda;
  return f;
}

MatrixField MatrixField::sin_perturbation(int dim, double alpha, double epsilon) {
  check_dim(dim);
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::invalid_argument("sin_perturbation: alpha must be in (0,1]");
  if (!(epsilon >= 0.0 && epsilon <= 0.3))
    throw std::invalid_argument("sin_perturbation: epsilon must be in [0, 0.3]");
  MatrixField f;
  f.dim_ = dim;
  f.type_ = FieldType::sin_perturbation;
  f.alpha_ = alpha;
  f.epsilon_ = epsilon;
  // |S_ij| <= 1/d elementwise, so ||eps S||_2 <= eps and the spectrum stays
  // inside [1 - eps, 1 + eps] \subset [0.7, 1.3] for eps <= 0.3.
  f.lambda_ = 1.0 / (1.0 - epsilon);
  // |t|^alpha has Holder constant 1; the wave vectors below have |k| <= 3.
  f.holder_const_ = epsilon * std::pow(3.0, alpha);
  return f;
}

MatrixField MatrixField::custom(int dim, std::function<ConstantMatrix(const Vec3&)> eval,
                                double alpha, double holder_const, double lambda) {
  check_dim(dim);
  MatrixField f;
  f.dim_ = dim;
  f.type_ = FieldType::sin_perturbation;  // treated as variable
  f.alpha_ = alpha;
  f.holder_const_ = holder_const;
  f.lambda_ = lambda;
  f.custom_ = std::move(eval);
  return f;
}

ConstantMatrix MatrixField::operator()(const Vec3& x) const {
  if (custom_) return custom_(x);
  switch (type_) {
    case FieldType::identity:
      return ConstantMatrix::identity(dim_);
    case FieldType::diag:
      return ConstantMatrix::diag(dim_, diag_[0], diag_[1], diag_[2]);
    case FieldType::sin_perturbation:
      break;
  }
  // Fixed wave vectors and phases; entries are |sin|^alpha, which is C^alpha
  // across its zero set and smooth elsewhere.
  static const double kvec[6][3] = {{1.0, 0.7, 0.3},  {0.6, -1.2, 0.9},
                                    {-0.8, 0.5, 1.1}, {1.3, 0.4, -0.6},
                                    {0.2, 1.0, 0.8},  {-0.5, 0.9, 1.2}};
  static const double phase[6] = {0.3, 1.1, 2.0, 0.7, 1.6, 2.5};
  static const double sgn[6] = {1, -1, 1, 1, -1, 1};
  const double inv_d = 1.0 / dim_;
  auto entry = [&](int idx) {
    const double arg =
        kvec[idx][0] * x[0] + kvec[idx][1] * x[1] + kvec[idx][2] * x[2] + phase[idx];
    return sgn[idx] * inv_d * std::pow(std::abs(std::sin(arg)), alpha_);
  };
  ConstantMatrix m;
  m.dim = dim_;
  m.lambda = lambda_;
  const double e = epsilon_;
  double s00 = entry(0), s11 = entry(1), s01 = entry(3);
  if (dim_ == 2) {
    m.a = {1 + e * s00, e * s01, 0, e * s01, 1 + e * s11, 0, 0, 0, 1};
    return m;
  }
  double s22 = entry(2), s02 = entry(4), s12 = entry(5);
  m.a = {1 + e * s00, e * s01,     e * s02, e * s01, 1 + e * s11,
         e * s12,     e * s02,     e * s12, 1 + e * s22};
  return m;
}

ConstantMatrix random_spd(int dim, double lambda, std::uint64_t seed) {
  check_dim(dim);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(0.0, 6.283185307179586);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  // Eigenvalues spread in [1/lambda, lambda], rotated by a random basis.
  const double lo = 1.0 / lambda;
  double ev[3] = {lo, lambda, std::exp(std::log(lo) + unit(rng) * std::log(lambda / lo))};
  double q[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  const int rots = dim == 2 ? 1 : 3;
  const int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
  for (int r = 0; r < rots; ++r) {
    const double th = angle(rng);
    const double c = std::cos(th), s = std::sin(th);
    const int p = pairs[r][0], qq = pairs[r][1];
    for (int k = 0; k < 3; ++k) {
      const double a = q[k][p], b = q[k][qq];
      q[k][p] = c * a - s * b;
      q[k][qq] = s * a + c * b;
    }
  }
  if (dim == 2) ev[2] = 1.0;
  std::array<double, 9> e{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double v = 0;
      for (int k = 0; k < 3; ++k) v += q[i][k] * ev[k] * q[j][k];
      e[static_cast<std::size_t>(3 * i + j)] = v;
    }
  if (dim == 2) {
    e[2] = e[5] = e[6] = e[7] = 0;
    e[8] = 1;
  }
  return ConstantMatrix::from_entries(dim, e, lambda * 1.0000001);
}

}  // namespace irrsio
