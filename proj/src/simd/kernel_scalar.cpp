#include "irrsio/simd/kernel_batch.hpp"
#include "irrsio/simd/pack.hpp"

// Reference backend. Compiled without any SIMD flags; the lane layout and
// operation order match the vector backends exactly.

namespace irrsio::simd {

void scalar_grad_sum_const(int dim, const double* sx, const double* sy,
                           const double* sz, const double* cw, std::size_t n,
                           const double t[3], const SymInv& m, double coefneg,
                           double eps2, double out[3]) {
  if (dim == 3)
    grad_sum_const_t<ScalarPack, 3>(sx, sy, sz, cw, n, t, m, coefneg, eps2, out);
  else
    grad_sum_const_t<ScalarPack, 2>(sx, sy, sz, cw, n, t, m, coefneg, eps2, out);
}

void scalar_grad_sum_var(int dim, const double* sx, const double* sy,
                         const double* sz, const double* cw, const PerSourceMats& pm,
                         std::size_t n, const double t[3], double eps2,
                         double out[3]) {
  if (dim == 3)
    grad_sum_var_t<ScalarPack, 3>(sx, sy, sz, cw, pm, n, t, eps2, out);
  else
    grad_sum_var_t<ScalarPack, 2>(sx, sy, sz, cw, pm, n, t, eps2, out);
}

double scalar_adjoint_dot_sum_const(int dim, const double* sx, const double* sy,
                                    const double* sz, const double* ox,
                                    const double* oy, const double* oz, std::size_t n,
                                    const double t[3], const SymInv& m, double coefneg,
                                    double eps2) {
  if (dim == 3)
    return adjoint_dot_sum_const_t<ScalarPack, 3>(sx, sy, sz, ox, oy, oz, n, t, m,
                                                  coefneg, eps2);
  return adjoint_dot_sum_const_t<ScalarPack, 2>(sx, sy, sz, ox, oy, oz, n, t, m,
                                                coefneg, eps2);
}

double scalar_adjoint_dot_sum(int dim, const double* sx, const double* sy,
                              const double* sz, const double* ox, const double* oy,
                              const double* oz, const PerSourceMats& pm,
                              std::size_t n, const double t[3], double eps2) {
  if (dim == 3)
    return adjoint_dot_sum_t<ScalarPack, 3>(sx, sy, sz, ox, oy, oz, pm, n, t, eps2);
  return adjoint_dot_sum_t<ScalarPack, 2>(sx, sy, sz, ox, oy, oz, pm, n, t, eps2);
}

}  // namespace irrsio::simd
