// AVX2 backend; this translation unit is the only one built with -mavx2.

#include "irrsio/simd/kernel_batch.hpp"
#include "irrsio/simd/pack.hpp"

namespace irrsio::simd {

#ifdef __AVX2__

void avx2_grad_sum_const(int dim, const double* sx, const double* sy,
                         const double* sz, const double* cw, std::size_t n,
                         const double t[3], const SymInv& m, double coefneg,
                         double eps2, double out[3]) {
  if (dim == 3)
    grad_sum_const_t<Avx2Pack, 3>(sx, sy, sz, cw, n, t, m, coefneg, eps2, out);
  else
    grad_sum_const_t<Avx2Pack, 2>(sx, sy, sz, cw, n, t, m, coefneg, eps2, out);
}

void avx2_grad_sum_var(int dim, const double* sx, const double* sy, const double* sz,
                       const double* cw, const PerSourceMats& pm, std::size_t n,
                       const double t[3], double eps2, double out[3]) {
  if (dim == 3)
    grad_sum_var_t<Avx2Pack, 3>(sx, sy, sz, cw, pm, n, t, eps2, out);
  else
    grad_sum_var_t<Avx2Pack, 2>(sx, sy, sz, cw, pm, n, t, eps2, out);
}

double avx2_adjoint_dot_sum_const(int dim, const double* sx, const double* sy,
                                  const double* sz, const double* ox, const double* oy,
                                  const double* oz, std::size_t n, const double t[3],
                                  const SymInv& m, double coefneg, double eps2) {
  if (dim == 3)
    return adjoint_dot_sum_const_t<Avx2Pack, 3>(sx, sy, sz, ox, oy, oz, n, t, m,
                                                coefneg, eps2);
  return adjoint_dot_sum_const_t<Avx2Pack, 2>(sx, sy, sz, ox, oy, oz, n, t, m,
                                              coefneg, eps2);
}

double avx2_adjoint_dot_sum(int dim, const double* sx, const double* sy,
                            const double* sz, const double* ox, const double* oy,
                            const double* oz, const PerSourceMats& pm, std::size_t n,
                            const double t[3], double eps2) {
  if (dim == 3)
    return adjoint_dot_sum_t<Avx2Pack, 3>(sx, sy, sz, ox, oy, oz, pm, n, t, eps2);
  return adjoint_dot_sum_t<Avx2Pack, 2>(sx, sy, sz, ox, oy, oz, pm, n, t, eps2);
}

#endif  // __AVX2__

}  // namespace irrsio::simd
