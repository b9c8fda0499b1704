#pragma once

#include <cstddef>
#include <string>

#include "irrsio/simd/kernel_batch.hpp"

namespace irrsio::simd {

enum class Backend { scalar, avx2 };

/// Backend in use: AVX2 when the CPU supports it, overridable with the
/// environment variable IRRSIO_SIMD=scalar|avx2|auto or set_backend().
Backend active_backend();
void set_backend(Backend b);
const char* backend_name(Backend b);
bool avx2_supported();

void grad_sum_const(Backend b, int dim, const double* sx, const double* sy,
                    const double* sz, const double* cw, std::size_t n,
                    const double t[3], const SymInv& m, double coefneg, double eps2,
                    double out[3]);

void grad_sum_var(Backend b, int dim, const double* sx, const double* sy,
                  const double* sz, const double* cw, const PerSourceMats& pm,
                  std::size_t n, const double t[3], double eps2, double out[3]);

double adjoint_dot_sum(Backend b, int dim, const double* sx, const double* sy,
                       const double* sz, const double* ox, const double* oy,
                       const double* oz, const PerSourceMats& pm, std::size_t n,
                       const double t[3], double eps2);

double adjoint_dot_sum_const(Backend b, int dim, const double* sx, const double* sy,
                             const double* sz, const double* ox, const double* oy,
                             const double* oz, std::size_t n, const double t[3],
                             const SymInv& m, double coefneg, double eps2);

}  // namespace irrsio::simd
