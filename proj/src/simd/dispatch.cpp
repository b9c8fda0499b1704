#include "irrsio/simd/kernel_backend.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <stdexcept>

namespace irrsio::simd {

// Entry points defined in the per-ISA translation units.
void scalar_grad_sum_const(int, const double*, const double*, const double*,
                           const double*, std::size_t, const double[3], const SymInv&,
                           double, double, double[3]);
void scalar_grad_sum_var(int, const double*, const double*, const double*,
                         const double*, const PerSourceMats&, std::size_t,
                         const double[3], double, double[3]);
double scalar_adjoint_dot_sum(int, const double*, const double*, const double*,
                              const double*, const double*, const double*,
                              const PerSourceMats&, std::size_t, const double[3],
                              double);
double scalar_adjoint_dot_sum_const(int, const double*, const double*, const double*,
                                    const double*, const double*, const double*,
                                    std::size_t, const double[3], const SymInv&,
                                    double, double);

#if defined(__x86_64__) || defined(__i386__)
void avx2_grad_sum_const(int, const double*, const double*, const double*,
                         const double*, std::size_t, const double[3], const SymInv&,
                         double, double, double[3]);
void avx2_grad_sum_var(int, const double*, const double*, const double*,
                       const double*, const PerSourceMats&, std::size_t,
                       const double[3], double, double[3]);
double avx2_adjoint_dot_sum(int, const double*, const double*, const double*,
                            const double*, const double*, const double*,
                            const PerSourceMats&, std::size_t, const double[3],
                            double);
double avx2_adjoint_dot_sum_const(int, const double*, const double*, const double*,
                                  const double*, const double*, const double*,
                                  std::size_t, const double[3], const SymInv&, double,
                                  double);
#endif

bool avx2_supported() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

namespace {

Backend pick_default() {
  if (const char* env = std::getenv("IRRSIO_SIMD")) {
    if (std::strcmp(env, "scalar") == 0) return Backend::scalar;
    if (std::strcmp(env, "avx2") == 0) {
      if (!avx2_supported())
        throw std::runtime_error("IRRSIO_SIMD=avx2 requested but CPU lacks AVX2");
      return Backend::avx2;
    }
    // anything else, including "auto", falls through
  }
  return avx2_supported() ? Backend::avx2 : Backend::scalar;
}

std::atomic<Backend>& backend_slot() {
  static std::atomic<Backend> slot{pick_default()};
  return slot;
}

}  // namespace

Backend active_backend() { return backend_slot().load(std::memory_order_relaxed); }

void set_backend(Backend b) {
  if (b == Backend::avx2 && !avx2_supported())
    throw std::runtime_error("set_backend: CPU lacks AVX2");
  backend_slot().store(b, std::memory_order_relaxed);
}

const char* backend_name(Backend b) {
  return b == Backend::avx2 ? "avx2" : "scalar";
}

void grad_sum_const(Backend b, int dim, const double* sx, const double* sy,
                    const double* sz, const double* cw, std::size_t n,
                    const double t[3], const SymInv& m, double coefneg, double eps2,
                    double out[3]) {
#if defined(__x86_64__) || defined(__i386__)
  if (b == Backend::avx2) {
    avx2_grad_sum_const(dim, sx, sy, sz, cw, n, t, m, coefneg, eps2, out);
    return;
  }
#endif
  scalar_grad_sum_const(dim, sx, sy, sz, cw, n, t, m, coefneg, eps2, out);
}

void grad_sum_var(Backend b, int dim, const double* sx, const double* sy,
                  const double* sz, const double* cw, const PerSourceMats& pm,
                  std::size_t n, const double t[3], double eps2, double out[3]) {
#if defined(__x86_64__) || defined(__i386__)
  if (b == Backend::avx2) {
    avx2_grad_sum_var(dim, sx, sy, sz, cw, pm, n, t, eps2, out);
    return;
  }
#endif
  scalar_grad_sum_var(dim, sx, sy, sz, cw, pm, n, t, eps2, out);
}

double adjoint_dot_sum(Backend b, int dim, const double* sx, const double* sy,
                       const double* sz, const double* ox, const double* oy,
                       const double* oz, const PerSourceMats& pm, std::size_t n,
                       const double t[3], double eps2) {
#if defined(__x86_64__) || defined(__i386__)
  if (b == Backend::avx2)
    return avx2_adjoint_dot_sum(dim, sx, sy, sz, ox, oy, oz, pm, n, t, eps2);
#endif
  return scalar_adjoint_dot_sum(dim, sx, sy, sz, ox, oy, oz, pm, n, t, eps2);
}

double adjoint_dot_sum_const(Backend b, int dim, const double* sx, const double* sy,
                             const double* sz, const double* ox, const double* oy,
                             const double* oz, std::size_t n, const double t[3],
                             const SymInv& m, double coefneg, double eps2) {
#if defined(__x86_64__) || defined(__i386__)
  if (b == Backend::avx2)
    return avx2_adjoint_dot_sum_const(dim, sx, sy, sz, ox, oy, oz, n, t, m, coefneg,
                                      eps2);
#endif
  return scalar_adjoint_dot_sum_const(dim, sx, sy, sz, ox, oy, oz, n, t, m, coefneg,
                                      eps2);
}

}  // namespace irrsio::simd
