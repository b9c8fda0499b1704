#pragma once

#include <cstddef>

// Batched accumulation of gradient-of-fundamental-solution sums. The three
// variants share one arithmetic pipeline:
//
//   z   = +/-(target - source)
//   w   = Einv z,  q = <w, z>,  r2 = <z, z>
//   den = q * sqrt(q)   (3-d)     or     q   (2-d)
//   val = coefneg * s / den * w          (coefneg folds the kernel sign)
//
// summed with Knuth two-sum compensation per lane and a fixed lane-reduction
// order. Sources with r2 <= eps2 contribute an exact zero through the mask;
// partial tail blocks are padded with the target position itself, which
// lands in the masked-out region, so padding can never leak NaN or garbage
// into the accumulators.

namespace irrsio::simd {

struct SymInv {
  double i00, i01, i02, i11, i12, i22;
};

struct PerSourceMats {
  const double* i00;
  const double* i01;
  const double* i02;
  const double* i11;
  const double* i12;
  const double* i22;
  const double* coefneg;
};

namespace detail {

template <class P>
struct Acc {
  P s = P::set1(0.0);
  P c = P::set1(0.0);

  void add(P t) {
    const P x = s + t;
    const P bv = x - s;
    const P av = x - bv;
    const P br = t - bv;
    const P ar = s - av;
    c = c + (ar + br);
    s = x;
  }
  double reduce() const {
    double sb[4], cb[4];
    s.store(sb);
    c.store(cb);
    return ((sb[0] + sb[1]) + (sb[2] + sb[3])) + ((cb[0] + cb[1]) + (cb[2] + cb[3]));
  }
};

template <class P, int DIM>
inline P kernel_den(P q) {
  if constexpr (DIM == 3)
    return q * P::sqrt(q);
  else
    return q;
}

// Copies up to 4 entries of src into dst, padding dead lanes with `pad`.
inline void pad4(double* dst, const double* src, std::size_t live, double pad) {
  for (std::size_t l = 0; l < 4; ++l) dst[l] = l < live ? src[l] : pad;
}

}  // namespace detail

/// out[c] = sum_j [coefneg * cw[j] / den_j] * (Einv z_j)_c over r2_j > eps2,
/// with z_j = target - source_j and one matrix for the whole sum.
template <class P, int DIM>
void grad_sum_const_t(const double* sx, const double* sy, const double* sz,
                      const double* cw, std::size_t n, const double t[3],
                      const SymInv& m, double coefneg, double eps2, double out[3]) {
  const P tx = P::set1(t[0]), ty = P::set1(t[1]), tz = P::set1(t[2]);
  const P i00 = P::set1(m.i00), i01 = P::set1(m.i01), i02 = P::set1(m.i02);
  const P i11 = P::set1(m.i11), i12 = P::set1(m.i12), i22 = P::set1(m.i22);
  const P cn = P::set1(coefneg), e2 = P::set1(eps2);
  detail::Acc<P> a0, a1, a2;

  double bx[4], by[4], bz[4], bw[4];
  for (std::size_t j = 0; j < n; j += 4) {
    const double *px = sx + j, *py = sy + j, *pz = sz + j, *pw = cw + j;
    if (n - j < 4) {
      const std::size_t live = n - j;
      detail::pad4(bx, px, live, t[0]);
      detail::pad4(by, py, live, t[1]);
      detail::pad4(bz, pz, live, t[2]);
      detail::pad4(bw, pw, live, 0.0);
      px = bx;
      py = by;
      pz = bz;
      pw = bw;
    }
    const P zx = tx - P::load(px);
    const P zy = ty - P::load(py);
    const P zz = tz - P::load(pz);
    const P w0 = i00 * zx + i01 * zy + i02 * zz;
    const P w1 = i01 * zx + i11 * zy + i12 * zz;
    const P w2 = i02 * zx + i12 * zy + i22 * zz;
    const P q = w0 * zx + w1 * zy + w2 * zz;
    const P r2 = zx * zx + zy * zy + zz * zz;
    const P u = (cn * P::load(pw)) / detail::kernel_den<P, DIM>(q);
    const P mask = P::gt(r2, e2);
    a0.add(P::mask_keep(mask, u * w0));
    a1.add(P::mask_keep(mask, u * w1));
    a2.add(P::mask_keep(mask, u * w2));
  }
  out[0] = a0.reduce();
  out[1] = a1.reduce();
  out[2] = a2.reduce();
}

/// Same sum with a matrix frozen at each source.
template <class P, int DIM>
void grad_sum_var_t(const double* sx, const double* sy, const double* sz,
                    const double* cw, const PerSourceMats& pm, std::size_t n,
                    const double t[3], double eps2, double out[3]) {
  const P tx = P::set1(t[0]), ty = P::set1(t[1]), tz = P::set1(t[2]);
  const P e2 = P::set1(eps2);
  detail::Acc<P> a0, a1, a2;

  double buf[11][4];
  for (std::size_t j = 0; j < n; j += 4) {
    const double* p[11] = {sx + j,     sy + j,     sz + j,     cw + j,
                           pm.i00 + j, pm.i01 + j, pm.i02 + j, pm.i11 + j,
                           pm.i12 + j, pm.i22 + j, pm.coefneg + j};
    if (n - j < 4) {
      const std::size_t live = n - j;
      const double pads[11] = {t[0], t[1], t[2], 0, 0, 0, 0, 0, 0, 0, 0};
      for (int s = 0; s < 11; ++s) {
        detail::pad4(buf[s], p[s], live, pads[s]);
        p[s] = buf[s];
      }
    }
    const P zx = tx - P::load(p[0]);
    const P zy = ty - P::load(p[1]);
    const P zz = tz - P::load(p[2]);
    const P w0 = P::load(p[4]) * zx + P::load(p[5]) * zy + P::load(p[6]) * zz;
    const P w1 = P::load(p[5]) * zx + P::load(p[7]) * zy + P::load(p[8]) * zz;
    const P w2 = P::load(p[6]) * zx + P::load(p[8]) * zy + P::load(p[9]) * zz;
    const P q = w0 * zx + w1 * zy + w2 * zz;
    const P r2 = zx * zx + zy * zy + zz * zz;
    const P u = (P::load(p[10]) * P::load(p[3])) / detail::kernel_den<P, DIM>(q);
    const P mask = P::gt(r2, e2);
    a0.add(P::mask_keep(mask, u * w0));
    a1.add(P::mask_keep(mask, u * w1));
    a2.add(P::mask_keep(mask, u * w2));
  }
  out[0] = a0.reduce();
  out[1] = a1.reduce();
  out[2] = a2.reduce();
}

/// Adjoint sum with one matrix: result = coefneg * sum_j <Einv z_j, omega_j> / den_j
/// with z_j = source_j - target.
template <class P, int DIM>
double adjoint_dot_sum_const_t(const double* sx, const double* sy, const double* sz,
                               const double* ox, const double* oy, const double* oz,
                               std::size_t n, const double t[3], const SymInv& m,
                               double coefneg, double eps2) {
  const P tx = P::set1(t[0]), ty = P::set1(t[1]), tz = P::set1(t[2]);
  const P i00 = P::set1(m.i00), i01 = P::set1(m.i01), i02 = P::set1(m.i02);
  const P i11 = P::set1(m.i11), i12 = P::set1(m.i12), i22 = P::set1(m.i22);
  const P cn = P::set1(coefneg), e2 = P::set1(eps2);
  detail::Acc<P> acc;

  double buf[6][4];
  for (std::size_t j = 0; j < n; j += 4) {
    const double* p[6] = {sx + j, sy + j, sz + j, ox + j, oy + j, oz + j};
    if (n - j < 4) {
      const std::size_t live = n - j;
      const double pads[6] = {t[0], t[1], t[2], 0, 0, 0};
      for (int s = 0; s < 6; ++s) {
        detail::pad4(buf[s], p[s], live, pads[s]);
        p[s] = buf[s];
      }
    }
    const P zx = P::load(p[0]) - tx;
    const P zy = P::load(p[1]) - ty;
    const P zz = P::load(p[2]) - tz;
    const P w0 = i00 * zx + i01 * zy + i02 * zz;
    const P w1 = i01 * zx + i11 * zy + i12 * zz;
    const P w2 = i02 * zx + i12 * zy + i22 * zz;
    const P q = w0 * zx + w1 * zy + w2 * zz;
    const P r2 = zx * zx + zy * zy + zz * zz;
    const P u = cn / detail::kernel_den<P, DIM>(q);
    const P dotv = w0 * P::load(p[3]) + w1 * P::load(p[4]) + w2 * P::load(p[5]);
    const P mask = P::gt(r2, e2);
    acc.add(P::mask_keep(mask, u * dotv));
  }
  return acc.reduce();
}

/// Adjoint sum: result = sum_j [coefneg_j / den_j] * <Einv_j z_j, omega_j>
/// with z_j = source_j - target (the matrix travels with the source).
template <class P, int DIM>
double adjoint_dot_sum_t(const double* sx, const double* sy, const double* sz,
                         const double* ox, const double* oy, const double* oz,
                         const PerSourceMats& pm, std::size_t n, const double t[3],
                         double eps2) {
  const P tx = P::set1(t[0]), ty = P::set1(t[1]), tz = P::set1(t[2]);
  const P e2 = P::set1(eps2);
  detail::Acc<P> acc;

  double buf[13][4];
  for (std::size_t j = 0; j < n; j += 4) {
    const double* p[13] = {sx + j,     sy + j,     sz + j,     ox + j,     oy + j,
                           oz + j,     pm.i00 + j, pm.i01 + j, pm.i02 + j, pm.i11 + j,
                           pm.i12 + j, pm.i22 + j, pm.coefneg + j};
    if (n - j < 4) {
      const std::size_t live = n - j;
      const double pads[13] = {t[0], t[1], t[2], 0, 0, 0, 0, 0, 0, 0, 0, 0, 0};
      for (int s = 0; s < 13; ++s) {
        detail::pad4(buf[s], p[s], live, pads[s]);
        p[s] = buf[s];
      }
    }
    const P zx = P::load(p[0]) - tx;
    const P zy = P::load(p[1]) - ty;
    const P zz = P::load(p[2]) - tz;
    const P w0 = P::load(p[6]) * zx + P::load(p[7]) * zy + P::load(p[8]) * zz;
    const P w1 = P::load(p[7]) * zx + P::load(p[9]) * zy + P::load(p[10]) * zz;
    const P w2 = P::load(p[8]) * zx + P::load(p[10]) * zy + P::load(p[11]) * zz;
    const P q = w0 * zx + w1 * zy + w2 * zz;
    const P r2 = zx * zx + zy * zy + zz * zz;
    const P u = P::load(p[12]) / detail::kernel_den<P, DIM>(q);
    const P dotv =
        w0 * P::load(p[3]) + w1 * P::load(p[4]) + w2 * P::load(p[5]);
    const P mask = P::gt(r2, e2);
    acc.add(P::mask_keep(mask, u * dotv));
  }
  return acc.reduce();
}

}  // namespace irrsio::simd
