#include <immintrin.h>

#include <cmath>

#include "table.hpp"

namespace mk::simd::detail {
namespace {

constexpr double two_pi = 6.283185307179586476925286766559;

inline double hsum(__m256d v) {
  alignas(32) double t[4];
  _mm256_store_pd(t, v);
  return (t[0] + t[1]) + (t[2] + t[3]);
}

inline double halt(__m256d v) {
  alignas(32) double t[4];
  _mm256_store_pd(t, v);
  return (t[0] - t[1]) + (t[2] - t[3]);
}

inline __m256d swap_pairs(__m256d v) { return _mm256_permute_pd(v, 0x5); }

void cdotu_v(const double* a, const double* b, std::size_t n, double* out) {
  __m256d p = _mm256_setzero_pd(), q = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d va = _mm256_loadu_pd(a + 2 * i);
    const __m256d vb = _mm256_loadu_pd(b + 2 * i);
    p = _mm256_fmadd_pd(va, vb, p);
    q = _mm256_fmadd_pd(va, swap_pairs(vb), q);
  }
  double re = halt(p), im = hsum(q);
  for (; i < n; ++i) {
    re += a[2 * i] * b[2 * i] - a[2 * i + 1] * b[2 * i + 1];
    im += a[2 * i] * b[2 * i + 1] + a[2 * i + 1] * b[2 * i];
  }
  out[0] = re;
  out[1] = im;
}

void cdotc_v(const double* a, const double* b, std::size_t n, double* out) {
  __m256d p = _mm256_setzero_pd(), q = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d va = _mm256_loadu_pd(a + 2 * i);
    const __m256d vb = _mm256_loadu_pd(b + 2 * i);
    p = _mm256_fmadd_pd(va, vb, p);
    q = _mm256_fmadd_pd(va, swap_pairs(vb), q);
  }
  double re = hsum(p), im = halt(q);
  for (; i < n; ++i) {
    re += a[2 * i] * b[2 * i] + a[2 * i + 1] * b[2 * i + 1];
    im += a[2 * i] * b[2 * i + 1] - a[2 * i + 1] * b[2 * i];
  }
  out[0] = re;
  out[1] = im;
}

void caxpy_v(double ar, double ai, const double* x, double* y, std::size_t n) {
  const __m256d vr = _mm256_set1_pd(ar), vi = _mm256_set1_pd(ai);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d vx = _mm256_loadu_pd(x + 2 * i);
    const __m256d t = _mm256_addsub_pd(_mm256_mul_pd(vx, vr), _mm256_mul_pd(swap_pairs(vx), vi));
    _mm256_storeu_pd(y + 2 * i, _mm256_add_pd(_mm256_loadu_pd(y + 2 * i), t));
  }
  for (; i < n; ++i) {
    const double xr = x[2 * i], xi = x[2 * i + 1];
    y[2 * i] += ar * xr - ai * xi;
    y[2 * i + 1] += ar * xi + ai * xr;
  }
}

void cmul_v(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d va = _mm256_loadu_pd(a + 2 * i);
    const __m256d vb = _mm256_loadu_pd(b + 2 * i);
    const __m256d t1 = _mm256_mul_pd(va, _mm256_movedup_pd(vb));
    const __m256d t2 = _mm256_mul_pd(swap_pairs(va), _mm256_permute_pd(vb, 0xF));
    _mm256_storeu_pd(out + 2 * i, _mm256_addsub_pd(t1, t2));
  }
  for (; i < n; ++i) {
    const double ar = a[2 * i], ai = a[2 * i + 1];
    const double br = b[2 * i], bi = b[2 * i + 1];
    out[2 * i] = ar * br - ai * bi;
    out[2 * i + 1] = ar * bi + ai * br;
  }
}

double sum_v(const double* x, std::size_t n) {
  if (n > 64) {
    const std::size_t h = n / 2;
    return sum_v(x, h) + sum_v(x + h, n - h);
  }
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
  double s = hsum(acc);
  for (; i < n; ++i) s += x[i];
  return s;
}

// Octant reduction to |theta| <= pi/4, then Taylor polynomials.
inline void cis4(__m256d t, __m256d& c, __m256d& s) {
  constexpr int rnd = _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC;
  const __m256d r = _mm256_sub_pd(t, _mm256_round_pd(t, rnd));
  const __m256d q = _mm256_round_pd(_mm256_mul_pd(r, _mm256_set1_pd(4.0)), rnd);
  const __m256d x = _mm256_sub_pd(r, _mm256_mul_pd(q, _mm256_set1_pd(0.25)));
  const __m256d th = _mm256_mul_pd(x, _mm256_set1_pd(two_pi));
  const __m256d z = _mm256_mul_pd(th, th);

  __m256d qs = _mm256_set1_pd(-1.0 / 1307674368000.0);
  qs = _mm256_fmadd_pd(qs, z, _mm256_set1_pd(1.0 / 6227020800.0));
  qs = _mm256_fmadd_pd(qs, z, _mm256_set1_pd(-1.0 / 39916800.0));
  qs = _mm256_fmadd_pd(qs, z, _mm256_set1_pd(1.0 / 362880.0));
  qs = _mm256_fmadd_pd(qs, z, _mm256_set1_pd(-1.0 / 5040.0));
  qs = _mm256_fmadd_pd(qs, z, _mm256_set1_pd(1.0 / 120.0));
  qs = _mm256_fmadd_pd(qs, z, _mm256_set1_pd(-1.0 / 6.0));
  const __m256d sn = _mm256_fmadd_pd(_mm256_mul_pd(th, z), qs, th);

  __m256d pc = _mm256_set1_pd(1.0 / 20922789888000.0);
  pc = _mm256_fmadd_pd(pc, z, _mm256_set1_pd(-1.0 / 87178291200.0));
  pc = _mm256_fmadd_pd(pc, z, _mm256_set1_pd(1.0 / 479001600.0));
  pc = _mm256_fmadd_pd(pc, z, _mm256_set1_pd(-1.0 / 3628800.0));
  pc = _mm256_fmadd_pd(pc, z, _mm256_set1_pd(1.0 / 40320.0));
  pc = _mm256_fmadd_pd(pc, z, _mm256_set1_pd(-1.0 / 720.0));
  pc = _mm256_fmadd_pd(pc, z, _mm256_set1_pd(1.0 / 24.0));
  pc = _mm256_fmadd_pd(pc, z, _mm256_set1_pd(-0.5));
  const __m256d cs = _mm256_fmadd_pd(pc, z, _mm256_set1_pd(1.0));

  // quadrant q mod 4
  const __m256d qm = _mm256_sub_pd(
      q, _mm256_mul_pd(_mm256_set1_pd(4.0), _mm256_floor_pd(_mm256_mul_pd(q, _mm256_set1_pd(0.25)))));
  const __m256d m1 = _mm256_cmp_pd(qm, _mm256_set1_pd(1.0), _CMP_EQ_OQ);
  const __m256d m2 = _mm256_cmp_pd(qm, _mm256_set1_pd(2.0), _CMP_EQ_OQ);
  const __m256d m3 = _mm256_cmp_pd(qm, _mm256_set1_pd(3.0), _CMP_EQ_OQ);
  const __m256d neg = _mm256_set1_pd(-0.0);
  const __m256d ncs = _mm256_xor_pd(cs, neg), nsn = _mm256_xor_pd(sn, neg);
  c = _mm256_blendv_pd(cs, nsn, m1);
  c = _mm256_blendv_pd(c, ncs, m2);
  c = _mm256_blendv_pd(c, sn, m3);
  s = _mm256_blendv_pd(sn, cs, m1);
  s = _mm256_blendv_pd(s, nsn, m2);
  s = _mm256_blendv_pd(s, ncs, m3);
}

void cis_2pi_v(const double* t, double* re, double* im, std::size_t n) {
  std::size_t i = 0;
  __m256d c, s;
  for (; i + 4 <= n; i += 4) {
    cis4(_mm256_loadu_pd(t + i), c, s);
    _mm256_storeu_pd(re + i, c);
    _mm256_storeu_pd(im + i, s);
  }
  if (i < n) {
    alignas(32) double tt[4] = {0, 0, 0, 0}, cr[4], ci[4];
    for (std::size_t j = i; j < n; ++j) tt[j - i] = t[j];
    cis4(_mm256_load_pd(tt), c, s);
    _mm256_store_pd(cr, c);
    _mm256_store_pd(ci, s);
    for (std::size_t j = i; j < n; ++j) {
      re[j] = cr[j - i];
      im[j] = ci[j - i];
    }
  }
}

void accumulate_mode_v(double cr, double ci, double omega, double phase0, const double* u,
                       double* out, std::size_t n) {
  const __m256d vp = _mm256_set1_pd(phase0), vw = _mm256_set1_pd(omega);
  const __m256d vcr = _mm256_set1_pd(cr), vci = _mm256_set1_pd(ci);
  std::size_t i = 0;
  __m256d c, s;
  for (; i + 4 <= n; i += 4) {
    cis4(_mm256_add_pd(vp, _mm256_mul_pd(vw, _mm256_loadu_pd(u + i))), c, s);
    const __m256d v = _mm256_sub_pd(_mm256_mul_pd(vcr, c), _mm256_mul_pd(vci, s));
    _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_loadu_pd(out + i), v));
  }
  if (i < n) {
    alignas(32) double tt[4] = {0, 0, 0, 0}, cv[4], sv[4];
    for (std::size_t j = i; j < n; ++j) tt[j - i] = phase0 + omega * u[j];
    cis4(_mm256_load_pd(tt), c, s);
    _mm256_store_pd(cv, c);
    _mm256_store_pd(sv, s);
    for (std::size_t j = i; j < n; ++j) out[j] += cr * cv[j - i] - ci * sv[j - i];
  }
}

inline void horner4(const double* coeffs, std::size_t ncoeff, __m256d zr, __m256d zi,
                    __m256d& ar, __m256d& ai) {
  ar = _mm256_setzero_pd();
  ai = _mm256_setzero_pd();
  for (std::size_t j = ncoeff; j-- > 0;) {
    const __m256d tr = _mm256_add_pd(
        _mm256_sub_pd(_mm256_mul_pd(ar, zr), _mm256_mul_pd(ai, zi)), _mm256_set1_pd(coeffs[2 * j]));
    const __m256d ti = _mm256_add_pd(
        _mm256_add_pd(_mm256_mul_pd(ar, zi), _mm256_mul_pd(ai, zr)), _mm256_set1_pd(coeffs[2 * j + 1]));
    ar = tr;
    ai = ti;
  }
}

void horner_v(const double* coeffs, std::size_t ncoeff, const double* zr, const double* zi,
              double* outr, double* outi, std::size_t n) {
  std::size_t i = 0;
  __m256d ar, ai;
  for (; i + 4 <= n; i += 4) {
    horner4(coeffs, ncoeff, _mm256_loadu_pd(zr + i), _mm256_loadu_pd(zi + i), ar, ai);
    _mm256_storeu_pd(outr + i, ar);
    _mm256_storeu_pd(outi + i, ai);
  }
  if (i < n) {
    alignas(32) double br[4] = {0, 0, 0, 0}, bi[4] = {0, 0, 0, 0}, rr[4], ri[4];
    for (std::size_t j = i; j < n; ++j) {
      br[j - i] = zr[j];
      bi[j - i] = zi[j];
    }
    horner4(coeffs, ncoeff, _mm256_load_pd(br), _mm256_load_pd(bi), ar, ai);
    _mm256_store_pd(rr, ar);
    _mm256_store_pd(ri, ai);
    for (std::size_t j = i; j < n; ++j) {
      outr[j] = rr[j - i];
      outi[j] = ri[j - i];
    }
  }
}

}  // namespace

const KernelTable avx2_table = {cdotu_v,   cdotc_v,   caxpy_v,           cmul_v,
                                sum_v,     cis_2pi_v, accumulate_mode_v, horner_v};

}  // namespace mk::simd::detail
