#include <cmath>

#include "table.hpp"

namespace mk::simd::detail {
namespace {

constexpr double two_pi = 6.283185307179586476925286766559;

void cdotu_s(const double* a, const double* b, std::size_t n, double* out) {
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double ar = a[2 * i], ai = a[2 * i + 1];
    const double br = b[2 * i], bi = b[2 * i + 1];
    re += ar * br - ai * bi;
    im += ar * bi + ai * br;
  }
  out[0] = re;
  out[1] = im;
}

void cdotc_s(const double* a, const double* b, std::size_t n, double* out) {
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double ar = a[2 * i], ai = a[2 * i + 1];
    const double br = b[2 * i], bi = b[2 * i + 1];
    re += ar * br + ai * bi;
    im += ar * bi - ai * br;
  }
  out[0] = re;
  out[1] = im;
}

void caxpy_s(double ar, double ai, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double xr = x[2 * i], xi = x[2 * i + 1];
    y[2 * i] += ar * xr - ai * xi;
    y[2 * i + 1] += ar * xi + ai * xr;
  }
}

void cmul_s(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double ar = a[2 * i], ai = a[2 * i + 1];
    const double br = b[2 * i], bi = b[2 * i + 1];
    out[2 * i] = ar * br - ai * bi;
    out[2 * i + 1] = ar * bi + ai * br;
  }
}

double sum_s(const double* x, std::size_t n) {
  if (n <= 16) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  const std::size_t h = n / 2;
  return sum_s(x, h) + sum_s(x + h, n - h);
}

inline void cis_one(double t, double& c, double& s) {
  const double r = t - std::nearbyint(t);
  c = std::cos(two_pi * r);
  s = std::sin(two_pi * r);
}

void cis_2pi_s(const double* t, double* re, double* im, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) cis_one(t[i], re[i], im[i]);
}

void accumulate_mode_s(double cr, double ci, double omega, double phase0, const double* u,
                       double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    double c, s;
    cis_one(phase0 + omega * u[i], c, s);
    out[i] += cr * c - ci * s;
  }
}

void horner_s(const double* coeffs, std::size_t ncoeff, const double* zr, const double* zi,
              double* outr, double* outi, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    double ar = 0.0, ai = 0.0;
    for (std::size_t j = ncoeff; j-- > 0;) {
      const double tr = ar * zr[i] - ai * zi[i] + coeffs[2 * j];
      const double ti = ar * zi[i] + ai * zr[i] + coeffs[2 * j + 1];
      ar = tr;
      ai = ti;
    }
    outr[i] = ar;
    outi[i] = ai;
  }
}

}  // namespace

const KernelTable scalar_table = {cdotu_s,   cdotc_s,   caxpy_s,           cmul_s,
                                  sum_s,     cis_2pi_s, accumulate_mode_s, horner_s};

}  // namespace mk::simd::detail
