#pragma once

#include <cstddef>

namespace mk::simd::detail {

// Raw-pointer kernel signatures; complex arrays are interleaved (re, im).
struct KernelTable {
  void (*cdotu)(const double* a, const double* b, std::size_t n, double* out);
  void (*cdotc)(const double* a, const double* b, std::size_t n, double* out);
  void (*caxpy)(double ar, double ai, const double* x, double* y, std::size_t n);
  void (*cmul)(const double* a, const double* b, double* out, std::size_t n);
  double (*sum)(const double* x, std::size_t n);
  void (*cis_2pi)(const double* t, double* re, double* im, std::size_t n);
  void (*accumulate_mode)(double cr, double ci, double omega, double phase0,
                          const double* u, double* out, std::size_t n);
  void (*horner)(const double* coeffs, std::size_t ncoeff, const double* zr,
                 const double* zi, double* outr, double* outi, std::size_t n);
};

extern const KernelTable scalar_table;
#ifdef MK_HAVE_AVX2
extern const KernelTable avx2_table;
#endif

}  // namespace mk::simd::detail
