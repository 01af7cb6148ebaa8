#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace mk::simd {

using cplx = std::complex<double>;

enum class Isa { scalar, avx2 };

bool isa_supported(Isa isa);
Isa active_isa();
// Select a variant explicitly, mainly for equivalence tests. Throws
// InvalidArgument when the CPU or the build lacks the requested variant.
void force_isa(Isa isa);
// Back to the best variant the CPU supports.
void reset_isa();
const char* isa_name(Isa isa);

// sum a_i b_i
cplx cdotu(std::span<const cplx> a, std::span<const cplx> b);
// sum conj(a_i) b_i
cplx cdotc(std::span<const cplx> a, std::span<const cplx> b);
// y += alpha x
void caxpy(cplx alpha, std::span<const cplx> x, std::span<cplx> y);
// out_i = a_i b_i
void cmul(std::span<const cplx> a, std::span<const cplx> b, std::span<cplx> out);
// Fixed-order pairwise sum.
double sum(std::span<const double> x);

// re_i + i im_i = exp(2 pi i t_i)
void cis_2pi(std::span<const double> t, std::span<double> re, std::span<double> im);

// out_i += Re(c exp(2 pi i (phase0 + omega u_i)))
void accumulate_mode(cplx c, double omega, double phase0, std::span<const double> u,
                     std::span<double> out);

// out_i = sum_j coeffs[j] z_i^j, points in split (SoA) layout.
void horner(std::span<const cplx> coeffs, std::span<const double> z_re,
            std::span<const double> z_im, std::span<double> out_re,
            std::span<double> out_im);

}  // namespace mk::simd
