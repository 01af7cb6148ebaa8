#include <atomic>
#include <cassert>

#include "mourrekit/errors.hpp"
#include "mourrekit/simd/kernels.hpp"
#include "table.hpp"

namespace mk::simd {
namespace {

using detail::KernelTable;

bool cpu_has_avx2() {
#ifdef MK_HAVE_AVX2
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* table_for(Isa isa) {
#ifdef MK_HAVE_AVX2
  if (isa == Isa::avx2) return &detail::avx2_table;
#endif
  (void)isa;
  return &detail::scalar_table;
}

Isa best_isa() { return cpu_has_avx2() ? Isa::avx2 : Isa::scalar; }

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{best_isa()};
  return isa;
}

const KernelTable& table() { return *table_for(current().load(std::memory_order_relaxed)); }

const double* raw(std::span<const cplx> v) { return reinterpret_cast<const double*>(v.data()); }
double* raw(std::span<cplx> v) { return reinterpret_cast<double*>(v.data()); }

}  // namespace

bool isa_supported(Isa isa) { return isa == Isa::scalar || cpu_has_avx2(); }

Isa active_isa() { return current().load(); }

void force_isa(Isa isa) {
  if (!isa_supported(isa)) throw InvalidArgument(std::string("instruction set not available: ") + isa_name(isa));
  current().store(isa);
}

void reset_isa() { current().store(best_isa()); }

const char* isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

cplx cdotu(std::span<const cplx> a, std::span<const cplx> b) {
  assert(a.size() == b.size());
  double out[2];
  table().cdotu(raw(a), raw(b), a.size(), out);
  return {out[0], out[1]};
}

cplx cdotc(std::span<const cplx> a, std::span<const cplx> b) {
  assert(a.size() == b.size());
  double out[2];
  table().cdotc(raw(a), raw(b), a.size(), out);
  return {out[0], out[1]};
}

void caxpy(cplx alpha, std::span<const cplx> x, std::span<cplx> y) {
  assert(x.size() == y.size());
  table().caxpy(alpha.real(), alpha.imag(), raw(x), raw(y), x.size());
}

void cmul(std::span<const cplx> a, std::span<const cplx> b, std::span<cplx> out) {
  assert(a.size() == b.size() && a.size() == out.size());
  table().cmul(raw(a), raw(b), raw(out), a.size());
}

double sum(std::span<const double> x) { return table().sum(x.data(), x.size()); }

void cis_2pi(std::span<const double> t, std::span<double> re, std::span<double> im) {
  assert(t.size() == re.size() && t.size() == im.size());
  table().cis_2pi(t.data(), re.data(), im.data(), t.size());
}

void accumulate_mode(cplx c, double omega, double phase0, std::span<const double> u,
                     std::span<double> out) {
  assert(u.size() == out.size());
  table().accumulate_mode(c.real(), c.imag(), omega, phase0, u.data(), out.data(), u.size());
}

void horner(std::span<const cplx> coeffs, std::span<const double> z_re,
            std::span<const double> z_im, std::span<double> out_re, std::span<double> out_im) {
  assert(z_re.size() == z_im.size() && z_re.size() == out_re.size() && z_re.size() == out_im.size());
  table().horner(raw(coeffs), coeffs.size(), z_re.data(), z_im.data(), out_re.data(),
                 out_im.data(), z_re.size());
}

}  // namespace mk::simd
