#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "mourrekit/errors.hpp"
#include "mourrekit/simd/kernels.hpp"

using namespace mk;
using simd::cplx;
using simd::Isa;

namespace {

struct Data {
  std::vector<cplx> a, b;
  std::vector<double> x, t;
};

Data make(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Data d;
  for (std::size_t i = 0; i < n; ++i) {
    d.a.emplace_back(u(rng), u(rng));
    d.b.emplace_back(u(rng), u(rng));
    d.x.push_back(u(rng));
    d.t.push_back(50.0 * u(rng));
  }
  return d;
}

// Runs f under both variants and hands both results to check.
template <class F, class C>
void both(F f, C check) {
  if (!simd::isa_supported(Isa::avx2)) {
    MESSAGE("avx2 not available, comparing scalar with itself");
  }
  simd::force_isa(Isa::scalar);
  auto ref = f();
  if (simd::isa_supported(Isa::avx2)) simd::force_isa(Isa::avx2);
  auto vec = f();
  simd::reset_isa();
  check(ref, vec);
}

const std::size_t sizes[] = {0, 1, 2, 3, 4, 5, 7, 8, 15, 16, 17, 63, 64, 65, 129, 1000};

}  // namespace

TEST_CASE("isa selection") {
  CHECK(simd::isa_supported(Isa::scalar));
  simd::force_isa(Isa::scalar);
  CHECK(simd::active_isa() == Isa::scalar);
  simd::reset_isa();
  if (!simd::isa_supported(Isa::avx2)) CHECK_THROWS_AS(simd::force_isa(Isa::avx2), InvalidArgument);
  CHECK(std::string(simd::isa_name(Isa::avx2)) == "avx2");
}

TEST_CASE("dot products and axpy agree across variants") {
  for (std::size_t n : sizes) {
    const Data d = make(n, 7 + static_cast<unsigned>(n));
    both([&] { return simd::cdotu(d.a, d.b); },
         [&](cplx r, cplx v) { CHECK(std::abs(r - v) <= 1e-14 * (1.0 + static_cast<double>(n))); });
    both([&] { return simd::cdotc(d.a, d.b); },
         [&](cplx r, cplx v) { CHECK(std::abs(r - v) <= 1e-14 * (1.0 + static_cast<double>(n))); });
    both(
        [&] {
          std::vector<cplx> y = d.b;
          simd::caxpy(cplx(0.3, -1.1), d.a, y);
          return y;
        },
        [&](const std::vector<cplx>& r, const std::vector<cplx>& v) {
          for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(r[i] - v[i]) <= 1e-15);
        });
    both(
        [&] {
          std::vector<cplx> y(n);
          simd::cmul(d.a, d.b, y);
          return y;
        },
        [&](const std::vector<cplx>& r, const std::vector<cplx>& v) {
          for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(r[i] - v[i]) <= 1e-15);
        });
  }
}

TEST_CASE("cmul allows aliasing the output") {
  const Data d = make(37, 3);
  std::vector<cplx> ref(37), y = d.a;
  simd::cmul(d.a, d.b, ref);
  simd::cmul(y, d.b, y);
  for (std::size_t i = 0; i < y.size(); ++i) CHECK(std::abs(ref[i] - y[i]) <= 1e-15);
}

TEST_CASE("pairwise sum") {
  for (std::size_t n : sizes) {
    const Data d = make(n, 11);
    long double exact = 0;
    for (double v : d.x) exact += v;
    both([&] { return simd::sum(d.x); },
         [&](double r, double v) {
           CHECK(std::abs(r - v) <= 4e-16 * (1.0 + static_cast<double>(n)));
           CHECK(std::abs(r - static_cast<double>(exact)) <= 4e-16 * (1.0 + static_cast<double>(n)));
         });
  }
}

TEST_CASE("cis kernel against libm") {
  for (std::size_t n : sizes) {
    const Data d = make(n, 5);
    both(
        [&] {
          std::vector<double> re(n), im(n);
          simd::cis_2pi(d.t, re, im);
          return std::make_pair(re, im);
        },
        [&](const auto& r, const auto& v) {
          for (std::size_t i = 0; i < n; ++i) {
            const double th = 2.0 * M_PI * (d.t[i] - std::nearbyint(d.t[i]));
            CHECK(std::abs(r.first[i] - std::cos(th)) <= 1e-15);
            CHECK(std::abs(r.second[i] - std::sin(th)) <= 1e-15);
            CHECK(std::abs(v.first[i] - r.first[i]) <= 2e-15);
            CHECK(std::abs(v.second[i] - r.second[i]) <= 2e-15);
          }
        });
  }
  // exact quadrant points
  const std::vector<double> t = {0.0, 0.25, 0.5, 0.75, -0.25, 3.0};
  std::vector<double> re(t.size()), im(t.size());
  simd::cis_2pi(t, re, im);
  CHECK(std::abs(re[1]) < 1e-16);
  CHECK(im[1] == doctest::Approx(1.0).epsilon(1e-16));
  CHECK(re[2] == doctest::Approx(-1.0).epsilon(1e-16));
  CHECK(re[5] == 1.0);
}

TEST_CASE("accumulate_mode and horner agree across variants") {
  for (std::size_t n : sizes) {
    const Data d = make(n, 9);
    both(
        [&] {
          std::vector<double> out(d.x);
          simd::accumulate_mode(cplx(0.4, -0.2), 3.0, 0.125, d.t, out);
          return out;
        },
        [&](const std::vector<double>& r, const std::vector<double>& v) {
          for (std::size_t i = 0; i < n; ++i) {
            const double ph = 2.0 * M_PI * (0.125 + 3.0 * d.t[i]);
            const double want = d.x[i] + (cplx(0.4, -0.2) * cplx(std::cos(ph), std::sin(ph))).real();
            CHECK(std::abs(r[i] - want) <= 1e-12);
            CHECK(std::abs(v[i] - r[i]) <= 1e-14);
          }
        });
    const std::vector<cplx> coeffs = {cplx(1, 0), cplx(0.5, 0.5), cplx(-0.25, 0), cplx(0, 0.125)};
    both(
        [&] {
          std::vector<double> zr(n), zi(n), orr(n), oi(n);
          for (std::size_t i = 0; i < n; ++i) {
            zr[i] = d.a[i].real();
            zi[i] = d.a[i].imag();
          }
          simd::horner(coeffs, zr, zi, orr, oi);
          return std::make_pair(orr, oi);
        },
        [&](const auto& r, const auto& v) {
          for (std::size_t i = 0; i < n; ++i) {
            cplx want = 0;
            for (std::size_t j = coeffs.size(); j-- > 0;) want = want * d.a[i] + coeffs[j];
            CHECK(std::abs(cplx(r.first[i], r.second[i]) - want) <= 1e-15);
            CHECK(std::abs(cplx(v.first[i], v.second[i]) - want) <= 1e-15);
          }
        });
  }
}
