#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "frozen_values.hpp"
#include "mourrekit/errors.hpp"
#include "mourrekit/specmeas.hpp"

using namespace mk;

TEST_CASE("identity and rotation correlations") {
  const FreqWindow w(1, 8, 0);
  const StateVector phi = StateVector::basis(w, {2}) + StateVector::basis(w, {0});
  const CorrelationSequence id = correlations_matrix(OperatorMatrix::identity(w), phi, 100);
  for (const auto& c : id.values) CHECK(std::abs(c - 2.0) < 1e-15);
  const CorrelationSequence rot =
      correlations_matrix(translation_koopman(FrequencyVector({fx::golden}), w), StateVector::basis(w, {1}), 200);
  for (std::size_t k = 0; k < rot.values.size(); ++k) {
    const double t = static_cast<double>(k) * fx::golden;
    CHECK(std::abs(rot.values[k] - cplx(std::cos(fx::two_pi * t), std::sin(fx::two_pi * t))) < 1e-12);
  }
}

TEST_CASE("anzai correlations vanish on both paths") {
  const SkewProductSpec s = fx::anzai(0.0);
  const FreqWindow w(1, 300, 0);
  const CorrelationSequence m = correlations_matrix(assemble_koopman(s, w, 1e-14), StateVector::basis(w, {0}), 250);
  const CorrelationSequence q = correlations_quadrature(s, 250, TorusGrid(1, quadrature_resolution(s, 250)));
  CHECK(q.values[0] == cplx(1.0, 0.0));
  for (std::size_t k = 1; k < m.values.size(); ++k) {
    CHECK(std::abs(m.values[k]) <= 1e-12);
    CHECK(std::abs(q.values[k]) <= 1e-12);
  }
}

TEST_CASE("quadrature path reproduces reference correlations") {
  const SkewProductSpec s = fx::anzai(0.5);
  const CorrelationSequence q = correlations_quadrature(s, 10, TorusGrid(1, quadrature_resolution(s, 10)));
  CHECK(std::abs(q.values[1] - cplx(frozen::kSkewCorrRe1, frozen::kSkewCorrIm1)) < 1e-13);
  CHECK(std::abs(q.values[2] - cplx(frozen::kSkewCorrRe2, frozen::kSkewCorrIm2)) < 1e-13);
  CHECK(std::abs(q.values[3] - cplx(frozen::kSkewCorrRe3, frozen::kSkewCorrIm3)) < 1e-13);
  CHECK(std::abs(q.values[10] - cplx(frozen::kSkewCorrRe10, frozen::kSkewCorrIm10)) < 1e-13);
}

TEST_CASE("matrix and quadrature paths agree within budgets") {
  const SkewProductSpec s = fx::anzai(0.5);
  const FreqWindow w(1, 256, 0);
  const CorrelationSequence m =
      correlations_matrix(assemble_koopman(s, w, 1e-14), StateVector::basis(w, {0}), 200, true);
  const CorrelationSequence q = correlations_quadrature(s, 200, TorusGrid(1, quadrature_resolution(s, 200)));
  CHECK(m.budget + q.budget <= 1e-9);
  for (std::size_t k = 0; k <= 200; ++k) {
    CHECK(std::abs(m.values[k] - q.values[k]) <= m.budget + q.budget);
    CHECK(std::abs(m.values[k]) <= m.c0 + m.budget);
    CHECK(std::abs(q.values[k]) <= q.c0 + q.budget);
  }
}

TEST_CASE("negative powers give conjugate correlations") {
  const SkewProductSpec s = fx::anzai(0.5);
  const FreqWindow w(1, 128, 0);
  const OperatorMatrix U = assemble_koopman(s, w, 1e-14);
  const StateVector phi = StateVector::basis(w, {0});
  const CorrelationSequence fwd = correlations_matrix(U, phi, 10);
  const CorrelationSequence bwd = correlations_matrix(adjoint(U), phi, 10);
  for (std::size_t k = 0; k <= 10; ++k) CHECK(std::abs(bwd.values[k] - std::conj(fwd.values[k])) < 1e-12);
}

TEST_CASE("window overflow needs explicit acceptance") {
  const SkewProductSpec s = fx::anzai(0.5);
  const FreqWindow w(1, 64, 0);
  const OperatorMatrix U = assemble_koopman(s, w, 1e-14);
  CHECK_THROWS_AS(correlations_matrix(U, StateVector::basis(w, {0}), 100), InvalidArgument);
  CHECK_NOTHROW(correlations_matrix(U, StateVector::basis(w, {0}), 100, true));
  CHECK_THROWS_WITH_AS(correlations_quadrature(s, 1000, TorusGrid(1, 256)), doctest::Contains("use resolution >="),
                       InvalidArgument);
}

TEST_CASE("reduced block and full space give the same correlations") {
  // Koopman operator of the skew map on T^1 x T^1 is block diagonal in the
  // fibre character; assemble characters -1, 0, 1 on a 2-d window.
  const int M = 40;
  const FreqWindow full(2, M, 0), blk(1, M, 0);
  std::vector<std::vector<OperatorMatrix::Entry>> rows(full.size());
  for (int m = -1; m <= 1; ++m) {
    SkewProductSpec s = fx::anzai(0.5);
    s.m = {m};
    s.allow_degenerate = true;
    s.eta = {TrigPoly::sine({1}, 0.5 / fx::two_pi)};
    const OperatorMatrix U = assemble_koopman(s, blk, 1e-14);
    for (std::size_t i = 0; i < blk.size(); ++i)
      for (std::size_t p = U.row_ptr()[i]; p < U.row_ptr()[i + 1]; ++p) {
        const std::size_t r = full.index({blk.freq(i)[0], m});
        const std::size_t c = full.index({blk.freq(U.cols()[p])[0], m});
        rows[r].push_back({static_cast<std::uint32_t>(c), U.vals()[p]});
      }
  }
  const OperatorMatrix F = OperatorMatrix::from_rows(full, std::move(rows));
  const CorrelationSequence a = correlations_matrix(F, StateVector::basis(full, {0, 1}), 20, true);
  const FreqWindow w(1, M, 0);
  const CorrelationSequence b =
      correlations_matrix(assemble_koopman(fx::anzai(0.5), w, 1e-14), StateVector::basis(w, {0}), 20, true);
  for (std::size_t k = 0; k <= 20; ++k) CHECK(std::abs(a.values[k] - b.values[k]) <= 1e-12);
}

TEST_CASE("wiener statistic") {
  CorrelationSequence z;
  z.values.assign(101, cplx(0, 0));
  z.values[0] = 1.0;
  z.c0 = 1.0;
  for (double v : wiener_statistic(z)) CHECK(v == 0.0);
  CorrelationSequence u = z;
  for (std::size_t k = 0; k < u.values.size(); ++k) u.values[k] = std::polar(1.0, 0.3 * static_cast<double>(k));
  for (double v : wiener_statistic(u)) CHECK(v == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("fejer density: flat, peaked and mass preserving") {
  CorrelationSequence z;
  z.values.assign(128, cplx(0, 0));
  z.values[0] = 2.0;
  z.c0 = 2.0;
  const Density flat = spectral_density(z, Kernel::fejer);
  for (double v : flat.value) CHECK(v == doctest::Approx(2.0).epsilon(1e-14));

  const long N = 256;
  CorrelationSequence p;
  p.c0 = 1.0;
  for (long k = 0; k < N; ++k) {
    const double t = static_cast<double>(k) * fx::golden;
    p.values.emplace_back(std::cos(fx::two_pi * t), std::sin(fx::two_pi * t));
  }
  const Density d = spectral_density(p, Kernel::fejer);
  CHECK(d.value.size() >= 2 * static_cast<std::size_t>(N));
  double mean = 0, lo = 0;
  for (std::size_t i = 0; i < d.value.size(); ++i) {
    mean += d.value[i];
    lo = std::min(lo, d.value[i]);
    // closed form Fejer kernel F_N(phi) = (1/N) (sin(N phi/2) / sin(phi/2))^2, phi = 2 pi y - theta
    const double phi = fx::two_pi * fx::golden - d.angle[i];
    const double s = std::sin(phi / 2);
    const double want = std::abs(s) < 1e-12 ? N : std::pow(std::sin(N * phi / 2) / s, 2) / N;
    CHECK(std::abs(d.value[i] - want) < 1e-9 * N);
  }
  CHECK(mean / d.value.size() == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(lo >= -1e-12);
  const Density h = spectral_density(p, Kernel::hann);
  double hm = 0;
  for (double v : h.value) hm += v;
  CHECK(hm / h.value.size() == doctest::Approx(1.0).epsilon(1e-8));
  CHECK_THROWS_AS(spectral_density(CorrelationSequence{{1.0}, 1.0, "x", 0.0}, Kernel::fejer), InvalidArgument);
}

TEST_CASE("classification indicators") {
  const FreqWindow w(1, 4, 0);
  const CorrelationSequence rot =
      correlations_matrix(translation_koopman(FrequencyVector({fx::golden}), w), StateVector::basis(w, {1}), 500);
  const SpectralReport r = classify(rot);
  CHECK(r.point_detected);
  CHECK(r.continuous_indicator < 1e-10);
  CHECK(r.to_text().find("indicator, not proof") != std::string::npos);

  const FreqWindow wa(1, 600, 0);
  const CorrelationSequence an =
      correlations_matrix(assemble_koopman(fx::anzai(0.0), wa, 1e-14), StateVector::basis(wa, {0}), 500);
  const SpectralReport ra = classify(an);
  CHECK_FALSE(ra.point_detected);
  CHECK(ra.lebesgue_flatness <= 1e-10);
  CHECK(ra.lebesgue_like);
}

TEST_CASE("furstenberg block shows no point spectrum") {
  const FurstenbergLevel lvl{fx::furstenberg2(0.5), 2, 1};
  const long N = 2000;
  const FreqWindow w(1, static_cast<int>(N) + 64, 0);
  const CorrelationSequence c = correlations_matrix(assemble_koopman(lvl, w, 1e-14), StateVector::basis(w, {0}), N, true);
  CHECK(c.budget < 1e-9);
  CHECK_FALSE(classify(c).point_detected);
}
