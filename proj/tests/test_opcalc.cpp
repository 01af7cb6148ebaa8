#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "frozen_values.hpp"
#include "mourrekit/errors.hpp"
#include "mourrekit/opcalc.hpp"

using namespace mk;

namespace {

Eigen::MatrixXcd dense(const OperatorMatrix& a) {
  const auto n = static_cast<Eigen::Index>(a.rows());
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t p = a.row_ptr()[i]; p < a.row_ptr()[i + 1]; ++p)
      m(static_cast<Eigen::Index>(i), a.cols()[p]) = a.vals()[p];
  return m;
}

}  // namespace

TEST_CASE("window indexing round trips") {
  const FreqWindow w(2, 3, 1);
  CHECK(w.size() == 49);
  for (std::size_t i = 0; i < w.size(); ++i) CHECK(w.index(w.freq(i)) == i);
  CHECK(w.freq(0) == Freq{-3, -3});
  CHECK(w.linf(w.index({2, -1})) == 2);
  CHECK_FALSE(w.contains({4, 0}));
  CHECK_THROWS_AS(FreqWindow(1, 4, 4), InvalidArgument);
}

TEST_CASE("state vectors track support") {
  const FreqWindow w(1, 10, 0);
  CHECK(StateVector::zero(w).support() == -1);
  CHECK(StateVector::basis(w, {-3}).support() == 3);
  std::mt19937_64 rng(1);
  const StateVector r = StateVector::random_unit(w, 4, rng);
  CHECK(r.norm() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(r.support() <= 4);
  CHECK(std::abs(inner(r, r) - 1.0) < 1e-14);
}

TEST_CASE("multiplication matrix convolves coefficients") {
  const FreqWindow w(1, 20, 0);
  const TrigPoly p = TrigPoly::cosine({2}, 1.0) + TrigPoly::exponential({-1}, cplx(0, 0.5));
  const TrigPoly q = TrigPoly::sine({3}, 2.0) + TrigPoly::constant(1, 1.0);
  std::vector<cplx> qc(w.size());
  for (const auto& [k, c] : q.coeffs()) qc[w.index(k)] = c;
  const OperatorMatrix P = multiplication_matrix(p, w);
  CHECK(P.band() == 2);
  const StateVector out = apply(P, StateVector(w, qc));
  const TrigPoly pq = product(p, q);
  for (std::size_t i = 0; i < w.size(); ++i) CHECK(std::abs(out[i] - pq.coeff(w.freq(i))) < 1e-15);
  CHECK_THROWS_AS(multiplication_matrix(TrigPoly::cosine({30}, 1.0), w), InvalidArgument);
}

TEST_CASE("sparse algebra matches dense algebra") {
  const FreqWindow w(1, 12, 0);
  const OperatorMatrix a = multiplication_matrix(TrigPoly::cosine({1}, 1.0) + TrigPoly::sine({2}, 0.3), w);
  const OperatorMatrix b = translation_koopman(FrequencyVector({fx::golden}), w);
  const Eigen::MatrixXcd da = dense(a), db = dense(b);
  CHECK((dense(a * b) - da * db).norm() < 1e-14);
  CHECK((dense(a + b) - (da + db)).norm() < 1e-14);
  CHECK((dense(commutator(a, b)) - (da * db - db * da)).norm() < 1e-14);
  CHECK((dense(adjoint(a)) - da.adjoint()).norm() == 0.0);
  CHECK((dense(adjoint(adjoint(b))) - db).norm() == 0.0);
  CHECK(norm_estimate(OperatorMatrix::identity(w)).op_norm == doctest::Approx(1.0));
}

TEST_CASE("skew Koopman entries are Bessel coefficients") {
  // U e_k = sum_n J_n(0.5) e^{2 pi i k y} e_{k + 1 + n}
  const FreqWindow w(1, 32, 0);
  const OperatorMatrix U = assemble_koopman(fx::anzai(0.5), w, 1e-14);
  const double J[] = {frozen::kBesselHalf0, frozen::kBesselHalf1, frozen::kBesselHalf2, frozen::kBesselHalf3,
                      frozen::kBesselHalf4};
  for (int k : {-5, 0, 3}) {
    const double t = k * fx::golden;
    const cplx rot(std::cos(fx::two_pi * t), std::sin(fx::two_pi * t));
    for (int n = -4; n <= 4; ++n) {
      const double jn = (n < 0 && (-n) % 2) ? -J[-n] : J[std::abs(n)];
      CHECK(std::abs(U.entry(w.index({k + 1 + n}), w.index({k})) - jn * rot) < 1e-14);
    }
  }
  CHECK(U.residual_bound <= 1e-13);
  // interior columns are unit vectors up to the truncation
  const Eigen::MatrixXcd D = dense(U);
  for (int k = -16; k <= 16; ++k) CHECK(std::abs(D.col(w.index({k})).norm() - 1.0) < 1e-13);
}

TEST_CASE("fast application equals the sparse product (property)") {
  std::mt19937_64 rng(9);
  const FreqWindow w(1, 40, 0);
  const OperatorMatrix U = assemble_koopman(fx::anzai(0.8), w, 1e-14);
  REQUIRE(U.factorization.has_value());
  for (int t = 0; t < 5; ++t) {
    const StateVector v = StateVector::random_unit(w, 40, rng);
    const StateVector a = apply(U, v, false), b = apply(U, v, true);
    CHECK((a - b).norm() < 1e-14);
  }
  const FreqWindow w2(1, 30, 0);
  const OperatorMatrix F = assemble_koopman(FurstenbergLevel{fx::furstenberg2(0.7), 2, 1}, w2, 1e-14);
  const StateVector v = StateVector::random_unit(w2, 30, rng);
  CHECK((apply(F, v, false) - apply(F, v, true)).norm() < 1e-14);
}

TEST_CASE("furstenberg level-3 Koopman is unitary on the interior") {
  // columns with |k| <= 4 reach about 25 (k2 shift + phase degrees); the global band is larger
  const FreqWindow w(2, 32, 0);
  const OperatorMatrix U = assemble_koopman(FurstenbergLevel{fx::furstenberg3(), 3, 1}, w, 1e-14);
  std::mt19937_64 rng(4);
  for (int t = 0; t < 5; ++t) {
    const StateVector v = StateVector::random_unit(w, 4, rng);
    CHECK(apply(U, v).norm() == doctest::Approx(1.0).epsilon(1e-13));
  }
  CHECK_THROWS_AS(furstenberg_base_koopman(fx::furstenberg3(), 3, FreqWindow(3, 2, 0), 1e-14), InvalidArgument);
}

TEST_CASE("conjugate operators") {
  const FreqWindow w(1, 8, 0);
  const OperatorMatrix A = conjugate_diagonal(fx::anzai(0.5), w);
  CHECK(A.is_diagonal());
  const double c = fx::golden;
  CHECK(std::abs(A.entry(w.index({3}), w.index({3})) - fx::two_pi * fx::two_pi * c * 3 * fx::golden) < 1e-12);
  SkewProductSpec deg = fx::anzai(0.5);
  deg.m = {0};
  deg.allow_degenerate = true;
  CHECK_THROWS_AS(conjugate_diagonal(deg, w), DegenerateSpec);
  const OperatorMatrix B = conjugate_diagonal(FurstenbergLevel{fx::furstenberg2(0.5), 2, 2}, w);
  CHECK(B.entry(w.index({4}), w.index({4})) == cplx(2.0, 0));
}

TEST_CASE("averaged conjugate operator and its margin precondition") {
  const FreqWindow small(1, 32, 4);
  const OperatorMatrix U = assemble_koopman(fx::anzai(0.5), small, 1e-14);
  const OperatorMatrix A = conjugate_diagonal(fx::anzai(0.5), small);
  CHECK_THROWS_WITH_AS(average_conjugate(A, U, 8), doctest::Contains("n*band(U)"), InvalidArgument);
  const FreqWindow w(1, 24, 0);
  const OperatorMatrix U1 = translation_koopman(FrequencyVector({fx::golden}), w);
  const OperatorMatrix A1 = OperatorMatrix::diagonal(w, std::vector<cplx>(w.size(), 2.0));
  // translations commute with diagonals: the average is A itself
  const OperatorMatrix An = average_conjugate(A1, U1, 5);
  CHECK((dense(An) - dense(A1)).norm() < 1e-14);
}
