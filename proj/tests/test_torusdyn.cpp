#include <doctest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "mourrekit/errors.hpp"
#include "mourrekit/torusdyn.hpp"

using namespace mk;

TEST_CASE("torus points reduce mod 1") {
  const TorusPoint p({1.25, -0.25});
  CHECK(p[0] == 0.25);
  CHECK(p[1] == 0.75);
  CHECK(circular_distance(0.95, 0.05) == doctest::Approx(0.1));
  CHECK(torus_distance(TorusPoint({0.0, 0.5}), TorusPoint({0.99, 0.5})) == doctest::Approx(0.01));
}

TEST_CASE("frequency vectors record rational relations without rejecting") {
  const FrequencyVector a({0.5});
  CHECK(a.rational_relation_detected());
  CHECK(a.diophantine_note().find("1/2") != std::string::npos);
  const FrequencyVector g({fx::golden, std::sqrt(2.0) - 1.0});
  CHECK_FALSE(g.rational_relation_detected());
  const FrequencyVector r({fx::golden, 2.0 * fx::golden});
  CHECK(r.rational_relation_detected());
  CHECK_THROWS_AS(FrequencyVector({}), InvalidArgument);
}

TEST_CASE("skew product validation and degeneracy") {
  SkewProductSpec s = fx::anzai(0.5);
  CHECK_NOTHROW(s.validate());
  CHECK(s.shift() == std::vector<int>{1});
  CHECK(s.char_speed() == doctest::Approx(fx::golden));
  s.m = {0};
  CHECK(s.degenerate());
  CHECK_THROWS_AS(s.validate(), DegenerateSpec);
  s.allow_degenerate = true;
  CHECK_NOTHROW(s.validate());
  SkewProductSpec bad = fx::anzai(0.5);
  bad.eta = {TrigPoly::exponential({1})};
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
}

TEST_CASE("skew map and cocycle phase sum") {
  const SkewProductSpec s = fx::anzai(0.5);
  const TorusPoint x({0.2}), z({0.7});
  const auto [x1, z1] = skew_apply(s, x, z);
  CHECK(x1[0] == doctest::Approx(reduce_mod1(0.2 + fx::golden)));
  const double eta = 0.5 / fx::two_pi * std::sin(fx::two_pi * 0.2);
  CHECK(circular_distance(z1[0], reduce_mod1(0.7 + 0.2 + eta)) < 1e-15);
  // naive sum of the lift
  double naive = 0.0;
  for (int l = 0; l < 50; ++l) {
    const double xl = 0.2 + l * fx::golden;
    naive += xl + 0.5 / fx::two_pi * std::sin(fx::two_pi * xl);
  }
  const double fast = cocycle_phase_sum(s, x, 50);
  CHECK(circular_distance(reduce_mod1(fast), reduce_mod1(naive)) < 1e-11);
}

TEST_CASE("furstenberg maps invert (property)") {
  const FurstenbergSpec f = fx::furstenberg3();
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 100; ++t) {
    const TorusPoint p({u(rng), u(rng), u(rng)});
    const TorusPoint q = furstenberg_apply(f, furstenberg_apply(f, p, Direction::forward), Direction::inverse);
    CHECK(torus_distance(p, q) < 1e-13);
  }
  const TorusPoint p({0.1, 0.2, 0.3});
  const TorusPoint q = furstenberg_apply(f, p, Direction::forward);
  CHECK(q[0] == doctest::Approx(reduce_mod1(0.1 + fx::golden)));
  const double x2 = 0.2 + 0.1 + 0.3 / fx::two_pi * std::sin(fx::two_pi * 0.1);
  CHECK(circular_distance(q[1], reduce_mod1(x2)) < 1e-14);
  FurstenbergSpec bad = f;
  bad.b[2][1] = 0;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
}

TEST_CASE("time change setup certifies positivity") {
  CHECK_THROWS_AS(make_time_change(FrequencyVector({1.0}), TrigPoly::constant(1, 1.0) + TrigPoly::cosine({1}, 1.2), {0.0}),
                  DomainError);
  const TimeChangeSpec tc = fx::torus_time_change();
  CHECK(tc.f_inf > 0.8);
  CHECK(tc.f_inf <= std::exp(-0.2));
}

TEST_CASE("unit time change is the translation flow") {
  const TimeChangeSpec tc = make_time_change(FrequencyVector({1.0, fx::golden}), TrigPoly::constant(2, 1.0), {0.0, 1.0});
  const TorusPoint p({0.3, 0.4});
  for (double t : {0.0, 1.5, -2.25, 10.0}) {
    const ClockSolution c = time_change_parameter(tc, p, t, 1e-12);
    CHECK(c.h == doctest::Approx(t).epsilon(1e-12));
    CHECK(torus_distance(time_change_map(tc, p, t, 1e-12), translate_flow(tc.y, p, t)) < 1e-12);
  }
}

TEST_CASE("time change flow property (property)") {
  const TimeChangeSpec tc =
      make_time_change(FrequencyVector({1.0}), TrigPoly::constant(1, 1.0) + TrigPoly::cosine({1}, 0.3), {0.0});
  const double tol = 1e-10;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int k = 0; k < 20; ++k) {
    const double s = u(rng), t = u(rng);
    const TorusPoint p({u(rng) / 10.0});
    const TorusPoint a = time_change_map(tc, p, s + t, tol);
    const TorusPoint b = time_change_map(tc, time_change_map(tc, p, s, tol), t, tol);
    CHECK(torus_distance(a, b) <= 10 * tol);
  }
  // the clock integrates 1/f exactly over one period: int_0^1 dx / (1 + 0.3 cos) = 1/sqrt(1 - 0.09)
  const LineEvaluator f(tc.f, std::vector<double>{0.0}, std::vector<double>{1.0});
  CHECK(integrate_inverse(f, 0.0, 1.0, 1e-13) == doctest::Approx(1.0 / std::sqrt(0.91)).epsilon(1e-13));
}
