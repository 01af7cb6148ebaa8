#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "frozen_values.hpp"
#include "mourrekit/errors.hpp"
#include "mourrekit/ergodic.hpp"

using namespace mk;

namespace {

const InverseMap rotate_back = [](double* x) {
  x[0] -= fx::golden;
  x[0] -= std::floor(x[0]);
};

const PointFunction eval_of(const TrigPoly& g) {
  return [g](std::span<const double> x) { return evaluate(g, x).real(); };
}

}  // namespace

TEST_CASE("closed form Birkhoff average equals the orbit sum") {
  const TrigPoly g = TrigPoly::cosine({1}, 1.0) + TrigPoly::sine({3}, 0.25) + TrigPoly::constant(1, 2.0);
  const FrequencyVector y({fx::golden});
  const TorusGrid grid(1, 64);
  for (long n : {1L, 7L, 100L}) {
    const GridFunction ex = sample(birkhoff_exact(g, y, n), grid);
    const GridFunction br = birkhoff_map(eval_of(g), rotate_back, grid, n);
    for (std::size_t i = 0; i < grid.size(); ++i) CHECK(std::abs(ex.samples[i] - br.samples[i]) < 1e-12);
  }
  CHECK(birkhoff_exact(g, y, 5).mean() == g.mean());
  CHECK(birkhoff_exact(g, y, 5).is_real());
}

TEST_CASE("deviation curve of cos matches the closed form") {
  const long ns[] = {10, 100, 1000};
  const AverageCurve c = deviation_curve(TrigPoly::cosine({1}, 1.0), FrequencyVector({fx::golden}), ns);
  CHECK(std::abs(c.sup_deviation[0] - frozen::kCosDeviation10) < 1e-12);
  CHECK(std::abs(c.sup_deviation[1] - frozen::kCosDeviation100) < 1e-12);
  CHECK(std::abs(c.sup_deviation[2] - frozen::kCosDeviation1000) < 1e-12);
  CHECK(c.limit_value == 0.0);
  CHECK(c.to_csv().rfind("n,sup_deviation,limit_value\n", 0) == 0);
}

TEST_CASE("resonant frequencies are refused") {
  const TrigPoly g = TrigPoly::cosine({2}, 1.0);
  CHECK_THROWS_AS(birkhoff_exact(g, FrequencyVector({0.5}), 4), ResonanceError);
  CHECK_THROWS_AS(birkhoff_exact(g, FrequencyVector({fx::golden}), 0), InvalidArgument);
}

TEST_CASE("flow average without time change is the line average") {
  const TimeChangeSpec tc = make_time_change(FrequencyVector({1.0}), TrigPoly::constant(1, 1.0), {0.0});
  const TrigPoly g = TrigPoly::cosine({1}, 1.0);
  const TorusGrid grid(1, 8);
  for (double L : {0.3, 2.7, 50.0}) {
    const GridFunction gl = flow_average_gL(g, tc, L, grid, 1e-10);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double x = grid.point(i)[0];
      // (1/L) int_0^L cos(2 pi (x - t)) dt
      const double want = (std::sin(fx::two_pi * x) - std::sin(fx::two_pi * (x - L))) / (fx::two_pi * L);
      CHECK(std::abs(gl.samples[i].real() - want) < 1e-10);
    }
  }
}

TEST_CASE("time averages converge to one half on the torus testbed") {
  const TimeChangeSpec tc = fx::torus_time_change();
  const TrigPoly g = TrigPoly::constant(2, 0.5) + TrigPoly::sine({0, 1}, 0.2 * std::numbers::pi);
  const TorusGrid grid(2, 4);
  double prev = 1e9;
  for (double L : {10.0, 100.0, 1000.0}) {
    const GridFunction gl = flow_average_gL(g, tc, L, grid, 1e-8);
    double dev = 0.0;
    for (const auto& v : gl.samples) dev = std::max(dev, std::abs(v.real() - 0.5));
    CHECK(dev < prev);
    prev = dev;
  }
  CHECK(prev <= 0.02);
}

TEST_CASE("double average satisfies the flow identity") {
  const TimeChangeSpec tc = fx::torus_time_change();
  const TrigPoly g = TrigPoly::constant(2, 0.5) + TrigPoly::sine({0, 1}, 0.2 * std::numbers::pi);
  const TorusGrid grid(2, 4);
  const double tol = 1e-6;
  const DoubleAverage da = double_average_gtilde(g, tc, 20.0, grid, tol);
  const GridFunction gs = sample(g, grid);
  for (std::size_t i = 0; i < grid.size(); ++i)
    CHECK(std::abs(da.flow_derivative.samples[i].real() - (gs.samples[i].real() - da.g_L.samples[i].real())) <=
          10 * tol);
}

TEST_CASE("time-changed Birkhoff average weights by 1/f") {
  const TimeChangeSpec tc =
      make_time_change(FrequencyVector({1.0}), TrigPoly::constant(1, 1.0) + TrigPoly::cosine({1}, 0.3), {0.0});
  const double avg = flow_birkhoff_average(TrigPoly::cosine({1}, 1.0), tc, TorusPoint({0.1}), 1e4, 1e-10);
  CHECK(std::abs(avg - frozen::kTimeChangeCosMean) < 1e-3);
  // the error is O(1/T) for a periodic orbit
  CHECK(std::abs(avg - frozen::kTimeChangeCosMean) < 1e-4);
}
