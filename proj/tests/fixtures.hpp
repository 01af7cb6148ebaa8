#pragma once

#include <cmath>
#include <numbers>

#include "mourrekit/mourre.hpp"

namespace fx {

inline const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

// x -> x + y, z -> z + x + (eps / 2 pi) sin 2 pi x on T^1 x T^1, character m = 1
inline mk::SkewProductSpec anzai(double eps, double y = golden) {
  mk::SkewProductSpec s;
  s.d = 1;
  s.dprime = 1;
  s.y = mk::FrequencyVector({y});
  s.N = {{1}};
  s.m = {1};
  s.eta = {eps == 0.0 ? mk::TrigPoly(1) : mk::TrigPoly::sine({1}, eps / two_pi)};
  return s;
}

// d = 2, b21 = 1, h1 = (eps / 2 pi) sin 2 pi x1
inline mk::FurstenbergSpec furstenberg2(double eps) {
  mk::FurstenbergSpec f;
  f.d = 2;
  f.y = golden;
  f.b = {{0, 0}, {1, 0}};
  f.h = {mk::TrigPoly::sine({1}, eps / two_pi)};
  return f;
}

// d = 3, b21 = b32 = 1, harmonic h1 and h2
inline mk::FurstenbergSpec furstenberg3() {
  mk::FurstenbergSpec f;
  f.d = 3;
  f.y = golden;
  f.b = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
  f.h = {mk::TrigPoly::sine({1}, 0.3 / two_pi), mk::TrigPoly::sine({0, 1}, 0.4 / two_pi)};
  return f;
}

// y = (1, golden), y2 = (0, 1), f = exp(0.2 cos 2 pi x2)
inline mk::TimeChangeSpec torus_time_change() {
  const mk::TrigPoly f = mk::exp_real(mk::TrigPoly::cosine({0, 1}, 0.2), 1e-14).poly;
  return mk::make_time_change(mk::FrequencyVector({1.0, golden}), f, {0.0, 1.0});
}

}  // namespace fx
