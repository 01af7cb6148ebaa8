#pragma once

#include <string>
#include <vector>

#include "mourrekit/opcalc.hpp"
#include "mourrekit/torusdyn.hpp"
#include "mourrekit/trigfun.hpp"

namespace mk {

// c_k = <phi, U^k phi> for k = 0..N.
struct CorrelationSequence {
  std::vector<cplx> values;
  double c0 = 0.0;
  std::string source;  // "matrix" or "quadrature"
  double budget = 0.0;  // bound on |c_k - exact| for every k

  std::string to_csv() const;
};

// Iterates U on phi. Without accept_leakage the window must hold the whole
// evolution: support(phi) + N band(U) <= M.
CorrelationSequence correlations_matrix(const OperatorMatrix& U, const StateVector& phi, long N,
                                        bool accept_leakage = false);

// Grid resolution per axis that keeps the phase sum of step N alias free.
int quadrature_resolution(const SkewProductSpec& spec, long N);

// c_k = int exp(2 pi i S_k(x)) dx for phi = 1, S_k the cocycle phase sum.
CorrelationSequence correlations_quadrature(const SkewProductSpec& spec, long N, const TorusGrid& grid);

// W_n = (1/n) sum_{k=1}^n |c_k|^2, entry n-1 holds W_n.
std::vector<double> wiener_statistic(const CorrelationSequence& c);

enum class Kernel { fejer, hann };
const char* kernel_name(Kernel k);
Kernel kernel_from_name(const std::string& name);

// Smoothed density of the spectral measure against d(theta)/2pi on a uniform
// grid of the circle, at least 2N samples; its mean is c_0.
struct Density {
  std::vector<double> angle;
  std::vector<double> value;

  std::string to_csv() const;
};
Density spectral_density(const CorrelationSequence& c, Kernel kernel);

struct Thresholds {
  double point = 0.05;
  double flatness = 0.2;
};

struct SpectralReport {
  std::vector<double> wiener;
  Density density;
  bool point_detected = false;
  double continuous_indicator = 0.0;
  double lebesgue_flatness = 0.0;
  bool lebesgue_like = false;
  Thresholds thresholds;

  std::string to_text() const;
};

// Indicators only: finite correlation data cannot prove a spectral type.
SpectralReport classify(const CorrelationSequence& c, const Thresholds& t = {});

}  // namespace mk
