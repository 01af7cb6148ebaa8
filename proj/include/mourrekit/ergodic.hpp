#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mourrekit/torusdyn.hpp"
#include "mourrekit/trigfun.hpp"

namespace mk {

struct AverageCurve {
  std::vector<double> n_values;
  std::vector<double> sup_deviation;
  double limit_value = 0.0;

  void check() const;
  std::string to_csv() const;
};

// g_n = (1/n) sum_{l<n} g(x - l y), coefficientwise.
TrigPoly birkhoff_exact(const TrigPoly& g, const FrequencyVector& y, long n);

using PointFunction = std::function<double(std::span<const double>)>;
using InverseMap = std::function<void(double* x)>;

// (1/n) sum_{l<n} g(T^{-l} x) on every grid point, T^{-1} applied in place.
GridFunction birkhoff_map(const PointFunction& g, const InverseMap& inverse, const TorusGrid& grid, long n);

// Upper bound on sup |g_n - c_0| for each n, exact for a single harmonic pair.
AverageCurve deviation_curve(const TrigPoly& g, const FrequencyVector& y, std::span<const long> n_list);

// Averages of g along the backward time-changed flow from p:
// g_L = (1/L) int_0^L g(F_{-t} p) dt and g~_L = (1/L) int_0^L (L - t) g(F_{-t} p) dt.
struct TimeAverage {
  double g_L = 0.0;
  double g_tilde = 0.0;
  double orbit_length = 0.0;
  double panel_width = 0.0;
};

// g and f must be real polynomials; they are evaluated along orbit lines.
TimeAverage time_averages_at(const TrigPoly& g, const TimeChangeSpec& spec, const TorusPoint& p, double L,
                             double tol);

// (1/T) int_0^T phi(F_t p) dt along the forward time-changed flow.
double flow_birkhoff_average(const TrigPoly& phi, const TimeChangeSpec& spec, const TorusPoint& p, double T,
                             double tol);

GridFunction flow_average_gL(const TrigPoly& g, const TimeChangeSpec& spec, double L, const TorusGrid& grid,
                             double tol);

struct DoubleAverage {
  GridFunction g_tilde;
  GridFunction g_L;
  // d/dt g~_L(F_t p) at t = 0 by a 4-point central difference along the flow.
  GridFunction flow_derivative;
};

DoubleAverage double_average_gtilde(const TrigPoly& g, const TimeChangeSpec& spec, double L,
                                    const TorusGrid& grid, double tol);

}  // namespace mk
