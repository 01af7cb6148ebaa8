#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "mourrekit/ergodic.hpp"
#include "mourrekit/opcalc.hpp"
#include "mourrekit/torusdyn.hpp"
#include "mourrekit/trigfun.hpp"

namespace mk {

using MourreSystem = std::variant<SkewProductSpec, FurstenbergLevel>;

std::string describe(const MourreSystem& system);

// (2 pi)^2 (m.Ny) [(m.Ny) + y.grad(m.eta)]
TrigPoly g_skew(const SkewProductSpec& spec);
// 1 + d_{j-1} h_{j-1} / b_{j,j-1} on T^{j-1}
TrigPoly g_furstenberg(const FurstenbergSpec& spec, int j);
// 1/2 - (1/2) L_{y2} ln f
Truncated g_timechange(const TimeChangeSpec& spec, double tol);

struct CertifyOptions {
  long n_max = 16384;
  int resolution = 0;  // per axis; 0 picks 4096 (d=1), 512 (d=2), 64 (d=3)
  // n counts as certified when its certified infimum exceeds this fraction of the limit.
  double min_fraction = 0.5;
  double conjugate_scale = 1.0;
};

enum class CertStatus { certified, failed, degenerate };
const char* status_name(CertStatus s);

struct CertRow {
  long n = 0;
  double certified_infimum = 0.0;
  double grid_min = 0.0;
  double gap = 0.0;
  double deviation = 0.0;  // bound for translation bases, grid sup otherwise
};

struct Residual {
  double value = 0.0;
  double tolerance = 0.0;
  bool ok() const { return value <= tolerance; }
};

struct MourreCertificate {
  std::string descriptor;
  long n_star = 0;
  double a = 0.0;
  double limit = 0.0;
  double min_fraction = 0.0;
  AverageCurve deviation_curve;
  std::vector<CertRow> table;
  std::map<std::string, Residual> residuals;
  CertStatus status = CertStatus::failed;
  std::string message;

  // Downgrades a certified status when a recorded residual exceeds its tolerance.
  void add_residual(const std::string& name, Residual r);
  std::string to_text() const;
};

MourreCertificate certify(const MourreSystem& system, const CertifyOptions& opt = {});

struct CommutatorCheck {
  double residual = 0.0;
  double contract = 0.0;
  int band = 0;
};

// max over seeded interior unit vectors of |([A_n, U] - g_n U) v|.
CommutatorCheck commutator_residual(const MourreSystem& system, const FreqWindow& window, int n, int trials,
                                    std::uint64_t seed = 2024, double phase_tol = 1e-14,
                                    double conjugate_scale = 1.0);

// |U*[A,U] - int_0^1 e^{isH}[iH,A]e^{-isH} ds| with Gauss-Legendre in s.
double bridge_check(int dim, int quad_order, std::uint64_t seed);
double bridge_check(const Eigen::MatrixXcd& H, const Eigen::MatrixXcd& A, int quad_order);

struct ConjugateField {
  std::vector<GridFunction> field;  // one component per axis
  GridFunction divergence;
  GridFunction expected;
  double divergence_residual = 0.0;
};

// X = y2 + 2 g~_L f y sampled on the grid; div X by spectral differentiation.
ConjugateField conjugate_field(const TimeChangeSpec& spec, double L, const TorusGrid& grid, double tol);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// Minimal eigenvalue of P_J (H^2 G + 2 H G H + G H^2) P_J - 2 inf(J) inf(g) P_J on
// interior frequencies with h_k^2 in J. h is indexed like the window.
double quadratic_form_diagnostic(const std::vector<double>& h, const TrigPoly& g, const FreqWindow& window,
                                 Interval J);

}  // namespace mk
