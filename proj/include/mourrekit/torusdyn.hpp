#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mourrekit/torus_point.hpp"
#include "mourrekit/trigfun.hpp"

namespace mk {

// Translation velocity. Rational relations among the coordinates (and between
// each coordinate and 1) are searched by continued fractions and recorded in
// the note; they are never rejected.
class FrequencyVector {
 public:
  explicit FrequencyVector(std::vector<double> y, std::string note = {});

  int dim() const { return static_cast<int>(y_.size()); }
  double operator[](int i) const { return y_[static_cast<std::size_t>(i)]; }
  std::span<const double> values() const { return y_; }
  bool rational_relation_detected() const { return rational_; }
  const std::string& diophantine_note() const { return note_; }

 private:
  std::vector<double> y_;
  std::string note_;
  bool rational_ = false;
};

// Best rational approximation p/q with q <= max_q when |x - p/q| < tol.
bool looks_rational(double x, double tol, long max_q, long& p, long& q);

struct SkewProductSpec {
  int d = 1;
  int dprime = 1;
  FrequencyVector y{{0.0}};
  std::vector<std::vector<int>> N;  // dprime rows, d columns
  std::vector<TrigPoly> eta;        // dprime real polynomials on T^d
  std::vector<int> m;               // character index, dim dprime
  bool allow_degenerate = false;

  void validate() const;
  std::vector<int> shift() const;  // N^T m
  bool degenerate() const;
  double char_speed() const;       // m . N y
  TrigPoly cocycle_phase() const;  // m . eta
};

struct FurstenbergSpec {
  int d = 2;
  double y = 0.0;
  std::vector<std::vector<int>> b;  // b[j-1][k-1] for j > k, 1-based indices
  std::vector<TrigPoly> h;          // h[i] is h_{i+1} on T^{i+1}

  void validate() const;
  int coeff(int j, int k) const { return b[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(k - 1)]; }
  const TrigPoly& h_of(int j) const { return h[static_cast<std::size_t>(j - 1)]; }
};

struct TimeChangeSpec {
  FrequencyVector y{{1.0}};
  TrigPoly f;
  std::vector<double> y2;
  double f_inf = 0.0;  // certified lower bound
  double f_sup = 0.0;  // coefficient bound

  int dim() const { return y.dim(); }
};

// Validates dimensions and certifies inf f > 0 (DomainError otherwise).
TimeChangeSpec make_time_change(FrequencyVector y, TrigPoly f, std::vector<double> y2);

enum class Direction { forward, inverse };

TorusPoint translate_flow(const FrequencyVector& y, const TorusPoint& x, double t);
std::pair<TorusPoint, TorusPoint> skew_apply(const SkewProductSpec& spec, const TorusPoint& x,
                                             const TorusPoint& z);
TorusPoint furstenberg_apply(const FurstenbergSpec& spec, const TorusPoint& x, Direction dir);
// In-place on the first `dim` coordinates of x, using the top-left block of the
// spec (dim 1 is the base rotation). Coordinates are reduced mod 1.
void furstenberg_apply_block(const FurstenbergSpec& spec, int dim, double* x, Direction dir);
// Unreduced lift sum over l < n of m.(N x_l + eta(x_l)), x_l = x + l y.
double cocycle_phase_sum(const SkewProductSpec& spec, const TorusPoint& x, long n);

// Real part of f(p + s v) for many s.
class LineEvaluator {
 public:
  LineEvaluator(const TrigPoly& f, std::span<const double> p, std::span<const double> v);

  void eval(std::span<const double> s, std::span<double> out) const;
  double eval(double s) const;

 private:
  double c0_ = 0.0;
  std::vector<cplx> c_;
  std::vector<double> omega_;
  std::vector<double> phase0_;
};

struct ClockSolution {
  double h = 0.0;         // orbit parameter
  double residual = 0.0;  // |int_0^h ds/f - t|
  int iterations = 0;
};

// h(p, t): int_0^h ds / f(p + s y) = t.
ClockSolution time_change_parameter(const TimeChangeSpec& spec, const TorusPoint& p, double t,
                                    double tol);
TorusPoint time_change_map(const TimeChangeSpec& spec, const TorusPoint& p, double t, double tol);

// Composite 16-point Gauss-Legendre integral of 1/f along a line, halving the
// panel width until two successive estimates agree to tol/10.
double integrate_inverse(const LineEvaluator& f, double a, double b, double tol);

}  // namespace mk
