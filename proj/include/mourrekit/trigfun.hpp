#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "mourrekit/torus_point.hpp"

namespace mk {

using cplx = std::complex<double>;
using Freq = std::vector<int>;

// Finite Fourier series sum_k c_k exp(2 pi i k.x) on T^d.
// Coefficients with |c| <= 1e-300 are dropped on construction; the real flag
// is set iff c_{-k} == conj(c_k) holds exactly for every stored k.
class TrigPoly {
 public:
  using CoeffMap = std::map<Freq, cplx>;

  TrigPoly() : TrigPoly(1) {}
  explicit TrigPoly(int d);
  TrigPoly(int d, CoeffMap coeffs);

  static TrigPoly constant(int d, double c);
  // amp cos(2 pi k.x) and amp sin(2 pi k.x)
  static TrigPoly cosine(const Freq& k, double amp);
  static TrigPoly sine(const Freq& k, double amp);
  // c exp(2 pi i k.x)
  static TrigPoly exponential(const Freq& k, cplx c = 1.0);

  int dim() const { return d_; }
  int degree() const { return degree_; }
  bool is_real() const { return real_; }
  bool is_zero() const { return coeffs_.empty(); }
  std::size_t size() const { return coeffs_.size(); }
  const CoeffMap& coeffs() const { return coeffs_; }
  cplx coeff(const Freq& k) const;
  cplx mean() const;

  double l1_norm() const;
  double l1_nonconstant() const;
  // 2 pi sum |k|_2 |c_k|
  double lipschitz_bound() const;

  TrigPoly operator-() const;
  TrigPoly& operator+=(const TrigPoly& o);
  TrigPoly& operator-=(const TrigPoly& o);
  TrigPoly& operator*=(cplx s);

  friend bool operator==(const TrigPoly& a, const TrigPoly& b) {
    return a.d_ == b.d_ && a.coeffs_ == b.coeffs_;
  }

 private:
  void finalize();

  int d_ = 1;
  CoeffMap coeffs_;
  int degree_ = 0;
  bool real_ = true;
};

TrigPoly operator+(TrigPoly a, const TrigPoly& b);
TrigPoly operator-(TrigPoly a, const TrigPoly& b);
TrigPoly operator*(TrigPoly a, cplx s);
TrigPoly operator*(cplx s, TrigPoly a);

cplx evaluate(const TrigPoly& f, std::span<const double> x);
cplx evaluate(const TrigPoly& f, const TorusPoint& x);
// Points stored row-major, d doubles each.
std::vector<cplx> evaluate_many(const TrigPoly& f, std::span<const double> points);

TrigPoly lie_derivative(const TrigPoly& f, std::span<const double> v);
TrigPoly product(const TrigPoly& f, const TrigPoly& g);
// c_k -> c_k exp(2 pi i k.v), i.e. x -> f(x + v)
TrigPoly translate_pullback(const TrigPoly& f, std::span<const double> v);
// (c_k + conj(c_{-k})) / 2, exactly Hermitian.
TrigPoly real_part(const TrigPoly& f);
TrigPoly conjugate(const TrigPoly& f);

// Exact sine of pi x: zero at integers, sign-exact under x -> -x.
double sin_pi(double x);

struct Truncated {
  TrigPoly poly;
  double residual_bound = 0.0;
};

Truncated unit_phase(const TrigPoly& f, double tol);
Truncated log_positive(const TrigPoly& f, double tol);
Truncated exp_real(const TrigPoly& f, double tol);

struct Infimum {
  double lower_bound = 0.0;
  double grid_min = 0.0;
  double gap = 0.0;
  TorusPoint argmin;
};

Infimum certified_infimum(const TrigPoly& f, int resolution);
// Same bound with a caller-supplied Lipschitz constant.
Infimum certified_infimum(const TrigPoly& f, int resolution, double lipschitz);

std::string to_text(const TrigPoly& f);
TrigPoly trigpoly_from_text(const std::string& text);

// Uniform grid j / res on every axis; index row-major, last axis fastest.
class TorusGrid {
 public:
  TorusGrid(int d, int res);

  int dim() const { return d_; }
  int resolution() const { return res_; }
  std::size_t size() const { return size_; }
  TorusPoint point(std::size_t idx) const;
  void point(std::size_t idx, double* out) const;
  std::vector<int> dims() const { return std::vector<int>(static_cast<std::size_t>(d_), res_); }
  // All grid points, row-major d doubles per point.
  std::vector<double> points() const;

 private:
  int d_;
  int res_;
  std::size_t size_;
};

struct GridFunction {
  TorusGrid grid;
  std::vector<cplx> samples;

  double sup_abs() const;
  double max_imag() const;
};

// Exact samples via FFT for any resolution.
GridFunction sample(const TrigPoly& f, const TorusGrid& grid);
// Fourier coefficients of alias-free samples; the Nyquist bin is discarded.
TrigPoly to_trigpoly(const GridFunction& g, double drop_below = 0.0);
// Spectral derivative along v of sampled data.
GridFunction spectral_derivative(const GridFunction& g, std::span<const double> v);

}  // namespace mk
