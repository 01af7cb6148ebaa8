#include "mourrekit/trigfun.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "mourrekit/errors.hpp"
#include "mourrekit/fft.hpp"
#include "mourrekit/simd/kernels.hpp"

namespace mk {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double two_pi = 2.0 * std::numbers::pi;
constexpr double drop_threshold = 1e-300;
constexpr std::size_t max_samples = std::size_t{1} << 22;

Freq negate(const Freq& k) {
  Freq m(k.size());
  for (std::size_t i = 0; i < k.size(); ++i) m[i] = -k[i];
  return m;
}

int linf(const Freq& k) {
  int m = 0;
  for (int v : k) m = std::max(m, std::abs(v));
  return m;
}

int l1(const Freq& k) {
  int m = 0;
  for (int v : k) m += std::abs(v);
  return m;
}

double dot(const Freq& k, std::span<const double> v) {
  double s = 0.0;
  for (std::size_t i = 0; i < k.size(); ++i) s += k[i] * v[i];
  return s;
}

bool is_zero_freq(const Freq& k) {
  return std::all_of(k.begin(), k.end(), [](int v) { return v == 0; });
}

void check_dim(const TrigPoly& f, std::size_t n, const char* what) {
  if (static_cast<std::size_t>(f.dim()) != n)
    throw InvalidArgument(std::string(what) + ": dimension mismatch");
}

std::size_t int_pow(std::size_t base, int e) {
  std::size_t r = 1;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

}  // namespace

// ---------------------------------------------------------------- TorusPoint

double reduce_mod1(double x) {
  double r = x - std::floor(x);
  if (r >= 1.0) r = 0.0;
  return r;
}

double circular_distance(double a, double b) {
  const double t = std::abs(reduce_mod1(a) - reduce_mod1(b));
  return std::min(t, 1.0 - t);
}

TorusPoint::TorusPoint(std::vector<double> coords) : c_(std::move(coords)) {
  if (c_.empty()) throw InvalidArgument("torus point needs at least one coordinate");
  for (double& v : c_) {
    if (!std::isfinite(v)) throw InvalidArgument("torus point coordinate is not finite");
    v = reduce_mod1(v);
  }
}

TorusPoint TorusPoint::origin(int d) { return TorusPoint(std::vector<double>(static_cast<std::size_t>(d), 0.0)); }

double torus_distance(const TorusPoint& a, const TorusPoint& b) {
  if (a.dim() != b.dim()) throw InvalidArgument("torus_distance: dimension mismatch");
  double m = 0.0;
  for (int i = 0; i < a.dim(); ++i) m = std::max(m, circular_distance(a[i], b[i]));
  return m;
}

// ---------------------------------------------------------------- TrigPoly

TrigPoly::TrigPoly(int d) : d_(d) {
  if (d < 1) throw InvalidArgument("TrigPoly dimension must be positive");
}

TrigPoly::TrigPoly(int d, CoeffMap coeffs) : d_(d), coeffs_(std::move(coeffs)) {
  if (d < 1) throw InvalidArgument("TrigPoly dimension must be positive");
  for (const auto& [k, c] : coeffs_) {
    if (static_cast<int>(k.size()) != d) throw InvalidArgument("TrigPoly frequency has wrong dimension");
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
      throw InvalidArgument("TrigPoly coefficient is not finite");
  }
  finalize();
}

void TrigPoly::finalize() {
  for (auto it = coeffs_.begin(); it != coeffs_.end();) {
    if (std::abs(it->second) <= drop_threshold)
      it = coeffs_.erase(it);
    else
      ++it;
  }
  degree_ = 0;
  real_ = true;
  for (const auto& [k, c] : coeffs_) {
    degree_ = std::max(degree_, linf(k));
    if (real_) {
      auto it = coeffs_.find(negate(k));
      if (it == coeffs_.end() || it->second != std::conj(c)) real_ = false;
    }
  }
}

TrigPoly TrigPoly::constant(int d, double c) {
  CoeffMap m;
  m[Freq(static_cast<std::size_t>(d), 0)] = c;
  return TrigPoly(d, std::move(m));
}

TrigPoly TrigPoly::cosine(const Freq& k, double amp) {
  const int d = static_cast<int>(k.size());
  if (is_zero_freq(k)) return constant(d, amp);
  CoeffMap m;
  m[k] = amp / 2.0;
  m[negate(k)] = amp / 2.0;
  return TrigPoly(d, std::move(m));
}

TrigPoly TrigPoly::sine(const Freq& k, double amp) {
  const int d = static_cast<int>(k.size());
  if (is_zero_freq(k)) return TrigPoly(d);
  CoeffMap m;
  m[k] = cplx(0.0, -amp / 2.0);
  m[negate(k)] = cplx(0.0, amp / 2.0);
  return TrigPoly(d, std::move(m));
}

TrigPoly TrigPoly::exponential(const Freq& k, cplx c) {
  CoeffMap m;
  m[k] = c;
  return TrigPoly(static_cast<int>(k.size()), std::move(m));
}

cplx TrigPoly::coeff(const Freq& k) const {
  auto it = coeffs_.find(k);
  return it == coeffs_.end() ? cplx{} : it->second;
}

cplx TrigPoly::mean() const { return coeff(Freq(static_cast<std::size_t>(d_), 0)); }

double TrigPoly::l1_norm() const {
  double s = 0.0;
  for (const auto& [k, c] : coeffs_) s += std::abs(c);
  return s;
}

double TrigPoly::l1_nonconstant() const {
  double s = 0.0;
  for (const auto& [k, c] : coeffs_)
    if (!is_zero_freq(k)) s += std::abs(c);
  return s;
}

double TrigPoly::lipschitz_bound() const {
  double s = 0.0;
  for (const auto& [k, c] : coeffs_) {
    double n2 = 0.0;
    for (int v : k) n2 += double(v) * v;
    s += std::sqrt(n2) * std::abs(c);
  }
  return two_pi * s;
}

TrigPoly TrigPoly::operator-() const {
  TrigPoly r = *this;
  for (auto& [k, c] : r.coeffs_) c = -c;
  return r;
}

TrigPoly& TrigPoly::operator+=(const TrigPoly& o) {
  if (o.d_ != d_) throw InvalidArgument("TrigPoly sum: dimension mismatch");
  for (const auto& [k, c] : o.coeffs_) coeffs_[k] += c;
  finalize();
  return *this;
}

TrigPoly& TrigPoly::operator-=(const TrigPoly& o) {
  if (o.d_ != d_) throw InvalidArgument("TrigPoly difference: dimension mismatch");
  for (const auto& [k, c] : o.coeffs_) coeffs_[k] -= c;
  finalize();
  return *this;
}

TrigPoly& TrigPoly::operator*=(cplx s) {
  for (auto& [k, c] : coeffs_) c *= s;
  finalize();
  return *this;
}

TrigPoly operator+(TrigPoly a, const TrigPoly& b) { return a += b; }
TrigPoly operator-(TrigPoly a, const TrigPoly& b) { return a -= b; }
TrigPoly operator*(TrigPoly a, cplx s) { return a *= s; }
TrigPoly operator*(cplx s, TrigPoly a) { return a *= s; }

// ---------------------------------------------------------------- operations

double sin_pi(double x) {
  const double r = x - 2.0 * std::nearbyint(x / 2.0);
  if (r == 0.0 || r == 1.0 || r == -1.0) return 0.0;
  double a = std::abs(r);
  if (a > 0.5) a = 1.0 - a;
  const double s = std::sin(pi * a);
  return r < 0 ? -s : s;
}

cplx evaluate(const TrigPoly& f, std::span<const double> x) {
  check_dim(f, x.size(), "evaluate");
  cplx s{};
  for (const auto& [k, c] : f.coeffs()) {
    const double t = dot(k, x);
    const double r = t - std::nearbyint(t);
    s += c * cplx(std::cos(two_pi * r), std::sin(two_pi * r));
  }
  return s;
}

cplx evaluate(const TrigPoly& f, const TorusPoint& x) { return evaluate(f, x.coords()); }

std::vector<cplx> evaluate_many(const TrigPoly& f, std::span<const double> points) {
  const std::size_t d = static_cast<std::size_t>(f.dim());
  if (points.size() % d != 0) throw InvalidArgument("evaluate_many: point array size");
  const std::size_t n = points.size() / d;
  std::vector<double> t(n), cr(n), ci(n), re(n, 0.0), im(n, 0.0);
  for (const auto& [k, c] : f.coeffs()) {
    for (std::size_t i = 0; i < n; ++i) t[i] = dot(k, points.subspan(i * d, d));
    simd::cis_2pi(t, cr, ci);
    for (std::size_t i = 0; i < n; ++i) {
      re[i] += c.real() * cr[i] - c.imag() * ci[i];
      im[i] += c.real() * ci[i] + c.imag() * cr[i];
    }
  }
  std::vector<cplx> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = {re[i], im[i]};
  return out;
}

TrigPoly lie_derivative(const TrigPoly& f, std::span<const double> v) {
  check_dim(f, v.size(), "lie_derivative");
  TrigPoly::CoeffMap m;
  for (const auto& [k, c] : f.coeffs()) m[k] = c * cplx(0.0, two_pi * dot(k, v));
  return TrigPoly(f.dim(), std::move(m));
}

TrigPoly real_part(const TrigPoly& f) {
  TrigPoly::CoeffMap m;
  for (const auto& [k, c] : f.coeffs()) {
    const Freq nk = negate(k);
    if (m.count(k)) continue;
    const cplx v = 0.5 * (c + std::conj(f.coeff(nk)));
    if (k == nk) {
      m[k] = v.real();
    } else {
      m[k] = v;
      m[nk] = std::conj(v);
    }
  }
  return TrigPoly(f.dim(), std::move(m));
}

TrigPoly conjugate(const TrigPoly& f) {
  TrigPoly::CoeffMap m;
  for (const auto& [k, c] : f.coeffs()) m[negate(k)] = std::conj(c);
  return TrigPoly(f.dim(), std::move(m));
}

namespace {

// Copy c_k for k >= 0 lexicographically onto -k, making the map exactly Hermitian.
TrigPoly hermitian_from_upper(int d, const TrigPoly::CoeffMap& in) {
  TrigPoly::CoeffMap m;
  const Freq zero(static_cast<std::size_t>(d), 0);
  for (const auto& [k, c] : in) {
    if (k < zero) continue;
    if (k == zero) {
      m[k] = c.real();
    } else {
      m[k] = c;
      m[negate(k)] = std::conj(c);
    }
  }
  for (const auto& [k, c] : in) {
    if (k < zero && !m.count(k)) {
      m[k] = c;
      m[negate(k)] = std::conj(c);
    }
  }
  return TrigPoly(d, std::move(m));
}

}  // namespace

TrigPoly product(const TrigPoly& f, const TrigPoly& g) {
  if (f.dim() != g.dim()) throw InvalidArgument("product: dimension mismatch");
  TrigPoly::CoeffMap m;
  Freq s(static_cast<std::size_t>(f.dim()));
  for (const auto& [a, ca] : f.coeffs()) {
    for (const auto& [b, cb] : g.coeffs()) {
      for (std::size_t i = 0; i < s.size(); ++i) s[i] = a[i] + b[i];
      m[s] += ca * cb;
    }
  }
  if (f.is_real() && g.is_real()) return hermitian_from_upper(f.dim(), m);
  return TrigPoly(f.dim(), std::move(m));
}

TrigPoly translate_pullback(const TrigPoly& f, std::span<const double> v) {
  check_dim(f, v.size(), "translate_pullback");
  TrigPoly::CoeffMap m;
  for (const auto& [k, c] : f.coeffs()) {
    const double t = dot(k, v);
    const double r = t - std::nearbyint(t);
    m[k] = c * cplx(std::cos(two_pi * r), std::sin(two_pi * r));
  }
  if (f.is_real()) return hermitian_from_upper(f.dim(), m);
  return TrigPoly(f.dim(), std::move(m));
}

// ---------------------------------------------------------------- grids

TorusGrid::TorusGrid(int d, int res) : d_(d), res_(res) {
  if (d < 1) throw InvalidArgument("grid dimension must be positive");
  if (res < 2 || (res & (res - 1)) != 0) throw InvalidArgument("grid resolution must be a power of two");
  size_ = int_pow(static_cast<std::size_t>(res), d);
  if (size_ > max_samples) throw InvalidArgument("grid too large");
}

void TorusGrid::point(std::size_t idx, double* out) const {
  for (int a = d_ - 1; a >= 0; --a) {
    out[a] = static_cast<double>(idx % static_cast<std::size_t>(res_)) / res_;
    idx /= static_cast<std::size_t>(res_);
  }
}

TorusPoint TorusGrid::point(std::size_t idx) const {
  std::vector<double> c(static_cast<std::size_t>(d_));
  point(idx, c.data());
  return TorusPoint(std::move(c));
}

std::vector<double> TorusGrid::points() const {
  std::vector<double> p(size_ * static_cast<std::size_t>(d_));
  for (std::size_t i = 0; i < size_; ++i) point(i, p.data() + i * static_cast<std::size_t>(d_));
  return p;
}

double GridFunction::sup_abs() const {
  double m = 0.0;
  for (const cplx& v : samples) m = std::max(m, std::abs(v));
  return m;
}

double GridFunction::max_imag() const {
  double m = 0.0;
  for (const cplx& v : samples) m = std::max(m, std::abs(v.imag()));
  return m;
}

namespace {

std::size_t bin_index(const Freq& k, int res) {
  std::size_t idx = 0;
  for (int v : k) {
    int r = v % res;
    if (r < 0) r += res;
    idx = idx * static_cast<std::size_t>(res) + static_cast<std::size_t>(r);
  }
  return idx;
}

// Frequency of a bin, or false for bins touching the Nyquist index.
bool bin_frequency(std::size_t idx, int d, int res, Freq& k) {
  k.assign(static_cast<std::size_t>(d), 0);
  bool ok = true;
  for (int a = d - 1; a >= 0; --a) {
    const int j = static_cast<int>(idx % static_cast<std::size_t>(res));
    idx /= static_cast<std::size_t>(res);
    if (j == res / 2) ok = false;
    k[static_cast<std::size_t>(a)] = j < res / 2 ? j : j - res;
  }
  return ok;
}

}  // namespace

GridFunction sample(const TrigPoly& f, const TorusGrid& grid) {
  if (f.dim() != grid.dim()) throw InvalidArgument("sample: dimension mismatch");
  std::vector<cplx> data(grid.size(), cplx{});
  for (const auto& [k, c] : f.coeffs()) data[bin_index(k, grid.resolution())] += c;
  const auto dims = grid.dims();
  fft::transform(data, dims, +1);
  if (f.is_real())
    for (cplx& v : data) v = v.real();
  return GridFunction{grid, std::move(data)};
}

TrigPoly to_trigpoly(const GridFunction& g, double drop_below) {
  std::vector<cplx> data = g.samples;
  const auto dims = g.grid.dims();
  fft::transform(data, dims, -1);
  const double scale = 1.0 / static_cast<double>(data.size());
  TrigPoly::CoeffMap m;
  Freq k;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!bin_frequency(i, g.grid.dim(), g.grid.resolution(), k)) continue;
    const cplx c = data[i] * scale;
    if (std::abs(c) > drop_below) m[k] = c;
  }
  return TrigPoly(g.grid.dim(), std::move(m));
}

GridFunction spectral_derivative(const GridFunction& g, std::span<const double> v) {
  const int d = g.grid.dim();
  if (v.size() != static_cast<std::size_t>(d)) throw InvalidArgument("spectral_derivative: dimension mismatch");
  std::vector<cplx> data = g.samples;
  const auto dims = g.grid.dims();
  fft::transform(data, dims, -1);
  const double scale = 1.0 / static_cast<double>(data.size());
  Freq k;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!bin_frequency(i, d, g.grid.resolution(), k)) {
      data[i] = 0.0;
      continue;
    }
    data[i] *= cplx(0.0, two_pi * dot(k, v)) * scale;
  }
  fft::transform(data, dims, +1);
  return GridFunction{g.grid, std::move(data)};
}

// ---------------------------------------------------------------- truncated analytic functions

namespace {

// log of sum over k outside the box |k_i| < R/2 of exp(-2 pi sigma |k|_1)
double log_box_tail(double sigma, int res, int d) {
  const double q = std::exp(-two_pi * sigma);
  const double a = (1.0 + q) / (1.0 - q);
  const double log_diff = std::log(2.0) - pi * sigma * res - std::log1p(-q);
  const double b = a - std::exp(log_diff);
  double s = 0.0;
  for (int i = 0; i < d; ++i) s += std::pow(a, d - 1 - i) * std::pow(std::max(b, 0.0), i);
  return log_diff + std::log(s);
}

double log_strip_max_over_sigma(const std::function<double(double)>& log_bound, int res, int d) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 120; ++i) {
    const double sigma = 1e-3 * std::pow(10.0, 4.0 * i / 120.0);
    const double lb = log_bound(sigma);
    if (!std::isfinite(lb)) continue;
    best = std::min(best, lb + log_box_tail(sigma, res, d));
  }
  return best;
}

int next_pow2(int v) {
  int r = 1;
  while (r < v) r <<= 1;
  return r;
}

using Pointwise = std::function<void(std::span<const double>, std::span<cplx>)>;

Truncated analytic_resample(const TrigPoly& f, const Pointwise& fn,
                            const std::function<double(double)>& log_bound, double tol,
                            bool real_output, const char* what) {
  if (!(tol > 0)) throw InvalidArgument(std::string(what) + ": tol must be positive");
  const int d = f.dim();
  if (f.degree() == 0) {
    const double x = f.mean().real();
    cplx v;
    fn(std::span<const double>(&x, 1), std::span<cplx>(&v, 1));
    TrigPoly out = real_output ? TrigPoly::constant(d, v.real())
                               : TrigPoly::exponential(Freq(static_cast<std::size_t>(d), 0), v);
    return {out, 0.0};
  }
  int res = next_pow2(std::max(16, 8 * f.degree()));
  double alias = 0.0;
  for (;;) {
    if (int_pow(static_cast<std::size_t>(res), d) > max_samples)
      throw NumericFailure(std::string(what) + ": tolerance " + std::to_string(tol) +
                           " not reachable within the maximal sampling resolution");
    const double lt = log_strip_max_over_sigma(log_bound, res, d);
    alias = 2.0 * std::exp(lt);
    if (alias <= 0.5 * tol) break;
    res *= 2;
  }
  const TorusGrid grid(d, res);
  GridFunction fs = sample(f, grid);
  std::vector<double> vals(fs.samples.size());
  for (std::size_t i = 0; i < vals.size(); ++i) vals[i] = fs.samples[i].real();
  fn(vals, fs.samples);
  std::vector<cplx> data = std::move(fs.samples);
  const auto dims = grid.dims();
  fft::transform(data, dims, -1);
  const double scale = 1.0 / static_cast<double>(data.size());
  TrigPoly::CoeffMap m;
  double dropped = 0.0;
  Freq k;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const cplx c = data[i] * scale;
    if (!bin_frequency(i, d, res, k) || std::abs(c) < tol) {
      dropped += std::abs(c);
      continue;
    }
    m[k] = c;
  }
  TrigPoly out = real_output ? hermitian_from_upper(d, m) : TrigPoly(d, std::move(m));
  return {out, dropped + alias};
}

struct ModeNorm {
  double c;
  int k1;
};

std::vector<ModeNorm> nonconstant_modes(const TrigPoly& f) {
  std::vector<ModeNorm> out;
  for (const auto& [k, c] : f.coeffs())
    if (!is_zero_freq(k)) out.push_back({std::abs(c), l1(k)});
  return out;
}

int default_inf_resolution(const TrigPoly& f) {
  const int base = f.dim() == 1 ? 4096 : (f.dim() == 2 ? 256 : 32);
  return std::max(base, next_pow2(2 * f.degree() + 2));
}

}  // namespace

Truncated unit_phase(const TrigPoly& f, double tol) {
  if (!f.is_real()) throw InvalidArgument("unit_phase: f must be real-valued");
  const auto modes = nonconstant_modes(f);
  auto log_bound = [&](double sigma) {
    double s = 0.0;
    for (const auto& m : modes) s += m.c * std::sinh(two_pi * m.k1 * sigma);
    return two_pi * s;
  };
  auto fn = [](std::span<const double> x, std::span<cplx> out) {
    std::vector<double> re(x.size()), im(x.size());
    simd::cis_2pi(x, re, im);
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = {re[i], im[i]};
  };
  return analytic_resample(f, fn, log_bound, tol, false, "unit_phase");
}

Truncated log_positive(const TrigPoly& f, double tol) {
  if (!f.is_real()) throw InvalidArgument("log_positive: f must be real-valued");
  if (f.degree() == 0) {
    const double c = f.mean().real();
    if (!(c > 0)) throw DomainError("log_positive: function is not positive");
    return {TrigPoly::constant(f.dim(), std::log(c)), 0.0};
  }
  const Infimum inf = certified_infimum(f, default_inf_resolution(f));
  if (!(inf.lower_bound > 0))
    throw DomainError("log_positive: certified infimum " + std::to_string(inf.lower_bound) +
                      " is not positive");
  const double lo = inf.lower_bound;
  const double hi = f.l1_norm();
  const auto modes = nonconstant_modes(f);
  auto log_bound = [&](double sigma) {
    double delta = 0.0;
    for (const auto& m : modes) delta += m.c * std::expm1(two_pi * m.k1 * sigma);
    if (delta >= 0.99 * lo) return std::numeric_limits<double>::infinity();
    const double M = std::max(std::abs(std::log(lo - delta)), std::abs(std::log(hi + delta))) + pi / 2;
    return std::log(M);
  };
  auto fn = [](std::span<const double> x, std::span<cplx> out) {
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = std::log(x[i]);
  };
  return analytic_resample(f, fn, log_bound, tol, true, "log_positive");
}

Truncated exp_real(const TrigPoly& f, double tol) {
  if (!f.is_real()) throw InvalidArgument("exp_real: f must be real-valued");
  const auto modes = nonconstant_modes(f);
  const double c0 = f.mean().real();
  auto log_bound = [&](double sigma) {
    double s = c0;
    for (const auto& m : modes) s += m.c * std::cosh(two_pi * m.k1 * sigma);
    return s;
  };
  auto fn = [](std::span<const double> x, std::span<cplx> out) {
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = std::exp(x[i]);
  };
  return analytic_resample(f, fn, log_bound, tol, true, "exp_real");
}

Infimum certified_infimum(const TrigPoly& f, int resolution) {
  return certified_infimum(f, resolution, f.lipschitz_bound());
}

Infimum certified_infimum(const TrigPoly& f, int resolution, double lipschitz) {
  if (!f.is_real()) throw InvalidArgument("certified_infimum: f must be real-valued");
  if (resolution < 2 * f.degree() + 2)
    throw InvalidArgument("certified_infimum: resolution must be at least 2*degree+2");
  const TorusGrid grid(f.dim(), next_pow2(resolution));
  const GridFunction s = sample(f, grid);
  std::size_t best = 0;
  for (std::size_t i = 1; i < s.samples.size(); ++i)
    if (s.samples[i].real() < s.samples[best].real()) best = i;
  Infimum r;
  r.grid_min = s.samples[best].real();
  r.gap = lipschitz * std::sqrt(double(f.dim())) / (2.0 * grid.resolution());
  r.lower_bound = r.grid_min - r.gap;
  r.argmin = grid.point(best);
  return r;
}

// ---------------------------------------------------------------- text form

namespace {

std::string fmt(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw InvalidArgument("trigpoly text: bad number '" + s + "'");
  return v;
}

}  // namespace

std::string to_text(const TrigPoly& f) {
  std::ostringstream os;
  os << "trigpoly\n";
  os << "dim " << f.dim() << "\n";
  os << "real " << (f.is_real() ? 1 : 0) << "\n";
  os << "terms " << f.size() << "\n";
  for (const auto& [k, c] : f.coeffs()) {
    for (int v : k) os << v << ' ';
    os << fmt(c.real()) << ' ' << fmt(c.imag()) << "\n";
  }
  return os.str();
}

TrigPoly trigpoly_from_text(const std::string& text) {
  std::istringstream is(text);
  std::string word;
  int d = 0, real = 0;
  std::size_t n = 0;
  if (!(is >> word) || word != "trigpoly") throw InvalidArgument("trigpoly text: missing header");
  if (!(is >> word >> d) || word != "dim" || d < 1) throw InvalidArgument("trigpoly text: bad dim");
  if (!(is >> word >> real) || word != "real") throw InvalidArgument("trigpoly text: bad real flag");
  if (!(is >> word >> n) || word != "terms") throw InvalidArgument("trigpoly text: bad term count");
  TrigPoly::CoeffMap m;
  for (std::size_t t = 0; t < n; ++t) {
    Freq k(static_cast<std::size_t>(d));
    for (int& v : k)
      if (!(is >> v)) throw InvalidArgument("trigpoly text: bad frequency");
    std::string re, im;
    if (!(is >> re >> im)) throw InvalidArgument("trigpoly text: bad coefficient");
    m[k] = cplx(parse_double(re), parse_double(im));
  }
  TrigPoly f(d, std::move(m));
  if (f.is_real() != (real == 1)) throw InvalidArgument("trigpoly text: real flag disagrees with coefficients");
  return f;
}

}  // namespace mk
