#include "mourrekit/torusdyn.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mourrekit/errors.hpp"
#include "mourrekit/quadrature.hpp"
#include "mourrekit/simd/kernels.hpp"

namespace mk {

namespace {

constexpr double eps = 2.220446049250313e-16;

void require(bool ok, const std::string& msg) {
  if (!ok) throw InvalidArgument(msg);
}

}  // namespace

bool looks_rational(double x, double tol, long max_q, long& p, long& q) {
  double r = x;
  long p0 = 1, q0 = 0, p1 = static_cast<long>(std::floor(r)), q1 = 1;
  r -= std::floor(r);
  for (int depth = 0; depth < 40; ++depth) {
    if (std::abs(x - double(p1) / double(q1)) < tol) {
      p = p1;
      q = q1;
      return true;
    }
    if (r < 1e-15) break;
    r = 1.0 / r;
    const long a = static_cast<long>(std::floor(r));
    r -= std::floor(r);
    const long p2 = a * p1 + p0, q2 = a * q1 + q0;
    if (q2 > max_q || q2 <= 0) break;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
  }
  return false;
}

FrequencyVector::FrequencyVector(std::vector<double> y, std::string note) : y_(std::move(y)) {
  require(!y_.empty(), "frequency vector must be nonempty");
  for (double v : y_) require(std::isfinite(v), "frequency vector entries must be finite");
  std::ostringstream os;
  long p = 0, q = 0;
  for (std::size_t i = 0; i < y_.size(); ++i) {
    if (looks_rational(y_[i], 1e-13, 100000, p, q)) {
      rational_ = true;
      os << "y[" << i << "] ~ " << p << "/" << q << "; ";
    }
    for (std::size_t j = i + 1; j < y_.size(); ++j) {
      if (y_[j] == 0.0) continue;
      if (looks_rational(y_[i] / y_[j], 1e-13, 100000, p, q)) {
        rational_ = true;
        os << "y[" << i << "]/y[" << j << "] ~ " << p << "/" << q << "; ";
      }
    }
  }
  note_ = rational_ ? "heuristic rational relation: " + os.str() : "no rational relation found (heuristic)";
  if (!note.empty()) note_ += " | " + note;
}

// ---------------------------------------------------------------- specs

void SkewProductSpec::validate() const {
  require(d >= 1 && dprime >= 1, "skew product: dimensions must be positive");
  require(y.dim() == d, "skew product: y has wrong dimension");
  require(static_cast<int>(N.size()) == dprime, "skew product: N must have dprime rows");
  for (const auto& row : N) require(static_cast<int>(row.size()) == d, "skew product: N must have d columns");
  require(static_cast<int>(eta.size()) == dprime, "skew product: eta must have dprime components");
  for (const auto& e : eta) {
    require(e.dim() == d, "skew product: eta component has wrong dimension");
    require(e.is_real(), "skew product: eta components must be real");
  }
  require(static_cast<int>(m.size()) == dprime, "skew product: m must have dprime entries");
  if (degenerate() && !allow_degenerate)
    throw DegenerateSpec("skew product: the character violates the hypothesis N^T m != 0");
}

std::vector<int> SkewProductSpec::shift() const {
  std::vector<int> s(static_cast<std::size_t>(d), 0);
  for (int r = 0; r < dprime; ++r)
    for (int c = 0; c < d; ++c) s[static_cast<std::size_t>(c)] += N[r][c] * m[r];
  return s;
}

bool SkewProductSpec::degenerate() const {
  const auto s = shift();
  return std::all_of(s.begin(), s.end(), [](int v) { return v == 0; });
}

double SkewProductSpec::char_speed() const {
  const auto s = shift();
  double v = 0.0;
  for (int c = 0; c < d; ++c) v += s[static_cast<std::size_t>(c)] * y[c];
  return v;
}

TrigPoly SkewProductSpec::cocycle_phase() const {
  TrigPoly p(d);
  for (int r = 0; r < dprime; ++r)
    if (m[static_cast<std::size_t>(r)] != 0) p += eta[static_cast<std::size_t>(r)] * double(m[static_cast<std::size_t>(r)]);
  return p;
}

void FurstenbergSpec::validate() const {
  require(d >= 2, "furstenberg: d must be at least 2");
  require(std::isfinite(y), "furstenberg: y must be finite");
  require(static_cast<int>(b.size()) == d, "furstenberg: b must be d x d");
  for (const auto& row : b) require(static_cast<int>(row.size()) == d, "furstenberg: b must be d x d");
  for (int j = 1; j <= d; ++j)
    for (int k = j; k <= d; ++k)
      require(coeff(j, k) == 0, "furstenberg: b must be strictly lower triangular");
  for (int l = 2; l <= d; ++l) require(coeff(l, l - 1) != 0, "furstenberg: b_{l,l-1} must be nonzero");
  require(static_cast<int>(h.size()) == d - 1, "furstenberg: need h_1..h_{d-1}");
  for (int j = 1; j < d; ++j) {
    require(h_of(j).dim() == j, "furstenberg: h_j must live on T^j");
    require(h_of(j).is_real(), "furstenberg: h_j must be real");
  }
}

TimeChangeSpec make_time_change(FrequencyVector y, TrigPoly f, std::vector<double> y2) {
  const int d = y.dim();
  require(d == 1 || d == 2, "time change: dimension must be 1 or 2");
  require(f.dim() == d, "time change: f has wrong dimension");
  require(static_cast<int>(y2.size()) == d, "time change: y2 has wrong dimension");
  require(f.is_real(), "time change: f must be real");
  TimeChangeSpec s;
  s.y = std::move(y);
  s.y2 = std::move(y2);
  int res = d == 1 ? 4096 : 512;
  while (res < 2 * f.degree() + 2) res *= 2;
  const Infimum inf = certified_infimum(f, res);
  if (!(inf.lower_bound > 0))
    throw DomainError("time change: certified infimum of f is not positive (" +
                      std::to_string(inf.lower_bound) + ")");
  s.f_inf = inf.lower_bound;
  s.f_sup = f.l1_norm();
  s.f = std::move(f);
  return s;
}

// ---------------------------------------------------------------- maps

TorusPoint translate_flow(const FrequencyVector& y, const TorusPoint& x, double t) {
  require(y.dim() == x.dim(), "translate_flow: dimension mismatch");
  std::vector<double> c(x.coords().begin(), x.coords().end());
  for (int i = 0; i < x.dim(); ++i) c[static_cast<std::size_t>(i)] += t * y[i];
  return TorusPoint(std::move(c));
}

std::pair<TorusPoint, TorusPoint> skew_apply(const SkewProductSpec& spec, const TorusPoint& x,
                                             const TorusPoint& z) {
  require(x.dim() == spec.d && z.dim() == spec.dprime, "skew_apply: dimension mismatch");
  std::vector<double> zn(z.coords().begin(), z.coords().end());
  for (int r = 0; r < spec.dprime; ++r) {
    double s = 0.0;
    for (int c = 0; c < spec.d; ++c) s += spec.N[r][c] * x[c];
    s += evaluate(spec.eta[static_cast<std::size_t>(r)], x).real();
    zn[static_cast<std::size_t>(r)] += s;
  }
  return {translate_flow(spec.y, x, 1.0), TorusPoint(std::move(zn))};
}

void furstenberg_apply_block(const FurstenbergSpec& spec, int dim, double* x, Direction dir) {
  require(dim >= 1 && dim <= spec.d, "furstenberg: block dimension out of range");
  auto shear = [&](int j) {
    double s = 0.0;
    for (int k = 1; k < j; ++k) s += spec.coeff(j, k) * x[k - 1];
    s += evaluate(spec.h_of(j - 1), std::span<const double>(x, static_cast<std::size_t>(j - 1))).real();
    return s;
  };
  if (dir == Direction::forward) {
    for (int j = dim; j >= 2; --j) x[j - 1] = reduce_mod1(x[j - 1] + shear(j));
    x[0] = reduce_mod1(x[0] + spec.y);
  } else {
    x[0] = reduce_mod1(x[0] - spec.y);
    for (int j = 2; j <= dim; ++j) x[j - 1] = reduce_mod1(x[j - 1] - shear(j));
  }
}

TorusPoint furstenberg_apply(const FurstenbergSpec& spec, const TorusPoint& x, Direction dir) {
  require(x.dim() == spec.d, "furstenberg_apply: dimension mismatch");
  std::vector<double> c(x.coords().begin(), x.coords().end());
  furstenberg_apply_block(spec, spec.d, c.data(), dir);
  return TorusPoint(std::move(c));
}

double cocycle_phase_sum(const SkewProductSpec& spec, const TorusPoint& x, long n) {
  require(n >= 0, "cocycle_phase_sum: n must be nonnegative");
  require(x.dim() == spec.d, "cocycle_phase_sum: dimension mismatch");
  const auto s = spec.shift();
  double lin0 = 0.0;
  for (int c = 0; c < spec.d; ++c) lin0 += s[static_cast<std::size_t>(c)] * x[c];
  const double speed = spec.char_speed();
  const TrigPoly phase = spec.cocycle_phase();
  // Neumaier summation over the orbit
  double sum = 0.0, comp = 0.0;
  std::vector<double> pt(static_cast<std::size_t>(spec.d));
  for (long l = 0; l < n; ++l) {
    for (int c = 0; c < spec.d; ++c) pt[static_cast<std::size_t>(c)] = reduce_mod1(x[c] + double(l) * spec.y[c]);
    const double term = lin0 + double(l) * speed + evaluate(phase, pt).real();
    const double t = sum + term;
    comp += std::abs(sum) >= std::abs(term) ? (sum - t) + term : (term - t) + sum;
    sum = t;
  }
  return sum + comp;
}

// ---------------------------------------------------------------- line evaluation

LineEvaluator::LineEvaluator(const TrigPoly& f, std::span<const double> p, std::span<const double> v) {
  require(f.is_real(), "LineEvaluator: function must be real");
  require(p.size() == static_cast<std::size_t>(f.dim()) && v.size() == p.size(),
          "LineEvaluator: dimension mismatch");
  const Freq zero(p.size(), 0);
  for (const auto& [k, c] : f.coeffs()) {
    if (k == zero) {
      c0_ = c.real();
      continue;
    }
    if (k < zero) continue;  // paired with -k
    double kp = 0.0, kv = 0.0;
    for (std::size_t i = 0; i < k.size(); ++i) {
      kp += k[i] * p[i];
      kv += k[i] * v[i];
    }
    c_.push_back(2.0 * c);
    omega_.push_back(kv);
    phase0_.push_back(kp - std::nearbyint(kp));
  }
}

void LineEvaluator::eval(std::span<const double> s, std::span<double> out) const {
  std::fill(out.begin(), out.end(), c0_);
  for (std::size_t t = 0; t < c_.size(); ++t) simd::accumulate_mode(c_[t], omega_[t], phase0_[t], s, out);
}

double LineEvaluator::eval(double s) const {
  double out = 0.0;
  eval(std::span<const double>(&s, 1), std::span<double>(&out, 1));
  return out;
}

// ---------------------------------------------------------------- time change

namespace {

double inverse_panels(const LineEvaluator& f, double a, double b, int panels) {
  const auto& gl = quad::GaussLegendre::get(16);
  const double w = (b - a) / panels;
  std::vector<double> s(static_cast<std::size_t>(panels) * 16), v(s.size());
  for (int p = 0; p < panels; ++p)
    for (int i = 0; i < 16; ++i)
      s[static_cast<std::size_t>(p) * 16 + i] = a + w * p + 0.5 * w * (gl.nodes[i] + 1.0);
  f.eval(s, v);
  std::vector<double> sums(static_cast<std::size_t>(panels));
  for (int p = 0; p < panels; ++p) {
    double acc = 0.0;
    for (int i = 0; i < 16; ++i) acc += gl.weights[i] / v[static_cast<std::size_t>(p) * 16 + i];
    sums[static_cast<std::size_t>(p)] = 0.5 * w * acc;
  }
  return simd::sum(sums);
}

}  // namespace

double integrate_inverse(const LineEvaluator& f, double a, double b, double tol) {
  if (a == b) return 0.0;
  if (b < a) return -integrate_inverse(f, b, a, tol);
  double width = 1.0;
  int panels = std::max(1, static_cast<int>(std::ceil((b - a) / width)));
  double prev = inverse_panels(f, a, b, panels);
  for (int it = 0; it < 20; ++it) {
    panels *= 2;
    const double cur = inverse_panels(f, a, b, panels);
    const double floor = 64.0 * eps * std::abs(cur) * std::sqrt(double(panels));
    if (std::abs(cur - prev) < std::max(tol / 10.0, floor)) return cur;
    prev = cur;
  }
  throw NumericFailure("integrate_inverse: quadrature did not converge on [" + std::to_string(a) + ", " +
                       std::to_string(b) + "]");
}

ClockSolution time_change_parameter(const TimeChangeSpec& spec, const TorusPoint& p, double t, double tol) {
  require(tol > 0, "time_change_map: tol must be positive");
  require(p.dim() == spec.dim(), "time_change_map: dimension mismatch");
  require(std::isfinite(t), "time_change_map: t must be finite");
  if (t == 0.0) return {};
  const double sign = t > 0 ? 1.0 : -1.0;
  const double T = std::abs(t);
  std::vector<double> dir(spec.y.values().begin(), spec.y.values().end());
  for (double& v : dir) v *= sign;
  const LineEvaluator fe(spec.f, p.coords(), dir);
  const double qtol = tol / 10.0;

  double lo = 0.0, hi = T * spec.f_sup;
  double h = std::min(T * fe.eval(0.0), hi);
  double G = integrate_inverse(fe, 0.0, h, qtol);
  ClockSolution sol;
  for (int it = 1; it <= 100; ++it) {
    const double r = G - T;
    sol.iterations = it;
    if (std::abs(r) <= tol / 2) {
      sol.h = sign * h;
      sol.residual = std::abs(r);
      return sol;
    }
    if (r < 0)
      lo = h;
    else
      hi = h;
    double hn = h - r * fe.eval(h);
    if (!(hn > lo && hn < hi)) hn = 0.5 * (lo + hi);
    G += integrate_inverse(fe, h, hn, qtol);
    h = hn;
  }
  std::ostringstream os;
  os << "time_change_map: no convergence after 100 iterations (t=" << t << ", h=" << h
     << ", residual=" << (G - T) << ", bracket=[" << lo << ", " << hi << "])";
  throw NumericFailure(os.str());
}

TorusPoint time_change_map(const TimeChangeSpec& spec, const TorusPoint& p, double t, double tol) {
  const ClockSolution s = time_change_parameter(spec, p, t, tol);
  return translate_flow(spec.y, p, s.h);
}

}  // namespace mk
