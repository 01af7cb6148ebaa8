#include "mourrekit/ergodic.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

#include "mourrekit/errors.hpp"
#include "mourrekit/quadrature.hpp"
#include "mourrekit/simd/kernels.hpp"

namespace mk {

namespace {

constexpr double eps = 2.220446049250313e-16;
constexpr double pi = std::numbers::pi;

std::string fmt(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// k.y reduced to (-1/2, 1/2]; the closed forms below are invariant under integer shifts.
double reduced_angle(const Freq& k, const FrequencyVector& y) {
  double t = 0.0;
  for (std::size_t i = 0; i < k.size(); ++i) t += k[i] * y[static_cast<int>(i)];
  return t - std::nearbyint(t);
}

}  // namespace

void AverageCurve::check() const {
  if (n_values.size() != sup_deviation.size()) throw InvalidArgument("AverageCurve: length mismatch");
  for (double v : sup_deviation)
    if (!(v >= 0)) throw InvalidArgument("AverageCurve: negative deviation");
}

std::string AverageCurve::to_csv() const {
  check();
  std::ostringstream os;
  os << "n,sup_deviation,limit_value\n";
  for (std::size_t i = 0; i < n_values.size(); ++i)
    os << fmt(n_values[i]) << ',' << fmt(sup_deviation[i]) << ',' << fmt(limit_value) << '\n';
  return os.str();
}

TrigPoly birkhoff_exact(const TrigPoly& g, const FrequencyVector& y, long n) {
  if (n < 1) throw InvalidArgument("birkhoff_exact: n must be at least 1");
  if (g.dim() != y.dim()) throw InvalidArgument("birkhoff_exact: dimension mismatch");
  TrigPoly::CoeffMap m;
  const double dn = static_cast<double>(n);
  for (const auto& [k, c] : g.coeffs()) {
    const double th = reduced_angle(k, y);
    if (std::all_of(k.begin(), k.end(), [](int v) { return v == 0; })) {
      m[k] = c;
      continue;
    }
    const double den = sin_pi(th);
    if (2.0 * std::abs(den) < 1e-14)
      throw ResonanceError("birkhoff_exact: k.y is an integer to 1e-14 for a frequency in the support");
    // (1/n)(1 - e^{-2 pi i n th}) / (1 - e^{-2 pi i th}) = e^{-pi i (n-1) th} sin(pi n th) / (n sin(pi th))
    double ph = -0.5 * (dn - 1.0) * th;
    ph -= std::nearbyint(ph);
    const double amp = sin_pi(dn * th) / (dn * den);
    m[k] = c * amp * cplx(std::cos(2 * pi * ph), std::sin(2 * pi * ph));
  }
  TrigPoly r(g.dim(), std::move(m));
  return g.is_real() ? real_part(r) : r;
}

AverageCurve deviation_curve(const TrigPoly& g, const FrequencyVector& y, std::span<const long> n_list) {
  if (g.dim() != y.dim()) throw InvalidArgument("deviation_curve: dimension mismatch");
  AverageCurve cv;
  cv.limit_value = g.mean().real();
  long prev = 0;
  for (long n : n_list) {
    if (n < 1 || n <= prev) throw InvalidArgument("deviation_curve: n_list must be increasing and positive");
    prev = n;
    const double dn = static_cast<double>(n);
    double s = 0.0;
    for (const auto& [k, c] : g.coeffs()) {
      if (std::all_of(k.begin(), k.end(), [](int v) { return v == 0; })) continue;
      const double th = reduced_angle(k, y);
      const double den = sin_pi(th);
      if (2.0 * std::abs(den) < 1e-14) throw ResonanceError("deviation_curve: resonant frequency in the support");
      s += std::abs(c) * std::abs(sin_pi(dn * th)) / (dn * std::abs(den));
    }
    cv.n_values.push_back(dn);
    cv.sup_deviation.push_back(s);
  }
  return cv;
}

GridFunction birkhoff_map(const PointFunction& g, const InverseMap& inverse, const TorusGrid& grid, long n) {
  if (n < 1) throw InvalidArgument("birkhoff_map: n must be at least 1");
  const std::size_t d = static_cast<std::size_t>(grid.dim());
  std::vector<cplx> out(grid.size());
  std::vector<double> x(d);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid.point(i, x.data());
    double sum = 0.0, comp = 0.0;
    for (long l = 0; l < n; ++l) {
      if (l > 0) inverse(x.data());
      const double term = g(x);
      const double t = sum + term;
      comp += std::abs(sum) >= std::abs(term) ? (sum - t) + term : (term - t) + sum;
      sum = t;
    }
    out[i] = (sum + comp) / static_cast<double>(n);
  }
  return GridFunction{grid, std::move(out)};
}

// ---------------------------------------------------------------- time-changed orbits

namespace {

struct OrbitSums {
  double length = 0.0;  // orbit parameter reached
  double i1 = 0.0;      // int g/f du
  double i2 = 0.0;      // int (L - tau(u)) g/f du
  long panels = 0;
};

// Marches u >= 0 along p + u v in panels of width w until the clock
// tau(u) = int_0^u du/f reaches L. Clock values at the nodes come from the
// per-panel spectral integration matrix.
OrbitSums orbit_sums(const LineEvaluator& f, const LineEvaluator& g, double L, double w) {
  const auto& gl = quad::GaussLegendre::get(16);
  constexpr int nq = 16;
  constexpr int chunk = 64;
  std::vector<double> s(chunk * nq), fv(s.size()), gv(s.size());
  std::vector<double> c1, c2;
  double tau = 0.0;
  double a0 = 0.0;
  OrbitSums out;
  double rf[nq], gf[nq], tn[nq];

  auto panel_terms = [&](double half, const double* fvals, const double* gvals, double tau_start, double& d1,
                         double& d2, double& dtau) {
    for (int i = 0; i < nq; ++i) {
      rf[i] = 1.0 / fvals[i];
      gf[i] = gvals[i] * rf[i];
    }
    for (int i = 0; i < nq; ++i) {
      double acc = 0.0;
      for (int j = 0; j < nq; ++j) acc += gl.integration[static_cast<std::size_t>(i) * nq + j] * rf[j];
      tn[i] = tau_start + half * acc;
    }
    d1 = d2 = dtau = 0.0;
    for (int i = 0; i < nq; ++i) {
      d1 += gl.weights[i] * gf[i];
      d2 += gl.weights[i] * (L - tn[i]) * gf[i];
      dtau += gl.weights[i] * rf[i];
    }
    d1 *= half;
    d2 *= half;
    dtau *= half;
  };

  for (;;) {
    for (int p = 0; p < chunk; ++p)
      for (int i = 0; i < nq; ++i) s[p * nq + i] = a0 + w * p + 0.5 * w * (gl.nodes[i] + 1.0);
    f.eval(s, fv);
    g.eval(s, gv);
    for (int p = 0; p < chunk; ++p) {
      const double a = a0 + w * p;
      double d1, d2, dtau;
      panel_terms(0.5 * w, &fv[p * nq], &gv[p * nq], tau, d1, d2, dtau);
      if (tau + dtau < L) {
        c1.push_back(d1);
        c2.push_back(d2);
        tau += dtau;
        ++out.panels;
        continue;
      }
      // The clock reaches L inside [a, a + w]: safeguarded Newton on the endpoint.
      auto partial = [&](double v, double* fvals, double* gvals) {
        double ss[nq];
        const double half = 0.5 * (v - a);
        for (int i = 0; i < nq; ++i) ss[i] = a + half * (gl.nodes[i] + 1.0);
        f.eval(std::span<const double>(ss, nq), std::span<double>(fvals, nq));
        if (gvals) g.eval(std::span<const double>(ss, nq), std::span<double>(gvals, nq));
        double acc = 0.0;
        for (int i = 0; i < nq; ++i) acc += gl.weights[i] / fvals[i];
        return tau + half * acc - L;
      };
      double lo = a, hi = a + w;
      double v = a + w * std::clamp((L - tau) / dtau, 0.0, 1.0);
      double fb[nq], gb[nq];
      for (int it = 0; it < 80; ++it) {
        const double r = partial(v, fb, nullptr);
        if (std::abs(r) <= 4.0 * eps * std::max(1.0, L)) break;
        if (r < 0)
          lo = v;
        else
          hi = v;
        if (hi - lo <= 4.0 * eps * std::max(1.0, std::abs(hi))) break;
        double vn = v - r * f.eval(v);
        if (!(vn > lo && vn < hi)) vn = 0.5 * (lo + hi);
        v = vn;
      }
      partial(v, fb, gb);
      panel_terms(0.5 * (v - a), fb, gb, tau, d1, d2, dtau);
      c1.push_back(d1);
      c2.push_back(d2);
      ++out.panels;
      out.length = v;
      out.i1 = simd::sum(c1);
      out.i2 = simd::sum(c2);
      return out;
    }
    a0 += w * chunk;
  }
}

TimeAverage adaptive_time_average(const LineEvaluator& f, const LineEvaluator& g, double L, double tol) {
  if (!(L > 0)) throw InvalidArgument("time average: L must be positive");
  if (!(tol > 0)) throw InvalidArgument("time average: tol must be positive");
  double w = 1.0;
  OrbitSums prev = orbit_sums(f, g, L, w);
  for (int it = 0; it < 12; ++it) {
    w *= 0.5;
    const OrbitSums cur = orbit_sums(f, g, L, w);
    const double a1 = cur.i1 / L, a2 = cur.i2 / L;
    const double floor1 = 256.0 * eps * std::max(1.0, std::abs(a1)) * std::sqrt(double(cur.panels));
    const double floor2 = 256.0 * eps * std::max(1.0, std::abs(a2)) * std::sqrt(double(cur.panels));
    if (std::abs(a1 - prev.i1 / L) < std::max(tol / 10, floor1) &&
        std::abs(a2 - prev.i2 / L) < std::max(tol / 10, floor2))
      return {a1, a2, cur.length, w};
    prev = cur;
  }
  throw NumericFailure("time average: quadrature did not converge for L=" + fmt(L));
}

std::vector<double> scaled(std::span<const double> v, double s) {
  std::vector<double> r(v.begin(), v.end());
  for (double& x : r) x *= s;
  return r;
}

void check_time_inputs(const TrigPoly& g, const TimeChangeSpec& spec) {
  if (g.dim() != spec.dim()) throw InvalidArgument("time average: dimension mismatch");
  if (!g.is_real()) throw InvalidArgument("time average: g must be real");
}

}  // namespace

TimeAverage time_averages_at(const TrigPoly& g, const TimeChangeSpec& spec, const TorusPoint& p, double L,
                             double tol) {
  check_time_inputs(g, spec);
  const auto back = scaled(spec.y.values(), -1.0);
  const LineEvaluator fe(spec.f, p.coords(), back);
  const LineEvaluator ge(g, p.coords(), back);
  return adaptive_time_average(fe, ge, L, tol);
}

double flow_birkhoff_average(const TrigPoly& phi, const TimeChangeSpec& spec, const TorusPoint& p, double T,
                             double tol) {
  check_time_inputs(phi, spec);
  const LineEvaluator fe(spec.f, p.coords(), spec.y.values());
  const LineEvaluator ge(phi, p.coords(), spec.y.values());
  return adaptive_time_average(fe, ge, T, tol).g_L;
}

GridFunction flow_average_gL(const TrigPoly& g, const TimeChangeSpec& spec, double L, const TorusGrid& grid,
                             double tol) {
  check_time_inputs(g, spec);
  if (grid.dim() != spec.dim()) throw InvalidArgument("flow_average_gL: grid dimension mismatch");
  std::vector<cplx> out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
    out[i] = time_averages_at(g, spec, grid.point(i), L, tol).g_L;
  return GridFunction{grid, std::move(out)};
}

DoubleAverage double_average_gtilde(const TrigPoly& g, const TimeChangeSpec& spec, double L,
                                    const TorusGrid& grid, double tol) {
  check_time_inputs(g, spec);
  if (grid.dim() != spec.dim()) throw InvalidArgument("double_average_gtilde: grid dimension mismatch");
  // Richardson step along the flow; the map tolerance keeps position errors far below tol * delta.
  constexpr double delta = 1e-3;
  const double map_tol = 1e-13;
  const double inner_tol = std::min(tol, 1e-9);
  DoubleAverage out{GridFunction{grid, std::vector<cplx>(grid.size())},
                    GridFunction{grid, std::vector<cplx>(grid.size())},
                    GridFunction{grid, std::vector<cplx>(grid.size())}};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const TorusPoint p = grid.point(i);
    const TimeAverage c = time_averages_at(g, spec, p, L, tol);
    out.g_tilde.samples[i] = c.g_tilde;
    out.g_L.samples[i] = c.g_L;
    double v[4];
    const double steps[4] = {-2 * delta, -delta, delta, 2 * delta};
    for (int s = 0; s < 4; ++s) {
      const TorusPoint q = time_change_map(spec, p, steps[s], map_tol);
      v[s] = time_averages_at(g, spec, q, L, inner_tol).g_tilde;
    }
    out.flow_derivative.samples[i] = (v[0] - 8.0 * v[1] + 8.0 * v[2] - v[3]) / (12.0 * delta);
  }
  return out;
}

}  // namespace mk
