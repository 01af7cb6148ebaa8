#include "mourrekit/specmeas.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

#include "mourrekit/errors.hpp"
#include "mourrekit/fft.hpp"
#include "mourrekit/simd/kernels.hpp"

namespace mk {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

std::string fmt(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string CorrelationSequence::to_csv() const {
  std::ostringstream os;
  os << "k,re,im,budget\n";
  for (std::size_t k = 0; k < values.size(); ++k)
    os << k << ',' << fmt(values[k].real()) << ',' << fmt(values[k].imag()) << ',' << fmt(budget) << "\n";
  return os.str();
}

CorrelationSequence correlations_matrix(const OperatorMatrix& U, const StateVector& phi, long N,
                                        bool accept_leakage) {
  if (N < 0) throw InvalidArgument("correlations_matrix: N must be nonnegative");
  if (!(U.window() == phi.window())) throw InvalidArgument("correlations_matrix: window mismatch");
  const long M = U.window().half_width();
  const long reach = static_cast<long>(std::max(phi.support(), 0)) + N * U.band();
  if (!accept_leakage && reach > M)
    throw InvalidArgument("correlations_matrix: support " + std::to_string(phi.support()) + " + N*band " +
                          std::to_string(N * U.band()) + " exceeds M=" + std::to_string(M) +
                          "; enlarge the window or accept leakage");
  CorrelationSequence out;
  out.source = "matrix";
  const double nphi = phi.norm();
  out.c0 = nphi * nphi;
  out.values.reserve(static_cast<std::size_t>(N + 1));
  out.values.push_back(out.c0);
  const bool fast = U.factorization.has_value() && !U.is_diagonal();
  StateVector v = phi;
  double drift = 0.0;  // accumulated distance between the truncated and exact orbit
  for (long k = 1; k <= N; ++k) {
    // mass within band of the edge is the only part the truncation can drop
    double edge = 0.0;
    if (reach > M) {
      const int inner_edge = static_cast<int>(M) - U.band();
      for (std::size_t i = 0; i < v.coeffs().size(); ++i)
        if (U.window().linf(i) > inner_edge) edge += std::norm(v[i]);
    }
    StateVector next = apply(U, v, fast);
    drift += U.residual_bound * v.norm() + (1.0 + U.residual_bound) * std::sqrt(edge);
    v = std::move(next);
    out.values.push_back(inner(phi, v));
  }
  // 1e-13 per step covers roundoff of a unitary step
  out.budget = nphi * drift + 1e-13 * static_cast<double>(N) * out.c0;
  return out;
}

namespace {

// Amplitude of the bounded part of the phase sum: sum_j 2 pi |c_j| / |sin(pi j.y)|.
double phase_sum_amplitude(const SkewProductSpec& spec) {
  const TrigPoly eta = spec.cocycle_phase();
  double amp = 0.0;
  for (const auto& [j, c] : eta.coeffs()) {
    bool zero = true;
    double t = 0.0;
    for (std::size_t a = 0; a < j.size(); ++a) {
      zero = zero && j[a] == 0;
      t += j[a] * spec.y[static_cast<int>(a)];
    }
    if (zero) continue;
    const double s = std::abs(sin_pi(t - std::nearbyint(t)));
    if (s < 1e-6) throw ResonanceError("correlations_quadrature: eta has a near-resonant frequency");
    amp += two_pi * std::abs(c) / s;
  }
  return amp;
}

}  // namespace

int quadrature_resolution(const SkewProductSpec& spec, long N) {
  spec.validate();
  const auto s = spec.shift();
  long smax = 0;
  for (int v : s) smax = std::max<long>(smax, std::abs(v));
  const double amp = phase_sum_amplitude(spec);
  const int deg = std::max(spec.cocycle_phase().degree(), 1);
  const long spread = static_cast<long>(deg) * (static_cast<long>(std::ceil(std::numbers::e * amp / 2.0)) + 32);
  const long need = N * smax + spread + 1;
  long r = 16;
  while (r < need) r *= 2;
  return static_cast<int>(r);
}

CorrelationSequence correlations_quadrature(const SkewProductSpec& spec, long N, const TorusGrid& grid) {
  spec.validate();
  if (N < 0) throw InvalidArgument("correlations_quadrature: N must be nonnegative");
  if (grid.dim() != spec.d) throw InvalidArgument("correlations_quadrature: grid dimension must equal d");
  const int need = quadrature_resolution(spec, N);
  if (grid.resolution() < need)
    throw InvalidArgument("correlations_quadrature: resolution " + std::to_string(grid.resolution()) +
                          " aliases the phase sum at N=" + std::to_string(N) + "; use resolution >= " +
                          std::to_string(need));
  const int d = spec.d;
  const auto s = spec.shift();
  const TrigPoly eta = spec.cocycle_phase();
  const std::size_t P = grid.size();
  const std::vector<double> pts = grid.points();

  // S_k(x) = sum_{l<k} s.(x + l y) + eta(x + l y), kept reduced mod 1.
  std::vector<double> lin(P), S(P, 0.0), tmp(P), re(P), im(P);
  for (std::size_t i = 0; i < P; ++i) {
    double t = 0.0;
    for (int a = 0; a < d; ++a) t += s[static_cast<std::size_t>(a)] * pts[i * d + a];
    lin[i] = t - std::nearbyint(t);
  }
  std::vector<double> shifted(pts.size());
  CorrelationSequence out;
  out.source = "quadrature";
  out.c0 = 1.0;
  out.values.reserve(static_cast<std::size_t>(N + 1));
  out.values.push_back(1.0);
  const double inv = 1.0 / static_cast<double>(P);
  for (long k = 1; k <= N; ++k) {
    const long l = k - 1;
    std::vector<double> shift(static_cast<std::size_t>(d));
    for (int a = 0; a < d; ++a) {
      const double t = static_cast<double>(l) * spec.y[a];
      shift[static_cast<std::size_t>(a)] = t - std::nearbyint(t);
    }
    double ls = 0.0;
    for (int a = 0; a < d; ++a) ls += s[static_cast<std::size_t>(a)] * shift[static_cast<std::size_t>(a)];
    ls -= std::nearbyint(ls);
    for (std::size_t i = 0; i < P; ++i)
      for (int a = 0; a < d; ++a) shifted[i * d + a] = pts[i * d + a] + shift[static_cast<std::size_t>(a)];
    if (!eta.is_zero()) {
      const std::vector<cplx> ev = evaluate_many(eta, shifted);
      for (std::size_t i = 0; i < P; ++i) tmp[i] = ev[i].real();
    } else {
      std::fill(tmp.begin(), tmp.end(), 0.0);
    }
    for (std::size_t i = 0; i < P; ++i) {
      const double t = S[i] + lin[i] + ls + tmp[i];
      S[i] = t - std::nearbyint(t);
    }
    simd::cis_2pi(S, re, im);
    out.values.emplace_back(simd::sum(re) * inv, simd::sum(im) * inv);
  }
  out.budget = 1e-12;
  return out;
}

std::vector<double> wiener_statistic(const CorrelationSequence& c) {
  std::vector<double> w;
  if (c.values.size() < 2) return w;
  w.reserve(c.values.size() - 1);
  double acc = 0.0, comp = 0.0;
  for (std::size_t k = 1; k < c.values.size(); ++k) {
    // Kahan keeps W_n = 1 exact to roundoff for unit correlations at large n
    const double y = std::norm(c.values[k]) - comp;
    const double t = acc + y;
    comp = (t - acc) - y;
    acc = t;
    w.push_back(acc / static_cast<double>(k));
  }
  return w;
}

const char* kernel_name(Kernel k) { return k == Kernel::fejer ? "fejer" : "hann"; }

Kernel kernel_from_name(const std::string& name) {
  if (name == "fejer") return Kernel::fejer;
  if (name == "hann") return Kernel::hann;
  throw InvalidArgument("unknown kernel '" + name + "' (expected fejer or hann)");
}

std::string Density::to_csv() const {
  std::ostringstream os;
  os << "angle,density\n";
  for (std::size_t i = 0; i < angle.size(); ++i) os << fmt(angle[i]) << ',' << fmt(value[i]) << "\n";
  return os.str();
}

Density spectral_density(const CorrelationSequence& c, Kernel kernel) {
  const std::size_t N = c.values.size();
  if (N < 64) throw InvalidArgument("spectral_density: need at least 64 correlations");
  std::size_t J = 2;
  while (J < 2 * N) J *= 2;
  // rho(theta) = sum_{|k|<N} w_k c_k e^{-i k theta}, c_{-k} = conj(c_k)
  std::vector<cplx> data(J);
  for (std::size_t k = 0; k < N; ++k) {
    const double x = static_cast<double>(k) / static_cast<double>(N);
    const double wk = kernel == Kernel::fejer ? 1.0 - x : 0.5 * (1.0 + std::cos(std::numbers::pi * x));
    data[k] += wk * c.values[k];
    if (k > 0) data[J - k] += wk * std::conj(c.values[k]);
  }
  const int dims[1] = {static_cast<int>(J)};
  fft::transform(data, dims, -1);
  Density out;
  out.angle.resize(J);
  out.value.resize(J);
  for (std::size_t i = 0; i < J; ++i) {
    out.angle[i] = two_pi * static_cast<double>(i) / static_cast<double>(J);
    out.value[i] = data[i].real();
  }
  return out;
}

SpectralReport classify(const CorrelationSequence& c, const Thresholds& t) {
  if (!(t.point > 0 && t.flatness > 0)) throw InvalidArgument("classify: thresholds must be positive");
  SpectralReport r;
  r.thresholds = t;
  r.wiener = wiener_statistic(c);
  const double c2 = c.c0 * c.c0;
  const double wn = r.wiener.empty() || c2 == 0.0 ? 0.0 : r.wiener.back() / c2;
  r.point_detected = wn > t.point;
  r.continuous_indicator = 1.0 - wn;
  if (c.values.size() >= 64) {
    r.density = spectral_density(c, Kernel::fejer);
    const double mean = simd::sum(r.density.value) / static_cast<double>(r.density.value.size());
    double dev = 0.0;
    for (double v : r.density.value) dev = std::max(dev, std::abs(v - mean));
    r.lebesgue_flatness = mean != 0.0 ? dev / std::abs(mean) : dev;
    r.lebesgue_like = !r.point_detected && r.lebesgue_flatness <= t.flatness;
  }
  return r;
}

std::string SpectralReport::to_text() const {
  std::ostringstream os;
  os << "[spectral_report]\n";
  os << "note = indicator, not proof\n";
  os << "N = " << wiener.size() << "\n";
  os << "wiener_last = " << fmt(wiener.empty() ? 0.0 : wiener.back()) << "\n";
  os << "point_detected = " << (point_detected ? "true" : "false") << "\n";
  os << "continuous_indicator = " << fmt(continuous_indicator) << "\n";
  os << "lebesgue_flatness = " << fmt(lebesgue_flatness) << "\n";
  os << "lebesgue_like = " << (lebesgue_like ? "true" : "false") << "\n";
  os << "threshold_point = " << fmt(thresholds.point) << "\n";
  os << "threshold_flatness = " << fmt(thresholds.flatness) << "\n";
  return os.str();
}

}  // namespace mk
