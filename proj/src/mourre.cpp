#include "mourrekit/mourre.hpp"

#include <gsl/gsl_integration.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "mourrekit/errors.hpp"
#include "mourrekit/quadrature.hpp"

namespace mk {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

std::string fmt(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

int default_resolution(int d) { return d == 1 ? 4096 : (d == 2 ? 512 : 64); }

int pow2_at_least(int v) {
  int r = 2;
  while (r < v) r *= 2;
  return r;
}

}  // namespace

std::string describe(const MourreSystem& system) {
  std::ostringstream os;
  if (const auto* s = std::get_if<SkewProductSpec>(&system)) {
    os << "skew d=" << s->d << " dprime=" << s->dprime << " y=(";
    for (int i = 0; i < s->d; ++i) os << (i ? "," : "") << fmt(s->y[i]);
    os << ") m=(";
    for (std::size_t i = 0; i < s->m.size(); ++i) os << (i ? "," : "") << s->m[i];
    os << ")";
  } else {
    const auto& l = std::get<FurstenbergLevel>(system);
    os << "furstenberg d=" << l.spec.d << " y=" << fmt(l.spec.y) << " level=(" << l.j << "," << l.k << ")";
  }
  return os.str();
}

TrigPoly g_skew(const SkewProductSpec& spec) {
  SkewProductSpec s = spec;
  s.allow_degenerate = true;
  s.validate();
  if (s.degenerate()) throw DegenerateSpec("g_skew: N^T m = 0 violates the hypothesis N^T m != 0");
  const double c = s.char_speed();
  TrigPoly g = TrigPoly::constant(s.d, c) + lie_derivative(s.cocycle_phase(), s.y.values());
  g *= two_pi * two_pi * c;
  return g;
}

TrigPoly g_furstenberg(const FurstenbergSpec& spec, int j) {
  spec.validate();
  if (j < 2 || j > spec.d) throw InvalidArgument("g_furstenberg: need 2 <= j <= d");
  const int D = j - 1;
  std::vector<double> e(static_cast<std::size_t>(D), 0.0);
  e.back() = 1.0;
  // lie_derivative along a unit axis is the partial derivative
  const TrigPoly dh = lie_derivative(spec.h_of(D), e);
  TrigPoly g = TrigPoly::constant(D, 1.0) + dh * (1.0 / spec.coeff(j, j - 1));
  return g;
}

Truncated g_timechange(const TimeChangeSpec& spec, double tol) {
  const Truncated lf = log_positive(spec.f, tol);
  TrigPoly g = TrigPoly::constant(spec.dim(), 0.5) - lie_derivative(lf.poly, spec.y2) * 0.5;
  double ny2 = 0.0;
  for (double v : spec.y2) ny2 += v * v;
  // The derivative of the truncation error is bounded through the Cauchy estimate
  // already folded into the residual of ln f; report the residual scaled by |y2|.
  return {g, 0.5 * lf.residual_bound * (1.0 + std::sqrt(ny2))};
}

const char* status_name(CertStatus s) {
  switch (s) {
    case CertStatus::certified:
      return "certified";
    case CertStatus::failed:
      return "failed";
    case CertStatus::degenerate:
      return "degenerate";
  }
  return "unknown";
}

void MourreCertificate::add_residual(const std::string& name, Residual r) {
  residuals[name] = r;
  if (status == CertStatus::certified && !r.ok()) {
    status = CertStatus::failed;
    message = "residual '" + name + "' exceeds its tolerance";
  }
}

std::string MourreCertificate::to_text() const {
  std::ostringstream os;
  os << "[certificate]\n";
  os << "system = " << descriptor << "\n";
  os << "status = " << status_name(status) << "\n";
  os << "n_star = " << n_star << "\n";
  os << "a = " << fmt(a) << "\n";
  os << "limit = " << fmt(limit) << "\n";
  os << "min_fraction = " << fmt(min_fraction) << "\n";
  os << "message = " << message << "\n";
  os << "\n[certification_table]\n";
  os << "n,certified_infimum,grid_min,gap,deviation\n";
  for (const auto& r : table)
    os << r.n << ',' << fmt(r.certified_infimum) << ',' << fmt(r.grid_min) << ',' << fmt(r.gap) << ','
       << fmt(r.deviation) << "\n";
  os << "\n[deviation_curve]\n";
  os << deviation_curve.to_csv();
  os << "\n[residuals]\n";
  os << "name,value,tolerance,ok\n";
  for (const auto& [name, r] : residuals)
    os << name << ',' << fmt(r.value) << ',' << fmt(r.tolerance) << ',' << (r.ok() ? "true" : "false") << "\n";
  return os.str();
}

// ---------------------------------------------------------------- certification

namespace {

std::vector<long> schedule(long n_max) {
  std::vector<long> ns;
  for (long n = 1; n <= n_max; n *= 2) ns.push_back(n);
  return ns;
}

// Lipschitz majorant of T^{-l} on T^D: entrywise |b| + sup|dh| below a unit diagonal.
std::vector<double> inverse_jacobian_majorant(const FurstenbergSpec& spec, int D) {
  std::vector<double> B(static_cast<std::size_t>(D * D), 0.0);
  for (int i = 0; i < D; ++i) B[static_cast<std::size_t>(i * D + i)] = 1.0;
  for (int j = 2; j <= D; ++j) {
    const TrigPoly& h = spec.h_of(j - 1);
    for (int k = 1; k < j; ++k) {
      std::vector<double> e(static_cast<std::size_t>(j - 1), 0.0);
      e[static_cast<std::size_t>(k - 1)] = 1.0;
      const double sup_dh = lie_derivative(h, e).l1_norm();
      B[static_cast<std::size_t>((j - 1) * D + (k - 1))] = std::abs(spec.coeff(j, k)) + sup_dh;
    }
  }
  return B;
}

double frobenius(const std::vector<double>& B) {
  double s = 0.0;
  for (double v : B) s += v * v;
  return std::sqrt(s);
}

std::vector<double> matmul(const std::vector<double>& a, const std::vector<double>& b, int D) {
  std::vector<double> c(static_cast<std::size_t>(D * D), 0.0);
  for (int i = 0; i < D; ++i)
    for (int k = 0; k < D; ++k)
      for (int j = 0; j < D; ++j)
        c[static_cast<std::size_t>(i * D + j)] += a[static_cast<std::size_t>(i * D + k)] * b[static_cast<std::size_t>(k * D + j)];
  return c;
}

MourreCertificate certify_translation(MourreCertificate cert, const TrigPoly& g, const FrequencyVector& y,
                                      const CertifyOptions& opt) {
  const int res = opt.resolution > 0 ? opt.resolution : default_resolution(g.dim());
  const auto ns = schedule(opt.n_max);
  cert.deviation_curve = deviation_curve(g, y, ns);
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const TrigPoly gn = birkhoff_exact(g, y, ns[i]);
    const Infimum inf = certified_infimum(gn, std::max(res, 2 * gn.degree() + 2));
    cert.table.push_back({ns[i], inf.lower_bound, inf.grid_min, inf.gap, cert.deviation_curve.sup_deviation[i]});
    if (inf.lower_bound > 0 && inf.lower_bound > opt.min_fraction * cert.limit) {
      cert.n_star = ns[i];
      cert.a = inf.lower_bound;
      cert.status = CertStatus::certified;
      return cert;
    }
  }
  return cert;
}

MourreCertificate certify_furstenberg_map(MourreCertificate cert, const TrigPoly& g, const FurstenbergSpec& spec,
                                          int D, const CertifyOptions& opt) {
  const int res = pow2_at_least(std::max(opt.resolution > 0 ? opt.resolution : default_resolution(D),
                                         2 * g.degree() + 2));
  const TorusGrid grid(D, res);
  const auto B = inverse_jacobian_majorant(spec, D);
  const double lip_g = g.lipschitz_bound();
  const PointFunction ge = [&](std::span<const double> x) { return evaluate(g, x).real(); };
  const InverseMap inv = [&](double* x) { furstenberg_apply_block(spec, D, x, Direction::inverse); };
  std::vector<double> Bl(static_cast<std::size_t>(D * D), 0.0);
  for (int i = 0; i < D; ++i) Bl[static_cast<std::size_t>(i * D + i)] = 1.0;
  double lip_sum = 0.0;
  long counted = 0;
  for (long n : schedule(opt.n_max)) {
    for (; counted < n; ++counted) {
      lip_sum += frobenius(Bl);
      Bl = matmul(Bl, B, D);
    }
    const GridFunction gn = birkhoff_map(ge, inv, grid, n);
    std::size_t best = 0;
    double dev = 0.0;
    for (std::size_t i = 0; i < gn.samples.size(); ++i) {
      if (gn.samples[i].real() < gn.samples[best].real()) best = i;
      dev = std::max(dev, std::abs(gn.samples[i].real() - cert.limit));
    }
    CertRow row;
    row.n = n;
    row.grid_min = gn.samples[best].real();
    row.gap = lip_g * (lip_sum / double(n)) * std::sqrt(double(D)) / (2.0 * res);
    row.certified_infimum = row.grid_min - row.gap;
    row.deviation = dev;
    cert.table.push_back(row);
    cert.deviation_curve.n_values.push_back(double(n));
    cert.deviation_curve.sup_deviation.push_back(dev);
    if (row.certified_infimum > 0 && row.certified_infimum > opt.min_fraction * cert.limit) {
      cert.n_star = n;
      cert.a = row.certified_infimum;
      cert.status = CertStatus::certified;
      return cert;
    }
  }
  return cert;
}

}  // namespace

MourreCertificate certify(const MourreSystem& system, const CertifyOptions& opt) {
  if (opt.n_max < 1) throw InvalidArgument("certify: n_max must be at least 1");
  if (!(opt.conjugate_scale > 0)) throw InvalidArgument("certify: conjugate scale must be positive");
  if (!(opt.min_fraction >= 0 && opt.min_fraction < 1)) throw InvalidArgument("certify: min_fraction must lie in [0, 1)");
  MourreCertificate cert;
  cert.descriptor = describe(system);
  cert.min_fraction = opt.min_fraction;
  cert.status = CertStatus::failed;
  if (const auto* s = std::get_if<SkewProductSpec>(&system)) {
    SkewProductSpec spec = *s;
    spec.allow_degenerate = true;
    spec.validate();
    if (spec.degenerate()) {
      cert.status = CertStatus::degenerate;
      cert.message = "N^T m = 0: the character violates the hypothesis N^T m != 0, no conjugate operator of this form";
      return cert;
    }
    const TrigPoly g = g_skew(spec) * opt.conjugate_scale;
    const double speed = two_pi * spec.char_speed();
    cert.limit = speed * speed * opt.conjugate_scale;
    cert.deviation_curve.limit_value = cert.limit;
    cert = certify_translation(std::move(cert), g, spec.y, opt);
    cert.residuals["mean_g"] = {std::abs(g.mean().real() - cert.limit), 1e-12 * cert.limit};
  } else {
    const auto& level = std::get<FurstenbergLevel>(system);
    level.validate();
    const TrigPoly g = g_furstenberg(level.spec, level.j) * opt.conjugate_scale;
    cert.limit = opt.conjugate_scale;
    cert.deviation_curve.limit_value = cert.limit;
    const int D = level.base_dim();
    if (D == 1)
      cert = certify_translation(std::move(cert), g, FrequencyVector({level.spec.y}), opt);
    else
      cert = certify_furstenberg_map(std::move(cert), g, level.spec, D, opt);
    cert.residuals["mean_g"] = {std::abs(g.mean().real() - cert.limit), 1e-12 * cert.limit};
  }
  if (cert.status == CertStatus::certified) {
    cert.message = "strict estimate certified at n_star";
    for (const auto& [name, r] : cert.residuals)
      if (!r.ok()) {
        cert.status = CertStatus::failed;
        cert.message = "residual '" + name + "' exceeds its tolerance";
      }
  } else {
    cert.message = "no n <= n_max reached the certification threshold";
  }
  return cert;
}

// ---------------------------------------------------------------- commutator checks

CommutatorCheck commutator_residual(const MourreSystem& system, const FreqWindow& window, int n, int trials,
                                    std::uint64_t seed, double phase_tol, double conjugate_scale) {
  if (n < 1) throw InvalidArgument("commutator_residual: n must be at least 1");
  if (trials < 1) throw InvalidArgument("commutator_residual: trials must be positive");
  OperatorMatrix U(window), A(window);
  TrigPoly gn;
  if (const auto* s = std::get_if<SkewProductSpec>(&system)) {
    U = assemble_koopman(*s, window, phase_tol);
    A = conjugate_diagonal(*s, window);
    gn = birkhoff_exact(g_skew(*s), s->y, n);
  } else {
    const auto& level = std::get<FurstenbergLevel>(system);
    U = assemble_koopman(level, window, phase_tol);
    A = conjugate_diagonal(level, window);
    const TrigPoly g = g_furstenberg(level.spec, level.j);
    const int D = level.base_dim();
    if (D == 1) {
      gn = birkhoff_exact(g, FrequencyVector({level.spec.y}), n);
    } else {
      const TorusGrid grid(D, pow2_at_least(4 * (g.degree() + 4) * n));
      const PointFunction ge = [&](std::span<const double> x) { return evaluate(g, x).real(); };
      const InverseMap inv = [&](double* x) { furstenberg_apply_block(level.spec, D, x, Direction::inverse); };
      gn = real_part(to_trigpoly(birkhoff_map(ge, inv, grid, n), 1e-15));
    }
  }
  const long need = static_cast<long>(n) * U.band();
  if (window.margin() < need)
    throw InvalidArgument("commutator_residual: margin " + std::to_string(window.margin()) +
                          " below required n*band(U) = " + std::to_string(need));
  A = conjugate_scale * A;
  gn *= conjugate_scale;
  const OperatorMatrix An = average_conjugate(A, U, n);
  const OperatorMatrix G = multiplication_matrix(gn, window);
  std::mt19937_64 rng(seed);
  const int support = window.half_width() - window.margin();
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const StateVector v = StateVector::random_unit(window, support, rng);
    const StateVector w = apply(U, v);
    const StateVector r = apply(An, w) - apply(U, apply(An, v)) - apply(G, w);
    worst = std::max(worst, r.norm());
  }
  double a_max = 0.0;
  for (const cplx& v : A.vals()) a_max = std::max(a_max, std::abs(v));
  CommutatorCheck out;
  out.residual = worst;
  out.band = U.band();
  out.contract = n * U.residual_bound * (1.0 + a_max) + 1e-10;
  return out;
}

double bridge_check(const Eigen::MatrixXcd& H, const Eigen::MatrixXcd& A, int quad_order) {
  if (H.rows() != H.cols() || A.rows() != H.rows() || A.cols() != H.cols())
    throw InvalidArgument("bridge_check: matrices must be square and of equal size");
  if (H.rows() > 64) throw InvalidArgument("bridge_check: dimension at most 64");
  if (quad_order < 1) throw InvalidArgument("bridge_check: quadrature order must be positive");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
  const Eigen::MatrixXcd& V = es.eigenvectors();
  const Eigen::VectorXd& lam = es.eigenvalues();
  const cplx I(0.0, 1.0);
  auto expH = [&](double s) {  // e^{i s H}
    Eigen::VectorXcd d(lam.size());
    for (Eigen::Index i = 0; i < lam.size(); ++i) d[i] = std::exp(I * s * lam[i]);
    return Eigen::MatrixXcd(V * d.asDiagonal() * V.adjoint());
  };
  const Eigen::MatrixXcd U = expH(-1.0);
  const Eigen::MatrixXcd lhs = U.adjoint() * (A * U - U * A);
  const Eigen::MatrixXcd C = I * (H * A - A * H);
  const auto& gl = quad::GaussLegendre::get(quad_order);
  Eigen::MatrixXcd rhs = Eigen::MatrixXcd::Zero(H.rows(), H.cols());
  for (int i = 0; i < quad_order; ++i) {
    const double s = 0.5 * (gl.nodes[i] + 1.0);
    const Eigen::MatrixXcd E = expH(s);
    rhs += (0.5 * gl.weights[i]) * (E * C * E.adjoint());
  }
  const Eigen::MatrixXcd D = lhs - rhs;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ns(D.adjoint() * D, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, ns.eigenvalues().maxCoeff()));
}

double bridge_check(int dim, int quad_order, std::uint64_t seed) {
  if (dim < 1 || dim > 64) throw InvalidArgument("bridge_check: need 1 <= dim <= 64");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  auto hermitian = [&]() {
    Eigen::MatrixXcd X(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) X(i, j) = cplx(nd(rng), nd(rng));
    return Eigen::MatrixXcd(0.5 * (X + X.adjoint()));
  };
  const Eigen::MatrixXcd H = hermitian();
  const Eigen::MatrixXcd A = hermitian();
  return bridge_check(H, A, quad_order);
}

// ---------------------------------------------------------------- time-change field

ConjugateField conjugate_field(const TimeChangeSpec& spec, double L, const TorusGrid& grid, double tol) {
  if (grid.dim() != spec.dim()) throw InvalidArgument("conjugate_field: grid dimension mismatch");
  const TrigPoly g = g_timechange(spec, 1e-13).poly;
  const int d = spec.dim();
  GridFunction q{grid, std::vector<cplx>(grid.size())};
  GridFunction gl{grid, std::vector<cplx>(grid.size())};
  GridFunction gt{grid, std::vector<cplx>(grid.size())};
  const GridFunction fs = sample(spec.f, grid);
  const GridFunction gs = sample(g, grid);
  const GridFunction dfs = sample(lie_derivative(spec.f, spec.y.values()), grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const TimeAverage t = time_averages_at(g, spec, grid.point(i), L, tol);
    gl.samples[i] = t.g_L;
    gt.samples[i] = t.g_tilde;
    q.samples[i] = t.g_tilde * fs.samples[i].real();
  }
  ConjugateField out{{}, GridFunction{grid, {}}, GridFunction{grid, std::vector<cplx>(grid.size())}, 0.0};
  for (int a = 0; a < d; ++a) {
    GridFunction comp{grid, std::vector<cplx>(grid.size())};
    for (std::size_t i = 0; i < grid.size(); ++i)
      comp.samples[i] = spec.y2[static_cast<std::size_t>(a)] + 2.0 * q.samples[i].real() * spec.y[a];
    out.field.push_back(std::move(comp));
  }
  GridFunction div = spectral_derivative(q, spec.y.values());
  for (auto& v : div.samples) v = 2.0 * v.real();
  out.divergence = std::move(div);
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double e = 2.0 * gt.samples[i].real() * dfs.samples[i].real() +
                     2.0 * (gs.samples[i].real() - gl.samples[i].real());
    out.expected.samples[i] = e;
    worst = std::max(worst, std::abs(out.divergence.samples[i].real() - e));
  }
  out.divergence_residual = worst;
  return out;
}

double quadratic_form_diagnostic(const std::vector<double>& h, const TrigPoly& g, const FreqWindow& window,
                                 Interval J) {
  if (h.size() != window.size()) throw InvalidArgument("quadratic_form_diagnostic: h must match the window");
  if (!(J.lo > 0 && J.hi >= J.lo)) throw InvalidArgument("quadratic_form_diagnostic: J must lie in (0, inf)");
  if (!g.is_real()) throw InvalidArgument("quadratic_form_diagnostic: g must be real");
  const int interior = window.half_width() - g.degree();
  std::vector<std::size_t> sel;
  for (std::size_t i = 0; i < window.size(); ++i) {
    const double h2 = h[i] * h[i];
    if (window.linf(i) <= interior && h2 >= J.lo && h2 <= J.hi) sel.push_back(i);
  }
  if (sel.empty()) throw EmptySelection("quadratic_form_diagnostic: no interior frequency with h^2 in J");
  if (sel.size() > 4096) throw InvalidArgument("quadratic_form_diagnostic: selection too large for a dense eigensolve");
  const Infimum inf = certified_infimum(g, std::max(default_resolution(g.dim()), 2 * g.degree() + 2));
  const OperatorMatrix G = multiplication_matrix(g, window);
  const Eigen::Index m = static_cast<Eigen::Index>(sel.size());
  Eigen::MatrixXcd Q(m, m);
  for (Eigen::Index a = 0; a < m; ++a)
    for (Eigen::Index b = 0; b < m; ++b) {
      const double s = h[sel[a]] + h[sel[b]];
      Q(a, b) = G.entry(sel[a], sel[b]) * s * s;
    }
  Q = 0.5 * (Q + Q.adjoint()).eval();
  Q -= (2.0 * J.lo * inf.lower_bound) * Eigen::MatrixXcd::Identity(m, m);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(Q, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace mk
