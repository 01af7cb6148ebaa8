#include "mourrekit/cli/commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <utility>

#include "mourrekit/cli/report.hpp"
#include "mourrekit/errors.hpp"
#include "mourrekit/ergodic.hpp"
#include "mourrekit/simd/kernels.hpp"

namespace mk::cli {

namespace {

std::string join(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

MourreSystem mourre_system(const RunConfig& cfg) {
  if (cfg.skew) return *cfg.skew;
  if (cfg.furstenberg) return *cfg.furstenberg;
  throw ConfigError("certify needs a skew or furstenberg system, got '" + cfg.system_class + "'");
}

FreqWindow base_window(const RunConfig& cfg, int margin) {
  const int dim = cfg.skew ? cfg.skew->d : cfg.furstenberg->base_dim();
  return FreqWindow(dim, cfg.window.M, margin);
}

OperatorMatrix koopman(const RunConfig& cfg, const FreqWindow& w) {
  if (cfg.skew) return assemble_koopman(*cfg.skew, w, cfg.window.tol);
  if (cfg.furstenberg) return assemble_koopman(*cfg.furstenberg, w, cfg.window.tol);
  return translation_koopman(*cfg.rotation, w);
}

std::string certification_csv(const MourreCertificate& c) {
  std::ostringstream os;
  os << "n,certified_infimum,grid_min,certification_gap,sup_deviation,limit\n";
  for (const auto& r : c.table)
    os << r.n << ',' << num(r.certified_infimum) << ',' << num(r.grid_min) << ',' << num(r.gap) << ','
       << num(r.deviation) << ',' << num(c.limit) << "\n";
  return os.str();
}

std::string residual_csv(const std::map<std::string, Residual>& rs) {
  std::ostringstream os;
  os << "name,value,tolerance,ok\n";
  for (const auto& [name, r] : rs)
    os << name << ',' << num(r.value) << ',' << num(r.tolerance) << ',' << (r.ok() ? "true" : "false") << "\n";
  return os.str();
}

}  // namespace

int cmd_certify(const RunConfig& cfg, const std::string& out_dir, std::uint64_t seed, std::ostream& log) {
  const MourreSystem system = mourre_system(cfg);
  CertifyOptions opt;
  opt.n_max = cfg.mourre.n_max;
  opt.resolution = cfg.mourre.resolution;
  opt.min_fraction = cfg.mourre.min_fraction;
  opt.conjugate_scale = cfg.mourre.conjugate_scale;
  MourreCertificate cert = certify(system, opt);

  Section comm("commutator");
  if (cert.status != CertStatus::degenerate && cfg.mourre.check_commutator) {
    const int dim = cfg.skew ? cfg.skew->d : cfg.furstenberg->base_dim();
    if (dim > 2) {
      comm.add("skipped", "windows beyond dimension 2 are not assembled");
    } else {
      int margin = cfg.window.margin;
      if (margin < 0) margin = cfg.mourre.commutator_n * koopman(cfg, base_window(cfg, 0)).band();
      if (margin >= cfg.window.M) {
        // the band of level-3 phases grows with M, so enlarging the window does not help
        comm.add("skipped", "required margin " + std::to_string(margin) + " does not fit in M=" +
                                std::to_string(cfg.window.M));
      } else {
        const FreqWindow w = base_window(cfg, margin);
        const CommutatorCheck chk = commutator_residual(system, w, cfg.mourre.commutator_n, cfg.mourre.trials, seed,
                                                        cfg.window.tol, cfg.mourre.conjugate_scale);
        comm.add("n", cfg.mourre.commutator_n).add("M", cfg.window.M).add("margin", margin).add("band", chk.band);
        comm.add("trials", cfg.mourre.trials).add("residual", chk.residual).add("contract", chk.contract);
        cert.add_residual("commutator", {chk.residual, chk.contract});
      }
    }
  } else {
    comm.add("skipped", cert.status == CertStatus::degenerate ? "degenerate system" : "disabled in config");
  }

  std::string report = cert.to_text() + "\n" + comm.str() + "\n" + config_section(cfg.resolved, seed);
  if (cfg.output.text) atomic_write(join(out_dir, "certificate.txt"), report);
  if (cfg.output.csv) {
    atomic_write(join(out_dir, "certification.csv"), certification_csv(cert));
    atomic_write(join(out_dir, "residuals.csv"), residual_csv(cert.residuals));
  }
  log << "status " << status_name(cert.status) << ", n_star " << cert.n_star << ", a " << num(cert.a) << "\n";
  if (!cert.message.empty()) log << cert.message << "\n";
  switch (cert.status) {
    case CertStatus::certified:
      return exit_ok;
    case CertStatus::degenerate:
      return exit_degenerate;
    case CertStatus::failed:
      break;
  }
  return exit_failed;
}

int cmd_spectrum(const RunConfig& cfg, const std::string& out_dir, std::uint64_t seed, std::ostream& log) {
  if (cfg.timechange) throw ConfigError("spectrum needs a skew, furstenberg or rotation system");
  const auto& sc = cfg.spectral;
  std::optional<CorrelationSequence> matrix, quad;
  if (sc.path != "quadrature") {
    int dim = 1;
    if (cfg.skew) dim = cfg.skew->d;
    if (cfg.furstenberg) dim = cfg.furstenberg->base_dim();
    if (cfg.rotation) dim = cfg.rotation->dim();
    const FreqWindow w(dim, cfg.window.M, 0);
    Freq phi(static_cast<std::size_t>(dim), 0);
    if (cfg.rotation) phi[0] = 1;
    if (sc.phi) phi = *sc.phi;
    if (!w.contains(phi)) throw ConfigError("spectral.phi: outside the window or wrong dimension");
    const OperatorMatrix U = koopman(cfg, w);
    matrix = correlations_matrix(U, StateVector::basis(w, phi), sc.N, sc.accept_leakage);
  }
  if (sc.path != "matrix") {
    const int res = sc.quadrature_resolution > 0 ? sc.quadrature_resolution : quadrature_resolution(*cfg.skew, sc.N);
    quad = correlations_quadrature(*cfg.skew, sc.N, TorusGrid(cfg.skew->d, res));
  }
  const CorrelationSequence& c = matrix ? *matrix : *quad;
  SpectralReport rep = classify(c, sc.thresholds);
  const Density dens = spectral_density(c, sc.kernel);
  // each density sample sums at most 2N weighted correlations
  const double dens_budget = 2.0 * static_cast<double>(c.values.size()) * c.budget;

  Section paths("paths");
  paths.add("primary", c.source).add("N", sc.N).add("budget", c.budget);
  int code = exit_ok;
  if (matrix && quad) {
    double diff = 0.0;
    for (std::size_t k = 0; k < matrix->values.size(); ++k)
      diff = std::max(diff, std::abs(matrix->values[k] - quad->values[k]));
    const double allowed = matrix->budget + quad->budget;
    paths.add("quadrature_budget", quad->budget).add("max_path_difference", diff).add("combined_budget", allowed);
    paths.add("consistent", diff <= allowed);
    if (!(diff <= allowed)) code = exit_failed;
  }
  Section kern("density");
  kern.add("kernel", kernel_name(sc.kernel)).add("samples", static_cast<long>(dens.value.size()));
  kern.add("budget", dens_budget);

  if (cfg.output.text) {
    const std::string report = rep.to_text() + "\n" + paths.str() + "\n" + kern.str() + "\n" +
                               config_section(cfg.resolved, seed);
    atomic_write(join(out_dir, "spectral_report.txt"), report);
  }
  if (cfg.output.csv) {
    atomic_write(join(out_dir, "correlations.csv"), c.to_csv());
    if (matrix && quad) atomic_write(join(out_dir, "correlations_quadrature.csv"), quad->to_csv());
    std::ostringstream w;
    w << "n,wiener,budget\n";
    // |c_k|^2 moves by at most 2 c0 budget + budget^2
    const double wb = 2.0 * c.c0 * c.budget + c.budget * c.budget;
    for (std::size_t i = 0; i < rep.wiener.size(); ++i) w << i + 1 << ',' << num(rep.wiener[i]) << ',' << num(wb) << "\n";
    atomic_write(join(out_dir, "wiener.csv"), w.str());
    std::ostringstream d;
    d << "angle,density,budget\n";
    for (std::size_t i = 0; i < dens.value.size(); ++i)
      d << num(dens.angle[i]) << ',' << num(dens.value[i]) << ',' << num(dens_budget) << "\n";
    atomic_write(join(out_dir, "density.csv"), d.str());
  }
  log << "point_detected " << (rep.point_detected ? "true" : "false") << ", flatness " << num(rep.lebesgue_flatness)
      << " (indicator, not proof)\n";
  return code;
}

int cmd_timechange(const RunConfig& cfg, const std::string& out_dir, std::uint64_t seed, std::ostream& log) {
  if (!cfg.timechange) throw ConfigError("timechange needs a timechange system");
  const TimeChangeSpec& spec = *cfg.timechange;
  const auto& tc = cfg.tc;
  const int d = spec.dim();
  const Truncated g = g_timechange(spec, 1e-13);
  std::map<std::string, Residual> res;

  std::ostringstream conv;
  conv << "L,sup_abs_gL_minus_half,quadrature_tol\n";
  const TorusGrid grid(d, tc.grid);
  double last_dev = 0.0;
  for (double L : tc.L) {
    const GridFunction gl = flow_average_gL(g.poly, spec, L, grid, tc.tol_gL);
    double dev = 0.0;
    for (const auto& v : gl.samples) dev = std::max(dev, std::abs(v.real() - 0.5));
    conv << num(L) << ',' << num(dev) << ',' << num(tc.tol_gL) << "\n";
    last_dev = dev;
  }
  res["gL_limit_half"] = {last_dev, tc.gL_tolerance};

  const DoubleAverage da = double_average_gtilde(g.poly, spec, tc.L_identity, grid, tc.tol_gtilde);
  const GridFunction gs = sample(g.poly, grid);
  double eq = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i)
    eq = std::max(eq, std::abs(da.flow_derivative.samples[i].real() - (gs.samples[i].real() - da.g_L.samples[i].real())));
  res["eq_gL_identity"] = {eq, 10.0 * tc.tol_gtilde};

  const ConjugateField cf = conjugate_field(spec, tc.L_identity, TorusGrid(d, tc.field_grid), tc.tol_gtilde);
  res["divergence_identity"] = {cf.divergence_residual, 50.0 * tc.tol_gtilde};

  Section birk("invariant_measure");
  if (tc.phi) {
    const TrigPoly& phi = *tc.phi;
    const double avg = flow_birkhoff_average(phi, spec, TorusPoint(tc.start), tc.horizon, 1e-10);
    // expected value int phi/f / int 1/f on a fine grid; both integrands are analytic
    const TorusGrid fine(d, d == 1 ? 1024 : 128);
    const GridFunction fv = sample(spec.f, fine);
    const GridFunction pv = sample(phi, fine);
    std::vector<double> num_v(fine.size()), den_v(fine.size());
    for (std::size_t i = 0; i < fine.size(); ++i) {
      den_v[i] = 1.0 / fv.samples[i].real();
      num_v[i] = pv.samples[i].real() * den_v[i];
    }
    const double expected = simd::sum(num_v) / simd::sum(den_v);
    birk.add("horizon", tc.horizon).add("flow_average", avg).add("expected", expected);
    res["invariant_measure_average"] = {std::abs(avg - expected), tc.birkhoff_tolerance};
  } else {
    birk.add("skipped", "no observable phi configured");
  }

  bool ok = true;
  for (const auto& [name, r] : res) ok = ok && r.ok();
  Section head("timechange");
  head.add("status", ok ? "passed" : "failed").add("g_truncation_bound", g.residual_bound);
  head.add("f_inf_certified", spec.f_inf).add("L_identity", tc.L_identity);
  std::ostringstream rt;
  rt << "name,value,tolerance,ok\n";
  Section rs("residuals");
  for (const auto& [name, r] : res) {
    rt << name << ',' << num(r.value) << ',' << num(r.tolerance) << ',' << (r.ok() ? "true" : "false") << "\n";
    rs.add(name, num(r.value) + " (tolerance " + num(r.tolerance) + ")");
  }
  if (cfg.output.text)
    atomic_write(join(out_dir, "timechange_report.txt"),
                 head.str() + "\n" + rs.str() + "\n" + birk.str() + "\n" + config_section(cfg.resolved, seed));
  if (cfg.output.csv) {
    atomic_write(join(out_dir, "gL_convergence.csv"), conv.str());
    atomic_write(join(out_dir, "timechange_residuals.csv"), rt.str());
  }
  log << "timechange " << (ok ? "passed" : "failed") << "\n";
  return ok ? exit_ok : exit_failed;
}

int run(int argc, char** argv) {
  CLI::App app{"mourrekit: commutator-method diagnostics for torus dynamics"};
  app.require_subcommand(1);
  std::string config_path, out_dir;
  std::uint64_t seed = 2024;
  std::vector<CLI::App*> subs;
  const std::pair<const char*, const char*> commands[] = {
      {"certify", "positive commutator schedule for a skew or Furstenberg system"},
      {"spectrum", "correlations, Wiener statistic and smoothed spectral density"},
      {"timechange", "time-change commutator function and its ergodic-average checks"}};
  for (const auto& [name, help] : commands) {
    CLI::App* s = app.add_subcommand(name, help);
    s->add_option("--config", config_path, "JSON configuration file")->required();
    s->add_option("--out", out_dir, "output directory (overrides output.directory)");
    s->add_option("--seed", seed, "seed for randomized checks");
    subs.push_back(s);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_config;
  }
  try {
    const RunConfig cfg = load_config(config_path);
    const std::string dir = out_dir.empty() ? cfg.output.directory : out_dir;
    if (subs[0]->parsed()) return cmd_certify(cfg, dir, seed, std::cout);
    if (subs[1]->parsed()) return cmd_spectrum(cfg, dir, seed, std::cout);
    return cmd_timechange(cfg, dir, seed, std::cout);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return exit_config;
  } catch (const DegenerateSpec& e) {
    std::cerr << "degenerate: " << e.what() << "\n";
    return exit_degenerate;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_config;
  }
}

}  // namespace mk::cli
