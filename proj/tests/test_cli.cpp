#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "mourrekit/cli/config.hpp"

namespace fs = std::filesystem;

namespace {

std::string data(const std::string& name) { return std::string(MK_TEST_DATA) + "/" + name; }

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("mk_cli_" + name);
  fs::remove_all(p);
  return p;
}

int run(const std::string& sub, const std::string& config, const fs::path& out, const std::string& extra = "") {
  const std::string cmd = std::string(MK_TOOL_PATH) + " " + sub + " --config " + data(config) + " --out " +
                          out.string() + " " + extra + " > " + (out.string() + ".log") + " 2>&1";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config parsing rejects unknown keys and bad values") {
  using mk::cli::ConfigError;
  CHECK_THROWS_AS(mk::cli::load_config(data("bad_unknown_key.json")), ConfigError);
  CHECK_THROWS_AS(mk::cli::load_config(data("bad_syntax.json")), ConfigError);
  CHECK_THROWS_AS(mk::cli::load_config(data("bad_tolerance.json")), ConfigError);
  CHECK_THROWS_AS(mk::cli::parse_config(R"({"system": {"class": "nope"}})"), ConfigError);
  CHECK_THROWS_AS(mk::cli::parse_config(R"({"system": {"class": "skew", "d": 1}})"), ConfigError);
  const auto cfg = mk::cli::load_config(data("skew_harmonic.json"));
  CHECK(cfg.skew.has_value());
  CHECK(cfg.window.M == 128);
  CHECK(cfg.resolved.find("\"n_max\": 1024") != std::string::npos);
  CHECK(mk::cli::parse_config(cfg.resolved).resolved == cfg.resolved);
}

TEST_CASE("certify exit codes") {
  const fs::path a = scratch("harm");
  CHECK(run("certify", "skew_harmonic.json", a) == 0);
  const std::string rep = slurp(a / "certificate.txt");
  CHECK(rep.find("status = certified") != std::string::npos);
  CHECK(rep.find("[config]") != std::string::npos);
  CHECK(slurp(a / "certification.csv").rfind("n,certified_infimum,grid_min,certification_gap", 0) == 0);

  const fs::path d = scratch("deg");
  CHECK(run("certify", "skew_degenerate.json", d) == 4);
  CHECK(slurp(d / "certificate.txt").find("N^T m != 0") != std::string::npos);

  const fs::path f = scratch("furst");
  CHECK(run("certify", "furstenberg.json", f) == 0);
  // level 3: certified, commutator check reported as skipped rather than a config error
  const fs::path f3 = scratch("furst3");
  CHECK(run("certify", "furstenberg3.json", f3) == 0);
  CHECK(slurp(f3 / "certificate.txt").find("skipped = required margin") != std::string::npos);

  CHECK(run("certify", "bad_unknown_key.json", scratch("bad")) == 3);
  CHECK(run("certify", "bad_syntax.json", scratch("bad2")) == 3);
  CHECK(run("certify", "timechange_unit.json", scratch("bad3")) == 3);
}

TEST_CASE("spectrum pipeline") {
  const fs::path a = scratch("flat");
  CHECK(run("spectrum", "skew_flat.json", a) == 0);
  const std::string rep = slurp(a / "spectral_report.txt");
  CHECK(rep.find("point_detected = false") != std::string::npos);
  CHECK(rep.find("consistent = true") != std::string::npos);
  CHECK(slurp(a / "correlations.csv").rfind("k,re,im,budget\n", 0) == 0);
  CHECK(slurp(a / "density.csv").rfind("angle,density,budget\n", 0) == 0);

  const fs::path r = scratch("rot");
  CHECK(run("spectrum", "rotation.json", r) == 0);
  CHECK(slurp(r / "spectral_report.txt").find("point_detected = true") != std::string::npos);

  CHECK(run("spectrum", "overflow.json", scratch("ovf")) == 3);
  CHECK(run("spectrum", "bad_syntax.json", scratch("ovf2")) == 3);
}

TEST_CASE("timechange pipeline") {
  const fs::path a = scratch("tc1");
  CHECK(run("timechange", "timechange_circle.json", a) == 0);
  CHECK(slurp(a / "timechange_residuals.csv").find("invariant_measure_average") != std::string::npos);
  const fs::path u = scratch("tcu");
  CHECK(run("timechange", "timechange_unit.json", u) == 0);
  CHECK(slurp(u / "gL_convergence.csv").find(",0,") != std::string::npos);
}

TEST_CASE("identical runs are byte identical") {
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  CHECK(run("certify", "skew_harmonic.json", a, "--seed 99") == 0);
  CHECK(run("certify", "skew_harmonic.json", b, "--seed 99") == 0);
  for (const char* f : {"certificate.txt", "certification.csv", "residuals.csv"}) CHECK(slurp(a / f) == slurp(b / f));
  const fs::path c = scratch("det_c"), d = scratch("det_d");
  CHECK(run("spectrum", "skew_flat.json", c) == 0);
  CHECK(run("spectrum", "skew_flat.json", d) == 0);
  for (const char* f : {"spectral_report.txt", "correlations.csv", "wiener.csv", "density.csv"})
    CHECK(slurp(c / f) == slurp(d / f));
}
