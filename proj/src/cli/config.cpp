#include "mourrekit/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

#include "mourrekit/errors.hpp"

namespace mk::cli {

namespace {

using json = nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& msg) { throw ConfigError(where + ": " + msg); }

void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) fail(where, "expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : j.items())
    if (!ok.count(k)) fail(where, "unknown key '" + k + "'");
}

double get_number(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(where, "expected a finite number");
  return v;
}

long get_integer(const json& j, const std::string& where) {
  if (!j.is_number_integer()) fail(where, "expected an integer");
  return j.get<long>();
}

bool get_bool(const json& j, const std::string& where) {
  if (!j.is_boolean()) fail(where, "expected true or false");
  return j.get<bool>();
}

std::string get_string(const json& j, const std::string& where) {
  if (!j.is_string()) fail(where, "expected a string");
  return j.get<std::string>();
}

std::vector<double> get_reals(const json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array of numbers");
  std::vector<double> v;
  for (std::size_t i = 0; i < j.size(); ++i) v.push_back(get_number(j[i], where + "[" + std::to_string(i) + "]"));
  return v;
}

std::vector<int> get_ints(const json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array of integers");
  std::vector<int> v;
  for (std::size_t i = 0; i < j.size(); ++i)
    v.push_back(static_cast<int>(get_integer(j[i], where + "[" + std::to_string(i) + "]")));
  return v;
}

double positive(double v, const std::string& where) {
  if (!(v > 0)) fail(where, "must be positive");
  return v;
}

// Trig polynomial object: "const", "cos" [[k.., amp]], "sin" [[k.., amp]],
// "terms" [[k.., re, im]], "exp" {poly} for exp of a real poly, "over_two_pi".
TrigPoly parse_poly(const json& j, int d, const std::string& where) {
  check_keys(j, where, {"const", "cos", "sin", "terms", "exp", "over_two_pi"});
  TrigPoly p(d);
  if (j.contains("const")) p += TrigPoly::constant(d, get_number(j["const"], where + ".const"));
  auto rows = [&](const char* key, std::size_t extra, auto&& add) {
    if (!j.contains(key)) return;
    const json& a = j[key];
    const std::string w = where + "." + key;
    if (!a.is_array()) fail(w, "expected an array of rows");
    for (std::size_t r = 0; r < a.size(); ++r) {
      const std::string wr = w + "[" + std::to_string(r) + "]";
      const std::vector<double> row = get_reals(a[r], wr);
      if (row.size() != static_cast<std::size_t>(d) + extra)
        fail(wr, "expected " + std::to_string(d) + " frequency entries and " + std::to_string(extra) + " values");
      Freq k(static_cast<std::size_t>(d));
      for (int i = 0; i < d; ++i) {
        if (row[static_cast<std::size_t>(i)] != std::nearbyint(row[static_cast<std::size_t>(i)]))
          fail(wr, "frequencies must be integers");
        k[static_cast<std::size_t>(i)] = static_cast<int>(row[static_cast<std::size_t>(i)]);
      }
      add(k, std::vector<double>(row.begin() + d, row.end()));
    }
  };
  rows("cos", 1, [&](const Freq& k, const std::vector<double>& v) { p += TrigPoly::cosine(k, v[0]); });
  rows("sin", 1, [&](const Freq& k, const std::vector<double>& v) { p += TrigPoly::sine(k, v[0]); });
  rows("terms", 2, [&](const Freq& k, const std::vector<double>& v) {
    p += TrigPoly::exponential(k, cplx(v[0], v[1]));
  });
  if (j.contains("over_two_pi") && get_bool(j["over_two_pi"], where + ".over_two_pi"))
    p *= 1.0 / (2.0 * std::numbers::pi);
  if (j.contains("exp")) {
    const TrigPoly inner = parse_poly(j["exp"], d, where + ".exp");
    if (!inner.is_real()) fail(where + ".exp", "exponent must be real");
    p += exp_real(inner, 1e-14).poly;
  }
  return p;
}

json poly_json(const TrigPoly& p) {
  json terms = json::array();
  for (const auto& [k, c] : p.coeffs()) {
    json row = json::array();
    for (int v : k) row.push_back(v);
    row.push_back(c.real());
    row.push_back(c.imag());
    terms.push_back(row);
  }
  return json{{"terms", terms}};
}

void parse_skew(const json& s, RunConfig& cfg, json& out) {
  check_keys(s, "system", {"class", "d", "dprime", "y", "N", "eta", "m", "allow_degenerate"});
  for (const char* k : {"d", "y", "N", "m"})
    if (!s.contains(k)) fail("system", std::string("skew system requires '") + k + "'");
  SkewProductSpec spec;
  spec.d = static_cast<int>(get_integer(s["d"], "system.d"));
  spec.dprime = s.contains("dprime") ? static_cast<int>(get_integer(s["dprime"], "system.dprime")) : 1;
  if (spec.d < 1 || spec.dprime < 1) fail("system", "d and dprime must be positive");
  spec.y = FrequencyVector(get_reals(s["y"], "system.y"));
  if (!s["N"].is_array()) fail("system.N", "expected dprime rows of d integers");
  for (std::size_t r = 0; r < s["N"].size(); ++r) spec.N.push_back(get_ints(s["N"][r], "system.N"));
  spec.m = get_ints(s["m"], "system.m");
  if (s.contains("eta")) {
    if (!s["eta"].is_array()) fail("system.eta", "expected dprime polynomials");
    for (std::size_t i = 0; i < s["eta"].size(); ++i)
      spec.eta.push_back(parse_poly(s["eta"][i], spec.d, "system.eta[" + std::to_string(i) + "]"));
  } else {
    spec.eta.assign(static_cast<std::size_t>(spec.dprime), TrigPoly(spec.d));
  }
  spec.allow_degenerate = true;
  spec.validate();
  spec.allow_degenerate = s.contains("allow_degenerate") && get_bool(s["allow_degenerate"], "system.allow_degenerate");
  json eta = json::array();
  for (const auto& e : spec.eta) eta.push_back(poly_json(e));
  out = json{{"class", "skew"}, {"d", spec.d},     {"dprime", spec.dprime}, {"y", get_reals(s["y"], "system.y")},
             {"N", spec.N},     {"eta", eta},      {"m", spec.m},           {"allow_degenerate", spec.allow_degenerate}};
  if (spec.y.rational_relation_detected()) out["diophantine_note"] = spec.y.diophantine_note();
  cfg.skew = std::move(spec);
}

void parse_furstenberg(const json& s, RunConfig& cfg, json& out) {
  check_keys(s, "system", {"class", "d", "y", "b", "h", "level"});
  for (const char* k : {"d", "y", "b", "h"})
    if (!s.contains(k)) fail("system", std::string("furstenberg system requires '") + k + "'");
  FurstenbergSpec spec;
  spec.d = static_cast<int>(get_integer(s["d"], "system.d"));
  if (spec.d < 2) fail("system.d", "furstenberg systems need d >= 2");
  spec.y = get_number(s["y"], "system.y");
  spec.b.assign(static_cast<std::size_t>(spec.d), std::vector<int>(static_cast<std::size_t>(spec.d), 0));
  if (!s["b"].is_array()) fail("system.b", "expected [j, k, value] entries");
  for (std::size_t i = 0; i < s["b"].size(); ++i) {
    const auto e = get_ints(s["b"][i], "system.b[" + std::to_string(i) + "]");
    if (e.size() != 3 || e[0] < 1 || e[0] > spec.d || e[1] < 1 || e[1] >= e[0])
      fail("system.b[" + std::to_string(i) + "]", "expected [j, k, value] with 1 <= k < j <= d");
    spec.b[static_cast<std::size_t>(e[0] - 1)][static_cast<std::size_t>(e[1] - 1)] = e[2];
  }
  if (!s["h"].is_array() || s["h"].size() != static_cast<std::size_t>(spec.d - 1))
    fail("system.h", "expected d-1 polynomials h_1..h_{d-1}");
  for (int i = 0; i < spec.d - 1; ++i)
    spec.h.push_back(parse_poly(s["h"][static_cast<std::size_t>(i)], i + 1, "system.h[" + std::to_string(i) + "]"));
  FurstenbergLevel level{spec, 2, 1};
  if (s.contains("level")) {
    check_keys(s["level"], "system.level", {"j", "k"});
    if (s["level"].contains("j")) level.j = static_cast<int>(get_integer(s["level"]["j"], "system.level.j"));
    if (s["level"].contains("k")) level.k = static_cast<int>(get_integer(s["level"]["k"], "system.level.k"));
  }
  level.validate();
  json b = json::array();
  for (int j = 2; j <= spec.d; ++j)
    for (int k = 1; k < j; ++k)
      if (spec.coeff(j, k) != 0) b.push_back(json::array({j, k, spec.coeff(j, k)}));
  json h = json::array();
  for (const auto& p : spec.h) h.push_back(poly_json(p));
  out = json{{"class", "furstenberg"}, {"d", spec.d}, {"y", spec.y}, {"b", b}, {"h", h},
             {"level", {{"j", level.j}, {"k", level.k}}}};
  cfg.furstenberg = std::move(level);
}

void parse_rotation(const json& s, RunConfig& cfg, json& out) {
  check_keys(s, "system", {"class", "y"});
  if (!s.contains("y")) fail("system", "rotation requires 'y'");
  const auto y = get_reals(s["y"], "system.y");
  if (y.empty()) fail("system.y", "must not be empty");
  cfg.rotation = FrequencyVector(y);
  out = json{{"class", "rotation"}, {"y", y}};
}

void parse_timechange(const json& s, RunConfig& cfg, json& out) {
  check_keys(s, "system", {"class", "y", "y2", "f"});
  for (const char* k : {"y", "f"})
    if (!s.contains(k)) fail("system", std::string("timechange system requires '") + k + "'");
  const auto y = get_reals(s["y"], "system.y");
  const int d = static_cast<int>(y.size());
  if (d < 1 || d > 2) fail("system.y", "time changes are supported on T^1 and T^2");
  std::vector<double> y2 = s.contains("y2") ? get_reals(s["y2"], "system.y2") : std::vector<double>(y.size(), 0.0);
  const TrigPoly f = parse_poly(s["f"], d, "system.f");
  try {
    cfg.timechange = make_time_change(FrequencyVector(y), f, y2);
  } catch (const mk::Error& e) {
    fail("system.f", e.what());
  }
  out = json{{"class", "timechange"}, {"y", y}, {"y2", y2}, {"f", poly_json(f)}};
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(root, "config", {"system", "window", "mourre", "spectral", "timechange", "output"});
  if (!root.contains("system")) fail("config", "missing 'system' section");
  RunConfig cfg;
  json resolved;
  const json& sys = root["system"];
  if (!sys.is_object() || !sys.contains("class")) fail("system", "missing 'class'");
  cfg.system_class = get_string(sys["class"], "system.class");
  json sys_out;
  try {
    if (cfg.system_class == "skew")
      parse_skew(sys, cfg, sys_out);
    else if (cfg.system_class == "furstenberg")
      parse_furstenberg(sys, cfg, sys_out);
    else if (cfg.system_class == "rotation")
      parse_rotation(sys, cfg, sys_out);
    else if (cfg.system_class == "timechange")
      parse_timechange(sys, cfg, sys_out);
    else
      fail("system.class", "expected skew, furstenberg, rotation or timechange");
  } catch (const mk::Error& e) {
    throw ConfigError(std::string("system: ") + e.what());
  }
  resolved["system"] = sys_out;

  if (root.contains("window")) {
    const json& w = root["window"];
    check_keys(w, "window", {"M", "margin", "tol"});
    if (w.contains("M")) cfg.window.M = static_cast<int>(get_integer(w["M"], "window.M"));
    if (w.contains("margin")) cfg.window.margin = static_cast<int>(get_integer(w["margin"], "window.margin"));
    if (w.contains("tol")) cfg.window.tol = positive(get_number(w["tol"], "window.tol"), "window.tol");
  }
  if (cfg.window.M < 1) fail("window.M", "must be positive");
  if (cfg.window.margin >= cfg.window.M) fail("window.margin", "must be below M");
  resolved["window"] = {{"M", cfg.window.M}, {"margin", cfg.window.margin}, {"tol", cfg.window.tol}};

  if (root.contains("mourre")) {
    const json& m = root["mourre"];
    check_keys(m, "mourre", {"n_max", "resolution", "min_fraction", "conjugate_scale", "check_commutator",
                             "commutator_n", "trials"});
    auto& o = cfg.mourre;
    if (m.contains("n_max")) o.n_max = get_integer(m["n_max"], "mourre.n_max");
    if (m.contains("resolution")) o.resolution = static_cast<int>(get_integer(m["resolution"], "mourre.resolution"));
    if (m.contains("min_fraction")) o.min_fraction = get_number(m["min_fraction"], "mourre.min_fraction");
    if (m.contains("conjugate_scale"))
      o.conjugate_scale = positive(get_number(m["conjugate_scale"], "mourre.conjugate_scale"), "mourre.conjugate_scale");
    if (m.contains("check_commutator")) o.check_commutator = get_bool(m["check_commutator"], "mourre.check_commutator");
    if (m.contains("commutator_n")) o.commutator_n = static_cast<int>(get_integer(m["commutator_n"], "mourre.commutator_n"));
    if (m.contains("trials")) o.trials = static_cast<int>(get_integer(m["trials"], "mourre.trials"));
  }
  {
    const auto& o = cfg.mourre;
    if (o.n_max < 1) fail("mourre.n_max", "must be at least 1");
    if (o.resolution < 0) fail("mourre.resolution", "must be nonnegative");
    if (!(o.min_fraction >= 0 && o.min_fraction < 1)) fail("mourre.min_fraction", "must lie in [0, 1)");
    if (o.commutator_n < 1) fail("mourre.commutator_n", "must be at least 1");
    if (o.trials < 1) fail("mourre.trials", "must be at least 1");
    resolved["mourre"] = {{"n_max", o.n_max},
                          {"resolution", o.resolution},
                          {"min_fraction", o.min_fraction},
                          {"conjugate_scale", o.conjugate_scale},
                          {"check_commutator", o.check_commutator},
                          {"commutator_n", o.commutator_n},
                          {"trials", o.trials}};
  }

  if (root.contains("spectral")) {
    const json& s = root["spectral"];
    check_keys(s, "spectral", {"N", "kernel", "point_threshold", "flatness_threshold", "path", "accept_leakage",
                               "quadrature_resolution", "phi"});
    auto& o = cfg.spectral;
    if (s.contains("N")) o.N = get_integer(s["N"], "spectral.N");
    if (s.contains("kernel")) {
      try {
        o.kernel = kernel_from_name(get_string(s["kernel"], "spectral.kernel"));
      } catch (const mk::Error& e) {
        fail("spectral.kernel", e.what());
      }
    }
    if (s.contains("point_threshold"))
      o.thresholds.point = positive(get_number(s["point_threshold"], "spectral.point_threshold"), "spectral.point_threshold");
    if (s.contains("flatness_threshold"))
      o.thresholds.flatness =
          positive(get_number(s["flatness_threshold"], "spectral.flatness_threshold"), "spectral.flatness_threshold");
    if (s.contains("path")) o.path = get_string(s["path"], "spectral.path");
    if (s.contains("accept_leakage")) o.accept_leakage = get_bool(s["accept_leakage"], "spectral.accept_leakage");
    if (s.contains("quadrature_resolution"))
      o.quadrature_resolution = static_cast<int>(get_integer(s["quadrature_resolution"], "spectral.quadrature_resolution"));
    if (s.contains("phi") && !s["phi"].is_null()) o.phi = get_ints(s["phi"], "spectral.phi");
  }
  {
    const auto& o = cfg.spectral;
    if (o.N < 64) fail("spectral.N", "must be at least 64");
    if (o.path != "matrix" && o.path != "quadrature" && o.path != "both")
      fail("spectral.path", "expected matrix, quadrature or both");
    if ((o.path != "matrix") && cfg.system_class != "skew") fail("spectral.path", "the quadrature path needs a skew system");
    resolved["spectral"] = {{"N", o.N},
                            {"kernel", kernel_name(o.kernel)},
                            {"point_threshold", o.thresholds.point},
                            {"flatness_threshold", o.thresholds.flatness},
                            {"path", o.path},
                            {"accept_leakage", o.accept_leakage},
                            {"quadrature_resolution", o.quadrature_resolution},
                            {"phi", o.phi ? json(*o.phi) : json(nullptr)}};
  }

  if (root.contains("timechange")) {
    const json& t = root["timechange"];
    check_keys(t, "timechange", {"L", "L_identity", "grid", "field_grid", "tol_gL", "tol_gtilde", "gL_tolerance",
                                 "phi", "horizon", "birkhoff_tolerance", "start"});
    auto& o = cfg.tc;
    if (t.contains("L")) o.L = get_reals(t["L"], "timechange.L");
    if (t.contains("L_identity")) o.L_identity = get_number(t["L_identity"], "timechange.L_identity");
    if (t.contains("grid")) o.grid = static_cast<int>(get_integer(t["grid"], "timechange.grid"));
    if (t.contains("field_grid")) o.field_grid = static_cast<int>(get_integer(t["field_grid"], "timechange.field_grid"));
    if (t.contains("tol_gL")) o.tol_gL = get_number(t["tol_gL"], "timechange.tol_gL");
    if (t.contains("tol_gtilde")) o.tol_gtilde = get_number(t["tol_gtilde"], "timechange.tol_gtilde");
    if (t.contains("gL_tolerance")) o.gL_tolerance = get_number(t["gL_tolerance"], "timechange.gL_tolerance");
    if (t.contains("horizon")) o.horizon = get_number(t["horizon"], "timechange.horizon");
    if (t.contains("birkhoff_tolerance")) o.birkhoff_tolerance = get_number(t["birkhoff_tolerance"], "timechange.birkhoff_tolerance");
    if (t.contains("start")) o.start = get_reals(t["start"], "timechange.start");
    if (t.contains("phi") && !t["phi"].is_null()) {
      if (!cfg.timechange) fail("timechange.phi", "needs a timechange system");
      o.phi = parse_poly(t["phi"], cfg.timechange->dim(), "timechange.phi");
    }
  }
  {
    auto& o = cfg.tc;
    if (o.L.empty()) fail("timechange.L", "must not be empty");
    for (double v : o.L) positive(v, "timechange.L");
    positive(o.L_identity, "timechange.L_identity");
    positive(o.tol_gL, "timechange.tol_gL");
    positive(o.tol_gtilde, "timechange.tol_gtilde");
    positive(o.gL_tolerance, "timechange.gL_tolerance");
    positive(o.horizon, "timechange.horizon");
    positive(o.birkhoff_tolerance, "timechange.birkhoff_tolerance");
    for (int g : {o.grid, o.field_grid})
      if (g < 2 || (g & (g - 1)) != 0) fail("timechange", "grid sizes must be powers of two");
    if (cfg.timechange) {
      if (o.start.empty()) o.start.assign(static_cast<std::size_t>(cfg.timechange->dim()), 0.1);
      if (o.start.size() != static_cast<std::size_t>(cfg.timechange->dim())) fail("timechange.start", "dimension mismatch");
    }
    resolved["timechange"] = {{"L", o.L},
                              {"L_identity", o.L_identity},
                              {"grid", o.grid},
                              {"field_grid", o.field_grid},
                              {"tol_gL", o.tol_gL},
                              {"tol_gtilde", o.tol_gtilde},
                              {"gL_tolerance", o.gL_tolerance},
                              {"phi", o.phi ? poly_json(*o.phi) : json(nullptr)},
                              {"horizon", o.horizon},
                              {"birkhoff_tolerance", o.birkhoff_tolerance},
                              {"start", o.start}};
  }

  if (root.contains("output")) {
    const json& o = root["output"];
    check_keys(o, "output", {"directory", "formats"});
    if (o.contains("directory")) cfg.output.directory = get_string(o["directory"], "output.directory");
    if (o.contains("formats")) {
      if (!o["formats"].is_array()) fail("output.formats", "expected an array");
      cfg.output.text = cfg.output.csv = false;
      for (const auto& f : o["formats"]) {
        const std::string s = get_string(f, "output.formats");
        if (s == "text")
          cfg.output.text = true;
        else if (s == "csv")
          cfg.output.csv = true;
        else
          fail("output.formats", "unknown format '" + s + "'");
      }
    }
  }
  json formats = json::array();
  if (cfg.output.text) formats.push_back("text");
  if (cfg.output.csv) formats.push_back("csv");
  resolved["output"] = {{"directory", cfg.output.directory}, {"formats", formats}};
  cfg.resolved = resolved.dump(2) + "\n";
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

}  // namespace mk::cli
