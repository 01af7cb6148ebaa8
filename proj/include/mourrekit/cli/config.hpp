#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mourrekit/mourre.hpp"
#include "mourrekit/specmeas.hpp"

namespace mk::cli {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct WindowConfig {
  int M = 256;
  int margin = -1;  // -1: n * band(U) for the commutator check
  double tol = 1e-14;
};

struct MourreConfig {
  long n_max = 16384;
  int resolution = 0;
  double min_fraction = 0.5;
  double conjugate_scale = 1.0;
  bool check_commutator = true;
  int commutator_n = 1;
  int trials = 20;
};

struct SpectralConfig {
  long N = 1000;
  Kernel kernel = Kernel::fejer;
  Thresholds thresholds;
  std::string path = "matrix";  // matrix | quadrature | both
  bool accept_leakage = false;
  int quadrature_resolution = 0;  // 0: smallest alias-free resolution
  std::optional<Freq> phi;       // basis vector; default constant (rotation: e_1)
};

struct TimeChangeConfig {
  std::vector<double> L = {10.0, 100.0, 1000.0};
  double L_identity = 50.0;
  int grid = 8;
  int field_grid = 16;
  double tol_gL = 1e-8;
  double tol_gtilde = 1e-6;
  double gL_tolerance = 0.02;
  std::optional<TrigPoly> phi;
  double horizon = 1e4;
  double birkhoff_tolerance = 1e-3;
  std::vector<double> start;
};

struct OutputConfig {
  std::string directory = "out";
  bool text = true;
  bool csv = true;
};

struct RunConfig {
  std::string system_class;  // skew | furstenberg | rotation | timechange
  std::optional<SkewProductSpec> skew;
  std::optional<FurstenbergLevel> furstenberg;
  std::optional<FrequencyVector> rotation;
  std::optional<TimeChangeSpec> timechange;

  WindowConfig window;
  MourreConfig mourre;
  SpectralConfig spectral;
  TimeChangeConfig tc;
  OutputConfig output;

  std::string resolved;  // normalized JSON with every default filled in
};

// Throws ConfigError on malformed input, unknown keys or bad values.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

}  // namespace mk::cli
