#pragma once

#include <vector>

namespace mk::quad {

// Gauss-Legendre rule on [-1, 1]. `integration` is the n x n row-major
// spectral integration matrix: (S f)_i approximates the integral of f from -1 to nodes[i].
struct GaussLegendre {
  int n = 0;
  std::vector<double> nodes;
  std::vector<double> weights;
  std::vector<double> integration;

  static const GaussLegendre& get(int n);
};

}  // namespace mk::quad
