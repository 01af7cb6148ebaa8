#include "mourrekit/quadrature.hpp"

#include <gsl/gsl_integration.h>

#include <map>
#include <memory>
#include <mutex>

#include "mourrekit/errors.hpp"

namespace mk::quad {
namespace {

// P_0..P_{m} at x
std::vector<double> legendre_values(int m, double x) {
  std::vector<double> p(m + 1);
  p[0] = 1.0;
  if (m >= 1) p[1] = x;
  for (int k = 1; k < m; ++k) p[k + 1] = ((2.0 * k + 1.0) * x * p[k] - k * p[k - 1]) / (k + 1.0);
  return p;
}

GaussLegendre build(int n) {
  GaussLegendre g;
  g.n = n;
  g.nodes.resize(n);
  g.weights.resize(n);
  gsl_integration_glfixed_table* t = gsl_integration_glfixed_table_alloc(n);
  if (!t) throw NumericFailure("gauss-legendre table allocation failed");
  for (int i = 0; i < n; ++i)
    gsl_integration_glfixed_point(-1.0, 1.0, i, &g.nodes[i], &g.weights[i], t);
  gsl_integration_glfixed_table_free(t);

  // l_j(t) = w_j sum_m (2m+1)/2 P_m(x_j) P_m(t), integrated term by term.
  std::vector<std::vector<double>> pn(n), pi(n);
  for (int i = 0; i < n; ++i) pn[i] = legendre_values(n, g.nodes[i]);
  g.integration.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    const auto& px = pn[i];
    for (int j = 0; j < n; ++j) {
      double s = 0.5 * (g.nodes[i] + 1.0);
      for (int m = 1; m < n; ++m) s += 0.5 * pn[j][m] * (px[m + 1] - px[m - 1]);
      g.integration[static_cast<std::size_t>(i) * n + j] = g.weights[j] * s;
    }
  }
  return g;
}

}  // namespace

const GaussLegendre& GaussLegendre::get(int n) {
  if (n < 1 || n > 256) throw InvalidArgument("gauss-legendre order out of range");
  static std::mutex mu;
  static std::map<int, std::unique_ptr<GaussLegendre>> rules;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = rules[n];
  if (!slot) slot = std::make_unique<GaussLegendre>(build(n));
  return *slot;
}

}  // namespace mk::quad
