#pragma once

#include <span>
#include <vector>

namespace mk {

// x - floor(x), mapped into [0, 1) even when rounding would give 1.
double reduce_mod1(double x);
// min(|a-b|, 1-|a-b|) for reduced a, b.
double circular_distance(double a, double b);

class TorusPoint {
 public:
  TorusPoint() = default;
  explicit TorusPoint(std::vector<double> coords);
  static TorusPoint origin(int d);

  int dim() const { return static_cast<int>(c_.size()); }
  double operator[](int i) const { return c_[static_cast<std::size_t>(i)]; }
  std::span<const double> coords() const { return c_; }

 private:
  std::vector<double> c_;
};

// Largest per-axis circular distance.
double torus_distance(const TorusPoint& a, const TorusPoint& b);

}  // namespace mk
