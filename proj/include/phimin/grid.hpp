#pragma once

#include <functional>
#include <string>
#include <vector>

#include "phimin/errors.hpp"

namespace phimin {

/// Rectangular tensor grid with height values u(x1, x2).
/// values are row-major in i (the x1 index): values[i * ny + j].
class GraphPatch {
 public:
  GraphPatch(double x0, double x1, double y0, double y1, int nx, int ny);

  static GraphPatch from_function(double x0, double x1, double y0, double y1, int nx,
                                  int ny, const std::function<double(double, double)>& f);

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double x0() const { return x0_; }
  double x1() const { return x1_; }
  double y0() const { return y0_; }
  double y1() const { return y1_; }
  double hx() const { return hx_; }
  double hy() const { return hy_; }
  double x(int i) const { return x0_ + i * hx_; }
  double y(int j) const { return y0_ + j * hy_; }

  double& at(int i, int j) { return values_[static_cast<std::size_t>(i) * ny_ + j]; }
  double at(int i, int j) const { return values_[static_cast<std::size_t>(i) * ny_ + j]; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  bool is_boundary(int i, int j) const {
    return i == 0 || j == 0 || i == nx_ - 1 || j == ny_ - 1;
  }

  std::string to_json() const;
  static GraphPatch from_json(const std::string& text);

 private:
  double x0_, x1_, y0_, y1_;
  int nx_, ny_;
  double hx_, hy_;
  std::vector<double> values_;
};

/// A scalar field on the same grid as a GraphPatch, indexed like it.
using NodeField = std::vector<double>;

}  // namespace phimin
