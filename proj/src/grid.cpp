#include "phimin/grid.hpp"

#include <nlohmann/json.hpp>

#include <fmt/format.h>

namespace phimin {

GraphPatch::GraphPatch(double x0, double x1, double y0, double y1, int nx, int ny)
    : x0_(x0), x1_(x1), y0_(y0), y1_(y1), nx_(nx), ny_(ny) {
  if (nx < 3 || ny < 3) throw GridTooSmall("GraphPatch needs nx, ny >= 3");
  if (!(x1 > x0) || !(y1 > y0)) throw ConfigError("GraphPatch needs positive extents");
  hx_ = (x1 - x0) / (nx - 1);
  hy_ = (y1 - y0) / (ny - 1);
  values_.assign(static_cast<std::size_t>(nx) * ny, 0.0);
}

GraphPatch GraphPatch::from_function(double x0, double x1, double y0, double y1, int nx,
                                     int ny, const std::function<double(double, double)>& f) {
  GraphPatch p(x0, x1, y0, y1, nx, ny);
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) p.at(i, j) = f(p.x(i), p.y(j));
  return p;
}

std::string GraphPatch::to_json() const {
  nlohmann::json j;
  j["x0"] = x0_;
  j["x1"] = x1_;
  j["y0"] = y0_;
  j["y1"] = y1_;
  j["nx"] = nx_;
  j["ny"] = ny_;
  j["values"] = values_;
  return j.dump();
}

GraphPatch GraphPatch::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  GraphPatch p(j.at("x0").get<double>(), j.at("x1").get<double>(), j.at("y0").get<double>(),
               j.at("y1").get<double>(), j.at("nx").get<int>(), j.at("ny").get<int>());
  auto v = j.at("values").get<std::vector<double>>();
  if (v.size() != p.values_.size())
    throw ConfigError(fmt::format("patch values length {} != nx*ny = {}", v.size(),
                                  p.values_.size()));
  p.values_ = std::move(v);
  return p;
}

}  // namespace phimin
