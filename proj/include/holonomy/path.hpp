// Discretized curves and surface patches in parameter space.
#pragma once

#include "holonomy/types.hpp"

#include <functional>
#include <optional>

namespace holonomy {

// A polyline of parameter points, optionally closed. Closure is checked
// coordinate-wise within 1e-12, modulo any declared per-parameter period, so
// an angular sweep 0 -> 2*pi counts as closed once its period is declared.
// Paths built from an analytic generator keep it for exact resampling.
class ParamPath {
 public:
  static constexpr double kClosureTol = 1e-12;

  static ParamPath from_waypoints(std::vector<ParameterPoint> pts, bool closed,
                                  std::vector<std::pair<std::string, double>> periods = {});

  // Straight segment a -> b split into `segments` pieces (open).
  static ParamPath line(const ParameterPoint& a, const ParameterPoint& b, std::size_t segments);

  // Vary one coordinate of `base` linearly from `from` to `to`.
  static ParamPath sweep(const ParameterPoint& base, std::string_view param, double from,
                         double to, std::size_t segments, bool closed, double period = 0.0);

  // Closed axis-aligned rectangle in two coordinates of `base`, traversed
  // (a1,a2) -> (b1,a2) -> (b1,b2) -> (a1,b2) -> (a1,a2).
  static ParamPath rectangle(const ParameterPoint& base, std::string_view param1, double a1,
                             double b1, std::string_view param2, double a2, double b2,
                             std::size_t segments_per_leg);

  // Closed counterclockwise circle in two coordinates of `base`.
  static ParamPath circle(const ParameterPoint& base, std::string_view param_x,
                          std::string_view param_y, double center_x, double center_y,
                          double radius, std::size_t segments);

  // Arbitrary curve(t), t in [0,1], sampled at `segments`+1 points.
  static ParamPath analytic(std::function<ParameterPoint(double)> curve, std::size_t segments,
                            bool closed, std::vector<std::pair<std::string, double>> periods = {});

  // A path with at least `segments` segments covering the same curve: exact
  // resampling when an analytic generator exists, linear subdivision
  // otherwise. Returns *this when already fine enough.
  ParamPath resampled(std::size_t segments) const;

  const std::vector<ParameterPoint>& waypoints() const { return pts_; }
  std::size_t segment_count() const { return pts_.size() - 1; }
  bool closed() const { return closed_; }
  const std::vector<std::pair<std::string, double>>& periods() const { return periods_; }

  // Coordinate values of one parameter along the waypoints.
  std::vector<double> param_values(std::string_view name) const;

 private:
  ParamPath() = default;
  void validate() const;

  std::vector<ParameterPoint> pts_;
  bool closed_ = false;
  std::vector<std::pair<std::string, double>> periods_;
  std::function<ParameterPoint(double)> generator_;  // may be null
};

// Axis-aligned rectangle [a1,b1] x [a2,b2] in two coordinates of a base
// point, subdivided into n1 x n2 cells for midpoint-rule integration.
// Signed spans encode orientation.
struct SurfacePatch {
  ParameterPoint base;
  std::string param1;
  double a1 = 0.0, b1 = 0.0;
  std::size_t n1 = 0;
  std::string param2;
  double a2 = 0.0, b2 = 0.0;
  std::size_t n2 = 0;

  SurfacePatch(ParameterPoint base_pt, std::string_view p1, double lo1, double hi1,
               std::size_t cells1, std::string_view p2, double lo2, double hi2,
               std::size_t cells2);

  ParameterPoint cell_center(std::size_t i, std::size_t j) const;
  double cell_area() const;  // signed
};

}  // namespace holonomy
