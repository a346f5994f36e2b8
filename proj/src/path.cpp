#include "holonomy/path.hpp"

#include <cmath>
#include <sstream>

namespace holonomy {
namespace {

constexpr double kPi = 3.14159265358979323846;

// |a - b| reduced by the period when one is declared.
double coord_distance(double a, double b, double period) {
  const double d = a - b;
  if (period <= 0.0) return std::abs(d);
  return std::abs(std::remainder(d, period));
}

ParameterPoint lerp(const ParameterPoint& a, const ParameterPoint& b, double t) {
  ParameterPoint out;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto& [name, va] = a.coords()[i];
    out.set(name, va + t * (b.coords()[i].second - va));
  }
  return out;
}

}  // namespace

void ParamPath::validate() const {
  if (pts_.size() < 2) throw InvalidInput("path needs at least two waypoints");
  const auto names = pts_.front().names();
  for (std::size_t i = 1; i < pts_.size(); ++i) {
    if (pts_[i].names() != names)
      throw InvalidInput("waypoint " + std::to_string(i) + " has a different coordinate schema");
  }
  if (!closed_) return;
  const auto& first = pts_.front();
  const auto& last = pts_.back();
  for (const auto& [name, v0] : first.coords()) {
    double period = 0.0;
    for (const auto& [pname, p] : periods_) {
      if (pname == name) period = p;
    }
    const double dist = coord_distance(last.value(name), v0, period);
    if (dist > kClosureTol) {
      std::ostringstream os;
      os << "closed path does not close in '" << name << "' (mismatch " << dist << ")";
      throw InvalidInput(os.str());
    }
  }
}

ParamPath ParamPath::from_waypoints(std::vector<ParameterPoint> pts, bool closed,
                                    std::vector<std::pair<std::string, double>> periods) {
  ParamPath p;
  p.pts_ = std::move(pts);
  p.closed_ = closed;
  p.periods_ = std::move(periods);
  p.validate();
  return p;
}

ParamPath ParamPath::line(const ParameterPoint& a, const ParameterPoint& b,
                          std::size_t segments) {
  if (segments == 0) throw InvalidInput("line needs at least one segment");
  std::vector<ParameterPoint> pts;
  pts.reserve(segments + 1);
  for (std::size_t k = 0; k <= segments; ++k)
    pts.push_back(lerp(a, b, static_cast<double>(k) / static_cast<double>(segments)));
  return from_waypoints(std::move(pts), false);
}

ParamPath ParamPath::sweep(const ParameterPoint& base, std::string_view param, double from,
                           double to, std::size_t segments, bool closed, double period) {
  if (segments == 0) throw InvalidInput("sweep needs at least one segment");
  std::vector<ParameterPoint> pts;
  pts.reserve(segments + 1);
  for (std::size_t k = 0; k <= segments; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(segments);
    pts.push_back(base.with(param, from + t * (to - from)));
  }
  std::vector<std::pair<std::string, double>> periods;
  if (period > 0.0) periods.emplace_back(std::string(param), period);
  ParamPath p = from_waypoints(std::move(pts), closed, std::move(periods));
  const std::string pname(param);
  const ParameterPoint base_copy = base;
  p.generator_ = [base_copy, pname, from, to](double t) {
    return base_copy.with(pname, from + t * (to - from));
  };
  return p;
}

ParamPath ParamPath::rectangle(const ParameterPoint& base, std::string_view param1, double a1,
                               double b1, std::string_view param2, double a2, double b2,
                               std::size_t segments_per_leg) {
  if (segments_per_leg == 0) throw InvalidInput("rectangle needs at least one segment per leg");
  const std::string p1(param1), p2(param2);
  const ParameterPoint base_copy = base;
  auto corner_walk = [base_copy, p1, p2, a1, b1, a2, b2](double t) {
    // t in [0,1] mapped to the four legs.
    const double u = 4.0 * t;
    double x = a1, y = a2;
    if (u <= 1.0) {
      x = a1 + u * (b1 - a1);
    } else if (u <= 2.0) {
      x = b1;
      y = a2 + (u - 1.0) * (b2 - a2);
    } else if (u <= 3.0) {
      x = b1 + (u - 2.0) * (a1 - b1);
      y = b2;
    } else {
      y = b2 + (u - 3.0) * (a2 - b2);
    }
    return base_copy.with(p1, x).with(p2, y);
  };
  std::vector<ParameterPoint> pts;
  pts.reserve(4 * segments_per_leg + 1);
  for (std::size_t k = 0; k < 4 * segments_per_leg; ++k)
    pts.push_back(corner_walk(static_cast<double>(k) / static_cast<double>(4 * segments_per_leg)));
  pts.push_back(pts.front());  // exact closure
  ParamPath p = from_waypoints(std::move(pts), true);
  p.generator_ = corner_walk;
  return p;
}

ParamPath ParamPath::circle(const ParameterPoint& base, std::string_view param_x,
                            std::string_view param_y, double center_x, double center_y,
                            double radius, std::size_t segments) {
  if (segments < 3) throw InvalidInput("circle needs at least three segments");
  if (!(radius > 0.0)) throw InvalidInput("circle radius must be positive");
  const std::string px(param_x), py(param_y);
  const ParameterPoint base_copy = base;
  auto gen = [base_copy, px, py, center_x, center_y, radius](double t) {
    const double ang = 2.0 * kPi * t;
    return base_copy.with(px, center_x + radius * std::cos(ang))
        .with(py, center_y + radius * std::sin(ang));
  };
  std::vector<ParameterPoint> pts;
  pts.reserve(segments + 1);
  for (std::size_t k = 0; k < segments; ++k)
    pts.push_back(gen(static_cast<double>(k) / static_cast<double>(segments)));
  pts.push_back(pts.front());
  ParamPath p = from_waypoints(std::move(pts), true);
  p.generator_ = gen;
  return p;
}

ParamPath ParamPath::analytic(std::function<ParameterPoint(double)> curve, std::size_t segments,
                              bool closed, std::vector<std::pair<std::string, double>> periods) {
  if (!curve) throw InvalidInput("analytic path needs a generator");
  if (segments == 0) throw InvalidInput("analytic path needs at least one segment");
  std::vector<ParameterPoint> pts;
  pts.reserve(segments + 1);
  for (std::size_t k = 0; k <= segments; ++k)
    pts.push_back(curve(static_cast<double>(k) / static_cast<double>(segments)));
  ParamPath p = from_waypoints(std::move(pts), closed, std::move(periods));
  p.generator_ = std::move(curve);
  return p;
}

ParamPath ParamPath::resampled(std::size_t segments) const {
  if (segments == 0) throw InvalidInput("resampling needs at least one segment");
  if (segment_count() >= segments) return *this;
  if (generator_) {
    std::vector<ParameterPoint> pts;
    pts.reserve(segments + 1);
    for (std::size_t k = 0; k <= segments; ++k)
      pts.push_back(generator_(static_cast<double>(k) / static_cast<double>(segments)));
    if (closed_) pts.back() = pts.front();
    ParamPath p = from_waypoints(std::move(pts), closed_, periods_);
    p.generator_ = generator_;
    return p;
  }
  // No generator: split every polyline segment evenly.
  const std::size_t per =
      (segments + segment_count() - 1) / segment_count();  // ceil(segments / old)
  std::vector<ParameterPoint> pts;
  pts.reserve(per * segment_count() + 1);
  for (std::size_t s = 0; s + 1 < pts_.size(); ++s) {
    for (std::size_t k = 0; k < per; ++k)
      pts.push_back(lerp(pts_[s], pts_[s + 1], static_cast<double>(k) / static_cast<double>(per)));
  }
  pts.push_back(pts_.back());
  return from_waypoints(std::move(pts), closed_, periods_);
}

std::vector<double> ParamPath::param_values(std::string_view name) const {
  std::vector<double> out;
  out.reserve(pts_.size());
  for (const auto& p : pts_) out.push_back(p.value(name));
  return out;
}

SurfacePatch::SurfacePatch(ParameterPoint base_pt, std::string_view p1, double lo1, double hi1,
                           std::size_t cells1, std::string_view p2, double lo2, double hi2,
                           std::size_t cells2)
    : base(std::move(base_pt)),
      param1(p1),
      a1(lo1),
      b1(hi1),
      n1(cells1),
      param2(p2),
      a2(lo2),
      b2(hi2),
      n2(cells2) {
  if (n1 == 0 || n2 == 0) throw InvalidInput("surface patch needs at least one cell per axis");
  if (a1 == b1 || a2 == b2) throw InvalidInput("surface patch has a degenerate span");
  if (!base.has(param1) || !base.has(param2))
    throw InvalidInput("surface patch coordinates must exist in the base point");
}

ParameterPoint SurfacePatch::cell_center(std::size_t i, std::size_t j) const {
  const double d1 = (b1 - a1) / static_cast<double>(n1);
  const double d2 = (b2 - a2) / static_cast<double>(n2);
  return base.with(param1, a1 + (static_cast<double>(i) + 0.5) * d1)
      .with(param2, a2 + (static_cast<double>(j) + 0.5) * d2);
}

double SurfacePatch::cell_area() const {
  return (b1 - a1) / static_cast<double>(n1) * (b2 - a2) / static_cast<double>(n2);
}

}  // namespace holonomy
