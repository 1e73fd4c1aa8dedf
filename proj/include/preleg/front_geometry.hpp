// Concrete planar realization of a plat front: every event occupies one unit
// of x, strands rest at heights z = -position, and cusps follow a polynomial
// arc whose 3-jet at the tip is the semicubical normal form.
#pragma once

#include "preleg/common.hpp"
#include "preleg/front.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace preleg::front {

struct FrontGeometry {
  double scale = 1.0;            // diameter bound of the output
  bool contact_scaling = false;  // (x, z) -> (scale x, scale^2 z) instead of uniform
};

/// Position, slope dz/dx, and derivative in the curve parameter.
struct FrontPoint {
  double x = 0, z = 0, slope = 0, dx = 0, dz = 0;
};

enum class ArcKind { Graph, Cusp };

/// One piece of a component. Graph arcs run over [event, event+1] in raw x;
/// cusp arcs are t in [-1, 1] with the tip at t = 0 and the upper branch at t = +1.
struct FrontArc {
  ArcKind kind = ArcKind::Graph;
  int event = 0;
  // graph arcs
  int left_pos = 0;
  double z_left = 0, z_right = 0, w0 = 0, w1 = 1;  // transition window in raw x
  bool leftward = false;
  // cusp arcs
  bool right_cusp = false;
  double zc = 0;
  bool from_upper = false;

  double length() const { return kind == ArcKind::Graph ? 1.0 : 2.0; }
};

struct CuspMark {
  int event, component;
  double param;  // curve parameter of the tip
  bool right;
  double x, z;
};

struct CrossingMark {
  int event;
  double x, z;
  int comp_a, comp_b;
  double param_a, param_b;  // the strand entering at level-1, and at level
};

namespace detail {

inline constexpr double kCuspA = 0.5;   // x-extent of a cusp arc
inline constexpr double kCuspDz = 0.5;  // half the branch separation

inline double smoothstep(double u) { return u * u * u * (10 - 15 * u + 6 * u * u); }
inline double smoothstep_d(double u) { return 30 * u * u * (1 - u) * (1 - u); }
// Odd profile with P(±1) = ±1 and P' = (105/8) t^2 (1-t^2)^2.
inline double cusp_profile(double t) {
  const double t2 = t * t;
  return 105.0 / 8.0 * t * t2 * (1.0 / 3 - 2.0 * t2 / 5 + t2 * t2 / 7);
}
inline double cusp_profile_d(double t) {
  const double s = 1 - t * t;
  return 105.0 / 8.0 * t * t * s * s;
}
inline double cusp_profile_d2(double t) {
  const double s = 1 - t * t;
  return 105.0 / 8.0 * (2 * t * s * s - 4 * t * t * t * s);
}
inline double cusp_profile_d3(double t) {
  const double t2 = t * t;
  return 105.0 / 8.0 * (2 - 24 * t2 + 30 * t2 * t2);
}

}  // namespace detail

class PiecewiseFront {
 public:
  std::vector<std::vector<FrontArc>> components;
  std::vector<CuspMark> cusps;
  std::vector<CrossingMark> crossings;
  double sx = 1, sz = 1, cx = 0, cz = 0;  // x = sx (X - cx), z = sz (Z - cz)

  int component_count() const { return static_cast<int>(components.size()); }

  double period(int c) const {
    double p = 0;
    for (const auto& a : components.at(c)) p += a.length();
    return p;
  }

  /// Raw-coordinate evaluation of one arc at local parameter v.
  static FrontPoint eval_raw(const FrontArc& a, double v) {
    FrontPoint p;
    if (a.kind == ArcKind::Graph) {
      const double X = a.leftward ? a.event + 1 - v : a.event + v;
      const double span = a.w1 - a.w0;
      const double w = std::clamp((X - a.w0) / span, 0.0, 1.0);
      p.x = X;
      p.z = a.z_left + (a.z_right - a.z_left) * detail::smoothstep(w);
      p.slope = (a.z_right - a.z_left) * detail::smoothstep_d(w) / span;
      p.dx = a.leftward ? -1.0 : 1.0;
      p.dz = p.slope * p.dx;
    } else {
      const double t = a.from_upper ? 1 - v : -1 + v;
      const double dt = a.from_upper ? -1.0 : 1.0;
      const double sg = a.right_cusp ? -1.0 : 1.0;
      const double xc = a.event + 0.5;
      p.x = xc + sg * detail::kCuspA * t * t;
      p.z = a.zc + detail::kCuspDz * detail::cusp_profile(t);
      const double s = 1 - t * t;
      p.slope = detail::kCuspDz * 105.0 / 8.0 * t * s * s / (2 * sg * detail::kCuspA);
      p.dx = 2 * sg * detail::kCuspA * t * dt;
      p.dz = detail::kCuspDz * detail::cusp_profile_d(t) * dt;
    }
    return p;
  }

  FrontPoint to_world(FrontPoint p) const {
    p.x = sx * (p.x - cx);
    p.z = sz * (p.z - cz);
    p.slope *= sz / sx;
    p.dx *= sx;
    p.dz *= sz;
    return p;
  }

  /// Locates the arc containing parameter u (taken modulo the period).
  std::pair<int, double> locate(int c, double u) const {
    const auto& arcs = components.at(c);
    const double per = period(c);
    u = std::fmod(u, per);
    if (u < 0) u += per;
    for (int i = 0; i < static_cast<int>(arcs.size()); ++i) {
      if (u <= arcs[i].length() || i + 1 == static_cast<int>(arcs.size())) return {i, std::min(u, arcs[i].length())};
      u -= arcs[i].length();
    }
    return {0, 0.0};
  }

  FrontPoint eval(int c, double u) const {
    auto [i, v] = locate(c, u);
    return to_world(eval_raw(components[c][i], v));
  }

  double arc_start(int c, int i) const {
    double u = 0;
    for (int j = 0; j < i; ++j) u += components[c][j].length();
    return u;
  }

  /// Extent of the realized curve, from the raw bounding box.
  double width = 0, height = 0;
  double diameter() const { return std::hypot(width, height); }
};

/// Builds the realization. The raw picture is centered and normalized to unit
/// diameter, then scaled uniformly or by the contact scaling (x, z) -> (s x, s^2 z).
inline PiecewiseFront realize(const PlatFront& f, FrontGeometry g = {}) {
  if (f.empty()) throw DomainError("cannot realize an empty front");
  if (!(g.scale > 0)) throw DomainError("realization scale must be positive");
  const auto& w = f.word();
  const auto t = traverse(f);
  PiecewiseFront pf;

  // Transition window of a strand with left position p at event e.
  auto graph_arc = [&](int e, int pl, int pr, bool leftward) {
    FrontArc a;
    a.kind = ArcKind::Graph;
    a.event = e;
    a.left_pos = pl;
    a.z_left = -pl;
    a.z_right = -pr;
    a.leftward = leftward;
    switch (w[e].kind) {
      case EventKind::Crossing: a.w0 = e; a.w1 = e + 1; break;
      case EventKind::LeftCusp: a.w0 = e; a.w1 = e + 0.5; break;
      case EventKind::RightCusp: a.w0 = e + 0.5; a.w1 = e + 1; break;
    }
    return a;
  };

  for (int c = 0; c < static_cast<int>(t.components.size()); ++c) {
    const auto& comp = t.components[c];
    std::vector<FrontArc> arcs;
    const std::size_t n = comp.segments.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Segment& s = comp.segments[i];
      const Segment& nx = comp.segments[(i + 1) % n];
      const int dir = comp.directions[i];
      if (nx.slice == s.slice) {
        const int ev = dir > 0 ? s.slice : s.slice - 1;
        FrontArc a;
        a.kind = ArcKind::Cusp;
        a.event = ev;
        a.right_cusp = w[ev].kind == EventKind::RightCusp;
        a.zc = -(w[ev].level - 0.5);
        a.from_upper = s.pos == w[ev].level - 1;
        arcs.push_back(a);
        pf.cusps.push_back({ev, c, 0.0, a.right_cusp, 0.0, 0.0});
      } else if (dir > 0) {
        arcs.push_back(graph_arc(s.slice, s.pos, nx.pos, false));
      } else {
        arcs.push_back(graph_arc(nx.slice, nx.pos, s.pos, true));
      }
    }
    pf.components.push_back(std::move(arcs));
  }

  // Normalize: center the raw bounding box, unit diameter, then scale.
  const double W = static_cast<double>(w.size());
  const double H = std::max(1, f.max_strands() - 1);
  const double raw_diam = std::hypot(W, static_cast<double>(H));
  pf.cx = W / 2;
  pf.cz = -static_cast<double>(H) / 2;
  const double unit = 1.0 / raw_diam;
  pf.sx = g.scale * unit;
  pf.sz = (g.contact_scaling ? g.scale * g.scale : g.scale) * unit;
  pf.width = pf.sx * W;
  pf.height = pf.sz * H;

  std::size_t ci = 0;
  for (int c = 0; c < pf.component_count(); ++c)
    for (int i = 0; i < static_cast<int>(pf.components[c].size()); ++i) {
      const FrontArc& a = pf.components[c][i];
      if (a.kind != ArcKind::Cusp) continue;
      CuspMark& m = pf.cusps[ci++];
      m.param = pf.arc_start(c, i) + 1.0;
      const FrontPoint p = pf.eval(c, m.param);
      m.x = p.x;
      m.z = p.z;
    }

  for (int e = 0; e < static_cast<int>(w.size()); ++e) {
    if (w[e].kind != EventKind::Crossing) continue;
    const int k = w[e].level;
    CrossingMark m{e, pf.sx * (e + 0.5 - pf.cx), pf.sz * (-(k - 0.5) - pf.cz), -1, -1, 0, 0};
    for (int c = 0; c < pf.component_count(); ++c)
      for (int i = 0; i < static_cast<int>(pf.components[c].size()); ++i) {
        const FrontArc& a = pf.components[c][i];
        if (a.kind != ArcKind::Graph || a.event != e) continue;
        if (a.left_pos == k - 1) { m.comp_a = c; m.param_a = pf.arc_start(c, i) + 0.5; }
        if (a.left_pos == k) { m.comp_b = c; m.param_b = pf.arc_start(c, i) + 0.5; }
      }
    pf.crossings.push_back(m);
  }
  return pf;
}

struct FrontAudit {
  bool ok = true;
  double min_crossing_angle_deg = 180;
  double max_cusp_residual = 0;
  double min_tangent_ratio = 1;  // |dx| / |(dx, dz)| away from cusp tips
  double max_slope_jump = 0;     // slope change across arc joins and cusp tips
  double diameter = 0;
  std::vector<std::string> failures;
};

/// Semicubical normal-form residual of one cusp arc: the 3-jet at the tip must
/// be x' = z' = z'' = 0 with x'' and z''' nonzero and x'' opening the right way.
inline double cusp_residual(const PiecewiseFront& pf, const FrontArc& a) {
  const double sg = a.right_cusp ? -1.0 : 1.0;
  const double tip = 0.0;
  const double x1 = pf.sx * 2 * sg * detail::kCuspA * tip;
  const double z1 = pf.sz * detail::kCuspDz * detail::cusp_profile_d(tip);
  const double z2 = pf.sz * detail::kCuspDz * detail::cusp_profile_d2(tip);
  const double x2 = pf.sx * 2 * sg * detail::kCuspA;
  const double z3 = pf.sz * detail::kCuspDz * detail::cusp_profile_d3(tip);
  const double norm = std::abs(x2) + std::abs(z3);
  double r = (std::abs(x1) + std::abs(z1) + std::abs(z2)) / norm;
  if (std::abs(x2) < 1e-14 * norm || std::abs(z3) < 1e-14 * norm) r += 1;
  // A left cusp opens toward +x, a right cusp toward -x.
  if ((x2 > 0) == a.right_cusp) r += 1;
  return r;
}

inline FrontAudit audit_front(const PiecewiseFront& pf, int samples_per_unit = 64, double scale_bound = 0) {
  FrontAudit r;
  for (int c = 0; c < pf.component_count(); ++c) {
    const auto& arcs = pf.components[c];
    for (int i = 0; i < static_cast<int>(arcs.size()); ++i) {
      const FrontArc& a = arcs[i];
      if (a.kind == ArcKind::Cusp) r.max_cusp_residual = std::max(r.max_cusp_residual, cusp_residual(pf, a));
      const int m = static_cast<int>(samples_per_unit * a.length());
      for (int j = 0; j <= m; ++j) {
        const double v = a.length() * j / m;
        if (a.kind == ArcKind::Cusp && std::abs(v - 1.0) < 1e-6) continue;
        const FrontPoint p = pf.to_world(PiecewiseFront::eval_raw(a, v));
        const double ratio = std::abs(p.dx) / std::hypot(p.dx, p.dz);
        r.min_tangent_ratio = std::min(r.min_tangent_ratio, ratio);
      }
      // slope continuity at the join with the next arc and through the tip
      const double h = 1e-7;
      const double u0 = pf.arc_start(c, i);
      auto jump = [&](double u) {
        const double s0 = pf.eval(c, u - h).slope, s1 = pf.eval(c, u + h).slope;
        return std::abs(s1 - s0) / (1 + std::abs(s0));
      };
      r.max_slope_jump = std::max(r.max_slope_jump, jump(u0));
      if (a.kind == ArcKind::Cusp) r.max_slope_jump = std::max(r.max_slope_jump, jump(u0 + 1.0));
    }
  }
  for (const auto& m : pf.crossings) {
    const double sa = pf.eval(m.comp_a, m.param_a).slope, sb = pf.eval(m.comp_b, m.param_b).slope;
    const double ang = std::abs(std::atan(sa) - std::atan(sb)) * 180.0 / M_PI;
    r.min_crossing_angle_deg = std::min(r.min_crossing_angle_deg, ang);
  }
  r.diameter = pf.diameter();
  if (r.max_cusp_residual >= 1e-8) r.failures.push_back("cusp normal form residual " + std::to_string(r.max_cusp_residual));
  if (!(r.min_tangent_ratio > 1e-9)) r.failures.push_back("vertical tangent away from a cusp");
  if (r.max_slope_jump > 1e-4) r.failures.push_back("slope discontinuity " + std::to_string(r.max_slope_jump));
  if (!pf.crossings.empty() && r.min_crossing_angle_deg <= 10) r.failures.push_back("crossing angle below 10 degrees");
  if (scale_bound > 0 && r.diameter > scale_bound * (1 + 1e-12)) r.failures.push_back("diameter exceeds the scale");
  r.ok = r.failures.empty();
  return r;
}

/// Deterministic SVG drawing: one path per component, circles at cusps and
/// squares at crossings.
inline std::string render_svg(const PiecewiseFront& pf, int width_px = 800, int samples_per_unit = 48) {
  const double pad = 20;
  const double w = std::max(pf.width, 1e-300), h = std::max(pf.height, 1e-300);
  const double k = (width_px - 2 * pad) / std::max(w, h);
  const int height_px = static_cast<int>(std::ceil(h * k + 2 * pad));
  auto px = [&](double x) { return pad + (x + w / 2) * k; };
  auto py = [&](double z) { return pad + (h / 2 - z) * k; };
  char buf[128];
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width_px << "\" height=\"" << height_px
     << "\" viewBox=\"0 0 " << width_px << " " << height_px << "\">\n";
  for (int c = 0; c < pf.component_count(); ++c) {
    os << "<path class=\"strand\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\" d=\"";
    const double per = pf.period(c);
    const int n = static_cast<int>(std::ceil(per * samples_per_unit));
    for (int i = 0; i <= n; ++i) {
      const FrontPoint p = pf.eval(c, per * i / n);
      std::snprintf(buf, sizeof buf, "%s%.2f %.2f", i ? " L" : "M", px(p.x), py(p.z));
      os << buf;
    }
    os << " Z\"/>\n";
  }
  for (const auto& m : pf.cusps) {
    std::snprintf(buf, sizeof buf, "<circle class=\"cusp\" cx=\"%.2f\" cy=\"%.2f\" r=\"3\" fill=\"red\"/>\n", px(m.x), py(m.z));
    os << buf;
  }
  for (const auto& m : pf.crossings) {
    std::snprintf(buf, sizeof buf,
                  "<rect class=\"crossing\" x=\"%.2f\" y=\"%.2f\" width=\"6\" height=\"6\" fill=\"none\" stroke=\"blue\"/>\n",
                  px(m.x) - 3, py(m.z) - 3);
    os << buf;
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace preleg::front
