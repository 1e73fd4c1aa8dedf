// Co-real tori that are graphical over R^{2n+1}, and the spinning of a planar
// front along them: (k, x, z) -> (e(k) + x nu(k), z + h(k)).
#pragma once

#include "preleg/common.hpp"
#include "preleg/front.hpp"
#include "preleg/front_geometry.hpp"
#include "preleg/linalg_j.hpp"

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace preleg::spin {

namespace detail {

inline double wrap_angle(double a) {
  a = std::fmod(a, 2 * M_PI);
  if (a > M_PI) a -= 2 * M_PI;
  if (a <= -M_PI) a += 2 * M_PI;
  return a;
}

/// Flat-torus distance between two angle vectors.
inline double torus_distance(const Vector& a, const Vector& b) {
  double s = 0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double d = wrap_angle(a(i) - b(i));
    s += d * d;
  }
  return std::sqrt(s);
}

/// Regular res^dim grid on [0, 2pi)^dim.
inline std::vector<Vector> angle_grid(int dim, int res) {
  std::vector<Vector> out;
  if (dim == 0) return {Vector(0)};
  std::vector<int> idx(dim, 0);
  while (true) {
    Vector v(dim);
    for (int i = 0; i < dim; ++i) v(i) = 2 * M_PI * idx[i] / res;
    out.push_back(v);
    int d = 0;
    while (d < dim && ++idx[d] == res) idx[d++] = 0;
    if (d == dim) break;
  }
  return out;
}

/// Fourth-order central difference of a vector-valued map along coordinate i.
template <class F>
Vector central_diff4(const F& f, const Vector& x, int i, double h) {
  Vector a = x, b = x, c = x, d = x;
  a(i) += 2 * h;
  b(i) += h;
  c(i) -= h;
  d(i) -= 2 * h;
  return (-f(a) + 8 * f(b) - 8 * f(c) + f(d)) / (12 * h);
}

inline constexpr double kAngleStep = 1e-3;

/// Standard T^m in R^{m+1}: a circle for m = 1, then
/// ((1 + a_1/2) (cos p_1, sin p_1), a_2/2, ..., a_m/2) with a = T^{m-1}(p_2, ...).
inline Vector standard_torus(const Vector& phi) {
  const int m = static_cast<int>(phi.size());
  if (m == 0) return Vector::Zero(1);
  if (m == 1) return Vector{{std::cos(phi(0)), std::sin(phi(0))}};
  const Vector a = standard_torus(phi.tail(m - 1));
  Vector out(m + 1);
  const double r = 1 + 0.5 * a(0);
  out(0) = r * std::cos(phi(0));
  out(1) = r * std::sin(phi(0));
  out.tail(m - 1) = 0.5 * a.tail(m - 1);
  return out;
}

}  // namespace detail

/// The perturbed Clifford torus Cl^delta in R^{2n+2} = C^{n+1}, optionally
/// thickened by a fiber torus T^{n-1} along its normal framing in R^{2n+1}.
/// The last coordinate is the height; the first 2n+1 form the base.
struct CorealEmbedding {
  int n = 1;
  double delta = 0.5;
  double fiber_eps = 0.0;
  bool thickened = false;

  int torus_dim() const { return n + 1; }
  int k_dim() const { return thickened ? 2 * n : n + 1; }
  int ambient() const { return 2 * n + 2; }
  int base_dim() const { return 2 * n + 1; }

  Vector torus_point(const Vector& th) const {
    Vector p(ambient());
    const double rho = 1 + delta * std::sin(th(n));
    p(0) = rho * std::cos(th(0));
    p(1) = rho * std::sin(th(0));
    for (int j = 1; j <= n; ++j) {
      p(2 * j) = std::cos(th(j));
      p(2 * j + 1) = std::sin(th(j));
    }
    return p;
  }

  /// Columns d/dtheta_1 ... d/dtheta_{n+1}, in closed form.
  Matrix torus_tangents(const Vector& th) const {
    Matrix t = Matrix::Zero(ambient(), n + 1);
    const double c1 = std::cos(th(0)), s1 = std::sin(th(0));
    const double rho = 1 + delta * std::sin(th(n));
    t(0, 0) = -rho * s1;
    t(1, 0) = rho * c1;
    for (int j = 1; j <= n; ++j) {
      t(2 * j, j) = -std::sin(th(j));
      t(2 * j + 1, j) = std::cos(th(j));
    }
    // the radius of the first factor also moves with the last angle
    const double dr = delta * std::cos(th(n));
    t(0, n) += dr * c1;
    t(1, n) += dr * s1;
    return t;
  }

  /// Normal frame of the base projection of Cl^delta: the unit vector
  /// orthogonal to the tangents and to the radial directions of factors
  /// 2..n, followed by those radial directions.
  Matrix torus_normal_frame(const Vector& th) const {
    const int b = base_dim();
    Matrix fr = Matrix::Zero(b, n);
    Matrix span(b, 2 * n);
    span.leftCols(n + 1) = torus_tangents(th).topRows(b);
    for (int j = 1; j < n; ++j) {
      Vector r = Vector::Zero(b);
      r(2 * j) = std::cos(th(j));
      r(2 * j + 1) = std::sin(th(j));
      span.col(n + j) = r;
      fr.col(j) = r;
    }
    Vector nu = generalized_cross(span);
    const double len = nu.norm();
    if (!(len > 0)) throw DomainError("base projection of the torus is not immersed");
    fr.col(0) = nu / len;
    return fr;
  }

  /// e(k) in R^{2n+2}; k = (theta_1, ..., theta_{n+1}[, phi_1, ..., phi_{n-1}]).
  Vector point(const Vector& k) const {
    if (k.size() != k_dim()) throw DimensionError("embedding parameter has the wrong dimension");
    const Vector th = k.head(n + 1);
    Vector p = torus_point(th);
    if (thickened && n > 1) {
      const Vector f = detail::standard_torus(k.tail(n - 1));
      p.head(base_dim()) += fiber_eps * torus_normal_frame(th) * f;
    }
    return p;
  }

  Matrix tangents(const Vector& k) const {
    if (!thickened || n == 1) return torus_tangents(k.head(n + 1));
    Matrix t(ambient(), k_dim());
    auto f = [&](const Vector& q) { return point(q); };
    for (int i = 0; i < k_dim(); ++i) t.col(i) = detail::central_diff4(f, k, i, detail::kAngleStep);
    return t;
  }

  Vector base(const Vector& k) const { return point(k).head(base_dim()); }
  double height(const Vector& k) const { return point(k)(base_dim()); }

  /// Unit normal of the base hypersurface; needs k_dim = 2n. The sign is the
  /// orientation of the parameter order, so it is globally continuous.
  Vector normal(const Vector& k) const {
    if (k_dim() != 2 * n) throw DomainError("normal needs a hypersurface: thicken the torus first");
    Vector nu = generalized_cross(tangents(k).topRows(base_dim()));
    const double len = nu.norm();
    if (!(len > 1e-300)) throw DomainError("base projection is not immersed");
    return nu / len;
  }
};

inline CorealEmbedding clifford_perturbed(int n, double delta) {
  if (n < 1) throw DomainError("clifford_perturbed needs n >= 1");
  if (!(delta >= 0 && delta < 1)) throw DomainError("delta must lie in [0, 1)");
  CorealEmbedding e;
  e.n = n;
  e.delta = delta;
  e.thickened = n == 1;  // T^{n+1} is already a hypersurface germ when n = 1
  return e;
}

struct EmbeddingMargins {
  double coreal = 0;      // min is_coreal margin of the tangent spaces in R^{2n+2}
  double immersion = 0;   // min smallest singular value of the base-projected tangents
  double chord = 0;       // min |b(p) - b(q)| / torus distance over grid pairs
  double min_radius = 0;  // min radius of the first factor
  int samples = 0;
  double graph() const { return std::min(immersion, chord); }
};

/// Grid margins of an embedding. The chord ratio controls injectivity of the
/// base projection; together with the immersion margin it is the
/// graphicality margin.
inline EmbeddingMargins embedding_margins(const CorealEmbedding& e, int res) {
  const auto grid = detail::angle_grid(e.k_dim(), res);
  const auto J = linalg::standard_J(e.n + 1);
  const std::size_t m = grid.size();
  std::vector<Vector> base(m);
  std::vector<double> cor(m), imm(m), rad(m);
  parallel_for(m, [&](std::size_t i) {
    const Matrix t = e.tangents(grid[i]);
    base[i] = e.base(grid[i]);
    const auto sub = linalg::Subspace::span_of(t, 1e-12);
    cor[i] = sub.dim() < t.cols() ? 0.0 : linalg::is_coreal(sub, J).margin;
    const Vector sv = singular_values(t.topRows(e.base_dim()));
    imm[i] = sv(sv.size() - 1);
    rad[i] = 1 + e.delta * std::sin(grid[i](e.n));
  });
  std::vector<double> chord(m, std::numeric_limits<double>::infinity());
  parallel_for(m, [&](std::size_t i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      const double d = detail::torus_distance(grid[i], grid[j]);
      chord[i] = std::min(chord[i], (base[i] - base[j]).norm() / d);
    }
  });
  EmbeddingMargins r;
  r.samples = static_cast<int>(m);
  r.coreal = *std::min_element(cor.begin(), cor.end());
  r.immersion = *std::min_element(imm.begin(), imm.end());
  r.chord = *std::min_element(chord.begin(), chord.end());
  r.min_radius = *std::min_element(rad.begin(), rad.end());
  return r;
}

struct DeltaRow {
  double delta, coreal, graph;
};

struct DeltaSearch {
  double delta = 0;
  double coreal = 0, graph = 0;
  std::vector<DeltaRow> table;
};

inline std::string format_delta_table(const std::vector<DeltaRow>& t) {
  std::string s;
  char buf[96];
  for (const auto& r : t) {
    std::snprintf(buf, sizeof buf, "delta=%.2f coreal=%.3e graph=%.3e\n", r.delta, r.coreal, r.graph);
    s += buf;
  }
  return s;
}

/// Scans delta = 0.05, 0.10, ..., 0.50 and keeps the one maximizing
/// min(coreal, graph) on a grid_res^{n+1} grid.
inline DeltaSearch find_delta(int n, int grid_res = 64, double margin_target = 1e-3) {
  DeltaSearch s;
  double best = -1;
  for (int i = 1; i <= 10; ++i) {
    const double d = 0.05 * i;
    CorealEmbedding e = clifford_perturbed(n, d);
    e.thickened = false;
    const auto m = embedding_margins(e, grid_res);
    s.table.push_back({d, m.coreal, m.graph()});
    const double score = std::min(m.coreal, m.graph());
    if (score > best) {
      best = score;
      s.delta = d;
      s.coreal = m.coreal;
      s.graph = m.graph();
    }
  }
  if (!(best > margin_target))
    throw DomainError("no delta reaches margin " + std::to_string(margin_target) + ":\n" + format_delta_table(s.table));
  return s;
}

/// Alternating count of the cells of the product cell structure on T^dim
/// with m vertices per circle: sum_j (-1)^j C(dim, j) m^dim.
inline long long torus_euler_characteristic(int dim, int m = 4) {
  long long chi = 0, binom = 1, cells = 1;
  for (int j = 0; j < dim; ++j) cells *= m;
  for (int j = 0; j <= dim; ++j) {
    chi += (j % 2 == 0 ? 1 : -1) * binom * cells;
    binom = binom * (dim - j) / (j + 1);
  }
  return chi;
}

struct ThickenResult {
  CorealEmbedding embedding;
  EmbeddingMargins margins;
  long long euler_characteristic = 0;
};

/// Inserts eps times the standard T^{n-1} into the normal framing directions,
/// giving a co-real T^{2n}. The identity for n = 1. The graphicality margin
/// of the fiber directions is proportional to eps, so it is judged relative
/// to eps.
inline ThickenResult thicken(const CorealEmbedding& base, double eps, int grid_res = 8, double margin_target = 1e-3) {
  if (base.thickened && base.n > 1) throw DomainError("embedding is already thickened");
  if (torus_euler_characteristic(2 * base.n) != 0) throw ConsistencyError("Euler characteristic of T^2n is not zero");
  ThickenResult r;
  r.euler_characteristic = torus_euler_characteristic(2 * base.n);
  CorealEmbedding e = base;
  e.thickened = true;
  if (base.n == 1) {
    e.fiber_eps = 0;
    r.embedding = e;
    r.margins = embedding_margins(e, grid_res);
    return r;
  }
  if (!(eps > 0)) throw DomainError("thickening scale must be positive");
  auto feasible = [&](double s, EmbeddingMargins* out) {
    CorealEmbedding t = e;
    t.fiber_eps = s;
    const auto m = embedding_margins(t, grid_res);
    if (out) *out = m;
    return m.coreal > margin_target && m.graph() > margin_target * s;
  };
  e.fiber_eps = eps;
  if (!feasible(eps, &r.margins)) {
    double lo = 0, hi = eps;
    for (int it = 0; it < 20; ++it) {
      const double mid = 0.5 * (lo + hi);
      (feasible(mid, nullptr) ? lo : hi) = mid;
    }
    throw DomainError("thickening margin fails at eps=" + std::to_string(eps) +
                      "; largest feasible eps found: " + std::to_string(lo));
  }
  r.embedding = e;
  return r;
}

// ---------------------------------------------------------------------------
// Push profiles, kept here because the spun front evaluates them.

namespace detail {
inline double smooth_edge(double t) { return t > 0 ? std::exp(-1 / t) : 0.0; }
inline double smooth_edge_d(double t) { return t > 0 ? std::exp(-1 / t) / (t * t) : 0.0; }
}  // namespace detail

/// Smooth plateau: 1 on [0, 1/3], 0 on [1, inf), strictly decreasing between.
inline double plateau_bump(double r) {
  r = std::abs(r);
  if (r <= 1.0 / 3) return 1;
  if (r >= 1) return 0;
  const double t = (r - 1.0 / 3) * 1.5;
  const double a = detail::smooth_edge(1 - t), b = detail::smooth_edge(t);
  return a / (a + b);
}

/// d/dr of plateau_bump for r >= 0.
inline double plateau_bump_d(double r) {
  r = std::abs(r);
  if (r <= 1.0 / 3 || r >= 1) return 0;
  const double t = (r - 1.0 / 3) * 1.5;
  const double a = detail::smooth_edge(1 - t), b = detail::smooth_edge(t);
  const double da = -detail::smooth_edge_d(1 - t), db = detail::smooth_edge_d(t);
  return 1.5 * (da * (a + b) - a * (da + db)) / ((a + b) * (a + b));
}

/// Lower sheet replaced by z_low + (z_up - z_low) f(X) with
/// f = height * plateau_bump(|X - center| / rho), in raw front coordinates.
/// Sheets are addressed by curve parameter intervals covering the tube.
struct SheetPush {
  double center = 0, rho = 0, height = 1.5;
  int lower_comp = 0, upper_comp = 0;
  double lower_lo = 0, lower_hi = 0;  // lower sheet params at the tube ends
  double upper_lo = 0, upper_hi = 0;
  std::string origin = "push";

  double profile(double X) const { return height * plateau_bump((X - center) / rho); }
  double profile_d(double X) const {
    const double s = X >= center ? 1.0 : -1.0;
    return height * plateau_bump_d((X - center) / rho) * s / rho;
  }
  /// Offsets of the two components of f^{-1}(1) from the center.
  double level_one_offset() const {
    double lo = 1.0 / 3, hi = 1.0;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      (height * plateau_bump(mid) > 1 ? lo : hi) = mid;
    }
    return rho * 0.5 * (lo + hi);
  }
};

/// Raw-coordinate point of a piecewise front at curve parameter u.
inline front::FrontPoint raw_point(const front::PiecewiseFront& pf, int c, double u) {
  auto [i, v] = pf.locate(c, u);
  return front::PiecewiseFront::eval_raw(pf.components[c][i], v);
}

/// Curve parameter in [a, b] where the raw x equals X; x must be monotone there.
inline double solve_param(const front::PiecewiseFront& pf, int c, double a, double b, double X) {
  double xa = raw_point(pf, c, a).x - X;
  const double xb = raw_point(pf, c, b).x - X;
  if (std::abs(xa) < 1e-13) return a;
  if (std::abs(xb) < 1e-13) return b;
  if (xa * xb > 0) throw DomainError("sheet does not cover the requested x");
  for (int it = 0; it < 80; ++it) {
    const double m = 0.5 * (a + b);
    const double xm = raw_point(pf, c, m).x - X;
    if ((xm > 0) == (xa > 0)) {
      a = m;
      xa = xm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

struct SheetHit {
  int component;
  double param;
  double z;
};

/// All points of the raw front with raw x = X, sorted by decreasing height.
inline std::vector<SheetHit> sheets_at(const front::PiecewiseFront& pf, double X) {
  std::vector<SheetHit> out;
  for (int c = 0; c < pf.component_count(); ++c) {
    const double per = pf.period(c);
    std::vector<double> params;
    for (int i = 0; i < static_cast<int>(pf.components[c].size()); ++i) {
      const auto& a = pf.components[c][i];
      const double u0 = pf.arc_start(c, i);
      if (a.kind == front::ArcKind::Graph) {
        const double v = a.leftward ? a.event + 1 - X : X - a.event;
        if (v >= 0 && v <= 1) params.push_back(u0 + v);
      } else {
        const double sg = a.right_cusp ? -1.0 : 1.0;
        const double tau = (X - a.event - 0.5) / (sg * front::detail::kCuspA);
        if (tau < 0 || tau > 1) continue;
        for (double t : {std::sqrt(tau), -std::sqrt(tau)}) params.push_back(u0 + (a.from_upper ? 1 - t : t + 1));
      }
    }
    std::sort(params.begin(), params.end());
    for (std::size_t i = 0; i < params.size(); ++i) {
      const double u = std::fmod(params[i], per);
      bool dup = false;
      for (const auto& h : out) {
        const double d = std::abs(h.param - u);
        if (h.component == c && std::min(d, per - d) < 1e-9) dup = true;
      }
      if (!dup) out.push_back({c, u, raw_point(pf, c, u).z});
    }
  }
  std::sort(out.begin(), out.end(), [](const SheetHit& a, const SheetHit& b) { return a.z > b.z; });
  return out;
}

// ---------------------------------------------------------------------------
// Spun fronts.

enum class StratumKind { Cusp, Crossing };

/// One K-torus of singular points: a cusp tip or a transverse double point of
/// the fiber front, copied along K. Descriptors sharing `group` are the
/// components of one locus.
struct Stratum {
  StratumKind kind = StratumKind::Cusp;
  std::string origin = "front";
  int group = 0;
  int comp_a = 0;
  double param_a = 0;
  int comp_b = -1;
  double param_b = 0;
  double x = 0, z = 0;  // world fiber coordinates
};

struct DomainSample {
  Vector k;
  int component = 0;
  double u = 0;
  int stratum = -1;  // index of the stratum this sample sits on, or -1
};

class ParamFront {
 public:
  CorealEmbedding emb;
  front::PlatFront word;
  front::FrontGeometry geometry;
  front::PiecewiseFront curve;
  std::vector<std::string> event_origin;
  std::vector<SheetPush> pushes;
  std::vector<Stratum> strata;
  double reach = 0;  // tubular radius estimate of the base hypersurface
  std::string provenance;

  int n() const { return emb.n; }
  int k_dim() const { return emb.k_dim(); }
  int domain_dim() const { return k_dim() + 1; }
  int ambient() const { return emb.ambient(); }

  double wrap_near(int c, double u, double ref) const {
    const double per = curve.period(c);
    return u + per * std::round((ref - u) / per);
  }

  /// Raw fiber point with every push applied.
  front::FrontPoint raw_fiber(int c, double u) const {
    front::FrontPoint p = raw_point(curve, c, u);
    for (const auto& s : pushes) {
      if (s.lower_comp != c) continue;
      const double mid = 0.5 * (s.lower_lo + s.lower_hi);
      const double uu = wrap_near(c, u, mid);
      if (uu < std::min(s.lower_lo, s.lower_hi) || uu > std::max(s.lower_lo, s.lower_hi)) continue;
      const double f = s.profile(p.x);
      if (f == 0) continue;
      const double uu_up = solve_param(curve, s.upper_comp, s.upper_lo, s.upper_hi, p.x);
      const front::FrontPoint q = raw_point(curve, s.upper_comp, uu_up);
      const double gap = q.z - p.z;
      const double slope = p.slope + (q.slope - p.slope) * f + gap * s.profile_d(p.x);
      p.z += gap * f;
      p.slope = slope;
      p.dz = slope * p.dx;
    }
    return p;
  }

  front::FrontPoint fiber(int c, double u) const { return curve.to_world(raw_fiber(c, u)); }

  /// phi(k, x, z) = (e(k) + x nu(k), z + h(k)).
  Vector tube_point(const Vector& k, double x, double z) const {
    Vector p = emb.point(k);
    p.head(emb.base_dim()) += x * emb.normal(k);
    p(emb.base_dim()) += z;
    return p;
  }

  /// d phi / d k at fixed fiber point.
  Matrix tube_tangents(const Vector& k, double x, double z) const {
    Matrix t = emb.tangents(k);
    if (x != 0) {
      auto nu = [&](const Vector& q) { return emb.normal(q); };
      for (int i = 0; i < k_dim(); ++i)
        t.col(i).head(emb.base_dim()) += x * detail::central_diff4(nu, k, i, detail::kAngleStep);
    }
    (void)z;
    return t;
  }

  Vector point(const Vector& k, int c, double u) const {
    const auto p = fiber(c, u);
    return tube_point(k, p.x, p.z);
  }

  /// Columns d/dk_1 ... d/dk_{2n}, d/du.
  Matrix tangent_frame(const Vector& k, int c, double u) const {
    const auto p = fiber(c, u);
    Matrix t(ambient(), domain_dim());
    t.leftCols(k_dim()) = tube_tangents(k, p.x, p.z);
    Vector du = Vector::Zero(ambient());
    du.head(emb.base_dim()) = p.dx * emb.normal(k);
    du(emb.base_dim()) = p.dz;
    t.col(k_dim()) = du;
    return t;
  }

  /// Unit conormal of the front hypersurface. The fiber direction is
  /// nu + slope * dz, which stays defined through the cusp tips.
  Vector conormal(const Vector& k, int c, double u) const {
    const auto p = fiber(c, u);
    Matrix span(ambient(), ambient() - 1);
    span.leftCols(k_dim()) = tube_tangents(k, p.x, p.z);
    Vector v = Vector::Zero(ambient());
    v.head(emb.base_dim()) = emb.normal(k);
    v(emb.base_dim()) = p.slope;
    span.col(k_dim()) = v;
    Vector a = generalized_cross(span);
    const double len = a.norm();
    if (!(len > 1e-300)) throw DomainError("degenerate front tangent space");
    a /= len;
    // co-orientation: last coordinate positive, else first nonzero coordinate
    double key = a(a.size() - 1);
    for (Eigen::Index i = 0; i < a.size() && std::abs(key) < 1e-14; ++i) key = a(i);
    return key < 0 ? Vector(-a) : a;
  }

  /// Counts descriptors (distinct groups) per kind and origin.
  std::map<std::string, int> census() const {
    std::map<std::string, std::vector<int>> groups;
    for (const auto& s : strata) {
      auto& g = groups[std::string(s.kind == StratumKind::Cusp ? "cusp/" : "crossing/") + s.origin];
      if (std::find(g.begin(), g.end(), s.group) == g.end()) g.push_back(s.group);
    }
    std::map<std::string, int> out;
    for (const auto& [k, g] : groups) out[k] = static_cast<int>(g.size());
    return out;
  }

  void rebuild_strata() {
    strata.clear();
    int group = 0;
    for (const auto& m : curve.cusps) {
      Stratum s;
      s.kind = StratumKind::Cusp;
      s.origin = event_origin.at(m.event);
      s.group = group++;
      s.comp_a = m.component;
      s.param_a = m.param;
      strata.push_back(s);
    }
    for (const auto& m : curve.crossings) {
      Stratum s;
      s.kind = StratumKind::Crossing;
      s.origin = event_origin.at(m.event);
      s.group = group++;
      s.comp_a = m.comp_a;
      s.param_a = m.param_a;
      s.comp_b = m.comp_b;
      s.param_b = m.param_b;
      strata.push_back(s);
    }
    for (const auto& p : pushes) {
      const double off = p.level_one_offset();
      for (double X : {p.center - off, p.center + off}) {
        Stratum s;
        s.kind = StratumKind::Crossing;
        s.origin = p.origin;
        s.group = group;
        s.comp_a = p.lower_comp;
        s.param_a = solve_param(curve, p.lower_comp, p.lower_lo, p.lower_hi, X);
        s.comp_b = p.upper_comp;
        s.param_b = solve_param(curve, p.upper_comp, p.upper_lo, p.upper_hi, X);
        strata.push_back(s);
      }
      ++group;
    }
    for (auto& s : strata) {
      const auto f = fiber(s.comp_a, s.param_a);
      s.x = f.x;
      s.z = f.z;
    }
  }

  /// Regular K grid times front samples, plus every K grid point on every stratum.
  std::vector<DomainSample> samples(int k_res, int u_per_unit) const {
    const auto grid = detail::angle_grid(k_dim(), k_res);
    std::vector<DomainSample> out;
    for (const auto& k : grid) {
      for (int c = 0; c < curve.component_count(); ++c) {
        const double per = curve.period(c);
        const int m = std::max(4, static_cast<int>(std::ceil(per * u_per_unit)));
        // offset by half a step so regular samples avoid the cusp tips
        for (int i = 0; i < m; ++i) out.push_back({k, c, per * (i + 0.5) / m, -1});
      }
      for (int s = 0; s < static_cast<int>(strata.size()); ++s) {
        out.push_back({k, strata[s].comp_a, strata[s].param_a, s});
        if (strata[s].kind == StratumKind::Crossing) out.push_back({k, strata[s].comp_b, strata[s].param_b, s});
      }
    }
    return out;
  }
};

namespace detail {

/// Reach estimate of the base hypersurface from grid pairs:
/// min |a - b|^2 / (2 |<a - b, nu_b>|).
inline double hypersurface_reach(const CorealEmbedding& e, int res) {
  const auto grid = angle_grid(e.k_dim(), res);
  const std::size_t m = grid.size();
  std::vector<Vector> p(m), nu(m);
  parallel_for(m, [&](std::size_t i) {
    p[i] = e.base(grid[i]);
    nu[i] = e.normal(grid[i]);
  });
  std::vector<double> best(m, std::numeric_limits<double>::infinity());
  parallel_for(m, [&](std::size_t i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (j == i) continue;
      const Vector d = p[j] - p[i];
      const double nd = std::abs(d.dot(nu[i]));
      if (nd > 0) best[i] = std::min(best[i], d.squaredNorm() / (2 * nd));
    }
  });
  return *std::min_element(best.begin(), best.end());
}

}  // namespace detail

inline constexpr int kReachGridRes = 48;

/// Finishes a ParamFront whose embedding, word, geometry, origins and pushes
/// are set: realizes the curve, checks the tube, and lists the strata.
inline void assemble(ParamFront& F, double reach = -1) {
  if (F.word.empty()) throw DomainError("cannot spin an empty front");
  if (F.emb.k_dim() != 2 * F.emb.n) throw DomainError("spinning needs a hypersurface germ: thicken the torus first");
  if (F.event_origin.size() != F.word.size()) F.event_origin.assign(F.word.size(), "front");
  F.curve = front::realize(F.word, F.geometry);
  const int res = F.emb.k_dim() <= 2 ? kReachGridRes : std::max(4, static_cast<int>(std::pow(2304.0, 1.0 / F.emb.k_dim())));
  F.reach = reach > 0 ? reach : detail::hypersurface_reach(F.emb, res);
  const double max_x = F.curve.width / 2;
  if (!(max_x < 0.5 * F.reach))
    throw DomainError("tubular map not injective: front half-width " + std::to_string(max_x) +
                      " exceeds half the reach " + std::to_string(0.5 * F.reach));
  F.rebuild_strata();
}

/// Spins the realized front along the embedding. Fronts are realized with the
/// contact scaling by default so that the slopes shrink with the size.
inline ParamFront spin_front(const front::PlatFront& word, const CorealEmbedding& e,
                             front::FrontGeometry g = {0.01, true}) {
  ParamFront F;
  F.emb = e;
  F.word = word;
  F.geometry = g;
  F.event_origin.assign(word.size(), "front");
  assemble(F);
  return F;
}

struct LocusMargin {
  int stratum = 0;
  double margin = 0;
  Vector argmin;
  bool ok = false;
};

struct CorealLociReport {
  std::vector<LocusMargin> loci;
  double min_margin = std::numeric_limits<double>::infinity();
  bool ok = true;
  int samples = 0;
};

/// Co-reality margin of every stratum locus k -> phi(k, x_s, z_s) over a grid.
inline CorealLociReport verify_coreal_loci(const ParamFront& F, const linalg::ComplexStructure& J, int k_res = 64,
                                           double tol = 1e-9) {
  if (J.dim() != F.ambient()) throw DimensionError("complex structure does not match the ambient dimension");
  CorealLociReport r;
  const auto grid = detail::angle_grid(F.k_dim(), k_res);
  for (int s = 0; s < static_cast<int>(F.strata.size()); ++s) {
    const auto& st = F.strata[s];
    std::vector<double> m(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) {
      const Matrix t = F.tube_tangents(grid[i], st.x, st.z);
      const auto sub = linalg::Subspace::span_of(t, 1e-12);
      m[i] = sub.dim() < t.cols() ? 0.0 : linalg::is_coreal(sub, J, tol).margin;
    });
    const auto it = std::min_element(m.begin(), m.end());
    LocusMargin lm{s, *it, grid[it - m.begin()], *it > tol};
    r.loci.push_back(lm);
    r.min_margin = std::min(r.min_margin, lm.margin);
    r.ok = r.ok && lm.ok;
    r.samples += static_cast<int>(grid.size());
  }
  if (F.strata.empty()) r.min_margin = 0;
  return r;
}

}  // namespace preleg::spin
