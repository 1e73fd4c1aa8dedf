// Moves on spun fronts: pushing a lower sheet through an upper one along a
// co-real torus, and stabilization (a fish along N followed by a push near
// the new cusp).
#pragma once

#include "preleg/common.hpp"
#include "preleg/front.hpp"
#include "preleg/linalg_j.hpp"
#include "preleg/spin.hpp"

#include <cmath>
#include <map>
#include <string>
#include <vector>

namespace preleg::moves {

using spin::ParamFront;

namespace detail {

/// d/dr log plateau_bump(r) on (1/3, 1), in a form that stays finite where
/// the bump itself underflows. Always strictly negative there.
inline double log_bump_slope(double r) {
  const double t = (r - 1.0 / 3) * 1.5;
  // b / (a + b) with a = exp(-1/(1-t)), b = exp(-1/t)
  const double w = 1.0 / (1.0 + std::exp(1.0 / t - 1.0 / (1 - t)));
  return -1.5 * w * (1.0 / ((1 - t) * (1 - t)) + 1.0 / (t * t));
}

/// log plateau_bump(r) on (1/3, 1): -1/(1-t) - log(a + b), finite for r < 1.
inline double log_bump(double r) {
  const double t = (r - 1.0 / 3) * 1.5;
  const double la = -1.0 / (1 - t), lb = -1.0 / t;
  const double mx = std::max(la, lb);
  return la - (mx + std::log(std::exp(la - mx) + std::exp(lb - mx)));
}

}  // namespace detail

struct ProfileAudit {
  bool vanishes_off_tube = true;   // (i)
  bool exceeds_one_on_N = true;    // (ii)
  bool positive_on_tube = true;    // (iii)
  bool critical_values_above_one = true;  // (iv)
  int grid_points = 0;
  int plateau_critical = 0;    // grid points with small gradient on the plateau
  int tail_certified = 0;      // small gradient, value <= 1, log-slope strictly negative
  double value_on_N = 0;
  long long euler_characteristic = 0;
  bool chi_zero = false;
  std::vector<std::string> failures;
  bool ok() const { return vanishes_off_tube && exceeds_one_on_N && positive_on_tube && critical_values_above_one; }
};

/// f(X) = height * plateau_bump(|X - center| / rho) on the chart interval,
/// constant along N. Raw front coordinates.
struct PushProfile {
  double center = 0, rho = 0, height = 1.5;
  double chart_lo = 0, chart_hi = 0;
  int n_dim = 0;  // dimension of N
  ProfileAudit audit;

  double value(double X) const { return height * spin::plateau_bump((X - center) / rho); }
  double gradient(double X) const {
    const double s = X >= center ? 1.0 : -1.0;
    return height * spin::plateau_bump_d((X - center) / rho) * s / rho;
  }
};

/// Builds the profile and audits the four pushing conditions on a grid of
/// the chart. Gradient-small points on the tail are certified non-critical
/// by the closed-form logarithmic derivative.
inline PushProfile bump_profile(double center, double rho, double height, double chart_lo, double chart_hi, int n_dim,
                                int samples = 4096, double grad_tol = 1e-6) {
  if (!(height > 1 && height <= 2)) throw DomainError("push height must lie in (1, 2]; got " + std::to_string(height));
  if (!(rho > 0)) throw DomainError("tube radius must be positive");
  if (!(center - rho > chart_lo && center + rho < chart_hi))
    throw DomainError("tube of radius " + std::to_string(rho) + " leaves the chart");
  PushProfile p{center, rho, height, chart_lo, chart_hi, n_dim, {}};
  ProfileAudit& a = p.audit;
  a.value_on_N = p.value(center);
  if (!(a.value_on_N > 1)) {
    a.exceeds_one_on_N = false;
    a.failures.push_back("(ii) f = " + std::to_string(a.value_on_N) + " on N");
  }
  for (int i = 0; i <= samples; ++i) {
    const double X = chart_lo + (chart_hi - chart_lo) * i / samples;
    const double r = std::abs(X - center) / rho;
    const double f = p.value(X);
    ++a.grid_points;
    if (r >= 1) {
      if (f != 0) {
        a.vanishes_off_tube = false;
        a.failures.push_back("(i) f = " + std::to_string(f) + " at X = " + std::to_string(X));
      }
      continue;
    }
    // (iii) via the logarithm, which stays finite where f underflows
    const double lf = r <= 1.0 / 3 ? std::log(height) : std::log(height) + detail::log_bump(r);
    if (!(std::isfinite(lf))) {
      a.positive_on_tube = false;
      a.failures.push_back("(iii) f not positive at X = " + std::to_string(X));
    }
    if (std::abs(p.gradient(X)) >= grad_tol) continue;
    if (f > 1) {
      ++a.plateau_critical;
    } else if (r > 1.0 / 3 && detail::log_bump_slope(r) < 0) {
      ++a.tail_certified;
    } else {
      a.critical_values_above_one = false;
      a.failures.push_back("(iv) critical value " + std::to_string(f) + " at X = " + std::to_string(X));
    }
  }
  a.euler_characteristic = spin::torus_euler_characteristic(n_dim);
  a.chi_zero = a.euler_characteristic == 0;
  return p;
}

struct PushSite {
  double center = 0;   // raw x of N in the chart
  int upper_rank = 0;  // the upper sheet, counted from the top at `center`
};

struct PushResult {
  ParamFront front;
  PushProfile profile;
  double level_coreal = 0;  // f^{-1}(1)
  double band_coreal = 0;   // shifted copies across the tube
  int band_copies = 0;
};

namespace detail {

/// Raw x of every cusp tip, crossing and existing push tube end.
inline std::vector<double> chart_features(const ParamFront& F) {
  std::vector<double> xs;
  const auto& w = F.word.word();
  for (int e = 0; e < static_cast<int>(w.size()); ++e) xs.push_back(e + 0.5);
  for (const auto& p : F.pushes) {
    xs.push_back(p.center - p.rho);
    xs.push_back(p.center + p.rho);
  }
  return xs;
}

inline double locus_coreal(const ParamFront& F, const linalg::ComplexStructure& J, double x, double z, int k_res) {
  const auto grid = spin::detail::angle_grid(F.k_dim(), k_res);
  std::vector<double> m(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) {
    const Matrix t = F.tube_tangents(grid[i], x, z);
    const auto sub = linalg::Subspace::span_of(t, 1e-12);
    m[i] = sub.dim() < t.cols() ? 0.0 : linalg::is_coreal(sub, J).margin;
  });
  return *std::min_element(m.begin(), m.end());
}

}  // namespace detail

/// Pushes the sheet just below `upper_rank` up through it along
/// N = K x {center}. The output agrees with the input outside the tube.
inline PushResult n_push(const ParamFront& F, const PushSite& site, double height = 1.5, double rho = 0,
                         const std::string& origin = "push", int k_res = 32) {
  const auto feats = detail::chart_features(F);
  double lo = -std::numeric_limits<double>::infinity(), hi = std::numeric_limits<double>::infinity();
  for (double x : feats) {
    if (std::abs(x - site.center) < 1e-12) throw DomainError("push center sits on a cusp, crossing or tube boundary");
    if (x < site.center) lo = std::max(lo, x);
    else hi = std::min(hi, x);
  }
  if (!std::isfinite(lo) || !std::isfinite(hi)) throw DomainError("push center lies outside the front");
  const double inj = std::min(site.center - lo, hi - site.center);
  if (rho <= 0) rho = inj / 3;
  if (!(rho < inj)) throw DomainError("tube radius " + std::to_string(rho) + " exceeds the injectivity radius " + std::to_string(inj));

  PushResult res;
  res.profile = bump_profile(site.center, rho, height, lo, hi, F.k_dim());
  if (!res.profile.audit.ok()) {
    std::string msg = "push profile audit failed:";
    for (const auto& f : res.profile.audit.failures) msg += " " + f + ";";
    throw DomainError(msg);
  }

  // the two sheets at the center and at both tube ends
  auto pick = [&](double X) {
    const auto hits = spin::sheets_at(F.curve, X);
    if (site.upper_rank < 0 || site.upper_rank + 1 >= static_cast<int>(hits.size()))
      throw DomainError("no pair of sheets at rank " + std::to_string(site.upper_rank) + " over x = " + std::to_string(X));
    return std::pair{hits[site.upper_rank], hits[site.upper_rank + 1]};
  };
  const auto [up0, low0] = pick(site.center);
  const auto [upa, lowa] = pick(site.center - rho);
  const auto [upb, lowb] = pick(site.center + rho);
  if (upa.component != up0.component || upb.component != up0.component || lowa.component != low0.component ||
      lowb.component != low0.component)
    throw DomainError("sheets change identity inside the tube");

  spin::SheetPush sp;
  sp.center = site.center;
  sp.rho = rho;
  sp.height = height;
  sp.origin = origin;
  sp.lower_comp = low0.component;
  sp.upper_comp = up0.component;
  sp.lower_lo = F.wrap_near(low0.component, lowa.param, low0.param);
  sp.lower_hi = F.wrap_near(low0.component, lowb.param, low0.param);
  sp.upper_lo = F.wrap_near(up0.component, upa.param, up0.param);
  sp.upper_hi = F.wrap_near(up0.component, upb.param, up0.param);
  for (auto [a, b, mid] : {std::tuple{sp.lower_lo, sp.lower_hi, low0.param}, std::tuple{sp.upper_lo, sp.upper_hi, up0.param}})
    if (!(std::min(a, b) < mid && mid < std::max(a, b))) throw DomainError("sheet parameters are not monotone over the tube");

  // the pushed sheet must clear every sheet above the upper one
  for (int i = 0; i <= 256; ++i) {
    const double X = site.center - rho + 2 * rho * i / 256;
    const auto hits = spin::sheets_at(F.curve, X);
    const double z_low = hits[site.upper_rank + 1].z, z_up = hits[site.upper_rank].z;
    const double pushed = z_low + (z_up - z_low) * res.profile.value(X);
    if (site.upper_rank > 0 && !(hits[site.upper_rank - 1].z > pushed))
      throw DomainError("pushed sheet meets a third sheet at raw x = " + std::to_string(X));
  }

  ParamFront G = F;
  G.pushes.push_back(sp);
  G.rebuild_strata();

  // co-reality of the level set and of the shifted copies N x {c}
  const auto J = linalg::standard_J(F.n() + 1);
  res.level_coreal = std::numeric_limits<double>::infinity();
  for (const auto& s : G.strata)
    if (s.origin == origin && s.kind == spin::StratumKind::Crossing)
      res.level_coreal = std::min(res.level_coreal, detail::locus_coreal(G, J, s.x, s.z, k_res));
  res.band_coreal = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 8; ++i) {
    const double X = site.center - rho + 2 * rho * i / 8;
    const double u = spin::solve_param(F.curve, sp.lower_comp, sp.lower_lo, sp.lower_hi, X);
    const auto p = G.fiber(sp.lower_comp, u);
    res.band_coreal = std::min(res.band_coreal, detail::locus_coreal(G, J, p.x, p.z, k_res));
    ++res.band_copies;
  }
  if (!(res.level_coreal > 0)) throw DomainError("level set f^-1(1) is not co-real: margin " + std::to_string(res.level_coreal));
  if (!(res.band_coreal > 0)) throw DomainError("a shifted copy of N is not co-real: margin " + std::to_string(res.band_coreal));
  res.front = std::move(G);
  return res;
}

/// Largest fiber-point deviation between two fronts over samples of the
/// curve parameter whose raw x lies outside [lo, hi].
inline double deviation_outside(const ParamFront& a, const ParamFront& b, double lo, double hi, int per_unit = 256) {
  double worst = 0;
  for (int c = 0; c < a.curve.component_count(); ++c) {
    const double per = a.curve.period(c);
    const int m = static_cast<int>(per * per_unit);
    for (int i = 0; i < m; ++i) {
      const double u = per * (i + 0.5) / m;
      const double X = spin::raw_point(a.curve, c, u).x;
      if (X >= lo && X <= hi) continue;
      const auto p = a.fiber(c, u), q = b.fiber(c, u);
      worst = std::max({worst, std::abs(p.x - q.x), std::abs(p.z - q.z), std::abs(p.slope - q.slope)});
    }
  }
  return worst;
}

struct StabilizeSite {
  int slice = 1;  // N sits on strand `pos` of this slice of the fiber front
  int pos = 0;
  front::FishSide side = front::FishSide::Below;
};

struct StabilizeResult {
  ParamFront front;
  std::map<std::string, int> census_before, census_after;
  double N_coreal = 0, N_prime_coreal = 0;
  double N_x = 0, N_z = 0;      // world fiber point of N before the move
  double N_prime_raw = 0;       // raw chart coordinate of N' after the fish
  long long euler_characteristic = 0;
  PushResult push;
};

/// Fish along N, then a push along the parallel copy N' next to the new cusp.
inline StabilizeResult stabilize_preleg(const ParamFront& F, const StabilizeSite& site, double height = 1.5,
                                        int k_res = 32) {
  if (!F.pushes.empty()) throw DomainError("stabilize before pushing: the front already carries pushes");
  front::detail::require_slice(F.word, site.slice, site.pos);
  StabilizeResult r;
  r.census_before = F.census();
  const auto J = linalg::standard_J(F.n() + 1);

  // N = K x {point of the strand at raw x = slice}; strands rest there
  const auto pN = F.curve.to_world({static_cast<double>(site.slice), -static_cast<double>(site.pos), 0, 0, 0});
  r.N_x = pN.x;
  r.N_z = pN.z;
  r.N_coreal = detail::locus_coreal(F, J, pN.x, pN.z, k_res);
  if (!(r.N_coreal > 0)) throw DomainError("N is not co-real: margin " + std::to_string(r.N_coreal));
  r.euler_characteristic = spin::torus_euler_characteristic(F.k_dim());

  ParamFront G;
  G.emb = F.emb;
  G.geometry = F.geometry;
  G.word = front::apply_RI(F.word, site.slice, site.pos, site.side);
  G.event_origin = F.event_origin;
  G.event_origin.insert(G.event_origin.begin() + site.slice, 3, "ri");
  G.provenance = F.provenance + (F.provenance.empty() ? "" : "; ") + "stabilized along N at slice " +
                 std::to_string(site.slice) + " strand " + std::to_string(site.pos);
  spin::assemble(G, F.reach);

  // the fiber front of every N-parameter is the same valid RI move
  if (!(front::remove_RI(G.word, static_cast<std::size_t>(site.slice)) == F.word))
    throw ConsistencyError("fish insertion is not an RI move of the fiber front");
  // crossing angles are judged at unit scale, where the contact scaling is the identity
  const auto audit = front::audit_front(front::realize(G.word));
  if (!audit.ok) throw DomainError("fiber front after the fish fails its audit: " + audit.failures.front());

  // chart between the new cusp tip (slice + 0.5) and the fish crossing (slice + 1.5)
  const double chart_center = site.slice + 1.0;
  const double rho = 0.5 / 3;
  r.N_prime_raw = chart_center - rho / 2;
  const int upper = site.side == front::FishSide::Below ? site.pos + 1 : site.pos;
  r.push = n_push(G, {r.N_prime_raw, upper}, height, rho, "stabilization", k_res);
  r.N_prime_coreal = r.push.band_coreal;
  r.front = r.push.front;
  r.census_after = r.front.census();
  return r;
}

}  // namespace preleg::moves
