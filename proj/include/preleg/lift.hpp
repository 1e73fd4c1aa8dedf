// Legendrian and prelegendrian lifts of parametrized fronts, and the
// numerical checks that a front is the projection of a prelegendrian:
// immersion of the lift, the corank-one condition against the fat
// distribution, transversality of complex parts at double points.
#pragma once

#include "preleg/common.hpp"
#include "preleg/forms.hpp"
#include "preleg/linalg_j.hpp"
#include "preleg/spin.hpp"

#include <functional>
#include <random>
#include <string>
#include <vector>

namespace preleg::lift {

/// A parametrized front hypersurface with a co-oriented unit conormal.
struct FrontMap {
  int domain_dim = 0;
  int ambient = 0;
  std::function<Vector(const Vector&)> point;
  std::function<Vector(const Vector&)> conormal;
};

/// Sign convention: last coordinate positive, else the first nonzero one.
inline Vector co_orient(Vector a, double tol = 1e-14) {
  double key = a(a.size() - 1);
  for (Eigen::Index i = 0; i < a.size() && std::abs(key) <= tol; ++i) key = a(i);
  return key < 0 ? Vector(-a) : a;
}

/// {x_m = 0} in R^m, parametrized by the first m-1 coordinates.
inline FrontMap flat_hyperplane(int m) {
  FrontMap f;
  f.domain_dim = m - 1;
  f.ambient = m;
  f.point = [m](const Vector& u) {
    Vector p = Vector::Zero(m);
    p.head(m - 1) = u;
    return p;
  };
  f.conormal = [m](const Vector&) { return Vector(Vector::Unit(m, m - 1)); };
  return f;
}

/// (q, -3t^2, 2t^3) in R^{2n+2} with q in R^{2n}; the conormal is the
/// analytic family t dx_{2n+1} + dx_{2n+2}, normalized.
inline FrontMap cusp_model_front(int n) {
  const int m = 2 * n + 2;
  FrontMap f;
  f.domain_dim = m - 1;
  f.ambient = m;
  f.point = [m](const Vector& u) {
    const double t = u(m - 2);
    Vector p(m);
    p.head(m - 2) = u.head(m - 2);
    p(m - 2) = -3 * t * t;
    p(m - 1) = 2 * t * t * t;
    return p;
  };
  f.conormal = [m](const Vector& u) {
    const double t = u(m - 2);
    Vector a = Vector::Zero(m);
    a(m - 2) = t;
    a(m - 1) = 1;
    return Vector(a / a.norm());
  };
  return f;
}

/// Component c of a spun front; the domain is (k_1, ..., k_{2n}, u).
inline FrontMap front_map(const spin::ParamFront& F, int c) {
  FrontMap f;
  f.domain_dim = F.domain_dim();
  f.ambient = F.ambient();
  const int kd = F.k_dim();
  f.point = [&F, c, kd](const Vector& w) { return F.point(w.head(kd), c, w(kd)); };
  f.conormal = [&F, c, kd](const Vector& w) { return F.conormal(w.head(kd), c, w(kd)); };
  return f;
}

struct LegendrianPoint {
  Vector q;
  Vector conormal;
};

inline LegendrianPoint legendrian_lift(const FrontMap& f, const Vector& u) {
  return {f.point(u), f.conormal(u)};
}

struct Slope {
  CVector y;
  double chart = 0;  // |c_{n+1}| / |c|
};

/// Affine chart coordinates of ker alpha^J: y_j = c_j / c_{n+1}.
inline Slope slope_of(const Vector& alpha, const linalg::ComplexStructure& J, double chart_tol = 1e-8) {
  const CVector c = linalg::complex_coefficients(linalg::complexify({alpha}, J), J);
  const Eigen::Index m = c.size();
  Slope s;
  s.chart = std::abs(c(m - 1)) / c.norm();
  if (!(s.chart > chart_tol))
    throw DomainError("chart escape: |c_last| / |c| = " + std::to_string(s.chart) + " below " + std::to_string(chart_tol));
  s.y = c.head(m - 1) / c(m - 1);
  return s;
}

/// The complex hyperplane ker alpha^J in affine chart coordinates, recovered
/// from a real hyperplane basis through its complex part.
inline CVector chart_of_complex_part(const Matrix& hyperplane, const linalg::ComplexStructure& J) {
  const auto cp = linalg::complex_part(linalg::Subspace::span_of(hyperplane), J);
  // conormal of the complex part inside J-adapted coordinates: the complex
  // linear functional vanishing on it
  const Matrix& A = J.adapted_coordinates();
  const int m = J.complex_dim();
  CMatrix W(cp.dim(), m);
  for (int r = 0; r < cp.dim(); ++r) {
    const Vector a = A * cp.orthonormal().col(r);
    for (int k = 0; k < m; ++k) W(r, k) = {a(2 * k), a(2 * k + 1)};
  }
  Eigen::JacobiSVD<CMatrix> svd(W, Eigen::ComputeFullV);
  const CVector c = svd.matrixV().col(m - 1);
  return c.head(m - 1) / c(m - 1);
}

/// Prelegendrian lift u -> (q(u), y(u)) in the affine chart, with the fat
/// coordinates of the standard structure taken in J-adapted coordinates.
struct LiftedPrelegendrian {
  FrontMap front;
  linalg::ComplexStructure J;
  double chart_tol = 1e-8;

  int n() const { return J.complex_dim() - 1; }

  Slope slope(const Vector& u) const { return slope_of(front.conormal(u), J, chart_tol); }

  /// Point of R^{4n+2}: x_j = w_j, z = w_{n+1}, y_j = slope_j.
  Vector fat_coordinates(const Vector& u) const {
    const int nn = n();
    const forms::StandardCoords sc{nn};
    const Vector w = J.adapted_coordinates() * front.point(u);
    const CVector y = slope(u).y;
    Vector out(sc.dim());
    for (int j = 1; j <= nn; ++j) {
      out(sc.x(j, 1)) = w(2 * (j - 1));
      out(sc.x(j, 2)) = w(2 * (j - 1) + 1);
      out(sc.y(j, 1)) = y(j - 1).real();
      out(sc.y(j, 2)) = y(j - 1).imag();
    }
    out(sc.z(1)) = w(2 * nn);
    out(sc.z(2)) = w(2 * nn + 1);
    return out;
  }

  /// Central finite-difference Jacobian of the fat coordinates.
  Matrix jacobian(const Vector& u, double h) const {
    Matrix jac(4 * n() + 2, front.domain_dim);
    for (int i = 0; i < front.domain_dim; ++i) {
      Vector a = u, b = u;
      a(i) += h;
      b(i) -= h;
      jac.col(i) = (fat_coordinates(a) - fat_coordinates(b)) / (2 * h);
    }
    return jac;
  }
};

inline LiftedPrelegendrian prelegendrian_lift(const FrontMap& f, const linalg::ComplexStructure& J,
                                              double chart_tol = 1e-8) {
  if (J.dim() != f.ambient) throw DimensionError("complex structure does not match the front's ambient space");
  if (f.ambient < 4) throw DomainError("prelegendrian lifts need ambient dimension at least 4");
  return {f, J, chart_tol};
}

// ---------------------------------------------------------------------------
// Report sections

struct Section {
  std::string name;
  bool pass = true;
  double margin = std::numeric_limits<double>::infinity();
  long samples = 0;
  long failures = 0;
  std::vector<std::string> notes;  // first failures, human readable

  void fail(const std::string& what) {
    pass = false;
    ++failures;
    if (notes.size() < 20) notes.push_back(what);
  }
};

inline std::string describe(const Vector& u) {
  std::string s = "(";
  char buf[32];
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%s%.6g", i ? ", " : "", u(i));
    s += buf;
  }
  return s + ")";
}

struct ImmersionRecord {
  int rank = 0;
  double margin = 0;  // d-th singular value, d = domain dimension
};

inline ImmersionRecord immersion_at(const LiftedPrelegendrian& L, const Vector& u, double h = 1e-5,
                                    double rel_tol = 1e-8) {
  const Vector sv = singular_values(L.jacobian(u, h));
  return {numerical_rank(sv, rel_tol), kth_singular_value(sv, L.front.domain_dim)};
}

/// Full rank of the lift's finite-difference Jacobian at every sample.
inline Section verify_immersion(const LiftedPrelegendrian& L, const std::vector<Vector>& samples, double h = 1e-5,
                                double rel_tol = 1e-8) {
  Section s{"immersion"};
  std::vector<ImmersionRecord> rec(samples.size());
  std::vector<std::string> err(samples.size());
  parallel_for(samples.size(), [&](std::size_t i) {
    try {
      rec[i] = immersion_at(L, samples[i], h, rel_tol);
    } catch (const DomainError& e) {
      err[i] = e.what();
    }
  });
  for (std::size_t i = 0; i < samples.size(); ++i) {
    ++s.samples;
    if (!err[i].empty()) {
      s.fail("at " + describe(samples[i]) + ": " + err[i]);
      s.margin = 0;
      continue;
    }
    s.margin = std::min(s.margin, rec[i].margin);
    if (rec[i].rank < L.front.domain_dim)
      s.fail("rank " + std::to_string(rec[i].rank) + " at " + describe(samples[i]));
  }
  return s;
}

struct RankRecord {
  int rank = 0;
  double separation = 0;  // sigma_1 / (|lambda| |frame|): distance from rank 0
  double residual = 0;    // sigma_2 / sigma_1
};

/// Rank of [lambda1(v_i); lambda2(v_i)] over a finite-difference tangent frame.
inline RankRecord rank_condition_at(const LiftedPrelegendrian& L, const forms::Distribution2& D, const Vector& u,
                                    double h = 1e-5, double rel_tol = 1e-8) {
  const Matrix V = L.jacobian(u, h);
  const Matrix lam = D.eval(L.fat_coordinates(u));
  const Vector sv = singular_values(lam * V);
  const double scale = lam.norm() * V.norm();
  RankRecord r;
  r.separation = scale > 0 ? sv(0) / scale : 0;
  r.residual = sv(0) > 0 ? sv(1) / sv(0) : 0;
  r.rank = r.separation <= rel_tol ? 0 : (r.residual > rel_tol ? 2 : 1);
  return r;
}

inline Section verify_prelegendrian_condition(const LiftedPrelegendrian& L, const forms::Distribution2& D,
                                              const std::vector<Vector>& samples, double h = 1e-5,
                                              double rel_tol = 1e-8, double* max_residual = nullptr) {
  if (D.dim() != 4 * L.n() + 2) throw DimensionError("distribution does not live on the lift's fat coordinates");
  Section s{"rank_condition"};
  std::vector<RankRecord> rec(samples.size());
  std::vector<std::string> err(samples.size());
  parallel_for(samples.size(), [&](std::size_t i) {
    try {
      rec[i] = rank_condition_at(L, D, samples[i], h, rel_tol);
    } catch (const DomainError& e) {
      err[i] = e.what();
    }
  });
  double worst = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    ++s.samples;
    if (!err[i].empty()) {
      s.fail("at " + describe(samples[i]) + ": " + err[i]);
      s.margin = 0;
      continue;
    }
    s.margin = std::min(s.margin, rec[i].separation);
    worst = std::max(worst, rec[i].residual);
    if (rec[i].rank != 1) s.fail("rank " + std::to_string(rec[i].rank) + " at " + describe(samples[i]));
  }
  if (max_residual) *max_residual = worst;
  return s;
}

struct IntersectionRecord {
  double projector_distance = 0;  // |P_a - P_b| of the complex parts
  linalg::RankTest coreal;         // of T_a ∩ T_b
  bool agree = true;
};

/// Two hyperplanes through a double point, given by their conormals.
inline IntersectionRecord compare_branches(const Vector& alpha_a, const Vector& alpha_b,
                                           const linalg::ComplexStructure& J, double tol = 1e-9) {
  const Matrix Ta = null_space(alpha_a.transpose());
  const Matrix Tb = null_space(alpha_b.transpose());
  IntersectionRecord r;
  const auto ca = linalg::complex_part(linalg::Subspace(Ta), J);
  const auto cb = linalg::complex_part(linalg::Subspace(Tb), J);
  r.projector_distance = (ca.projector() - cb.projector()).norm();
  Matrix both(2, alpha_a.size());
  both.row(0) = alpha_a.transpose();
  both.row(1) = alpha_b.transpose();
  const Matrix S = null_space(both, 1e-12);
  if (S.cols() != alpha_a.size() - 2) {
    r.coreal = {false, 0.0};  // the branches are tangent
  } else {
    r.coreal = linalg::is_coreal(linalg::Subspace(S), J, tol);
  }
  r.agree = (r.projector_distance > tol) == r.coreal.flag;
  return r;
}

/// PASS iff the complex parts of the two branch hyperplanes differ at every
/// sample; the co-reality of their intersection is computed alongside and
/// any disagreement between the two tests is a failure of its own.
inline Section verify_self_intersection(const std::vector<std::pair<Vector, Vector>>& conormal_pairs,
                                        const linalg::ComplexStructure& J, double tol = 1e-9) {
  Section s{"self_intersection"};
  for (std::size_t i = 0; i < conormal_pairs.size(); ++i) {
    ++s.samples;
    const auto r = compare_branches(conormal_pairs[i].first, conormal_pairs[i].second, J, tol);
    s.margin = std::min(s.margin, r.projector_distance);
    if (!r.agree) s.fail("projector test and co-reality test disagree at pair " + std::to_string(i));
    else if (!r.coreal.flag) s.fail("complex parts coincide at pair " + std::to_string(i));
  }
  return s;
}

// ---------------------------------------------------------------------------
// Aggregate verification of spun fronts

struct VerifyConfig {
  int k_res = 24;          // K grid per angle for the lift checks
  int u_per_unit = 16;     // front samples per unit of curve parameter
  int coreal_k_res = 64;   // K grid per angle for the stratum loci
  double fd_step = 1e-5;
  double rank_rel_tol = 1e-8;
  double chart_tol = 1e-8;
  double coreal_tol = 1e-9;
  double separation_tol = 1e-9;
  int injectivity_samples = 1500;
  std::uint64_t seed = 0;
};

struct VerificationReport {
  std::vector<Section> sections;
  bool pass = true;
  long samples = 0;
  double immersion_margin = 0;
  double cusp_immersion_margin = 0;  // over samples on cusp strata
  double rank_margin = 0;
  double rank_residual = 0;
  double coreal_margin = 0;
  double chart_margin = 0;
  std::vector<double> stratum_coreal;  // per stratum
  std::vector<std::string> failures;

  const Section* section(const std::string& name) const {
    for (const auto& s : sections)
      if (s.name == name) return &s;
    return nullptr;
  }
};

inline VerificationReport full_verify(const spin::ParamFront& F, const linalg::ComplexStructure& J,
                                      const forms::Distribution2& D, const VerifyConfig& cfg = {}) {
  VerificationReport rep;
  if (J.dim() != F.ambient()) throw DimensionError("complex structure does not match the spun front");
  if (D.dim() != 4 * F.n() + 2) throw DimensionError("distribution does not match the spun front");

  // stratum loci
  Section cor{"coreal_loci"};
  const auto loci = spin::verify_coreal_loci(F, J, cfg.coreal_k_res, cfg.coreal_tol);
  cor.samples = loci.samples;
  for (const auto& l : loci.loci) {
    rep.stratum_coreal.push_back(l.margin);
    cor.margin = std::min(cor.margin, l.margin);
    if (!l.ok) {
      const auto& st = F.strata[l.stratum];
      cor.fail("stratum " + std::to_string(l.stratum) + " (" + (st.kind == spin::StratumKind::Cusp ? "cusp" : "crossing") +
               ", " + st.origin + ") margin " + std::to_string(l.margin) + " at k=" + describe(l.argmin));
    }
  }
  if (F.strata.empty()) cor.margin = 0;
  rep.coreal_margin = F.strata.empty() ? 0 : cor.margin;

  // lift checks over the sample grid
  const auto samples = F.samples(cfg.k_res, cfg.u_per_unit);
  const int kd = F.k_dim();
  std::vector<LiftedPrelegendrian> lifts;
  for (int c = 0; c < F.curve.component_count(); ++c)
    lifts.push_back(prelegendrian_lift(front_map(F, c), J, cfg.chart_tol));
  auto domain = [kd](const spin::DomainSample& s) {
    Vector w(kd + 1);
    w.head(kd) = s.k;
    w(kd) = s.u;
    return w;
  };

  struct Rec {
    ImmersionRecord imm;
    RankRecord rank;
    double chart = 0;
    std::string err;
  };
  std::vector<Rec> rec(samples.size());
  parallel_for(samples.size(), [&](std::size_t i) {
    const auto& s = samples[i];
    const auto& L = lifts[s.component];
    const Vector w = domain(s);
    try {
      rec[i].chart = L.slope(w).chart;
      rec[i].imm = immersion_at(L, w, cfg.fd_step, cfg.rank_rel_tol);
      rec[i].rank = rank_condition_at(L, D, w, cfg.fd_step, cfg.rank_rel_tol);
    } catch (const DomainError& e) {
      rec[i].err = e.what();
    }
  });

  Section chart{"chart"}, imm{"immersion"}, rank{"rank_condition"};
  double cusp_imm = std::numeric_limits<double>::infinity();
  double residual = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    const std::string where = "component " + std::to_string(s.component) + " at " + describe(domain(s));
    ++chart.samples;
    ++imm.samples;
    ++rank.samples;
    if (!rec[i].err.empty()) {
      chart.fail(where + ": " + rec[i].err);
      chart.margin = imm.margin = rank.margin = 0;
      imm.fail(where + ": lift undefined");
      rank.fail(where + ": lift undefined");
      continue;
    }
    chart.margin = std::min(chart.margin, rec[i].chart);
    imm.margin = std::min(imm.margin, rec[i].imm.margin);
    if (s.stratum >= 0 && F.strata[s.stratum].kind == spin::StratumKind::Cusp)
      cusp_imm = std::min(cusp_imm, rec[i].imm.margin);
    if (rec[i].imm.rank < F.domain_dim()) imm.fail("rank " + std::to_string(rec[i].imm.rank) + " at " + where);
    rank.margin = std::min(rank.margin, rec[i].rank.separation);
    residual = std::max(residual, rec[i].rank.residual);
    if (rec[i].rank.rank != 1) rank.fail("rank " + std::to_string(rec[i].rank.rank) + " at " + where);
  }

  // double points: both branches over the same base point, distinct complex parts
  std::vector<std::pair<Vector, Vector>> pairs;
  Section sep{"crossing_separation"};
  for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
    const auto& a = samples[i];
    const auto& b = samples[i + 1];
    if (a.stratum < 0 || b.stratum != a.stratum || F.strata[a.stratum].kind != spin::StratumKind::Crossing) continue;
    const Vector wa = domain(a), wb = domain(b);
    pairs.emplace_back(F.conormal(a.k, a.component, a.u), F.conormal(b.k, b.component, b.u));
    ++sep.samples;
    const double dq = (F.point(a.k, a.component, a.u) - F.point(b.k, b.component, b.u)).norm();
    try {
      const double dy = (lifts[a.component].slope(wa).y - lifts[b.component].slope(wb).y).norm();
      sep.margin = std::min(sep.margin, dy);
      if (dq > 1e-9) sep.fail("branches do not meet at stratum " + std::to_string(a.stratum));
      if (!(dy > cfg.separation_tol)) sep.fail("lift branches meet at stratum " + std::to_string(a.stratum));
    } catch (const DomainError& e) {
      sep.fail(e.what());
    }
    ++i;
  }
  Section inter = verify_self_intersection(pairs, J, cfg.coreal_tol);

  // injectivity spot check on a seeded subset
  Section inj{"injectivity"};
  {
    std::mt19937_64 rng(cfg.seed);
    std::vector<std::size_t> idx(samples.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(std::min<std::size_t>(idx.size(), static_cast<std::size_t>(cfg.injectivity_samples)));
    std::vector<Vector> pts(idx.size());
    std::vector<char> ok(idx.size(), 1);
    for (std::size_t i = 0; i < idx.size(); ++i) {
      try {
        pts[i] = lifts[samples[idx[i]].component].fat_coordinates(domain(samples[idx[i]]));
      } catch (const DomainError&) {
        ok[i] = 0;
      }
    }
    for (std::size_t i = 0; i < idx.size(); ++i) {
      if (!ok[i]) continue;
      const auto& a = samples[idx[i]];
      for (std::size_t j = i + 1; j < idx.size(); ++j) {
        if (!ok[j]) continue;
        const auto& b = samples[idx[j]];
        double d = 1;
        if (a.component == b.component) {
          const double per = F.curve.period(a.component);
          double du = std::abs(a.u - b.u);
          du = std::min(du, per - du);
          d = std::min(1.0, std::hypot(spin::detail::torus_distance(a.k, b.k), du));
          if (d < 1e-12) continue;
        }
        ++inj.samples;
        const double ratio = (pts[i] - pts[j]).norm() / d;
        inj.margin = std::min(inj.margin, ratio);
      }
    }
    if (!(inj.margin > cfg.separation_tol)) inj.fail("lifted points closer than " + std::to_string(cfg.separation_tol));
  }

  rep.sections = {cor, chart, imm, rank, inter, sep, inj};
  rep.samples = static_cast<long>(samples.size());
  rep.immersion_margin = imm.margin;
  rep.cusp_immersion_margin = cusp_imm;
  rep.rank_margin = rank.margin;
  rep.rank_residual = residual;
  rep.chart_margin = chart.margin;
  for (const auto& s : rep.sections) {
    rep.pass = rep.pass && s.pass;
    for (const auto& note : s.notes) rep.failures.push_back(s.name + ": " + note);
  }
  return rep;
}

}  // namespace preleg::lift
