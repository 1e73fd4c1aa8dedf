// Acceptance run: one PASS/FAIL line per criterion, measured values
// alongside. Tolerances are pinned here and nowhere else.
#include "preleg/dga.hpp"
#include "preleg/forms.hpp"
#include "preleg/front.hpp"
#include "preleg/io_json.hpp"
#include "preleg/lift.hpp"
#include "preleg/moves_nd.hpp"
#include "preleg/spin.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>

using namespace preleg;

namespace {

namespace tol {
constexpr double eigen_to_pm_i = 1e-8;        // 1
constexpr double robustness_floor = 1e-6;     // 2
constexpr double quaternion_sigma = 1e-8;     // 4
constexpr double delta_margin = 1e-3;         // 5
constexpr double immersion = 1e-6;            // 7, 11, 12
constexpr double locality = 1e-12;            // 11
constexpr double coreal_threshold = 1e-6;     // 6: co-real iff the margin exceeds this
constexpr double cusp_rank_rel = 1e-6;        // 6
}  // namespace tol

namespace budget {
constexpr double fat_seconds = 10;
constexpr double delta_seconds = 30;
constexpr double spin_seconds = 120;
constexpr double distinguish_seconds = 60;
}  // namespace budget

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Vector uniform_point(std::mt19937_64& rng, int m, double box = 1.0) {
  std::uniform_real_distribution<double> U(-box, box);
  Vector p(m);
  for (int i = 0; i < m; ++i) p(i) = U(rng);
  return p;
}

linalg::ComplexStructure random_J(int m, std::mt19937_64& rng) {
  std::normal_distribution<double> N(0, 1);
  Matrix P(m, m);
  for (;;) {
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) P(i, j) = N(rng);
    const Vector sv = singular_values(P);
    if (sv(m - 1) > 0.2 * sv(0)) break;
  }
  return linalg::ComplexStructure(P * linalg::standard_J(m / 2).matrix() * P.inverse(), 1e-10);
}

// J = R J_std R^T with the first two columns of R an orthonormal basis of `plane`
linalg::ComplexStructure J_preserving(const Matrix& plane, std::mt19937_64& rng) {
  const int m = static_cast<int>(plane.rows());
  Matrix B(m, m);
  B.leftCols(2) = orthonormal_basis(plane);
  const Matrix rest = null_space(B.leftCols(2).transpose());
  // random rotation inside the complement keeps the family generic there
  std::normal_distribution<double> N(0, 1);
  Matrix G(m - 2, m - 2);
  for (int i = 0; i < m - 2; ++i)
    for (int j = 0; j < m - 2; ++j) G(i, j) = N(rng);
  Eigen::HouseholderQR<Matrix> qr(G);
  B.rightCols(m - 2) = rest * Matrix(qr.householderQ());
  return linalg::ComplexStructure(B * linalg::standard_J(m / 2).matrix() * B.transpose(), 1e-10);
}

// ---------------------------------------------------------------------------

Outcome fatness_of_standard() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(1);
  int fat = 0, total = 0;
  double worst = 0;
  for (int n : {1, 2}) {
    const auto d = forms::standard_fat(n);
    for (int i = 0; i < 1000; ++i) {
      const auto r = forms::is_fat_at(d, uniform_point(rng, 4 * n + 2));
      ++total;
      fat += r.flag;
      for (const auto& ev : r.eigenvalues)
        worst = std::max(worst, std::min(std::abs(ev - std::complex<double>(0, 1)), std::abs(ev + std::complex<double>(0, 1))));
    }
  }
  const double s = seconds_since(t0);
  return {fat == total && worst <= tol::eigen_to_pm_i && s < budget::fat_seconds,
          fmt("%d/%d fat, max |ev -+ i| = %.2e, %.2fs", fat, total, worst, s)};
}

Outcome criterion_equivalence() {
  std::mt19937_64 rng(2);
  int compared = 0, fat = 0, disagree = 0, excluded = 0;
  for (int t = 0; t < 100; ++t) {
    const int m = 4 + 2 * (t % 3);
    const auto d = forms::random_affine_distribution(m, rng);
    const Vector p = uniform_point(rng, m);
    const auto e = forms::is_fat_at(d, p);
    if (e.robustness < tol::robustness_floor) {
      ++excluded;
      continue;
    }
    ++compared;
    fat += e.flag;
    disagree += (forms::sphere_test(d, p, 360) != e.flag) + (forms::symplectisation_fat(d, p, 360) != e.flag);
  }
  return {disagree == 0 && compared > 0,
          fmt("%d compared (%d fat), %d excluded below margin, %d disagreements", compared, fat, excluded, disagree)};
}

Outcome negative_control() {
  std::mt19937_64 rng(3);
  const auto d = forms::integrable_distribution(2);
  int any = 0;
  for (int i = 0; i < 100; ++i) {
    const Vector p = uniform_point(rng, 6);
    any += forms::is_fat_at(d, p).flag + forms::sphere_test(d, p) + forms::symplectisation_fat(d, p);
  }
  return {any == 0, fmt("100 points, %d positive verdicts", any)};
}

Outcome quaternionic() {
  const auto q = forms::quaternionic_fatization();
  std::mt19937_64 rng(4);
  std::vector<Vector> pts{Vector::Zero(7)};
  for (int i = 0; i < 5; ++i) pts.push_back(uniform_point(rng, 7));
  double worst = std::numeric_limits<double>::infinity();
  int count = 0;
  const int rings = 10, per = 20;
  for (const auto& p : pts)
    for (int a = 0; a < rings; ++a)
      for (int b = 0; b < per; ++b) {
        const double th = std::numbers::pi * (a + 0.5) / rings, ph = 2 * std::numbers::pi * b / per;
        const std::array<double, 3> v{std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)};
        const Vector sv = singular_values(forms::corank_three_combination(q, p, v));
        worst = std::min(worst, sv(sv.size() - 1));
        ++count;
      }
  return {worst > tol::quaternion_sigma, fmt("%d combinations, min singular value %.3e", count, worst)};
}

Outcome clifford_delta() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto s = spin::find_delta(1, 64, tol::delta_margin);
  const auto zero = spin::embedding_margins(spin::clifford_perturbed(1, 0.0), 64);
  const double secs = seconds_since(t0);
  const bool ok = s.coreal > tol::delta_margin && s.graph > tol::delta_margin && !(zero.graph() > tol::delta_margin) &&
                  secs < budget::delta_seconds;
  return {ok, fmt("delta = %.2f (coreal %.4f, graph %.4f); delta = 0 graph %.2e; %.1fs", s.delta, s.coreal, s.graph,
                  zero.graph(), secs)};
}

Outcome cusp_dichotomy() {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> U(-1, 1);
  const auto f = lift::cusp_model_front(1);
  Matrix locus = Matrix::Zero(4, 2);
  locus(0, 0) = locus(1, 1) = 1;
  int match = 0, coreal_n = 0, escaped = 0;
  for (int i = 0; i < 100; ++i) {
    const auto J = i % 2 ? random_J(4, rng) : J_preserving(locus, rng);
    const double margin = linalg::is_coreal(linalg::Subspace(locus), J).margin;
    const bool coreal = margin > tol::coreal_threshold;
    coreal_n += coreal;
    Vector u(3);
    u << U(rng), U(rng), 0.0;
    try {
      const auto r = lift::immersion_at(lift::prelegendrian_lift(f, J), u, 1e-5, tol::cusp_rank_rel);
      match += (r.rank == 3) == coreal;
    } catch (const DomainError&) {
      ++escaped;
    }
  }
  return {match == 100 && coreal_n > 0 && coreal_n < 100,
          fmt("%d/100 samples match (%d co-real, %d complex, %d chart escapes)", match, coreal_n, 100 - coreal_n, escaped)};
}

spin::ParamFront build_spun(const front::PlatFront& w, std::string* note = nullptr) {
  const auto s = spin::find_delta(1, 64);
  const auto e = spin::thicken(spin::clifford_perturbed(1, s.delta), 0.05).embedding;
  auto F = spin::spin_front(w, e, {0.01, true});
  // through the file format, as the command line pipeline does
  F = io::param_front_from_json(io::to_json(F));
  if (note) *note = fmt("delta %.2f", s.delta);
  return F;
}

bool strata_coreal(const lift::VerificationReport& r) {
  if (r.stratum_coreal.empty()) return false;
  for (double m : r.stratum_coreal)
    if (!(m > 0)) return false;
  return true;
}

Outcome spun_unknot() {
  const auto t0 = std::chrono::steady_clock::now();
  std::string note;
  const auto F = build_spun(front::unknot(), &note);
  const auto r = lift::full_verify(F, linalg::standard_J(2), forms::standard_fat(1));
  const double secs = seconds_since(t0);
  const auto* rank = r.section("rank_condition");
  const bool ok = r.pass && rank && rank->pass && r.samples >= 10000 && r.immersion_margin > tol::immersion &&
                  r.cusp_immersion_margin > tol::immersion && strata_coreal(r) && secs < budget::spin_seconds;
  std::string fails;
  for (std::size_t i = 0; i < r.failures.size() && i < 3; ++i) fails += "; " + r.failures[i];
  return {ok, fmt("%s, %ld samples, immersion %.2e, cusp tori %.2e, min stratum co-reality %.4f, %.1fs%s", note.c_str(),
                  r.samples, r.immersion_margin, r.cusp_immersion_margin, r.coreal_margin, secs, fails.c_str())};
}

Outcome dga_soundness() {
  std::mt19937_64 rng(8);
  int fronts = 0, bad_d2 = 0, bad_deg = 0, sig_changes = 0;
  for (const auto& base : {front::unknot(), front::whitehead_double_W(3), front::whitehead_double_W(5)}) {
    const auto s0 = dga::invariant_signature(base);
    std::vector<front::PlatFront> fs{base};
    for (int i = 0; i < 20; ++i) fs.push_back(front::random_legendrian_moves(base, 8, rng, 24));
    for (std::size_t i = 0; i < fs.size(); ++i) {
      const auto a = dga::compute_dga(fs[i]);
      ++fronts;
      for (int g = 0; g < a.size(); ++g) {
        bad_d2 += !dga::d_squared(a, g).empty();
        for (const auto& w : a.differential[g]) bad_deg += a.word_degree(w) != a.degrees[g] - 1;
      }
      if (i > 0) sig_changes += dga::signature_of(a) != s0;
    }
  }
  return {bad_d2 == 0 && bad_deg == 0 && sig_changes == 0,
          fmt("%d fronts, %d nonzero d^2, %d degree violations, %d signature changes", fronts, bad_d2, bad_deg,
              sig_changes)};
}

Outcome rotation_certificates() {
  bool ok = true;
  std::string d;
  for (int s : {3, 5, 7}) {
    const int r = front::rotation_number(front::whitehead_double_W(s));
    ok = ok && r == 0;
    d += fmt("rot(W_%d) = %d, ", s, r);
  }
  const auto u = front::unknot();
  const int r0 = front::rotation_number(u), tb0 = front::thurston_bennequin(u);
  ok = ok && r0 == 0 && tb0 == -1;
  d += fmt("unknot (%d, %d)", r0, tb0);
  std::set<int> drot;
  for (const auto& base : {u, front::whitehead_double_W(3)}) {
    const int rb = front::rotation_number(base), tbb = front::thurston_bennequin(base);
    for (auto sign : {front::ZigzagSign::Up, front::ZigzagSign::Down}) {
      const auto z = front::zigzag_stabilize(base, sign);
      const int dr = front::rotation_number(z) - rb, dt = front::thurston_bennequin(z) - tbb;
      ok = ok && std::abs(dr) == 1 && dt == -1;
      drot.insert(dr);
      d += fmt(", zigzag (%+d, %+d)", dr, dt);
    }
  }
  ok = ok && drot == std::set<int>{-1, 1};
  return {ok, d};
}

Outcome distinguishing_gate() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto a3 = dga::compute_dga(front::whitehead_double_W(3));
  const auto a5 = dga::compute_dga(front::whitehead_double_W(5));
  int deg0 = 0;
  for (const auto* a : {&a3, &a5})
    deg0 = std::max(deg0, static_cast<int>(std::count(a->degrees.begin(), a->degrees.end(), 0)));
  const auto s3 = dga::invariant_signature(front::whitehead_double_W(3));
  const auto s5 = dga::invariant_signature(front::whitehead_double_W(5));
  const double secs = seconds_since(t0);
  return {s3 != s5 && deg0 <= 20 && secs < budget::distinguish_seconds,
          fmt("W_3 %s | W_5 %s | at most 2^%d assignments, %.2fs", s3.to_string().c_str(), s5.to_string().c_str(), deg0,
              secs)};
}

Outcome n_pushing() {
  const auto F = build_spun(front::unknot());
  // the tube around N = T^2 x {1.0}, inside the chart between the cusp tips
  const auto audit = moves::bump_profile(1.0, 1.0 / 6, 1.5, 0.5, 1.5, F.k_dim()).audit;
  const auto r = moves::n_push(F, {1.0, 0});
  const double rho = r.profile.rho;
  const double dev = moves::deviation_outside(F, r.front, 1.0 - rho, 1.0 + rho);
  const auto rep = lift::full_verify(r.front, linalg::standard_J(2), forms::standard_fat(1));
  const bool ok = audit.ok() && r.profile.audit.ok() && rep.pass && dev <= tol::locality &&
                  rep.immersion_margin > tol::immersion;
  return {ok, fmt("audit (i)-(iv) %s, plateau %d, tail certified %d; full_verify %s (%ld samples, immersion %.2e); "
                  "deviation outside tube %.1e",
                  audit.ok() ? "ok" : "FAIL", r.profile.audit.plateau_critical, r.profile.audit.tail_certified,
                  rep.pass ? "PASS" : "FAIL", rep.samples, rep.immersion_margin, dev)};
}

Outcome stabilization() {
  const auto F = build_spun(front::unknot());
  const auto r = moves::stabilize_preleg(F, {1, 0});
  const auto rep = lift::full_verify(r.front, linalg::standard_J(2), forms::standard_fat(1));
  auto get = [](const std::map<std::string, int>& m, const std::string& k) {
    const auto it = m.find(k);
    return it == m.end() ? 0 : it->second;
  };
  const int cusp_copies = get(r.census_after, "cusp/ri") - get(r.census_before, "cusp/ri");
  const int nprime = get(r.census_after, "crossing/stabilization");
  const int fish = get(r.census_after, "crossing/ri");
  const bool ok = rep.pass && cusp_copies == 2 && nprime == 1 && r.euler_characteristic == 0 &&
                  rep.immersion_margin > tol::immersion && strata_coreal(rep);
  return {ok, fmt("%s; +%d cusp N-copies, +%d N'-intersection (+%d fish crossing); chi(N) = %lld; full_verify %s "
                  "(%ld samples, immersion %.2e)",
                  r.front.word.to_string().c_str(), cusp_copies, nprime, fish, r.euler_characteristic,
                  rep.pass ? "PASS" : "FAIL", rep.samples, rep.immersion_margin)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"fatness of the standard structure", fatness_of_standard},
      {"fatness criteria agree", criterion_equivalence},
      {"integrable negative control", negative_control},
      {"quaternionic fatization", quaternionic},
      {"perturbed Clifford torus", clifford_delta},
      {"cusp dichotomy", cusp_dichotomy},
      {"spun unknot end to end", spun_unknot},
      {"DGA soundness", dga_soundness},
      {"rotation certificates", rotation_certificates},
      {"distinguishing gate", distinguishing_gate},
      {"N-pushing", n_pushing},
      {"stabilization", stabilization},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " [" << i + 1 << "] " << criteria[i].first << ": " << o.detail << std::endl;
  }
  std::cout << (failed ? "FAILED " : "ALL PASS ") << criteria.size() - failed << "/" << criteria.size() << std::endl;
  return failed ? 1 : 0;
}
