// preleg: command line front end. Every command prints (or writes with
// --out) a JSON report and exits 0 iff the report passes. Exit 2 means the
// input could not be parsed; exit 3 means the computation refused its input.
#include "preleg/dga.hpp"
#include "preleg/forms.hpp"
#include "preleg/front.hpp"
#include "preleg/front_geometry.hpp"
#include "preleg/io_json.hpp"
#include "preleg/lift.hpp"
#include "preleg/moves_nd.hpp"
#include "preleg/spin.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

using namespace preleg;
using json = nlohmann::json;

namespace {

constexpr int kExitFail = 1;
constexpr int kExitParse = 2;
constexpr int kExitRefused = 3;

struct Globals {
  std::uint64_t seed = 0;
  bool timings = false;
  std::string out;
  std::vector<std::string> argv;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path, 0);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path, 0);
  out << text;
}

json read_json(const std::string& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": " + e.what(), 0);
  }
}

front::PlatFront load_front(const std::string& spec) {
  if (spec == "unknot") return front::unknot();
  if (spec.rfind("W", 0) == 0 && spec.size() > 1 && std::isdigit(static_cast<unsigned char>(spec[1])))
    return front::whitehead_double_W(std::stoi(spec.substr(1)));
  const auto f = front::parse_front(read_file(spec));
  if (f.empty()) throw ParseError(spec + ": empty front", 0);
  return f;
}

/// Builtins `std:N` and `integrable:N`; anything else is a distribution file.
forms::Distribution2 load_distribution(const std::string& spec) {
  auto num = [&](const std::string& prefix) { return std::stoi(spec.substr(prefix.size())); };
  if (spec.rfind("std:", 0) == 0) return forms::standard_fat(num("std:"));
  if (spec.rfind("integrable:", 0) == 0) return forms::integrable_distribution(num("integrable:"));
  return forms::parse_distribution(read_file(spec));
}

/// `std` or `pairs:1-3,2-4` (1-based coordinate pairs, J e_a = e_b).
linalg::ComplexStructure parse_J(const std::string& spec, int dim) {
  if (spec == "std") return linalg::standard_J(dim / 2);
  if (spec.rfind("pairs:", 0) != 0) throw ParseError("complex structure must be `std` or `pairs:a-b,...`", 0);
  std::vector<std::pair<int, int>> pairs;
  std::stringstream ss(spec.substr(6));
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto dash = item.find('-');
    if (dash == std::string::npos) throw ParseError("bad coordinate pair `" + item + "`", 0);
    pairs.emplace_back(std::stoi(item.substr(0, dash)), std::stoi(item.substr(dash + 1)));
  }
  return linalg::J_from_pairs(dim, pairs);
}

Vector parse_point(const std::string& s, int dim) {
  Vector p = Vector::Zero(dim);
  if (s.empty()) return p;
  std::stringstream ss(s);
  std::string item;
  int i = 0;
  while (std::getline(ss, item, ',')) {
    if (i >= dim) throw ParseError("point has more than " + std::to_string(dim) + " coordinates", 0);
    p(i++) = std::stod(item);
  }
  if (i != dim) throw ParseError("point has " + std::to_string(i) + " coordinates, expected " + std::to_string(dim), 0);
  return p;
}

json matrix_json(const Matrix& m) {
  json a = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) a.push_back(io::to_json(Vector(m.row(r).transpose())));
  return a;
}

// Report envelope: command echo, effective configuration, body, pass flag.
int emit(const Globals& g, const std::string& command, const json& config, json body, bool pass,
         std::chrono::steady_clock::time_point start) {
  json r;
  r["command"] = command;
  r["argv"] = g.argv;
  r["config"] = config;
  r["config"]["seed"] = g.seed;
  for (auto& [k, v] : body.items()) r[k] = v;
  r["pass"] = pass;
  if (g.timings)
    r["timings"] = {{"wall_seconds",
                     std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()}};
  write_text(g.out, r.dump(2) + "\n");
  return pass ? 0 : kExitFail;
}

// ---------------------------------------------------------------------------

struct FatCheckOpts {
  std::string input = "std:1";
  int points = 1000;
  double box = 1.0;
  int sphere_samples = 360;
  double tol = 1e-9;
};

int cmd_fat_check(const Globals& g, const FatCheckOpts& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto d = load_distribution(o.input);
  const int m = d.dim();
  std::mt19937_64 rng(g.seed);
  std::uniform_real_distribution<double> U(-o.box, o.box);
  std::vector<Vector> pts(o.points, Vector(m));
  for (auto& p : pts)
    for (int i = 0; i < m; ++i) p(i) = U(rng);

  struct Rec {
    forms::FatResult eig;
    bool sphere = false, sympl = false;
  };
  std::vector<Rec> rec(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) {
    rec[i].eig = forms::is_fat_at(d, pts[i], o.tol);
    rec[i].sphere = forms::sphere_test(d, pts[i], o.sphere_samples);
    rec[i].sympl = forms::symplectisation_fat(d, pts[i], o.sphere_samples);
  });
  int fat = 0, sphere_disagree = 0, sympl_disagree = 0;
  double min_margin = std::numeric_limits<double>::infinity(), max_to_i = 0;
  json failures = json::array();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto& r = rec[i];
    fat += r.eig.flag;
    sphere_disagree += r.sphere != r.eig.flag;
    sympl_disagree += r.sympl != r.eig.flag;
    min_margin = std::min(min_margin, r.eig.min_imag);
    for (const auto& ev : r.eig.eigenvalues)
      max_to_i = std::max(max_to_i, std::min(std::abs(ev - std::complex<double>(0, 1)), std::abs(ev + std::complex<double>(0, 1))));
    if ((!r.eig.flag || r.sphere != r.eig.flag || r.sympl != r.eig.flag) && failures.size() < 20)
      failures.push_back({{"point", io::to_json(pts[i])},
                          {"eigen", r.eig.flag},
                          {"sphere", r.sphere},
                          {"symplectisation", r.sympl}});
  }
  json body = {{"dim", m},
               {"points", o.points},
               {"fat_points", fat},
               {"min_margin", pts.empty() ? json(nullptr) : json(min_margin)},
               {"max_eigenvalue_distance_to_pm_i", max_to_i},
               {"sphere_disagreements", sphere_disagree},
               {"symplectisation_disagreements", sympl_disagree},
               {"failures", failures}};
  const json config = {{"input", o.input}, {"points", o.points}, {"box", o.box}, {"sphere_samples", o.sphere_samples},
                       {"tol", o.tol}};
  const bool pass = fat == o.points && sphere_disagree == 0 && sympl_disagree == 0;
  return emit(g, "fat-check", config, body, pass, t0);
}

struct NilpotentOpts {
  std::string input = "std:1";
  std::string point;
};

int cmd_nilpotent(const Globals& g, const NilpotentOpts& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto d = load_distribution(o.input);
  const Vector p = parse_point(o.point, d.dim());
  const auto nd = forms::nilpotentisation_at(d, p);
  const auto model = forms::model_forms(nd);
  const auto here = forms::is_fat_at(d, p);
  const auto there = forms::is_fat_at(model, Vector::Zero(model.dim()));
  json body = {{"point", io::to_json(p)},
               {"frame", matrix_json(nd.frame)},
               {"omega1", matrix_json(nd.omega1)},
               {"omega2", matrix_json(nd.omega2)},
               {"model", forms::format_distribution(model)},
               {"fat_at_point", here.flag},
               {"model_fat_at_origin", there.flag}};
  return emit(g, "nilpotent", {{"input", o.input}, {"point", o.point}}, body, here.flag == there.flag, t0);
}

int cmd_front_invariants(const Globals& g, const std::string& file) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto f = load_front(file);
  json body = {{"word", f.to_string()},
               {"events", f.size()},
               {"components", front::component_count(f)},
               {"rotation_numbers", front::rotation_numbers(f)},
               {"writhe", front::writhe(f)}};
  if (front::component_count(f) == 1) {
    body["rot"] = front::rotation_number(f);
    body["tb"] = front::thurston_bennequin(f);
  }
  const auto audit = front::audit_front(front::realize(f));
  body["realization"] = {{"ok", audit.ok},
                         {"min_crossing_angle_deg", audit.min_crossing_angle_deg},
                         {"max_cusp_residual", audit.max_cusp_residual},
                         {"failures", audit.failures}};
  return emit(g, "front invariants", {{"front", file}}, body, audit.ok, t0);
}

struct MoveOpts {
  std::string file;
  std::string kind;
  int at = 0;
  int slice = 1;
  int pos = 0;
  std::string side = "below";
};

front::FishSide parse_side(const std::string& s) {
  if (s == "below") return front::FishSide::Below;
  if (s == "above") return front::FishSide::Above;
  throw ParseError("side must be `below` or `above`", 0);
}

int cmd_front_move(const Globals& g, const MoveOpts& o) {
  const auto f = load_front(o.file);
  const auto at = static_cast<std::size_t>(o.at);
  front::PlatFront h;
  if (o.kind == "ri") h = front::apply_RI(f, o.slice, o.pos, parse_side(o.side));
  else if (o.kind == "remove-ri") h = front::remove_RI(f, at);
  else if (o.kind == "rii-above") h = front::apply_RII(f, at, front::RIIDirection::PushAbove);
  else if (o.kind == "rii-below") h = front::apply_RII(f, at, front::RIIDirection::PushBelow);
  else if (o.kind == "rii-pull") h = front::apply_RII(f, at, front::RIIDirection::Pull);
  else if (o.kind == "riii") h = front::apply_RIII(f, at);
  else if (o.kind == "commute") h = front::commute_crossings(f, at);
  else if (o.kind == "zigzag-up") h = front::zigzag_stabilize(f, front::ZigzagSign::Up);
  else if (o.kind == "zigzag-down") h = front::zigzag_stabilize(f, front::ZigzagSign::Down);
  else throw ParseError("unknown move `" + o.kind + "`", 0);
  write_text(g.out, front::format_front(h));
  return 0;
}

int cmd_front_render(const Globals& g, const std::string& file) {
  write_text(g.out, front::render_svg(front::realize(load_front(file))));
  return 0;
}

int cmd_dga(const Globals& g, const std::string& file) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto f = load_front(file);
  const auto graded = front::rotation_numbers(f) == std::vector<int>(front::component_count(f), 0);
  const auto a = dga::compute_dga(front::lagrangian_resolution(f, graded));
  dga::verify_dga(a);
  json gens = json::array();
  for (int i = 0; i < a.size(); ++i) {
    json words = json::array();
    for (const auto& w : a.differential[i]) words.push_back(a.format_word(w));
    gens.push_back({{"name", a.names[i]}, {"degree", a.degrees[i]}, {"differential", words}});
  }
  json body = {{"word", f.to_string()}, {"graded", a.graded}, {"generators", gens}};
  if (a.graded) {
    const auto sig = dga::signature_of(a);
    body["augmentations"] = sig.raw_augmentations;
    json polys = json::array();
    for (const auto& [p, c] : sig.classes) polys.push_back({{"poincare", dga::format_poincare(p)}, {"count", c}});
    body["polynomials"] = polys;
    body["signature"] = sig.to_string();
  }
  return emit(g, "dga compute", {{"front", file}}, body, true, t0);
}

struct SpinOpts {
  int n = 1;
  std::string delta = "auto";
  std::string front = "unknot";
  double eps = 0.01;
  double fiber_eps = 0.05;
  int grid = 64;
  std::string report;
};

int cmd_spin_build(const Globals& g, const SpinOpts& o) {
  const auto t0 = std::chrono::steady_clock::now();
  json body;
  double delta;
  if (o.delta == "auto") {
    const auto s = spin::find_delta(o.n, o.grid);
    delta = s.delta;
    json table = json::array();
    for (const auto& r : s.table) table.push_back({{"delta", r.delta}, {"coreal", r.coreal}, {"graph", r.graph}});
    body["delta_search"] = {{"delta", s.delta}, {"coreal", s.coreal}, {"graph", s.graph}, {"table", table}};
  } else {
    delta = std::stod(o.delta);
  }
  const auto base = spin::clifford_perturbed(o.n, delta);
  const auto thick = spin::thicken(base, o.fiber_eps);
  auto F = spin::spin_front(load_front(o.front), thick.embedding, {o.eps, true});
  F.provenance = "spin build: front " + o.front + ", delta " + o.delta;
  body["embedding"] = {{"n", o.n},
                       {"delta", delta},
                       {"coreal_margin", thick.margins.coreal},
                       {"graph_margin", thick.margins.graph()},
                       {"euler_characteristic", thick.euler_characteristic}};
  body["reach"] = F.reach;
  body["census"] = F.census();
  body["domain_dim"] = F.domain_dim();
  const json config = {{"n", o.n}, {"delta", o.delta}, {"front", o.front}, {"eps", o.eps},
                       {"fiber_eps", o.fiber_eps}, {"grid", o.grid}};
  // the ParamFront goes to --out, the build summary to --report (or stdout)
  write_text(g.out, io::to_json(F).dump(2) + "\n");
  Globals rg = g;
  rg.out = o.report;
  if (g.out.empty() || g.out == "-") return 0;
  return emit(rg, "spin build", config, body, true, t0);
}

struct VerifyOpts {
  std::string front;
  std::string J = "std";
  std::string D = "std";
  lift::VerifyConfig cfg;
};

int cmd_verify(const Globals& g, VerifyOpts o) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto F = io::param_front_from_json(read_json(o.front));
  const auto J = parse_J(o.J, F.ambient());
  const auto D = o.D == "std" ? forms::standard_fat(F.n()) : load_distribution(o.D);
  o.cfg.seed = g.seed;
  const auto rep = lift::full_verify(F, J, D, o.cfg);
  json config = io::to_json(o.cfg);
  config["front"] = o.front;
  config["J"] = o.J;
  config["D"] = o.D;
  json body = io::to_json(rep);
  body.erase("pass");
  body["census"] = F.census();
  return emit(g, "verify", config, body, rep.pass, t0);
}

struct PushOpts {
  std::string front;
  double center = 1.0;
  int rank = 0;
  double height = 1.5;
  double rho = 0;
  std::string report;
};

json audit_json(const moves::ProfileAudit& a) {
  return {{"vanishes_off_tube", a.vanishes_off_tube},
          {"exceeds_one_on_N", a.exceeds_one_on_N},
          {"positive_on_tube", a.positive_on_tube},
          {"critical_values_above_one", a.critical_values_above_one},
          {"grid_points", a.grid_points},
          {"plateau_critical", a.plateau_critical},
          {"tail_certified", a.tail_certified},
          {"value_on_N", a.value_on_N},
          {"euler_characteristic", a.euler_characteristic},
          {"failures", a.failures}};
}

int cmd_push(const Globals& g, const PushOpts& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto F = io::param_front_from_json(read_json(o.front));
  const auto r = moves::n_push(F, {o.center, o.rank}, o.height, o.rho);
  const double rho = r.profile.rho;
  const double dev = moves::deviation_outside(F, r.front, o.center - rho, o.center + rho);
  write_text(g.out, io::to_json(r.front).dump(2) + "\n");
  json body = {{"audit", audit_json(r.profile.audit)},
               {"rho", rho},
               {"level_coreal", r.level_coreal},
               {"band_coreal", r.band_coreal},
               {"deviation_outside_tube", dev},
               {"census", r.front.census()}};
  const json config = {{"front", o.front}, {"center", o.center}, {"rank", o.rank}, {"height", o.height}, {"rho", o.rho}};
  Globals rg = g;
  rg.out = o.report;
  if (g.out.empty() || g.out == "-") return dev <= 1e-12 ? 0 : kExitFail;
  return emit(rg, "push", config, body, r.profile.audit.ok() && dev <= 1e-12, t0);
}

struct StabilizeOpts {
  std::string front;
  int slice = 1;
  int pos = 0;
  std::string side = "below";
  double height = 1.5;
  std::string report;
};

int cmd_stabilize(const Globals& g, const StabilizeOpts& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto F = io::param_front_from_json(read_json(o.front));
  const auto r = moves::stabilize_preleg(F, {o.slice, o.pos, parse_side(o.side)}, o.height);
  write_text(g.out, io::to_json(r.front).dump(2) + "\n");
  json body = {{"word", r.front.word.to_string()},
               {"census_before", r.census_before},
               {"census_after", r.census_after},
               {"N", {{"x", r.N_x}, {"z", r.N_z}, {"coreal", r.N_coreal}}},
               {"N_prime", {{"raw_x", r.push.profile.center}, {"coreal", r.N_prime_coreal}}},
               {"euler_characteristic", r.euler_characteristic},
               {"audit", audit_json(r.push.profile.audit)}};
  const json config = {{"front", o.front}, {"slice", o.slice}, {"pos", o.pos}, {"side", o.side}, {"height", o.height}};
  Globals rg = g;
  rg.out = o.report;
  if (g.out.empty() || g.out == "-") return 0;
  return emit(rg, "stabilize", config, body, r.euler_characteristic == 0, t0);
}

struct DistinguishOpts {
  std::vector<int> s{3, 5};
  int n = 1;
  double eps = 0.01;
  double fiber_eps = 0.05;
  bool verify = true;
  lift::VerifyConfig cfg;
};

int cmd_distinguish(const Globals& g, DistinguishOpts o) {
  const auto t0 = std::chrono::steady_clock::now();
  o.cfg.seed = g.seed;
  bool pass = true;
  std::vector<dga::Signature> sigs;
  json per = json::array();
  std::optional<spin::CorealEmbedding> emb;
  if (o.verify) emb = spin::thicken(spin::clifford_perturbed(o.n, spin::find_delta(o.n).delta), o.fiber_eps).embedding;
  for (int s : o.s) {
    const auto w = front::whitehead_double_W(s);
    const int rot = front::rotation_number(w);
    sigs.push_back(dga::invariant_signature(w));
    json e = {{"s", s}, {"word", w.to_string()}, {"rot", rot}, {"tb", front::thurston_bennequin(w)},
              {"signature", sigs.back().to_string()}};
    pass = pass && rot == 0;
    if (o.verify) {
      const auto F = spin::spin_front(w, *emb, {o.eps, true});
      const auto rep = lift::full_verify(F, linalg::standard_J(o.n + 1), forms::standard_fat(o.n), o.cfg);
      e["verify"] = io::to_json(rep);
      pass = pass && rep.pass;
    }
    per.push_back(e);
  }
  json table = json::array();
  for (std::size_t i = 0; i < o.s.size(); ++i)
    for (std::size_t j = i + 1; j < o.s.size(); ++j) {
      const bool differ = sigs[i] != sigs[j];
      table.push_back({{"s", {o.s[i], o.s[j]}}, {"differ", differ}});
      // equal parameters must give equal signatures, distinct ones must not
      pass = pass && differ == (o.s[i] != o.s[j]);
    }
  json config = io::to_json(o.cfg);
  config["s"] = o.s;
  config["n"] = o.n;
  config["eps"] = o.eps;
  config["fiber_eps"] = o.fiber_eps;
  config["verify"] = o.verify;
  return emit(g, "distinguish", config, {{"results", per}, {"pairs", table}}, pass, t0);
}

void add_verify_options(CLI::App* c, lift::VerifyConfig& cfg) {
  c->add_option("--k-res", cfg.k_res, "K grid per angle for the lift checks")->capture_default_str();
  c->add_option("--u-per-unit", cfg.u_per_unit, "front samples per unit of curve parameter")->capture_default_str();
  c->add_option("--coreal-k-res", cfg.coreal_k_res, "K grid per angle for the stratum loci")->capture_default_str();
  c->add_option("--fd-step", cfg.fd_step, "finite-difference step")->capture_default_str();
  c->add_option("--rank-tol", cfg.rank_rel_tol, "relative singular-value threshold")->capture_default_str();
  c->add_option("--chart-tol", cfg.chart_tol, "smallest admissible affine chart margin")->capture_default_str();
  c->add_option("--coreal-tol", cfg.coreal_tol, "co-reality margin threshold")->capture_default_str();
  c->add_option("--separation-tol", cfg.separation_tol, "lift separation threshold")->capture_default_str();
  c->add_option("--injectivity-samples", cfg.injectivity_samples, "points in the injectivity spot check")
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"prelegendrian fronts: fatness, co-real spinning, lifts and front moves"};
  app.set_config("--config", "", "`key = value` configuration file; flags override it");
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  for (int i = 1; i < argc; ++i) g.argv.emplace_back(argv[i]);
  app.add_option("--seed", g.seed, "seed for random grids")->capture_default_str();
  app.add_flag("--timings", g.timings, "add wall-clock timings to the report");
  app.add_option("-o,--out", g.out, "output file (default: stdout)");

  std::function<int()> run;

  FatCheckOpts fat;
  auto* c_fat = app.add_subcommand("fat-check", "fatness of a corank-2 distribution at random points");
  c_fat->add_option("input", fat.input, "distribution file, or std:N / integrable:N")->capture_default_str();
  c_fat->add_option("--points", fat.points)->capture_default_str();
  c_fat->add_option("--box", fat.box, "points are uniform in [-box, box]^m")->capture_default_str();
  c_fat->add_option("--sphere-samples", fat.sphere_samples)->capture_default_str();
  c_fat->add_option("--tol", fat.tol)->capture_default_str();
  c_fat->callback([&] { run = [&] { return cmd_fat_check(g, fat); }; });

  NilpotentOpts nil;
  auto* c_nil = app.add_subcommand("nilpotent", "structure constants of the nilpotentisation at a point");
  c_nil->add_option("input", nil.input, "distribution file, or std:N / integrable:N")->capture_default_str();
  c_nil->add_option("--point", nil.point, "comma-separated coordinates (default: origin)");
  c_nil->callback([&] { run = [&] { return cmd_nilpotent(g, nil); }; });

  auto* c_front = app.add_subcommand("front", "plat fronts");
  c_front->require_subcommand(1)->fallthrough();
  std::string inv_file, render_file;
  auto* c_inv = c_front->add_subcommand("invariants", "rotation number, tb, writhe, realization audit");
  c_inv->add_option("file", inv_file, "front file, `unknot` or `W<s>`")->required();
  c_inv->callback([&] { run = [&] { return cmd_front_invariants(g, inv_file); }; });
  MoveOpts mv;
  auto* c_move = c_front->add_subcommand("move", "apply one front move and print the new front");
  c_move->add_option("file", mv.file)->required();
  c_move->add_option("--kind", mv.kind, "ri, remove-ri, rii-above, rii-below, rii-pull, riii, commute, zigzag-up, zigzag-down")
      ->required();
  c_move->add_option("--at", mv.at, "0-based event index")->capture_default_str();
  c_move->add_option("--slice", mv.slice, "slice for ri")->capture_default_str();
  c_move->add_option("--pos", mv.pos, "strand position for ri")->capture_default_str();
  c_move->add_option("--side", mv.side, "below or above, for ri")->capture_default_str();
  c_move->callback([&] { run = [&] { return cmd_front_move(g, mv); }; });
  auto* c_render = c_front->add_subcommand("render", "SVG of the realized front");
  c_render->add_option("file", render_file)->required();
  c_render->callback([&] { run = [&] { return cmd_front_render(g, render_file); }; });

  auto* c_dga = app.add_subcommand("dga", "Chekanov-Eliashberg algebra");
  c_dga->require_subcommand(1)->fallthrough();
  std::string dga_file;
  auto* c_dgac = c_dga->add_subcommand("compute", "generators, differential, augmentations, linearized homology");
  c_dgac->add_option("file", dga_file)->required();
  c_dgac->callback([&] { run = [&] { return cmd_dga(g, dga_file); }; });

  auto* c_spin = app.add_subcommand("spin", "front spinning");
  c_spin->require_subcommand(1)->fallthrough();
  SpinOpts sp;
  auto* c_build = c_spin->add_subcommand("build", "spin a front along a perturbed Clifford torus");
  c_build->add_option("--n", sp.n)->capture_default_str();
  c_build->add_option("--delta", sp.delta, "perturbation, or `auto`")->capture_default_str();
  c_build->add_option("--front", sp.front, "front file, `unknot` or `W<s>`")->capture_default_str();
  c_build->add_option("--eps", sp.eps, "diameter of the spun front")->capture_default_str();
  c_build->add_option("--fiber-eps", sp.fiber_eps, "thickening scale for n > 1")->capture_default_str();
  c_build->add_option("--grid", sp.grid, "grid per angle for the delta search")->capture_default_str();
  c_build->add_option("--report", sp.report, "where to write the build summary");
  c_build->callback([&] { run = [&] { return cmd_spin_build(g, sp); }; });

  VerifyOpts vf;
  auto* c_verify = app.add_subcommand("verify", "certify a spun front as a prelegendrian front");
  c_verify->add_option("--front", vf.front, "ParamFront JSON")->required();
  c_verify->add_option("--J", vf.J, "std or pairs:a-b,...")->capture_default_str();
  c_verify->add_option("--D", vf.D, "std or a distribution file")->capture_default_str();
  add_verify_options(c_verify, vf.cfg);
  c_verify->callback([&] { run = [&] { return cmd_verify(g, vf); }; });

  PushOpts pu;
  auto* c_push = app.add_subcommand("push", "N-push one sheet through the sheet above");
  c_push->add_option("--front", pu.front, "ParamFront JSON")->required();
  c_push->add_option("--center", pu.center, "raw x of N")->capture_default_str();
  c_push->add_option("--rank", pu.rank, "upper sheet, counted from the top")->capture_default_str();
  c_push->add_option("--height", pu.height, "profile height in (1, 2]")->capture_default_str();
  c_push->add_option("--rho", pu.rho, "tube radius; 0 picks a third of the injectivity radius")->capture_default_str();
  c_push->add_option("--report", pu.report, "where to write the move summary");
  c_push->callback([&] { run = [&] { return cmd_push(g, pu); }; });

  StabilizeOpts st;
  auto* c_stab = app.add_subcommand("stabilize", "fish along N, then push along the parallel copy N'");
  c_stab->add_option("--front", st.front, "ParamFront JSON")->required();
  c_stab->add_option("--slice", st.slice)->capture_default_str();
  c_stab->add_option("--pos", st.pos)->capture_default_str();
  c_stab->add_option("--side", st.side, "below or above")->capture_default_str();
  c_stab->add_option("--height", st.height)->capture_default_str();
  c_stab->add_option("--report", st.report, "where to write the move summary");
  c_stab->callback([&] { run = [&] { return cmd_stabilize(g, st); }; });

  DistinguishOpts di;
  auto* c_dist = app.add_subcommand("distinguish", "W_s family: rotation, DGA signatures, spun verification");
  c_dist->add_option("--s", di.s, "odd twist counts >= 3")->delimiter(',')->capture_default_str();
  c_dist->add_option("--n", di.n)->capture_default_str();
  c_dist->add_option("--eps", di.eps)->capture_default_str();
  c_dist->add_option("--fiber-eps", di.fiber_eps)->capture_default_str();
  c_dist->add_flag("--verify,!--no-verify", di.verify, "build and verify the spun fronts")->capture_default_str();
  add_verify_options(c_dist, di.cfg);
  c_dist->callback([&] { run = [&] { return cmd_distinguish(g, di); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitParse;
  }
  try {
    return run();
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const std::invalid_argument& e) {
    std::cerr << "parse error: bad number (" << e.what() << ")\n";
    return kExitParse;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRefused;
  }
}
