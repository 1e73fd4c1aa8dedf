// JSON forms of spun fronts and verification reports. A ParamFront file
// stores the construction inputs plus derived data (strata, reach, a few
// sample points); loading rebuilds from the inputs and rejects files whose
// derived data disagree with the rebuild.
#pragma once

#include "preleg/lift.hpp"
#include "preleg/spin.hpp"

#include <json.hpp>

#include <sstream>
#include <string>

namespace preleg::io {

using json = nlohmann::json;

inline constexpr const char* kParamFrontFormat = "preleg-paramfront";
inline constexpr int kParamFrontVersion = 1;

inline json to_json(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

inline Vector vector_from_json(const json& a) {
  Vector v(static_cast<Eigen::Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) v(static_cast<Eigen::Index>(i)) = a[i].get<double>();
  return v;
}

inline json word_to_json(const front::PlatFront& f) {
  json a = json::array();
  for (const auto& e : f.word()) a.push_back(std::string(1, front::event_letter(e.kind)) + " " + std::to_string(e.level));
  return a;
}

inline front::PlatFront word_from_json(const json& a) {
  std::string text;
  for (const auto& e : a) text += e.get<std::string>() + "\n";
  return front::parse_front(text);
}

inline json stratum_to_json(const spin::Stratum& s) {
  return {{"kind", s.kind == spin::StratumKind::Cusp ? "cusp" : "crossing"},
          {"origin", s.origin},
          {"group", s.group},
          {"comp_a", s.comp_a},
          {"param_a", s.param_a},
          {"comp_b", s.comp_b},
          {"param_b", s.param_b},
          {"x", s.x},
          {"z", s.z}};
}

inline json push_to_json(const spin::SheetPush& p) {
  return {{"center", p.center},       {"rho", p.rho},           {"height", p.height},
          {"lower_comp", p.lower_comp}, {"upper_comp", p.upper_comp}, {"lower_lo", p.lower_lo},
          {"lower_hi", p.lower_hi},   {"upper_lo", p.upper_lo}, {"upper_hi", p.upper_hi},
          {"origin", p.origin}};
}

inline spin::SheetPush push_from_json(const json& j) {
  spin::SheetPush p;
  p.center = j.at("center").get<double>();
  p.rho = j.at("rho").get<double>();
  p.height = j.at("height").get<double>();
  p.lower_comp = j.at("lower_comp").get<int>();
  p.upper_comp = j.at("upper_comp").get<int>();
  p.lower_lo = j.at("lower_lo").get<double>();
  p.lower_hi = j.at("lower_hi").get<double>();
  p.upper_lo = j.at("upper_lo").get<double>();
  p.upper_hi = j.at("upper_hi").get<double>();
  p.origin = j.at("origin").get<std::string>();
  return p;
}

// every 7th sample of a coarse grid: enough to pin down the geometry
inline std::vector<spin::DomainSample> fingerprint_samples(const spin::ParamFront& F) {
  const auto all = F.samples(4, 2);
  std::vector<spin::DomainSample> out;
  for (std::size_t i = 0; i < all.size() && out.size() < 24; i += 7) out.push_back(all[i]);
  return out;
}

inline json to_json(const spin::ParamFront& F) {
  json j;
  j["format"] = kParamFrontFormat;
  j["version"] = kParamFrontVersion;
  j["embedding"] = {{"n", F.emb.n}, {"delta", F.emb.delta}, {"fiber_eps", F.emb.fiber_eps}, {"thickened", F.emb.thickened}};
  j["word"] = word_to_json(F.word);
  j["geometry"] = {{"scale", F.geometry.scale}, {"contact_scaling", F.geometry.contact_scaling}};
  j["event_origin"] = F.event_origin;
  j["pushes"] = json::array();
  for (const auto& p : F.pushes) j["pushes"].push_back(push_to_json(p));
  j["provenance"] = F.provenance;
  j["reach"] = F.reach;
  j["domain_dim"] = F.domain_dim();
  j["ambient"] = F.ambient();
  j["census"] = F.census();
  j["strata"] = json::array();
  for (const auto& s : F.strata) j["strata"].push_back(stratum_to_json(s));
  j["samples"] = json::array();
  for (const auto& s : fingerprint_samples(F))
    j["samples"].push_back({{"k", to_json(s.k)},
                            {"component", s.component},
                            {"u", s.u},
                            {"point", to_json(F.point(s.k, s.component, s.u))},
                            {"conormal", to_json(F.conormal(s.k, s.component, s.u))}});
  return j;
}

namespace detail {

inline void require_close(double a, double b, double tol, const std::string& what) {
  if (!(std::abs(a - b) <= tol * std::max(1.0, std::abs(b))))
    throw ConsistencyError("ParamFront JSON disagrees with its rebuild: " + what + " (" + std::to_string(a) + " vs " +
                           std::to_string(b) + ")");
}

}  // namespace detail

/// Rebuilds the front from its inputs and checks the stored derived data.
inline spin::ParamFront param_front_from_json(const json& j, double tol = 1e-9) {
  try {
    if (j.at("format").get<std::string>() != kParamFrontFormat) throw ParseError("not a ParamFront file", 0);
    if (j.at("version").get<int>() != kParamFrontVersion) throw ParseError("unsupported ParamFront version", 0);
    spin::ParamFront F;
    const auto& e = j.at("embedding");
    F.emb.n = e.at("n").get<int>();
    F.emb.delta = e.at("delta").get<double>();
    F.emb.fiber_eps = e.at("fiber_eps").get<double>();
    F.emb.thickened = e.at("thickened").get<bool>();
    if (F.emb.n < 1 || !(F.emb.delta >= 0 && F.emb.delta < 1)) throw DomainError("embedding parameters out of range");
    F.word = word_from_json(j.at("word"));
    F.geometry.scale = j.at("geometry").at("scale").get<double>();
    F.geometry.contact_scaling = j.at("geometry").at("contact_scaling").get<bool>();
    F.event_origin = j.at("event_origin").get<std::vector<std::string>>();
    if (F.event_origin.size() != F.word.size()) throw ParseError("event_origin does not match the word length", 0);
    F.provenance = j.value("provenance", "");
    spin::assemble(F);
    for (const auto& p : j.at("pushes")) F.pushes.push_back(push_from_json(p));
    F.rebuild_strata();

    detail::require_close(j.at("reach").get<double>(), F.reach, tol, "reach");
    const auto& st = j.at("strata");
    if (st.size() != F.strata.size())
      throw ConsistencyError("ParamFront JSON disagrees with its rebuild: stratum count " + std::to_string(st.size()) +
                             " vs " + std::to_string(F.strata.size()));
    for (std::size_t i = 0; i < st.size(); ++i) {
      if (st[i].at("kind") != stratum_to_json(F.strata[i]).at("kind") || st[i].at("origin") != F.strata[i].origin)
        throw ConsistencyError("ParamFront JSON disagrees with its rebuild: stratum " + std::to_string(i) + " kind");
      detail::require_close(st[i].at("x").get<double>(), F.strata[i].x, tol, "stratum " + std::to_string(i) + " x");
      detail::require_close(st[i].at("z").get<double>(), F.strata[i].z, tol, "stratum " + std::to_string(i) + " z");
    }
    for (const auto& s : j.at("samples")) {
      const Vector k = vector_from_json(s.at("k"));
      const int c = s.at("component").get<int>();
      const double u = s.at("u").get<double>();
      if (k.size() != F.k_dim() || c < 0 || c >= F.curve.component_count())
        throw ConsistencyError("ParamFront JSON sample does not fit the rebuilt domain");
      const double dp = (vector_from_json(s.at("point")) - F.point(k, c, u)).norm();
      const double da = (vector_from_json(s.at("conormal")) - F.conormal(k, c, u)).norm();
      detail::require_close(dp, 0, tol, "sample point");
      detail::require_close(da, 0, tol, "sample conormal");
    }
    return F;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed ParamFront JSON: ") + e.what(), 0);
  }
}

inline json section_to_json(const lift::Section& s) {
  return {{"name", s.name}, {"pass", s.pass},         {"margin", std::isfinite(s.margin) ? json(s.margin) : json(nullptr)},
          {"samples", s.samples}, {"failures", s.failures}, {"notes", s.notes}};
}

/// {samples, margins{immersion, rank, coreal, chart}, pass, failures[]} plus
/// per-section detail.
inline json to_json(const lift::VerificationReport& r) {
  auto finite = [](double x) { return std::isfinite(x) ? json(x) : json(nullptr); };
  json j;
  j["samples"] = r.samples;
  j["margins"] = {{"immersion", finite(r.immersion_margin)},
                  {"cusp_immersion", finite(r.cusp_immersion_margin)},
                  {"rank", finite(r.rank_margin)},
                  {"rank_residual", finite(r.rank_residual)},
                  {"coreal", finite(r.coreal_margin)},
                  {"chart", finite(r.chart_margin)}};
  j["stratum_coreal"] = r.stratum_coreal;
  j["pass"] = r.pass;
  j["failures"] = r.failures;
  j["sections"] = json::array();
  for (const auto& s : r.sections) j["sections"].push_back(section_to_json(s));
  return j;
}

inline json to_json(const lift::VerifyConfig& c) {
  return {{"k_res", c.k_res},
          {"u_per_unit", c.u_per_unit},
          {"coreal_k_res", c.coreal_k_res},
          {"fd_step", c.fd_step},
          {"rank_rel_tol", c.rank_rel_tol},
          {"chart_tol", c.chart_tol},
          {"coreal_tol", c.coreal_tol},
          {"separation_tol", c.separation_tol},
          {"injectivity_samples", c.injectivity_samples},
          {"seed", c.seed}};
}

}  // namespace preleg::io
