#include "lsflab/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace lsflab {

namespace {

Json num(double x) {
  if (!std::isfinite(x)) return nullptr;
  return x;
}

Json eigs_json(const std::array<double, 3>& e) { return Json::array({num(e[0]), num(e[1]), num(e[2])}); }

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

}  // namespace

Json to_json(const Vec3& v) { return Json::array({num(v.x()), num(v.y()), num(v.z())}); }

Json to_json(const ShapeSpec& s) {
  Json params = Json::object();
  for (const auto& [k, v] : s.params) params[k] = v;
  return {{"kind", to_string(s.kind)}, {"params", params}};
}

ShapeSpec shape_from_json(const Json& j) {
  try {
    ShapeSpec s;
    s.kind = shape_kind_from_string(j.at("kind").get<std::string>());
    for (const auto& [k, v] : j.at("params").items()) s.params[k] = v.get<double>();
    s.validate();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad shape record: ") + e.what());
  }
}

Json to_json(const SolveConfig& c) {
  return {{"method", to_string(c.method)},
          {"cfl", c.cfl},
          {"epsilon_schedule", c.epsilon_schedule},
          {"max_newton_iters", c.max_newton_iters},
          {"residual_tol", c.residual_tol},
          {"reinit_every", c.reinit_every},
          {"reinit_iters", c.reinit_iters},
          {"band_halfwidth", c.band_halfwidth},
          {"reinit_keep", c.reinit_keep},
          {"delta", c.delta},
          {"max_steps", c.max_steps},
          {"richardson", c.richardson},
          {"snapshot_times", c.snapshot_times},
          {"backend", c.backend == kernels::Backend::reference ? "reference" : "openmp"}};
}

Json to_json(const PerturbationSpec& p) {
  return {{"amplitude", p.amplitude},
          {"mode", to_string(p.mode)},
          {"frequency", p.frequency},
          {"phase", p.phase}};
}

Json to_json(const SingularThresholds& t) {
  return {{"h", t.h},
          {"max_grad", num(t.max_grad)},
          {"tau_grad", num(t.tau_grad)},
          {"t_floor", num(t.t_floor)},
          {"axial_slope", num(t.axial_slope)},
          {"tol_time", num(t.tol_time)},
          {"tol_eig", t.tol_eig},
          {"r_probe", num(t.r_probe)},
          {"probe_margin", num(t.probe_margin)},
          {"min_curve_length", num(t.min_curve_length)},
          {"seed", t.seed}};
}

Json to_json(const CriticalPoint& p) {
  Json probe = {{"rise_plus", num(p.probe.rise_plus)},
                {"rise_minus", num(p.probe.rise_minus)},
                {"margin", num(p.probe.margin)},
                {"min_drop", num(p.probe.min_drop)},
                {"plus_probed", p.probe.plus_probed},
                {"minus_probed", p.probe.minus_probed}};
  return {{"position", to_json(p.position)},
          {"time", num(p.time)},
          {"grad_norm", num(p.grad_norm)},
          {"hessian_eigs", eigs_json(p.hessian_eigs)},
          {"axis", to_json(p.axis)},
          {"kind", to_string(p.kind)},
          {"critical_type", to_string(p.critical_type)},
          {"curve_vertex", p.curve_vertex},
          {"probe", probe}};
}

Json to_json(const SingularComponent& c) {
  Json positions = Json::array();
  for (const auto& p : c.points) positions.push_back(to_json(p.position));
  Json polyline = Json::array();
  for (const auto& v : c.curve_polyline) polyline.push_back(to_json(v));
  Json endpoints = Json::array();
  if (!c.points.empty()) {
    const std::size_t last = c.points.size() - 1;
    const std::size_t ends[2] = {0, last};
    const int count = (c.geometry == Geometry::point || last == 0) ? 1 : 2;
    for (int e = 0; e < count; ++e) {
      const auto& p = c.points[ends[e]];
      endpoints.push_back({{"position", to_json(p.position)},
                           {"critical_type", to_string(c.endpoint_types[e])},
                           {"kind", to_string(p.kind)},
                           {"hessian_eigs", eigs_json(p.hessian_eigs)},
                           {"axis", to_json(p.axis)},
                           {"probe_margin", num(p.probe.margin)},
                           {"rise_plus", num(p.probe.rise_plus)},
                           {"rise_minus", num(p.probe.rise_minus)}});
    }
  }
  Json points = Json::array();
  for (const auto& p : c.points) points.push_back(to_json(p));
  return {{"geometry", to_string(c.geometry)},
          {"type", to_string(c.component_type)},
          {"time", num(c.time)},
          {"time_spread", num(c.time_spread)},
          {"closed", c.closed},
          {"positions", positions},
          {"curve_polyline", polyline},
          {"endpoints", endpoints},
          {"diagnostics",
           {{"consistent", c.consistent},
            {"extinction_consistent", c.extinction_consistent},
            {"local_extinction_time", num(c.local_extinction_time)},
            {"warnings", c.warnings}}},
          {"points", points}};
}

Json components_json(const std::vector<SingularComponent>& comps) {
  Json arr = Json::array();
  for (const auto& c : comps) arr.push_back(to_json(c));
  return arr;
}

Json to_json(const MetricsReport& m) {
  return {{"alpha_observed", num(m.alpha_observed)},
          {"min_H", num(m.min_H)},
          {"max_H", num(m.max_H)},
          {"min_k1k2", num(m.min_k1k2)},
          {"beta_hat", num(m.beta_hat)},
          {"area", num(m.area)},
          {"diameter", num(m.diameter)},
          {"max_area_ratio", num(m.max_area_ratio)},
          {"entropy", num(m.entropy)},
          {"area_ratio_within_bound", m.area_ratio_within_bound},
          {"entropy_within_shell_bound", m.entropy_within_shell_bound}};
}

Json to_json(const StabilityRow& r) {
  Json match = Json::array();
  for (Match m : r.type_match) match.push_back(to_string(m));
  Json proxies = Json::object();
  for (const auto& [k, v] : r.proxies) proxies[k] = v;
  return {{"amplitude", r.amplitude},
          {"failed", r.failed},
          {"failure", r.failure},
          {"sup_u_gap", num(r.sup_u_gap)},
          {"sup_grad_gap_offS", num(r.sup_grad_gap_offS)},
          {"extinction_gap", num(r.extinction_gap)},
          {"extinction_time", num(r.extinction_time)},
          {"containment_pass", r.containment_pass},
          {"type_match", match},
          {"proxies", proxies},
          {"cap_flux_min", num(r.cap_flux_min)},
          {"perturbed_components", r.perturbed_components}};
}

Json to_json(const StabilityReport& r) {
  Json rows = Json::array();
  for (const auto& row : r.rows) rows.push_back(to_json(row));
  return {{"schema_version", kSchemaVersion},
          {"base", to_json(r.base)},
          {"h", r.h},
          {"delta", num(r.delta)},
          {"baseline_extinction_time", num(r.baseline_extinction_time)},
          {"baseline_components", components_json(r.baseline_components)},
          {"rows", rows}};
}

std::string stability_csv(const StabilityReport& r) {
  std::ostringstream out;
  out << "amplitude,sup_u_gap,sup_grad_gap_offS,extinction_gap,extinction_time,"
         "containment_pass,type_match,failed\n";
  for (const auto& row : r.rows) {
    std::string match;
    for (std::size_t i = 0; i < row.type_match.size(); ++i) {
      if (i) match += ';';
      match += to_string(row.type_match[i]);
    }
    out << fmt(row.amplitude) << ',' << fmt(row.sup_u_gap) << ',' << fmt(row.sup_grad_gap_offS)
        << ',' << fmt(row.extinction_gap) << ',' << fmt(row.extinction_time) << ','
        << (row.containment_pass ? 1 : 0) << ',' << match << ',' << (row.failed ? 1 : 0)
        << '\n';
  }
  return out.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path.string());
  f << text;
  if (!f) throw Error("write failed: " + path.string());
}

void write_json(const std::filesystem::path& path, const Json& j) {
  write_text(path, j.dump(2) + "\n");
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot read " + path.string());
  try {
    return Json::parse(f);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("bad JSON in " + path.string() + ": " + e.what());
  }
}

}  // namespace lsflab
