#include "centroflow/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "centroflow/errors.hpp"

namespace centroflow {

namespace {

double number(const Json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  const Json& v = j.at(key);
  if (!v.is_number()) throw ConfigError(std::string("'") + key + "' must be a number");
  return v.get<double>();
}

long integer(const Json& j, const char* key, long fallback) {
  if (!j.contains(key)) return fallback;
  const Json& v = j.at(key);
  if (!v.is_number_integer()) throw ConfigError(std::string("'") + key + "' must be an integer");
  return v.get<long>();
}

std::vector<double> number_array(const Json& j, const char* key) {
  std::vector<double> out;
  if (!j.contains(key)) return out;
  const Json& v = j.at(key);
  if (!v.is_array()) throw ConfigError(std::string("'") + key + "' must be an array of numbers");
  for (const Json& x : v) {
    if (!x.is_number()) throw ConfigError(std::string("'") + key + "' must be an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace

Json to_json(const FourierSpec& spec) {
  return Json{{"a0", spec.a0}, {"cos", spec.cos_coeffs}, {"sin", spec.sin_coeffs}};
}

FourierSpec fourier_spec_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("Fourier spec must be an object {\"a0\", \"cos\", \"sin\"}");
  FourierSpec spec;
  spec.a0 = number(j, "a0", 1.0);
  spec.cos_coeffs = number_array(j, "cos");
  spec.sin_coeffs = number_array(j, "sin");
  return spec;
}

FlowConfig flow_config_from_json(const Json& j, FlowConfig cfg) {
  if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
  cfg.p = number(j, "p", cfg.p);
  if (j.contains("psi")) cfg.psi = fourier_spec_from_json(j.at("psi"));
  cfg.n_samples = static_cast<int>(integer(j, "n_samples", cfg.n_samples));
  cfg.dt_safety = number(j, "dt_safety", cfg.dt_safety);
  cfg.t_max = number(j, "t_max", cfg.t_max);
  cfg.max_steps = integer(j, "max_steps", cfg.max_steps);
  if (j.contains("normalize")) {
    if (!j.at("normalize").is_boolean()) throw ConfigError("'normalize' must be true or false");
    cfg.normalize = j.at("normalize").get<bool>();
  }
  cfg.stop_residual = number(j, "stop_residual", cfg.stop_residual);
  cfg.aspect_max = number(j, "aspect_max", cfg.aspect_max);
  cfg.r_min = number(j, "r_min", cfg.r_min);
  cfg.extinction_area_fraction = number(j, "extinction_area_fraction", cfg.extinction_area_fraction);
  cfg.record_every = static_cast<int>(integer(j, "record_every", cfg.record_every));
  if (j.contains("integrator")) {
    const Json& v = j.at("integrator");
    const std::string name = v.is_string() ? v.get<std::string>() : "";
    if (name == "rk4") cfg.integrator = Integrator::RK4;
    else if (name == "rkc") cfg.integrator = Integrator::RKC;
    else throw ConfigError("'integrator' must be \"rk4\" or \"rkc\"");
  }
  cfg.rkc_step_tolerance = number(j, "rkc_step_tolerance", cfg.rkc_step_tolerance);
  cfg.rkc_max_stages = static_cast<int>(integer(j, "rkc_max_stages", cfg.rkc_max_stages));
  return cfg;
}

Json to_json(const ObstructionReport& r) {
  Json j;
  j["n_critical"] = r.critical.degenerate ? Json("Degenerate") : Json(r.critical.count);
  j["weighted_critical"] = r.critical.degenerate ? Json(nullptr) : Json(r.critical.weighted_count);
  j["critical_locations"] = r.critical.locations;
  j["tangential_locations"] = r.critical.tangential;
  j["kw"] = r.kw ? Json(*r.kw) : Json(nullptr);
  j["b_min_at_critical"] = r.critical.degenerate ? Json(nullptr) : finite_or_null(r.b_min_at_critical);
  j["b_nondegenerate"] = r.b_nondegenerate;
  j["winding"] = r.winding ? Json(*r.winding) : Json(nullptr);
  j["necessary_condition_pass"] = r.necessary_condition_pass;
  j["theorem_b_applicable"] = r.theorem_b_applicable;
  return j;
}

Json to_json(const SolveReport& r, const std::vector<std::string>& curve_refs) {
  Json j;
  j["status"] = to_string(r.status);
  j["residual_sup"] = r.residual_sup;
  j["residual_osc"] = r.residual_osc;
  j["lambda_star"] = r.lambda_star;
  j["k"] = r.k == kUnboundedPeriodicity ? Json(nullptr) : Json(r.k);
  j["p"] = r.p;
  j["n_steps"] = r.n_steps;
  j["final_aspect"] = r.final_aspect;
  j["termination"] = to_string(r.trace.termination);
  j["detail"] = r.detail;
  Json snaps = Json::array();
  for (std::size_t i = 0; i < r.snapshots.size(); ++i) {
    const Snapshot& s = r.snapshots[i];
    snaps.push_back({{"step", s.step},
                     {"t", s.t},
                     {"tau", s.tau},
                     {"residual_sup", s.residual_sup},
                     {"residual_osc", s.residual_osc},
                     {"aspect", s.aspect},
                     {"curve_ref", i < curve_refs.size() ? Json(curve_refs[i]) : Json(nullptr)}});
  }
  j["snapshots"] = std::move(snaps);
  return j;
}

Json to_json(const FlowRecord& r) {
  return Json{{"step", r.step},       {"t", r.t},
              {"tau", r.tau},         {"area", r.area},
              {"length", r.length},   {"omega_p_psi", r.omega_p_psi},
              {"ratio", r.ratio},     {"min_speed", r.min_speed},
              {"residual_osc", r.residual_osc}, {"aspect", r.aspect},
              {"dt", r.dt}};
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

std::string field_csv(std::span<const double> f, const char* name) {
  std::ostringstream os;
  os << "theta," << name << "\n";
  char line[96];
  const int n = static_cast<int>(f.size());
  for (int i = 0; i < n; ++i) {
    std::snprintf(line, sizeof line, "%.17g,%.17g\n", grid_angle(i, n), f[static_cast<std::size_t>(i)]);
    os << line;
  }
  return os.str();
}

}  // namespace centroflow
