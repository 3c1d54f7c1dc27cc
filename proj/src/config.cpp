#include "rns/config.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace rns {

using nlohmann::json;

namespace {

// SAX pass that rejects duplicate keys inside any object.
struct DuplicateKeyChecker : json::json_sax_t {
  std::vector<std::set<std::string>> stack;
  std::string duplicate;

  bool key(string_t& val) override {
    if (!stack.empty() && !stack.back().insert(val).second && duplicate.empty())
      duplicate = val;
    return true;
  }
  bool start_object(std::size_t) override {
    stack.emplace_back();
    return true;
  }
  bool end_object() override {
    stack.pop_back();
    return true;
  }
  bool null() override { return true; }
  bool boolean(bool) override { return true; }
  bool number_integer(number_integer_t) override { return true; }
  bool number_unsigned(number_unsigned_t) override { return true; }
  bool number_float(number_float_t, const string_t&) override { return true; }
  bool string(string_t&) override { return true; }
  bool binary(binary_t&) override { return true; }
  bool start_array(std::size_t) override { return true; }
  bool end_array() override { return true; }
  bool parse_error(std::size_t, const std::string&,
                   const nlohmann::detail::exception& ex) override {
    throw SchemaError(std::string("config: ") + ex.what());
  }
};

void reject_unknown(const json& obj, const std::string& where,
                    const std::set<std::string>& allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key()))
      throw SchemaError("config: unknown key at " + where + "/" + it.key());
}

double need_number(const json& obj, const std::string& where, const std::string& key) {
  if (!obj.contains(key))
    throw SchemaError("config: missing required key " + where + "/" + key);
  if (!obj[key].is_number())
    throw SchemaError("config: expected number at " + where + "/" + key);
  return obj[key].get<double>();
}

double opt_number(const json& obj, const std::string& where, const std::string& key,
                  double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number())
    throw SchemaError("config: expected number at " + where + "/" + key);
  return obj[key].get<double>();
}

int opt_int(const json& obj, const std::string& where, const std::string& key,
            int fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number_integer())
    throw SchemaError("config: expected integer at " + where + "/" + key);
  return obj[key].get<int>();
}

std::string opt_string(const json& obj, const std::string& where,
                       const std::string& key, const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_string())
    throw SchemaError("config: expected string at " + where + "/" + key);
  return obj[key].get<std::string>();
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  DuplicateKeyChecker checker;
  json::sax_parse(text, &checker);
  if (!checker.duplicate.empty())
    throw SchemaError("config: duplicate key \"" + checker.duplicate + "\"");
  json root;
  try {
    root = json::parse(text);
  } catch (const std::exception& ex) {
    throw SchemaError(std::string("config: ") + ex.what());
  }
  if (!root.is_object()) throw SchemaError("config: root must be an object");

  RunConfig cfg;
  reject_unknown(root, "", {"parameters", "reaction", "grid", "initial_data",
                            "solver", "spectral", "output_dir", "seed"});

  if (root.contains("parameters")) {
    const json& p = root["parameters"];
    reject_unknown(p, "/parameters",
                   {"a", "c_v", "mu", "nu", "diff", "rate_k", "heat_q"});
    cfg.parameters.a = need_number(p, "/parameters", "a");
    cfg.parameters.c_v = need_number(p, "/parameters", "c_v");
    cfg.parameters.mu = need_number(p, "/parameters", "mu");
    cfg.parameters.nu = need_number(p, "/parameters", "nu");
    cfg.parameters.diff = need_number(p, "/parameters", "diff");
    cfg.parameters.rate_k = need_number(p, "/parameters", "rate_k");
    cfg.parameters.heat_q = need_number(p, "/parameters", "heat_q");
  }
  cfg.parameters.validate();

  if (root.contains("reaction")) {
    const json& r = root["reaction"];
    reject_unknown(r, "/reaction",
                   {"kind", "activation", "theta_floor", "theta_ignition",
                    "ramp_width", "constant_value", "theta_max"});
    const std::string kind = opt_string(r, "/reaction", "kind", "clipped-arrhenius");
    if (kind == "clipped-arrhenius")
      cfg.reaction.kind = ReactionRate::Kind::ClippedArrhenius;
    else if (kind == "ignition-ramp")
      cfg.reaction.kind = ReactionRate::Kind::IgnitionRamp;
    else if (kind == "constant")
      cfg.reaction.kind = ReactionRate::Kind::Constant;
    else
      throw SchemaError("config: unknown reaction kind at /reaction/kind");
    cfg.reaction.activation = opt_number(r, "/reaction", "activation", 2.0);
    cfg.reaction.theta_floor = opt_number(r, "/reaction", "theta_floor", 0.1);
    cfg.reaction.theta_ignition = opt_number(r, "/reaction", "theta_ignition", 1.0);
    cfg.reaction.ramp_width = opt_number(r, "/reaction", "ramp_width", 0.5);
    cfg.reaction.constant_value = opt_number(r, "/reaction", "constant_value", 1.0);
    cfg.reaction.theta_max = opt_number(r, "/reaction", "theta_max", 10.0);
  }

  if (root.contains("grid")) {
    const json& g = root["grid"];
    reject_unknown(g, "/grid", {"half_width", "cells", "boundary"});
    cfg.grid.half_width = opt_number(g, "/grid", "half_width", cfg.grid.half_width);
    cfg.grid.cells = opt_int(g, "/grid", "cells", cfg.grid.cells);
    const std::string bc = opt_string(g, "/grid", "boundary", "periodic");
    if (bc == "periodic")
      cfg.grid.boundary = Boundary::Periodic;
    else if (bc == "absorbing-pad")
      cfg.grid.boundary = Boundary::AbsorbingPad;
    else
      throw SchemaError("config: unknown boundary at /grid/boundary");
  }
  cfg.grid.validate();

  if (root.contains("initial_data")) {
    const json& d = root["initial_data"];
    reject_unknown(d, "/initial_data", {"profiles", "v_jumps", "target_delta_pert"});
    if (d.contains("profiles")) {
      if (!d["profiles"].is_array())
        throw SchemaError("config: expected array at /initial_data/profiles");
      int idx = 0;
      for (const auto& pj : d["profiles"]) {
        const std::string where = "/initial_data/profiles/" + std::to_string(idx++);
        reject_unknown(pj, where,
                       {"field", "type", "amplitude", "center", "width", "wavenumber"});
        ProfileSpec ps;
        ps.field = opt_string(pj, where, "field", "");
        if (ps.field != "v" && ps.field != "u" && ps.field != "theta" && ps.field != "z")
          throw SchemaError("config: field must be one of v,u,theta,z at " + where);
        ps.type = opt_string(pj, where, "type", "gaussian");
        if (ps.type != "gaussian" && ps.type != "sine" && ps.type != "constant")
          throw SchemaError("config: unknown profile type at " + where + "/type");
        ps.amplitude = opt_number(pj, where, "amplitude", 0.0);
        ps.center = opt_number(pj, where, "center", 0.0);
        ps.width = opt_number(pj, where, "width", 1.0);
        ps.wavenumber = opt_int(pj, where, "wavenumber", 1);
        cfg.initial_data.profiles.push_back(ps);
      }
    }
    if (d.contains("v_jumps")) {
      if (!d["v_jumps"].is_array())
        throw SchemaError("config: expected array at /initial_data/v_jumps");
      int idx = 0;
      for (const auto& jj : d["v_jumps"]) {
        const std::string where = "/initial_data/v_jumps/" + std::to_string(idx++);
        reject_unknown(jj, where, {"position", "size"});
        cfg.initial_data.v_jumps.push_back(
            {need_number(jj, where, "position"), need_number(jj, where, "size")});
      }
    }
    if (d.contains("target_delta_pert"))
      cfg.initial_data.target_delta_pert =
          need_number(d, "/initial_data", "target_delta_pert");
  }

  if (root.contains("solver")) {
    const json& s = root["solver"];
    reject_unknown(s, "/solver",
                   {"t_sharp", "tol", "n_max", "mode", "t_end", "snapshots", "nu0",
                    "cfl", "mesh_subdiv"});
    cfg.solver.t_sharp = opt_number(s, "/solver", "t_sharp", cfg.solver.t_sharp);
    cfg.solver.tol = opt_number(s, "/solver", "tol", cfg.solver.tol);
    cfg.solver.n_max = opt_int(s, "/solver", "n_max", cfg.solver.n_max);
    cfg.solver.mode = opt_string(s, "/solver", "mode", cfg.solver.mode);
    if (cfg.solver.mode != "picard" && cfg.solver.mode != "reference" &&
        cfg.solver.mode != "both")
      throw SchemaError("config: mode must be picard|reference|both at /solver/mode");
    cfg.solver.t_end = opt_number(s, "/solver", "t_end", cfg.solver.t_end);
    cfg.solver.snapshots = opt_int(s, "/solver", "snapshots", cfg.solver.snapshots);
    cfg.solver.nu0 = opt_number(s, "/solver", "nu0", cfg.solver.nu0);
    cfg.solver.cfl = opt_number(s, "/solver", "cfl", cfg.solver.cfl);
    cfg.solver.mesh_subdiv = opt_int(s, "/solver", "mesh_subdiv", cfg.solver.mesh_subdiv);
  }

  if (root.contains("spectral")) {
    const json& s = root["spectral"];
    reject_unknown(s, "/spectral",
                   {"eta_min", "eta_max", "eta_count", "t_list", "k_budget",
                    "probe_min", "probe_max"});
    cfg.spectral.eta_min = opt_number(s, "/spectral", "eta_min", cfg.spectral.eta_min);
    cfg.spectral.eta_max = opt_number(s, "/spectral", "eta_max", cfg.spectral.eta_max);
    cfg.spectral.eta_count = opt_int(s, "/spectral", "eta_count", cfg.spectral.eta_count);
    if (s.contains("t_list")) {
      if (!s["t_list"].is_array())
        throw SchemaError("config: expected array at /spectral/t_list");
      cfg.spectral.t_list.clear();
      for (const auto& tv : s["t_list"]) {
        if (!tv.is_number())
          throw SchemaError("config: expected number in /spectral/t_list");
        cfg.spectral.t_list.push_back(tv.get<double>());
      }
    }
    cfg.spectral.k_budget = opt_number(s, "/spectral", "k_budget", cfg.spectral.k_budget);
    cfg.spectral.probe_min = opt_number(s, "/spectral", "probe_min", cfg.spectral.probe_min);
    cfg.spectral.probe_max = opt_number(s, "/spectral", "probe_max", cfg.spectral.probe_max);
  }

  if (root.contains("output_dir")) {
    if (!root["output_dir"].is_string())
      throw SchemaError("config: expected string at /output_dir");
    cfg.output_dir = root["output_dir"].get<std::string>();
  }
  if (root.contains("seed")) {
    if (!root["seed"].is_number_unsigned() && !root["seed"].is_number_integer())
      throw SchemaError("config: expected integer at /seed");
    cfg.seed = root["seed"].get<unsigned long long>();
  }
  return cfg;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

InitialData build_initial_data(const RunConfig& cfg) {
  InitialData data;
  data.grid = cfg.grid;
  const int n = cfg.grid.cells;
  data.v0 = ArrayXd::Ones(n);
  data.u0 = ArrayXd::Zero(n);
  data.theta0 = ArrayXd::Ones(n);
  data.z0 = ArrayXd::Zero(n);
  data.v_jumps = cfg.initial_data.v_jumps;

  auto add_profile = [&](const ProfileSpec& ps, double scale) {
    ArrayXd bump(n);
    for (int i = 0; i < n; ++i) {
      const double x = cfg.grid.x(i);
      if (ps.type == "gaussian") {
        const double r = (x - ps.center) / ps.width;
        bump[i] = ps.amplitude * std::exp(-r * r);
      } else if (ps.type == "sine") {
        bump[i] = ps.amplitude *
                  std::sin(M_PI * ps.wavenumber * (x - ps.center) / cfg.grid.half_width);
      } else {
        bump[i] = ps.amplitude;
      }
    }
    bump *= scale;
    if (ps.field == "v")
      data.v0 += bump;
    else if (ps.field == "u")
      data.u0 += bump;
    else if (ps.field == "theta")
      data.theta0 += bump;
    else
      data.z0 += bump;
  };

  auto apply_all = [&](double scale) {
    data.v0 = ArrayXd::Ones(n);
    data.u0 = ArrayXd::Zero(n);
    data.theta0 = ArrayXd::Ones(n);
    data.z0 = ArrayXd::Zero(n);
    for (const auto& ps : cfg.initial_data.profiles) add_profile(ps, scale);
    for (const auto& j : cfg.initial_data.v_jumps)
      for (int i = 0; i < n; ++i)
        if (cfg.grid.x(i) > j.position) data.v0[i] += scale * j.size;
    data.v_jumps.clear();
    for (const auto& j : cfg.initial_data.v_jumps)
      data.v_jumps.push_back({j.position, scale * j.size});
    measure_smallness(data);
  };

  apply_all(1.0);
  if (cfg.initial_data.target_delta_pert && data.delta_pert > 0.0)
    apply_all(*cfg.initial_data.target_delta_pert / data.delta_pert);

  if (data.z0.minCoeff() < 0.0 || data.z0.maxCoeff() > 1.0)
    throw SchemaError("config: initial z must satisfy 0 <= z0 <= 1");
  data.initial_state().validate();
  return data;
}

std::string canonical_json(const RunConfig& cfg) {
  json j;
  j["parameters"] = {{"a", cfg.parameters.a},       {"c_v", cfg.parameters.c_v},
                     {"mu", cfg.parameters.mu},     {"nu", cfg.parameters.nu},
                     {"diff", cfg.parameters.diff}, {"rate_k", cfg.parameters.rate_k},
                     {"heat_q", cfg.parameters.heat_q}};
  const char* kind = cfg.reaction.kind == ReactionRate::Kind::ClippedArrhenius
                         ? "clipped-arrhenius"
                         : cfg.reaction.kind == ReactionRate::Kind::IgnitionRamp
                               ? "ignition-ramp"
                               : "constant";
  j["reaction"] = {{"kind", kind},
                   {"activation", cfg.reaction.activation},
                   {"theta_floor", cfg.reaction.theta_floor},
                   {"theta_ignition", cfg.reaction.theta_ignition},
                   {"ramp_width", cfg.reaction.ramp_width},
                   {"constant_value", cfg.reaction.constant_value},
                   {"theta_max", cfg.reaction.theta_max}};
  j["grid"] = {{"half_width", cfg.grid.half_width},
               {"cells", cfg.grid.cells},
               {"boundary", cfg.grid.boundary == Boundary::Periodic ? "periodic"
                                                                    : "absorbing-pad"}};
  json profiles = json::array();
  for (const auto& p : cfg.initial_data.profiles)
    profiles.push_back({{"field", p.field},
                        {"type", p.type},
                        {"amplitude", p.amplitude},
                        {"center", p.center},
                        {"width", p.width},
                        {"wavenumber", p.wavenumber}});
  json jumps = json::array();
  for (const auto& jmp : cfg.initial_data.v_jumps)
    jumps.push_back({{"position", jmp.position}, {"size", jmp.size}});
  j["initial_data"] = {{"profiles", profiles}, {"v_jumps", jumps}};
  if (cfg.initial_data.target_delta_pert)
    j["initial_data"]["target_delta_pert"] = *cfg.initial_data.target_delta_pert;
  j["solver"] = {{"t_sharp", cfg.solver.t_sharp}, {"tol", cfg.solver.tol},
                 {"n_max", cfg.solver.n_max},     {"mode", cfg.solver.mode},
                 {"t_end", cfg.solver.t_end},     {"snapshots", cfg.solver.snapshots},
                 {"nu0", cfg.solver.nu0},         {"cfl", cfg.solver.cfl},
                 {"mesh_subdiv", cfg.solver.mesh_subdiv}};
  j["spectral"] = {{"eta_min", cfg.spectral.eta_min},
                   {"eta_max", cfg.spectral.eta_max},
                   {"eta_count", cfg.spectral.eta_count},
                   {"t_list", cfg.spectral.t_list},
                   {"k_budget", cfg.spectral.k_budget},
                   {"probe_min", cfg.spectral.probe_min},
                   {"probe_max", cfg.spectral.probe_max}};
  j["output_dir"] = cfg.output_dir;
  j["seed"] = cfg.seed;
  return j.dump();
}

std::string config_hash(const RunConfig& cfg) {
  const std::string s = canonical_json(cfg);
  unsigned long long h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", h);
  return buf;
}

}  // namespace rns
