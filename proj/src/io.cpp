#include "sadnet/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "sadnet/errors.hpp"

namespace sadnet::io {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Vec vec_from_json(const json& j, const char* name, int n) {
  if (!j.contains(name)) throw StructuralError(std::string("missing field: ") + name);
  Vec v = j.at(name).get<Vec>();
  if (n >= 0 && static_cast<int>(v.size()) != n) {
    std::ostringstream os;
    os << "field " << name << " has length " << v.size() << ", expected " << n;
    throw StructuralError(os.str());
  }
  return v;
}

json layer_to_json(const NetworkLayer& layer) {
  return json{{"weights", layer.weights.a}};
}

NetworkLayer layer_from_json(const json& j, int n, const char* name) {
  if (!j.contains("weights"))
    throw StructuralError(std::string(name) + " layer is missing 'weights'");
  NetworkLayer layer(n);
  const Vec flat = j.at("weights").get<Vec>();
  if (static_cast<int>(flat.size()) != n * n) {
    std::ostringstream os;
    os << name << " weights have " << flat.size() << " entries, expected " << n * n;
    throw StructuralError(os.str());
  }
  layer.weights.a = flat;
  return layer;
}

}  // namespace

json scenario_to_json(const Scenario& sc) {
  json j;
  j["n"] = sc.n();
  j["physical"] = layer_to_json(sc.physical);
  j["social"] = layer_to_json(sc.social);
  j["params"] = {{"beta", sc.params.beta},       {"gamma", sc.params.gamma},
                 {"theta", sc.params.theta},     {"delta", sc.params.delta},
                 {"lambda", sc.params.lambda},   {"xi", sc.params.xi},
                 {"prejudice", sc.params.prejudice}};
  j["initial"] = {{"a", sc.initial.a}, {"d", sc.initial.d}, {"x", sc.initial.x}};
  return j;
}

Scenario scenario_from_json(const json& j) {
  if (!j.contains("n")) throw StructuralError("scenario is missing 'n'");
  const int n = j.at("n").get<int>();
  if (n <= 0) throw StructuralError("scenario has non-positive n");
  for (const char* key : {"physical", "social", "params", "initial"})
    if (!j.contains(key)) throw StructuralError(std::string("scenario is missing '") + key + "'");
  Scenario sc;
  sc.physical = layer_from_json(j.at("physical"), n, "physical");
  sc.social = layer_from_json(j.at("social"), n, "social");
  const json& p = j.at("params");
  sc.params.beta = vec_from_json(p, "beta", n);
  sc.params.gamma = vec_from_json(p, "gamma", n);
  sc.params.theta = vec_from_json(p, "theta", n);
  sc.params.delta = vec_from_json(p, "delta", n);
  sc.params.lambda = vec_from_json(p, "lambda", n);
  sc.params.xi = vec_from_json(p, "xi", n);
  sc.params.prejudice = vec_from_json(p, "prejudice", n);
  const json& init = j.at("initial");
  sc.initial.a = vec_from_json(init, "a", n);
  sc.initial.d = vec_from_json(init, "d", n);
  sc.initial.x = vec_from_json(init, "x", n);
  sc.initial.time = 0;
  sc.physical.normalize_rows();
  sc.social.normalize_rows();
  return sc;
}

Scenario load_scenario(const std::string& path) { return scenario_from_json(load_json(path)); }

void save_scenario(const Scenario& sc, const std::string& path) {
  write_text(path, scenario_to_json(sc).dump(2) + "\n");
}

json equilibrium_report_to_json(const EquilibriumReport& rep) {
  json j;
  j["kind"] = to_string(rep.kind);
  j["point"] = {{"a", rep.point.a}, {"d", rep.point.d}, {"x", rep.point.x}};
  j["residual"] = rep.residual;
  j["r0"] = {{"at_free", rep.r0.at_free}, {"min", rep.r0.min},       {"max", rep.r0.max},
             {"x_lower", rep.r0.x_lower}, {"x_upper", rep.r0.x_upper}};
  j["certificate"] = to_string(rep.certificate);
  j["constants"] = {{"nu", rep.nu}, {"phi", rep.phi}, {"eta", rep.eta},
                    {"bstar_diag", rep.bstar_diag}};
  j["sigma"] = {{"found", rep.sigma.found}, {"s1", rep.sigma.s1}, {"s2", rep.sigma.s2}};
  j["reason"] = rep.reason;
  return j;
}

json mpc_config_to_json(const MpcConfig& cfg) {
  json j;
  j["horizon"] = cfg.horizon;
  j["weights"] = {{"q_a", cfg.weights.q_a},
                  {"q_d", cfg.weights.q_d},
                  {"l", cfg.weights.l},
                  {"terminal_weight", cfg.weights.terminal_weight}};
  j["budget"] = {{"c", cfg.budget.c}, {"upper", cfg.budget.upper}};
  j["solver"] = {{"max_iter", cfg.solver.max_iter},
                 {"grad_tol", cfg.solver.grad_tol},
                 {"shrink", cfg.solver.shrink},
                 {"warm_start", cfg.solver.warm_start},
                 {"gauss_newton", cfg.solver.gauss_newton}};
  if (cfg.target.has_value())
    j["target"] = {{"a", cfg.target->a}, {"d", cfg.target->d}, {"x", cfg.target->x}};
  return j;
}

MpcConfig mpc_config_from_json(const json& j, MpcConfig cfg) {
  if (j.contains("horizon")) cfg.horizon = j.at("horizon").get<int>();
  if (j.contains("weights")) {
    const json& w = j.at("weights");
    if (w.contains("q_a")) cfg.weights.q_a = w.at("q_a").get<Vec>();
    if (w.contains("q_d")) cfg.weights.q_d = w.at("q_d").get<Vec>();
    if (w.contains("l")) cfg.weights.l = w.at("l").get<Vec>();
    if (w.contains("terminal_weight"))
      cfg.weights.terminal_weight = w.at("terminal_weight").get<double>();
  }
  if (j.contains("budget")) {
    const json& b = j.at("budget");
    if (b.contains("c")) cfg.budget.c = b.at("c").get<double>();
    if (b.contains("upper")) cfg.budget.upper = b.at("upper").get<Vec>();
  }
  if (j.contains("solver")) {
    const json& s = j.at("solver");
    if (s.contains("max_iter")) cfg.solver.max_iter = s.at("max_iter").get<int>();
    if (s.contains("grad_tol")) cfg.solver.grad_tol = s.at("grad_tol").get<double>();
    if (s.contains("shrink")) cfg.solver.shrink = s.at("shrink").get<double>();
    if (s.contains("warm_start")) cfg.solver.warm_start = s.at("warm_start").get<bool>();
    if (s.contains("gauss_newton")) cfg.solver.gauss_newton = s.at("gauss_newton").get<bool>();
  }
  if (j.contains("target")) {
    SystemState t;
    t.a = j.at("target").at("a").get<Vec>();
    t.d = j.at("target").at("d").get<Vec>();
    t.x = j.at("target").at("x").get<Vec>();
    cfg.target = std::move(t);
  }
  return cfg;
}

json comparison_report_to_json(const ComparisonReport& rep, const json& trajectory_refs) {
  json j;
  j["seed"] = rep.seed;
  j["n"] = rep.n;
  j["total_steps"] = rep.total_steps;
  j["generator"] = rep.generator;
  j["effectiveness"] = {{"uncontrolled", rep.effectiveness_uncontrolled},
                        {"ccp", rep.effectiveness_ccp},
                        {"mpc", rep.effectiveness_mpc}};
  j["cost"] = {{"ccp", rep.cost_ccp}, {"mpc", rep.cost_mpc}};
  j["ccp"] = {{"u", rep.ccp_u},
              {"objective", rep.ccp_objective},
              {"certified", rep.ccp_certified}};
  j["config"] = mpc_config_to_json(rep.config);
  j["trajectories"] = trajectory_refs.is_null() ? json(nullptr) : trajectory_refs;
  return j;
}

std::string trajectory_csv(const Trajectory& traj) {
  std::string out = "t,j,s,a,d,x,u\n";
  const long T = static_cast<long>(traj.states.size());
  for (long t = 0; t < T; ++t) {
    const SystemState& st = traj.states[t];
    for (int j = 0; j < st.n(); ++j) {
      const double u =
          t < static_cast<long>(traj.controls.size()) ? traj.controls[t][j] : 0.0;
      out += std::to_string(t) + "," + std::to_string(j) + "," +
             fmt(1.0 - st.a[j] - st.d[j]) + "," + fmt(st.a[j]) + "," + fmt(st.d[j]) + "," +
             fmt(st.x[j]) + "," + fmt(u) + "\n";
    }
  }
  return out;
}

std::string aggregate_csv(const Trajectory& traj) {
  std::string out = "t,s_mean,a_mean,d_mean\n";
  const auto rows = aggregate_adoption(traj);
  for (size_t t = 0; t < rows.size(); ++t)
    out += std::to_string(t) + "," + fmt(rows[t].s) + "," + fmt(rows[t].a) + "," +
           fmt(rows[t].d) + "\n";
  return out;
}

std::string per_community_csv(const Trajectory& traj) {
  std::string out = "t,j,a,d,x\n";
  for (size_t t = 0; t < traj.states.size(); ++t) {
    const SystemState& st = traj.states[t];
    for (int j = 0; j < st.n(); ++j)
      out += std::to_string(t) + "," + std::to_string(j) + "," + fmt(st.a[j]) + "," +
             fmt(st.d[j]) + "," + fmt(st.x[j]) + "\n";
  }
  return out;
}

std::string controls_csv(const Trajectory& traj) {
  std::string out = "t,j,u\n";
  for (size_t t = 0; t < traj.controls.size(); ++t)
    for (size_t j = 0; j < traj.controls[t].size(); ++j)
      out += std::to_string(t) + "," + std::to_string(j) + "," + fmt(traj.controls[t][j]) + "\n";
  return out;
}

std::string pareto_csv(const ComparisonReport& rep) {
  std::string out = "policy,cost,effectiveness\n";
  out += "uncontrolled,0," + fmt(rep.effectiveness_uncontrolled) + "\n";
  out += "ccp," + fmt(rep.cost_ccp) + "," + fmt(rep.effectiveness_ccp) + "\n";
  out += "mpc," + fmt(rep.cost_mpc) + "," + fmt(rep.effectiveness_mpc) + "\n";
  return out;
}

json trajectory_to_json(const Trajectory& traj) {
  json states = json::array();
  for (const SystemState& st : traj.states)
    states.push_back({{"a", st.a}, {"d", st.d}, {"x", st.x}});
  json j;
  j["states"] = states;
  j["controls"] = traj.controls;
  return j;
}

Trajectory trajectory_from_json(const json& j) {
  Trajectory traj;
  if (!j.contains("states")) throw StructuralError("trajectory is missing 'states'");
  for (const json& s : j.at("states")) {
    SystemState st;
    st.a = s.at("a").get<Vec>();
    st.d = s.at("d").get<Vec>();
    st.x = s.at("x").get<Vec>();
    st.time = static_cast<long>(traj.states.size());
    traj.states.push_back(std::move(st));
  }
  if (j.contains("controls")) traj.controls = j.at("controls").get<std::vector<Vec>>();
  return traj;
}

void export_report(const Trajectory& traj, const std::string& path, ExportFormat format) {
  write_text(path, format == ExportFormat::Csv ? trajectory_csv(traj)
                                               : trajectory_to_json(traj).dump(2) + "\n");
}

void export_report(const ComparisonReport& rep, const std::string& path, ExportFormat format) {
  write_text(path, format == ExportFormat::Csv
                       ? pareto_csv(rep)
                       : comparison_report_to_json(rep).dump(2) + "\n");
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open for writing: " + path);
  f << content;
  if (!f.good()) throw IoError("write failed: " + path);
}

std::string read_text(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open: " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

json load_json(const std::string& path) {
  try {
    return json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw StructuralError("invalid JSON in " + path + ": " + e.what());
  }
}

}  // namespace sadnet::io
