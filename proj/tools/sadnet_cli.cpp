// sadnet: simulate, certify and control coupled adoption-opinion dynamics
// on two-layer community networks.
//
// Exit codes: 0 success, 1 validation/usage failure, 2 solver
// nonconvergence, 3 I/O error.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "sadnet/errors.hpp"
#include "sadnet/io.hpp"

using namespace sadnet;

namespace {

struct ScenarioSource {
  std::string path;
  uint64_t seed = 0;
  int n = 0;
  bool has_seed = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--scenario", path, "Scenario JSON file");
    auto* seed_opt = cmd->add_option("--seed", seed, "Generator seed");
    cmd->add_option("-n,--communities", n, "Community count (with --seed)");
    seed_opt->each([this](const std::string&) { has_seed = true; });
  }

  Scenario resolve() const {
    const bool has_file = !path.empty();
    if (has_file == has_seed)
      throw ValidationError("exactly one scenario source required: --scenario or --seed/-n");
    if (has_file) return io::load_scenario(path);
    if (n < 1) throw ValidationError("--seed needs -n/--communities >= 1");
    return generate_scenario(seed, n);
  }
};

// SADNET_OUT_DIR prefixes relative output paths.
std::string resolve_out(const std::string& path) {
  if (path.empty() || path.front() == '/') return path;
  const char* dir = std::getenv("SADNET_OUT_DIR");
  if (dir == nullptr || *dir == '\0') return path;
  return std::string(dir) + "/" + path;
}

void emit(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
  } else {
    io::write_text(resolve_out(path), content);
  }
}

Scenario validated(const Scenario& sc) {
  const ValidationReport report = validate_scenario(sc);
  if (!report.valid())
    throw ValidationError("scenario validation failed:\n" + report.describe());
  return sc;
}

struct ControlFlags {
  double budget = 0.0;
  int horizon = 10;
  long steps = 100;
  double qa = 1.0, qd = 1.0, l = 0.1, terminal = 10.0;
  std::optional<double> eta;
  std::string mpc_config_path;
  bool gauss_newton = false;

  void attach(CLI::App* cmd, bool with_steps) {
    cmd->add_option("--budget", budget, "Per-step intervention budget C")->required();
    cmd->add_option("--horizon", horizon, "Prediction horizon N")->capture_default_str();
    if (with_steps)
      cmd->add_option("--steps", steps, "Closed-loop steps")->capture_default_str();
    cmd->add_option("--qa", qa, "Adoption reward weight")->capture_default_str();
    cmd->add_option("--qd", qd, "Dissatisfaction penalty weight")->capture_default_str();
    cmd->add_option("--l", l, "Effort penalty weight")->capture_default_str();
    cmd->add_option("--terminal-weight", terminal, "Terminal penalty weight")
        ->capture_default_str();
    cmd->add_option("--eta", eta, "Opinion contraction constant (default: max lambda)");
    cmd->add_option("--mpc-config", mpc_config_path,
                    "MpcConfig JSON file; explicit flags override its fields");
    cmd->add_flag("--gauss-newton", gauss_newton, "Enable the Gauss-Newton refinement pass");
  }

  MpcConfig build(const Scenario& sc, const CLI::App* cmd) const {
    MpcConfig cfg;
    cfg.horizon = horizon;
    cfg.weights = CostWeights::uniform(sc.n(), qa, qd, l, terminal);
    cfg.budget = BudgetConstraint::for_scenario(sc, budget);
    cfg.solver.gauss_newton = gauss_newton;
    if (!mpc_config_path.empty()) {
      cfg = io::mpc_config_from_json(io::load_json(mpc_config_path), cfg);
      // Flags beat file values.
      if (cmd->count("--horizon")) cfg.horizon = horizon;
      if (cmd->count("--budget")) cfg.budget.c = budget;
      if (cmd->count("--qa") || cmd->count("--qd") || cmd->count("--l"))
        cfg.weights = CostWeights::uniform(sc.n(), qa, qd, l, terminal);
      if (cmd->count("--terminal-weight")) cfg.weights.terminal_weight = terminal;
      if (cmd->count("--gauss-newton")) cfg.solver.gauss_newton = gauss_newton;
      if (cfg.budget.upper.empty())
        cfg.budget = BudgetConstraint::for_scenario(sc, cfg.budget.c);
    }
    return cfg;
  }
};

int dispatch(int argc, char** argv) {
  CLI::App app{"sadnet: adoption-opinion dynamics, stability certificates and nudge control"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "Write a seeded random scenario");
  uint64_t gen_seed = 0;
  int gen_n = 10;
  std::string gen_out;
  gen->add_option("--seed", gen_seed, "Generator seed")->required();
  gen->add_option("-n,--communities", gen_n, "Community count")->capture_default_str();
  gen->add_option("--out", gen_out, "Output path (default: stdout)");

  // simulate
  auto* sim = app.add_subcommand("simulate", "Run the uncontrolled dynamics");
  ScenarioSource sim_src;
  sim_src.attach(sim);
  long sim_steps = 100;
  std::string sim_out, sim_agg_out, sim_percomm_out;
  sim->add_option("--steps", sim_steps, "Number of steps")->capture_default_str();
  sim->add_option("--out", sim_out, "Trajectory CSV path (default: stdout)");
  sim->add_option("--aggregate-out", sim_agg_out, "Aggregate (t, s, a, d means) CSV path");
  sim->add_option("--per-community-out", sim_percomm_out,
                  "Per-community (t, j, a, d, x) CSV path");

  // stability
  auto* stab = app.add_subcommand("stability", "Equilibria, reproduction numbers, certificates");
  ScenarioSource stab_src;
  stab_src.attach(stab);
  std::optional<double> stab_eta;
  double stab_seed_a = 0.05;
  std::string stab_out;
  stab->add_option("--eta", stab_eta, "Opinion contraction constant (default: max lambda)");
  stab->add_option("--fixed-point-seed", stab_seed_a,
                   "Initial adopter fraction for the equilibrium finder")
      ->capture_default_str();
  stab->add_option("--out", stab_out, "Report JSON path (default: stdout)");

  // control
  auto* ctl = app.add_subcommand("control", "Constant-policy or receding-horizon control");
  ScenarioSource ctl_src;
  ctl_src.attach(ctl);
  ControlFlags ctl_flags;
  ctl_flags.attach(ctl, true);
  std::string ctl_mode = "mpc";
  std::string ctl_out, ctl_traj_out, ctl_controls_out;
  ctl->add_option("--mode", ctl_mode, "constant | mpc")
      ->check(CLI::IsMember({"constant", "mpc"}))
      ->capture_default_str();
  ctl->add_option("--out", ctl_out, "Result JSON path (default: stdout)");
  ctl->add_option("--traj-out", ctl_traj_out, "Closed-loop trajectory CSV path (mpc mode)");
  ctl->add_option("--controls-out", ctl_controls_out, "Applied controls CSV path (mpc mode)");

  // compare
  auto* cmp = app.add_subcommand("compare", "Uncontrolled vs constant policy vs MPC");
  uint64_t cmp_seed = 0;
  int cmp_n = 10;
  ControlFlags cmp_flags;
  cmp->add_option("--seed", cmp_seed, "Generator seed")->required();
  cmp->add_option("-n,--communities", cmp_n, "Community count")->capture_default_str();
  cmp_flags.attach(cmp, true);
  std::string cmp_out, cmp_outdir;
  cmp->add_option("--out", cmp_out, "Report JSON path (default: stdout)");
  cmp->add_option("--outdir", cmp_outdir, "Directory for plot-ready CSV exports");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  if (gen->parsed()) {
    const Scenario sc = generate_scenario(gen_seed, gen_n);
    emit(gen_out, io::scenario_to_json(sc).dump(2) + "\n");
    return 0;
  }

  if (sim->parsed()) {
    const Scenario sc = validated(sim_src.resolve());
    const Trajectory traj = simulate(sc, sim_steps);
    emit(sim_out, io::trajectory_csv(traj));
    if (!sim_agg_out.empty())
      io::write_text(resolve_out(sim_agg_out), io::aggregate_csv(traj));
    if (!sim_percomm_out.empty())
      io::write_text(resolve_out(sim_percomm_out), io::per_community_csv(traj));
    return 0;
  }

  if (stab->parsed()) {
    const Scenario sc = validated(stab_src.resolve());
    const double eta = stab_eta.value_or(default_eta(sc.params));
    io::json out;
    const EquilibriumReport free_rep = certify_adoption_free(sc);
    out["eta"] = eta;
    out["adoption_free"] = io::equilibrium_report_to_json(free_rep);
    if (free_rep.r0.min > 1.0 + 1e-12) {
      EquilibriumReport diffused = find_diffused_equilibrium(sc, stab_seed_a);
      if (diffused.kind == EquilibriumKind::AdoptionDiffused)
        diffused = certify_diffused(diffused, sc, eta);
      out["diffused"] = io::equilibrium_report_to_json(diffused);
    }
    emit(stab_out, out.dump(2) + "\n");
    return 0;
  }

  if (ctl->parsed()) {
    const Scenario sc = validated(ctl_src.resolve());
    const MpcConfig cfg = ctl_flags.build(sc, ctl);
    const double eta = ctl_flags.eta.value_or(default_eta(sc.params));
    const ConstantPolicyResult ccp = solve_constant_policy(sc, cfg.weights, cfg.budget, eta);
    io::json out;
    out["constant_policy"] = {{"u", ccp.u},
                              {"objective", ccp.objective},
                              {"certified", ccp.certified},
                              {"report", io::equilibrium_report_to_json(ccp.report)}};
    if (ctl_mode == "mpc") {
      MpcConfig run_cfg = cfg;
      run_cfg.target = ccp.report.point;
      const Trajectory traj = run_mpc(sc, run_cfg, ctl_flags.steps);
      int stalls = 0;
      for (const auto& log : traj.solver_log) stalls += log.stalled ? 1 : 0;
      out["mpc"] = {{"config", io::mpc_config_to_json(run_cfg)},
                    {"effectiveness", effectiveness(traj)},
                    {"cost", control_cost(traj)},
                    {"stalled_steps", stalls}};
      if (!ctl_traj_out.empty())
        io::write_text(resolve_out(ctl_traj_out), io::trajectory_csv(traj));
      if (!ctl_controls_out.empty())
        io::write_text(resolve_out(ctl_controls_out), io::controls_csv(traj));
    }
    emit(ctl_out, out.dump(2) + "\n");
    return 0;
  }

  if (cmp->parsed()) {
    MpcConfig cfg;
    cfg.horizon = cmp_flags.horizon;
    cfg.budget.c = cmp_flags.budget;
    cfg.solver.gauss_newton = cmp_flags.gauss_newton;
    cfg.weights = CostWeights::uniform(cmp_n, cmp_flags.qa, cmp_flags.qd, cmp_flags.l,
                                       cmp_flags.terminal);
    const ComparisonReport rep =
        run_comparison(cmp_seed, cmp_n, cmp_flags.steps, cfg, cmp_flags.eta);
    io::json refs;
    if (!cmp_outdir.empty()) {
      const std::string dir = resolve_out(cmp_outdir);
      const auto put = [&](const char* name, const std::string& content) {
        const std::string p = dir + "/" + name;
        io::write_text(p, content);
        return p;
      };
      refs["uncontrolled_aggregate"] =
          put("uncontrolled_aggregate.csv", io::aggregate_csv(rep.uncontrolled));
      refs["ccp_aggregate"] = put("ccp_aggregate.csv", io::aggregate_csv(rep.ccp));
      refs["mpc_aggregate"] = put("mpc_aggregate.csv", io::aggregate_csv(rep.mpc));
      refs["uncontrolled_communities"] =
          put("uncontrolled_communities.csv", io::per_community_csv(rep.uncontrolled));
      refs["mpc_communities"] = put("mpc_communities.csv", io::per_community_csv(rep.mpc));
      refs["mpc_controls"] = put("mpc_controls.csv", io::controls_csv(rep.mpc));
      refs["pareto"] = put("pareto.csv", io::pareto_csv(rep));
    }
    emit(cmp_out, io::comparison_report_to_json(rep, refs).dump(2) + "\n");
    return 0;
  }

  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return dispatch(argc, argv);
  } catch (const NonconvergenceError& e) {
    std::cerr << "solver did not converge: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
