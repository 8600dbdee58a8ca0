#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <string>

#include "helpers.hpp"
#include "sadnet/errors.hpp"
#include "sadnet/io.hpp"
#include "sadnet/stability.hpp"

using namespace sadnet;

namespace {

std::string temp_path(const char* name) {
  return std::string("/tmp/sadnet_test_") + name;
}

}  // namespace

TEST_CASE("scenario JSON round-trips losslessly") {
  const Scenario sc = generate_scenario(8, 5);
  const io::json j = io::scenario_to_json(sc);
  const Scenario back = io::scenario_from_json(j);
  CHECK(back.physical.weights.a == sc.physical.weights.a);
  CHECK(back.social.weights.a == sc.social.weights.a);
  CHECK(back.params.beta == sc.params.beta);
  CHECK(back.params.gamma == sc.params.gamma);
  CHECK(back.params.theta == sc.params.theta);
  CHECK(back.params.delta == sc.params.delta);
  CHECK(back.params.lambda == sc.params.lambda);
  CHECK(back.params.xi == sc.params.xi);
  CHECK(back.params.prejudice == sc.params.prejudice);
  CHECK(back.initial.a == sc.initial.a);
  CHECK(back.initial.d == sc.initial.d);
  CHECK(back.initial.x == sc.initial.x);
}

TEST_CASE("scenario file save/load and byte determinism") {
  const Scenario sc = generate_scenario(15, 4);
  const std::string path = temp_path("scenario.json");
  io::save_scenario(sc, path);
  const std::string bytes1 = io::read_text(path);
  io::save_scenario(sc, path);
  CHECK(io::read_text(path) == bytes1);
  const Scenario back = io::load_scenario(path);
  CHECK(back.params.beta == sc.params.beta);
  std::remove(path.c_str());
}

TEST_CASE("malformed scenario JSON raises structural errors") {
  CHECK_THROWS_AS(io::scenario_from_json(io::json{{"n", 2}}), StructuralError);
  io::json j = io::scenario_to_json(generate_scenario(1, 3));
  j["params"].erase("beta");
  CHECK_THROWS_AS(io::scenario_from_json(j), StructuralError);
  j = io::scenario_to_json(generate_scenario(1, 3));
  j["physical"]["weights"] = Vec{1.0, 0.0};  // wrong length
  CHECK_THROWS_AS(io::scenario_from_json(j), StructuralError);
}

TEST_CASE("io failures carry the path") {
  try {
    io::read_text("/nonexistent/sadnet/file.json");
    FAIL("expected IoError");
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find("/nonexistent/sadnet/file.json") != std::string::npos);
  }
  const std::string bad = temp_path("bad.json");
  io::write_text(bad, "{ not json");
  CHECK_THROWS_AS(io::load_json(bad), StructuralError);
  std::remove(bad.c_str());
}

TEST_CASE("trajectory CSV has (T+1)*n data rows") {
  const Scenario sc = generate_scenario(3, 5);
  const Trajectory traj = simulate(sc, 100);
  const std::string csv = io::trajectory_csv(traj);
  long rows = 0;
  for (char c : csv)
    if (c == '\n') ++rows;
  CHECK(rows == 101 * 5 + 1);  // header included
  CHECK(csv.rfind("t,j,s,a,d,x,u\n", 0) == 0);
}

TEST_CASE("csv exports are deterministic") {
  const Scenario sc = generate_scenario(5, 3);
  const Trajectory traj = simulate(sc, 20);
  CHECK(io::trajectory_csv(traj) == io::trajectory_csv(traj));
  CHECK(io::aggregate_csv(traj) == io::aggregate_csv(traj));
  CHECK(io::per_community_csv(traj).rfind("t,j,a,d,x\n", 0) == 0);
}

TEST_CASE("equilibrium report serializes its certificate data") {
  const EquilibriumReport rep = certify_adoption_free(sadnet::testing::scalar_scenario(0.1));
  const io::json j = io::equilibrium_report_to_json(rep);
  CHECK(j.at("kind") == "adoption_free");
  CHECK(j.at("certificate") == "globally_stable");
  CHECK(j.at("r0").at("max").get<double>() < 1.0);
  CHECK(j.contains("constants"));
  CHECK(j.contains("sigma"));
}

TEST_CASE("mpc config round-trips through JSON") {
  MpcConfig cfg;
  cfg.horizon = 7;
  cfg.weights = CostWeights::uniform(3, 2.0, 0.5, 0.05, 4.0);
  cfg.budget.c = 0.8;
  cfg.budget.upper = {0.5, 0.4, 0.3};
  cfg.solver.max_iter = 55;
  cfg.solver.gauss_newton = true;
  const io::json j = io::mpc_config_to_json(cfg);
  const MpcConfig back = io::mpc_config_from_json(j, MpcConfig{});
  CHECK(back.horizon == 7);
  CHECK(back.weights.q_a == cfg.weights.q_a);
  CHECK(back.weights.terminal_weight == 4.0);
  CHECK(back.budget.c == 0.8);
  CHECK(back.budget.upper == cfg.budget.upper);
  CHECK(back.solver.max_iter == 55);
  CHECK(back.solver.gauss_newton);
}

TEST_CASE("trajectory JSON round-trips and exports are byte-identical") {
  const Scenario sc = generate_scenario(6, 3);
  BudgetConstraint b = BudgetConstraint::for_scenario(sc, 0.2);
  const Trajectory traj =
      simulate(sc, 12, ControlPolicy::constant_policy(Vec{0.05, 0.05, 0.05}, b));
  const Trajectory back = io::trajectory_from_json(io::trajectory_to_json(traj));
  REQUIRE(back.states.size() == traj.states.size());
  for (size_t t = 0; t < traj.states.size(); ++t) {
    CHECK(back.states[t].a == traj.states[t].a);
    CHECK(back.states[t].d == traj.states[t].d);
    CHECK(back.states[t].x == traj.states[t].x);
  }
  CHECK(back.controls == traj.controls);

  const std::string p1 = temp_path("export1");
  const std::string p2 = temp_path("export2");
  io::export_report(traj, p1, io::ExportFormat::Json);
  io::export_report(traj, p2, io::ExportFormat::Json);
  CHECK(io::read_text(p1) == io::read_text(p2));
  io::export_report(traj, p1, io::ExportFormat::Csv);
  CHECK(io::read_text(p1).rfind("t,j,s,a,d,x,u\n", 0) == 0);
  std::remove(p1.c_str());
  std::remove(p2.c_str());
}

TEST_CASE("pareto csv lists the three policies") {
  ComparisonReport rep;
  rep.effectiveness_uncontrolled = 0.01;
  rep.effectiveness_ccp = 0.2;
  rep.effectiveness_mpc = 0.3;
  rep.cost_ccp = 5.0;
  rep.cost_mpc = 4.0;
  const std::string csv = io::pareto_csv(rep);
  CHECK(csv.find("uncontrolled,0,") != std::string::npos);
  CHECK(csv.find("ccp,5,") != std::string::npos);
  CHECK(csv.find("mpc,4,") != std::string::npos);
}
