#pragma once

#include <string>

#include <json.hpp>

#include "sadnet/experiment.hpp"

namespace sadnet::io {

using json = nlohmann::json;

json scenario_to_json(const Scenario& sc);
// Applies the within-tolerance row renormalization on load.
Scenario scenario_from_json(const json& j);

Scenario load_scenario(const std::string& path);
void save_scenario(const Scenario& sc, const std::string& path);

json equilibrium_report_to_json(const EquilibriumReport& rep);
json mpc_config_to_json(const MpcConfig& cfg);
// Missing fields keep the defaults passed in.
MpcConfig mpc_config_from_json(const json& j, MpcConfig defaults);

// trajectory_refs, when given, maps run name -> exported file path.
json comparison_report_to_json(const ComparisonReport& rep, const json& trajectory_refs = {});

// Columns t, j, s, a, d, x, u (u is 0 for uncontrolled transitions and for
// the final row of each community).
std::string trajectory_csv(const Trajectory& traj);
// Columns t, s_mean, a_mean, d_mean.
std::string aggregate_csv(const Trajectory& traj);
// Columns t, j, a, d, x.
std::string per_community_csv(const Trajectory& traj);
// Columns t, j, u.
std::string controls_csv(const Trajectory& traj);
// Columns policy, cost, effectiveness.
std::string pareto_csv(const ComparisonReport& rep);

json trajectory_to_json(const Trajectory& traj);
Trajectory trajectory_from_json(const json& j);

enum class ExportFormat { Csv, Json };

// Byte-deterministic exports. CSV uses the schemas above (full trajectory
// columns for runs, the policy/cost/effectiveness table for comparisons).
void export_report(const Trajectory& traj, const std::string& path, ExportFormat format);
void export_report(const ComparisonReport& rep, const std::string& path, ExportFormat format);

void write_text(const std::string& path, const std::string& content);
std::string read_text(const std::string& path);
json load_json(const std::string& path);

}  // namespace sadnet::io
