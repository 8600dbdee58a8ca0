#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sadnet/model.hpp"
#include "sadnet/policy.hpp"

namespace sadnet {

// Per-step record of an embedded solver run (receding-horizon loop).
struct SolveInfo {
  long t = 0;
  int iterations = 0;
  double cost = 0.0;
  bool stalled = false;
};

struct Trajectory {
  std::vector<SystemState> states;
  // controls[t] produced states[t+1]; empty for uncontrolled runs.
  std::vector<Vec> controls;
  std::vector<SolveInfo> solver_log;

  long horizon() const { return static_cast<long>(states.size()) - 1; }
};

struct AggregateRow {
  double s = 0.0;
  double a = 0.0;
  double d = 0.0;
};

// One application of the coupled update: adoption/dissatisfaction flow on
// the physical layer, anchored opinion averaging on the social layer with
// adoption feedback, optional opinion nudge u added to the anchor.
SystemState step(const SystemState& state, const Scenario& scenario,
                 const double* u = nullptr);
SystemState step(const SystemState& state, const Scenario& scenario, const Vec& u);

// horizon+1 states from repeated stepping; controls recorded when a policy
// is given. Policy entries are checked against their budget at every step.
Trajectory simulate(const Scenario& scenario, long horizon,
                    const ControlPolicy& policy = ControlPolicy::none());

// Community means of (s, a, d) per step.
std::vector<AggregateRow> aggregate_adoption(const Trajectory& traj);

}  // namespace sadnet
