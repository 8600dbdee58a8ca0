#pragma once

#include <optional>
#include <vector>

#include "sadnet/dynamics.hpp"
#include "sadnet/stability.hpp"

namespace sadnet {

struct CostWeights {
  Vec q_a;  // adoption reward
  Vec q_d;  // dissatisfaction penalty
  Vec l;    // effort penalty
  double terminal_weight = 10.0;

  static CostWeights uniform(int n, double qa = 1.0, double qd = 1.0, double l = 0.1,
                             double terminal = 10.0);
};

// Euclidean projection onto {u : 0 <= u <= upper, 1'u <= c} by bisection on
// the budget multiplier.
Vec project_budget_box(const Vec& v, const BudgetConstraint& budget);

// Sum over stages k of -q_a a^2 + q_d d^2 + l u^2, communities summed, plus
// terminal_weight * |state(N) - target|^2 when a target is given. Controls
// must cover every transition.
double trajectory_cost(const Trajectory& traj, const CostWeights& weights,
                       const SystemState* target = nullptr);

// Scenario whose uncontrolled dynamics coincide, step for step and bit for
// bit, with the controlled dynamics under constant input u (the nudge is
// folded into the prejudice anchor).
Scenario fold_constant_control(const Scenario& scenario, const Vec& u);

// Equilibrium of the dynamics under constant control u, via the damped
// fixed-point finder on the folded scenario.
EquilibriumReport controlled_equilibrium(const Scenario& scenario, const Vec& u_const,
                                         const BudgetConstraint& budget, double seed = 0.05);

struct SolverOptions {
  int max_iter = 200;
  double grad_tol = 1e-8;
  double shrink = 0.5;        // line-search backtracking factor
  bool warm_start = true;
  bool gauss_newton = false;  // refinement pass on the convexified model
};

struct MpcConfig {
  int horizon = 10;
  CostWeights weights;
  BudgetConstraint budget;
  SolverOptions solver;
  std::optional<SystemState> target;  // (a_c*, d_c*, x_c*)
};

struct ConstantPolicyResult {
  Vec u;
  EquilibriumReport report;
  double objective = 0.0;
  // True when the returned policy satisfies the stability constraint set
  // (supercritical lower reproduction number, per-node effort bound, sigma
  // feasibility). False means no candidate was certifiable and u is the best
  // found by objective alone.
  bool certified = false;
};

// Multi-start projected pattern search for the constant policy. Candidates
// are ranked certified-first, then by objective.
ConstantPolicyResult solve_constant_policy(const Scenario& scenario, const CostWeights& weights,
                                           const BudgetConstraint& budget, double eta);

// Objective value of a control sequence: forward rollout from state plus the
// stage and terminal costs of config.
double mpc_objective(const SystemState& state, const Scenario& scenario, const MpcConfig& config,
                     const std::vector<Vec>& controls);

// Exact gradient of mpc_objective in the controls, by reverse-sweep adjoint
// recursion through the rollout.
std::vector<Vec> mpc_objective_gradient(const SystemState& state, const Scenario& scenario,
                                        const MpcConfig& config,
                                        const std::vector<Vec>& controls);

struct MpcSolution {
  std::vector<Vec> controls;  // horizon entries, all feasible
  Trajectory predicted;
  double cost = 0.0;
  int iterations = 0;
  bool stalled = false;
  std::vector<double> cost_history;  // accepted iterate costs, nonincreasing
};

// Projected gradient descent with adjoint gradients and Armijo backtracking
// on the N-stage problem; optional Gauss-Newton refinement. warm, when
// given, seeds the control sequence.
MpcSolution solve_mpc_step(const SystemState& state, const Scenario& scenario,
                           const MpcConfig& config,
                           const std::vector<Vec>* warm = nullptr);

// Receding-horizon loop: solve, apply the first input, shift the solution
// one stage for the next warm start.
Trajectory run_mpc(const Scenario& scenario, const MpcConfig& config, long total_steps);

}  // namespace sadnet
