#include "sadnet/experiment.hpp"

#include "sadnet/errors.hpp"

namespace sadnet {

namespace {

// Ring edge j -> (j+1) mod n with weight 1; every other slot (self-loops
// included) gets an extra edge with probability 0.3 and uniform weight. Rows
// are then divided by their sums, which are always >= 1.
NetworkLayer random_layer(Xoshiro256pp& rng, int n) {
  NetworkLayer layer(n);
  for (int j = 0; j < n; ++j) layer.weights(j, (j + 1) % n) = 1.0;
  for (int j = 0; j < n; ++j) {
    const int ring = (j + 1) % n;
    for (int k = 0; k < n; ++k) {
      if (k == ring) continue;
      if (rng.bernoulli(0.3)) layer.weights(j, k) = rng.uniform();
    }
  }
  for (int j = 0; j < n; ++j) {
    double sum = 0.0;
    for (int k = 0; k < n; ++k) sum += layer.weights(j, k);
    for (int k = 0; k < n; ++k) layer.weights(j, k) /= sum;
  }
  return layer;
}

}  // namespace

Scenario generate_scenario(uint64_t seed, int n) {
  if (n < 1) throw PreconditionError("generate_scenario: n must be positive");
  Xoshiro256pp rng(seed);

  Scenario sc;
  sc.physical = random_layer(rng, n);
  sc.social = random_layer(rng, n);

  ModelParams& p = sc.params;
  p.beta.resize(n);
  p.gamma.resize(n);
  p.theta.resize(n);
  p.delta.resize(n);
  p.lambda.resize(n);
  p.xi.resize(n);
  p.prejudice.resize(n);

  for (int j = 0; j < n; ++j) p.beta[j] = rng.uniform(0.2, 0.9);
  for (int j = 0; j < n; ++j) p.delta[j] = rng.uniform(0.05, 0.3);
  for (int j = 0; j < n; ++j) {
    double g = rng.uniform();
    double h = rng.uniform();
    while (g + h == 0.0) {
      g = rng.uniform();
      h = rng.uniform();
    }
    const double sum = rng.uniform(0.1, 0.9);
    const double scale = sum / (g + h);
    p.gamma[j] = g * scale;
    p.theta[j] = h * scale;
  }
  for (int j = 0; j < n; ++j) {
    do {
      p.lambda[j] = rng.uniform(0.3, 0.6);
      p.xi[j] = rng.uniform(0.1, 0.3);
    } while (1.0 - p.lambda[j] - p.xi[j] < 0.0);
  }
  for (int j = 0; j < n; ++j) p.prejudice[j] = rng.uniform(0.3, 0.8);

  sc.initial.a.assign(n, 0.02);
  sc.initial.d.assign(n, 0.0);
  sc.initial.x = p.prejudice;
  sc.initial.time = 0;
  return sc;
}

double effectiveness(const Trajectory& traj) {
  const auto rows = aggregate_adoption(traj);
  double sum = 0.0;
  for (const auto& row : rows) sum += row.a;
  return sum / static_cast<double>(rows.size());
}

double control_cost(const Trajectory& traj) {
  double sum = 0.0;
  for (const Vec& u : traj.controls)
    for (double z : u) sum += z;
  return sum;
}

ComparisonReport run_comparison(uint64_t seed, int n, long total_steps, const MpcConfig& base,
                                std::optional<double> eta) {
  if (total_steps < 1) throw PreconditionError("run_comparison: total_steps must be positive");
  const Scenario sc = generate_scenario(seed, n);

  MpcConfig cfg = base;
  if (cfg.budget.upper.empty()) cfg.budget = BudgetConstraint::for_scenario(sc, cfg.budget.c);
  if (cfg.weights.q_a.empty()) cfg.weights = CostWeights::uniform(n);
  const double eta_val = eta.has_value() ? *eta : default_eta(sc.params);

  ComparisonReport rep;
  rep.seed = seed;
  rep.n = n;
  rep.total_steps = total_steps;

  rep.uncontrolled = simulate(sc, total_steps);

  const ConstantPolicyResult ccp = solve_constant_policy(sc, cfg.weights, cfg.budget, eta_val);
  rep.ccp_u = ccp.u;
  rep.ccp_objective = ccp.objective;
  rep.ccp_certified = ccp.certified;
  rep.ccp = simulate(sc, total_steps, ControlPolicy::constant_policy(ccp.u, cfg.budget));

  cfg.target = ccp.report.point;
  rep.mpc = run_mpc(sc, cfg, total_steps);
  rep.config = cfg;

  rep.effectiveness_uncontrolled = effectiveness(rep.uncontrolled);
  rep.effectiveness_ccp = effectiveness(rep.ccp);
  rep.effectiveness_mpc = effectiveness(rep.mpc);
  rep.cost_ccp = control_cost(rep.ccp);
  rep.cost_mpc = control_cost(rep.mpc);
  return rep;
}

}  // namespace sadnet
