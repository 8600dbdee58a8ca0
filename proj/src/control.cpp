#include "sadnet/control.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "sadnet/errors.hpp"
#include "sadnet/rng.hpp"

namespace sadnet {

CostWeights CostWeights::uniform(int n, double qa, double qd, double l, double terminal) {
  CostWeights w;
  w.q_a.assign(n, qa);
  w.q_d.assign(n, qd);
  w.l.assign(n, l);
  w.terminal_weight = terminal;
  return w;
}

Vec project_budget_box(const Vec& v, const BudgetConstraint& budget) {
  const int n = static_cast<int>(v.size());
  if (static_cast<int>(budget.upper.size()) != n)
    throw StructuralError("project_budget_box: box bound length mismatch");
  if (budget.c < 0.0)
    throw PreconditionError("project_budget_box: negative budget, feasible set empty");
  for (double z : v)
    if (!std::isfinite(z)) throw PreconditionError("project_budget_box: non-finite input");

  const auto clamped = [&](double tau, Vec& out) {
    double sum = 0.0;
    for (int j = 0; j < n; ++j) {
      out[j] = std::clamp(v[j] - tau, 0.0, budget.upper[j]);
      sum += out[j];
    }
    return sum;
  };

  Vec u(n);
  if (clamped(0.0, u) <= budget.c) return u;  // box projection already inside the budget

  // 1'u(tau) is continuous and nonincreasing in tau; bisect to the budget.
  double lo = 0.0;
  double hi = 0.0;
  for (double z : v) hi = std::max(hi, z);
  Vec trial(n);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double sum = clamped(mid, trial);
    if (sum > budget.c) {
      lo = mid;
    } else {
      hi = mid;
      u = trial;
      if (budget.c - sum <= 1e-12) break;
    }
    if (hi - lo <= 1e-16 * (1.0 + hi)) break;
  }
  clamped(hi, u);
  return u;
}

double trajectory_cost(const Trajectory& traj, const CostWeights& w, const SystemState* target) {
  if (traj.states.empty()) throw PreconditionError("trajectory_cost: empty trajectory");
  if (traj.controls.size() + 1 != traj.states.size())
    throw PreconditionError("trajectory_cost: controls must cover every transition");
  const int n = traj.states.front().n();
  if (static_cast<int>(w.q_a.size()) != n || static_cast<int>(w.q_d.size()) != n ||
      static_cast<int>(w.l.size()) != n)
    throw StructuralError("trajectory_cost: weight length mismatch");

  double cost = 0.0;
  for (size_t k = 0; k < traj.controls.size(); ++k) {
    const SystemState& z = traj.states[k];
    const Vec& u = traj.controls[k];
    for (int j = 0; j < n; ++j)
      cost += -w.q_a[j] * z.a[j] * z.a[j] + w.q_d[j] * z.d[j] * z.d[j] + w.l[j] * u[j] * u[j];
  }
  if (target != nullptr) {
    const SystemState& z = traj.states.back();
    double dist2 = 0.0;
    for (int j = 0; j < n; ++j) {
      const double ea = z.a[j] - target->a[j];
      const double ed = z.d[j] - target->d[j];
      const double ex = z.x[j] - target->x[j];
      dist2 += ea * ea + ed * ed + ex * ex;
    }
    cost += w.terminal_weight * dist2;
  }
  return cost;
}

Scenario fold_constant_control(const Scenario& sc, const Vec& u) {
  if (static_cast<int>(u.size()) != sc.n())
    throw StructuralError("fold_constant_control: control length mismatch");
  Scenario folded = sc;
  for (int j = 0; j < sc.n(); ++j) {
    if (u[j] < -1e-12 || sc.params.prejudice[j] + u[j] > 1.0 + 1e-12)
      throw PreconditionError("fold_constant_control: u outside [0, 1 - x(0)]");
    folded.params.prejudice[j] = sc.params.prejudice[j] + u[j];
  }
  return folded;
}

EquilibriumReport controlled_equilibrium(const Scenario& sc, const Vec& u_const,
                                         const BudgetConstraint& budget, double seed) {
  if (!budget.admits(u_const))
    throw PreconditionError("controlled_equilibrium: control violates its budget constraint");
  return find_diffused_equilibrium(fold_constant_control(sc, u_const), seed);
}

namespace {

struct Rollout {
  std::vector<SystemState> z;  // N+1 states
  std::vector<Vec> wa;         // W a_k, one per stage
};

Rollout roll_forward(const SystemState& state, const Scenario& sc, const std::vector<Vec>& u) {
  const long N = static_cast<long>(u.size());
  Rollout r;
  r.z.reserve(N + 1);
  r.wa.resize(N);
  r.z.push_back(state);
  for (long k = 0; k < N; ++k) {
    r.wa[k] = matvec(sc.physical.weights, r.z[k].a);
    r.z.push_back(step(r.z[k], sc, u[k].data()));
  }
  return r;
}

double rollout_cost(const Rollout& r, const std::vector<Vec>& u, const CostWeights& w,
                    const SystemState* target) {
  Trajectory t;
  t.states = r.z;
  t.controls = u;
  return trajectory_cost(t, w, target);
}

// Cotangent vectors injected at each state of the rollout (index k holds the
// cotangent of z_k; index N the terminal one).
struct Cotangents {
  std::vector<Vec> a, d, x;
  Cotangents(long N, int n)
      : a(N + 1, Vec(n, 0.0)), d(N + 1, Vec(n, 0.0)), x(N + 1, Vec(n, 0.0)) {}
};

// Reverse sweep: returns per-stage pullbacks (dF/du)' p_{k+1}; the direct
// stage-cost u terms are the caller's.
std::vector<Vec> pullback(const Scenario& sc, const Rollout& r, const Cotangents& cot) {
  const int n = sc.n();
  const long N = static_cast<long>(r.wa.size());
  const ModelParams& p = sc.params;
  const Vec alpha = p.alpha();

  Vec pa = cot.a[N], pd = cot.d[N], px = cot.x[N];
  std::vector<Vec> ugrad(N, Vec(n, 0.0));
  Vec t1(n), t2(n), t3(n), npa(n), npd(n), npx(n);
  for (long k = N - 1; k >= 0; --k) {
    for (int j = 0; j < n; ++j) ugrad[k][j] = alpha[j] * px[j];

    const SystemState& zk = r.z[k];
    const Vec& wa = r.wa[k];
    for (int j = 0; j < n; ++j) {
      const double s = 1.0 - zk.a[j] - zk.d[j];
      t1[j] = p.beta[j] * zk.x[j] * s * pa[j];
      t2[j] = p.xi[j] * px[j];
      t3[j] = p.lambda[j] * px[j];
    }
    const Vec w1 = matvec_transposed(sc.physical.weights, t1);
    const Vec w2 = matvec_transposed(sc.physical.weights, t2);
    const Vec w3 = matvec_transposed(sc.social.weights, t3);
    for (int i = 0; i < n; ++i) {
      const double s = 1.0 - zk.a[i] - zk.d[i];
      const double bxw = p.beta[i] * zk.x[i] * wa[i];
      npa[i] = pa[i] * (1.0 - p.delta[i] - bxw) +
               pd[i] * (p.delta[i] - p.theta[i] * (1.0 - zk.x[i])) + w1[i] + w2[i] +
               cot.a[k][i];
      npd[i] = -bxw * pa[i] +
               pd[i] * (1.0 - p.gamma[i] * zk.x[i] - p.theta[i] * (1.0 - zk.x[i])) +
               cot.d[k][i];
      npx[i] = p.beta[i] * s * wa[i] * pa[i] +
               pd[i] * (-p.gamma[i] * zk.d[i] - p.theta[i] * s) + w3[i] + cot.x[k][i];
    }
    pa = npa;
    pd = npd;
    px = npx;
  }
  return ugrad;
}

std::vector<Vec> objective_gradient(const Scenario& sc, const Rollout& r,
                                    const std::vector<Vec>& u, const CostWeights& w,
                                    const SystemState* target) {
  const int n = sc.n();
  const long N = static_cast<long>(u.size());
  Cotangents cot(N, n);
  for (long k = 0; k < N; ++k) {
    for (int j = 0; j < n; ++j) {
      cot.a[k][j] = -2.0 * w.q_a[j] * r.z[k].a[j];
      cot.d[k][j] = 2.0 * w.q_d[j] * r.z[k].d[j];
    }
  }
  if (target != nullptr) {
    for (int j = 0; j < n; ++j) {
      cot.a[N][j] = 2.0 * w.terminal_weight * (r.z[N].a[j] - target->a[j]);
      cot.d[N][j] = 2.0 * w.terminal_weight * (r.z[N].d[j] - target->d[j]);
      cot.x[N][j] = 2.0 * w.terminal_weight * (r.z[N].x[j] - target->x[j]);
    }
  }
  std::vector<Vec> g = pullback(sc, r, cot);
  for (long k = 0; k < N; ++k)
    for (int j = 0; j < n; ++j) g[k][j] += 2.0 * w.l[j] * u[k][j];
  return g;
}

// Forward directional derivative of the rollout along du; keeps the per-stage
// d tangents and the terminal state tangent for the Gauss-Newton product.
struct Tangent {
  std::vector<Vec> d_stage;  // delta d_k, k = 0..N-1
  Vec a_end, d_end, x_end;
};

Tangent jvp(const Scenario& sc, const Rollout& r, const std::vector<Vec>& du) {
  const int n = sc.n();
  const long N = static_cast<long>(du.size());
  const ModelParams& p = sc.params;
  const Vec alpha = p.alpha();

  Tangent out;
  out.d_stage.assign(N, Vec(n, 0.0));
  Vec da(n, 0.0), dd(n, 0.0), dx(n, 0.0), nda(n), ndd(n), ndx(n), dwa(n), dwx(n);
  for (long k = 0; k < N; ++k) {
    out.d_stage[k] = dd;
    matvec(sc.physical.weights, da.data(), dwa.data());
    matvec(sc.social.weights, dx.data(), dwx.data());
    const SystemState& zk = r.z[k];
    const Vec& wa = r.wa[k];
    for (int j = 0; j < n; ++j) {
      const double s = 1.0 - zk.a[j] - zk.d[j];
      const double ds = -da[j] - dd[j];
      nda[j] = da[j] * (1.0 - p.delta[j]) +
               p.beta[j] * (dx[j] * s * wa[j] + zk.x[j] * ds * wa[j] + zk.x[j] * s * dwa[j]);
      ndd[j] = dd[j] * (1.0 - p.gamma[j] * zk.x[j]) - p.gamma[j] * dx[j] * zk.d[j] +
               p.delta[j] * da[j] + p.theta[j] * (-dx[j] * s + (1.0 - zk.x[j]) * ds);
      ndx[j] = alpha[j] * du[k][j] + p.lambda[j] * dwx[j] + p.xi[j] * dwa[j];
    }
    da = nda;
    dd = ndd;
    dx = ndx;
  }
  out.a_end = da;
  out.d_end = dd;
  out.x_end = dx;
  return out;
}

// Product of the convexified (Gauss-Newton) Hessian with v: positive
// curvature from the dissatisfaction, effort and terminal terms; the
// indefinite adoption reward contributes only through the gradient.
std::vector<Vec> hessian_apply(const Scenario& sc, const Rollout& r, const CostWeights& w,
                               const SystemState* target, const std::vector<Vec>& v) {
  const int n = sc.n();
  const long N = static_cast<long>(v.size());
  const Tangent tan = jvp(sc, r, v);
  Cotangents cot(N, n);
  for (long k = 0; k < N; ++k)
    for (int j = 0; j < n; ++j) cot.d[k][j] = 2.0 * w.q_d[j] * tan.d_stage[k][j];
  if (target != nullptr) {
    for (int j = 0; j < n; ++j) {
      cot.a[N][j] = 2.0 * w.terminal_weight * tan.a_end[j];
      cot.d[N][j] = 2.0 * w.terminal_weight * tan.d_end[j];
      cot.x[N][j] = 2.0 * w.terminal_weight * tan.x_end[j];
    }
  }
  std::vector<Vec> hv = pullback(sc, r, cot);
  for (long k = 0; k < N; ++k)
    for (int j = 0; j < n; ++j) hv[k][j] += 2.0 * w.l[j] * v[k][j];
  return hv;
}

double dot_seq(const std::vector<Vec>& a, const std::vector<Vec>& b) {
  double s = 0.0;
  for (size_t k = 0; k < a.size(); ++k)
    for (size_t j = 0; j < a[k].size(); ++j) s += a[k][j] * b[k][j];
  return s;
}

// One pass of projected descent on the quadratic model around u; the result
// is only adopted when the true objective improves.
void gauss_newton_refine(const Scenario& sc, const MpcConfig& cfg, const SystemState* target,
                         std::vector<Vec>& u, Rollout& r, double& J,
                         std::vector<double>& history, bool& stalled,
                         const SystemState& state) {
  const int n = sc.n();
  const long N = static_cast<long>(u.size());
  const std::vector<Vec> grad = objective_gradient(sc, r, u, cfg.weights, target);

  std::vector<Vec> dir(N, Vec(n, 0.0));
  std::vector<Vec> hdir(N, Vec(n, 0.0));
  double model = 0.0;
  double t = 1.0;
  for (int inner = 0; inner < 30 && t > 1e-12; ++inner) {
    std::vector<Vec> trial(N, Vec(n, 0.0));
    double move2 = 0.0;
    for (long k = 0; k < N; ++k) {
      Vec shifted(n);
      for (int j = 0; j < n; ++j) shifted[j] = u[k][j] + dir[k][j] - t * (grad[k][j] + hdir[k][j]);
      const Vec proj = project_budget_box(shifted, cfg.budget);
      for (int j = 0; j < n; ++j) {
        trial[k][j] = proj[j] - u[k][j];
        const double dm = trial[k][j] - dir[k][j];
        move2 += dm * dm;
      }
    }
    if (move2 == 0.0) break;
    const std::vector<Vec> htrial = hessian_apply(sc, r, cfg.weights, target, trial);
    const double mtrial = dot_seq(grad, trial) + 0.5 * dot_seq(trial, htrial);
    if (mtrial <= model - 1e-4 / t * move2) {
      dir = trial;
      hdir = htrial;
      model = mtrial;
      t = std::min(t * 1.5, 1e6);
    } else {
      t *= 0.5;
    }
  }

  for (double scale = 1.0; scale > 0.05; scale *= 0.5) {
    std::vector<Vec> cand(N, Vec(n, 0.0));
    for (long k = 0; k < N; ++k)
      for (int j = 0; j < n; ++j) cand[k][j] = u[k][j] + scale * dir[k][j];
    Rollout rc = roll_forward(state, sc, cand);
    const double Jc = rollout_cost(rc, cand, cfg.weights, target);
    if (Jc < J) {
      u = std::move(cand);
      r = std::move(rc);
      J = Jc;
      history.push_back(J);
      stalled = false;
      break;
    }
  }
}

}  // namespace

namespace {

void check_stage_shapes(const SystemState& state, const Scenario& sc,
                        const std::vector<Vec>& controls) {
  if (state.n() != sc.n())
    throw StructuralError("state and scenario community counts differ");
  for (const Vec& u : controls)
    if (static_cast<int>(u.size()) != sc.n())
      throw StructuralError("control stage length does not match the scenario");
}

}  // namespace

double mpc_objective(const SystemState& state, const Scenario& sc, const MpcConfig& cfg,
                     const std::vector<Vec>& controls) {
  check_stage_shapes(state, sc, controls);
  const Rollout r = roll_forward(state, sc, controls);
  return rollout_cost(r, controls, cfg.weights, cfg.target ? &cfg.target.value() : nullptr);
}

std::vector<Vec> mpc_objective_gradient(const SystemState& state, const Scenario& sc,
                                        const MpcConfig& cfg,
                                        const std::vector<Vec>& controls) {
  check_stage_shapes(state, sc, controls);
  const Rollout r = roll_forward(state, sc, controls);
  return objective_gradient(sc, r, controls, cfg.weights,
                            cfg.target ? &cfg.target.value() : nullptr);
}

MpcSolution solve_mpc_step(const SystemState& state, const Scenario& sc, const MpcConfig& cfg,
                           const std::vector<Vec>* warm) {
  const int n = sc.n();
  if (state.n() != n) throw StructuralError("solve_mpc_step: state size mismatch");
  if (cfg.horizon < 1) throw PreconditionError("solve_mpc_step: horizon must be >= 1");
  if (!cfg.target.has_value())
    throw PreconditionError("solve_mpc_step: config.target must be set");
  if (static_cast<int>(cfg.budget.upper.size()) != n)
    throw StructuralError("solve_mpc_step: budget box length mismatch");
  const SystemState* target = &cfg.target.value();
  const long N = cfg.horizon;

  std::vector<Vec> u(N, Vec(n, 0.0));
  if (warm != nullptr && static_cast<long>(warm->size()) == N) u = *warm;
  for (auto& uk : u) uk = project_budget_box(uk, cfg.budget);

  Rollout r = roll_forward(state, sc, u);
  double J = rollout_cost(r, u, cfg.weights, target);

  MpcSolution sol;
  sol.cost_history.push_back(J);
  double step_len = 1.0;
  int iters = 0;
  for (; iters < cfg.solver.max_iter; ++iters) {
    const std::vector<Vec> grad = objective_gradient(sc, r, u, cfg.weights, target);

    double residual = 0.0;
    for (long k = 0; k < N; ++k) {
      Vec shifted(n);
      for (int j = 0; j < n; ++j) shifted[j] = u[k][j] - grad[k][j];
      residual = std::max(residual, inf_diff(project_budget_box(shifted, cfg.budget), u[k]));
    }
    if (residual <= cfg.solver.grad_tol) break;

    bool accepted = false;
    for (double alpha = step_len; alpha >= 1e-14; alpha *= cfg.solver.shrink) {
      std::vector<Vec> trial(N, Vec(n, 0.0));
      double move2 = 0.0;
      for (long k = 0; k < N; ++k) {
        Vec shifted(n);
        for (int j = 0; j < n; ++j) shifted[j] = u[k][j] - alpha * grad[k][j];
        trial[k] = project_budget_box(shifted, cfg.budget);
        for (int j = 0; j < n; ++j) {
          const double dm = trial[k][j] - u[k][j];
          move2 += dm * dm;
        }
      }
      if (move2 == 0.0) continue;
      Rollout rt = roll_forward(state, sc, trial);
      const double Jt = rollout_cost(rt, trial, cfg.weights, target);
      if (Jt <= J - 1e-4 / alpha * move2) {
        u = std::move(trial);
        r = std::move(rt);
        J = Jt;
        sol.cost_history.push_back(J);
        step_len = std::min(alpha * 2.0, 1e6);
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      sol.stalled = true;
      break;
    }
  }

  if (cfg.solver.gauss_newton)
    gauss_newton_refine(sc, cfg, target, u, r, J, sol.cost_history, sol.stalled, state);

  sol.iterations = iters;
  sol.cost = J;
  sol.controls = u;
  sol.predicted.states = std::move(r.z);
  sol.predicted.controls = std::move(u);
  return sol;
}

Trajectory run_mpc(const Scenario& sc, const MpcConfig& cfg, long total_steps) {
  if (total_steps < 1) throw PreconditionError("run_mpc: total_steps must be >= 1");
  Trajectory traj;
  traj.states.push_back(sc.initial);
  std::vector<Vec> warm;
  bool have_warm = false;
  for (long t = 0; t < total_steps; ++t) {
    const MpcSolution sol =
        solve_mpc_step(traj.states.back(), sc, cfg,
                       cfg.solver.warm_start && have_warm ? &warm : nullptr);
    const Vec& u0 = sol.controls.front();
    traj.states.push_back(step(traj.states.back(), sc, u0.data()));
    traj.controls.push_back(u0);
    traj.solver_log.push_back({t, sol.iterations, sol.cost, sol.stalled});
    if (cfg.solver.warm_start) {
      warm.assign(sol.controls.begin() + 1, sol.controls.end());
      warm.push_back(sol.controls.back());
      have_warm = true;
    }
  }
  return traj;
}

namespace {

struct CandidateEval {
  Vec u;
  bool valid = false;
  bool certified = false;
  double objective = std::numeric_limits<double>::infinity();
  EquilibriumReport report;
};

CandidateEval evaluate_constant(const Scenario& sc, const Vec& u, const CostWeights& w,
                                const BudgetConstraint& budget, double eta) {
  CandidateEval ev;
  ev.u = u;
  Scenario folded;
  try {
    folded = fold_constant_control(sc, u);
    FixedPointOptions opts;
    opts.max_iter = 200000;
    ev.report = find_diffused_equilibrium(folded, 0.05, opts);
  } catch (const NonconvergenceError&) {
    return ev;
  }
  (void)budget;
  ev.valid = true;
  double obj = 0.0;
  const SystemState& z = ev.report.point;
  for (size_t j = 0; j < u.size(); ++j)
    obj += -w.q_a[j] * z.a[j] * z.a[j] + w.q_d[j] * z.d[j] * z.d[j] + w.l[j] * u[j] * u[j];
  ev.objective = obj;
  if (ev.report.kind == EquilibriumKind::AdoptionDiffused && ev.report.r0.min > 1.0 + 1e-12) {
    const EquilibriumReport certified = certify_diffused(ev.report, folded, eta);
    ev.report = certified;
    ev.certified = certified.certificate == Certificate::LocalStable;
  }
  return ev;
}

// Certified candidates beat uncertified ones; ties break on the objective.
bool better(const CandidateEval& a, const CandidateEval& b) {
  if (a.valid != b.valid) return a.valid;
  if (a.certified != b.certified) return a.certified;
  return a.objective < b.objective;
}

}  // namespace

ConstantPolicyResult solve_constant_policy(const Scenario& sc, const CostWeights& w,
                                           const BudgetConstraint& budget, double eta) {
  const int n = sc.n();
  if (budget.c < 0.0) throw PreconditionError("solve_constant_policy: negative budget");
  if (static_cast<int>(budget.upper.size()) != n)
    throw StructuralError("solve_constant_policy: budget box length mismatch");

  double scale = 0.0;
  for (double z : budget.upper) scale = std::max(scale, z);
  scale = std::min(scale, budget.c > 0.0 ? budget.c : 0.0);

  std::vector<Vec> starts;
  starts.emplace_back(n, 0.0);
  starts.push_back(budget.upper);  // budget-saturating point after projection
  Xoshiro256pp rng(0x5eedc0defacadeULL);
  for (int s = 0; s < 8; ++s) {
    Vec v(n);
    for (int j = 0; j < n; ++j) v[j] = rng.uniform(0.0, budget.upper[j]);
    starts.push_back(std::move(v));
  }

  CandidateEval best;
  for (const Vec& start : starts) {
    Vec u = project_budget_box(start, budget);
    CandidateEval local = evaluate_constant(sc, u, w, budget, eta);
    int evals = 1;
    const double h0 = scale > 0.0 ? 0.25 * scale : 0.0;
    for (double h = h0; h >= 1e-5 && evals < 600;) {
      bool improved = false;
      for (int j = 0; j < n && evals < 600; ++j) {
        for (const double sign : {1.0, -1.0}) {
          Vec cand = u;
          cand[j] += sign * h;
          cand = project_budget_box(cand, budget);
          if (inf_diff(cand, u) == 0.0) continue;
          CandidateEval ev = evaluate_constant(sc, cand, w, budget, eta);
          ++evals;
          if (better(ev, local)) {
            u = ev.u;
            local = ev;
            improved = true;
          }
        }
      }
      if (!improved) h *= 0.5;
    }
    if (better(local, best)) best = local;
  }

  if (!best.valid)
    throw NonconvergenceError(
        "solve_constant_policy: no candidate equilibrium computation converged", 0.0);

  ConstantPolicyResult res;
  res.u = best.u;
  res.report = best.report;
  res.objective = best.objective;
  res.certified = best.certified;
  return res;
}

}  // namespace sadnet
