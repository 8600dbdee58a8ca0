#include "sadnet/dynamics.hpp"

#include <cassert>
#include <cmath>
#include <sstream>

#include "sadnet/errors.hpp"
#include "sadnet/kernels.hpp"

namespace sadnet {

BudgetConstraint BudgetConstraint::for_scenario(const Scenario& sc, double budget) {
  BudgetConstraint b;
  b.c = budget;
  b.upper.resize(sc.n());
  for (int j = 0; j < sc.n(); ++j) b.upper[j] = 1.0 - sc.params.prejudice[j];
  return b;
}

bool BudgetConstraint::admits(const Vec& u, double tol) const {
  if (u.size() != upper.size()) return false;
  double sum = 0.0;
  for (size_t j = 0; j < u.size(); ++j) {
    if (u[j] < -tol || u[j] > upper[j] + tol) return false;
    sum += u[j];
  }
  return sum <= c + tol;
}

ControlPolicy ControlPolicy::constant_policy(Vec u, BudgetConstraint b) {
  ControlPolicy p;
  p.kind = Kind::Constant;
  p.constant = std::move(u);
  p.budget = std::move(b);
  return p;
}

ControlPolicy ControlPolicy::sequence_policy(std::vector<Vec> us, BudgetConstraint b) {
  ControlPolicy p;
  p.kind = Kind::Sequence;
  p.sequence = std::move(us);
  p.budget = std::move(b);
  return p;
}

const Vec* ControlPolicy::at(long t) const {
  switch (kind) {
    case Kind::None:
      return nullptr;
    case Kind::Constant:
      return &constant;
    case Kind::Sequence:
      return t < static_cast<long>(sequence.size()) ? &sequence[t] : nullptr;
  }
  return nullptr;
}

namespace {

void check_control(const Vec& u, const Scenario& sc) {
  if (static_cast<int>(u.size()) != sc.n())
    throw StructuralError("control vector length does not match scenario");
  for (int j = 0; j < sc.n(); ++j) {
    if (u[j] < -1e-12 || sc.params.prejudice[j] + u[j] > 1.0 + 1e-12) {
      std::ostringstream os;
      os << "control u[" << j << "] = " << u[j] << " violates 0 <= u <= 1 - x(0)";
      throw PreconditionError(os.str());
    }
  }
}

#ifndef NDEBUG
bool in_unit_box(const Vec& v, double slack) {
  for (double x : v)
    if (x < -slack || x > 1.0 + slack) return false;
  return true;
}
#endif

}  // namespace

SystemState step(const SystemState& state, const Scenario& sc, const double* u) {
  const int n = sc.n();
  const ModelParams& p = sc.params;
  const Vec alpha = p.alpha();

  Vec wa(n), wx(n);
  const auto& ops = kernels::active_ops();
  ops.matvec(sc.physical.weights.a.data(), state.a.data(), wa.data(), n);
  ops.matvec(sc.social.weights.a.data(), state.x.data(), wx.data(), n);

  SystemState next;
  next.a.resize(n);
  next.d.resize(n);
  next.x.resize(n);
  next.time = state.time + 1;

  kernels::StepArgs args;
  args.n = n;
  args.a = state.a.data();
  args.d = state.d.data();
  args.x = state.x.data();
  args.wa = wa.data();
  args.wx = wx.data();
  args.beta = p.beta.data();
  args.gamma = p.gamma.data();
  args.theta = p.theta.data();
  args.delta = p.delta.data();
  args.alpha = alpha.data();
  args.lambda = p.lambda.data();
  args.xi = p.xi.data();
  args.prejudice = p.prejudice.data();
  args.u = u;
  args.out_a = next.a.data();
  args.out_d = next.d.data();
  args.out_x = next.x.data();
  ops.step(args);

  // Simplex invariance holds for valid inputs; never clamp, assert.
  assert(in_unit_box(next.a, 1e-9) && in_unit_box(next.d, 1e-9) &&
         in_unit_box(next.x, 1e-9));
  return next;
}

SystemState step(const SystemState& state, const Scenario& sc, const Vec& u) {
  check_control(u, sc);
  return step(state, sc, u.data());
}

Trajectory simulate(const Scenario& sc, long horizon, const ControlPolicy& policy) {
  if (horizon < 0) throw PreconditionError("simulate: negative horizon");
  Trajectory traj;
  traj.states.reserve(horizon + 1);
  traj.states.push_back(sc.initial);
  const bool controlled = policy.kind != ControlPolicy::Kind::None;
  if (controlled) traj.controls.reserve(horizon);

  for (long t = 0; t < horizon; ++t) {
    const Vec* u = policy.at(t);
    if (controlled) {
      if (u == nullptr) {
        std::ostringstream os;
        os << "policy has no control for step " << t;
        throw PreconditionError(os.str());
      }
      if (!policy.budget.admits(*u)) {
        std::ostringstream os;
        os << "policy control at step " << t << " violates its budget constraint";
        throw PreconditionError(os.str());
      }
      check_control(*u, sc);
      traj.controls.push_back(*u);
    }
    traj.states.push_back(step(traj.states.back(), sc, u ? u->data() : nullptr));
  }
  return traj;
}

std::vector<AggregateRow> aggregate_adoption(const Trajectory& traj) {
  if (traj.states.empty()) throw PreconditionError("aggregate_adoption: empty trajectory");
  std::vector<AggregateRow> rows;
  rows.reserve(traj.states.size());
  for (const auto& st : traj.states) {
    const int n = st.n();
    AggregateRow row;
    for (int j = 0; j < n; ++j) {
      row.a += st.a[j];
      row.d += st.d[j];
      row.s += 1.0 - st.a[j] - st.d[j];
    }
    row.a /= n;
    row.d /= n;
    row.s /= n;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace sadnet
