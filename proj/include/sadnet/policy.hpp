#pragma once

#include <vector>

#include "sadnet/linalg.hpp"
#include "sadnet/model.hpp"

namespace sadnet {

// Per-step budget 1'u <= c together with the box 0 <= u <= upper,
// upper_j = 1 - prejudice_j.
struct BudgetConstraint {
  double c = 0.0;
  Vec upper;

  static BudgetConstraint for_scenario(const Scenario& sc, double budget);
  bool admits(const Vec& u, double tol = 1e-12) const;
};

struct ControlPolicy {
  enum class Kind { None, Constant, Sequence };

  Kind kind = Kind::None;
  Vec constant;                 // Kind::Constant
  std::vector<Vec> sequence;    // Kind::Sequence, sequence[t] applied at step t
  BudgetConstraint budget;

  static ControlPolicy none() { return {}; }
  static ControlPolicy constant_policy(Vec u, BudgetConstraint b);
  static ControlPolicy sequence_policy(std::vector<Vec> us, BudgetConstraint b);

  // Control vector for step t, or nullptr when uncontrolled.
  const Vec* at(long t) const;
};

}  // namespace sadnet
