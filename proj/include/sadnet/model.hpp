#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sadnet/linalg.hpp"
#include "sadnet/network.hpp"

namespace sadnet {

// Per-community rates and opinion weights. The adoption/reversion/
// unsatisfaction rates are the linear forms beta_j*x_j, gamma_j*x_j,
// theta_j*(1-x_j). alpha = 1 - lambda - xi is derived, never stored.
struct ModelParams {
  Vec beta;       // adoption susceptibility
  Vec gamma;      // reversion
  Vec theta;      // unsatisfaction
  Vec delta;      // dismissing
  Vec lambda;     // social susceptibility
  Vec xi;         // adoption-feedback weight
  Vec prejudice;  // persistent x(0) anchor of the opinion update

  int n() const { return static_cast<int>(beta.size()); }
  Vec alpha() const;
};

// (a, d, x) at one time step; s is always derived as 1 - a - d.
struct SystemState {
  Vec a;
  Vec d;
  Vec x;
  long time = 0;

  int n() const { return static_cast<int>(a.size()); }
  Vec s() const;
};

struct Scenario {
  NetworkLayer physical;
  NetworkLayer social;
  ModelParams params;
  SystemState initial;

  int n() const { return physical.n; }
};

struct ValidationIssue {
  std::string code;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  bool valid() const { return issues.empty(); }
  std::string describe() const;
};

// Checks every NetworkLayer/ModelParams/SystemState invariant plus the
// reach-a-stubborn-community condition on the social layer. Dimension
// mismatches throw StructuralError; invariant violations are reported.
ValidationReport validate_scenario(const Scenario& scenario);

}  // namespace sadnet
