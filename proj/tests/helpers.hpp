#pragma once

#include "sadnet/experiment.hpp"

namespace sadnet::testing {

// n = 1 reference scenario used throughout: W = Wtilde = [[1]],
// beta 0.4, gamma 0.3, theta 0.1, delta 0.2, lambda 0.5, xi 0.2, x(0) 0.5,
// initial (a, d, x) = (0.1, 0, 0.5).
inline Scenario scalar_scenario(double beta = 0.4, double x0 = 0.5, double a0 = 0.1) {
  Scenario sc;
  sc.physical = NetworkLayer(1);
  sc.physical.weights(0, 0) = 1.0;
  sc.social = sc.physical;
  sc.params.beta = {beta};
  sc.params.gamma = {0.3};
  sc.params.theta = {0.1};
  sc.params.delta = {0.2};
  sc.params.lambda = {0.5};
  sc.params.xi = {0.2};
  sc.params.prejudice = {x0};
  sc.initial.a = {a0};
  sc.initial.d = {0.0};
  sc.initial.x = {x0};
  return sc;
}

}  // namespace sadnet::testing
