#pragma once

#include "sadnet/linalg.hpp"

namespace sadnet {

inline constexpr double kRowStochasticTol = 1e-12;

// Weighted directed graph layer; row j holds the out-weights of community j.
// Valid layers are row-stochastic and irreducible.
struct NetworkLayer {
  int n = 0;
  Matrix weights;

  NetworkLayer() = default;
  explicit NetworkLayer(int size) : n(size), weights(size) {}
  NetworkLayer(int size, Matrix w) : n(size), weights(std::move(w)) {}

  // Divides each row by its sum when the sum is within tol of 1, so
  // downstream math sees exact stochasticity. Rows outside tol are left
  // untouched for validation to flag.
  void normalize_rows(double tol = kRowStochasticTol);

  bool nonnegative() const;
  bool row_stochastic(double tol = kRowStochasticTol) const;
  // Strong connectivity of the positive-entry digraph.
  bool irreducible() const;
};

}  // namespace sadnet
