#include "sadnet/network.hpp"

#include <cmath>
#include <vector>

namespace sadnet {

void NetworkLayer::normalize_rows(double tol) {
  for (int j = 0; j < n; ++j) {
    double sum = 0.0;
    for (int k = 0; k < n; ++k) sum += weights(j, k);
    if (sum > 0.0 && std::fabs(sum - 1.0) <= tol && sum != 1.0) {
      for (int k = 0; k < n; ++k) weights(j, k) /= sum;
    }
  }
}

bool NetworkLayer::nonnegative() const {
  for (double w : weights.a)
    if (w < 0.0) return false;
  return true;
}

bool NetworkLayer::row_stochastic(double tol) const {
  for (int j = 0; j < n; ++j) {
    double sum = 0.0;
    for (int k = 0; k < n; ++k) sum += weights(j, k);
    if (std::fabs(sum - 1.0) > tol) return false;
  }
  return true;
}

namespace {

// Nodes reachable from start along edges selected by pick(j, k).
template <typename Pick>
int reach_count(int n, Pick pick, int start) {
  std::vector<char> seen(n, 0);
  std::vector<int> stack{start};
  seen[start] = 1;
  int count = 1;
  while (!stack.empty()) {
    const int j = stack.back();
    stack.pop_back();
    for (int k = 0; k < n; ++k) {
      if (!seen[k] && pick(j, k)) {
        seen[k] = 1;
        ++count;
        stack.push_back(k);
      }
    }
  }
  return count;
}

}  // namespace

bool NetworkLayer::irreducible() const {
  if (n == 0) return false;
  if (n == 1) return true;
  const auto fwd = [this](int j, int k) { return weights(j, k) > 0.0; };
  const auto bwd = [this](int j, int k) { return weights(k, j) > 0.0; };
  return reach_count(n, fwd, 0) == n && reach_count(n, bwd, 0) == n;
}

}  // namespace sadnet
