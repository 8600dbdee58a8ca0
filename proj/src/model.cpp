#include "sadnet/model.hpp"

#include <cmath>
#include <sstream>

#include "sadnet/errors.hpp"

namespace sadnet {

Vec ModelParams::alpha() const {
  Vec a(beta.size());
  for (size_t j = 0; j < beta.size(); ++j) a[j] = 1.0 - lambda[j] - xi[j];
  return a;
}

Vec SystemState::s() const {
  Vec out(a.size());
  for (size_t j = 0; j < a.size(); ++j) out[j] = 1.0 - a[j] - d[j];
  return out;
}

std::string ValidationReport::describe() const {
  std::ostringstream os;
  for (const auto& issue : issues) os << issue.code << ": " << issue.message << "\n";
  return os.str();
}

namespace {

constexpr double kEps = 1e-12;

void check_sizes(const Scenario& sc) {
  const int n = sc.physical.n;
  std::ostringstream bad;
  auto expect = [&](size_t got, const char* what) {
    if (static_cast<int>(got) != n) bad << what << " has length " << got << ", expected " << n << "; ";
  };
  if (n <= 0) throw StructuralError("scenario has no communities");
  if (static_cast<int>(sc.physical.weights.a.size()) != n * n)
    bad << "physical weights are not " << n << "x" << n << "; ";
  if (sc.social.n != n)
    bad << "social layer has n=" << sc.social.n << ", expected " << n << "; ";
  else if (static_cast<int>(sc.social.weights.a.size()) != n * n)
    bad << "social weights are not " << n << "x" << n << "; ";
  expect(sc.params.beta.size(), "beta");
  expect(sc.params.gamma.size(), "gamma");
  expect(sc.params.theta.size(), "theta");
  expect(sc.params.delta.size(), "delta");
  expect(sc.params.lambda.size(), "lambda");
  expect(sc.params.xi.size(), "xi");
  expect(sc.params.prejudice.size(), "prejudice");
  expect(sc.initial.a.size(), "initial.a");
  expect(sc.initial.d.size(), "initial.d");
  expect(sc.initial.x.size(), "initial.x");
  const std::string msg = bad.str();
  if (!msg.empty()) throw StructuralError("dimension mismatch: " + msg);
}

void check_layer(const NetworkLayer& layer, const char* name,
                 std::vector<ValidationIssue>& out) {
  if (!layer.nonnegative())
    out.push_back({"negative-weight", std::string(name) + " layer has a negative entry"});
  if (!layer.row_stochastic())
    out.push_back({"row-sum", std::string(name) + " layer rows do not sum to 1 within 1e-12"});
  if (!layer.irreducible())
    out.push_back({"not-irreducible",
                   std::string(name) + " layer's positive-entry digraph is not strongly connected"});
}

void check_unit_range(const Vec& v, const char* name, std::vector<ValidationIssue>& out) {
  for (size_t j = 0; j < v.size(); ++j) {
    if (!(v[j] >= -kEps && v[j] <= 1.0 + kEps)) {
      std::ostringstream os;
      os << name << "[" << j << "] = " << v[j] << " is outside [0,1]";
      out.push_back({"range", os.str()});
    }
  }
}

// Every node must reach some node k with alpha_k > 0 along social edges.
bool all_reach_stubborn(const NetworkLayer& social, const Vec& alpha) {
  const int n = social.n;
  // Walk backwards from the stubborn set.
  std::vector<char> seen(n, 0);
  std::vector<int> stack;
  for (int k = 0; k < n; ++k) {
    if (alpha[k] > 0.0) {
      seen[k] = 1;
      stack.push_back(k);
    }
  }
  while (!stack.empty()) {
    const int k = stack.back();
    stack.pop_back();
    for (int j = 0; j < n; ++j) {
      if (!seen[j] && social.weights(j, k) > 0.0) {
        seen[j] = 1;
        stack.push_back(j);
      }
    }
  }
  for (int j = 0; j < n; ++j)
    if (!seen[j]) return false;
  return true;
}

}  // namespace

ValidationReport validate_scenario(const Scenario& sc) {
  check_sizes(sc);
  ValidationReport report;
  auto& out = report.issues;
  const int n = sc.n();

  check_layer(sc.physical, "physical", out);
  check_layer(sc.social, "social", out);

  const auto& p = sc.params;
  check_unit_range(p.beta, "beta", out);
  check_unit_range(p.gamma, "gamma", out);
  check_unit_range(p.theta, "theta", out);
  check_unit_range(p.delta, "delta", out);
  check_unit_range(p.lambda, "lambda", out);
  check_unit_range(p.xi, "xi", out);
  check_unit_range(p.prejudice, "prejudice", out);

  const Vec alpha = p.alpha();
  for (int j = 0; j < n; ++j) {
    if (!(alpha[j] >= -kEps && alpha[j] <= 1.0 + kEps)) {
      std::ostringstream os;
      os << "alpha[" << j << "] = 1 - lambda - xi = " << alpha[j] << " is outside [0,1]";
      out.push_back({"alpha-range", os.str()});
    }
    const double gt = p.gamma[j] + p.theta[j];
    if (!(gt > 0.0 && gt < 1.0)) {
      std::ostringstream os;
      os << "gamma[" << j << "] + theta[" << j << "] = " << gt << " is outside (0,1)";
      out.push_back({"gamma-theta", os.str()});
    }
  }

  check_unit_range(sc.initial.a, "initial.a", out);
  check_unit_range(sc.initial.d, "initial.d", out);
  check_unit_range(sc.initial.x, "initial.x", out);
  for (int j = 0; j < n; ++j) {
    if (sc.initial.a[j] + sc.initial.d[j] > 1.0 + kEps) {
      std::ostringstream os;
      os << "initial a[" << j << "] + d[" << j << "] = " << sc.initial.a[j] + sc.initial.d[j]
         << " exceeds 1 (negative susceptible fraction)";
      out.push_back({"simplex", os.str()});
    }
  }

  if (!all_reach_stubborn(sc.social, alpha))
    out.push_back({"no-stubborn-reachable",
                   "some community cannot reach any community with alpha > 0 on the social layer"});

  return report;
}

}  // namespace sadnet
