#include "sadnet/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "sadnet/errors.hpp"

namespace sadnet {

const char* to_string(EquilibriumKind k) {
  return k == EquilibriumKind::AdoptionFree ? "adoption_free" : "adoption_diffused";
}

const char* to_string(Certificate c) {
  switch (c) {
    case Certificate::GloballyStable:
      return "globally_stable";
    case Certificate::Unstable:
      return "unstable";
    case Certificate::LocalStable:
      return "local_stable";
    case Certificate::Inconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

namespace {

constexpr double kSpectralTol = 1e-13;
constexpr long kPowerIterCap = 200000;

bool power_iteration(const Matrix& m, double* out) {
  const int n = m.n;
  Vec v(n, 1.0 / n), w(n);
  for (long it = 0; it < kPowerIterCap; ++it) {
    matvec(m, v.data(), w.data());
    double wmax = 0.0;
    for (double z : w)
      if (z > wmax) wmax = z;
    if (wmax == 0.0) {
      *out = 0.0;
      return true;
    }
    bool positive = true;
    for (double z : v)
      if (!(z > 0.0)) {
        positive = false;
        break;
      }
    if (positive) {
      // Collatz-Wielandt: min_i (Mv)_i/v_i <= rho <= max_i (Mv)_i/v_i.
      double lo = std::numeric_limits<double>::infinity();
      double hi = 0.0;
      for (int i = 0; i < n; ++i) {
        const double r = w[i] / v[i];
        lo = std::min(lo, r);
        hi = std::max(hi, r);
      }
      if (hi - lo <= kSpectralTol * hi) {
        *out = 0.5 * (lo + hi);
        return true;
      }
    }
    for (int i = 0; i < n; ++i) v[i] = w[i] / wmax;
  }
  return false;
}

double dense_spectral_radius(const Matrix& m) {
  const int n = m.n;
  Eigen::MatrixXd em(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) em(j, k) = m(j, k);
  Eigen::EigenSolver<Eigen::MatrixXd> solver(em, false);
  if (solver.info() != Eigen::Success)
    throw NonconvergenceError("spectral_radius: dense eigensolver failed", 0.0);
  double rho = 0.0;
  for (int i = 0; i < n; ++i) rho = std::max(rho, std::abs(solver.eigenvalues()[i]));
  return rho;
}

Vec clamp01(Vec v) {
  for (double& z : v) z = std::clamp(z, 0.0, 1.0);
  return v;
}

double state_inf_diff(const SystemState& p, const SystemState& q) {
  double r = inf_diff(p.a, q.a);
  r = std::max(r, inf_diff(p.d, q.d));
  r = std::max(r, inf_diff(p.x, q.x));
  return r;
}

Matrix opinion_system_matrix(const Scenario& sc) {
  const int n = sc.n();
  Matrix a(n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      a(j, k) = (j == k ? 1.0 : 0.0) - sc.params.lambda[j] * sc.social.weights(j, k);
  return a;
}

}  // namespace

double spectral_radius(const Matrix& m) {
  if (m.n <= 0) throw PreconditionError("spectral_radius: empty matrix");
  for (double v : m.a)
    if (v < 0.0) throw PreconditionError("spectral_radius: matrix has a negative entry");
  double rho = 0.0;
  if (power_iteration(m, &rho)) return rho;
  return dense_spectral_radius(m);
}

Vec psi(const Vec& x, const ModelParams& p) {
  const int n = p.n();
  Vec out(n);
  for (int j = 0; j < n; ++j) {
    if (p.theta[j] == 0.0) {
      out[j] = 0.0;  // no s->d inflow, no dissatisfied mass at the free point
      continue;
    }
    const double denom = (p.gamma[j] - p.theta[j]) * x[j] + p.theta[j];
    if (!(denom > 0.0)) {
      std::ostringstream os;
      os << "psi: (gamma-theta)x + theta = " << denom << " at j=" << j;
      throw PreconditionError(os.str());
    }
    out[j] = std::clamp(p.theta[j] * (1.0 - x[j]) / denom, 0.0, 1.0);
  }
  return out;
}

Vec free_opinion_fixed_point(const Scenario& sc) {
  const int n = sc.n();
  const Vec alpha = sc.params.alpha();
  Vec rhs(n);
  for (int j = 0; j < n; ++j) rhs[j] = alpha[j] * sc.params.prejudice[j];
  const Matrix a = opinion_system_matrix(sc);
  Vec x = lu_solve(a, rhs);

  double residual = 0.0;
  for (int j = 0; j < n; ++j) {
    double r = -rhs[j];
    for (int k = 0; k < n; ++k) r += a(j, k) * x[k];
    residual = std::max(residual, std::fabs(r));
  }
  if (residual > 1e-12)
    throw NonconvergenceError("free_opinion_fixed_point: linear solve residual above 1e-12",
                              residual);
  return x;
}

OpinionBounds opinion_bounds(const Scenario& sc) {
  const int n = sc.n();
  const Vec alpha = sc.params.alpha();
  const Vec& x0 = sc.params.prejudice;

  Vec base(n);
  for (int j = 0; j < n; ++j) base[j] = alpha[j] * x0[j];
  Vec feed = matvec(sc.physical.weights, Vec(n, 1.0));
  for (int j = 0; j < n; ++j) feed[j] *= sc.params.xi[j];

  Vec lo = x0, hi = x0, y = x0, z = x0, wy(n), wz(n), y1(n), z1(n);
  constexpr long kCap = 200000;
  long it = 0;
  for (; it < kCap; ++it) {
    matvec(sc.social.weights, y.data(), wy.data());
    matvec(sc.social.weights, z.data(), wz.data());
    for (int j = 0; j < n; ++j) {
      y1[j] = base[j] + sc.params.lambda[j] * wy[j];
      z1[j] = base[j] + sc.params.lambda[j] * wz[j] + feed[j];
    }
    const double dy = inf_diff(y1, y);
    const double dz = inf_diff(z1, z);
    y.swap(y1);
    z.swap(z1);
    for (int j = 0; j < n; ++j) {
      lo[j] = std::min(lo[j], y[j]);
      hi[j] = std::max(hi[j], z[j]);
    }
    if (dy <= 1e-12 && dz <= 1e-12) break;
  }
  if (it == kCap)
    throw NonconvergenceError("opinion_bounds: envelope iteration did not converge", 0.0);

  // Fold in the exact limits of both affine maps so the asymptote itself can
  // never fall outside the returned envelope.
  const Matrix a = opinion_system_matrix(sc);
  const Vec ylim = lu_solve(a, base);
  Vec rhs(n);
  for (int j = 0; j < n; ++j) rhs[j] = base[j] + feed[j];
  const Vec zlim = lu_solve(a, rhs);
  OpinionBounds bounds;
  bounds.lower.resize(n);
  bounds.upper.resize(n);
  for (int j = 0; j < n; ++j) {
    bounds.lower[j] = std::max(0.0, std::min(lo[j], ylim[j]));
    bounds.upper[j] = std::min(1.0, std::max(hi[j], zlim[j]));
  }
  return bounds;
}

double r0_at(const Vec& x, const Scenario& sc) {
  const int n = sc.n();
  for (int j = 0; j < n; ++j)
    if (x[j] < -1e-9 || x[j] > 1.0 + 1e-9)
      throw PreconditionError("r0_at: opinion vector outside [0,1]");
  const Vec xc = clamp01(x);
  const Vec ps = psi(xc, sc.params);
  Matrix m(n);
  for (int j = 0; j < n; ++j) {
    const double row = sc.params.beta[j] * xc[j] * (1.0 - ps[j]);
    for (int k = 0; k < n; ++k) m(j, k) = row * sc.physical.weights(j, k);
    m(j, j) += 1.0 - sc.params.delta[j];
  }
  return spectral_radius(m);
}

ReproductionNumbers r0_extremes(const Scenario& sc) {
  const OpinionBounds bounds = opinion_bounds(sc);
  ReproductionNumbers rn;
  rn.x_lower = bounds.lower;
  rn.x_upper = bounds.upper;
  rn.min = r0_at(bounds.lower, sc);
  rn.max = r0_at(bounds.upper, sc);
  rn.at_free = r0_at(clamp01(free_opinion_fixed_point(sc)), sc);
  return rn;
}

EquilibriumReport adoption_free_equilibrium(const Scenario& sc) {
  const int n = sc.n();
  EquilibriumReport rep;
  rep.kind = EquilibriumKind::AdoptionFree;
  rep.point.a.assign(n, 0.0);
  rep.point.x = free_opinion_fixed_point(sc);
  rep.point.d = psi(clamp01(rep.point.x), sc.params);
  rep.point.time = 0;
  rep.residual = state_inf_diff(step(rep.point, sc), rep.point);
  return rep;
}

EquilibriumReport certify_adoption_free(const Scenario& sc) {
  EquilibriumReport rep = adoption_free_equilibrium(sc);
  rep.r0 = r0_extremes(sc);
  if (rep.r0.max < 1.0 - 1e-12) {
    rep.certificate = Certificate::GloballyStable;
  } else if (rep.r0.min > 1.0 + 1e-12) {
    rep.certificate = Certificate::Unstable;
  } else {
    rep.certificate = Certificate::Inconclusive;
    std::ostringstream os;
    os << "threshold interval straddles 1: r0_min = " << rep.r0.min
       << ", r0_max = " << rep.r0.max;
    rep.reason = os.str();
  }
  return rep;
}

EquilibriumReport find_diffused_equilibrium(const Scenario& sc, double seed,
                                            const FixedPointOptions& opts) {
  if (!(seed > 0.0 && seed <= 0.1))
    throw PreconditionError("find_diffused_equilibrium: seed must lie in (0, 0.1]");
  const int n = sc.n();

  SystemState z;
  z.a.assign(n, seed);
  z.d.assign(n, 0.0);
  z.x = sc.params.prejudice;
  z.time = 0;

  double omega = 1.0;
  double prev = std::numeric_limits<double>::infinity();
  int increases = 0;
  int decreases = 0;
  double residual = prev;
  bool converged = false;
  for (long it = 0; it < opts.max_iter; ++it) {
    const SystemState w = step(z, sc);
    residual = state_inf_diff(w, z);
    if (residual <= opts.tol) {
      converged = true;
      break;
    }
    if (residual > prev) {
      decreases = 0;
      if (++increases >= 2) {
        omega = std::max(omega * 0.5, 1.0 / 64.0);
        increases = 0;
      }
    } else {
      increases = 0;
      // A transient-triggered halving must not stick: near-threshold
      // scenarios converge at rate 1 - O(r0_min - 1) and cannot afford a
      // permanently damped step. Recover after a sustained decrease.
      if (omega < 1.0 && ++decreases >= 50) {
        omega = std::min(1.0, omega * 2.0);
        decreases = 0;
      }
    }
    prev = residual;
    for (int j = 0; j < n; ++j) {
      z.a[j] = (1.0 - omega) * z.a[j] + omega * w.a[j];
      z.d[j] = (1.0 - omega) * z.d[j] + omega * w.d[j];
      z.x[j] = (1.0 - omega) * z.x[j] + omega * w.x[j];
    }
  }
  if (!converged) {
    std::ostringstream os;
    os << "find_diffused_equilibrium: residual " << residual << " above " << opts.tol
       << " after " << opts.max_iter << " iterations";
    throw NonconvergenceError(os.str(), residual);
  }

  EquilibriumReport rep;
  rep.point = z;
  rep.point.time = 0;
  rep.residual = residual;
  rep.r0 = r0_extremes(sc);
  const double amin = *std::min_element(z.a.begin(), z.a.end());
  rep.kind = amin > 1e-8 ? EquilibriumKind::AdoptionDiffused : EquilibriumKind::AdoptionFree;
  return rep;
}

double default_eta(const ModelParams& p) {
  double m = 0.0;
  for (double l : p.lambda) m = std::max(m, l);
  return m;
}

SigmaWitness solve_sigma_feasibility(double nu, double phi, double eta, double rho_b) {
  SigmaWitness w;
  if (!(phi < 1.0) || !(eta < 1.0)) return w;
  const double a0 = nu * nu;
  const double c0 = rho_b * rho_b;
  const double p1 = phi * phi / (1.0 - phi * phi);
  const double s1 = eta * eta / (1.0 - eta * eta);
  if (p1 >= 1.0 || s1 >= 1.0) return w;  // self terms already dominate
  const double m1 = a0 / (1.0 - p1);
  const double k1 = (a0 / (1.0 - eta * eta)) / (1.0 - p1);
  const double m2 = c0 / (1.0 - s1);
  const double k2 = (c0 / (1.0 - phi * phi)) / (1.0 - s1);
  if (k1 * k2 >= 1.0) return w;  // cross terms dominate
  // Interior point of the two open half planes; tau bumps guard against
  // rounding right at the boundary.
  for (double tau = 1.0; tau <= 64.0; tau *= 2.0) {
    const double sig1 = (m1 + k1 * m2 + tau) / (1.0 - k1 * k2);
    const double sig2 = m2 + k2 * sig1 + tau / (2.0 * (k1 + 1.0));
    const bool ok1 =
        a0 + sig2 * nu * nu / (1.0 - eta * eta) + sig1 * phi * phi / (1.0 - phi * phi) < sig1;
    const bool ok2 =
        c0 + sig1 * rho_b * rho_b / (1.0 - phi * phi) + sig2 * eta * eta / (1.0 - eta * eta) <
        sig2;
    if (ok1 && ok2 && sig1 > 0.0 && sig2 > 0.0) {
      w = {true, sig1, sig2};
      break;
    }
  }
  return w;
}

EquilibriumReport certify_diffused(EquilibriumReport rep, const Scenario& sc, double eta) {
  if (rep.kind != EquilibriumKind::AdoptionDiffused)
    throw PreconditionError("certify_diffused: report does not hold a diffused equilibrium");
  if (!(eta >= 0.0)) throw PreconditionError("certify_diffused: eta must be nonnegative");
  const int n = sc.n();
  const ModelParams& p = sc.params;
  if (rep.r0.x_lower.empty()) rep.r0 = r0_extremes(sc);

  const Vec wa = matvec(sc.physical.weights, rep.point.a);
  rep.bstar_diag.resize(n);
  for (int j = 0; j < n; ++j) rep.bstar_diag[j] = p.beta[j] * rep.point.x[j] * wa[j];
  rep.eta = eta;

  Vec rowsum(n, 0.0);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) rowsum[j] += sc.physical.weights(j, k);

  bool effort_ok = true;
  for (int j = 0; j < n; ++j)
    if (p.beta[j] * rowsum[j] > p.delta[j] + rep.bstar_diag[j]) effort_ok = false;

  double nu = -std::numeric_limits<double>::infinity();
  double phi = 0.0;
  double rho_b = 0.0;
  for (int j = 0; j < n; ++j) {
    nu = std::max(nu, p.theta[j] * (1.0 - rep.r0.x_lower[j]) - p.delta[j]);
    // Vertex maximum of the row sum over the [0,1] cubes: the opinion/state
    // dependent factor x_j(1-a_j-d_j) peaks at 1.
    phi = std::max(phi, std::fabs(1.0 - p.delta[j] - rep.bstar_diag[j]) +
                            p.beta[j] * rowsum[j]);
    rho_b = std::max(rho_b, rep.bstar_diag[j]);
  }
  rep.nu = nu;
  rep.phi = phi;

  std::vector<std::string> reasons;
  if (!effort_ok) reasons.push_back("per-node effort bound beta_j <= delta_j + B*_jj fails");
  if (phi >= 1.0) reasons.push_back("contraction factor >= 1");
  if (eta >= 1.0) reasons.push_back("eta >= 1");

  rep.sigma = solve_sigma_feasibility(nu, phi, eta, rho_b);
  if (phi < 1.0 && eta < 1.0 && !rep.sigma.found)
    reasons.push_back("no positive sigma pair exists");

  if (effort_ok && rep.sigma.found) {
    rep.certificate = Certificate::LocalStable;
    rep.reason.clear();
  } else {
    rep.certificate = Certificate::Inconclusive;
    std::string joined;
    for (const auto& r : reasons) {
      if (!joined.empty()) joined += "; ";
      joined += r;
    }
    rep.reason = joined;
  }
  return rep;
}

}  // namespace sadnet
