#pragma once

#include <string>

#include "sadnet/dynamics.hpp"
#include "sadnet/linalg.hpp"
#include "sadnet/model.hpp"

namespace sadnet {

enum class EquilibriumKind { AdoptionFree, AdoptionDiffused };
enum class Certificate { GloballyStable, Unstable, LocalStable, Inconclusive };

const char* to_string(EquilibriumKind k);
const char* to_string(Certificate c);

struct ReproductionNumbers {
  double at_free = 0.0;  // R0 at the free-opinion fixed point
  double min = 0.0;      // R0 at the opinion lower bound
  double max = 0.0;      // R0 at the opinion upper bound
  Vec x_lower;
  Vec x_upper;
};

struct SigmaWitness {
  bool found = false;
  double s1 = 0.0;
  double s2 = 0.0;
};

struct EquilibriumReport {
  EquilibriumKind kind = EquilibriumKind::AdoptionFree;
  SystemState point;
  double residual = 0.0;  // infinity norm of one-step displacement
  Certificate certificate = Certificate::Inconclusive;
  ReproductionNumbers r0;
  double nu = 0.0;
  double phi = 0.0;
  double eta = 0.0;
  Vec bstar_diag;
  SigmaWitness sigma;
  std::string reason;  // set when the certificate is Inconclusive
};

// rho(M) for nonnegative M to 1e-13 relative accuracy. Power iteration with
// a uniform positive start and a Collatz-Wielandt enclosure test; falls back
// to a dense eigensolve for non-converging (e.g. periodic) matrices.
double spectral_radius(const Matrix& m);

// Diagonal of Psi(x): theta_j(1-x_j) / ((gamma_j-theta_j)x_j + theta_j),
// with Psi_jj = 0 when theta_j = 0.
Vec psi(const Vec& x, const ModelParams& params);

// x* = (I - Lambda*Wtilde)^-1 (I - Lambda - Xi) x(0), by direct solve.
Vec free_opinion_fixed_point(const Scenario& scenario);

struct OpinionBounds {
  Vec lower;
  Vec upper;
};

// Componentwise running envelopes of the opinion recursion with the adoption
// feedback pinned at 0 (lower) and 1 (upper); valid for the uncontrolled
// system at every step.
OpinionBounds opinion_bounds(const Scenario& scenario);

// Opinion-dependent reproduction number
// R0(x) = rho(I - Delta + B diag(x) (I - Psi(x)) W).
double r0_at(const Vec& x, const Scenario& scenario);

ReproductionNumbers r0_extremes(const Scenario& scenario);

// Point (0, Psi(x*)1, x*) with its one-step residual; no certificate.
EquilibriumReport adoption_free_equilibrium(const Scenario& scenario);

// GloballyStable when r0_max < 1, Unstable when r0_min > 1, else
// Inconclusive. Margin 1e-12 on both comparisons.
EquilibriumReport certify_adoption_free(const Scenario& scenario);

struct FixedPointOptions {
  double tol = 1e-10;
  long max_iter = 1000000;
};

// Damped fixed-point iteration z <- (1-w)z + w*step(z) from
// a = seed*1, d = 0, x = prejudice. Damping starts at 1 and halves after two
// consecutive residual increases (floor 1/64).
EquilibriumReport find_diffused_equilibrium(const Scenario& scenario, double seed = 0.05,
                                            const FixedPointOptions& opts = {});

// Infinity-norm contraction factor of the opinion sub-dynamics; the default
// for the eta constant of the diffused-equilibrium certificate. eta is not
// pinned by the underlying conditions, so every caller can override it.
double default_eta(const ModelParams& params);

// Exact feasibility of the two-variable sigma system given the certificate
// constants. Both inequalities are affine in (s1, s2), so feasibility
// reduces to an intersection test of two open half planes in the positive
// quadrant; the witness is a closed-form interior point. Degenerate inputs
// (phi >= 1 or eta >= 1) are infeasible by convention.
SigmaWitness solve_sigma_feasibility(double nu, double phi, double eta, double rho_bstar);

// Checks the per-node effort bound and the two-variable sigma feasibility
// system at the report's equilibrium; LocalStable with an explicit witness
// when everything holds.
EquilibriumReport certify_diffused(EquilibriumReport report, const Scenario& scenario,
                                   double eta);

}  // namespace sadnet
