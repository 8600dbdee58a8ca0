#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "helpers.hpp"
#include "sadnet/errors.hpp"
#include "sadnet/stability.hpp"

using namespace sadnet;
using sadnet::testing::scalar_scenario;

namespace {

Matrix from_rows(int n, std::initializer_list<double> vals) {
  Matrix m(n);
  int i = 0;
  for (double v : vals) m.a[i++] = v;
  return m;
}

// Exhaustive-equivalent sweep of the sigma grid (0,100]^2 at 1e-3: for each
// s2 the admissible s1 set is an interval, so only its first grid points
// need checking.
bool sigma_grid_feasible(double nu, double phi, double eta, double rho_b) {
  if (phi >= 1.0 || eta >= 1.0) return false;
  const double res = 1e-3;
  const double A = nu * nu;
  const double P = phi * phi / (1.0 - phi * phi);
  const double Q = nu * nu / (1.0 - eta * eta);
  const double C0 = rho_b * rho_b;
  const double R = rho_b * rho_b / (1.0 - phi * phi);
  const double S = eta * eta / (1.0 - eta * eta);
  const auto raw = [&](double s1, double s2) {
    return A + s2 * Q + s1 * P < s1 && C0 + s1 * R + s2 * S < s2;
  };
  if (P >= 1.0) return false;
  for (long i2 = 1; i2 <= 100000; ++i2) {
    const double s2 = static_cast<double>(i2) * res;
    const double lo = (A + s2 * Q) / (1.0 - P);
    double hi = std::numeric_limits<double>::infinity();
    const double rhs = s2 * (1.0 - S) - C0;
    if (R > 0.0)
      hi = rhs / R;
    else if (rhs <= 0.0)
      continue;
    long k = static_cast<long>(std::floor(lo / res)) + 1;
    if (k < 1) k = 1;
    for (int tries = 0; tries < 3 && k <= 100000; ++tries, ++k) {
      const double s1 = static_cast<double>(k) * res;
      if (s1 >= hi) break;
      if (raw(s1, s2)) return true;
    }
  }
  return false;
}

}  // namespace

TEST_CASE("spectral radius on closed-form cases") {
  CHECK(spectral_radius(from_rows(3, {1, 0, 0, 0, 1, 0, 0, 0, 1})) == 1.0);
  CHECK(spectral_radius(from_rows(2, {0, 1, 1, 0})) == 1.0);
  CHECK(spectral_radius(from_rows(2, {0.5, 0.5, 0.25, 0.75})) == 1.0);
  CHECK(spectral_radius(from_rows(2, {0, 0, 0, 0})) == 0.0);
  CHECK(spectral_radius(from_rows(2, {0, 1, 0, 0})) == 0.0);
  // Periodic: plain power iteration cannot close the enclosure, the dense
  // fallback must.
  CHECK(spectral_radius(from_rows(2, {0, 2, 0.5, 0})) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK_THROWS_AS(spectral_radius(from_rows(2, {0, -1, 1, 0})), PreconditionError);
}

TEST_CASE("spectral radius agrees with its diagonal-shift route") {
  Xoshiro256pp rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng.next() % 7);
    Matrix m(n);
    for (auto& v : m.a) v = rng.bernoulli(0.4) ? rng.uniform() : 0.0;
    Matrix shifted = m;
    for (int j = 0; j < n; ++j) shifted(j, j) += 1.0;
    // rho(M + I) = rho(M) + 1 for nonnegative M.
    CHECK(spectral_radius(m) ==
          doctest::Approx(spectral_radius(shifted) - 1.0).epsilon(5e-11));
  }
}

TEST_CASE("spectral radius matches the quadratic closed form on 2x2 matrices") {
  Xoshiro256pp rng(61);
  for (int trial = 0; trial < 100; ++trial) {
    const double a = rng.uniform(), b = rng.uniform(), c = rng.uniform(), d = rng.uniform();
    const double tr = a + d;
    const double det = a * d - b * c;
    const double disc = tr * tr - 4.0 * det;
    double expected;
    if (disc >= 0.0) {
      const double root = std::sqrt(disc);
      expected = std::max(std::fabs((tr + root) / 2.0), std::fabs((tr - root) / 2.0));
    } else {
      expected = std::sqrt(det);  // complex pair, |lambda| = sqrt(det)
    }
    CHECK(spectral_radius(from_rows(2, {a, b, c, d})) ==
          doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("psi closed-form values") {
  const ModelParams& p = scalar_scenario().params;
  CHECK(psi({1.0}, p)[0] == 0.0);
  CHECK(psi({0.0}, p)[0] == 1.0);
  CHECK(std::fabs(psi({0.5}, p)[0] - 0.25) <= 1e-12);

  Scenario sc = scalar_scenario();
  sc.params.theta = {0.0};
  CHECK(psi({0.3}, sc.params)[0] == 0.0);
}

TEST_CASE("free opinion fixed point") {
  SUBCASE("frozen opinions reproduce the prejudice") {
    Scenario sc = scalar_scenario();
    sc.params.lambda = {0.0};
    sc.params.xi = {0.0};
    CHECK(free_opinion_fixed_point(sc)[0] == doctest::Approx(0.5).epsilon(1e-15));
  }
  SUBCASE("scalar closed form") {
    CHECK(std::fabs(free_opinion_fixed_point(scalar_scenario())[0] - 0.3) <= 1e-12);
  }
  SUBCASE("symmetric pair stays symmetric") {
    Scenario sc;
    sc.physical = NetworkLayer(2);
    sc.physical.weights(0, 1) = 1.0;
    sc.physical.weights(1, 0) = 1.0;
    sc.social = sc.physical;
    sc.params.beta = {0.4, 0.4};
    sc.params.gamma = {0.3, 0.3};
    sc.params.theta = {0.1, 0.1};
    sc.params.delta = {0.2, 0.2};
    sc.params.lambda = {0.5, 0.5};
    sc.params.xi = {0.2, 0.2};
    sc.params.prejudice = {0.5, 0.5};
    sc.initial.a = {0.0, 0.0};
    sc.initial.d = {0.0, 0.0};
    sc.initial.x = {0.5, 0.5};
    const Vec x = free_opinion_fixed_point(sc);
    CHECK(x[0] == doctest::Approx(x[1]).epsilon(1e-14));
  }
}

TEST_CASE("adoption-free equilibrium point") {
  const EquilibriumReport rep = adoption_free_equilibrium(scalar_scenario());
  CHECK(std::fabs(rep.point.x[0] - 0.3) <= 1e-12);
  CHECK(std::fabs(rep.point.d[0] - 0.4375) <= 1e-12);
  CHECK(std::fabs(rep.point.s()[0] - 0.5625) <= 1e-12);
  CHECK(rep.residual <= 1e-12);

  Scenario sc = scalar_scenario();
  sc.params.theta = {0.0};
  CHECK(adoption_free_equilibrium(sc).point.d[0] == 0.0);
}

TEST_CASE("opinion bounds") {
  SUBCASE("scalar interval") {
    const OpinionBounds b = opinion_bounds(scalar_scenario());
    CHECK(std::fabs(b.lower[0] - 0.3) <= 1e-12);
    CHECK(std::fabs(b.upper[0] - 0.7) <= 1e-12);
  }
  SUBCASE("no adoption feedback pins the upper envelope at the start") {
    Scenario sc = scalar_scenario();
    sc.params.xi = {0.0};
    const OpinionBounds b = opinion_bounds(sc);
    const double xstar = free_opinion_fixed_point(sc)[0];
    CHECK(b.lower[0] == doctest::Approx(xstar).epsilon(1e-11));
    CHECK(b.upper[0] == doctest::Approx(0.5).epsilon(1e-12));  // transient max = x(0)
  }
  SUBCASE("frozen opinions give a degenerate interval") {
    Scenario sc = scalar_scenario();
    sc.params.lambda = {0.0};
    sc.params.xi = {0.0};
    const OpinionBounds b = opinion_bounds(sc);
    CHECK(b.lower[0] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(b.upper[0] == doctest::Approx(0.5).epsilon(1e-14));
  }
}

TEST_CASE("reproduction numbers on the scalar scenario") {
  const Scenario sc = scalar_scenario();
  CHECK(std::fabs(r0_at({1.0}, sc) - 1.2) <= 1e-12);
  CHECK(std::fabs(r0_at({0.3}, sc) - 0.8675) <= 1e-12);

  Scenario no_adoption = scalar_scenario();
  no_adoption.params.beta = {0.0};
  CHECK(std::fabs(r0_at({0.5}, no_adoption) - 0.8) <= 1e-13);  // 1 - delta

  const ReproductionNumbers rn = r0_extremes(sc);
  CHECK(std::fabs(rn.min - 0.8675) <= 1e-12);
  CHECK(std::fabs(rn.max - 1.045) <= 1e-12);
  CHECK(rn.min <= rn.at_free + 1e-12);
  CHECK(rn.at_free <= rn.max + 1e-12);

  Scenario weak = scalar_scenario(0.1);
  CHECK(std::fabs(r0_extremes(weak).max - 0.86125) <= 1e-12);
}

TEST_CASE("r0 ordering holds across random scenarios") {
  for (uint64_t seed = 100; seed < 160; ++seed) {
    const Scenario sc = generate_scenario(seed, 1 + static_cast<int>(seed % 8));
    const ReproductionNumbers rn = r0_extremes(sc);
    CHECK(rn.min <= rn.at_free + 1e-12);
    CHECK(rn.at_free <= rn.max + 1e-12);
  }
}

TEST_CASE("r0 monotonicity in the opinion profile") {
  Xoshiro256pp rng(77);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 1 + static_cast<int>(rng.next() % 6);
    const Scenario sc = generate_scenario(1000 + trial, n);
    Vec x(n), xp(n);
    for (int j = 0; j < n; ++j) {
      x[j] = rng.uniform();
      xp[j] = x[j] + (1.0 - x[j]) * rng.uniform();
    }
    CHECK(r0_at(x, sc) <= r0_at(xp, sc) + 1e-12);
  }
}

TEST_CASE("adoption-free certificates on the scalar family") {
  CHECK(certify_adoption_free(scalar_scenario(0.1)).certificate ==
        Certificate::GloballyStable);

  const EquilibriumReport unstable = certify_adoption_free(scalar_scenario(0.8, 1.0));
  CHECK(unstable.certificate == Certificate::Unstable);
  CHECK(std::fabs(unstable.r0.min - (0.8 + 0.48 * 9.0 / 11.0)) <= 1e-12);  // 1.19272..

  const EquilibriumReport mid = certify_adoption_free(scalar_scenario());
  CHECK(mid.certificate == Certificate::Inconclusive);
  CHECK_FALSE(mid.reason.empty());
}

TEST_CASE("opinion bounds contain every simulated opinion") {
  long violations = 0;
  for (uint64_t seed = 300; seed < 1300; ++seed) {
    const int n = 1 + static_cast<int>(seed % 10);
    const Scenario sc = generate_scenario(seed, n);
    const OpinionBounds b = opinion_bounds(sc);
    SystemState st = sc.initial;
    for (int t = 0; t < 1000; ++t) {
      st = step(st, sc);
      for (int j = 0; j < n; ++j)
        if (st.x[j] < b.lower[j] - 1e-11 || st.x[j] > b.upper[j] + 1e-11) ++violations;
    }
  }
  CHECK(violations == 0);
}

TEST_CASE("psi stays in [0,1] across the whole opinion range") {
  Xoshiro256pp rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const Scenario sc = generate_scenario(2000 + trial, 1 + static_cast<int>(rng.next() % 8));
    const int n = sc.n();
    Vec x(n);
    for (double& z : x) z = rng.uniform();
    for (double p : psi(x, sc.params)) {
      CHECK(p >= 0.0);
      CHECK(p <= 1.0);
    }
    CHECK(psi(Vec(n, 1.0), sc.params) == Vec(n, 0.0));
    for (double p : psi(Vec(n, 0.0), sc.params)) CHECK(p == 1.0);  // theta > 0 by construction
  }
}

TEST_CASE("subcritical scenarios settle on the adoption-free point") {
  const Scenario sc = scalar_scenario(0.1);
  REQUIRE(r0_extremes(sc).max < 1.0);
  const EquilibriumReport rep = find_diffused_equilibrium(sc);
  CHECK(rep.kind == EquilibriumKind::AdoptionFree);
  CHECK(rep.residual <= 1e-10);
  const EquilibriumReport free = adoption_free_equilibrium(sc);
  CHECK(std::fabs(rep.point.a[0] - free.point.a[0]) <= 1e-6);
  CHECK(std::fabs(rep.point.d[0] - free.point.d[0]) <= 1e-6);
  CHECK(std::fabs(rep.point.x[0] - free.point.x[0]) <= 1e-6);
}

TEST_CASE("supercritical scalar scenario has a diffused equilibrium") {
  const Scenario sc = scalar_scenario(0.8, 1.0);
  const EquilibriumReport rep = find_diffused_equilibrium(sc);
  CHECK(rep.kind == EquilibriumKind::AdoptionDiffused);
  CHECK(rep.residual <= 1e-10);
  CHECK(rep.point.a[0] > 0.0);

  // Fixed-point property.
  const SystemState next = step(rep.point, sc);
  CHECK(std::fabs(next.a[0] - rep.point.a[0]) <= 1e-10);
  CHECK(std::fabs(next.d[0] - rep.point.d[0]) <= 1e-10);
  CHECK(std::fabs(next.x[0] - rep.point.x[0]) <= 1e-10);

  // Independent oracle: plain long-horizon forward simulation.
  SystemState z = sc.initial;
  z.a = {1e-3};
  for (int t = 0; t < 1000000; ++t) z = step(z, sc);
  CHECK(std::fabs(rep.point.a[0] - z.a[0]) <= 1e-9);
  CHECK(std::fabs(rep.point.d[0] - z.d[0]) <= 1e-9);
  CHECK(std::fabs(rep.point.x[0] - z.x[0]) <= 1e-9);

  // Golden regression values frozen from the first oracle run.
  CHECK(std::fabs(rep.point.a[0] - 0.32053880380584587) <= 1e-9);
  CHECK(std::fabs(rep.point.d[0] - 0.33615623636067304) <= 1e-9);
  CHECK(std::fabs(rep.point.x[0] - 0.72821552142440904) <= 1e-9);
}

TEST_CASE("sigma feasibility: closed form against the grid oracle") {
  SUBCASE("vanishing constants with mild contraction are feasible") {
    const SigmaWitness w = solve_sigma_feasibility(0.0, 0.5, 0.5, 0.0);
    CHECK(w.found);
    CHECK(w.s1 > 0.0);
    CHECK(w.s2 > 0.0);
    CHECK(sigma_grid_feasible(0.0, 0.5, 0.5, 0.0));
  }
  SUBCASE("degenerate contraction is infeasible") {
    CHECK_FALSE(solve_sigma_feasibility(0.1, 1.0, 0.5, 0.1).found);
    CHECK_FALSE(solve_sigma_feasibility(0.1, 0.5, 1.0, 0.1).found);
  }
  SUBCASE("random tuples cross-validate") {
    Xoshiro256pp rng(404);
    int feasible_seen = 0;
    for (int trial = 0; trial < 300; ++trial) {
      const double nu = rng.uniform(0.0, 0.6);
      const double phi = rng.uniform(0.0, 1.2);
      const double eta = rng.uniform(0.0, 1.2);
      const double rb = rng.uniform(0.0, 0.6);
      const SigmaWitness w = solve_sigma_feasibility(nu, phi, eta, rb);
      if (w.found) {
        ++feasible_seen;
        // The witness must satisfy the raw strict inequalities.
        const double lhs1 = nu * nu + w.s2 * nu * nu / (1.0 - eta * eta) +
                            w.s1 * phi * phi / (1.0 - phi * phi);
        const double lhs2 = rb * rb + w.s1 * rb * rb / (1.0 - phi * phi) +
                            w.s2 * eta * eta / (1.0 - eta * eta);
        CHECK(lhs1 < w.s1);
        CHECK(lhs2 < w.s2);
      }
      if (sigma_grid_feasible(nu, phi, eta, rb)) CHECK(w.found);
    }
    CHECK(feasible_seen > 0);
  }
}

TEST_CASE("diffused certificate on a crafted stable configuration") {
  // beta = 0 keeps B* = 0 and the effort bound trivial; theta(1-x) = delta
  // makes nu vanish; phi = |1 - delta| = 0.5.
  Scenario sc;
  sc.physical = NetworkLayer(1);
  sc.physical.weights(0, 0) = 1.0;
  sc.social = sc.physical;
  sc.params.beta = {0.0};
  sc.params.gamma = {0.1};
  sc.params.theta = {0.8};
  sc.params.delta = {0.5};
  sc.params.lambda = {0.0};
  sc.params.xi = {0.0};
  sc.params.prejudice = {0.375};
  sc.initial.a = {0.2};
  sc.initial.d = {0.0};
  sc.initial.x = {0.375};

  EquilibriumReport rep;
  rep.kind = EquilibriumKind::AdoptionDiffused;
  rep.point.a = {0.0};
  rep.point.d = {0.5};
  rep.point.x = {0.375};
  rep = certify_diffused(rep, sc, 0.5);
  CHECK(rep.certificate == Certificate::LocalStable);
  CHECK(rep.sigma.found);
  CHECK(std::fabs(rep.nu) <= 1e-12);
  CHECK(rep.phi == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(sigma_grid_feasible(rep.nu, rep.phi, rep.eta, 0.0) == rep.sigma.found);
}

TEST_CASE("diffused certificate degenerates when phi >= 1") {
  Scenario sc = scalar_scenario(0.8, 1.0);
  sc.params.delta = {0.0};  // phi >= |1 - 0 - bstar| + beta >= 1
  const EquilibriumReport found = find_diffused_equilibrium(sc);
  REQUIRE(found.kind == EquilibriumKind::AdoptionDiffused);
  const EquilibriumReport rep = certify_diffused(found, sc, 0.5);
  CHECK(rep.certificate == Certificate::Inconclusive);
  CHECK(rep.reason.find("contraction factor") != std::string::npos);
}

TEST_CASE("scalar supercritical certificate matches the grid verdict") {
  const Scenario sc = scalar_scenario(0.8, 1.0);
  const EquilibriumReport found = find_diffused_equilibrium(sc);
  const EquilibriumReport rep = certify_diffused(found, sc, 0.5);
  const double rho_b = rep.bstar_diag[0];
  CHECK(rep.sigma.found == sigma_grid_feasible(rep.nu, rep.phi, rep.eta, rho_b));
  // Frozen verdict: phi > 1 here, so the certificate cannot close.
  CHECK(rep.phi > 1.0);
  CHECK(rep.certificate == Certificate::Inconclusive);
}

TEST_CASE("certificates agree with long simulations") {
  int stable_checked = 0;
  int unstable_checked = 0;
  Xoshiro256pp rng(2024);
  for (uint64_t seed = 500; seed < 600 && (stable_checked < 3 || unstable_checked < 3);
       ++seed) {
    const int n = 2 + static_cast<int>(seed % 4);
    const Scenario sc = generate_scenario(seed, n);
    const EquilibriumReport rep = certify_adoption_free(sc);
    if (rep.certificate == Certificate::GloballyStable && stable_checked < 3) {
      ++stable_checked;
      Scenario run = sc;
      for (int j = 0; j < n; ++j) {
        run.initial.a[j] = rng.uniform(0.0, 0.7);
        run.initial.d[j] = rng.uniform(0.0, 1.0 - run.initial.a[j]);
        run.initial.x[j] = rng.uniform();
      }
      SystemState st = run.initial;
      for (int t = 0; t < 10000; ++t) st = step(st, run);
      const Vec ps = psi(rep.point.x, sc.params);
      for (int j = 0; j < n; ++j) {
        CHECK(std::fabs(st.a[j]) <= 1e-6);
        CHECK(std::fabs(st.d[j] - ps[j]) <= 1e-6);
        CHECK(std::fabs(st.x[j] - rep.point.x[j]) <= 1e-8);
      }
    }
    if (rep.certificate == Certificate::Unstable && unstable_checked < 3) {
      ++unstable_checked;
      Scenario run = sc;
      run.initial.a.assign(n, 1e-4);
      run.initial.d.assign(n, 0.0);
      const Trajectory traj = simulate(run, 10);
      for (int t = 1; t <= 10; ++t)
        CHECK(l1_norm(traj.states[t].a) > l1_norm(traj.states[t - 1].a));
    }
  }
  CHECK(stable_checked == 3);
  CHECK(unstable_checked == 3);
}

TEST_CASE("diffused finder rejects out-of-range seeds") {
  CHECK_THROWS_AS(find_diffused_equilibrium(scalar_scenario(), 0.0), PreconditionError);
  CHECK_THROWS_AS(find_diffused_equilibrium(scalar_scenario(), 0.2), PreconditionError);
}
