#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "bykov/hopf.hpp"

using namespace bykov;

namespace {

HopfParams ahc_params(double mu2) {
  HopfParams p;
  p.mu2 = mu2;
  p.c = 0.0;
  p.e = -1.0;
  p.d = -2.0;
  p.f = 0.0;
  return p;
}

// Bisection for the roots of dz/dt on the axis, independent of the library's Newton.
double axis_root(const HopfParams& p, double lo, double hi) {
  auto g = [&](double z) { return field_order3({0.0, z}, p).dz; };
  double glo = g(lo);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double gm = g(mid);
    if ((gm < 0.0) == (glo < 0.0)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("order-2 field examples") {
  HopfParams p;
  p.mu1 = 0.3;
  p.mu2 = 0.8;
  p.a_h = 1.7;
  CHECK(field_order2({0.0, 0.37}, p).dr == 0.0);
  CHECK(std::fabs(field_order2({0.0, std::sqrt(p.mu2)}, p).dz) < 1e-15);
  const PlanarState centre{std::sqrt(p.mu2 - p.mu1 * p.mu1 / (p.a_h * p.a_h)), -p.mu1 / p.a_h};
  const PlanarVelocity v = field_order2(centre, p);
  CHECK(std::fabs(v.dr) < 1e-15);
  CHECK(std::fabs(v.dz) < 1e-15);
}

TEST_CASE("order-3 field reduces to order 2 and keeps the axis") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  HopfParams p;
  p.mu1 = 0.2;
  p.mu2 = 0.7;
  p.a_h = 1.3;
  for (int i = 0; i < 1000; ++i) {
    const PlanarState s{std::fabs(u(rng)), u(rng)};
    const PlanarVelocity a = field_order2(s, p), b = field_order3(s, p);
    REQUIRE(a.dr == b.dr);
    REQUIRE(a.dz == b.dz);
  }
  HopfParams q = ahc_params(0.04);
  q.c = 0.3;
  q.f = 0.2;
  CHECK(field_order3({0.0, 0.5}, q).dr == 0.0);
}

TEST_CASE("order-3 axis equilibria match a bisection root-find") {
  HopfParams p = ahc_params(0.04);
  p.f = 0.1;
  const auto eq = equilibria_and_eigenvalues(p, 3);
  REQUIRE(eq.size() == 2);
  CHECK(eq[0].state.z > eq[1].state.z);
  const double top = axis_root(p, 0.0, 1.0);
  const double bottom = axis_root(p, -1.0, 0.0);
  CHECK(std::fabs(eq[0].state.z - top) < 1e-12);
  CHECK(std::fabs(eq[1].state.z - bottom) < 1e-12);
  // The seed estimate sqrt(mu2) + f/2 leaves a residual of order mu2 + f^2.
  CHECK(std::fabs(field_order3({0.0, 0.2 + 0.05}, p).dz) < p.mu2 + p.f * p.f);
  for (const auto& e : eq) {
    const auto J = numeric_jacobian(p, 3, e.state);
    CHECK(std::fabs(J[0] - e.radial_eig) < 1e-8);
    CHECK(std::fabs(J[3] - e.axial_eig) < 1e-8);
  }
}

TEST_CASE("order-2 equilibria and eigenvalues") {
  HopfParams p;
  auto eq = equilibria_and_eigenvalues(p, 2);
  REQUIRE(eq.size() == 2);
  CHECK(eq[0].state.z == 1.0);
  CHECK(eq[0].radial_eig == 1.0);
  CHECK(eq[0].axial_eig == -2.0);
  CHECK(eq[1].state.z == -1.0);
  CHECK(eq[1].radial_eig == -1.0);
  CHECK(eq[1].axial_eig == 2.0);
  for (const auto& e : eq) {
    const auto ev = real_eigenvalues(numeric_jacobian(p, 2, e.state));
    const double lo = std::min(e.radial_eig, e.axial_eig), hi = std::max(e.radial_eig, e.axial_eig);
    CHECK(std::fabs(ev[0] - hi) < 1e-8);
    CHECK(std::fabs(ev[1] - lo) < 1e-8);
  }

  p.mu1 = 0.1;
  p.a_h = 2.0;
  eq = equilibria_and_eigenvalues(p, 2);
  CHECK(eq[0].radial_eig == doctest::Approx(2.1).epsilon(1e-15));
  CHECK(eq[0].axial_eig == doctest::Approx(-2.0).epsilon(1e-15));

  p.mu2 = -1.0;
  CHECK_THROWS_AS(equilibria_and_eigenvalues(p, 2), NoEquilibrium);
  CHECK_THROWS_AS(equilibria_and_eigenvalues(p, 3), NoEquilibrium);
}

TEST_CASE("first integral") {
  HopfParams p;
  CHECK(first_integral_G({0.0, 0.3}, p) == 0.0);
  CHECK(first_integral_G({0.5, 0.0}, p) == doctest::Approx(0.109375).epsilon(1e-15));

  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> ur(0.05, 1.5), uz(-1.5, 1.5), ua(0.3, 3.0);
  for (int i = 0; i < 100; ++i) {
    HopfParams q;
    q.a_h = ua(rng);
    q.mu2 = ur(rng);
    const PlanarState s{ur(rng), uz(rng)};
    const PlanarVelocity v = field_order2(s, q);
    const auto g = first_integral_gradient(s, q);
    const double lie = g[0] * v.dr + g[1] * v.dz;
    const double scale = std::fabs(g[0] * v.dr) + std::fabs(g[1] * v.dz) + 1e-300;
    REQUIRE(std::fabs(lie) < 1e-12 * std::max(1.0, scale));
    // Gradient against central differences.
    const double h = 1e-6;
    const double gr = (first_integral_G({s.r + h, s.z}, q) - first_integral_G({s.r - h, s.z}, q)) / (2 * h);
    const double gz = (first_integral_G({s.r, s.z + h}, q) - first_integral_G({s.r, s.z - h}, q)) / (2 * h);
    REQUIRE(std::fabs(gr - g[0]) < 1e-6 * std::max(1.0, std::fabs(g[0])));
    REQUIRE(std::fabs(gz - g[1]) < 1e-6 * std::max(1.0, std::fabs(g[1])));
  }
}

TEST_CASE("AHC line") {
  CHECK_THROWS_AS(ahc_line(-1.0, 0.0, 0.0, 0.0), DegenerateCoefficients);
  CHECK(ahc_line(0.0, -2.0, -1.0, 0.0) == doctest::Approx(0.8).epsilon(1e-15));
  CHECK_THROWS_AS(ahc_line(0.0, -3.0, 1.0, 0.0), DegenerateCoefficients);
  HopfParams p = ahc_params(1.0);
  CHECK(hopf_constants_hold(p));
}

TEST_CASE("integrator examples") {
  const PlanarField decay = [](const PlanarState& s) { return PlanarVelocity{0.0, -s.z}; };
  const Trajectory tr = integrate(decay, {0.0, 2.0}, {0.0, 1.0}, 1e-3);
  CHECK(tr.t.back() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::fabs(tr.states.back().z - 2.0 * std::exp(-1.0)) < 1e-9);

  HopfParams p;
  const PlanarField f2 = [&](const PlanarState& s) { return field_order2(s, p); };
  const Trajectory axis = integrate(f2, {0.0, 0.3}, {0.0, 10.0}, 1e-3);
  for (const auto& s : axis.states) REQUIRE(s.r == 0.0);

  CHECK_THROWS_AS(integrate(decay, {0.0, 1.0}, {0.0, 1.0}, 0.0), std::invalid_argument);
  const PlanarField plunge = [](const PlanarState&) { return PlanarVelocity{-1e6, 0.0}; };
  CHECK_THROWS_AS(integrate(plunge, {0.0, 0.0}, {0.0, 1.0}, 1e-3), StepFailure);
}

TEST_CASE("conservation of G and fourth-order convergence") {
  HopfParams p;
  const PlanarField f2 = [&](const PlanarState& s) { return field_order2(s, p); };
  auto drift = [&](double h) {
    const Trajectory tr = integrate(f2, {0.5, 0.0}, {0.0, 10.0}, h);
    const double g0 = first_integral_G(tr.states.front(), p);
    double worst = 0.0;
    for (const auto& s : tr.states) worst = std::max(worst, std::fabs(first_integral_G(s, p) - g0));
    return worst;
  };
  const double d1 = drift(1e-3), d2 = drift(5e-4);
  CHECK(d1 < 1e-8);
  CHECK(d1 / d2 >= 12.0);

  // Smooth linear oscillator about r = 2: endpoint error ratio close to 16.
  const PlanarField rot = [](const PlanarState& s) { return PlanarVelocity{s.z, 2.0 - s.r}; };
  auto err = [&](double h) {
    const Trajectory tr = integrate(rot, {3.0, 0.0}, {0.0, 2.0}, h);
    return std::fabs(tr.states.back().r - (2.0 + std::cos(2.0)));
  };
  const double ratio = err(0.1) / err(0.05);
  CHECK(ratio > 14.0);
  CHECK(ratio < 18.0);
}

TEST_CASE("section under the pure rotation lift") {
  HopfParams p;
  p.omega_lift = 1.3;
  SectionSpec spec;
  spec.s0 = {0.5, 0.0};
  spec.direction = Crossing::Upward;
  spec.theta0 = 0.4;
  const SectionResult res = lift_and_section(p, 2, spec, 6);
  REQUIRE(res.hits.size() == 6);
  CHECK(res.pairs.size() == 5);
  std::vector<double> inc;
  for (const auto& pr : res.pairs) {
    double d = pr.to.theta - pr.from.theta;
    d -= 2.0 * M_PI * std::floor(d / (2.0 * M_PI));
    inc.push_back(d);
  }
  const double mean = std::accumulate(inc.begin(), inc.end(), 0.0) / inc.size();
  double var = 0.0;
  for (double d : inc) var += (d - mean) * (d - mean);
  CHECK(std::sqrt(var / inc.size()) < 1e-6);
  // Projecting out theta: the angle is the rotation of the hit time, and the
  // radial coordinate is the planar orbit's value, conserved since mu1 = 0.
  for (const auto& h : res.hits) {
    double expect = 0.4 + 1.3 * h.t;
    expect -= 2.0 * M_PI * std::floor(expect / (2.0 * M_PI));
    CHECK(std::fabs(h.theta - expect) < 1e-9);
    CHECK(std::fabs(h.r - res.hits[0].r) < 1e-8);
  }
  CHECK_THROWS_AS(lift_and_section(p, 2, spec, 0), std::invalid_argument);
  spec.box = 0.6;
  spec.s0 = {0.59, 0.0};
  CHECK_THROWS_AS(lift_and_section(p, 2, spec, 3), OrbitLost);
}

TEST_CASE("heteroclinic connection near the AHC line") {
  const HopfParams p = ahc_params(0.04);
  const double line_mu1 = 0.04 / ahc_line(p.c, p.d, p.e, p.f);
  const double mu1 = heteroclinic_mu1(p, 0.0, 1.5 * line_mu1);
  CHECK(mu1 > 0.0);
  CHECK(mu1 < line_mu1);
  CHECK(std::fabs(mu1 - 0.0327493613438) < 1e-9);
  CHECK_THROWS_AS(heteroclinic_mu1(p, 0.5 * line_mu1 + 0.02, 1.5 * line_mu1), std::invalid_argument);
}

TEST_CASE("return near the attracting cycle contracts with the predicted exponent") {
  HopfParams p = ahc_params(0.04);
  p.mu1 = heteroclinic_mu1(p, 0.0, 1.5 * 0.04 / 0.8);
  const auto eq = equilibria_and_eigenvalues(p, 3);
  const double delta = cycle_delta(eq);
  CHECK(delta > 1.0);

  SectionSpec spec;
  spec.s0 = {0.05, 0.0};
  spec.direction = Crossing::Upward;
  spec.h = 5e-3;
  spec.t_max = 1e6;
  const SectionResult res = lift_and_section(p, 3, spec, 5);
  for (std::size_t k = 0; k + 1 < res.hits.size(); ++k) CHECK(res.hits[k + 1].r < res.hits[k].r);
  const double fit = fit_return_exponent(res.hits);
  CHECK(std::fabs(fit - delta) < 0.1 * delta);
}
