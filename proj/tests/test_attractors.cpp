#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "bykov/attractors.hpp"

using namespace bykov;

namespace {

const ModelParams kTorus{1.1, 0.9, 1.0, 1.1, 0.9, 1.0, 0.01, 0.002};
const double kK4 = 4.0 * kPi / std::log(2.0);
// 40-digit root of y = (y + 0.01)^2 on the small branch.
const double kYStar = 1.020514433643803605431850588217216068e-4;
const double kRhoStar = 0.7313196313507817183527470297438573309;

// Tongue-tip configuration with a locked pair: K = 1, delta = 2, A = e^{-2pi}.
const double kATip = std::exp(-kTwoPi);
ReturnMap tongue_map(double a = 0.1) { return ReturnMap(2.0, 1.0, kATip, a * kATip); }

// Closed-form fixed points with lifted advance 2 pi m: u = e^{-2 pi m / K},
// y = u^delta, sin x = (u - u^delta - A) / lambda.
struct LockedOracle {
  double u, y, sin_x;
};
LockedOracle locked_oracle(double delta, double K, double A, double lambda, int m) {
  const double u = std::exp(-kTwoPi * m / K);
  const double y = std::pow(u, delta);
  return {u, y, (u - y - A) / lambda};
}

const PeriodicOrbit* find_by(const std::vector<PeriodicOrbit>& v, Stability s) {
  for (const auto& o : v)
    if (o.stability == s) return &o;
  return nullptr;
}

}  // namespace

TEST_CASE("iterate examples") {
  const ReturnMap flat(2.0, 1.0, 0.01, 0.0);
  const OrbitRecord rec = iterate(flat, {0.0, kYStar}, 200);
  CHECK(rec.points.size() == 200);
  CHECK_FALSE(rec.escaped);
  for (const auto& p : rec.points) REQUIRE(std::fabs(p.y() - kYStar) < 1e-18);
  // Recorded points are consecutive images.
  const ReturnMap m(kTorus);
  const OrbitRecord r2 = iterate(m, {1.0, 1e-4}, 50, 7);
  for (std::size_t i = 0; i + 1 < r2.points.size(); ++i) {
    const CylinderPoint q = m.eval(r2.points[i]);
    REQUIRE(q.x() == r2.points[i + 1].x());
    REQUIRE(q.y() == r2.points[i + 1].y());
  }

  CHECK_THROWS_AS(iterate(flat, {0.0, 0.0}, 0), std::invalid_argument);

  const ReturnMap wide(2.0, 1.0, 0.1, 0.2);
  const OrbitRecord esc = iterate(wide, {1.5 * kPi - 0.1, 0.0}, 1000);
  CHECK(esc.escaped);
  REQUIRE(esc.escape_index.has_value());
  CHECK(*esc.escape_index < 10);
}

TEST_CASE("graph transform at lambda = 0 converges to the fixed height") {
  const ReturnMap flat(2.0, 1.0, 0.01, 0.0);
  const CircleGraph c = graph_transform(flat, annulus_band(flat), 1024, 1e-12, 500);
  CHECK(c.iterations <= 60);
  for (double h : c.heights) REQUIRE(std::fabs(h - kYStar) < 1e-10);
  CHECK(c.residual < 5e-12);
}

TEST_CASE("graph transform in the torus regime") {
  const ReturnMap m(kTorus);
  const CircleGraph c = graph_transform(m, annulus_band(m), 1024, 1e-12, 500);
  CHECK(c.N() == 1024);
  CHECK(c.residual < 5e-12);
  CHECK(invariance_residual(m, c) == doctest::Approx(c.residual));
  const AnnulusBand b = annulus_band(m);
  for (double h : c.heights) {
    REQUIRE(h > b.y_lo);
    REQUIRE(h < b.y_hi);
  }
  // Independent residual at off-node points using the direct formula.
  double worst = 0.0;
  for (int i = 0; i < 997; ++i) {
    const double x = kTwoPi * (i + 0.5) / 997;
    const double u = c.height_at(x) + 0.01 + 0.002 * std::sin(x);
    const double X = x - m.K_omega() * std::log(u);
    const double Y = std::pow(u, m.delta());
    worst = std::max(worst, std::fabs(Y - c.height_at(X)));
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("graph transform detects the fold in the horseshoe regime") {
  const ReturnMap m(2.0, kK4, 0.01, 0.009);
  CHECK_THROWS_AS(graph_transform(m, annulus_band(m)), FoldDetected);
  CHECK_THROWS_AS(graph_transform(m, annulus_band(m), 1000), std::invalid_argument);
}

TEST_CASE("annulus principle all-true implies graph-transform convergence") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> uK(0.5, 4.0), uA(0.002, 0.05), uf(0.0, 0.9),
      ud(1.3, 3.0);
  int confirmed = 0;
  for (int i = 0; i < 40; ++i) {
    const double K = uK(rng), A = uA(rng), d = ud(rng);
    const double a = uf(rng) * curve_g(K);
    const ReturnMap m(d, K, A, a * A);
    const AnnulusBand b = annulus_band(m);
    if (!check_annulus_principle(m, b, 64, 64).all()) continue;
    const CircleGraph c = graph_transform(m, b, 4096, 1e-12, 2000);
    CHECK(c.last_change < 1e-12);
    CHECK(c.residual < 5e-12);
    ++confirmed;
  }
  CHECK(confirmed >= 20);
}

TEST_CASE("rotation number examples") {
  const ReturnMap flat(2.0, 1.0, 0.01, 0.0);
  const CircleGraph c = graph_transform(flat, annulus_band(flat));
  const RotationEstimate r = rotation_number(flat, c, 100000);
  CHECK(r.converged);
  CHECK(std::fabs(r.rho_mod1() - kRhoStar) < 1e-9);

  const ReturnMap tip(2.0, 1.0, kATip, 0.0);
  const RotationEstimate t = rotation_number(tip, graph_transform(tip, annulus_band(tip)), 100000);
  const double frac = t.rho_mod1();
  CHECK(std::min(frac, 1.0 - frac) < 2.0 * kATip);

  for (double alpha : {0.3, 1.0, 2.5, 7.0}) {
    const RotationEstimate s = rotation_number([alpha](double x) { return x + alpha; }, 0.0, 4096);
    CHECK(s.rho == doctest::Approx(alpha / kTwoPi).epsilon(1e-14));
    CHECK(s.converged);
  }
}

TEST_CASE("circle map lift is increasing below lambda = g A") {
  for (double f : {0.2, 0.5, 0.8}) {
    const double K = 2.469135802469135802, A = 0.01;
    const ReturnMap m(ModelParams{1.1, 0.9, 1.0, 1.1, 0.9, 1.0, A, f * curve_g(K) * A});
    const CircleGraph c = graph_transform(m, annulus_band(m));
    double min_slope = INFINITY;
    const double h = 1e-5;
    for (int i = 0; i < 2048; ++i) {
      const double x = kTwoPi * i / 2048;
      const double dh = (c.height_at(x + h) - c.height_at(x - h)) / (2 * h);
      const JacobianMatrix J = m.jacobian(x, c.height_at(x));
      min_slope = std::min(min_slope, J.d11 + J.d12 * dh);
    }
    INFO("a/g = " << f);
    CHECK(min_slope > 0.0);
  }
}

TEST_CASE("lyapunov spectrum examples") {
  const ReturnMap flat(2.0, 1.0, 0.01, 0.0);
  const LyapunovEstimate e = lyapunov_spectrum(flat, {0.3, kYStar}, 1000000, 0);
  CHECK(std::fabs(e.lambda_max) < 1e-3);
  CHECK(e.lambda_sum < 0.0);
  CHECK(std::fabs(e.lambda_sum - e.log_det_average) < 1e-8);

  const ReturnMap m(kTorus);
  const LyapunovEstimate t = lyapunov_spectrum(m, {0.0, 1e-4}, 200000, 1000);
  CHECK(t.lambda_max <= 1e-3);
  CHECK(t.lambda_sum < 0.0);
  CHECK(std::fabs(t.lambda_sum - t.log_det_average) < 1e-8);

  CHECK_THROWS_AS(lyapunov_spectrum(m, {0.0, 1e-4}, 999, 0), std::invalid_argument);
  const ReturnMap wide(2.0, 1.0, 0.1, 0.2);
  CHECK(lyapunov_spectrum(wide, {1.5 * kPi - 0.1, 0.0}, 1000, 0).escaped);
}

TEST_CASE("find_periodic against the closed-form locked pair") {
  const ReturnMap m = tongue_map();
  const auto orbits = find_periodic(m, 1);
  const LockedOracle o = locked_oracle(2.0, 1.0, kATip, 0.1 * kATip, 1);
  REQUIRE(std::fabs(o.sin_x) < 1.0);
  std::vector<const PeriodicOrbit*> locked;
  for (const auto& p : orbits)
    if (p.winding == 1) locked.push_back(&p);
  REQUIRE(locked.size() == 2);
  const PeriodicOrbit* sink = find_by(orbits, Stability::Sink);
  const PeriodicOrbit* saddle = find_by(orbits, Stability::Saddle);
  REQUIRE(sink);
  REQUIRE(saddle);
  const double xs = std::asin(o.sin_x);
  for (const PeriodicOrbit* p : {sink, saddle}) {
    CHECK(p->points[0].y() == doctest::Approx(o.y).epsilon(1e-10));
    CHECK(std::sin(p->points[0].x()) == doctest::Approx(o.sin_x).epsilon(1e-8));
    const CylinderPoint q = m.eval(p->points[0]);
    CHECK(circle_distance(q.x(), p->points[0].x()) < 1e-12);
  }
  // The sink sits where cos x > 0 (dF1/dx < 1).
  CHECK(circle_distance(sink->points[0].x(), xs) < 1e-8);
  CHECK(circle_distance(saddle->points[0].x(), kPi - xs) < 1e-8);

  CHECK_THROWS_AS(find_periodic(m, 0), std::invalid_argument);
}

TEST_CASE("multiplier product equals the determinant product") {
  const ReturnMap m(2.0, kK4, 0.0109, 0.0109 * 0.3);
  for (int k : {1, 2, 3}) {
    SeedSpec s;
    s.nx = 48;
    s.ny = 4;
    for (const auto& p : find_periodic(m, k, s)) {
      double prod = 1.0;
      for (const auto& q : p.points) {
        const double u = m.log_argument(q.x(), q.y());
        prod *= 2.0 * u;
      }
      const auto mu = p.multipliers[0] * p.multipliers[1];
      REQUIRE(std::fabs(mu.real() - prod) < 1e-8 * std::max(1.0, prod));
      REQUIRE(std::fabs(p.det_product - prod) <= 1e-12 * prod);
      std::set<std::pair<long, long>> distinct;
      for (const auto& q : p.points) distinct.insert({std::lround(q.x() * 1e6), std::lround(q.y() * 1e12)});
      REQUIRE(static_cast<int>(distinct.size()) == k);
    }
  }
}

TEST_CASE("sink exponents match the multipliers") {
  const ReturnMap m = tongue_map();
  const auto orbits = find_periodic(m, 1);
  const PeriodicOrbit* sink = find_by(orbits, Stability::Sink);
  REQUIRE(sink);
  const double l1 = std::log(std::abs(sink->multipliers[0]));
  const double l2 = std::log(std::abs(sink->multipliers[1]));
  const CylinderPoint start(sink->points[0].x() + 1e-3, sink->points[0].y() * 1.01);
  const LyapunovEstimate e = lyapunov_spectrum(m, start, 100000, 2000);
  CHECK(e.lambda_max < 0.0);
  CHECK(std::fabs(e.lambda_max - l1) < 1e-6);
  CHECK(std::fabs(e.lambda_sum - (l1 + l2)) < 1e-6);
}

TEST_CASE("tongue boundary against the closed form") {
  const MapFamily fam{2.0, 1.0, kATip};
  const double u = std::exp(-kTwoPi);
  const double A_tip = u - u * u;
  const Range A_range{0.7 * A_tip, 1.3 * A_tip, 7};
  const TongueBoundary tb = tongue_boundary(fam, 1, 1, Range{0.0, 0.5, 6}, A_range, 1e-10);
  REQUIRE(tb.columns.size() == 7);
  for (const TongueColumn& c : tb.columns) {
    const double a_b = std::fabs(u - u * u - c.A) / c.A;
    INFO("A = " << c.A);
    if (a_b == 0.0) continue;
    REQUIRE(c.present);
    CHECK(std::fabs(c.a_birth - a_b) < 1e-7);
  }
  // Column 3 is the tip (A = A_tip), where the tongue has zero width.
  CHECK(tb.B1.size() + tb.B2.size() == 6 + (tb.columns[3].present ? 1 : 0));
  CHECK(std::all_of(tb.B1.begin(), tb.B1.end(), [&](const BoundaryPoint& b) { return b.A <= A_tip; }));
  CHECK(std::all_of(tb.B2.begin(), tb.B2.end(), [&](const BoundaryPoint& b) { return b.A >= A_tip; }));

  // Starting above the boundary: the pair exists throughout, no transition.
  const TongueBoundary above = tongue_boundary(fam, 1, 1, Range{0.4, 0.5, 3}, Range{A_tip, A_tip, 1});
  REQUIRE(above.columns.size() == 1);
  CHECK_FALSE(above.columns[0].present);
  CHECK(above.B1.empty());

  CHECK(tongue_boundary(fam, 1, 1, Range{0.0, 0.5, 0}, A_range).columns.empty());
  CHECK(tongue_boundary(fam, 1, 1, Range{0.0, 0.5, 5}, Range{0.0, 0.0, 0}).columns.empty());
}

TEST_CASE("unstable manifold of the saddle closes onto the sink") {
  const ReturnMap m = tongue_map();
  const auto orbits = find_periodic(m, 1);
  const PeriodicOrbit* sink = find_by(orbits, Stability::Sink);
  const PeriodicOrbit* saddle = find_by(orbits, Stability::Saddle);
  REQUIRE(sink);
  REQUIRE(saddle);
  for (int branch : {1, -1}) {
    ManifoldOptions opt;
    opt.branch = branch;
    const ManifoldCurve c = grow_manifold(m, *saddle, ManifoldSide::Unstable, opt);
    INFO("branch " << branch << " stop: " << c.stop_reason);
    CHECK(c.stop_reason == "converged");
    const CoverPoint end = c.polyline.back();
    CHECK(circle_distance(end.x, sink->points[0].x()) < 1e-6);
    CHECK(std::fabs(end.y - sink->points[0].y()) < 1e-6 * c.y_scale);
    // First segment follows the unstable eigenvector.
    const auto v = eigenvector(saddle->monodromy, saddle->multipliers[0].real());
    const double dx = c.polyline[1].x - c.polyline[0].x, dy = c.polyline[1].y - c.polyline[0].y;
    const double cross = dx * v[1] - dy * v[0];
    CHECK(std::fabs(cross) <= 1e-6 * std::hypot(dx, dy) * std::hypot(v[0], v[1]));
    // Spacing bound in the scaled metric.
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < c.polyline.size(); ++i)
      worst = std::max(worst, std::hypot(c.polyline[i + 1].x - c.polyline[i].x,
                                         (c.polyline[i + 1].y - c.polyline[i].y) / c.y_scale));
    CHECK(worst <= opt.spacing * (1.0 + 1e-9));
  }
  CHECK_THROWS_AS(grow_manifold(m, *sink, ManifoldSide::Unstable), std::invalid_argument);
}

TEST_CASE("no homoclinic crossings in the torus regime") {
  const ReturnMap m = tongue_map();
  const auto orbits = find_periodic(m, 1);
  const PeriodicOrbit* saddle = find_by(orbits, Stability::Saddle);
  REQUIRE(saddle);
  HomoclinicSearch s;
  const AnnulusBand b = annulus_band(m);
  s.manifold.y_max = 4.0 * b.y_hi;
  s.manifold.y_min = -2.0 * m.A();
  const HomoclinicReport r = detect_homoclinic(m, *saddle, s);
  CHECK(r.crossings.empty());
  CHECK(r.min_distance > 1e-3);
  CHECK_FALSE(r.tangency_flag);

  const ManifoldCurve u = grow_manifold(m, *saddle, ManifoldSide::Unstable, s.manifold);
  CHECK_THROWS_AS(detect_homoclinic(u, u, s), std::invalid_argument);
}

TEST_CASE("strange-attractor scan basics") {
  const MapFamily fam{1.4938271604938271, 2.469135802469135802, 0.01};
  CHECK(strange_attractor_scan(fam, ScanGrid{SweepAxis::A, {0.005, 0.02, 0}, {0.1, 0.3, 4}}, {}, 1, 1)
            .cells.empty());

  const ScanGrid grid{SweepAxis::A, {0.005, 0.02, 3}, {0.05, 0.3, 3}};
  const ScanBudget budget{3, 5000, 1000};
  const ScanResult one = strange_attractor_scan(fam, grid, budget, 42, 1);
  const ScanResult three = strange_attractor_scan(fam, grid, budget, 42, 3);
  REQUIRE(one.cells.size() == 9);
  for (std::size_t i = 0; i < 9; ++i) {
    const CellResult& c = one.cells[i];
    CHECK(c.row == static_cast<int>(i / 3));
    CHECK(c.col == static_cast<int>(i % 3));
    CHECK(c.regime == Regime::Torus);
    CHECK(c.cls != CellClass::StrangeCandidate);
    CHECK(c.lambda_max == three.cells[i].lambda_max);
    CHECK(c.lambda_sum == three.cells[i].lambda_sum);
  }
  CHECK(one.strange_fraction == 0.0);
  const ScanResult other = strange_attractor_scan(fam, grid, budget, 43, 1);
  CHECK(other.cells[0].lambda_max != one.cells[0].lambda_max);
}
