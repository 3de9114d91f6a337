#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bykov/maps.hpp"
#include "bykov/regimes.hpp"

namespace bykov {

// ---------------------------------------------------------------- orbits

struct OrbitRecord {
  std::vector<CylinderPoint> points;
  bool escaped = false;
  std::optional<long> escape_index;  // iterate (counting the transient) that escaped
};

OrbitRecord iterate(const ReturnMap& map, const CylinderPoint& p0, long n, long transient = 0);

struct LyapunovEstimate {
  double lambda_max = 0.0;
  double lambda_sum = 0.0;
  double log_det_average = 0.0;  // Birkhoff average of ln(delta u^(delta-1))
  long steps = 0;                // recorded steps after the transient
  bool escaped = false;
  std::optional<long> escape_index;
  CylinderPoint final_point;
};

// Throws std::logic_error if lambda_sum and the log-det average disagree by more than 1e-8.
LyapunovEstimate lyapunov_spectrum(const ReturnMap& map, const CylinderPoint& p0, long n,
                                   long transient);

// ---------------------------------------------------------- invariant circle

struct CircleGraph {
  std::vector<double> heights;  // h(2 pi i / N)
  int iterations = 0;
  double last_change = 0.0;
  double residual = 0.0;

  int N() const { return static_cast<int>(heights.size()); }
  double node(int i) const { return kTwoPi * i / N(); }
  // Periodic four-point Lagrange interpolation of the node values.
  double height_at(double x) const;
};

class FoldDetected : public std::runtime_error {
 public:
  FoldDetected(int iteration, double x);
  int iteration() const { return iteration_; }
  double x() const { return x_; }

 private:
  int iteration_;
  double x_;
};

class NoConvergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

CircleGraph graph_transform(const ReturnMap& map, const AnnulusBand& band, int N = 1024,
                            double tol = 1e-12, int max_iter = 500);

// sup_i |F(x_i, h_i).y - h(F(x_i, h_i).x)|
double invariance_residual(const ReturnMap& map, const CircleGraph& circle);

struct RotationEstimate {
  double rho = 0.0;       // lifted average advance / 2 pi over n iterates
  double rho_half = 0.0;  // same over the first n/2 iterates
  bool converged = false;
  double rho_mod1() const;
};

RotationEstimate rotation_number(const std::function<double(double)>& lifted_circle_map,
                                 double x0, long n);
RotationEstimate rotation_number(const ReturnMap& map, const CircleGraph& circle, long n);

// -------------------------------------------------------------- periodic orbits

enum class Stability { Sink, Saddle, Source, NonHyperbolic };
const char* to_string(Stability s);

struct PeriodicOrbit {
  int period = 1;
  int winding = 0;  // lifted advance of eval^period is 2 pi * winding
  std::vector<CylinderPoint> points;
  std::array<std::complex<double>, 2> multipliers{};
  Stability stability = Stability::NonHyperbolic;
  double det_product = 0.0;  // prod_j delta u_j^(delta-1)
  JacobianMatrix monodromy;  // Jacobian of eval^period at points[0]
};

struct SeedSpec {
  int nx = 64;
  int ny = 8;
  std::optional<double> y_lo;  // defaults to the annulus band
  std::optional<double> y_hi;
  int max_newton = 60;
  double tol = 1e-12;
  std::vector<CoverPoint> extra;  // additional seeds tried first
};

std::vector<PeriodicOrbit> find_periodic(const ReturnMap& map, int k, const SeedSpec& seeds = {});

// Unit eigenvector of the monodromy for a real multiplier, in (x, y) coordinates.
std::array<double, 2> eigenvector(const JacobianMatrix& M, double mu);

struct Range {
  double lo = 0.0;
  double hi = 0.0;
  int n = 0;
  double at(int i) const { return n <= 1 ? lo : lo + (hi - lo) * i / (n - 1); }
};

// Maps over (A, a) or (K_omega, a) with the remaining constants fixed.
struct MapFamily {
  double delta = 2.0;
  double K_omega = 1.0;
  double A = 0.01;
  ReturnMap at_A(double A_, double a) const { return ReturnMap(delta, K_omega, A_, a * A_); }
  ReturnMap at_K(double K, double a) const { return ReturnMap(delta, K, A, a * A); }
};

struct BoundaryPoint {
  double A = 0.0;
  double a = 0.0;
};

struct TongueColumn {
  double A = 0.0;
  bool present = false;  // a birth transition was located in the a-range
  double a_birth = 0.0;
};

struct TongueBoundary {
  std::vector<BoundaryPoint> B1;  // columns left of the tip
  std::vector<BoundaryPoint> B2;  // columns right of the tip
  std::vector<TongueColumn> columns;
};

// Orbits of the given period and winding exist at (A, a)?
bool locked_orbit_exists(const ReturnMap& map, int k, int winding, SeedSpec seeds,
                         std::vector<CoverPoint>* found = nullptr);

TongueBoundary tongue_boundary(const MapFamily& family, int k, int winding, const Range& a_range,
                               const Range& A_range, double a_tol = 1e-10);

// ------------------------------------------------------------------ manifolds

enum class ManifoldSide { Stable, Unstable };

struct ManifoldOptions {
  double max_arclength = 50.0;  // in the scaled metric
  double spacing = 2e-3;
  double seed_distance = 1e-6;
  double max_turn = 0.3;  // radians between consecutive segments
  std::optional<double> y_scale;  // metric uses (dx, dy / y_scale); default A^delta
  int branch = +1;
  int max_images = 400;
  int max_points = 400000;
  std::optional<double> y_min;  // growth stops when leaving [y_min, y_max]
  std::optional<double> y_max;
};

struct ManifoldCurve {
  PeriodicOrbit anchor;
  ManifoldSide side = ManifoldSide::Unstable;
  int branch = +1;
  std::vector<CoverPoint> polyline;  // starts at anchor.points[0], angle lifted
  double arclength = 0.0;
  double y_scale = 1.0;
  bool truncated = false;
  std::string stop_reason;
};

ManifoldCurve grow_manifold(const ReturnMap& map, const PeriodicOrbit& orbit, ManifoldSide side,
                            const ManifoldOptions& options = {});

struct HomoclinicSearch {
  ManifoldOptions manifold;
  // Pairs of segments both within this arclength of the anchor are ignored.
  double local_arclength = 0.05;
  double tol_tangent = 1e-4;
};

struct HomoclinicCrossing {
  CylinderPoint point;
  double orientation = 0.0;  // sign of the crossing determinant
};

struct HomoclinicReport {
  double min_distance = 0.0;
  std::vector<HomoclinicCrossing> crossings;
  bool tangency_flag = false;
};

HomoclinicReport detect_homoclinic(const ManifoldCurve& unstable, const ManifoldCurve& stable,
                                   const HomoclinicSearch& search = {});
// Grows both branches on both sides and merges the four pairings.
HomoclinicReport detect_homoclinic(const ReturnMap& map, const PeriodicOrbit& orbit,
                                   const HomoclinicSearch& search = {});

// ---------------------------------------------------------------- parameter scan

enum class SweepAxis { A, K_omega };
enum class CellClass { Regular, StrangeCandidate, Escaped };
const char* to_string(CellClass c);

struct ScanGrid {
  SweepAxis axis = SweepAxis::A;
  Range x;  // A or K_omega, columns
  Range a;  // rows
};

struct ScanBudget {
  int orbits = 4;
  long iterations = 10000;
  long transient = 2000;
};

struct CellResult {
  int row = 0;
  int col = 0;
  double x = 0.0;
  double a = 0.0;
  double lambda_max = 0.0;
  double lambda_sum = 0.0;
  double escape_fraction = 0.0;
  bool escaped = false;
  CellClass cls = CellClass::Regular;
  Regime regime = Regime::Torus;
};

struct ScanResult {
  std::vector<CellResult> cells;  // row-major, rows over a
  double strange_fraction = 0.0;
};

ScanResult strange_attractor_scan(const MapFamily& family, const ScanGrid& grid,
                                  const ScanBudget& budget, std::uint64_t seed, int workers);

// Resolve a worker count: requested > 0 wins, then BYKOV_THREADS, then hardware.
int resolve_workers(int requested);

}  // namespace bykov
