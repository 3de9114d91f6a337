#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace bykov {

struct HopfParams {
  double mu1 = 0.0;
  double mu2 = 1.0;
  double a_h = 1.0;
  double c = 0.0;
  double d = 0.0;
  double e = 0.0;
  double f = 0.0;
  double omega_lift = 1.0;
};

struct PlanarState {
  double r = 0.0;
  double z = 0.0;
};

struct PlanarVelocity {
  double dr = 0.0;
  double dz = 0.0;
};

class NoEquilibrium : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class DegenerateCoefficients : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};
class StepFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class OrbitLost : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

PlanarVelocity field_order2(const PlanarState& s, const HopfParams& p);
PlanarVelocity field_order3(const PlanarState& s, const HopfParams& p);
PlanarVelocity field(const PlanarState& s, const HopfParams& p, int order);

// 3c+e > d+3f and 3(3c+e)+d+3f < 0
bool hopf_constants_hold(const HopfParams& p);

struct Equilibrium {
  PlanarState state;
  double radial_eig = 0.0;  // dr'/dr
  double axial_eig = 0.0;   // dz'/dz
};

// z-axis equilibria, upper one first.
std::vector<Equilibrium> equilibria_and_eigenvalues(const HopfParams& p, int order);

// Central-difference Jacobian [[dr'/dr, dr'/dz], [dz'/dr, dz'/dz]].
std::array<double, 4> numeric_jacobian(const HopfParams& p, int order, const PlanarState& s,
                                       double step = 1e-6);
// Eigenvalues of a real 2x2 matrix with real spectrum, larger first.
std::array<double, 2> real_eigenvalues(const std::array<double, 4>& m);

double first_integral_G(const PlanarState& s, const HopfParams& p);
std::array<double, 2> first_integral_gradient(const PlanarState& s, const HopfParams& p);

// Slope of the line mu2 = slope * mu1 carrying the attracting heteroclinic cycle.
double ahc_line(double c, double d, double e, double f);

// Contraction exponent of a cycle p2 -> p1 -> p2 from the axis eigenvalues:
// (C1/E1)(C2/E2) with the lower equilibrium in the role of the first saddle-focus.
double cycle_delta(const std::vector<Equilibrium>& eq);

// Order 3: bisects mu1 in [lo, hi] (mu2 fixed) for the parameter at which the
// unstable branch of the upper axis equilibrium lands on the lower one.
// The AHC line is a first-order estimate of this value and makes a good bracket centre.
double heteroclinic_mu1(HopfParams p, double lo, double hi, double tol = 1e-14);

// ----------------------------------------------------------------- integration

template <std::size_t N>
using FlowState = std::array<double, N>;

// Fixed-step classical Runge-Kutta with compensated accumulation of the state.
// Component 0 is a radius: steps that would make it < -1e-12 are retried with
// halved sub-steps.
template <std::size_t N>
class Rk4 {
 public:
  using State = FlowState<N>;
  using Field = std::function<State(const State&)>;

  explicit Rk4(Field f) : f_(std::move(f)) {}

  static State raw_step(const Field& f, const State& s, double h) {
    const State k1 = f(s);
    const State k2 = f(axpy(s, 0.5 * h, k1));
    const State k3 = f(axpy(s, 0.5 * h, k2));
    const State k4 = f(axpy(s, h, k3));
    State out;
    for (std::size_t i = 0; i < N; ++i)
      out[i] = s[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
  }

  // Advance (state, comp) by h. Throws StepFailure after 40 halvings.
  void step(State& s, State& comp, double h) const {
    advance(s, comp, h, 0);
  }

 private:
  static State axpy(const State& s, double h, const State& k) {
    State o;
    for (std::size_t i = 0; i < N; ++i) o[i] = s[i] + h * k[i];
    return o;
  }

  void advance(State& s, State& comp, double h, int depth) const {
    const State k1 = f_(s);
    const State k2 = f_(axpy(s, 0.5 * h, k1));
    const State k3 = f_(axpy(s, 0.5 * h, k2));
    const State k4 = f_(axpy(s, h, k3));
    State inc;
    for (std::size_t i = 0; i < N; ++i) inc[i] = h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    if (s[0] + inc[0] < -1e-12) {
      if (depth >= 40) throw StepFailure("integrator: step failure after 40 halvings");
      advance(s, comp, 0.5 * h, depth + 1);
      advance(s, comp, 0.5 * h, depth + 1);
      return;
    }
    for (std::size_t i = 0; i < N; ++i) {
      const double y = inc[i] - comp[i];
      const double t = s[i] + y;
      comp[i] = (t - s[i]) - y;
      s[i] = t;
    }
  }

  Field f_;
};

struct Trajectory {
  std::vector<double> t;
  std::vector<PlanarState> states;
};

using PlanarField = std::function<PlanarVelocity(const PlanarState&)>;

// Samples every step from t_span[0] to t_span[1]; the last step is shortened to land on t1.
Trajectory integrate(const PlanarField& f, const PlanarState& s0, std::array<double, 2> t_span,
                     double h);

// ---------------------------------------------------------------- lifted flow

enum class Crossing { Downward, Upward };

struct SectionSpec {
  double z0 = 0.0;
  Crossing direction = Crossing::Downward;
  PlanarState s0{0.5, 0.0};
  double theta0 = 0.0;
  double h = 1e-3;
  double t_max = 1e4;
  double box = 10.0;  // |r|, |z| bound
};

struct SectionHit {
  double t = 0.0;
  double theta = 0.0;  // in [0, 2pi)
  double r = 0.0;      // section coordinate
};

struct SectionPair {
  SectionHit from;
  SectionHit to;
};

struct SectionResult {
  std::vector<SectionHit> hits;
  std::vector<SectionPair> pairs;
};

SectionResult lift_and_section(const HopfParams& p, int order, const SectionSpec& spec,
                               int n_hits);

// Least-squares slope of ln r_{n+1} against ln r_n.
double fit_return_exponent(const std::vector<SectionHit>& hits);

}  // namespace bykov
