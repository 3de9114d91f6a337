#pragma once

#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace bykov {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Thrown when a formula is evaluated outside the set where it is defined.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Eigenvalue data of the two saddle-foci and the two splitting amplitudes.
// O1 has eigenvalues -C1 +- i*omega1 and E1; O2 has E2 +- i*omega2 and -C2.
struct ModelParams {
  double C1 = 1.1;
  double E1 = 0.9;
  double omega1 = 1.0;
  double C2 = 1.1;
  double E2 = 0.9;
  double omega2 = 1.0;
  double A = 0.01;
  double lambda = 0.002;

  // Symmetric eigenvalue data (E=1, C=sqrt(delta) at both points) whose
  // derived constants reproduce the given delta and K_omega.
  static ModelParams realizing(double delta, double K_omega, double A, double lambda);
};

struct Validation {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

// Never throws; every failed inequality is reported by name.
Validation validate(const ModelParams& params);

struct DerivedConstants {
  double delta1 = 0.0;
  double delta2 = 0.0;
  double delta = 0.0;
  double K = 0.0;
  double K_omega = 0.0;
  double A = 0.0;
  double lambda = 0.0;

  // lambda / A. Throws DomainError when A == 0.
  double a() const;
};

// Throws std::invalid_argument listing the violations if validate() fails.
DerivedConstants derive_constants(const ModelParams& params);

// Reduce into [0, 2pi).
double wrap_angle(double x);
// Distance on the circle, in [0, pi].
double circle_distance(double x1, double x2);

class CylinderPoint {
 public:
  CylinderPoint() = default;
  CylinderPoint(double x, double y) : x_(wrap_angle(x)), y_(y) {}
  double x() const { return x_; }
  double y() const { return y_; }

 private:
  double x_ = 0.0;
  double y_ = 0.0;
};

// Point of the universal cover: the angle is kept unreduced.
struct CoverPoint {
  double x = 0.0;
  double y = 0.0;
  CylinderPoint reduced() const { return {x, y}; }
};

}  // namespace bykov
