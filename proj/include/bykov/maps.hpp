#pragma once

#include <cmath>
#include <optional>

#include "bykov/model.hpp"

namespace bykov {

// The orbit left the half-cylinder where the log argument u is positive.
class DomainEscape : public std::runtime_error {
 public:
  explicit DomainEscape(double u);
  double u() const { return u_; }

 private:
  double u_;
};

// Coordinates (r, phi) on the cross-sections Out(O1) / In(O2).
struct RadialPoint {
  double r = 0.0;
  double phi = 0.0;
};

struct JacobianMatrix {
  double d11 = 0.0, d12 = 0.0, d21 = 0.0, d22 = 0.0;
  double det() const { return d11 * d22 - d12 * d21; }
};

// Local passages. Remainder terms are dropped.
RadialPoint local_map_O1(double x, double y, const DerivedConstants& consts,
                         double omega1, double E1);
CylinderPoint local_map_O2(double r, double phi, const DerivedConstants& consts,
                           double omega2, double E2);
RadialPoint local_map_O1(double x, double y, const ModelParams& params);
CylinderPoint local_map_O2(double r, double phi, const ModelParams& params);

inline RadialPoint transition_12(RadialPoint p) { return p; }
inline CylinderPoint transition_21(const CylinderPoint& p, double A, double lambda) {
  return {p.x(), p.y() + A + lambda * std::sin(p.x())};
}

namespace detail {
// Shape of the splitting perturbation. Only sin is provided.
struct SinePerturbation {
  static double value(double x) { return std::sin(x); }
  static double slope(double x) { return std::cos(x); }
};
}  // namespace detail

class ReturnMap {
 public:
  using Shape = detail::SinePerturbation;

  explicit ReturnMap(const ModelParams& params);
  // Direct construction from the two constants the map depends on.
  ReturnMap(double delta, double K_omega, double A, double lambda);

  const DerivedConstants& consts() const { return consts_; }
  double delta() const { return delta_; }
  double K_omega() const { return k_omega_; }
  double A() const { return A_; }
  double lambda() const { return lambda_; }
  double a() const { return consts_.a(); }

  double log_argument(double x, double y) const { return y + A_ + lambda_ * Shape::value(x); }

  // Throw DomainEscape when u <= 0.
  CylinderPoint eval(const CylinderPoint& p) const;
  CoverPoint eval_lifted(const CoverPoint& p) const;
  JacobianMatrix jacobian(double x, double y) const;
  JacobianMatrix jacobian(const CylinderPoint& p) const { return jacobian(p.x(), p.y()); }

  // Non-throwing variants for orbit drivers.
  std::optional<CoverPoint> try_eval_lifted(const CoverPoint& p) const;

  // Exact inverse on the image of u > 0. Throws DomainEscape when p.y <= 0.
  CoverPoint inverse_lifted(const CoverPoint& p) const;

 private:
  DerivedConstants consts_;
  double delta_;
  double k_omega_;
  double A_;
  double lambda_;
};

}  // namespace bykov
