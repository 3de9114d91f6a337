#include "bykov/maps.hpp"

#include <string>

namespace bykov {

DomainEscape::DomainEscape(double u)
    : std::runtime_error("domain escape: log argument u = " + std::to_string(u) + " <= 0"),
      u_(u) {}

RadialPoint local_map_O1(double x, double y, const DerivedConstants& consts, double omega1,
                         double E1) {
  if (!(y > 0.0)) throw DomainError("local_map_O1: y must be positive");
  return {std::pow(y, consts.delta1), wrap_angle(x - omega1 / E1 * std::log(y))};
}

CylinderPoint local_map_O2(double r, double phi, const DerivedConstants& consts,
                           double omega2, double E2) {
  if (!(r > 0.0)) throw DomainError("local_map_O2: r must be positive");
  return {phi - omega2 / E2 * std::log(r), std::pow(r, consts.delta2)};
}

RadialPoint local_map_O1(double x, double y, const ModelParams& p) {
  return local_map_O1(x, y, derive_constants(p), p.omega1, p.E1);
}

CylinderPoint local_map_O2(double r, double phi, const ModelParams& p) {
  return local_map_O2(r, phi, derive_constants(p), p.omega2, p.E2);
}

ReturnMap::ReturnMap(const ModelParams& params)
    : consts_(derive_constants(params)),
      delta_(consts_.delta),
      k_omega_(consts_.K_omega),
      A_(params.A),
      lambda_(params.lambda) {}

// The raw form skips the A > lambda hypothesis so that escaping configurations
// (a > 1) can still be iterated; the ModelParams form validates everything.
ReturnMap::ReturnMap(double delta, double K_omega, double A, double lambda)
    : delta_(delta), k_omega_(K_omega), A_(A), lambda_(lambda) {
  if (!(delta > 1.0) || !(K_omega > 0.0))
    throw std::invalid_argument("ReturnMap: need delta > 1 and K_omega > 0");
  if (!(A >= 0.0) || !(lambda >= 0.0) || !std::isfinite(A) || !std::isfinite(lambda))
    throw std::invalid_argument("ReturnMap: need finite A >= 0 and lambda >= 0");
  consts_ = derive_constants(ModelParams::realizing(delta, K_omega, A, 0.0));
  consts_.lambda = lambda;
}

CylinderPoint ReturnMap::eval(const CylinderPoint& p) const {
  const CoverPoint q = eval_lifted({p.x(), p.y()});
  return {q.x, q.y};
}

CoverPoint ReturnMap::eval_lifted(const CoverPoint& p) const {
  const double u = log_argument(p.x, p.y);
  if (!(u > 0.0)) throw DomainEscape(u);
  return {p.x - k_omega_ * std::log(u), std::pow(u, delta_)};
}

std::optional<CoverPoint> ReturnMap::try_eval_lifted(const CoverPoint& p) const {
  const double u = log_argument(p.x, p.y);
  if (!(u > 0.0)) return std::nullopt;
  return CoverPoint{p.x - k_omega_ * std::log(u), std::pow(u, delta_)};
}

JacobianMatrix ReturnMap::jacobian(double x, double y) const {
  const double u = log_argument(x, y);
  if (!(u > 0.0)) throw DomainEscape(u);
  const double s = lambda_ * Shape::slope(x);
  const double du = delta_ * std::pow(u, delta_ - 1.0);
  return {1.0 - k_omega_ * s / u, -k_omega_ / u, du * s, du};
}

CoverPoint ReturnMap::inverse_lifted(const CoverPoint& p) const {
  if (!(p.y > 0.0)) throw DomainEscape(p.y);
  const double u = std::pow(p.y, 1.0 / delta_);
  const double x = p.x + k_omega_ * std::log(u);
  return {x, u - A_ - lambda_ * Shape::value(x)};
}

}  // namespace bykov
