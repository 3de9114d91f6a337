#include "bykov/model.hpp"

#include <algorithm>
#include <cmath>

namespace bykov {

ModelParams ModelParams::realizing(double delta, double K_omega, double A, double lambda) {
  const double c = std::sqrt(delta);
  const double w = K_omega / (1.0 + c);
  return ModelParams{c, 1.0, w, c, 1.0, w, A, lambda};
}

Validation validate(const ModelParams& p) {
  Validation v;
  auto need = [&](bool holds, const char* name) {
    if (!holds) v.violations.emplace_back(name);
  };
  need(p.E1 > 0.0, "P2a: E1>0");
  need(p.C1 > p.E1, "P2a: C1>E1");
  need(p.omega1 > 0.0, "P2a: ω1>0");
  need(p.E2 > 0.0, "P2b: E2>0");
  need(p.C2 > p.E2, "P2b: C2>E2");
  need(p.omega2 > 0.0, "P2b: ω2>0");
  need(p.A >= 0.0, "P7: A>=0");
  need(p.lambda >= 0.0, "P7b: λ>=0");
  // A == 0 is the organizing center and stays admissible.
  if (p.A > 0.0) need(p.A > p.lambda, "P7b: A>λ");
  if (p.A == 0.0) need(p.lambda == 0.0, "P7b: A>λ");
  for (double v_ : {p.C1, p.E1, p.omega1, p.C2, p.E2, p.omega2, p.A, p.lambda}) {
    if (!std::isfinite(v_)) {
      v.violations.emplace_back("finite: all parameters finite");
      break;
    }
  }
  return v;
}

double DerivedConstants::a() const {
  if (A == 0.0) throw DomainError("a = lambda/A is undefined: division by zero (A = 0)");
  return lambda / A;
}

DerivedConstants derive_constants(const ModelParams& p) {
  const Validation v = validate(p);
  if (!v.ok()) {
    std::string msg = "invalid parameters:";
    for (const auto& s : v.violations) msg += " [" + s + "]";
    throw std::invalid_argument(msg);
  }
  DerivedConstants d;
  d.delta1 = p.C1 / p.E1;
  d.delta2 = p.C2 / p.E2;
  d.delta = d.delta1 * d.delta2;
  d.K = (p.E2 + p.C1) / (p.E1 * p.E2);
  d.K_omega = (p.E2 * p.omega1 + p.C1 * p.omega2) / (p.E1 * p.E2);
  d.A = p.A;
  d.lambda = p.lambda;
  return d;
}

double wrap_angle(double x) {
  double r = x - kTwoPi * std::floor(x / kTwoPi);
  // floor can round r up to exactly 2pi for tiny negative x.
  if (r >= kTwoPi) r = 0.0;
  return r;
}

double circle_distance(double x1, double x2) {
  const double d = std::fabs(wrap_angle(x1) - wrap_angle(x2));
  return std::min(d, kTwoPi - d);
}

}  // namespace bykov
