#include <cmath>
#include <limits>

#include "bykov/attractors.hpp"

namespace bykov {

OrbitRecord iterate(const ReturnMap& map, const CylinderPoint& p0, long n, long transient) {
  if (n < 1) throw std::invalid_argument("iterate: n >= 1 required");
  if (transient < 0) throw std::invalid_argument("iterate: transient >= 0 required");
  OrbitRecord rec;
  rec.points.reserve(static_cast<std::size_t>(n));
  CoverPoint p{p0.x(), p0.y()};
  for (long i = 0; i < transient + n; ++i) {
    if (i >= transient) rec.points.emplace_back(p.x, p.y);
    if (i + 1 == transient + n) break;
    const auto q = map.try_eval_lifted(p);
    if (!q) {
      rec.escaped = true;
      rec.escape_index = i;
      break;
    }
    p = {wrap_angle(q->x), q->y};
  }
  return rec;
}

LyapunovEstimate lyapunov_spectrum(const ReturnMap& map, const CylinderPoint& p0, long n,
                                   long transient) {
  if (n < 1000) throw std::invalid_argument("lyapunov_spectrum: n >= 1000 required");
  LyapunovEstimate est;
  double x = p0.x(), y = p0.y();
  // First column of the orthonormal frame; the second is its rotation by pi/2.
  double q1 = 1.0, q2 = 0.0;
  double sum_r11 = 0.0, sum_r22 = 0.0, sum_det = 0.0;
  const double delta = map.delta();
  for (long i = 0; i < transient + n; ++i) {
    const double u = map.log_argument(x, y);
    if (!(u > 0.0)) {
      est.escaped = true;
      est.escape_index = i;
      break;
    }
    const JacobianMatrix J = map.jacobian(x, y);
    const double v1 = J.d11 * q1 + J.d12 * q2;
    const double v2 = J.d21 * q1 + J.d22 * q2;
    const double r11 = std::hypot(v1, v2);
    const double det = J.det();
    if (i >= transient) {
      sum_r11 += std::log(r11);
      // |r22| = |det(J Q)| / r11 exactly in two dimensions.
      sum_r22 += std::log(std::fabs(det)) - std::log(r11);
      sum_det += std::log(delta) + (delta - 1.0) * std::log(u);
      ++est.steps;
    }
    q1 = v1 / r11;
    q2 = v2 / r11;
    x = wrap_angle(x - map.K_omega() * std::log(u));
    y = std::pow(u, delta);
  }
  est.final_point = CylinderPoint(x, y);
  if (est.steps == 0) {
    est.lambda_max = est.lambda_sum = est.log_det_average =
        std::numeric_limits<double>::quiet_NaN();
    return est;
  }
  const double m = static_cast<double>(est.steps);
  est.lambda_max = sum_r11 / m;
  est.lambda_sum = (sum_r11 + sum_r22) / m;
  est.log_det_average = sum_det / m;
  if (std::fabs(est.lambda_sum - est.log_det_average) > 1e-8)
    throw std::logic_error("lyapunov_spectrum: exponent sum disagrees with log-det average");
  return est;
}

}  // namespace bykov
