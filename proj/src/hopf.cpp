#include "bykov/hopf.hpp"

#include <algorithm>
#include <cmath>

#include "bykov/model.hpp"

namespace bykov {

PlanarVelocity field_order2(const PlanarState& s, const HopfParams& p) {
  return {p.mu1 * s.r + p.a_h * s.r * s.z, p.mu2 - s.r * s.r - s.z * s.z};
}

PlanarVelocity field_order3(const PlanarState& s, const HopfParams& p) {
  const double r = s.r, z = s.z;
  return {p.mu1 * r + p.a_h * r * z + p.c * r * r * r + p.d * r * z * z,
          p.mu2 - r * r - z * z + p.e * r * r * z + p.f * z * z * z};
}

PlanarVelocity field(const PlanarState& s, const HopfParams& p, int order) {
  if (order == 2) return field_order2(s, p);
  if (order == 3) return field_order3(s, p);
  throw std::invalid_argument("order must be 2 or 3");
}

bool hopf_constants_hold(const HopfParams& p) {
  const double ce = 3.0 * p.c + p.e;
  return ce > p.d + 3.0 * p.f && 3.0 * ce + p.d + 3.0 * p.f < 0.0;
}

std::array<double, 4> numeric_jacobian(const HopfParams& p, int order, const PlanarState& s,
                                       double h) {
  const PlanarVelocity rp = field({s.r + h, s.z}, p, order);
  const PlanarVelocity rm = field({s.r - h, s.z}, p, order);
  const PlanarVelocity zp = field({s.r, s.z + h}, p, order);
  const PlanarVelocity zm = field({s.r, s.z - h}, p, order);
  const double inv = 0.5 / h;
  return {(rp.dr - rm.dr) * inv, (zp.dr - zm.dr) * inv, (rp.dz - rm.dz) * inv,
          (zp.dz - zm.dz) * inv};
}

std::array<double, 2> real_eigenvalues(const std::array<double, 4>& m) {
  const double tr = m[0] + m[3];
  const double det = m[0] * m[3] - m[1] * m[2];
  const double disc = std::max(0.0, tr * tr - 4.0 * det);
  const double s = std::sqrt(disc);
  return {0.5 * (tr + s), 0.5 * (tr - s)};
}

std::vector<Equilibrium> equilibria_and_eigenvalues(const HopfParams& p, int order) {
  if (order != 2 && order != 3) throw std::invalid_argument("order must be 2 or 3");
  if (!(p.mu2 > 0.0)) throw NoEquilibrium("no z-axis equilibrium: mu2 <= 0");
  const double s = std::sqrt(p.mu2);
  std::vector<Equilibrium> out;
  if (order == 2) {
    out.push_back({{0.0, s}, p.mu1 + p.a_h * s, -2.0 * s});
    out.push_back({{0.0, -s}, p.mu1 - p.a_h * s, 2.0 * s});
    return out;
  }
  // Newton on mu2 - z^2 + f z^3 = 0 from the approximations +-sqrt(mu2) + f/2.
  for (double seed : {s + 0.5 * p.f, -s + 0.5 * p.f}) {
    double z = seed;
    bool ok = false;
    for (int it = 0; it < 100; ++it) {
      const double g = p.mu2 - z * z + p.f * z * z * z;
      const double dg = -2.0 * z + 3.0 * p.f * z * z;
      if (dg == 0.0) break;
      const double dz = g / dg;
      z -= dz;
      if (std::fabs(dz) <= 1e-15 * std::max(1.0, std::fabs(z))) {
        ok = true;
        break;
      }
    }
    if (!ok) throw NoEquilibrium("z-axis Newton did not converge");
    const auto J = numeric_jacobian(p, 3, {0.0, z});
    // On the axis the Jacobian is diagonal: the eigenvalues are the diagonal entries.
    out.push_back({{0.0, z}, J[0], J[3]});
  }
  return out;
}

double first_integral_G(const PlanarState& s, const HopfParams& p) {
  const double a = p.a_h;
  return 0.5 * a * std::pow(s.r, 2.0 / a) * (p.mu2 - s.r * s.r / (1.0 + a) - s.z * s.z);
}

std::array<double, 2> first_integral_gradient(const PlanarState& s, const HopfParams& p) {
  const double a = p.a_h, r = s.r, z = s.z;
  const double bracket = p.mu2 - r * r / (1.0 + a) - z * z;
  const double rp = std::pow(r, 2.0 / a);
  const double dGdr = (r > 0.0 ? rp / r : 0.0) * bracket - a * rp * r / (1.0 + a);
  const double dGdz = -a * rp * z;
  return {dGdr, dGdz};
}

double ahc_line(double c, double d, double e, double f) {
  const double den = 3.0 * (3.0 * c + e) + d + 3.0 * f;
  if (den == 0.0) throw DegenerateCoefficients("AHC line: denominator 3(3c+e)+d+3f is zero");
  if (!(3.0 * c + e > d + 3.0 * f) || !(den < 0.0))
    throw DegenerateCoefficients(
        "AHC line: need 3c+e > d+3f and 3(3c+e)+d+3f < 0");
  return -4.0 / den;
}

double cycle_delta(const std::vector<Equilibrium>& eq) {
  if (eq.size() != 2) throw std::invalid_argument("cycle_delta: two axis equilibria required");
  const Equilibrium& top = eq[0].state.z > eq[1].state.z ? eq[0] : eq[1];
  const Equilibrium& bottom = eq[0].state.z > eq[1].state.z ? eq[1] : eq[0];
  const double C1 = -bottom.radial_eig, E1 = bottom.axial_eig;
  const double E2 = top.radial_eig, C2 = -top.axial_eig;
  return (C1 / E1) * (C2 / E2);
}

namespace {

// -1: the branch turns back above the lower equilibrium, +1: it escapes below.
int connection_side(const HopfParams& p, double z_top) {
  const Rk4<2> rk([&](const FlowState<2>& s) {
    const PlanarVelocity v = field_order3({s[0], s[1]}, p);
    return FlowState<2>{v.dr, v.dz};
  });
  FlowState<2> s{1e-6, z_top}, comp{0.0, 0.0};
  double z_min = z_top;
  for (int i = 0; i < 400000; ++i) {
    rk.step(s, comp, 1e-2);
    if (!std::isfinite(s[1]) || s[1] < -3.0 * std::fabs(z_top) - 1.0) return 1;
    z_min = std::min(z_min, s[1]);
    if (s[1] < 0.0 && s[1] > z_min + 1e-4) return -1;
  }
  return 0;
}

}  // namespace

double heteroclinic_mu1(HopfParams p, double lo, double hi, double tol) {
  auto side = [&](double mu1) {
    p.mu1 = mu1;
    return connection_side(p, equilibria_and_eigenvalues(p, 3)[0].state.z);
  };
  if (side(lo) != -1 || side(hi) != 1)
    throw std::invalid_argument("heteroclinic_mu1: bracket does not straddle the connection");
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const int s = side(mid);
    if (s == 0) throw std::runtime_error("heteroclinic_mu1: undecided branch");
    (s < 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

Trajectory integrate(const PlanarField& f, const PlanarState& s0, std::array<double, 2> t_span,
                     double h) {
  if (!(h > 0.0)) throw std::invalid_argument("integrate: h must be positive");
  const Rk4<2> rk([&](const FlowState<2>& s) {
    const PlanarVelocity v = f({s[0], s[1]});
    return FlowState<2>{v.dr, v.dz};
  });
  Trajectory tr;
  FlowState<2> s{s0.r, s0.z}, comp{0.0, 0.0};
  const double t0 = t_span[0], t1 = t_span[1];
  const long n = static_cast<long>(std::ceil((t1 - t0) / h - 1e-9));
  tr.t.push_back(t0);
  tr.states.push_back(s0);
  for (long i = 0; i < n; ++i) {
    const double ta = t0 + h * static_cast<double>(i);
    const double tb = std::min(t1, t0 + h * static_cast<double>(i + 1));
    rk.step(s, comp, tb - ta);
    tr.t.push_back(tb);
    tr.states.push_back({s[0], s[1]});
  }
  return tr;
}

SectionResult lift_and_section(const HopfParams& p, int order, const SectionSpec& spec,
                               int n_hits) {
  if (n_hits < 2) throw std::invalid_argument("lift_and_section: n_hits >= 2 required");
  if (!(spec.h > 0.0)) throw std::invalid_argument("lift_and_section: h must be positive");
  using S3 = FlowState<3>;
  const Rk4<3>::Field vf = [&](const S3& s) {
    const PlanarVelocity v = field({s[0], s[1]}, p, order);
    return S3{v.dr, v.dz, p.omega_lift};
  };
  const Rk4<3> rk(vf);
  S3 s{spec.s0.r, spec.s0.z, spec.theta0}, comp{0.0, 0.0, 0.0};
  SectionResult res;
  const double sign = spec.direction == Crossing::Downward ? -1.0 : 1.0;
  for (long i = 0; static_cast<int>(res.hits.size()) < n_hits; ++i) {
    const double t = spec.h * static_cast<double>(i);
    if (t > spec.t_max) throw OrbitLost("section: t_max reached before n_hits crossings");
    const S3 start = s;
    rk.step(s, comp, spec.h);
    if (!std::isfinite(s[0]) || std::fabs(s[0]) > spec.box || std::fabs(s[1]) > spec.box)
      throw OrbitLost("section: orbit left the bounding box");
    const double g0 = start[1] - spec.z0, g1 = s[1] - spec.z0;
    if (!(sign * g0 < 0.0 && sign * g1 >= 0.0)) continue;
    // Bisection in time with single steps from the bracket start.
    double lo = 0.0, hi = spec.h;
    S3 at = s;
    while (hi - lo > 1e-10) {
      const double mid = 0.5 * (lo + hi);
      const S3 m = Rk4<3>::raw_step(vf, start, mid);
      if (sign * (m[1] - spec.z0) < 0.0) {
        lo = mid;
      } else {
        hi = mid;
        at = m;
      }
    }
    res.hits.push_back({t + hi, wrap_angle(at[2]), at[0]});
  }
  for (std::size_t k = 0; k + 1 < res.hits.size(); ++k)
    res.pairs.push_back({res.hits[k], res.hits[k + 1]});
  return res;
}

double fit_return_exponent(const std::vector<SectionHit>& hits) {
  if (hits.size() < 3) throw std::invalid_argument("fit_return_exponent: at least 3 hits needed");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(hits.size() - 1);
  for (std::size_t k = 0; k + 1 < hits.size(); ++k) {
    const double x = std::log(hits[k].r), y = std::log(hits[k + 1].r);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace bykov
