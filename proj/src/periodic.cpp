#include <algorithm>
#include <cmath>
#include <limits>

#include "bykov/attractors.hpp"

namespace bykov {

namespace {

JacobianMatrix multiply(const JacobianMatrix& A, const JacobianMatrix& B) {
  return {A.d11 * B.d11 + A.d12 * B.d21, A.d11 * B.d12 + A.d12 * B.d22,
          A.d21 * B.d11 + A.d22 * B.d21, A.d21 * B.d12 + A.d22 * B.d22};
}

struct Composite {
  CoverPoint end;
  JacobianMatrix M{1.0, 0.0, 0.0, 1.0};
  double det_product = 1.0;
};

std::optional<Composite> compose(const ReturnMap& map, CoverPoint p, int k) {
  Composite c;
  for (int j = 0; j < k; ++j) {
    const double u = map.log_argument(p.x, p.y);
    if (!(u > 0.0) || !std::isfinite(u)) return std::nullopt;
    c.M = multiply(map.jacobian(p.x, p.y), c.M);
    c.det_product *= map.delta() * std::pow(u, map.delta() - 1.0);
    p = {p.x - map.K_omega() * std::log(u), std::pow(u, map.delta())};
  }
  c.end = p;
  return c;
}

double scaled_norm(double gx, double gy, double yscale) {
  return std::fabs(gx) + std::fabs(gy) / yscale;
}

std::array<std::complex<double>, 2> eigenvalues(const JacobianMatrix& M) {
  const double tr = M.d11 + M.d22;
  const double det = M.det();
  const double disc = tr * tr - 4.0 * det;
  if (disc >= 0.0) {
    const double s = std::sqrt(disc);
    // Stable root pairing avoids cancellation for the small multiplier.
    const double big = tr >= 0.0 ? 0.5 * (tr + s) : 0.5 * (tr - s);
    const double small = big != 0.0 ? det / big : 0.0;
    std::array<std::complex<double>, 2> ev{std::complex<double>(big), std::complex<double>(small)};
    if (std::abs(ev[0]) < std::abs(ev[1])) std::swap(ev[0], ev[1]);
    return ev;
  }
  const double re = 0.5 * tr, im = 0.5 * std::sqrt(-disc);
  return {std::complex<double>(re, im), std::complex<double>(re, -im)};
}

Stability classify_multipliers(const std::array<std::complex<double>, 2>& mu) {
  constexpr double eps = 1e-9;
  const double m0 = std::abs(mu[0]), m1 = std::abs(mu[1]);
  if (std::fabs(m0 - 1.0) < eps || std::fabs(m1 - 1.0) < eps) return Stability::NonHyperbolic;
  const int outside = (m0 > 1.0) + (m1 > 1.0);
  if (outside == 0) return Stability::Sink;
  if (outside == 2) return Stability::Source;
  return Stability::Saddle;
}

double point_gap(const CylinderPoint& p, const CylinderPoint& q, double yscale) {
  return circle_distance(p.x(), q.x()) + std::fabs(p.y() - q.y()) / yscale;
}

}  // namespace

const char* to_string(Stability s) {
  switch (s) {
    case Stability::Sink: return "Sink";
    case Stability::Saddle: return "Saddle";
    case Stability::Source: return "Source";
    case Stability::NonHyperbolic: return "NonHyperbolic";
  }
  return "?";
}

std::array<double, 2> eigenvector(const JacobianMatrix& M, double mu) {
  // Rows of (M - mu I) are orthogonal to the eigenvector; use the better-conditioned one.
  const std::array<double, 2> a{M.d12, mu - M.d11};
  const std::array<double, 2> b{mu - M.d22, M.d21};
  const auto& v = std::hypot(a[0], a[1]) >= std::hypot(b[0], b[1]) ? a : b;
  const double n = std::hypot(v[0], v[1]);
  if (n == 0.0) return {1.0, 0.0};
  return {v[0] / n, v[1] / n};
}

std::vector<PeriodicOrbit> find_periodic(const ReturnMap& map, int k, const SeedSpec& spec) {
  if (k < 1) throw std::invalid_argument("find_periodic: k >= 1 required");
  double y_lo = 0.0, y_hi = 0.0;
  if (spec.y_lo && spec.y_hi) {
    y_lo = *spec.y_lo;
    y_hi = *spec.y_hi;
  } else {
    const double d = map.delta();
    const double a = map.A() > 0.0 ? map.lambda() / map.A() : 0.0;
    const double Ad = std::pow(map.A(), d);
    y_lo = spec.y_lo.value_or(Ad * std::pow(std::max(0.0, 1.0 - a), d));
    y_hi = spec.y_hi.value_or(2.0 * Ad * std::pow(1.0 + a, d));
  }
  const double yscale = std::max(y_hi, std::numeric_limits<double>::min());

  std::vector<CoverPoint> seeds = spec.extra;
  for (int j = 0; j < spec.ny; ++j) {
    const double y = spec.ny == 1 ? 0.5 * (y_lo + y_hi) : y_lo + (y_hi - y_lo) * j / (spec.ny - 1);
    for (int i = 0; i < spec.nx; ++i) seeds.push_back({kTwoPi * i / spec.nx, y});
  }

  std::vector<PeriodicOrbit> found;
  for (const CoverPoint& seed : seeds) {
    auto c = compose(map, seed, k);
    if (!c) continue;
    const double m = std::round((c->end.x - seed.x) / kTwoPi);
    CoverPoint p = seed;
    auto residual = [&](const Composite& cc, const CoverPoint& at) {
      return std::array<double, 2>{cc.end.x - at.x - kTwoPi * m, cc.end.y - at.y};
    };
    auto G = residual(*c, p);
    double norm = scaled_norm(G[0], G[1], yscale);
    bool ok = false;
    for (int it = 0; it < spec.max_newton && std::isfinite(norm); ++it) {
      if (norm < spec.tol) {
        ok = true;
        break;
      }
      const JacobianMatrix& M = c->M;
      const double a11 = M.d11 - 1.0, a12 = M.d12, a21 = M.d21, a22 = M.d22 - 1.0;
      const double det = a11 * a22 - a12 * a21;
      if (det == 0.0 || !std::isfinite(det)) break;
      const double dx = (-G[0] * a22 + G[1] * a12) / det;
      const double dy = (-G[1] * a11 + G[0] * a21) / det;
      double step = 1.0;
      bool accepted = false;
      for (int h = 0; h < 30; ++h, step *= 0.5) {
        const CoverPoint trial{p.x + step * dx, p.y + step * dy};
        auto ct = compose(map, trial, k);
        if (!ct) continue;
        const auto Gt = residual(*ct, trial);
        const double nt = scaled_norm(Gt[0], Gt[1], yscale);
        if (nt < norm || (h == 0 && nt < spec.tol)) {
          p = trial;
          c = ct;
          G = Gt;
          norm = nt;
          accepted = true;
          break;
        }
      }
      if (!accepted) {
        ok = norm < 1e3 * spec.tol;
        break;
      }
    }
    if (!ok) continue;

    PeriodicOrbit orb;
    orb.period = k;
    orb.winding = static_cast<int>(m);
    CoverPoint q = p;
    for (int j = 0; j < k; ++j) {
      orb.points.emplace_back(q.x, q.y);
      q = map.eval_lifted(q);
    }
    // Keep only the minimal period.
    bool shorter = false;
    for (int d = 1; d < k && !shorter; ++d) {
      if (k % d == 0 && point_gap(orb.points[d], orb.points[0], yscale) < 1e-8) shorter = true;
    }
    if (shorter) continue;
    bool dup = false;
    for (const auto& other : found) {
      for (const auto& pt : other.points) {
        if (point_gap(pt, orb.points[0], yscale) < 1e-8) dup = true;
      }
    }
    if (dup) continue;
    orb.monodromy = c->M;
    orb.det_product = c->det_product;
    orb.multipliers = eigenvalues(c->M);
    orb.stability = classify_multipliers(orb.multipliers);
    found.push_back(std::move(orb));
  }
  return found;
}

bool locked_orbit_exists(const ReturnMap& map, int k, int winding, SeedSpec seeds,
                         std::vector<CoverPoint>* out) {
  const auto orbits = find_periodic(map, k, seeds);
  bool any = false;
  for (const auto& o : orbits) {
    if (o.winding != winding) continue;
    any = true;
    if (out) out->push_back({o.points[0].x(), o.points[0].y()});
  }
  return any;
}

TongueBoundary tongue_boundary(const MapFamily& family, int k, int winding, const Range& a_range,
                               const Range& A_range, double a_tol) {
  TongueBoundary tb;
  if (a_range.n <= 0 || A_range.n <= 0) return tb;
  for (int ia = 0; ia < A_range.n; ++ia) {
    const double A = A_range.at(ia);
    TongueColumn col;
    col.A = A;
    SeedSpec seeds;
    seeds.nx = 32;
    seeds.ny = 4;
    std::vector<CoverPoint> last;
    auto exists = [&](double a) {
      SeedSpec s = seeds;
      s.extra = last;
      std::vector<CoverPoint> got;
      const bool e = locked_orbit_exists(family.at_A(A, a), k, winding, s, &got);
      if (e) last = got;
      return e;
    };
    bool prev = exists(a_range.at(0));
    for (int i = 1; i < a_range.n && !col.present; ++i) {
      const double a_hi = a_range.at(i);
      const bool now = exists(a_hi);
      if (!prev && now) {
        double lo = a_range.at(i - 1), hi = a_hi;
        while (hi - lo > a_tol) {
          const double mid = 0.5 * (lo + hi);
          if (exists(mid)) {
            hi = mid;
          } else {
            lo = mid;
          }
        }
        col.present = true;
        col.a_birth = 0.5 * (lo + hi);
      }
      prev = now;
    }
    tb.columns.push_back(col);
  }
  // The tip is the column with the earliest birth.
  int tip = -1;
  for (int i = 0; i < static_cast<int>(tb.columns.size()); ++i) {
    if (tb.columns[i].present && (tip < 0 || tb.columns[i].a_birth < tb.columns[tip].a_birth))
      tip = i;
  }
  for (int i = 0; i < static_cast<int>(tb.columns.size()); ++i) {
    const auto& c = tb.columns[i];
    if (!c.present) continue;
    (i <= tip ? tb.B1 : tb.B2).push_back({c.A, c.a_birth});
  }
  return tb;
}

}  // namespace bykov
