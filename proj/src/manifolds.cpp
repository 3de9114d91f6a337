#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <utility>

#include "bykov/attractors.hpp"

namespace bykov {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Scaled {
  double x, y;
};

double scaled_dist(const CoverPoint& a, const CoverPoint& b, double ys) {
  return std::hypot(a.x - b.x, (a.y - b.y) / ys);
}

// One application of eval^{+-k} in the cover, shifted so the anchor stays fixed.
class Stepper {
 public:
  Stepper(const ReturnMap& map, const PeriodicOrbit& orbit, ManifoldSide side, int repeat)
      : map_(map), k_(orbit.period), winding_(orbit.winding), side_(side), repeat_(repeat) {}

  // nullopt on escape (forward) or inversion failure (backward).
  std::optional<CoverPoint> operator()(CoverPoint p) const {
    for (int r = 0; r < repeat_; ++r) {
      for (int j = 0; j < k_; ++j) {
        if (side_ == ManifoldSide::Unstable) {
          const auto q = map_.try_eval_lifted(p);
          if (!q) return std::nullopt;
          p = *q;
        } else {
          if (!(p.y > 0.0)) return std::nullopt;
          p = map_.inverse_lifted(p);
          if (!(map_.log_argument(p.x, p.y) > 0.0)) return std::nullopt;
        }
      }
      p.x += (side_ == ManifoldSide::Unstable ? -1.0 : 1.0) * kTwoPi * winding_;
    }
    return p;
  }

 private:
  const ReturnMap& map_;
  int k_;
  int winding_;
  ManifoldSide side_;
  int repeat_;
};

}  // namespace

ManifoldCurve grow_manifold(const ReturnMap& map, const PeriodicOrbit& orbit, ManifoldSide side,
                            const ManifoldOptions& opt) {
  if (orbit.stability != Stability::Saddle || orbit.multipliers[0].imag() != 0.0 ||
      orbit.multipliers[1].imag() != 0.0)
    throw std::invalid_argument("grow_manifold: anchor must be a saddle with real multipliers");
  if (opt.branch != 1 && opt.branch != -1)
    throw std::invalid_argument("grow_manifold: branch must be +1 or -1");
  if (!(opt.spacing > 0.0) || !(opt.seed_distance > 0.0))
    throw std::invalid_argument("grow_manifold: spacing and seed distance must be positive");

  ManifoldCurve curve;
  curve.anchor = orbit;
  curve.side = side;
  curve.branch = opt.branch;
  const double ys = opt.y_scale.value_or(std::pow(map.A(), map.delta()));
  curve.y_scale = ys;

  const double mu = side == ManifoldSide::Unstable ? orbit.multipliers[0].real()
                                                    : orbit.multipliers[1].real();
  const int repeat = mu < 0.0 ? 2 : 1;
  // Expansion of one step of the growth map along the branch.
  double growth = std::fabs(side == ManifoldSide::Unstable ? mu : 1.0 / mu);
  if (repeat == 2) growth *= growth;
  const Stepper step(map, orbit, side, repeat);

  const auto v = eigenvector(orbit.monodromy, mu);
  const double vn = std::hypot(v[0], v[1] / ys);
  const double wx = opt.branch * v[0] / vn, wy = opt.branch * v[1] / vn;
  const CoverPoint Q{orbit.points[0].x(), orbit.points[0].y()};
  auto along = [&](double s) { return CoverPoint{Q.x + s * wx, Q.y + s * wy * ys}; };

  // Keep the linear fundamental domain shorter than the spacing.
  const double d0 = std::min(opt.seed_distance, 0.5 * opt.spacing / growth);
  std::vector<CoverPoint> domain;
  const int n0 = std::max(8, static_cast<int>(std::ceil(d0 * (growth - 1.0) / opt.spacing)) + 1);
  for (int j = 0; j <= n0; ++j) domain.push_back(along(d0 * std::pow(growth, double(j) / n0)));

  curve.polyline.push_back(Q);
  for (const auto& p : domain) {
    curve.arclength += scaled_dist(curve.polyline.back(), p, ys);
    curve.polyline.push_back(p);
  }

  const double y_min = opt.y_min.value_or(-kInf);
  const double y_max = opt.y_max.value_or(kInf);
  auto inside = [&](const CoverPoint& p) { return p.y >= y_min && p.y <= y_max; };

  for (int img = 0; img < opt.max_images; ++img) {
    // Image of the current fundamental domain with adaptive insertion.
    std::vector<CoverPoint> pre = domain;
    std::vector<CoverPoint> next;
    next.reserve(pre.size() * 2);
    bool failed = false;
    auto first = step(pre[0]);
    if (!first) {
      curve.truncated = true;
      curve.stop_reason = side == ManifoldSide::Unstable ? "domain escape" : "inversion failure";
      break;
    }
    next.push_back(*first);
    for (std::size_t i = 0; i + 1 < pre.size() && !failed; ++i) {
      // Depth-first subdivision of the preimage interval [pre[i], pre[i+1]].
      std::vector<std::pair<CoverPoint, CoverPoint>> stack;  // (preimage, image) right ends
      auto right = step(pre[i + 1]);
      if (!right) {
        failed = true;
        break;
      }
      CoverPoint left_pre = pre[i];
      CoverPoint left_img = next.back();
      stack.push_back({pre[i + 1], *right});
      while (!stack.empty() && !failed) {
        auto [rp, ri] = stack.back();
        const double gap = scaled_dist(left_img, ri, ys);
        const double pre_gap = scaled_dist(left_pre, rp, ys);
        bool split = gap > opt.spacing && pre_gap > 1e-14;
        CoverPoint mp{0.5 * (left_pre.x + rp.x), 0.5 * (left_pre.y + rp.y)};
        std::optional<CoverPoint> mi;
        if (!split && pre_gap > 1e-14 && gap > 1e-3 * opt.spacing) {
          // Bend check: the midpoint image should sit near the chord.
          mi = step(mp);
          if (!mi) {
            failed = true;
            break;
          }
          const double chord_x = 0.5 * (left_img.x + ri.x), chord_y = 0.5 * (left_img.y + ri.y);
          const double dev = std::hypot(mi->x - chord_x, (mi->y - chord_y) / ys);
          split = dev > std::tan(0.25 * opt.max_turn) * gap;
        }
        if (split && static_cast<int>(next.size()) < opt.max_points) {
          if (!mi) mi = step(mp);
          if (!mi) {
            failed = true;
            break;
          }
          stack.push_back({mp, *mi});
        } else {
          next.push_back(ri);
          left_pre = rp;
          left_img = ri;
          stack.pop_back();
        }
      }
    }
    if (failed) {
      curve.truncated = true;
      curve.stop_reason = side == ManifoldSide::Unstable ? "domain escape" : "inversion failure";
      break;
    }
    // next[0] continues the polyline from domain.back().
    double extent = 0.0;
    bool stop = false;
    for (std::size_t i = 1; i < next.size(); ++i) {
      if (!inside(next[i])) {
        curve.stop_reason = "left box";
        stop = true;
        break;
      }
      const double dseg = scaled_dist(curve.polyline.back(), next[i], ys);
      extent += dseg;
      curve.arclength += dseg;
      curve.polyline.push_back(next[i]);
      if (curve.arclength >= opt.max_arclength) {
        curve.stop_reason = "max arclength";
        stop = true;
        break;
      }
      if (static_cast<int>(curve.polyline.size()) >= opt.max_points) {
        curve.stop_reason = "max points";
        stop = true;
        break;
      }
    }
    if (stop) break;
    if (extent < 1e-12) {
      curve.stop_reason = "converged";
      break;
    }
    domain = std::move(next);
    if (img + 1 == opt.max_images) curve.stop_reason = "max images";
  }
  return curve;
}

namespace {

struct Segment {
  Scaled a, b;
  bool local = false;
};

double cross(double ax, double ay, double bx, double by) { return ax * by - ay * bx; }

double point_segment(const Scaled& p, const Segment& s) {
  const double dx = s.b.x - s.a.x, dy = s.b.y - s.a.y;
  const double len2 = dx * dx + dy * dy;
  double t = len2 > 0.0 ? ((p.x - s.a.x) * dx + (p.y - s.a.y) * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(p.x - (s.a.x + t * dx), p.y - (s.a.y + t * dy));
}

// Crossing parameters (t on u, s on v) if the open segments intersect.
std::optional<std::pair<double, double>> intersect(const Segment& u, const Segment& v) {
  const double rx = u.b.x - u.a.x, ry = u.b.y - u.a.y;
  const double sx = v.b.x - v.a.x, sy = v.b.y - v.a.y;
  const double den = cross(rx, ry, sx, sy);
  if (den == 0.0) return std::nullopt;
  const double qx = v.a.x - u.a.x, qy = v.a.y - u.a.y;
  const double t = cross(qx, qy, sx, sy) / den;
  const double s = cross(qx, qy, rx, ry) / den;
  if (t >= 0.0 && t < 1.0 && s >= 0.0 && s < 1.0) return std::make_pair(t, s);
  return std::nullopt;
}

double segment_distance(const Segment& u, const Segment& v) {
  if (intersect(u, v)) return 0.0;
  return std::min({point_segment(u.a, v), point_segment(u.b, v), point_segment(v.a, u),
                   point_segment(v.b, u)});
}

// Segments in the scaled metric; the first `local` arclength is flagged.
std::vector<Segment> segments(const ManifoldCurve& c, double ys, double local) {
  std::vector<Segment> out;
  double run = 0.0;
  for (std::size_t i = 0; i + 1 < c.polyline.size(); ++i) {
    const Scaled a{c.polyline[i].x, c.polyline[i].y / ys};
    const Scaled b{c.polyline[i + 1].x, c.polyline[i + 1].y / ys};
    run += std::hypot(b.x - a.x, b.y - a.y);
    // Reduce so the first endpoint lies in [0, 2pi).
    const double shift = a.x - wrap_angle(a.x);
    out.push_back({{a.x - shift, a.y}, {b.x - shift, b.y}, run <= local});
  }
  return out;
}

}  // namespace

HomoclinicReport detect_homoclinic(const ManifoldCurve& unstable, const ManifoldCurve& stable,
                                   const HomoclinicSearch& search) {
  if (unstable.side != ManifoldSide::Unstable || stable.side != ManifoldSide::Stable)
    throw std::invalid_argument("detect_homoclinic: one unstable and one stable curve required");
  const double ys = unstable.y_scale;
  const auto U = segments(unstable, ys, search.local_arclength);
  const auto S = segments(stable, ys, search.local_arclength);

  constexpr int kBins = 1024;
  const double bw = kTwoPi / kBins;
  std::vector<std::vector<int>> bins(kBins);
  auto bin_range = [&](const Segment& s) {
    const double lo = std::min(s.a.x, s.b.x), hi = std::max(s.a.x, s.b.x);
    long b0 = static_cast<long>(std::floor(lo / bw));
    long b1 = static_cast<long>(std::floor(hi / bw));
    if (b1 - b0 >= kBins) b1 = b0 + kBins - 1;
    return std::make_pair(b0, b1);
  };
  for (int i = 0; i < static_cast<int>(S.size()); ++i) {
    const auto [b0, b1] = bin_range(S[i]);
    for (long b = b0; b <= b1; ++b) bins[((b % kBins) + kBins) % kBins].push_back(i);
  }

  HomoclinicReport rep;
  rep.min_distance = kInf;
  std::set<std::pair<int, int>> seen;
  for (int i = 0; i < static_cast<int>(U.size()); ++i) {
    const auto [b0, b1] = bin_range(U[i]);
    seen.clear();
    for (long b = b0 - 1; b <= b1 + 1; ++b) {
      for (int j : bins[((b % kBins) + kBins) % kBins]) {
        for (int m = -1; m <= 1; ++m) {
          if (U[i].local && S[j].local) continue;
          if (!seen.insert({j, m}).second) continue;
          const Segment v{{S[j].a.x + kTwoPi * m, S[j].a.y}, {S[j].b.x + kTwoPi * m, S[j].b.y}};
          const double d = segment_distance(U[i], v);
          rep.min_distance = std::min(rep.min_distance, d);
          if (const auto hit = intersect(U[i], v)) {
            const double t = hit->first;
            const Segment& u = U[i];
            const double ox = cross(u.b.x - u.a.x, u.b.y - u.a.y, v.b.x - v.a.x, v.b.y - v.a.y);
            rep.crossings.push_back({CylinderPoint(u.a.x + t * (u.b.x - u.a.x),
                                                   (u.a.y + t * (u.b.y - u.a.y)) * ys),
                                     ox > 0.0 ? 1.0 : -1.0});
          }
        }
      }
    }
  }
  bool sign_change = false;
  for (const auto& c : rep.crossings) {
    if (c.orientation != rep.crossings.front().orientation) sign_change = true;
  }
  rep.tangency_flag = rep.min_distance < search.tol_tangent && !sign_change;
  return rep;
}

HomoclinicReport detect_homoclinic(const ReturnMap& map, const PeriodicOrbit& orbit,
                                   const HomoclinicSearch& search) {
  HomoclinicReport total;
  total.min_distance = kInf;
  for (int bu : {1, -1}) {
    ManifoldOptions ou = search.manifold;
    ou.branch = bu;
    const ManifoldCurve wu = grow_manifold(map, orbit, ManifoldSide::Unstable, ou);
    for (int bs : {1, -1}) {
      ManifoldOptions os = search.manifold;
      os.branch = bs;
      const ManifoldCurve ws = grow_manifold(map, orbit, ManifoldSide::Stable, os);
      const HomoclinicReport r = detect_homoclinic(wu, ws, search);
      total.min_distance = std::min(total.min_distance, r.min_distance);
      total.crossings.insert(total.crossings.end(), r.crossings.begin(), r.crossings.end());
    }
  }
  bool sign_change = false;
  for (const auto& c : total.crossings) {
    if (c.orientation != total.crossings.front().orientation) sign_change = true;
  }
  total.tangency_flag = total.min_distance < search.tol_tangent && !sign_change;
  return total;
}

}  // namespace bykov
