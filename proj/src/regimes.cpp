#include "bykov/regimes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace bykov {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool cond, const char* what) {
  if (!cond) throw std::invalid_argument(what);
}

// Sup-norms inflated and infima deflated by the safety factor.
PartialNorms sample_norms(const ReturnMap& map, const Rect& r, int nx, int ny, bool periodic_x,
                          PartialNorms acc) {
  for (int i = 0; i < nx; ++i) {
    const double x = periodic_x ? r.x_lo + (r.x_hi - r.x_lo) * i / nx
                                : r.x_lo + (r.x_hi - r.x_lo) * i / (nx - 1);
    for (int j = 0; j < ny; ++j) {
      const double y = r.y_lo + (r.y_hi - r.y_lo) * j / (ny - 1);
      const JacobianMatrix J = map.jacobian(x, y);
      acc.min_d11 = std::min(acc.min_d11, J.d11);
      acc.sup_abs_d11 = std::max(acc.sup_abs_d11, std::fabs(J.d11));
      acc.inf_abs_d11 = std::min(acc.inf_abs_d11, std::fabs(J.d11));
      acc.sup_abs_d12 = std::max(acc.sup_abs_d12, std::fabs(J.d12));
      acc.sup_abs_d21 = std::max(acc.sup_abs_d21, std::fabs(J.d21));
      acc.sup_abs_d22 = std::max(acc.sup_abs_d22, std::fabs(J.d22));
    }
  }
  return acc;
}

PartialNorms empty_norms() {
  return {kInf, 0.0, kInf, 0.0, 0.0, 0.0};
}

PartialNorms with_safety(PartialNorms n) {
  const double slack = kLipschitzSafety - 1.0;
  n.min_d11 -= slack * std::fabs(n.min_d11);
  n.inf_abs_d11 *= 1.0 - slack;
  n.sup_abs_d11 *= kLipschitzSafety;
  n.sup_abs_d12 *= kLipschitzSafety;
  n.sup_abs_d21 *= kLipschitzSafety;
  n.sup_abs_d22 *= kLipschitzSafety;
  return n;
}

NamedCondition cond(const char* name, double margin) {
  return {name, margin > 0.0, margin};
}

struct EdgeRange {
  double lo = kInf;   // min lifted image angle along the edge
  double hi = -kInf;  // max lifted image angle along the edge
  double max_height = 0.0;
  double min_height = kInf;
  std::size_t escapes = 0;
};

EdgeRange vertical_edge(const ReturnMap& map, double x, double h, int n) {
  EdgeRange e;
  for (int k = 0; k < n; ++k) {
    const double y = h * k / (n - 1);
    const auto q = map.try_eval_lifted({x, y});
    if (!q) {
      ++e.escapes;
      continue;
    }
    e.lo = std::min(e.lo, q->x);
    e.hi = std::max(e.hi, q->x);
    e.max_height = std::max(e.max_height, q->y);
    e.min_height = std::min(e.min_height, q->y);
  }
  return e;
}

// Slack with which the angular window (left, right) contains some 2pi-translate of J.
double covering_slack(double left, double right, const Interval& J) {
  // Best translate centers J inside the window.
  const double mid_w = 0.5 * (left + right);
  const double mid_j = 0.5 * (J.lo + J.hi);
  const double m = std::round((mid_w - mid_j) / kTwoPi);
  const double lo = J.lo + kTwoPi * m;
  const double hi = J.hi + kTwoPi * m;
  return std::min(lo - left, right - hi);
}

}  // namespace

double curve_g(double K_omega) { return 1.0 / std::sqrt(1.0 + K_omega * K_omega); }

double curve_f(double K_omega) {
  const double e = 4.0 * kPi / K_omega;
  const double t = std::exp(-e);
  return -std::expm1(-e) / (1.0 - 0.25 * t);
}

double stretch_P(double delta_ang, double a, double c, double K_omega) {
  const double num = 1.0 - a * c;
  const double den = 1.0 - a * std::cos(delta_ang);
  if (!(num > 0.0) || !(den > 0.0)) throw DomainError("stretch_P: log argument factor <= 0");
  return K_omega * std::log(num / den);
}

double two_turns_threshold(double c, double K_omega) {
  const double e = kPi / (K_omega * c);
  const double t = std::exp(-e);
  return -std::expm1(-e) / (1.0 - c * t);
}

AnnulusBand annulus_band(const DerivedConstants& consts, double A, double lambda) {
  const double a = lambda / A;
  const double d = consts.delta;
  return {std::pow(A, d) * std::pow(1.0 - a, d), 2.0 * std::pow(A, d) * std::pow(1.0 + a, d)};
}

AnnulusBand annulus_band(const ReturnMap& map) {
  const double a = map.lambda() / map.A();
  const double d = map.delta();
  const double Ad = std::pow(map.A(), d);
  return {Ad * std::pow(1.0 - a, d), 2.0 * Ad * std::pow(1.0 + a, d)};
}

InvarianceReport check_annulus_invariance(const ReturnMap& map, const AnnulusBand& band,
                                          int n_samples) {
  require(n_samples >= 100, "check_annulus_invariance: n_samples >= 100 required");
  require(map.A() > 0.0 && map.lambda() < map.A(), "check_annulus_invariance: need 0 <= a < 1");
  require(band.y_lo < band.y_hi, "check_annulus_invariance: empty band");

  InvarianceReport rep;
  rep.margin = kInf;
  auto probe = [&](double x, double y) {
    ++rep.samples;
    const auto q = map.try_eval_lifted({x, y});
    if (!q) {
      ++rep.escapes;
      rep.margin = -kInf;
      return;
    }
    rep.margin = std::min(rep.margin, std::min(q->y - band.y_lo, band.y_hi - q->y));
  };
  for (int i = 0; i < n_samples; ++i) {
    const double x = kTwoPi * i / n_samples;
    probe(x, band.y_lo);
    probe(x, band.y_hi);
  }
  const int side = std::max(2, static_cast<int>(std::ceil(std::sqrt(n_samples))));
  for (int i = 0; i < side; ++i) {
    for (int j = 1; j + 1 < side; ++j) {
      probe(kTwoPi * i / side, band.y_lo + (band.y_hi - band.y_lo) * j / (side - 1));
    }
  }
  rep.invariant = rep.escapes == 0 && rep.margin > 0.0;
  return rep;
}

bool AnnulusPrincipleReport::all() const {
  return std::all_of(conditions.begin(), conditions.end(),
                     [](const NamedCondition& c) { return c.holds; });
}

AnnulusPrincipleReport check_annulus_principle(const ReturnMap& map, const AnnulusBand& band,
                                               int nx, int ny) {
  require(nx >= 64 && ny >= 64, "check_annulus_principle: grid must be at least 64x64");
  const Rect r{0.0, kTwoPi, band.y_lo, band.y_hi};
  const PartialNorms n = with_safety(sample_norms(map, r, nx, ny, true, empty_norms()));

  const InvarianceReport invariance = check_annulus_invariance(map, band, std::max(nx, ny) * 4);

  const double s11 = n.sup_abs_d11;
  // ||(1 + dg1/dx)^-1|| taken as the sup of the inverse, i.e. 1 / inf.
  const double inv = n.min_d11 > 0.0 ? 1.0 / n.min_d11 : kInf;
  AnnulusPrincipleReport rep;
  rep.norms = n;
  // (1) periodic and smooth in x by construction.
  rep.conditions[0] = {"annulus-1 smooth periodic", true, kInf};
  rep.conditions[1] = cond("annulus-2 F(B) in int B", invariance.invariant ? invariance.margin : -1.0);
  rep.conditions[2] = cond("annulus-3 1+dg1/dx > 0", n.min_d11);
  rep.conditions[3] = cond("annulus-4 |dg2/dy| < 1", 1.0 - n.sup_abs_d22);
  rep.conditions[4] = cond("annulus-5 cross terms",
                           (1.0 - inv * n.sup_abs_d22) -
                               2.0 * inv * std::sqrt(n.sup_abs_d21 * n.sup_abs_d12));
  rep.reciprocal_sup_cross_margin =
      (1.0 - n.sup_abs_d22 / s11) - 2.0 * std::sqrt(n.sup_abs_d21 * n.sup_abs_d12) / s11;
  rep.conditions[5] = cond("annulus-6 |1+dg1/dx|+|dg2/dy| < 2", 2.0 - s11 - n.sup_abs_d22);
  return rep;
}

bool AbsReport::all() const {
  return std::all_of(conditions.begin(), conditions.end(),
                     [](const NamedCondition& c) { return c.holds; });
}

AbsReport check_abs_hyperbolicity(const ReturnMap& map, std::span<const Rect> region, int nx,
                                  int ny) {
  require(!region.empty(), "check_abs_hyperbolicity: empty region");
  require(nx >= 2 && ny >= 2, "check_abs_hyperbolicity: grid must be at least 2x2");
  PartialNorms acc = empty_norms();
  for (const Rect& r : region) {
    require(r.x_hi > r.x_lo && r.y_hi > r.y_lo, "check_abs_hyperbolicity: zero-area rectangle");
    acc = sample_norms(map, r, nx, ny, false, acc);
  }
  const PartialNorms n = with_safety(acc);
  if (!(n.inf_abs_d11 > 0.0))
    throw DomainError("check_abs_hyperbolicity: dF1/dx vanishes on the sample");

  AbsReport rep;
  rep.norms = n;
  const double inv = 1.0 / n.inf_abs_d11;
  rep.inverse_norm = inv;
  const double f2y = n.sup_abs_d22, f2x = n.sup_abs_d21, f1y = n.sup_abs_d12;
  rep.conditions[0] = cond("abs-1 |dF2/dy| < 1", 1.0 - f2y);
  rep.conditions[1] = cond("abs-2 |(dF1/dx)^-1| < 1", 1.0 - inv);
  rep.conditions[2] =
      cond("abs-3 1-|dF2/dy||(dF1/dx)^-1| > 2 sqrt(...)", 1.0 - f2y * inv - 2.0 * std::sqrt(f2x * f1y * inv));
  rep.conditions[3] = cond("abs-4 (1-|dF2/dy|)(1-|(dF1/dx)^-1|) > ...",
                           (1.0 - f2y) * (1.0 - inv) - f2x * inv * f1y);
  return rep;
}

bool StripPair::ordered() const {
  return kPi < theta0 && theta0 < I1.lo && I1.lo < I1.hi && I1.hi < I2.lo && I2.lo < I2.hi &&
         I2.hi < 1.5 * kPi - delta0;
}

namespace {

// Smallest angular slack of the covering of J by the image of I x [0, h].
double strip_slack(const ReturnMap& map, const Interval& I, const Interval& J, double h, int n,
                   std::size_t* escapes, double* max_height) {
  const EdgeRange left = vertical_edge(map, I.lo, h, n);
  const EdgeRange right = vertical_edge(map, I.hi, h, n);
  if (escapes) *escapes += left.escapes + right.escapes;
  if (max_height) *max_height = std::max({*max_height, left.max_height, right.max_height});
  if (left.escapes + right.escapes > 0) return -kInf;
  // Lifted angle grows with x across the strip: left edge maps below, right edge above.
  return covering_slack(left.hi, right.lo, J);
}

}  // namespace

StripSearchResult build_strips(const ReturnMap& map, double c, const StripSearch& search) {
  StripSearchResult res;
  if (!(c > 0.0 && c < 1.0)) {
    res.diagnostics = "c must lie in (0,1)";
    return res;
  }
  const double a = map.lambda() / map.A();
  const double K = map.K_omega();
  const double thr = two_turns_threshold(c, K);
  if (!(a > thr) || !(a < 1.0)) {
    res.diagnostics = "a = " + std::to_string(a) + " not above two-turns threshold " +
                      std::to_string(thr) + " (or a >= 1)";
    return res;
  }
  const double theta0 = kPi + std::asin(c);
  double delta0 = 1.5 * kPi - theta0;
  while (!(stretch_P(delta0, a, c, K) > kPi / c)) {
    delta0 *= 0.5;
    if (delta0 < 1e-12) {
      res.diagnostics = "no clearance delta0 with P(delta0, a) > pi/c";
      return res;
    }
  }
  const double h = search.height.value_or(annulus_band(map).y_hi);
  const double xmin = theta0;
  const double xmax = 1.5 * kPi - delta0;
  const double width = xmax - xmin;
  const double eps = 1e-3 * width;
  const double gap = 1e-2 * width;

  double best = -kInf;
  std::optional<StripPair> best_pair;
  for (int k = 1; k < search.candidates; ++k) {
    const double s = xmin + width * k / search.candidates;
    const Interval I1{xmin + eps, s - gap};
    const Interval I2{s + gap, xmax - eps};
    if (!(I1.width() > 0.0) || !(I2.width() > 0.0)) continue;
    double worst = kInf;
    for (const Interval& I : {I1, I2}) {
      for (const Interval& J : {I1, I2}) {
        worst = std::min(worst, strip_slack(map, I, J, h, search.edge_samples, nullptr, nullptr));
      }
    }
    if (worst > best) {
      best = worst;
      best_pair = StripPair{I1, I2, c, theta0, delta0, h};
    }
  }
  if (!(best > 0.0) || !best_pair) {
    res.diagnostics = "no split point gives a full covering; best slack " + std::to_string(best);
    return res;
  }
  res.strips = best_pair;
  res.diagnostics = "covering slack " + std::to_string(best);
  return res;
}

bool CoveringReport::full() const {
  return transitions[0][0] && transitions[0][1] && transitions[1][0] && transitions[1][1];
}

double CoveringReport::entropy_bound() const {
  const double t = transitions[0][0] + transitions[1][1];
  const double d = static_cast<double>(transitions[0][0] * transitions[1][1]) -
                   static_cast<double>(transitions[0][1] * transitions[1][0]);
  const double disc = std::max(0.0, t * t - 4.0 * d);
  const double rho = 0.5 * (t + std::sqrt(disc));
  return rho > 0.0 ? std::log(rho) : -kInf;
}

CoveringReport verify_horseshoe(const ReturnMap& map, const StripPair& strips,
                                double band_height, int n_boundary) {
  require(n_boundary >= 4, "verify_horseshoe: n_boundary >= 4 required");
  require(band_height > 0.0, "verify_horseshoe: band height must be positive");
  CoveringReport rep;
  rep.margin = kInf;
  const std::array<Interval, 2> I{strips.I1, strips.I2};
  for (int i = 0; i < 2; ++i) {
    // Horizontal edges must map monotonically in angle for the image to be a strip.
    bool monotone = true;
    for (double y : {0.0, band_height}) {
      double prev = -kInf;
      for (int k = 0; k < n_boundary; ++k) {
        const double x = I[i].lo + I[i].width() * k / (n_boundary - 1);
        const auto q = map.try_eval_lifted({x, y});
        if (!q) {
          ++rep.escapes;
          monotone = false;
          continue;
        }
        if (!(q->x > prev)) monotone = false;
        prev = q->x;
        rep.max_image_height = std::max(rep.max_image_height, q->y);
      }
    }
    for (int j = 0; j < 2; ++j) {
      const double slack =
          strip_slack(map, I[i], I[j], band_height, n_boundary, &rep.escapes, &rep.max_image_height);
      rep.margin = std::min(rep.margin, slack);
      rep.transitions[i][j] = monotone && slack > 0.0;
    }
  }
  const bool inside = rep.max_image_height < band_height;
  if (!inside || rep.escapes > 0) {
    for (auto& row : rep.transitions) row = {false, false};
  }
  return rep;
}

const char* to_string(Regime r) {
  switch (r) {
    case Regime::Torus: return "Torus";
    case Regime::Transition: return "Transition";
    case Regime::Horseshoe: return "Horseshoe";
  }
  return "?";
}

RegimeReport classify(const ReturnMap& map, const ClassifyOptions& options) {
  require(map.A() > 0.0, "classify: A > 0 required");
  RegimeReport rep;
  rep.torus_threshold = curve_g(map.K_omega());
  rep.chaos_threshold = curve_f(map.K_omega());
  rep.a = map.lambda() / map.A();
  if (rep.a < rep.torus_threshold) {
    rep.classification = Regime::Torus;
  } else if (rep.a > rep.chaos_threshold) {
    rep.classification = Regime::Horseshoe;
  } else {
    rep.classification = Regime::Transition;
  }
  if (options.run_checkers && rep.a < 1.0) {
    rep.annulus = check_annulus_principle(map, annulus_band(map), options.grid, options.grid);
    const StripSearchResult s = build_strips(map, options.c);
    rep.diagnostics = s.diagnostics;
    if (s.strips) {
      rep.strips = s.strips;
      const std::array<Rect, 2> rects{
          Rect{s.strips->I1.lo, s.strips->I1.hi, 0.0, s.strips->height},
          Rect{s.strips->I2.lo, s.strips->I2.hi, 0.0, s.strips->height}};
      rep.abs = check_abs_hyperbolicity(map, rects, options.grid, options.grid);
    }
  }
  return rep;
}

RegimeReport classify(const ModelParams& params, const ClassifyOptions& options) {
  return classify(ReturnMap(params), options);
}

}  // namespace bykov
