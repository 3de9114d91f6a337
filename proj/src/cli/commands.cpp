#include "bykov/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#include "bykov/attractors.hpp"
#include "bykov/cli/output.hpp"
#include "bykov/hopf.hpp"
#include "bykov/regimes.hpp"

namespace bykov::cli {

namespace {

std::string R(double v) { return format_real(v); }
std::string I(long v) { return std::to_string(v); }
std::string B(bool v) { return v ? "true" : "false"; }

ModelParams checked_model(const RunConfig& cfg) {
  const ModelParams p = cfg.model();
  const Validation v = validate(p);
  if (!v.ok()) {
    std::string msg = "parameter validation failed:";
    for (const auto& s : v.violations) msg += "\n  " + s;
    throw ConfigError(msg);
  }
  return p;
}

ReturnMap make_map(const RunConfig& cfg) {
  const ModelParams p = checked_model(cfg);
  if (cfg.has("delta")) return ReturnMap(cfg.real("delta"), cfg.real("K_omega"), p.A, p.lambda);
  return ReturnMap(p);
}

void require_annulus(const ReturnMap& map) {
  if (!(map.A() > 0.0)) throw ConfigError("this command needs A > 0");
  if (!(map.lambda() < map.A())) throw ConfigError("this command needs a = lambda/A < 1");
}

std::string out_dir(const CommandContext& ctx, const std::string& name) {
  return ctx.out_dir.empty() ? "bykov-" + name : ctx.out_dir;
}

int cmd_constants(const CommandContext& ctx, std::ostream& os) {
  RunOutput out(out_dir(ctx, "constants"), ctx.force, "constants", ctx.config);
  const ModelParams p = checked_model(ctx.config);
  const DerivedConstants d = derive_constants(p);
  const double a = d.a();  // throws for A = 0
  const double g = curve_g(d.K_omega), f = curve_f(d.K_omega);
  os << "delta1   " << R(d.delta1) << "\n"
     << "delta2   " << R(d.delta2) << "\n"
     << "delta    " << R(d.delta) << "\n"
     << "K        " << R(d.K) << "\n"
     << "K_omega  " << R(d.K_omega) << "\n"
     << "a        " << R(a) << "\n"
     << "g        " << R(g) << "\n"
     << "f        " << R(f) << "\n";
  CsvTable t(headers::kConstants);
  t.row({R(d.delta1), R(d.delta2), R(d.delta), R(d.K), R(d.K_omega), R(a), R(g), R(f)});
  out.add("constants.csv", t.text());
  out.commit();
  return kOk;
}

int cmd_classify(const CommandContext& ctx, std::ostream& os) {
  const RunConfig& cfg = ctx.config;
  RunOutput out(out_dir(ctx, "classify"), ctx.force, "classify", cfg);
  const ReturnMap map = make_map(cfg);
  if (!(map.A() > 0.0)) throw ConfigError("classify needs A > 0");
  ClassifyOptions opt;
  opt.c = cfg.real("classify.c");
  opt.run_checkers = cfg.flag("classify.checkers");
  opt.grid = static_cast<int>(cfg.integer("classify.grid"));
  const RegimeReport rep = classify(map, opt);
  os << to_string(rep.classification) << ": a = " << R(rep.a) << ", g = " << R(rep.torus_threshold)
     << ", f = " << R(rep.chaos_threshold) << "\n";
  CsvTable t(headers::kClassify);
  t.row({R(map.A()), R(map.lambda()), R(rep.a), R(map.K_omega()), R(rep.torus_threshold),
         R(rep.chaos_threshold), to_string(rep.classification)});
  out.add("classify.csv", t.text());
  if (opt.run_checkers) {
    CsvTable c(headers::kCheckers);
    if (rep.annulus) {
      for (const auto& cond : rep.annulus->conditions) {
        c.row({"annulus", cond.name, B(cond.holds), R(cond.margin)});
        os << "  " << cond.name << ": " << B(cond.holds) << " (margin " << R(cond.margin) << ")\n";
      }
    }
    if (rep.abs) {
      for (const auto& cond : rep.abs->conditions) {
        c.row({"abs", cond.name, B(cond.holds), R(cond.margin)});
        os << "  " << cond.name << ": " << B(cond.holds) << " (margin " << R(cond.margin) << ")\n";
      }
    } else {
      os << "  strips: " << rep.diagnostics << "\n";
    }
    out.add("checkers.csv", c.text());
  }
  out.commit();
  return kOk;
}

}  // namespace

int sweep_gray(const char* regime, bool strange) {
  if (strange) return 0;
  const std::string r = regime;
  if (r == "Torus") return 255;
  if (r == "Transition") return 170;
  return 85;
}

namespace {

int cmd_sweep(const CommandContext& ctx, std::ostream& os) {
  const RunConfig& cfg = ctx.config;
  RunOutput out(out_dir(ctx, "sweep"), ctx.force, "sweep", cfg);
  const ReturnMap base = make_map(cfg);
  ScanGrid grid;
  const std::string axis = cfg.text("sweep.axis");
  if (axis == "A") {
    grid.axis = SweepAxis::A;
  } else if (axis == "K_omega") {
    grid.axis = SweepAxis::K_omega;
  } else {
    throw ConfigError("sweep.axis must be A or K_omega");
  }
  grid.x = {cfg.real("sweep.x_min"), cfg.real("sweep.x_max"),
            static_cast<int>(cfg.integer("sweep.x_n"))};
  grid.a = {cfg.real("sweep.a_min"), cfg.real("sweep.a_max"),
            static_cast<int>(cfg.integer("sweep.a_n"))};
  if (grid.x.n <= 0 || grid.a.n <= 0) throw ConfigError("sweep grid is empty");
  if (!(std::min(grid.x.lo, grid.x.hi) > 0.0)) throw ConfigError("sweep column values must be positive");
  if (!(std::min(grid.a.lo, grid.a.hi) >= 0.0) || !(std::max(grid.a.lo, grid.a.hi) < 1.0))
    throw ConfigError("sweep a-range must lie in [0, 1)");
  ScanBudget budget;
  budget.orbits = static_cast<int>(cfg.integer("sweep.orbits"));
  budget.iterations = cfg.integer("sweep.iterations");
  budget.transient = cfg.integer("sweep.transient");
  if (budget.orbits < 1 || budget.iterations < 1000 || budget.transient < 0)
    throw ConfigError("sweep budget: orbits >= 1, iterations >= 1000, transient >= 0");

  MapFamily fam{base.delta(), base.K_omega(), base.A()};
  const int workers = resolve_workers(static_cast<int>(cfg.integer("workers")));
  const ScanResult res = strange_attractor_scan(fam, grid, budget, cfg.u64("seed"), workers);

  CsvTable t(headers::kSweep);
  std::vector<int> pixels(res.cells.size());
  for (const CellResult& c : res.cells) {
    t.row({I(c.row), I(c.col), axis, R(c.x), R(c.a), to_string(c.regime), to_string(c.cls),
           R(c.lambda_max), R(c.lambda_sum), R(c.escape_fraction)});
    // Top raster row holds the largest a.
    const int prow = grid.a.n - 1 - c.row;
    pixels[static_cast<std::size_t>(prow) * grid.x.n + c.col] =
        sweep_gray(to_string(c.regime), c.cls == CellClass::StrangeCandidate);
  }
  out.add("sweep.csv", t.text());
  out.add("sweep.pgm", pgm_p2(grid.x.n, grid.a.n, pixels));
  os << res.cells.size() << " cells, strange-candidate fraction " << R(res.strange_fraction) << "\n";
  out.commit();
  return kOk;
}

int cmd_circle(const CommandContext& ctx, std::ostream& os) {
  const RunConfig& cfg = ctx.config;
  RunOutput out(out_dir(ctx, "circle"), ctx.force, "circle", cfg);
  const ReturnMap map = make_map(cfg);
  require_annulus(map);
  const CircleGraph g =
      graph_transform(map, annulus_band(map), static_cast<int>(cfg.integer("circle.N")),
                      cfg.real("circle.tol"), static_cast<int>(cfg.integer("circle.max_iter")));
  const RotationEstimate rho = rotation_number(map, g, cfg.integer("circle.rotation_n"));
  CsvTable t(headers::kCircle);
  for (int i = 0; i < g.N(); ++i) {
    const CylinderPoint q = map.eval({g.node(i), g.heights[i]});
    t.row({I(i), R(g.node(i)), R(g.heights[i]), R(std::fabs(q.y() - g.height_at(q.x())))});
  }
  CsvTable s(headers::kCircleSummary);
  s.row({I(g.N()), I(g.iterations), R(g.last_change), R(g.residual), R(rho.rho), R(rho.rho_half),
         B(rho.converged)});
  out.add("circle.csv", t.text());
  out.add("circle_summary.csv", s.text());
  os << "converged in " << g.iterations << " iterations, residual " << R(g.residual)
     << ", rotation number " << R(rho.rho_mod1()) << " (mod 1, converged " << B(rho.converged)
     << ")\n";
  out.commit();
  return kOk;
}

int cmd_lyapunov(const CommandContext& ctx, std::ostream& os) {
  const RunConfig& cfg = ctx.config;
  RunOutput out(out_dir(ctx, "lyapunov"), ctx.force, "lyapunov", cfg);
  const ReturnMap map = make_map(cfg);
  double y0 = 0.0;
  if (cfg.has("lyapunov.y0")) {
    y0 = cfg.real("lyapunov.y0");
  } else {
    require_annulus(map);
    const AnnulusBand b = annulus_band(map);
    y0 = 0.5 * (b.y_lo + b.y_hi);
  }
  const double x0 = cfg.real("lyapunov.x0");
  const long n = cfg.integer("lyapunov.n"), tr = cfg.integer("lyapunov.transient");
  if (n < 1000 || tr < 0) throw ConfigError("lyapunov.n >= 1000 and lyapunov.transient >= 0 required");
  const LyapunovEstimate e = lyapunov_spectrum(map, CylinderPoint(x0, y0), n, tr);
  CsvTable t(headers::kLyapunov);
  t.row({R(x0), R(y0), I(n), I(tr), R(e.lambda_max), R(e.lambda_sum), R(e.log_det_average),
         B(e.escaped), e.escape_index ? I(*e.escape_index) : ""});
  out.add("lyapunov.csv", t.text());
  os << "lambda_max " << R(e.lambda_max) << ", lambda_sum " << R(e.lambda_sum)
     << (e.escaped ? " (escaped)" : "") << "\n";
  out.commit();
  return e.escaped && e.steps == 0 ? kNumericalFailure : kOk;
}

int cmd_tongue(const CommandContext& ctx, std::ostream& os) {
  const RunConfig& cfg = ctx.config;
  RunOutput out(out_dir(ctx, "tongue"), ctx.force, "tongue", cfg);
  const ReturnMap base = make_map(cfg);
  const int k = static_cast<int>(cfg.integer("tongue.period"));
  if (k < 1) throw ConfigError("tongue.period >= 1 required");
  const Range A{cfg.real("tongue.A_min"), cfg.real("tongue.A_max"),
                static_cast<int>(cfg.integer("tongue.A_n"))};
  const Range a{cfg.real("tongue.a_min"), cfg.real("tongue.a_max"),
                static_cast<int>(cfg.integer("tongue.a_n"))};
  if (!(std::min(A.lo, A.hi) > 0.0) || !(std::max(a.lo, a.hi) < 1.0) || !(std::min(a.lo, a.hi) >= 0.0))
    throw ConfigError("tongue ranges must satisfy A > 0 and 0 <= a < 1");
  const MapFamily fam{base.delta(), base.K_omega(), base.A()};
  const TongueBoundary tb = tongue_boundary(fam, k, static_cast<int>(cfg.integer("tongue.winding")),
                                            a, A, cfg.real("tongue.tol"));
  CsvTable t(headers::kTongue);
  int present = 0;
  for (const auto& c : tb.columns) {
    std::string curve = "absent";
    if (c.present) {
      ++present;
      const bool left = std::any_of(tb.B1.begin(), tb.B1.end(),
                                    [&](const BoundaryPoint& b) { return b.A == c.A; });
      curve = left ? "B1" : "B2";
    }
    t.row({R(c.A), B(c.present), c.present ? R(c.a_birth) : "", curve});
  }
  out.add("tongue.csv", t.text());
  os << present << " of " << tb.columns.size() << " columns have a boundary in range\n";
  out.commit();
  return kOk;
}

int cmd_manifolds(const CommandContext& ctx, std::ostream& os) {
  const RunConfig& cfg = ctx.config;
  RunOutput out(out_dir(ctx, "manifolds"), ctx.force, "manifolds", cfg);
  const ReturnMap map = make_map(cfg);
  require_annulus(map);
  const int k = static_cast<int>(cfg.integer("manifolds.period"));
  if (k < 1) throw ConfigError("manifolds.period >= 1 required");
  const auto orbits = find_periodic(map, k);
  CsvTable ot(headers::kOrbits);
  const PeriodicOrbit* saddle = nullptr;
  for (std::size_t i = 0; i < orbits.size(); ++i) {
    const auto& o = orbits[i];
    ot.row({I(static_cast<long>(i)), I(o.period), I(o.winding), to_string(o.stability),
            R(o.points[0].x()), R(o.points[0].y()), R(o.multipliers[0].real()),
            R(o.multipliers[0].imag()), R(o.multipliers[1].real()), R(o.multipliers[1].imag())});
    const bool winding_ok =
        !cfg.has("manifolds.winding") || o.winding == cfg.integer("manifolds.winding");
    if (!saddle && winding_ok && o.stability == Stability::Saddle &&
        o.multipliers[0].imag() == 0.0)
      saddle = &o;
  }
  if (!saddle)
    throw ConfigError("no saddle orbit of period " + std::to_string(k) +
                      " with the requested winding; manifolds need a saddle anchor");
  HomoclinicSearch search;
  search.manifold.max_arclength = cfg.real("manifolds.arclength");
  search.manifold.spacing = cfg.real("manifolds.spacing");
  search.manifold.y_max = cfg.real("manifolds.y_max_factor") * annulus_band(map).y_hi;
  search.manifold.y_min = -2.0 * map.A();
  search.local_arclength = cfg.real("manifolds.local_arclength");
  search.tol_tangent = cfg.real("manifolds.tol_tangent");

  CsvTable pts(headers::kManifoldPoints);
  CsvTable hx(headers::kCrossings);
  HomoclinicReport total;
  total.min_distance = std::numeric_limits<double>::infinity();
  std::vector<ManifoldCurve> unstable, stable;
  for (int b : {1, -1}) {
    ManifoldOptions o = search.manifold;
    o.branch = b;
    unstable.push_back(grow_manifold(map, *saddle, ManifoldSide::Unstable, o));
    stable.push_back(grow_manifold(map, *saddle, ManifoldSide::Stable, o));
  }
  for (const auto* set : {&unstable, &stable}) {
    for (const auto& c : *set) {
      for (std::size_t i = 0; i < c.polyline.size(); ++i) {
        pts.row({c.side == ManifoldSide::Stable ? "stable" : "unstable", I(c.branch),
                 I(static_cast<long>(i)), R(c.polyline[i].x), R(c.polyline[i].y)});
      }
    }
  }
  for (const auto& u : unstable) {
    for (const auto& s : stable) {
      const HomoclinicReport r = detect_homoclinic(u, s, search);
      total.min_distance = std::min(total.min_distance, r.min_distance);
      for (const auto& c : r.crossings) {
        total.crossings.push_back(c);
        hx.row({R(c.point.x()), R(c.point.y()), R(c.orientation)});
      }
    }
  }
  bool sign_change = false;
  for (const auto& c : total.crossings)
    sign_change = sign_change || c.orientation != total.crossings.front().orientation;
  total.tangency_flag = total.min_distance < search.tol_tangent && !sign_change;
  CsvTable h(headers::kHomoclinic);
  h.row({R(total.min_distance), I(static_cast<long>(total.crossings.size())), B(total.tangency_flag)});
  out.add("orbits.csv", ot.text());
  out.add("manifold_points.csv", pts.text());
  out.add("homoclinic.csv", h.text());
  out.add("crossings.csv", hx.text());
  os << "saddle at (" << R(saddle->points[0].x()) << ", " << R(saddle->points[0].y())
     << "), crossings " << total.crossings.size() << ", min distance " << R(total.min_distance)
     << "\n";
  out.commit();
  return kOk;
}

int cmd_hopf(const CommandContext& ctx, std::ostream& os) {
  const RunConfig& cfg = ctx.config;
  RunOutput out(out_dir(ctx, "hopf"), ctx.force, "hopf", cfg);
  HopfParams p;
  p.mu1 = cfg.real("hopf.mu1");
  p.mu2 = cfg.real("hopf.mu2");
  p.a_h = cfg.real("hopf.a");
  p.c = cfg.real("hopf.c");
  p.d = cfg.real("hopf.d");
  p.e = cfg.real("hopf.e");
  p.f = cfg.real("hopf.f");
  p.omega_lift = cfg.real("hopf.omega");
  const int order = static_cast<int>(cfg.integer("hopf.order"));
  if (order != 2 && order != 3) throw ConfigError("hopf.order must be 2 or 3");
  if (!(p.a_h > 0.0) || !(p.omega_lift > 0.0)) throw ConfigError("hopf.a and hopf.omega must be positive");
  const double h = cfg.real("hopf.h");
  if (!(h > 0.0)) throw ConfigError("hopf.h must be positive");

  CsvTable eq(headers::kEquilibria);
  if (p.mu2 > 0.0) {
    for (const auto& e : equilibria_and_eigenvalues(p, order)) {
      eq.row({R(e.state.r), R(e.state.z), R(e.radial_eig), R(e.axial_eig)});
      os << "equilibrium (0, " << R(e.state.z) << "): radial " << R(e.radial_eig) << ", axial "
         << R(e.axial_eig) << "\n";
    }
  } else {
    os << "no z-axis equilibria (mu2 <= 0)\n";
  }
  out.add("equilibria.csv", eq.text());

  const PlanarState s0{cfg.real("hopf.r0"), cfg.real("hopf.z0")};
  if (s0.r < 0.0) throw ConfigError("hopf.r0 must be non-negative");
  const Trajectory tr = integrate([&](const PlanarState& s) { return field(s, p, order); }, s0,
                                  {0.0, cfg.real("hopf.t_end")}, h);
  const double G0 = first_integral_G(s0, p);
  double drift = 0.0;
  CsvTable tt(headers::kTrajectory);
  for (std::size_t i = 0; i < tr.t.size(); ++i) {
    const double G = first_integral_G(tr.states[i], p);
    drift = std::max(drift, std::fabs(G - G0));
    tt.row({R(tr.t[i]), R(tr.states[i].r), R(tr.states[i].z), R(G)});
  }
  out.add("trajectory.csv", tt.text());
  os << "max |dG| = " << R(drift) << "\n";

  const long hits = cfg.integer("hopf.hits");
  if (hits > 0) {
    SectionSpec spec;
    spec.z0 = cfg.real("hopf.section_z");
    const std::string dir = cfg.text("hopf.direction");
    if (dir == "down") {
      spec.direction = Crossing::Downward;
    } else if (dir == "up") {
      spec.direction = Crossing::Upward;
    } else {
      throw ConfigError("hopf.direction must be down or up");
    }
    spec.s0 = s0;
    spec.h = h;
    spec.t_max = cfg.real("hopf.t_max");
    const SectionResult sec = lift_and_section(p, order, spec, static_cast<int>(hits));
    CsvTable st(headers::kSection);
    for (std::size_t i = 0; i < sec.hits.size(); ++i)
      st.row({I(static_cast<long>(i)), R(sec.hits[i].t), R(sec.hits[i].theta), R(sec.hits[i].r)});
    out.add("section.csv", st.text());
    os << sec.hits.size() << " section crossings recorded\n";
  }
  out.commit();
  return kOk;
}

using Command = int (*)(const CommandContext&, std::ostream&);

const std::map<std::string, Command>& table() {
  static const std::map<std::string, Command> t = {
      {"constants", cmd_constants}, {"classify", cmd_classify}, {"sweep", cmd_sweep},
      {"circle", cmd_circle},       {"lyapunov", cmd_lyapunov}, {"tongue", cmd_tongue},
      {"manifolds", cmd_manifolds}, {"hopf", cmd_hopf},
  };
  return t;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"constants", "classify", "sweep",     "circle",
                                                 "lyapunov",  "tongue",   "manifolds", "hopf"};
  return names;
}

int run_command(const std::string& name, const CommandContext& ctx, std::ostream& out,
                std::ostream& err) {
  const auto it = table().find(name);
  if (it == table().end()) {
    err << "error: unknown command '" << name << "'\n";
    return kConfigError;
  }
  try {
    return it->second(ctx, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const NoEquilibrium& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  }
}

}  // namespace bykov::cli
