#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>

#include "bykov/maps.hpp"

namespace bykov {

// Safety factor applied to sampled sup-norms before conditions are evaluated.
inline constexpr double kLipschitzSafety = 1.05;

double curve_g(double K_omega);
double curve_f(double K_omega);
double stretch_P(double delta_ang, double a, double c, double K_omega);
double two_turns_threshold(double c, double K_omega);

struct AnnulusBand {
  double y_lo = 0.0;
  double y_hi = 0.0;
};

AnnulusBand annulus_band(const DerivedConstants& consts, double A, double lambda);
AnnulusBand annulus_band(const ReturnMap& map);

struct InvarianceReport {
  bool invariant = false;
  double margin = 0.0;  // min distance of sampled images to the band edges
  std::size_t samples = 0;
  std::size_t escapes = 0;
};

InvarianceReport check_annulus_invariance(const ReturnMap& map, const AnnulusBand& band,
                                          int n_samples);

struct NamedCondition {
  std::string name;
  bool holds = false;
  double margin = 0.0;
};

// Sampled norms of the partials of F = (x + g1, g2) over a region.
struct PartialNorms {
  double min_d11 = 0.0;      // inf of 1 + dg1/dx
  double sup_abs_d11 = 0.0;  // sup |1 + dg1/dx|
  double inf_abs_d11 = 0.0;  // inf |1 + dg1/dx|
  double sup_abs_d12 = 0.0;
  double sup_abs_d21 = 0.0;
  double sup_abs_d22 = 0.0;
};

struct AnnulusPrincipleReport {
  std::array<NamedCondition, 6> conditions;
  PartialNorms norms;
  // Condition (5) with ||1 + dg1/dx||^-1 read as 1 / sup instead of the sup of
  // the inverse. Reported only; it does not exclude folding at finite A.
  double reciprocal_sup_cross_margin = 0.0;
  bool all() const;
};

AnnulusPrincipleReport check_annulus_principle(const ReturnMap& map, const AnnulusBand& band,
                                               int nx, int ny);

struct Rect {
  double x_lo = 0.0, x_hi = 0.0, y_lo = 0.0, y_hi = 0.0;
};

struct AbsReport {
  std::array<NamedCondition, 4> conditions;
  PartialNorms norms;
  double inverse_norm = 0.0;  // ||(dF1/dx)^-1|| = 1 / inf |dF1/dx|
  bool all() const;
};

AbsReport check_abs_hyperbolicity(const ReturnMap& map, std::span<const Rect> region, int nx,
                                  int ny);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
};

struct StripPair {
  Interval I1;
  Interval I2;
  double c = 0.25;
  double theta0 = 0.0;
  double delta0 = 0.0;
  double height = 0.0;  // strips are I_j x [0, height]
  bool ordered() const;
};

struct StripSearch {
  int candidates = 400;   // split points tried inside (theta0, 3pi/2 - delta0)
  int edge_samples = 16;  // y samples per vertical edge in the pre-check
  std::optional<double> height;  // default: top of the annulus band
};

struct StripSearchResult {
  std::optional<StripPair> strips;
  std::string diagnostics;
};

StripSearchResult build_strips(const ReturnMap& map, double c, const StripSearch& search = {});

struct CoveringReport {
  // transitions[i][j]: image of H_i crosses H_j in a full vertical strip.
  std::array<std::array<bool, 2>, 2> transitions{};
  double margin = 0.0;  // smallest angular slack over all four relations
  double max_image_height = 0.0;
  std::size_t escapes = 0;
  bool full() const;
  // log of the spectral radius of the transition matrix.
  double entropy_bound() const;
};

CoveringReport verify_horseshoe(const ReturnMap& map, const StripPair& strips,
                                double band_height, int n_boundary);

enum class Regime { Torus, Transition, Horseshoe };
const char* to_string(Regime r);

struct ClassifyOptions {
  bool run_checkers = false;
  int grid = 64;
  double c = 0.25;
};

struct RegimeReport {
  double torus_threshold = 0.0;
  double chaos_threshold = 0.0;
  double a = 0.0;
  Regime classification = Regime::Torus;
  std::optional<AnnulusPrincipleReport> annulus;
  std::optional<AbsReport> abs;
  std::optional<StripPair> strips;
  std::string diagnostics;
};

RegimeReport classify(const ModelParams& params, const ClassifyOptions& options = {});
RegimeReport classify(const ReturnMap& map, const ClassifyOptions& options = {});

}  // namespace bykov
