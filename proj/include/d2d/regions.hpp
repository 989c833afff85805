#pragma once

#include "d2d/model.hpp"

#include <utility>
#include <vector>

// Full-load engine: with every cell almost surely occupied, the average user
// rate collapses to R_noD2D * (1 + w * f(p,q)) where w = lambda_d /
// (lambda_c + lambda_d) and f depends on the operational point only through
// two (overlay) or three (underlay) condensed coefficients.  This module
// owns f, the per-scheme optimal mode parameters, the closed-form
// operational regions, their bounds, and the boundary / gain-level scanners.

namespace d2d {

struct HeavyLoadCoefficients {
  double c1 = 0.0;      // (lambda_d/lambda_a)(1 + rho(theta_0))
  double c2 = 0.0;      // (1/2) lambda_d pi r_d_max^2 kappa theta_0^(2/alpha)
  double c1_bar = 0.0;  // c1 (1 + lambda_c/lambda_d)
  double c2_bar = 0.0;  // c2 (1 - kappa theta_0^(2/alpha)/(1 + rho))
  double c3_bar = 0.0;  // c2 kappa theta_0^(2/alpha)(1 + lambda_c/lambda_d)/(1 + rho)

  void validate() const;  // all five strictly positive
  // Weight lambda_d/(lambda_c + lambda_d) recovered from the coefficients.
  double rate_weight() const { return c1 / c1_bar; }
};

HeavyLoadCoefficients coefficients(const OperationalPoint& op);

// f(p,q): overlay  c1 p^2 q e^{-c2 q p^gamma} - p
//         underlay c1_bar p q e^{-(c2_bar q p^gamma + c3_bar q p^(gamma-1))} - p
// Positive f means the direct mode beats the conventional network at (p,q).
double f_objective(const HeavyLoadCoefficients& c, DeploymentKind dep,
                   int gamma, double p, double q);

struct SchemeResult {
  SchemeId scheme = SchemeId::S1;
  // Scheme whose branch logic produced the answer; differs from `scheme`
  // only for the degenerate scheme-4 variants that reduce to a simpler one.
  SchemeId effective_scheme = SchemeId::S1;
  double p_star = 1.0;
  double q_star = 1.0;
  double f_star = 0.0;
  double gain = 1.0;  // 1 + rate_weight * f_star
  bool in_region = false;
  bool on_boundary = false;  // |f_star| <= kBoundaryBand
  // True when the value comes from a stationary maximizer interior to the
  // scheme's feasible set (for the joint schemes that means interior to the
  // (p,q) square), as opposed to an edge value or a dominance fallback.
  bool p_interior = false;
  bool q_interior = false;
};

// Membership verdicts within this band of f* = 0 are reported as boundary
// points rather than forced to a side.
inline constexpr double kBoundaryBand = 1e-9;

// Closed-form (numeric only where no closed form exists) maximizer of f over
// the scheme's admissible (p,q) set, with the boundary fallback p* = 1 /
// q* = 1 where no interior stationary point exists.
SchemeResult optimize_scheme(const HeavyLoadCoefficients& c, SchemeId scheme,
                             DeploymentKind dep);

// Closed-form operational-region membership (strict f > 0 somewhere).
bool region_membership(const HeavyLoadCoefficients& c, SchemeId scheme,
                       DeploymentKind dep);

// Inner/outer closed-form bounds of the underlay distance-selection region
// where p* < 1.  inner implies numeric p* < 1 implies outer.
std::pair<bool, bool> region_3d_underlay_bounds(const HeavyLoadCoefficients& c);

// Verifies the scheme dominance chain at these coefficients:
//   overlay  f*(3-d) >= f*(2) >= f*(3-p) >= f*(1)
//   underlay f*(3-d) >= f*(4-p) >= max(f*(2), f*(3-p)) >= f*(1),
//            plus underlay f*(3-d) >= overlay f*(3-d).
bool ordering_check(const HeavyLoadCoefficients& c, DeploymentKind dep,
                    double slack = 1e-9);

// Figure axes: x = lambda_d * E[pi r_d^2] = (1/2) lambda_d pi r_d_max^2
// (mean number of closer competing sources), y = lambda_d / lambda_a (mean
// direct-capable UEs per cell); alpha, theta_0 and lambda_c/lambda_a fixed.
struct RegionQueryAxes {
  double x_min = 1e-3, x_max = 10.0;
  double y_min = 1e-2, y_max = 50.0;
  double alpha = 4.0;
  double theta_0 = 0.251188643150958;  // -6 dB
  double lambda_c_ratio = 10.0;        // lambda_c / lambda_a

  void validate() const;
};

HeavyLoadCoefficients coefficients_from_axes(double x, double y,
                                             const RegionQueryAxes& axes);

struct BoundaryPoint {
  double x = 0.0;
  double y = 0.0;
};

// Region boundary sampled on `resolution` rows of y; along each row every
// membership sign change in x is bisected.  An empty result is valid (whole
// window on one side).
std::vector<BoundaryPoint> trace_boundary(SchemeId scheme, DeploymentKind dep,
                                          const RegionQueryAxes& axes,
                                          int resolution);

// Isoline of the optimized gain 1 + w f*; gain_target = 1 reproduces the
// region boundary.  gain_target < 1 is rejected.
std::vector<BoundaryPoint> gain_level_set(SchemeId scheme, DeploymentKind dep,
                                          const RegionQueryAxes& axes,
                                          double gain_target, int resolution);

}  // namespace d2d
