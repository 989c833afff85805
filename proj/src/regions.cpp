#include "d2d/regions.hpp"

#include "d2d/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace d2d {

namespace {

constexpr double kE = std::numbers::e;
constexpr double kRootTol = 1e-13;

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

// --- per-scheme branch logic -------------------------------------------
//
// Every objective below is unimodal on its admissible segment once the
// interior-branch inequalities hold, and each interior stationary point is
// the root of a strictly decreasing function of x, so a bisection bracket
// is guaranteed.  Bracket failures (points numerically on a branch edge)
// fall back to the boundary value p* = 1 or q* = 1.

struct LineOptimum {
  double v_star = 1.0;  // optimal p or q
  double f_star = 0.0;
  bool interior = false;
};

double f_overlay(const HeavyLoadCoefficients& c, int gamma, double p,
                 double q) {
  return c.c1 * p * p * q * std::exp(-c.c2 * q * std::pow(p, gamma)) - p;
}

double f_underlay(const HeavyLoadCoefficients& c, int gamma, double p,
                  double q) {
  const double expo = c.c2_bar * q * std::pow(p, gamma) +
                      c.c3_bar * q * std::pow(p, gamma - 1);
  return c.c1_bar * p * q * std::exp(-expo) - p;
}

LineOptimum optimize_s2(const HeavyLoadCoefficients& c, DeploymentKind dep) {
  const bool ov = dep == DeploymentKind::Overlay;
  const double a = ov ? c.c1 : c.c1_bar;
  const double b = ov ? c.c2 : c.c2_bar + c.c3_bar;
  LineOptimum r;
  // f(1,q) = a q e^{-b q} - 1 peaks at q = 1/b.
  r.interior = b > 1.0;
  r.v_star = r.interior ? 1.0 / b : 1.0;
  r.f_star = a * r.v_star * std::exp(-b * r.v_star) - 1.0;
  return r;
}

LineOptimum optimize_s3p_overlay(const HeavyLoadCoefficients& c) {
  LineOptimum r;
  const bool interior =
      c.c2 > 1.0 && c.c1 > kE * c.c2 &&
      (c.c2 >= 2.0 || c.c1 < std::exp(c.c2) / (2.0 - c.c2));
  if (interior) {
    const double target = c.c2 / c.c1;
    const double hi = std::min(2.0, c.c2);
    try {
      const double x = solve_monotone(
          [target](double v) {
            return v * std::exp(-v) * (2.0 - v) - target;
          },
          {1.0, hi, kRootTol});
      r.v_star = x / c.c2;
      r.f_star = f_overlay(c, 1, r.v_star, 1.0);
      r.interior = true;
      return r;
    } catch (const std::runtime_error&) {
      // borderline bracket; use the boundary value below
    }
  }
  r.v_star = 1.0;
  r.f_star = f_overlay(c, 1, 1.0, 1.0);
  return r;
}

LineOptimum optimize_s3p_underlay(const HeavyLoadCoefficients& c) {
  LineOptimum r;
  const double s = c.c2_bar + c.c3_bar;
  const bool interior =
      c.c1_bar > std::exp(c.c3_bar) &&
      (c.c2_bar >= 1.0 || c.c1_bar < std::exp(s) / (1.0 - c.c2_bar));
  if (interior) {
    const double target = std::exp(c.c3_bar) / c.c1_bar;
    const double hi = std::min(1.0, c.c2_bar);
    try {
      const double x = solve_monotone(
          [target](double v) { return std::exp(-v) * (1.0 - v) - target; },
          {0.0, hi, kRootTol});
      r.v_star = x / c.c2_bar;
      r.f_star = f_underlay(c, 1, r.v_star, 1.0);
      r.interior = true;
      return r;
    } catch (const std::runtime_error&) {
    }
  }
  r.v_star = 1.0;
  r.f_star = f_underlay(c, 1, 1.0, 1.0);
  return r;
}

LineOptimum optimize_s3d_overlay(const HeavyLoadCoefficients& c) {
  LineOptimum r;
  const bool interior =
      c.c1 > std::sqrt(2.0 * c.c2 * kE) &&
      (c.c2 >= 1.0 ||
       (c.c2 > 0.5 && c.c1 < std::exp(c.c2) / (2.0 * (1.0 - c.c2))));
  if (interior) {
    const double target = std::sqrt(c.c2) / (2.0 * c.c1);
    const double hi = std::min(1.0, c.c2);
    try {
      const double x = solve_monotone(
          [target](double v) {
            return std::sqrt(v) * std::exp(-v) * (1.0 - v) - target;
          },
          {0.5, hi, kRootTol});
      r.v_star = std::sqrt(x / c.c2);
      r.f_star = f_overlay(c, 2, r.v_star, 1.0);
      r.interior = true;
      return r;
    } catch (const std::runtime_error&) {
    }
  }
  // No stationary maximizer: the best admissible point is p = 1 or the
  // image sqrt(q*) of the scheme-2 optimum, which dominates scheme 2
  // pointwise (f(sqrt(q), 1) = c1 q e^{-c2 q} - sqrt(q) >= c1 q e^{-c2 q} - 1).
  r.v_star = 1.0;
  r.f_star = f_overlay(c, 2, 1.0, 1.0);
  const LineOptimum s2 = optimize_s2(c, DeploymentKind::Overlay);
  const double mapped = std::sqrt(s2.v_star);
  const double f_mapped = f_overlay(c, 2, mapped, 1.0);
  if (f_mapped > r.f_star) {
    r.v_star = mapped;
    r.f_star = f_mapped;
  }
  return r;
}

struct PlaneOptimum {
  double p_star = 1.0, q_star = 1.0, f_star = 0.0;
  bool p_interior = false, q_interior = false;
  SchemeId effective = SchemeId::S4p;
};

PlaneOptimum optimize_s4p_underlay(const HeavyLoadCoefficients& c);

// No closed form exists for the underlay distance-selection optimum; the
// derivative of f(p,1) is strictly decreasing on the segment that can hold
// the root, so the stationary point is found by bisecting it.
LineOptimum optimize_s3d_underlay(const HeavyLoadCoefficients& c) {
  LineOptimum r;
  const auto dfdp = [&c](double p) {
    const double sigma = c.c2_bar * p * p + c.c3_bar * p;
    return c.c1_bar * std::exp(-sigma) *
               (1.0 - 2.0 * c.c2_bar * p * p - c.c3_bar * p) -
           1.0;
  };
  // f' (0+) = c1_bar - 1: nothing to gain unless c1_bar > 1.
  if (c.c1_bar > 1.0 && dfdp(1.0) < 0.0) {
    try {
      r.v_star = solve_monotone(dfdp, {0.0, 1.0, kRootTol});
      r.f_star = f_underlay(c, 2, r.v_star, 1.0);
      r.interior = true;
      return r;
    } catch (const std::runtime_error&) {
    }
  }
  // Fallback candidates: p = 1 and the product image p*q* of the
  // probabilistic joint optimum, which it dominates pointwise
  // (f(pq, 1) >= c1_bar pq e^{-(c2_bar p + c3_bar) q} - p for p, q <= 1).
  r.v_star = 1.0;
  r.f_star = f_underlay(c, 2, 1.0, 1.0);
  const PlaneOptimum joint = optimize_s4p_underlay(c);
  const double mapped = std::clamp(joint.p_star * joint.q_star, 1e-300, 1.0);
  const double f_mapped = f_underlay(c, 2, mapped, 1.0);
  if (f_mapped > r.f_star) {
    r.v_star = mapped;
    r.f_star = f_mapped;
  }
  return r;
}

// Underlay with probabilistic selection and both knobs free is the one
// scheme with a genuine interior joint optimum:
//   q* = sqrt(e/(c1_bar c3_bar)),  p* = (sqrt(c1_bar c3_bar/e) - c3_bar)/c2_bar.
// When the joint optimum leaves (0,1)^2 the maximum sits on a boundary edge
// and the problem reduces to scheme 2 (p = 1) or scheme 3-p (q = 1).
PlaneOptimum optimize_s4p_underlay(const HeavyLoadCoefficients& c) {
  // Edge solutions sit on the boundary of the (p,q) square, so they carry
  // no interior flags even when stationary along their own edge.
  PlaneOptimum best;
  const LineOptimum s2 = optimize_s2(c, DeploymentKind::Underlay);
  const LineOptimum s3p = optimize_s3p_underlay(c);
  if (s2.f_star >= s3p.f_star) {
    best = {1.0, s2.v_star, s2.f_star, false, false, SchemeId::S2};
  } else {
    best = {s3p.v_star, 1.0, s3p.f_star, false, false, SchemeId::S3p};
  }

  const double q_hat = std::sqrt(kE / (c.c1_bar * c.c3_bar));
  const double p_hat =
      (std::sqrt(c.c1_bar * c.c3_bar / kE) - c.c3_bar) / c.c2_bar;
  if (p_hat > 0.0 && p_hat < 1.0 && q_hat < 1.0) {
    const double f_hat = f_underlay(c, 1, p_hat, q_hat);
    if (f_hat > best.f_star) {
      best = {p_hat, q_hat, f_hat, true, true, SchemeId::S4p};
    }
  }
  return best;
}

// --- closed-form regions -------------------------------------------------

bool member_s1(const HeavyLoadCoefficients& c, DeploymentKind dep) {
  if (dep == DeploymentKind::Overlay) return c.c1 > std::exp(c.c2);
  return c.c1_bar > std::exp(c.c2_bar + c.c3_bar);
}

bool member_s2_hat(const HeavyLoadCoefficients& c, DeploymentKind dep) {
  if (dep == DeploymentKind::Overlay) {
    return c.c1 > kE * c.c2 && c.c2 > 1.0;
  }
  const double s = c.c2_bar + c.c3_bar;
  return c.c1_bar > kE * s && s > 1.0;
}

bool member_s3p_hat(const HeavyLoadCoefficients& c, DeploymentKind dep) {
  if (dep == DeploymentKind::Overlay) {
    if (c.c1 <= kE * c.c2) return false;
    if (c.c2 >= 2.0) return true;
    return c.c2 > 1.0 && c.c1 < std::exp(c.c2) / (2.0 - c.c2);
  }
  if (c.c1_bar <= std::exp(c.c3_bar)) return false;
  if (c.c2_bar >= 1.0) return true;
  return c.c1_bar <
         std::exp(c.c2_bar + c.c3_bar) / (1.0 - c.c2_bar);
}

bool member_s3d_hat_overlay(const HeavyLoadCoefficients& c) {
  if (c.c1 <= std::sqrt(2.0 * c.c2 * kE)) return false;
  if (c.c2 >= 1.0) return true;
  return c.c2 > 0.5 && c.c1 < std::exp(c.c2) / (2.0 * (1.0 - c.c2));
}

bool member_s4p_hat_underlay(const HeavyLoadCoefficients& c) {
  const double s = c.c2_bar + c.c3_bar;
  return s > 1.0 &&
         c.c1_bar > std::max(kE / c.c3_bar, kE * c.c3_bar) &&
         c.c1_bar < kE * s * s / c.c3_bar;
}

}  // namespace

void HeavyLoadCoefficients::validate() const {
  require(c1 > 0.0 && c2 > 0.0, "heavy-load coefficients: c1, c2 must be > 0");
  require(c1_bar > 0.0 && c3_bar > 0.0,
          "heavy-load coefficients: c1_bar, c3_bar must be > 0");
  if (!(c2_bar > 0.0)) {
    throw std::invalid_argument(
        "heavy-load coefficients: c2_bar <= 0; the operational point has "
        "kappa*theta_0^(2/alpha) >= 1 + rho(theta_0), outside the regime the "
        "underlay closed forms cover");
  }
}

HeavyLoadCoefficients coefficients(const OperationalPoint& op) {
  op.validate();
  const double rho0 = rho(op.theta_0, op.alpha);
  const double shape = kappa(op.alpha) * std::pow(op.theta_0, 2.0 / op.alpha);
  const double ratio = 1.0 + op.lambda_c / op.lambda_d;

  HeavyLoadCoefficients c;
  c.c1 = op.lambda_d / op.lambda_a * (1.0 + rho0);
  c.c2 = 0.5 * op.lambda_d * std::numbers::pi * op.r_d_max * op.r_d_max *
         shape;
  c.c1_bar = c.c1 * ratio;
  c.c2_bar = c.c2 * (1.0 - shape / (1.0 + rho0));
  c.c3_bar = c.c2 * shape * ratio / (1.0 + rho0);
  c.validate();
  return c;
}

double f_objective(const HeavyLoadCoefficients& c, DeploymentKind dep,
                   int gamma, double p, double q) {
  require(gamma == 1 || gamma == 2, "f_objective: gamma must be 1 or 2");
  require(p > 0.0 && p <= 1.0 && q > 0.0 && q <= 1.0,
          "f_objective: p, q must be in (0,1]");
  return dep == DeploymentKind::Overlay ? f_overlay(c, gamma, p, q)
                                        : f_underlay(c, gamma, p, q);
}

SchemeResult optimize_scheme(const HeavyLoadCoefficients& c, SchemeId scheme,
                             DeploymentKind dep) {
  c.validate();
  const bool ov = dep == DeploymentKind::Overlay;
  SchemeResult r;
  r.scheme = scheme;
  r.effective_scheme = scheme;

  switch (scheme) {
    case SchemeId::S1:
      r.f_star = ov ? f_overlay(c, 1, 1.0, 1.0) : f_underlay(c, 1, 1.0, 1.0);
      break;
    case SchemeId::S2: {
      const LineOptimum o = optimize_s2(c, dep);
      r.q_star = o.v_star;
      r.q_interior = o.interior;
      r.f_star = o.f_star;
      break;
    }
    case SchemeId::S3p: {
      const LineOptimum o =
          ov ? optimize_s3p_overlay(c) : optimize_s3p_underlay(c);
      r.p_star = o.v_star;
      r.p_interior = o.interior;
      r.f_star = o.f_star;
      break;
    }
    case SchemeId::S3d: {
      const LineOptimum o =
          ov ? optimize_s3d_overlay(c) : optimize_s3d_underlay(c);
      r.p_star = o.v_star;
      r.p_interior = o.interior;
      r.f_star = o.f_star;
      break;
    }
    case SchemeId::S4p: {
      if (ov) {
        // No interior joint optimum exists; the maximum lives on the p = 1
        // or q = 1 edge, so serve the request with the better reduced scheme.
        // Edge points are boundary points of the square: no interior flags.
        const LineOptimum s2 = optimize_s2(c, dep);
        const LineOptimum s3p = optimize_s3p_overlay(c);
        if (s2.f_star >= s3p.f_star) {
          r.q_star = s2.v_star;
          r.f_star = s2.f_star;
          r.effective_scheme = SchemeId::S2;
        } else {
          r.p_star = s3p.v_star;
          r.f_star = s3p.f_star;
          r.effective_scheme = SchemeId::S3p;
        }
      } else {
        const PlaneOptimum o = optimize_s4p_underlay(c);
        r.p_star = o.p_star;
        r.q_star = o.q_star;
        r.f_star = o.f_star;
        r.p_interior = o.p_interior;
        r.q_interior = o.q_interior;
        r.effective_scheme = o.effective;
      }
      break;
    }
    case SchemeId::S4d: {
      // Same reduction for the distance-selection variants.
      const LineOptimum s2 = optimize_s2(c, dep);
      const LineOptimum s3d =
          ov ? optimize_s3d_overlay(c) : optimize_s3d_underlay(c);
      if (s2.f_star >= s3d.f_star) {
        r.q_star = s2.v_star;
        r.f_star = s2.f_star;
        r.effective_scheme = SchemeId::S2;
      } else {
        r.p_star = s3d.v_star;
        r.f_star = s3d.f_star;
        r.effective_scheme = SchemeId::S3d;
      }
      break;
    }
  }

  r.gain = 1.0 + c.rate_weight() * r.f_star;
  r.in_region = region_membership(c, scheme, dep);
  r.on_boundary = std::abs(r.f_star) <= kBoundaryBand;
  return r;
}

bool region_membership(const HeavyLoadCoefficients& c, SchemeId scheme,
                       DeploymentKind dep) {
  c.validate();
  const bool ov = dep == DeploymentKind::Overlay;
  switch (scheme) {
    case SchemeId::S1:
      return member_s1(c, dep);
    case SchemeId::S2:
      return member_s1(c, dep) || member_s2_hat(c, dep);
    case SchemeId::S3p:
      return member_s1(c, dep) || member_s3p_hat(c, dep);
    case SchemeId::S3d:
      if (ov) return member_s1(c, dep) || member_s3d_hat_overlay(c);
      return c.c1_bar > 1.0;
    case SchemeId::S4p:
      if (ov) return region_membership(c, SchemeId::S2, dep);
      return region_membership(c, SchemeId::S2, dep) ||
             region_membership(c, SchemeId::S3p, dep) ||
             member_s4p_hat_underlay(c);
    case SchemeId::S4d:
      return region_membership(c, SchemeId::S3d, dep) ||
             region_membership(c, SchemeId::S2, dep);
  }
  return false;
}

std::pair<bool, bool> region_3d_underlay_bounds(
    const HeavyLoadCoefficients& c) {
  c.validate();
  const double s = c.c2_bar + c.c3_bar;
  const auto bound = [&](double beta) {
    if (!(c.c1_bar > 1.0)) return false;
    if (s >= 1.0 / beta) return true;
    return c.c1_bar < std::exp(s) / (1.0 - beta * s);
  };
  return {bound(1.0), bound(2.0)};
}

bool ordering_check(const HeavyLoadCoefficients& c, DeploymentKind dep,
                    double slack) {
  c.validate();
  const auto f = [&](SchemeId s, DeploymentKind d) {
    return optimize_scheme(c, s, d).f_star;
  };
  if (dep == DeploymentKind::Overlay) {
    const double f1 = f(SchemeId::S1, dep), f2 = f(SchemeId::S2, dep);
    const double f3p = f(SchemeId::S3p, dep), f3d = f(SchemeId::S3d, dep);
    return f3d >= f2 - slack && f2 >= f3p - slack && f3p >= f1 - slack;
  }
  const double f1 = f(SchemeId::S1, dep), f2 = f(SchemeId::S2, dep);
  const double f3p = f(SchemeId::S3p, dep), f3d = f(SchemeId::S3d, dep);
  const double f4p = f(SchemeId::S4p, dep);
  const double f3d_ov = f(SchemeId::S3d, DeploymentKind::Overlay);
  return f3d >= f4p - slack && f4p >= f2 - slack && f4p >= f3p - slack &&
         f2 >= f1 - slack && f3p >= f1 - slack && f3d >= f3d_ov - slack;
}

void RegionQueryAxes::validate() const {
  require(x_min > 0.0 && x_min < x_max, "axes: need 0 < x_min < x_max");
  require(y_min > 0.0 && y_min < y_max, "axes: need 0 < y_min < y_max");
  require(alpha > 2.0, "axes: alpha must be > 2");
  require(theta_0 > 0.0, "axes: theta_0 must be > 0");
  require(lambda_c_ratio > 0.0, "axes: lambda_c/lambda_a must be > 0");
}

namespace {

// Scan context carrying the theta_0-dependent constants so per-cell
// coefficient evaluation is pure arithmetic.
struct AxesContext {
  double rho0, shape, lc_ratio;

  explicit AxesContext(const RegionQueryAxes& axes)
      : rho0(rho(axes.theta_0, axes.alpha)),
        shape(kappa(axes.alpha) * std::pow(axes.theta_0, 2.0 / axes.alpha)),
        lc_ratio(axes.lambda_c_ratio) {}

  HeavyLoadCoefficients at(double x, double y) const {
    HeavyLoadCoefficients c;
    const double ratio = 1.0 + lc_ratio / y;
    c.c1 = y * (1.0 + rho0);
    c.c2 = x * shape;
    c.c1_bar = c.c1 * ratio;
    c.c2_bar = c.c2 * (1.0 - shape / (1.0 + rho0));
    c.c3_bar = c.c2 * shape * ratio / (1.0 + rho0);
    return c;
  }
};

template <typename Pred>
std::vector<BoundaryPoint> scan_sign_changes(const RegionQueryAxes& axes,
                                             int resolution, Pred inside) {
  axes.validate();
  require(resolution >= 2, "scan: resolution must be >= 2");
  std::vector<BoundaryPoint> pts;
  const double dy = (axes.y_max - axes.y_min) / (resolution - 1);
  const double dx = (axes.x_max - axes.x_min) / (resolution - 1);
  for (int row = 0; row < resolution; ++row) {
    const double y = axes.y_min + row * dy;
    bool prev = inside(axes.x_min, y);
    for (int i = 1; i < resolution; ++i) {
      const double x = axes.x_min + i * dx;
      const bool cur = inside(x, y);
      if (cur != prev) {
        double lo = axes.x_min + (i - 1) * dx, hi = x;
        for (int it = 0; it < 60 && hi - lo > 1e-14 * std::max(1.0, hi);
             ++it) {
          const double mid = 0.5 * (lo + hi);
          (inside(mid, y) == prev ? lo : hi) = mid;
        }
        pts.push_back({0.5 * (lo + hi), y});
      }
      prev = cur;
    }
  }
  return pts;
}

}  // namespace

HeavyLoadCoefficients coefficients_from_axes(double x, double y,
                                             const RegionQueryAxes& axes) {
  axes.validate();
  require(x > 0.0 && y > 0.0, "axes: x, y must be > 0");
  HeavyLoadCoefficients c = AxesContext(axes).at(x, y);
  c.validate();
  return c;
}

std::vector<BoundaryPoint> trace_boundary(SchemeId scheme, DeploymentKind dep,
                                          const RegionQueryAxes& axes,
                                          int resolution) {
  const AxesContext ctx(axes);
  return scan_sign_changes(axes, resolution, [&](double x, double y) {
    return region_membership(ctx.at(x, y), scheme, dep);
  });
}

std::vector<BoundaryPoint> gain_level_set(SchemeId scheme, DeploymentKind dep,
                                          const RegionQueryAxes& axes,
                                          double gain_target, int resolution) {
  require(gain_target >= 1.0, "gain_level_set: gain target must be >= 1");
  const AxesContext ctx(axes);
  return scan_sign_changes(axes, resolution, [&](double x, double y) {
    return optimize_scheme(ctx.at(x, y), scheme, dep).gain > gain_target;
  });
}

}  // namespace d2d
