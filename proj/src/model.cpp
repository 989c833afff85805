#include "d2d/model.hpp"

#include "d2d/numerics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace d2d {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

double log2_1p(double theta) { return std::log2(1.0 + theta); }

}  // namespace

void OperationalPoint::validate() const {
  require(lambda_c > 0.0, "operational point: lambda_c must be > 0");
  require(lambda_d > 0.0, "operational point: lambda_d must be > 0");
  require(lambda_a > 0.0, "operational point: lambda_a must be > 0");
  require(r_d_max > 0.0, "operational point: r_d_max must be > 0");
  require(theta_0 > 0.0, "operational point: theta_0 must be > 0");
  require(alpha > 2.0, "operational point: alpha must be > 2");
}

double OperationalPoint::load_ratio(double p) const {
  return (lambda_c + (1.0 - p) * lambda_d) / lambda_a;
}

Deployment Deployment::overlay(double eta_c) {
  require(eta_c > 0.0 && eta_c <= 1.0, "overlay: eta_c must be in (0,1]");
  Deployment d;
  d.kind = DeploymentKind::Overlay;
  d.eta_c = eta_c;
  return d;
}

Deployment Deployment::underlay(double p_a) {
  require(p_a > 0.0, "underlay: P_a must be > 0");
  Deployment d;
  d.kind = DeploymentKind::Underlay;
  d.eta_c = 1.0;
  d.p_a = p_a;
  return d;
}

ModeSelection ModeSelection::probabilistic(double p) {
  require(p >= 0.0 && p <= 1.0, "mode selection: p must be in [0,1]");
  return ModeSelection{SelectionKind::Probabilistic, p};
}

ModeSelection ModeSelection::distance_based(double r_th, double r_max) {
  require(r_max > 0.0, "mode selection: r_max must be > 0");
  require(r_th >= 0.0 && r_th <= r_max,
          "mode selection: r_th must be in [0, r_max]");
  const double ratio = r_th / r_max;
  return ModeSelection{SelectionKind::DistanceBased, ratio * ratio};
}

double ModeSelection::threshold_distance(double r_max) const {
  return std::sqrt(retention) * r_max;
}

void DesignParams::validate() const {
  require(p() >= 0.0 && p() <= 1.0, "design: p must be in [0,1]");
  require(q >= 0.0 && q <= 1.0, "design: q must be in [0,1]");
  if (deployment.kind == DeploymentKind::Underlay) {
    require(deployment.p_a > 0.0, "design: underlay needs P_a > 0");
    require(deployment.eta_c == 1.0, "design: underlay fixes eta_c = 1");
  } else {
    require(deployment.eta_c > 0.0 && deployment.eta_c <= 1.0,
            "design: overlay eta_c must be in (0,1]");
  }
}

std::string to_string(SchemeId id) {
  switch (id) {
    case SchemeId::S1: return "1";
    case SchemeId::S2: return "2";
    case SchemeId::S3p: return "3-p";
    case SchemeId::S3d: return "3-d";
    case SchemeId::S4p: return "4-p";
    case SchemeId::S4d: return "4-d";
  }
  return "?";
}

std::string to_string(DeploymentKind kind) {
  return kind == DeploymentKind::Overlay ? "overlay" : "underlay";
}

SchemeId scheme_from_string(const std::string& s) {
  if (s == "1") return SchemeId::S1;
  if (s == "2") return SchemeId::S2;
  if (s == "3-p" || s == "3p") return SchemeId::S3p;
  if (s == "3-d" || s == "3d") return SchemeId::S3d;
  if (s == "4-p" || s == "4p") return SchemeId::S4p;
  if (s == "4-d" || s == "4d") return SchemeId::S4d;
  throw std::invalid_argument("unknown scheme \"" + s + "\"");
}

DeploymentKind deployment_from_string(const std::string& s) {
  if (s == "overlay") return DeploymentKind::Overlay;
  if (s == "underlay") return DeploymentKind::Underlay;
  throw std::invalid_argument("unknown deployment \"" + s + "\"");
}

SelectionKind scheme_selection(SchemeId id) {
  switch (id) {
    case SchemeId::S3d:
    case SchemeId::S4d:
      return SelectionKind::DistanceBased;
    default:
      return SelectionKind::Probabilistic;
  }
}

double sir_ccdf_cellular(const OperationalPoint& op, const DesignParams& dp,
                         double theta, double pk0) {
  op.validate();
  dp.validate();
  require(pk0 >= 0.0 && pk0 <= 1.0, "sir_ccdf_cellular: pk0 must be in [0,1]");
  if (!(theta > 0.0)) return 1.0;

  double denom = 1.0 + pk0 * rho(theta, op.alpha);
  if (!dp.deployment.overlay_kind()) {
    const double p = dp.p();
    const double interference =
        dp.q * std::pow(p, dp.selection.gamma()) * kappa(op.alpha) *
        op.lambda_d * op.r_d_max * op.r_d_max *
        std::pow(theta / dp.deployment.p_a, 2.0 / op.alpha) /
        (2.0 * op.lambda_a);
    denom += interference;
  }
  return 1.0 / denom;
}

double sir_ccdf_d2d(const OperationalPoint& op, const DesignParams& dp,
                    double theta, double pk0) {
  op.validate();
  dp.validate();
  require(pk0 >= 0.0 && pk0 <= 1.0, "sir_ccdf_d2d: pk0 must be in [0,1]");
  if (!(theta > 0.0)) return 1.0;

  const double p = dp.p();
  double mass = 0.5 * dp.q * std::pow(p, dp.selection.gamma()) * op.lambda_d *
                op.r_d_max * op.r_d_max;
  if (!dp.deployment.overlay_kind()) {
    mass += op.lambda_a * pk0 * std::pow(dp.deployment.p_a, 2.0 / op.alpha);
  }
  const double exponent = kappa(op.alpha) * std::numbers::pi *
                          std::pow(theta, 2.0 / op.alpha) * mass;
  return std::exp(-exponent);
}

double tdma_factor(const OperationalPoint& op, double p, double pk0) {
  op.validate();
  const double cellular_load = op.lambda_c + (1.0 - p) * op.lambda_d;
  require(cellular_load > 0.0, "tdma_factor: zero cellular load");
  return op.lambda_a * pk0 / cellular_load;
}

double rate_cellular(const OperationalPoint& op, const DesignParams& dp,
                     double pk0) {
  return dp.deployment.eta_c * tdma_factor(op, dp.p(), pk0) *
         sir_ccdf_cellular(op, dp, op.theta_0, pk0) * log2_1p(op.theta_0);
}

double rate_d2d(const OperationalPoint& op, const DesignParams& dp,
                double pk0) {
  const double bandwidth = dp.deployment.overlay_kind()
                               ? 1.0 - dp.deployment.eta_c
                               : 1.0;
  return bandwidth * dp.q * sir_ccdf_d2d(op, dp, op.theta_0, pk0) *
         log2_1p(op.theta_0);
}

double rate_average(const OperationalPoint& op, const DesignParams& dp,
                    double pk0) {
  const double p = dp.p();
  const double rc = rate_cellular(op, dp, pk0);
  const double rd = p > 0.0 ? rate_d2d(op, dp, pk0) : 0.0;
  return (op.lambda_c * rc + op.lambda_d * (p * rd + (1.0 - p) * rc)) /
         (op.lambda_c + op.lambda_d);
}

double rate_no_d2d(const OperationalPoint& op, double pk0) {
  op.validate();
  return op.lambda_a * pk0 * log2_1p(op.theta_0) /
         ((op.lambda_c + op.lambda_d) *
          (1.0 + pk0 * rho(op.theta_0, op.alpha)));
}

double constraint1_power(const OperationalPoint& op, double p, double q,
                         int gamma, double pk0) {
  op.validate();
  require(p >= 0.0 && p <= 1.0 && q >= 0.0 && q <= 1.0,
          "constraint1_power: p, q must be in [0,1]");
  require(gamma == 1 || gamma == 2, "constraint1_power: gamma must be 1 or 2");
  const double base = (op.lambda_c + (1.0 - p) * op.lambda_d) *
                      kappa(op.alpha) * op.r_d_max * op.r_d_max * q *
                      std::pow(p, gamma - 1) /
                      (2.0 * op.lambda_a *
                       (1.0 + pk0 * rho(op.theta_0, op.alpha)));
  return op.theta_0 * std::pow(base, op.alpha / 2.0);
}

double constraint1_bandwidth(const OperationalPoint& op, double p) {
  op.validate();
  require(p >= 0.0 && p <= 1.0, "constraint1_bandwidth: p must be in [0,1]");
  return 1.0 - p * op.lambda_d / (op.lambda_c + op.lambda_d);
}

DesignParams make_design(const OperationalPoint& op, ModeSelection sel,
                         double q, DeploymentKind kind, double pk0) {
  DesignParams dp;
  dp.selection = sel;
  dp.q = q;
  if (kind == DeploymentKind::Overlay) {
    dp.deployment = Deployment::overlay(constraint1_bandwidth(op, sel.retention));
  } else {
    const double p_a =
        constraint1_power(op, sel.retention, q, sel.gamma(), pk0);
    // q = 0 or p = 0 with gamma = 2 yields P_a = 0: no direct interference to
    // balance.  Keep a positive placeholder so the design stays valid.
    dp.deployment = Deployment::underlay(p_a > 0.0 ? p_a : 1.0);
  }
  dp.validate();
  return dp;
}

}  // namespace d2d
