#pragma once

#include <string>

// Network data model and the general-load closed forms: SIR CCDFs of
// cellular and direct links, the TDMA sharing factor, per-link and average
// user rates, and the resource-sharing parameters that keep cellular
// performance unchanged when the direct mode is switched on.
//
// Conventions: every ratio is linear (dB only at the CLI boundary), the mean
// useful received power of a direct link is normalized to one, and rates are
// normalized per unit of total bandwidth (bits/s/Hz).

namespace d2d {

// Environment tuple the operator cannot tune at runtime.
struct OperationalPoint {
  double lambda_c = 0.0;  // density of cellular-only UEs
  double lambda_d = 0.0;  // density of direct-capable UEs
  double lambda_a = 0.0;  // density of access points
  double r_d_max = 0.0;   // maximum direct link distance
  double theta_0 = 0.0;   // SIR threshold, linear
  double alpha = 0.0;     // path loss exponent, > 2

  void validate() const;  // throws std::invalid_argument on violation
  // Mean number of cellular receivers per cell given retention p.
  double load_ratio(double p) const;
};

enum class DeploymentKind { Overlay, Underlay };

// Overlay splits bandwidth (cellular fraction eta_c in (0,1]); underlay
// shares the whole band and carries the AP transmit power P_a instead.
struct Deployment {
  DeploymentKind kind = DeploymentKind::Overlay;
  double eta_c = 1.0;  // cellular bandwidth fraction; fixed to 1 for underlay
  double p_a = 1.0;    // AP transmit power relative to unit direct-link power

  static Deployment overlay(double eta_c);
  static Deployment underlay(double p_a);
  bool overlay_kind() const { return kind == DeploymentKind::Overlay; }
};

enum class SelectionKind { Probabilistic, DistanceBased };

// Both selection rules thin the direct-capable process with retention p:
// a biased coin for the probabilistic rule, (r_th/r_max)^2 for the
// distance rule.  gamma = 1, 2 respectively is the exponent through which p
// enters the interference statistics.
struct ModeSelection {
  SelectionKind kind = SelectionKind::Probabilistic;
  double retention = 1.0;  // p in [0,1]; 0 degenerates to a no-D2D network

  static ModeSelection probabilistic(double p);
  static ModeSelection distance_based(double r_th, double r_max);
  int gamma() const { return kind == SelectionKind::Probabilistic ? 1 : 2; }
  double threshold_distance(double r_max) const;  // sqrt(p) * r_max
};

struct DesignParams {
  ModeSelection selection;
  double q = 1.0;  // per-slot transmit probability of an established link
  Deployment deployment;

  double p() const { return selection.retention; }
  void validate() const;
};

enum class SchemeId { S1, S2, S3p, S3d, S4p, S4d };

std::string to_string(SchemeId id);
std::string to_string(DeploymentKind kind);
SchemeId scheme_from_string(const std::string& s);
DeploymentKind deployment_from_string(const std::string& s);
SelectionKind scheme_selection(SchemeId id);  // selection rule a scheme uses

// P(SIR >= theta) of the typical UE on a cellular link.  pk0 is the cell
// occupancy probability supplied by the caller (prob_cell_nonempty output in
// general, 1 under full load); keeping it an explicit argument prevents
// silently mixing load regimes.
double sir_ccdf_cellular(const OperationalPoint& op, const DesignParams& dp,
                         double theta, double pk0);

// P(SIR >= theta) of the typical UE on a direct link.
double sir_ccdf_d2d(const OperationalPoint& op, const DesignParams& dp,
                    double theta, double pk0);

// E[1/(K0+1)]: expected slot share of the typical cellular UE under
// round-robin TDMA, exact for the Poisson cell model.
double tdma_factor(const OperationalPoint& op, double p, double pk0);

// Average normalized rate of the typical UE in cellular mode (decorrelation
// form: the slot share and the SIR indicator are averaged independently).
double rate_cellular(const OperationalPoint& op, const DesignParams& dp,
                     double pk0);

// Average normalized rate of the typical UE in direct mode.
double rate_d2d(const OperationalPoint& op, const DesignParams& dp,
                double pk0);

// Average normalized rate of the typical UE without a-priori knowledge of
// its type.
double rate_average(const OperationalPoint& op, const DesignParams& dp,
                    double pk0);

// Rate of the conventional network (no direct mode at all).
double rate_no_d2d(const OperationalPoint& op, double pk0);

// AP power that keeps underlay cellular rate equal to the no-D2D rate.
// Scales as O(r_d_max^alpha).
double constraint1_power(const OperationalPoint& op, double p, double q,
                         int gamma, double pk0);

// Cellular bandwidth fraction that does the same for overlay deployments.
double constraint1_bandwidth(const OperationalPoint& op, double p);

// DesignParams with the resource-sharing member filled in per the
// constraint above.
DesignParams make_design(const OperationalPoint& op, ModeSelection sel,
                         double q, DeploymentKind kind, double pk0);

}  // namespace d2d
