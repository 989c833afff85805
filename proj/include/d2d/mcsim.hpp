#pragma once

#include "d2d/model.hpp"

#include <cstdint>
#include <vector>

// Monte Carlo ground truth for the analytic model: samples the Poisson
// network, measures SIR CCDFs, the TDMA factor E[1/(K0+1)], cell occupancy
// and the exact (indicator-product) average user rate.
//
// Determinism: every realization draws from its own substream indexed by
// realization number, and per-realization samples are reduced in index
// order, so results are identical for any thread count and any partition of
// the work.

namespace d2d {

enum class LinkKind { Cellular, Direct };

struct SimConfig {
  OperationalPoint op;
  DesignParams dp;
  SchemeId scheme = SchemeId::S1;  // metadata echoed into outputs
  long realizations = 20000;
  double mean_ap_count = 30.0;  // mean APs in the inner window
  double guard_factor = 2.0;    // interferers drawn out to guard * window radius
  std::uint64_t seed = 1;
  int threads = 0;  // 0 = hardware concurrency

  void validate() const;
  double window_radius() const;  // sqrt(mean_ap_count / (pi lambda_a))
};

struct McEstimate {
  double value = 0.0;
  double std_error = 0.0;
  long n = 0;
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

// One sampled world.  The typical UE is conditioned at the origin; point
// counts are Poisson over the guard disk, sources are displaced uniformly
// in a disk of radius r_d_max around their UE, and fading is unit-mean
// exponential per link.
struct NetworkRealization {
  std::vector<Vec2> ap_positions;
  std::vector<Vec2> cue_positions;
  std::vector<Vec2> due_positions;
  std::vector<Vec2> due_source_offsets;
  std::vector<std::uint8_t> mode_marks;      // 1 = direct mode selected
  std::vector<std::uint8_t> activity_marks;  // 1 = transmits this slot
  // Unit-mean exponential gains for the links each estimator consumes:
  // AP->origin and source->origin, one block per experiment.
  std::vector<double> fading_ap_cellular;
  std::vector<double> fading_src_cellular;
  std::vector<double> fading_ap_direct;
  std::vector<double> fading_src_direct;
  double typical_direct_fading = 1.0;
  double typical_distance_u = 0.0;  // uniform driving the typical link distance
};

NetworkRealization sample_realization(const SimConfig& cfg,
                                      std::uint64_t index);

// Empirical P(SIR >= theta) of the typical link on each grid point.
// Realizations with no interferer count as success at every theta.
std::vector<McEstimate> estimate_sir_ccdf(const SimConfig& cfg,
                                          const std::vector<double>& thetas,
                                          LinkKind kind);

// Empirical E[1/(K0+1)], K0 = cellular receivers sharing the typical UE's
// serving AP.
McEstimate estimate_tdma_factor(const SimConfig& cfg);

// Empirical P(K>0) over inner-window cells (the size-biased origin cell is
// excluded).
McEstimate estimate_cell_nonempty(const SimConfig& cfg);

// Paired residual 1/(K0+1) - lambda_a * occupancy / (lambda_c + (1-p)lambda_d)
// per realization; its mean is zero exactly if the TDMA factor identity
// holds, regardless of how accurate the occupancy closed form is.
McEstimate estimate_tdma_residual(const SimConfig& cfg);

// Exact-expectation average user rate: the slot share, the SIR indicator
// and the mode mixture are combined within each realization, retaining the
// correlation the analytic rate expression drops.
McEstimate estimate_rate(const SimConfig& cfg);

// estimate_rate divided by a paired no-D2D baseline evaluated on the same
// realizations (common random numbers); standard error by the delta method.
McEstimate estimate_gain(const SimConfig& cfg);

// Many design points evaluated against one shared baseline in a single pass
// over the realizations.  Tasks may differ in r_d_max, mode parameters,
// selection rule and deployment; geometry is shared, so estimates are
// maximally correlated across tasks.
struct GainTask {
  double r_d_max = 0.0;
  DesignParams dp;
  SchemeId scheme = SchemeId::S1;
};

std::vector<McEstimate> estimate_gain_batch(const SimConfig& base,
                                            const std::vector<GainTask>& tasks);

// Truncation check: the same realizations evaluated with interference
// drawn to guard_factor (restricted) and 2 * guard_factor (full).
// `base` is the restricted estimate; `shift` the paired full-minus-restricted
// difference, i.e. the bias attributable to the guard zone.
struct GuardSensitivity {
  McEstimate base;
  McEstimate shift;
};

GuardSensitivity guard_sensitivity(const SimConfig& cfg, LinkKind kind,
                                   double theta);

}  // namespace d2d
