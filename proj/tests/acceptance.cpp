// Acceptance suite: end-to-end checks of the analytic engine against its
// independent oracles (grid search, finite differences, Monte Carlo).
// Prints one PASS/FAIL line per criterion and exits nonzero on any failure.

#include "d2d/mcsim.hpp"
#include "d2d/model.hpp"
#include "d2d/numerics.hpp"
#include "d2d/regions.hpp"
#include "support.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace d2d;
using testsupport::fd_derivative;
using testsupport::grid_search;
using testsupport::lattice;
using testsupport::sample_tuples;
using testsupport::scheme_gamma;

namespace {

constexpr auto kOv = DeploymentKind::Overlay;
constexpr auto kUn = DeploymentKind::Underlay;
constexpr std::uint64_t kSweepSeed = 20250811;
constexpr std::uint64_t kMcSeed = 424242;
constexpr long kMcRealizations = 20000;

int g_failures = 0;

void report(int criterion, const std::string& name, bool pass,
            const std::string& detail) {
  std::printf("%s  criterion %2d: %s (%s)\n", pass ? "PASS" : "FAIL",
              criterion, name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

OperationalPoint reference_point(double rmax_norm, double ld_ratio = 10.0) {
  OperationalPoint op;
  op.lambda_a = 1.0;
  op.lambda_c = 10.0;
  op.lambda_d = ld_ratio;
  op.r_d_max = rmax_norm / 2.0;
  op.theta_0 = db_to_linear(-6.0);
  op.alpha = 4.0;
  return op;
}

SimConfig mc_config(const OperationalPoint& op, const DesignParams& dp) {
  SimConfig cfg;
  cfg.op = op;
  cfg.dp = dp;
  cfg.realizations = kMcRealizations;
  cfg.mean_ap_count = 30.0;
  cfg.guard_factor = 2.0;
  cfg.seed = kMcSeed;
  return cfg;
}

const std::vector<SchemeId> kAllSchemes = {SchemeId::S1,  SchemeId::S2,
                                           SchemeId::S3p, SchemeId::S3d,
                                           SchemeId::S4p, SchemeId::S4d};
const std::vector<SchemeId> kMcSchemes = {SchemeId::S1, SchemeId::S2,
                                          SchemeId::S3p, SchemeId::S3d};

// 1. Gain anchors at vanishing direct-link distance.
void criterion_1() {
  const OperationalPoint op = reference_point(1e-3);
  const HeavyLoadCoefficients c = coefficients(op);
  const double g_ov = optimize_scheme(c, SchemeId::S1, kOv).gain;
  const double g_un = optimize_scheme(c, SchemeId::S1, kUn).gain;
  const double err_ov = std::abs(g_ov / 6.67 - 1.0);
  const double err_un = std::abs(g_un / 12.82 - 1.0);
  std::ostringstream d;
  d << "overlay " << g_ov << " vs 6.67, underlay " << g_un << " vs 12.82";
  report(1, "zero-distance gain anchors within 0.5%",
         err_ov <= 0.005 && err_un <= 0.005, d.str());
}

// 2. Optimal-parameter analytic gains vs Monte Carlo.
void criterion_2() {
  const auto t0 = std::chrono::steady_clock::now();
  struct Row {
    double rmax_norm;
    SchemeId scheme;
    DeploymentKind kind;
    double analytic;
  };
  std::vector<Row> rows;
  std::vector<GainTask> tasks;
  for (double rmax_norm : {0.4, 0.8, 1.2}) {
    const OperationalPoint op = reference_point(rmax_norm);
    const HeavyLoadCoefficients c = coefficients(op);
    for (DeploymentKind kind : {kOv, kUn}) {
      for (SchemeId s : kMcSchemes) {
        const SchemeResult r = optimize_scheme(c, s, kind);
        rows.push_back({rmax_norm, s, kind, r.gain});
        GainTask task;
        task.r_d_max = op.r_d_max;
        task.scheme = s;
        const ModeSelection sel =
            scheme_selection(s) == SelectionKind::DistanceBased
                ? ModeSelection::distance_based(
                      std::sqrt(r.p_star) * op.r_d_max, op.r_d_max)
                : ModeSelection::probabilistic(r.p_star);
        task.dp = make_design(op, sel, r.q_star, kind, 1.0);
        tasks.push_back(task);
      }
    }
  }
  const SimConfig cfg = mc_config(reference_point(0.4), tasks.front().dp);
  const std::vector<McEstimate> mc = estimate_gain_batch(cfg, tasks);

  bool pass = true;
  double worst_overlay = 0.0, worst_underlay = -1e300;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double ga = rows[i].analytic;
    const double gm = mc[i].value;
    const double se = mc[i].std_error;
    if (rows[i].kind == kOv) {
      const double tol = std::max(3.0 * se, 0.03 * gm);
      const double err = std::abs(ga - gm);
      worst_overlay = std::max(worst_overlay, err / tol);
      if (err > tol) pass = false;
    } else {
      // analytics may only underestimate underlay performance
      const double slack = ga - (gm + 3.0 * se);
      worst_underlay = std::max(worst_underlay, slack);
      if (slack > 0.0) pass = false;
    }
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  std::ostringstream d;
  d << rows.size() << " scheme points, worst overlay err/tol " << worst_overlay
    << ", worst underlay overshoot " << worst_underlay << ", " << secs << " s";
  report(2, "Monte Carlo vs analytic optimized gains", pass, d.str());
}

// 3. Exactness of the TDMA slot-share expression.
void criterion_3() {
  bool pass = true;
  std::ostringstream d;
  for (double load : {1.0, 5.0, 10.0}) {
    OperationalPoint op = reference_point(0.8, 5.0);
    op.lambda_c = load;  // p = 1 leaves exactly this cellular load
    DesignParams dp;
    dp.selection = ModeSelection::probabilistic(1.0);
    dp.q = 1.0;
    dp.deployment = Deployment::overlay(0.5);
    const SimConfig cfg = mc_config(op, dp);
    const McEstimate res = estimate_tdma_residual(cfg);
    const McEstimate occ = estimate_cell_nonempty(cfg);
    const double occ_err = std::abs(occ.value - prob_cell_nonempty(load));
    if (std::abs(res.value) > 3.0 * res.std_error) pass = false;
    if (occ_err > 0.01) pass = false;
    d << "load " << load << ": residual " << res.value << " (3se "
      << 3.0 * res.std_error << "), occupancy err " << occ_err << "; ";
  }
  report(3, "TDMA factor identity with measured occupancy", pass, d.str());
}

// 4. SIR CCDF exactness under full load.
void criterion_4() {
  const OperationalPoint op = reference_point(0.8);
  std::vector<double> thetas;
  for (int i = 0; i < 20; ++i) {
    thetas.push_back(db_to_linear(-15.0 + 30.0 * i / 19.0));
  }
  bool pass = true;
  double worst = 0.0;
  for (DeploymentKind kind : {kOv, kUn}) {
    const double pk0 = prob_cell_nonempty(op.load_ratio(0.6));
    const DesignParams dp =
        make_design(op, ModeSelection::probabilistic(0.6), 0.7, kind, pk0);
    const SimConfig cfg = mc_config(op, dp);
    for (LinkKind link : {LinkKind::Cellular, LinkKind::Direct}) {
      const auto est = estimate_sir_ccdf(cfg, thetas, link);
      for (std::size_t i = 0; i < thetas.size(); ++i) {
        const double analytic =
            link == LinkKind::Cellular
                ? sir_ccdf_cellular(op, dp, thetas[i], pk0)
                : sir_ccdf_d2d(op, dp, thetas[i], pk0);
        const double tol = std::max(3.0 * est[i].std_error, 0.01);
        const double err = std::abs(est[i].value - analytic);
        worst = std::max(worst, err / tol);
        if (err > tol) pass = false;
      }
    }
  }
  std::ostringstream d;
  d << "80 grid comparisons, worst err/tol " << worst;
  report(4, "SIR distributions match on the dB grid", pass, d.str());
}

struct SweepData {
  std::vector<HeavyLoadCoefficients> tuples;
  // per tuple, per combo index
  std::vector<std::vector<SchemeResult>> results;
  std::vector<std::vector<testsupport::GridMax>> grid;
};

int combo_index(SchemeId s, DeploymentKind k) {
  int si = 0;
  for (std::size_t i = 0; i < kAllSchemes.size(); ++i) {
    if (kAllSchemes[i] == s) si = static_cast<int>(i);
  }
  return si * 2 + (k == kUn ? 1 : 0);
}

SweepData run_sweep() {
  SweepData sd;
  sd.tuples = sample_tuples(500, kSweepSeed);
  sd.results.resize(sd.tuples.size());
  sd.grid.resize(sd.tuples.size());
  for (std::size_t i = 0; i < sd.tuples.size(); ++i) {
    sd.results[i].resize(kAllSchemes.size() * 2);
    sd.grid[i].resize(kAllSchemes.size() * 2);
    for (SchemeId s : kAllSchemes) {
      for (DeploymentKind k : {kOv, kUn}) {
        const int idx = combo_index(s, k);
        sd.results[i][idx] = optimize_scheme(sd.tuples[i], s, k);
        sd.grid[i][idx] = grid_search(sd.tuples[i], s, k);
      }
    }
  }
  return sd;
}

// 5. Closed-form membership equals the sign of brute-force max f.
void criterion_5(const SweepData& sd) {
  long checked = 0, skipped = 0, disagreements = 0;
  for (std::size_t i = 0; i < sd.tuples.size(); ++i) {
    for (SchemeId s : kAllSchemes) {
      for (DeploymentKind k : {kOv, kUn}) {
        const int idx = combo_index(s, k);
        const double gmax = sd.grid[i][idx].f;
        const double fstar = sd.results[i][idx].f_star;
        if (std::abs(gmax) <= 1e-6 || std::abs(fstar) <= 1e-6) {
          ++skipped;
          continue;
        }
        ++checked;
        if (sd.results[i][idx].in_region != (gmax > 0.0)) ++disagreements;
      }
    }
  }
  std::ostringstream d;
  d << checked << " checked, " << skipped << " in the boundary band, "
    << disagreements << " disagreements";
  report(5, "region membership equals grid-search sign", disagreements == 0,
         d.str());
}

// 6. Stationarity and grid dominance of interior optima.
void criterion_6(const SweepData& sd) {
  long interior = 0;
  double worst_grad = 0.0, worst_excess = -1e300;
  bool pass = true;
  for (std::size_t i = 0; i < sd.tuples.size(); ++i) {
    const HeavyLoadCoefficients& c = sd.tuples[i];
    for (SchemeId s : kAllSchemes) {
      for (DeploymentKind k : {kOv, kUn}) {
        const int idx = combo_index(s, k);
        const SchemeResult& r = sd.results[i][idx];
        if (!r.p_interior && !r.q_interior) continue;
        ++interior;
        const int gamma = scheme_gamma(s);
        if (r.p_interior) {
          const double g = fd_derivative(
              [&](double p) { return f_objective(c, k, gamma, p, r.q_star); },
              r.p_star);
          worst_grad = std::max(worst_grad, std::abs(g));
          if (std::abs(g) >= 1e-6) pass = false;
        }
        if (r.q_interior) {
          const double g = fd_derivative(
              [&](double q) { return f_objective(c, k, gamma, r.p_star, q); },
              r.q_star);
          worst_grad = std::max(worst_grad, std::abs(g));
          if (std::abs(g) >= 1e-6) pass = false;
        }
        const double excess = sd.grid[i][idx].f - r.f_star;
        worst_excess = std::max(worst_excess, excess);
        if (excess > 1e-9) pass = false;
      }
    }
  }
  std::ostringstream d;
  d << interior << " interior optima, worst |grad| " << worst_grad
    << ", worst grid excess " << worst_excess;
  report(6, "interior optima are stationary and grid-dominant", pass, d.str());
}

// 7. Scheme dominance chains.
void criterion_7(const SweepData& sd) {
  const double slack = 1e-9;
  long violations = 0;
  for (std::size_t i = 0; i < sd.tuples.size(); ++i) {
    const auto f = [&](SchemeId s, DeploymentKind k) {
      return sd.results[i][combo_index(s, k)].f_star;
    };
    const bool overlay_ok = f(SchemeId::S3d, kOv) >= f(SchemeId::S2, kOv) - slack &&
                            f(SchemeId::S2, kOv) >= f(SchemeId::S3p, kOv) - slack &&
                            f(SchemeId::S3p, kOv) >= f(SchemeId::S1, kOv) - slack;
    const bool underlay_ok =
        f(SchemeId::S3d, kUn) >= f(SchemeId::S4p, kUn) - slack &&
        f(SchemeId::S4p, kUn) >=
            std::max(f(SchemeId::S2, kUn), f(SchemeId::S3p, kUn)) - slack &&
        std::max(f(SchemeId::S2, kUn), f(SchemeId::S3p, kUn)) >=
            f(SchemeId::S1, kUn) - slack;
    const bool cross_ok = f(SchemeId::S3d, kUn) >= f(SchemeId::S3d, kOv) - slack;
    if (!(overlay_ok && underlay_ok && cross_ok)) ++violations;
  }
  std::ostringstream d;
  d << sd.tuples.size() << " tuples, " << violations << " violations";
  report(7, "scheme dominance chains", violations == 0, d.str());
}

// 8. No interior point beats the best boundary value for the degenerate
// joint schemes.
void criterion_8(const SweepData& sd) {
  const auto lat = lattice(200);
  long violations = 0;
  double worst = -1e300;
  struct Combo {
    SchemeId scheme;
    DeploymentKind kind;
    SchemeId q_edge;
  };
  const Combo combos[] = {{SchemeId::S4p, kOv, SchemeId::S3p},
                          {SchemeId::S4d, kOv, SchemeId::S3d},
                          {SchemeId::S4d, kUn, SchemeId::S3d}};
  for (const auto& c : sd.tuples) {
    for (const auto& combo : combos) {
      const int gamma = scheme_gamma(combo.scheme);
      double interior = -1e300, boundary = -1e300;
      for (double p : lat) {
        for (double q : lat) {
          const double v = f_objective(c, combo.kind, gamma, p, q);
          double& slot = (p < 1.0 && q < 1.0) ? interior : boundary;
          slot = std::max(slot, v);
        }
      }
      boundary =
          std::max(boundary, optimize_scheme(c, SchemeId::S2, combo.kind).f_star);
      boundary =
          std::max(boundary, optimize_scheme(c, combo.q_edge, combo.kind).f_star);
      const double excess = interior - boundary;
      worst = std::max(worst, excess);
      if (excess > 1e-9) ++violations;
    }
  }
  std::ostringstream d;
  d << sd.tuples.size() * 3 << " searches, worst interior excess " << worst;
  report(8, "joint interior search never beats the boundary", violations == 0,
         d.str());
}

// 9. Inner/outer region bounds sandwich the numeric p* < 1 set.
void criterion_9(const SweepData& sd) {
  long violations = 0;
  for (std::size_t i = 0; i < sd.tuples.size(); ++i) {
    const auto [inner, outer] = region_3d_underlay_bounds(sd.tuples[i]);
    const SchemeResult& r = sd.results[i][combo_index(SchemeId::S3d, kUn)];
    const bool p_lt_1 = r.p_interior && r.p_star < 1.0;
    if (inner && !p_lt_1) ++violations;
    if (p_lt_1 && !outer) ++violations;
  }
  std::ostringstream d;
  d << sd.tuples.size() << " tuples, " << violations << " violations";
  report(9, "region bounds sandwich the numeric optimum", violations == 0,
         d.str());
}

// 10. Resource-sharing closure: designed sharing keeps the cellular rate at
// the no-D2D baseline.
void criterion_10() {
  std::mt19937 rng(1312);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  long checked = 0;
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    OperationalPoint op;
    op.lambda_a = 0.5 + 2.0 * u(rng);
    op.lambda_c = op.lambda_a * (0.1 + 20.0 * u(rng));
    op.lambda_d = op.lambda_a * (0.1 + 20.0 * u(rng));
    op.r_d_max = 0.01 + 1.5 * u(rng);
    op.theta_0 = db_to_linear(-12.0 + 18.0 * u(rng));
    op.alpha = 2.3 + 3.7 * u(rng);
    const double p = 0.05 + 0.95 * u(rng);
    const double q = 0.05 + 0.95 * u(rng);
    const double pk0 = prob_cell_nonempty(op.load_ratio(p));
    const ModeSelection sel =
        i % 2 ? ModeSelection::probabilistic(p)
              : ModeSelection::distance_based(std::sqrt(p) * op.r_d_max,
                                              op.r_d_max);
    for (DeploymentKind kind : {kOv, kUn}) {
      const DesignParams dp = make_design(op, sel, q, kind, pk0);
      const double rc = rate_cellular(op, dp, pk0);
      const double base = rate_no_d2d(op, pk0);
      worst = std::max(worst, std::abs(rc - base) / base);
      ++checked;
    }
  }
  std::ostringstream d;
  d << checked << " designs, worst relative gap " << worst;
  report(10, "resource-sharing closure at 1e-10", worst < 1e-10, d.str());
}

// 11. Small-distance intercept of the baseline overlay region boundary.
void criterion_11() {
  RegionQueryAxes axes;
  axes.x_min = 1e-6;
  axes.x_max = 0.5;
  axes.y_min = 0.70;
  axes.y_max = 0.95;
  axes.alpha = 4.0;
  axes.theta_0 = db_to_linear(-6.0);
  axes.lambda_c_ratio = 10.0;
  const auto pts = trace_boundary(SchemeId::S1, kOv, axes, 2001);
  double min_y = 1e300;
  for (const auto& p : pts) min_y = std::min(min_y, p.y);
  const double theta = axes.theta_0;
  const double target =
      1.0 / (1.0 + std::sqrt(theta) * std::atan(std::sqrt(theta)));
  const double err = std::abs(min_y - target);
  std::ostringstream d;
  d << "traced intercept " << min_y << " vs " << target << ", err " << err;
  report(11, "overlay baseline boundary intercept", !pts.empty() && err < 1e-3,
         d.str());
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  const SweepData sd = run_sweep();
  criterion_5(sd);
  criterion_6(sd);
  criterion_7(sd);
  criterion_8(sd);
  criterion_9(sd);
  criterion_10();
  criterion_11();
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  std::printf("%s: %d failure(s), %.1f s total\n",
              g_failures == 0 ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL",
              g_failures, secs);
  return g_failures == 0 ? 0 : 1;
}
