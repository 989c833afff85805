// d2dregion: batch front-end for the direct-mode network toolkit.
// Computes rates, optimal mode parameters and operational regions, traces
// region boundaries and gain level sets, and validates the closed forms
// against the Monte Carlo simulator.  Emits CSV or JSON.

#include "CLI11.hpp"
#include "json.hpp"

#include "d2d/mcsim.hpp"
#include "d2d/model.hpp"
#include "d2d/numerics.hpp"
#include "d2d/regions.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

constexpr int kExitOk = 0;
constexpr int kExitInvalidInput = 2;
constexpr int kExitNumericalFailure = 3;

struct Table {
  std::vector<std::string> columns;
  std::vector<json> rows;  // each row is a json array matching columns
  std::vector<std::string> notes;
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string csv_cell(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_float()) return fmt(v.get<double>());
  if (v.is_boolean()) return v.get<bool>() ? "1" : "0";
  return v.dump();
}

void write_output(const json& spec, const Table& table) {
  const std::string format = spec.value("format", "csv");
  const std::string path = spec.value("output", "-");
  std::ostringstream out;
  if (format == "json") {
    json doc;
    doc["tool"] = "d2dregion";
    doc["version"] = kVersion;
    doc["spec"] = spec;
    doc["columns"] = table.columns;
    doc["notes"] = table.notes;
    doc["results"] = table.rows;
    out << doc.dump(2) << "\n";
  } else {
    out << "# tool=d2dregion version=" << kVersion << "\n";
    out << "# spec=" << spec.dump() << "\n";
    for (const auto& n : table.notes) out << "# note=" << n << "\n";
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
      out << (i ? "," : "") << table.columns[i];
    }
    out << "\n";
    for (const auto& row : table.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        out << (i ? "," : "") << csv_cell(row[i]);
      }
      out << "\n";
    }
  }
  if (path == "-" || path.empty()) {
    std::cout << out.str();
  } else {
    std::ofstream f(path);
    if (!f) throw std::invalid_argument("cannot open output file " + path);
    f << out.str();
  }
}

d2d::OperationalPoint point_from_spec(const json& spec) {
  const json& pt = spec.at("point");
  d2d::OperationalPoint op;
  op.lambda_a = pt.value("lambda_a", 1.0);
  op.lambda_c = pt.value("lambda_c_ratio", 10.0) * op.lambda_a;
  op.lambda_d = pt.value("lambda_d_ratio", 10.0) * op.lambda_a;
  // normalized distance r_d_max * 2 sqrt(lambda_a)
  const double rmax_norm = pt.value("rmax_norm", 0.8);
  op.r_d_max = rmax_norm / (2.0 * std::sqrt(op.lambda_a));
  op.theta_0 = pt.contains("theta0_linear")
                   ? pt["theta0_linear"].get<double>()
                   : d2d::db_to_linear(pt.value("theta0_db", -6.0));
  op.alpha = pt.value("alpha", 4.0);
  op.validate();
  return op;
}

std::vector<d2d::SchemeId> schemes_from_spec(const json& spec) {
  std::vector<d2d::SchemeId> all = {d2d::SchemeId::S1,  d2d::SchemeId::S2,
                                    d2d::SchemeId::S3p, d2d::SchemeId::S3d,
                                    d2d::SchemeId::S4p, d2d::SchemeId::S4d};
  if (!spec.contains("schemes") || spec["schemes"].empty()) return all;
  std::vector<d2d::SchemeId> out;
  for (const auto& s : spec["schemes"]) {
    if (s.get<std::string>() == "all") return all;
    out.push_back(d2d::scheme_from_string(s.get<std::string>()));
  }
  return out;
}

std::vector<d2d::DeploymentKind> deployments_from_spec(const json& spec) {
  const std::string d = spec.value("deployment", "both");
  if (d == "overlay") return {d2d::DeploymentKind::Overlay};
  if (d == "underlay") return {d2d::DeploymentKind::Underlay};
  if (d == "both") {
    return {d2d::DeploymentKind::Overlay, d2d::DeploymentKind::Underlay};
  }
  throw std::invalid_argument("unknown deployment \"" + d + "\"");
}

d2d::SelectionKind selection_from_spec(const json& spec) {
  const std::string s = spec.value("selection", "prob");
  if (s == "prob") return d2d::SelectionKind::Probabilistic;
  if (s == "dist") return d2d::SelectionKind::DistanceBased;
  throw std::invalid_argument("unknown selection \"" + s + "\"");
}

d2d::ModeSelection make_selection(d2d::SelectionKind kind, double p,
                                  double r_d_max) {
  return kind == d2d::SelectionKind::Probabilistic
             ? d2d::ModeSelection::probabilistic(p)
             : d2d::ModeSelection::distance_based(std::sqrt(p) * r_d_max,
                                                  r_d_max);
}

d2d::SimConfig sim_config_from_spec(const json& spec,
                                    const d2d::OperationalPoint& op,
                                    const d2d::DesignParams& dp) {
  d2d::SimConfig cfg;
  cfg.op = op;
  cfg.dp = dp;
  const json mc = spec.value("mc", json::object());
  cfg.realizations = mc.value("realizations", 20000L);
  if (mc.value("full", false)) cfg.realizations = 100000;
  cfg.mean_ap_count = mc.value("mean_aps", 30.0);
  cfg.guard_factor = mc.value("guard_factor", 2.0);
  cfg.seed = mc.value("seed", 1ULL);
  cfg.threads = mc.value("threads", 0);
  return cfg;
}

d2d::RegionQueryAxes axes_from_spec(const json& spec,
                                    const d2d::OperationalPoint& op) {
  const json ax = spec.value("axes", json::object());
  d2d::RegionQueryAxes axes;
  axes.x_min = ax.value("x_min", 1e-3);
  axes.x_max = ax.value("x_max", 10.0);
  axes.y_min = ax.value("y_min", 1e-2);
  axes.y_max = ax.value("y_max", 50.0);
  axes.alpha = op.alpha;
  axes.theta_0 = op.theta_0;
  axes.lambda_c_ratio = op.lambda_c / op.lambda_a;
  axes.validate();
  return axes;
}

// Design with resource sharing resolved, honoring explicit overrides.
d2d::DesignParams design_from_spec(const json& spec,
                                   const d2d::OperationalPoint& op,
                                   d2d::DeploymentKind kind, double pk0) {
  const double p = spec.value("p", 1.0);
  const double q = spec.value("q", 1.0);
  const d2d::ModeSelection sel =
      make_selection(selection_from_spec(spec), p, op.r_d_max);
  if (kind == d2d::DeploymentKind::Overlay && spec.contains("eta_c")) {
    d2d::DesignParams dp;
    dp.selection = sel;
    dp.q = q;
    dp.deployment = d2d::Deployment::overlay(spec["eta_c"].get<double>());
    return dp;
  }
  if (kind == d2d::DeploymentKind::Underlay && spec.contains("p_a")) {
    d2d::DesignParams dp;
    dp.selection = sel;
    dp.q = q;
    dp.deployment = d2d::Deployment::underlay(spec["p_a"].get<double>());
    return dp;
  }
  return d2d::make_design(op, sel, q, kind, pk0);
}

std::string classification(const d2d::SchemeResult& r) {
  if (r.on_boundary) return "boundary";
  return r.in_region ? "inside" : "outside";
}

// --- commands -------------------------------------------------------------

Table cmd_rate(const json& spec) {
  const d2d::OperationalPoint op = point_from_spec(spec);
  Table t;
  t.columns = {"deployment", "p",     "q",        "eta_c",
               "p_a",        "pk0",   "rate_cell", "rate_d2d",
               "rate_avg",   "rate_no_d2d", "gain"};
  for (d2d::DeploymentKind kind : deployments_from_spec(spec)) {
    const double p = spec.value("p", 1.0);
    const double pk0 = spec.value("full_load", false)
                           ? 1.0
                           : d2d::prob_cell_nonempty(op.load_ratio(p));
    const d2d::DesignParams dp = design_from_spec(spec, op, kind, pk0);
    const double rc = d2d::rate_cellular(op, dp, pk0);
    const double rd = dp.p() > 0.0 ? d2d::rate_d2d(op, dp, pk0) : 0.0;
    const double avg = d2d::rate_average(op, dp, pk0);
    const double base = d2d::rate_no_d2d(op, pk0);
    t.rows.push_back(json::array({d2d::to_string(kind), dp.p(), dp.q,
                                  dp.deployment.eta_c, dp.deployment.p_a, pk0,
                                  rc, rd, avg, base, avg / base}));
  }
  return t;
}

Table cmd_optimize(const json& spec) {
  const d2d::OperationalPoint op = point_from_spec(spec);
  const d2d::HeavyLoadCoefficients c = d2d::coefficients(op);
  const double rmax_norm = 2.0 * std::sqrt(op.lambda_a) * op.r_d_max;
  Table t;
  t.columns = {"scheme",    "deployment", "p_star",    "q_star",
               "r_th_norm", "f_star",     "gain",      "in_region",
               "verdict",   "effective_scheme"};
  for (d2d::DeploymentKind kind : deployments_from_spec(spec)) {
    for (d2d::SchemeId s : schemes_from_spec(spec)) {
      const d2d::SchemeResult r = d2d::optimize_scheme(c, s, kind);
      const bool dist =
          d2d::scheme_selection(s) == d2d::SelectionKind::DistanceBased;
      json rth = dist ? json(std::sqrt(r.p_star) * rmax_norm) : json("");
      t.rows.push_back(json::array(
          {d2d::to_string(s), d2d::to_string(kind), r.p_star, r.q_star,
           rth, r.f_star, r.gain, r.in_region, classification(r),
           d2d::to_string(r.effective_scheme)}));
    }
  }
  return t;
}

Table cmd_region(const json& spec) {
  const d2d::OperationalPoint op = point_from_spec(spec);
  const d2d::HeavyLoadCoefficients c = d2d::coefficients(op);
  Table t;
  t.columns = {"scheme", "deployment", "in_region", "f_star", "verdict"};
  t.notes.push_back("coefficients c1=" + fmt(c.c1) + " c2=" + fmt(c.c2) +
                    " c1_bar=" + fmt(c.c1_bar) + " c2_bar=" + fmt(c.c2_bar) +
                    " c3_bar=" + fmt(c.c3_bar));
  for (d2d::DeploymentKind kind : deployments_from_spec(spec)) {
    for (d2d::SchemeId s : schemes_from_spec(spec)) {
      const d2d::SchemeResult r = d2d::optimize_scheme(c, s, kind);
      t.rows.push_back(json::array({d2d::to_string(s), d2d::to_string(kind),
                                    r.in_region, r.f_star, classification(r)}));
    }
  }
  return t;
}

d2d::SchemeId single_scheme(const json& spec) {
  if (!spec.contains("schemes") || spec["schemes"].size() != 1 ||
      spec["schemes"][0] == "all") {
    throw std::invalid_argument("this command needs exactly one --scheme");
  }
  return d2d::scheme_from_string(spec["schemes"][0].get<std::string>());
}

d2d::DeploymentKind single_deployment(const json& spec) {
  const auto kinds = deployments_from_spec(spec);
  if (kinds.size() != 1) {
    throw std::invalid_argument(
        "this command needs --deployment overlay or underlay");
  }
  return kinds.front();
}

void annotate_empty_scan(Table& t, const d2d::RegionQueryAxes& axes,
                         d2d::SchemeId scheme, d2d::DeploymentKind kind) {
  if (!t.rows.empty()) return;
  const double xc = 0.5 * (axes.x_min + axes.x_max);
  const double yc = 0.5 * (axes.y_min + axes.y_max);
  const bool inside = d2d::region_membership(
      d2d::coefficients_from_axes(xc, yc, axes), scheme, kind);
  t.notes.push_back(inside ? "entire window inside region"
                           : "entire window outside region");
}

Table cmd_boundary(const json& spec) {
  const d2d::OperationalPoint op = point_from_spec(spec);
  const d2d::RegionQueryAxes axes = axes_from_spec(spec, op);
  const d2d::SchemeId scheme = single_scheme(spec);
  const d2d::DeploymentKind kind = single_deployment(spec);
  const int resolution = spec.value("resolution", 200);
  Table t;
  t.columns = {"x_mean_proximal_sources", "y_due_per_cell"};
  for (const auto& p : d2d::trace_boundary(scheme, kind, axes, resolution)) {
    t.rows.push_back(json::array({p.x, p.y}));
  }
  annotate_empty_scan(t, axes, scheme, kind);
  return t;
}

Table cmd_levelset(const json& spec) {
  const d2d::OperationalPoint op = point_from_spec(spec);
  const d2d::RegionQueryAxes axes = axes_from_spec(spec, op);
  const d2d::SchemeId scheme = single_scheme(spec);
  const d2d::DeploymentKind kind = single_deployment(spec);
  const int resolution = spec.value("resolution", 200);
  const double gain = spec.value("gain", 1.5);
  Table t;
  t.columns = {"x_mean_proximal_sources", "y_due_per_cell"};
  for (const auto& p :
       d2d::gain_level_set(scheme, kind, axes, gain, resolution)) {
    t.rows.push_back(json::array({p.x, p.y}));
  }
  if (t.rows.empty()) {
    t.notes.push_back("gain target not reached anywhere in window");
  }
  return t;
}

Table cmd_mc_validate(const json& spec) {
  const d2d::OperationalPoint op = point_from_spec(spec);
  Table t;
  t.columns = {"quantity", "deployment", "theta_db",
               "mc",       "mc_stderr",  "analytic", "z"};
  auto push = [&t](const std::string& what, const std::string& dep,
                   const json& theta_db, const d2d::McEstimate& e,
                   double analytic) {
    const double z =
        e.std_error > 0 ? (e.value - analytic) / e.std_error : 0.0;
    t.rows.push_back(
        json::array({what, dep, theta_db, e.value, e.std_error, analytic, z}));
  };

  for (d2d::DeploymentKind kind : deployments_from_spec(spec)) {
    const double p = spec.value("p", 1.0);
    const double pk0 = d2d::prob_cell_nonempty(op.load_ratio(p));
    const d2d::DesignParams dp = design_from_spec(spec, op, kind, pk0);
    const d2d::SimConfig cfg = sim_config_from_spec(spec, op, dp);
    const std::string dep = d2d::to_string(kind);

    push("cell_nonempty", dep, "", d2d::estimate_cell_nonempty(cfg), pk0);
    push("tdma_factor", dep, "", d2d::estimate_tdma_factor(cfg),
         d2d::tdma_factor(op, dp.p(), pk0));
    push("tdma_residual", dep, "", d2d::estimate_tdma_residual(cfg), 0.0);
    push("rate_avg", dep, "", d2d::estimate_rate(cfg),
         d2d::rate_average(op, dp, pk0));

    std::vector<double> thetas_db;
    for (int i = 0; i <= 10; ++i) thetas_db.push_back(-12.0 + 24.0 * i / 10);
    std::vector<double> thetas;
    for (double db : thetas_db) thetas.push_back(d2d::db_to_linear(db));
    const auto cell = d2d::estimate_sir_ccdf(cfg, thetas, d2d::LinkKind::Cellular);
    const auto dir = d2d::estimate_sir_ccdf(cfg, thetas, d2d::LinkKind::Direct);
    for (std::size_t i = 0; i < thetas.size(); ++i) {
      push("sir_ccdf_cellular", dep, thetas_db[i], cell[i],
           d2d::sir_ccdf_cellular(op, dp, thetas[i], pk0));
      push("sir_ccdf_d2d", dep, thetas_db[i], dir[i],
           d2d::sir_ccdf_d2d(op, dp, thetas[i], pk0));
    }
  }
  return t;
}

// Shared by sweep-rmax and sweep-density: optimal parameters from the
// full-load engine, Monte Carlo gains against the paired baseline.
Table sweep_table(const json& spec, bool sweep_rmax) {
  const d2d::OperationalPoint base_op = point_from_spec(spec);
  const json sw = spec.value("sweep", json::object());
  const double from = sw.value("from", sweep_rmax ? 0.2 : 1.0);
  const double to = sw.value("to", sweep_rmax ? 1.4 : 30.0);
  const int points = sw.value("points", 7);
  if (points < 1 || !(from > 0.0) || !(to >= from)) {
    throw std::invalid_argument("sweep: need 0 < from <= to and points >= 1");
  }
  const bool with_mc = !spec.value("no_mc", false);

  Table t;
  t.columns = {sweep_rmax ? "rmax_norm" : "lambda_d_ratio",
               "scheme",
               "deployment",
               "gain_analytic",
               "gain_mc",
               "mc_stderr"};

  struct RowMeta {
    double x;
    d2d::SchemeId scheme;
    d2d::DeploymentKind kind;
    double gain_analytic;
  };
  std::vector<RowMeta> metas;
  std::vector<d2d::GainTask> tasks;

  const auto schemes = schemes_from_spec(spec);
  const auto kinds = deployments_from_spec(spec);
  for (int i = 0; i < points; ++i) {
    const double x =
        points == 1 ? from : from + (to - from) * i / (points - 1);
    d2d::OperationalPoint op = base_op;
    if (sweep_rmax) {
      op.r_d_max = x / (2.0 * std::sqrt(op.lambda_a));
    } else {
      op.lambda_d = x * op.lambda_a;
    }
    const d2d::HeavyLoadCoefficients c = d2d::coefficients(op);
    for (d2d::DeploymentKind kind : kinds) {
      for (d2d::SchemeId s : schemes) {
        const d2d::SchemeResult r = d2d::optimize_scheme(c, s, kind);
        metas.push_back({x, s, kind, r.gain});
        d2d::GainTask task;
        task.r_d_max = op.r_d_max;
        task.scheme = s;
        task.dp = d2d::make_design(
            op, make_selection(d2d::scheme_selection(s), r.p_star, op.r_d_max),
            r.q_star, kind, 1.0);
        tasks.push_back(task);
      }
    }
  }

  std::vector<d2d::McEstimate> mc(tasks.size());
  if (with_mc) {
    if (sweep_rmax) {
      // one operational point: every task shares geometry with the baseline
      d2d::SimConfig cfg = sim_config_from_spec(spec, base_op, tasks[0].dp);
      mc = d2d::estimate_gain_batch(cfg, tasks);
    } else {
      // densities change along the sweep: one batch per grid point
      std::size_t k = 0;
      for (int i = 0; i < points; ++i) {
        const double x =
            points == 1 ? from : from + (to - from) * i / (points - 1);
        d2d::OperationalPoint op = base_op;
        op.lambda_d = x * op.lambda_a;
        const std::size_t n_here = kinds.size() * schemes.size();
        std::vector<d2d::GainTask> chunk(tasks.begin() + k,
                                         tasks.begin() + k + n_here);
        d2d::SimConfig cfg = sim_config_from_spec(spec, op, chunk[0].dp);
        const auto got = d2d::estimate_gain_batch(cfg, chunk);
        std::copy(got.begin(), got.end(), mc.begin() + k);
        k += n_here;
      }
    }
  }

  for (std::size_t i = 0; i < metas.size(); ++i) {
    json gain_mc = "", stderr_mc = "";
    if (with_mc) {
      if (!std::isfinite(mc[i].value)) {
        throw std::runtime_error("Monte Carlo gain estimate is not finite");
      }
      gain_mc = mc[i].value;
      stderr_mc = mc[i].std_error;
    }
    t.rows.push_back(json::array({metas[i].x, d2d::to_string(metas[i].scheme),
                                  d2d::to_string(metas[i].kind),
                                  metas[i].gain_analytic, gain_mc, stderr_mc}));
  }
  return t;
}

Table run_command(const json& spec) {
  const std::string cmd = spec.at("command").get<std::string>();
  if (cmd == "rate") return cmd_rate(spec);
  if (cmd == "optimize") return cmd_optimize(spec);
  if (cmd == "region") return cmd_region(spec);
  if (cmd == "boundary") return cmd_boundary(spec);
  if (cmd == "levelset") return cmd_levelset(spec);
  if (cmd == "mc-validate") return cmd_mc_validate(spec);
  if (cmd == "sweep-rmax") return sweep_table(spec, true);
  if (cmd == "sweep-density") return sweep_table(spec, false);
  throw std::invalid_argument("unknown command \"" + cmd + "\"");
}

// CLI flags -> spec object.  Every run is fully described by this object;
// JSON outputs embed it and --config replays it bit for bit.
struct Flags {
  double lambda_c_ratio = 10.0, lambda_d_ratio = 10.0, lambda_a = 1.0;
  double rmax_norm = 0.8, theta0_db = -6.0, alpha = 4.0;
  std::vector<std::string> schemes;
  std::string deployment = "both";
  std::string selection = "prob";
  double p = 1.0, q = 1.0;
  std::optional<double> eta_c, p_a;
  bool full_load = false;
  long realizations = 20000;
  bool full = false;
  double mean_aps = 30.0, guard_factor = 2.0;
  std::uint64_t seed = 1;
  int threads = 0;
  bool no_mc = false;
  double x_min = 1e-3, x_max = 10.0, y_min = 1e-2, y_max = 50.0;
  int resolution = 200;
  double gain = 1.5;
  double sweep_from = 0.0, sweep_to = 0.0;
  int sweep_points = 0;
  std::string format = "csv";
  std::string output = "-";
};

void add_common_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--lambda-c-ratio", f.lambda_c_ratio,
                  "cellular-only UE density over AP density");
  cmd->add_option("--lambda-d-ratio", f.lambda_d_ratio,
                  "direct-capable UE density over AP density");
  cmd->add_option("--lambda-a", f.lambda_a, "AP density (absolute)");
  cmd->add_option("--rmax-norm", f.rmax_norm,
                  "max direct link distance, normalized by 1/(2 sqrt(lambda_a))");
  cmd->add_option("--theta0-db", f.theta0_db, "SIR threshold in dB");
  cmd->add_option("--alpha", f.alpha, "path loss exponent (> 2)");
  cmd->add_option("--format", f.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("-o,--output", f.output, "output path, - for stdout");
}

void add_scheme_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--scheme,--schemes", f.schemes,
                  "schemes: 1 2 3-p 3-d 4-p 4-d or all")
      ->delimiter(',');
  cmd->add_option("--deployment", f.deployment, "overlay, underlay or both")
      ->check(CLI::IsMember({"overlay", "underlay", "both"}));
}

void add_design_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--selection", f.selection,
                  "mode selection rule: prob or dist")
      ->check(CLI::IsMember({"prob", "dist"}));
  cmd->add_option("--p", f.p, "direct-mode selection probability (retention)");
  cmd->add_option("--q", f.q, "per-slot transmit probability");
  cmd->add_option("--eta-c", f.eta_c,
                  "override the overlay cellular bandwidth fraction");
  cmd->add_option("--p-a", f.p_a, "override the underlay AP transmit power");
  cmd->add_flag("--full-load", f.full_load,
                "assume every cell occupied instead of the occupancy model");
}

void add_mc_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--realizations", f.realizations, "Monte Carlo realizations");
  cmd->add_flag("--full", f.full, "use 1e5 realizations");
  cmd->add_option("--mean-aps", f.mean_aps, "mean APs in the window");
  cmd->add_option("--guard-factor", f.guard_factor,
                  "interferer radius over window radius");
  cmd->add_option("--seed", f.seed, "RNG seed");
  cmd->add_option("--threads", f.threads, "worker threads (0 = auto)");
}

void add_axes_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--x-min", f.x_min, "min mean proximal-source count axis");
  cmd->add_option("--x-max", f.x_max, "max mean proximal-source count axis");
  cmd->add_option("--y-min", f.y_min, "min direct-capable UEs per cell axis");
  cmd->add_option("--y-max", f.y_max, "max direct-capable UEs per cell axis");
  cmd->add_option("--resolution", f.resolution, "scan rows/columns");
}

json spec_from_flags(const std::string& command, const Flags& f,
                     bool with_design, bool with_mc, bool with_axes,
                     bool with_sweep, bool with_gain) {
  json spec;
  spec["command"] = command;
  spec["point"] = {{"lambda_c_ratio", f.lambda_c_ratio},
                   {"lambda_d_ratio", f.lambda_d_ratio},
                   {"lambda_a", f.lambda_a},
                   {"rmax_norm", f.rmax_norm},
                   {"theta0_db", f.theta0_db},
                   {"alpha", f.alpha}};
  if (!f.schemes.empty()) spec["schemes"] = f.schemes;
  spec["deployment"] = f.deployment;
  if (with_design) {
    spec["selection"] = f.selection;
    spec["p"] = f.p;
    spec["q"] = f.q;
    if (f.eta_c) spec["eta_c"] = *f.eta_c;
    if (f.p_a) spec["p_a"] = *f.p_a;
    if (f.full_load) spec["full_load"] = true;
  }
  if (with_mc) {
    spec["mc"] = {{"realizations", f.realizations},
                  {"full", f.full},
                  {"mean_aps", f.mean_aps},
                  {"guard_factor", f.guard_factor},
                  {"seed", f.seed},
                  {"threads", f.threads}};
    if (f.no_mc) spec["no_mc"] = true;
  }
  if (with_axes) {
    spec["axes"] = {{"x_min", f.x_min},
                    {"x_max", f.x_max},
                    {"y_min", f.y_min},
                    {"y_max", f.y_max}};
    spec["resolution"] = f.resolution;
  }
  if (with_sweep && f.sweep_points > 0) {
    spec["sweep"] = {{"from", f.sweep_from},
                     {"to", f.sweep_to},
                     {"points", f.sweep_points}};
  }
  if (with_gain) spec["gain"] = f.gain;
  spec["format"] = f.format;
  spec["output"] = f.output;
  return spec;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "d2dregion: average-rate, mode-parameter and operational-region "
      "calculator for a cellular downlink with a direct (device-to-device) "
      "mode, with a Monte Carlo validator.\n"
      "CSV output: '#'-prefixed header lines carry the tool version and the "
      "full run spec, then one header row and data rows (RFC-4180 fields, "
      "dot decimal separator, fixed column order per command)."};
  app.require_subcommand(0, 1);

  std::string config_path;
  app.add_option("--config", config_path,
                 "run a spec from a JSON file (a previous run's 'spec' "
                 "object or a whole JSON output)");

  Flags f;
  json spec;

  auto* rate = app.add_subcommand("rate",
      "general-load rates at one design (columns: deployment,p,q,eta_c,"
      "p_a,pk0,rate_cell,rate_d2d,rate_avg,rate_no_d2d,gain)");
  add_common_flags(rate, f);
  add_scheme_flags(rate, f);
  add_design_flags(rate, f);
  rate->callback([&] { spec = spec_from_flags("rate", f, true, false, false,
                                              false, false); });

  auto* opt = app.add_subcommand(
      "optimize",
      "full-load optimal mode parameters per scheme (columns: scheme,"
      "deployment,p_star,q_star,r_th_norm,f_star,gain,in_region,verdict,"
      "effective_scheme)");
  add_common_flags(opt, f);
  add_scheme_flags(opt, f);
  opt->callback([&] { spec = spec_from_flags("optimize", f, false, false,
                                             false, false, false); });

  auto* region = app.add_subcommand(
      "region",
      "operational-region membership per scheme (columns: scheme,deployment,"
      "in_region,f_star,verdict)");
  add_common_flags(region, f);
  add_scheme_flags(region, f);
  region->callback([&] { spec = spec_from_flags("region", f, false, false,
                                                false, false, false); });

  auto* boundary = app.add_subcommand(
      "boundary",
      "trace a region boundary in figure axes (columns: "
      "x_mean_proximal_sources,y_due_per_cell)");
  add_common_flags(boundary, f);
  add_scheme_flags(boundary, f);
  add_axes_flags(boundary, f);
  boundary->callback([&] { spec = spec_from_flags("boundary", f, false, false,
                                                  true, false, false); });

  auto* levelset = app.add_subcommand(
      "levelset",
      "trace an optimized-gain level set in figure axes (columns: "
      "x_mean_proximal_sources,y_due_per_cell)");
  add_common_flags(levelset, f);
  add_scheme_flags(levelset, f);
  add_axes_flags(levelset, f);
  levelset->add_option("--gain", f.gain, "gain target (>= 1)");
  levelset->callback([&] { spec = spec_from_flags("levelset", f, false, false,
                                                  true, false, true); });

  auto* mcv = app.add_subcommand(
      "mc-validate",
      "Monte Carlo vs closed forms at one design point (columns: quantity,"
      "deployment,theta_db,mc,mc_stderr,analytic,z)");
  add_common_flags(mcv, f);
  add_scheme_flags(mcv, f);
  add_design_flags(mcv, f);
  add_mc_flags(mcv, f);
  mcv->callback([&] { spec = spec_from_flags("mc-validate", f, true, true,
                                             false, false, false); });

  auto* swr = app.add_subcommand(
      "sweep-rmax",
      "optimized gain vs normalized max direct-link distance (columns: "
      "rmax_norm,scheme,deployment,gain_analytic,gain_mc,mc_stderr)");
  add_common_flags(swr, f);
  add_scheme_flags(swr, f);
  add_mc_flags(swr, f);
  swr->add_flag("--no-mc", f.no_mc, "skip Monte Carlo columns");
  swr->add_option("--from", f.sweep_from, "first rmax_norm")->required();
  swr->add_option("--to", f.sweep_to, "last rmax_norm")->required();
  swr->add_option("--points", f.sweep_points, "grid points")->required();
  swr->callback([&] { spec = spec_from_flags("sweep-rmax", f, false, true,
                                             false, true, false); });

  auto* swd = app.add_subcommand(
      "sweep-density",
      "optimized gain vs direct-capable UE density per cell (columns: "
      "lambda_d_ratio,scheme,deployment,gain_analytic,gain_mc,mc_stderr)");
  add_common_flags(swd, f);
  add_scheme_flags(swd, f);
  add_mc_flags(swd, f);
  swd->add_flag("--no-mc", f.no_mc, "skip Monte Carlo columns");
  swd->add_option("--from", f.sweep_from, "first lambda_d/lambda_a")->required();
  swd->add_option("--to", f.sweep_to, "last lambda_d/lambda_a")->required();
  swd->add_option("--points", f.sweep_points, "grid points")->required();
  swd->callback([&] { spec = spec_from_flags("sweep-density", f, false, true,
                                             false, true, false); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalidInput;
  }

  try {
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) {
        throw std::invalid_argument("cannot read config " + config_path);
      }
      json doc = json::parse(in);
      spec = doc.contains("spec") ? doc["spec"] : doc;
    }
    if (spec.is_null() || !spec.contains("command")) {
      std::cerr << app.help();
      return kExitInvalidInput;
    }
    write_output(spec, run_command(spec));
    return kExitOk;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: invalid input: " << e.what() << "\n";
    return kExitInvalidInput;
  } catch (const json::exception& e) {
    std::cerr << "error: invalid input: " << e.what() << "\n";
    return kExitInvalidInput;
  } catch (const std::exception& e) {
    std::cerr << "error: numerical failure: " << e.what() << "\n";
    return kExitNumericalFailure;
  }
}
