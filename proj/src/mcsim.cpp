#include "d2d/mcsim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <thread>

namespace d2d {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Substream per realization: parallel and serial runs consume identical
// random material for a given (seed, index).
std::mt19937_64 substream(std::uint64_t seed, std::uint64_t index) {
  return std::mt19937_64(mix64(seed ^ mix64(index + 1)));
}

// Geometry inputs of a realization.  Deliberately excludes every design
// parameter (p, q, deployment, r_d_max), so runs at the same operational
// point and seed share worlds point for point.
struct Geometry {
  double lambda_a = 1.0, lambda_c = 1.0, lambda_d = 1.0;
  double radius = 1.0;  // sampling disk radius (guard_factor * window radius)
  std::uint64_t seed = 1;
};

Geometry geometry_of(const SimConfig& cfg, double radius_scale = 1.0) {
  Geometry g;
  g.lambda_a = cfg.op.lambda_a;
  g.lambda_c = cfg.op.lambda_c;
  g.lambda_d = cfg.op.lambda_d;
  g.radius = cfg.guard_factor * cfg.window_radius() * radius_scale;
  g.seed = cfg.seed;
  return g;
}

struct World {
  std::vector<Vec2> aps, cues, dues;
  std::vector<Vec2> src_unit;        // source offsets on the unit disk
  std::vector<double> unit_norm2;    // |src_unit|^2
  std::vector<double> mode_u, aloha_u;
  std::vector<double> fad_ap_cell, fad_src_cell, fad_ap_dir, fad_src_dir;
  double typ_dir_fade = 1.0;
  double typ_r_u = 0.0;
};

World sample_world(const Geometry& g, std::uint64_t idx) {
  auto rng = substream(g.seed, idx);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::exponential_distribution<double> expo(1.0);
  const double area = kPi * g.radius * g.radius;

  auto draw_disk = [&](double radius) {
    const double r = radius * std::sqrt(uni(rng));
    const double ang = 2.0 * kPi * uni(rng);
    return Vec2{r * std::cos(ang), r * std::sin(ang)};
  };
  auto draw_points = [&](double density, std::vector<Vec2>& out) {
    std::poisson_distribution<long> pois(density * area);
    long n = pois(rng);
    out.resize(static_cast<std::size_t>(std::max<long>(n, 0)));
    for (auto& v : out) v = draw_disk(g.radius);
    return out.size();
  };

  World w;
  // The typical UE needs a serving AP; an empty AP draw (possible only for
  // tiny mean counts) is redrawn from the same stream.
  std::poisson_distribution<long> ap_pois(g.lambda_a * area);
  long n_ap = ap_pois(rng);
  while (n_ap <= 0) n_ap = ap_pois(rng);
  w.aps.resize(static_cast<std::size_t>(n_ap));
  for (auto& v : w.aps) v = draw_disk(g.radius);

  draw_points(g.lambda_c, w.cues);
  const std::size_t n_due = draw_points(g.lambda_d, w.dues);

  w.src_unit.resize(n_due);
  w.unit_norm2.resize(n_due);
  for (std::size_t j = 0; j < n_due; ++j) {
    w.src_unit[j] = draw_disk(1.0);
    w.unit_norm2[j] =
        w.src_unit[j].x * w.src_unit[j].x + w.src_unit[j].y * w.src_unit[j].y;
  }
  w.mode_u.resize(n_due);
  for (auto& u : w.mode_u) u = uni(rng);
  w.aloha_u.resize(n_due);
  for (auto& u : w.aloha_u) u = uni(rng);

  auto draw_fading = [&](std::size_t n, std::vector<double>& out) {
    out.resize(n);
    for (auto& f : out) f = expo(rng);
  };
  draw_fading(w.aps.size(), w.fad_ap_cell);
  draw_fading(n_due, w.fad_src_cell);
  draw_fading(w.aps.size(), w.fad_ap_dir);
  draw_fading(n_due, w.fad_src_dir);
  w.typ_dir_fade = expo(rng);
  w.typ_r_u = uni(rng);
  return w;
}

// Uniform bucket grid for nearest-AP queries.
class ApGrid {
 public:
  ApGrid(const std::vector<Vec2>& pts, double extent)
      : pts_(pts),
        n_(std::max<int>(1, static_cast<int>(std::sqrt(
                                static_cast<double>(pts.size()))))),
        origin_(-extent),
        cell_(2.0 * extent / n_) {
    buckets_.resize(static_cast<std::size_t>(n_) * n_);
    for (int i = 0; i < static_cast<int>(pts.size()); ++i) {
      buckets_[bucket_of(pts[i].x, pts[i].y)].push_back(i);
    }
  }

  int nearest(double x, double y) const {
    const int cx = clamp_idx(x), cy = clamp_idx(y);
    int best = -1;
    double best_d2 = kInf;
    for (int ring = 0; ring < 2 * n_; ++ring) {
      // Any point in a cell at Chebyshev ring r is at least (r-1) cells away.
      if (best >= 0) {
        const double safe = (ring - 1) * cell_;
        if (safe > 0.0 && best_d2 <= safe * safe) break;
      }
      for (int dy = -ring; dy <= ring; ++dy) {
        const int yy = cy + dy;
        if (yy < 0 || yy >= n_) continue;
        const int step = (std::abs(dy) == ring) ? 1 : 2 * ring;
        for (int dx = -ring; dx <= ring; dx += std::max(step, 1)) {
          const int xx = cx + dx;
          if (xx < 0 || xx >= n_) continue;
          for (int idx : buckets_[static_cast<std::size_t>(yy) * n_ + xx]) {
            const double ddx = pts_[idx].x - x, ddy = pts_[idx].y - y;
            const double d2 = ddx * ddx + ddy * ddy;
            if (d2 < best_d2) {
              best_d2 = d2;
              best = idx;
            }
          }
        }
        if (ring == 0) break;
      }
    }
    return best;
  }

 private:
  int clamp_idx(double v) const {
    const int i = static_cast<int>((v - origin_) / cell_);
    return std::clamp(i, 0, n_ - 1);
  }
  std::size_t bucket_of(double x, double y) const {
    return static_cast<std::size_t>(clamp_idx(y)) * n_ + clamp_idx(x);
  }

  const std::vector<Vec2>& pts_;
  int n_;
  double origin_, cell_;
  std::vector<std::vector<int>> buckets_;
};

// Nearest-AP association and origin-centric path gains, shared by every
// design point evaluated on the world.
struct Assoc {
  std::vector<double> ap_path;  // |ap|^-alpha
  std::vector<double> ap_r2;
  std::vector<int> base_cnt;    // C-UEs per AP
  std::vector<int> due_assoc;
  int serving = 0;
};

Assoc associate(const World& w, double alpha, double extent) {
  ApGrid grid(w.aps, extent);
  Assoc a;
  const std::size_t n_ap = w.aps.size();
  a.ap_path.resize(n_ap);
  a.ap_r2.resize(n_ap);
  for (std::size_t i = 0; i < n_ap; ++i) {
    const double r2 = w.aps[i].x * w.aps[i].x + w.aps[i].y * w.aps[i].y;
    a.ap_r2[i] = r2;
    a.ap_path[i] = std::pow(r2, -alpha / 2.0);
  }
  a.serving = grid.nearest(0.0, 0.0);
  a.base_cnt.assign(n_ap, 0);
  for (const auto& c : w.cues) ++a.base_cnt[grid.nearest(c.x, c.y)];
  a.due_assoc.resize(w.dues.size());
  for (std::size_t j = 0; j < w.dues.size(); ++j) {
    a.due_assoc[j] = grid.nearest(w.dues[j].x, w.dues[j].y);
  }
  return a;
}

// Source geometry for one r_d_max: interferer positions and the inverted
// transmit powers r^alpha.
struct SrcGeom {
  std::vector<double> src_path;  // |due + r_d_max * unit|^-alpha
  std::vector<double> src_r2;
  std::vector<double> src_pow;   // (r_d_max |unit|)^alpha
};

SrcGeom source_geometry(const World& w, double r_d_max, double alpha) {
  SrcGeom sg;
  const std::size_t n = w.dues.size();
  sg.src_path.resize(n);
  sg.src_r2.resize(n);
  sg.src_pow.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double sx = w.dues[j].x + r_d_max * w.src_unit[j].x;
    const double sy = w.dues[j].y + r_d_max * w.src_unit[j].y;
    const double r2 = sx * sx + sy * sy;
    sg.src_r2[j] = r2;
    sg.src_path[j] = std::pow(r2, -alpha / 2.0);
    sg.src_pow[j] = std::pow(r_d_max * r_d_max * w.unit_norm2[j], alpha / 2.0);
  }
  return sg;
}

// One design point compiled for evaluation.
struct TaskCtx {
  double p = 1.0, q = 1.0;
  bool dist_based = false;
  bool underlay = false;
  double eta_c = 1.0;
  double p_a = 1.0;
  int src_group = 0;  // index into the per-r_d_max source geometries
};

TaskCtx make_task(const DesignParams& dp, int src_group) {
  TaskCtx t;
  t.p = dp.p();
  t.q = dp.q;
  t.dist_based = dp.selection.kind == SelectionKind::DistanceBased;
  t.underlay = !dp.deployment.overlay_kind();
  t.eta_c = dp.deployment.eta_c;
  t.p_a = dp.deployment.p_a;
  t.src_group = src_group;
  return t;
}

struct ModeScratch {
  std::vector<int> cnt;          // cellular receivers per AP
  std::vector<std::uint8_t> tx;  // source transmits this slot
  int k0 = 0;
};

void resolve_modes(const World& w, const Assoc& a, const TaskCtx& t,
                   ModeScratch& m) {
  m.cnt = a.base_cnt;
  m.tx.assign(w.dues.size(), 0);
  for (std::size_t j = 0; j < w.dues.size(); ++j) {
    const bool direct = t.dist_based ? (w.unit_norm2[j] <= t.p)
                                     : (w.mode_u[j] < t.p);
    if (direct) {
      m.tx[j] = w.aloha_u[j] < t.q ? 1 : 0;
    } else {
      ++m.cnt[a.due_assoc[j]];
    }
  }
  m.k0 = m.cnt[a.serving];
}

// SIR of the typical UE on a cellular link; r_cut truncates interferers.
double sir_cellular(const World& w, const Assoc& a, const TaskCtx& t,
                    const ModeScratch& m, const SrcGeom& sg, double r_cut2) {
  const double power = t.underlay ? t.p_a : 1.0;  // cancels for overlay
  const double signal = power * w.fad_ap_cell[a.serving] * a.ap_path[a.serving];
  double interf = 0.0;
  for (std::size_t i = 0; i < w.aps.size(); ++i) {
    if (static_cast<int>(i) == a.serving || m.cnt[i] == 0) continue;
    if (a.ap_r2[i] > r_cut2) continue;
    interf += power * w.fad_ap_cell[i] * a.ap_path[i];
  }
  if (t.underlay) {
    for (std::size_t j = 0; j < w.dues.size(); ++j) {
      if (!m.tx[j] || sg.src_r2[j] > r_cut2) continue;
      interf += sg.src_pow[j] * w.fad_src_cell[j] * sg.src_path[j];
    }
  }
  return interf == 0.0 ? kInf : signal / interf;
}

// SIR of the typical direct link.  Path-loss inversion leaves the mean
// useful power at one, so the signal is the fading draw alone; the link
// distance (conditioned on the selection rule) cancels.
double sir_direct(const World& w, const Assoc& a, const TaskCtx& t,
                  const ModeScratch& m, const SrcGeom& sg, double r_cut2) {
  const double signal = w.typ_dir_fade;
  double interf = 0.0;
  for (std::size_t j = 0; j < w.dues.size(); ++j) {
    if (!m.tx[j] || sg.src_r2[j] > r_cut2) continue;
    interf += sg.src_pow[j] * w.fad_src_dir[j] * sg.src_path[j];
  }
  if (t.underlay) {
    for (std::size_t i = 0; i < w.aps.size(); ++i) {
      if (m.cnt[i] == 0 || a.ap_r2[i] > r_cut2) continue;
      interf += t.p_a * w.fad_ap_dir[i] * a.ap_path[i];
    }
  }
  return interf == 0.0 ? kInf : signal / interf;
}

struct RateWeights {
  double theta0 = 1.0;
  double log2f = 1.0;
  double wc = 0.5, wd = 0.5;  // lambda_c and lambda_d shares
};

// Per-realization sample of the average user rate: slot share, SIR
// indicator and mode mixture multiplied inside the realization; the typical
// link's own transmit probability enters analytically (same expectation,
// less variance).
double rate_sample(const World& w, const Assoc& a, const TaskCtx& t,
                   ModeScratch& m, const SrcGeom& sg, const RateWeights& rw) {
  resolve_modes(w, a, t, m);
  const double sir_c = sir_cellular(w, a, t, m, sg, kInf);
  const double rc = t.eta_c / (m.k0 + 1.0) * (sir_c >= rw.theta0 ? 1.0 : 0.0) *
                    rw.log2f;
  double rd = 0.0;
  if (t.p > 0.0) {
    const double sir_d = sir_direct(w, a, t, m, sg, kInf);
    rd = (t.underlay ? 1.0 : 1.0 - t.eta_c) * t.q *
         (sir_d >= rw.theta0 ? 1.0 : 0.0) * rw.log2f;
  }
  return rw.wc * rc + rw.wd * (t.p * rd + (1.0 - t.p) * rc);
}

// Baseline sample: the same world with no direct mode at all.
double rate_sample_no_d2d(const World& w, const Assoc& a, ModeScratch& m,
                          const RateWeights& rw) {
  m.cnt = a.base_cnt;
  for (std::size_t j = 0; j < w.dues.size(); ++j) ++m.cnt[a.due_assoc[j]];
  m.k0 = m.cnt[a.serving];
  const double signal = w.fad_ap_cell[a.serving] * a.ap_path[a.serving];
  double interf = 0.0;
  for (std::size_t i = 0; i < w.aps.size(); ++i) {
    if (static_cast<int>(i) == a.serving || m.cnt[i] == 0) continue;
    interf += w.fad_ap_cell[i] * a.ap_path[i];
  }
  const double sir = interf == 0.0 ? kInf : signal / interf;
  return 1.0 / (m.k0 + 1.0) * (sir >= rw.theta0 ? 1.0 : 0.0) * rw.log2f;
}

RateWeights rate_weights(const OperationalPoint& op) {
  RateWeights rw;
  rw.theta0 = op.theta_0;
  rw.log2f = std::log2(1.0 + op.theta_0);
  rw.wc = op.lambda_c / (op.lambda_c + op.lambda_d);
  rw.wd = op.lambda_d / (op.lambda_c + op.lambda_d);
  return rw;
}

void parallel_for(long n, int threads, const std::function<void(long)>& body) {
  long t = threads > 0
               ? threads
               : static_cast<long>(std::thread::hardware_concurrency());
  t = std::clamp<long>(t, 1, std::max<long>(n, 1));
  if (t <= 1) {
    for (long i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(t));
  for (long k = 0; k < t; ++k) {
    const long lo = n * k / t, hi = n * (k + 1) / t;
    pool.emplace_back([lo, hi, &body] {
      for (long i = lo; i < hi; ++i) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

// Runs cfg.realizations worlds and stores `slots` doubles per realization at
// out[idx*slots ...]; reduction afterwards is serial and index-ordered, so
// results do not depend on the thread count.
template <typename Eval>
std::vector<double> run_realizations(const SimConfig& cfg, int slots,
                                     double radius_scale, Eval&& eval) {
  cfg.validate();
  const Geometry geom = geometry_of(cfg, radius_scale);
  std::vector<double> out(static_cast<std::size_t>(cfg.realizations) * slots);
  parallel_for(cfg.realizations, cfg.threads, [&](long idx) {
    const World w = sample_world(geom, static_cast<std::uint64_t>(idx));
    const Assoc a = associate(w, cfg.op.alpha, geom.radius);
    eval(w, a, &out[static_cast<std::size_t>(idx) * slots]);
  });
  return out;
}

McEstimate reduce_mean(const std::vector<double>& samples, int stride,
                       int offset) {
  long double sum = 0.0L, sum2 = 0.0L;
  long n = 0;
  for (std::size_t i = offset; i < samples.size();
       i += static_cast<std::size_t>(stride)) {
    const double v = samples[i];
    if (std::isnan(v)) continue;
    sum += v;
    sum2 += static_cast<long double>(v) * v;
    ++n;
  }
  McEstimate e;
  e.n = n;
  if (n == 0) return e;
  const long double mean = sum / n;
  e.value = static_cast<double>(mean);
  if (n > 1) {
    const long double var = std::max(0.0L, (sum2 - n * mean * mean) / (n - 1));
    e.std_error = static_cast<double>(std::sqrt(var / n));
  }
  return e;
}

// Delta-method ratio of paired per-realization samples x (numerator) and y
// (baseline).
McEstimate reduce_ratio(const std::vector<double>& samples, int stride,
                        int x_off, int y_off) {
  long double sx = 0.0L, sy = 0.0L;
  long n = 0;
  for (std::size_t i = 0; i + std::max(x_off, y_off) < samples.size();
       i += static_cast<std::size_t>(stride)) {
    sx += samples[i + x_off];
    sy += samples[i + y_off];
    ++n;
  }
  McEstimate e;
  e.n = n;
  if (n == 0 || sy == 0.0L) return e;
  const long double mx = sx / n, my = sy / n;
  long double sxx = 0.0L, syy = 0.0L, sxy = 0.0L;
  for (std::size_t i = 0; i + std::max(x_off, y_off) < samples.size();
       i += static_cast<std::size_t>(stride)) {
    const long double dx = samples[i + x_off] - mx;
    const long double dy = samples[i + y_off] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  const long double g = mx / my;
  e.value = static_cast<double>(g);
  if (n > 1) {
    const long double denom = static_cast<long double>(n) * (n - 1);
    const long double var =
        (sxx - 2.0L * g * sxy + g * g * syy) / (my * my * denom);
    e.std_error = static_cast<double>(std::sqrt(std::max(0.0L, var)));
  }
  return e;
}

}  // namespace

void SimConfig::validate() const {
  op.validate();
  dp.validate();
  if (realizations < 1) {
    throw std::invalid_argument("sim config: realizations must be >= 1");
  }
  if (!(mean_ap_count >= 1.0)) {
    throw std::invalid_argument("sim config: mean_ap_count must be >= 1");
  }
  if (!(guard_factor >= 1.0)) {
    throw std::invalid_argument("sim config: guard_factor must be >= 1");
  }
}

double SimConfig::window_radius() const {
  return std::sqrt(mean_ap_count / (kPi * op.lambda_a));
}

NetworkRealization sample_realization(const SimConfig& cfg,
                                      std::uint64_t index) {
  cfg.validate();
  const World w = sample_world(geometry_of(cfg), index);
  NetworkRealization r;
  r.ap_positions = w.aps;
  r.cue_positions = w.cues;
  r.due_positions = w.dues;
  r.due_source_offsets.resize(w.dues.size());
  r.mode_marks.resize(w.dues.size());
  r.activity_marks.resize(w.dues.size());
  const double p = cfg.dp.p();
  const bool dist = cfg.dp.selection.kind == SelectionKind::DistanceBased;
  for (std::size_t j = 0; j < w.dues.size(); ++j) {
    r.due_source_offsets[j] = {cfg.op.r_d_max * w.src_unit[j].x,
                               cfg.op.r_d_max * w.src_unit[j].y};
    const bool direct = dist ? (w.unit_norm2[j] <= p) : (w.mode_u[j] < p);
    r.mode_marks[j] = direct ? 1 : 0;
    r.activity_marks[j] = (direct && w.aloha_u[j] < cfg.dp.q) ? 1 : 0;
  }
  r.fading_ap_cellular = w.fad_ap_cell;
  r.fading_src_cellular = w.fad_src_cell;
  r.fading_ap_direct = w.fad_ap_dir;
  r.fading_src_direct = w.fad_src_dir;
  r.typical_direct_fading = w.typ_dir_fade;
  r.typical_distance_u = w.typ_r_u;
  return r;
}

std::vector<McEstimate> estimate_sir_ccdf(const SimConfig& cfg,
                                          const std::vector<double>& thetas,
                                          LinkKind kind) {
  const TaskCtx task = make_task(cfg.dp, 0);
  const std::vector<double> sirs = run_realizations(
      cfg, 1, 1.0, [&](const World& w, const Assoc& a, double* out) {
        const SrcGeom sg = source_geometry(w, cfg.op.r_d_max, cfg.op.alpha);
        ModeScratch m;
        resolve_modes(w, a, task, m);
        out[0] = kind == LinkKind::Cellular
                     ? sir_cellular(w, a, task, m, sg, kInf)
                     : sir_direct(w, a, task, m, sg, kInf);
      });
  std::vector<McEstimate> result;
  result.reserve(thetas.size());
  std::vector<double> ind(sirs.size());
  for (double theta : thetas) {
    for (std::size_t i = 0; i < sirs.size(); ++i) {
      ind[i] = sirs[i] >= theta ? 1.0 : 0.0;
    }
    result.push_back(reduce_mean(ind, 1, 0));
  }
  return result;
}

McEstimate estimate_tdma_factor(const SimConfig& cfg) {
  const TaskCtx task = make_task(cfg.dp, 0);
  const std::vector<double> samples = run_realizations(
      cfg, 1, 1.0, [&](const World& w, const Assoc& a, double* out) {
        ModeScratch m;
        resolve_modes(w, a, task, m);
        out[0] = 1.0 / (m.k0 + 1.0);
      });
  return reduce_mean(samples, 1, 0);
}

namespace {

// Occupancy fraction over inner-window cells; the origin cell is size
// biased, so the serving AP is skipped.
double occupancy_sample(const World& w, const Assoc& a,
                        const ModeScratch& m, double inner_r2) {
  long total = 0, busy = 0;
  for (std::size_t i = 0; i < w.aps.size(); ++i) {
    if (static_cast<int>(i) == a.serving || a.ap_r2[i] > inner_r2) continue;
    ++total;
    if (m.cnt[i] > 0) ++busy;
  }
  return total == 0 ? std::numeric_limits<double>::quiet_NaN()
                    : static_cast<double>(busy) / total;
}

}  // namespace

McEstimate estimate_cell_nonempty(const SimConfig& cfg) {
  const TaskCtx task = make_task(cfg.dp, 0);
  const double inner_r2 = cfg.window_radius() * cfg.window_radius();
  const std::vector<double> samples = run_realizations(
      cfg, 1, 1.0, [&](const World& w, const Assoc& a, double* out) {
        ModeScratch m;
        resolve_modes(w, a, task, m);
        out[0] = occupancy_sample(w, a, m, inner_r2);
      });
  return reduce_mean(samples, 1, 0);
}

McEstimate estimate_tdma_residual(const SimConfig& cfg) {
  const TaskCtx task = make_task(cfg.dp, 0);
  const double inner_r2 = cfg.window_radius() * cfg.window_radius();
  const double load =
      cfg.op.lambda_c + (1.0 - cfg.dp.p()) * cfg.op.lambda_d;
  const double scale = cfg.op.lambda_a / load;
  const std::vector<double> samples = run_realizations(
      cfg, 1, 1.0, [&](const World& w, const Assoc& a, double* out) {
        ModeScratch m;
        resolve_modes(w, a, task, m);
        const double occ = occupancy_sample(w, a, m, inner_r2);
        out[0] = std::isnan(occ)
                     ? std::numeric_limits<double>::quiet_NaN()
                     : 1.0 / (m.k0 + 1.0) - scale * occ;
      });
  return reduce_mean(samples, 1, 0);
}

McEstimate estimate_rate(const SimConfig& cfg) {
  const TaskCtx task = make_task(cfg.dp, 0);
  const RateWeights rw = rate_weights(cfg.op);
  const std::vector<double> samples = run_realizations(
      cfg, 1, 1.0, [&](const World& w, const Assoc& a, double* out) {
        const SrcGeom sg = source_geometry(w, cfg.op.r_d_max, cfg.op.alpha);
        ModeScratch m;
        out[0] = rate_sample(w, a, task, m, sg, rw);
      });
  return reduce_mean(samples, 1, 0);
}

McEstimate estimate_gain(const SimConfig& cfg) {
  GainTask task;
  task.r_d_max = cfg.op.r_d_max;
  task.dp = cfg.dp;
  task.scheme = cfg.scheme;
  return estimate_gain_batch(cfg, {task}).front();
}

std::vector<McEstimate> estimate_gain_batch(const SimConfig& base,
                                            const std::vector<GainTask>& tasks) {
  if (tasks.empty()) return {};
  // Distinct r_d_max values share source geometry.
  std::vector<double> rmax_values;
  std::vector<TaskCtx> ctx;
  ctx.reserve(tasks.size());
  for (const auto& t : tasks) {
    if (!(t.r_d_max > 0.0)) {
      throw std::invalid_argument("gain task: r_d_max must be > 0");
    }
    t.dp.validate();
    auto it = std::find(rmax_values.begin(), rmax_values.end(), t.r_d_max);
    if (it == rmax_values.end()) {
      rmax_values.push_back(t.r_d_max);
      it = std::prev(rmax_values.end());
    }
    ctx.push_back(make_task(
        t.dp, static_cast<int>(std::distance(rmax_values.begin(), it))));
  }

  const RateWeights rw = rate_weights(base.op);
  const int slots = static_cast<int>(tasks.size()) + 1;
  const std::vector<double> samples = run_realizations(
      base, slots, 1.0, [&](const World& w, const Assoc& a, double* out) {
        std::vector<SrcGeom> geoms;
        geoms.reserve(rmax_values.size());
        for (double r : rmax_values) {
          geoms.push_back(source_geometry(w, r, base.op.alpha));
        }
        ModeScratch m;
        out[0] = rate_sample_no_d2d(w, a, m, rw);
        for (std::size_t k = 0; k < ctx.size(); ++k) {
          out[k + 1] = rate_sample(w, a, ctx[k], m, geoms[ctx[k].src_group], rw);
        }
      });

  std::vector<McEstimate> result(tasks.size());
  for (std::size_t k = 0; k < tasks.size(); ++k) {
    result[k] = reduce_ratio(samples, slots, static_cast<int>(k) + 1, 0);
  }
  return result;
}

GuardSensitivity guard_sensitivity(const SimConfig& cfg, LinkKind kind,
                                   double theta) {
  const TaskCtx task = make_task(cfg.dp, 0);
  const double cut =
      cfg.guard_factor * cfg.window_radius();  // restricted interferer radius
  const double cut2 = cut * cut;
  // Worlds are sampled out to twice the configured guard radius; the
  // restricted estimate truncates interference at the configured radius, the
  // full one keeps everything, and the paired difference isolates the
  // truncation bias.
  const std::vector<double> samples = run_realizations(
      cfg, 2, 2.0, [&](const World& w, const Assoc& a, double* out) {
        const SrcGeom sg = source_geometry(w, cfg.op.r_d_max, cfg.op.alpha);
        ModeScratch m;
        resolve_modes(w, a, task, m);
        const double restricted =
            kind == LinkKind::Cellular
                ? sir_cellular(w, a, task, m, sg, cut2)
                : sir_direct(w, a, task, m, sg, cut2);
        const double full = kind == LinkKind::Cellular
                                ? sir_cellular(w, a, task, m, sg, kInf)
                                : sir_direct(w, a, task, m, sg, kInf);
        out[0] = restricted >= theta ? 1.0 : 0.0;
        out[1] = (full >= theta ? 1.0 : 0.0) - out[0];
      });
  GuardSensitivity g;
  g.base = reduce_mean(samples, 2, 0);
  g.shift = reduce_mean(samples, 2, 1);
  return g;
}

}  // namespace d2d
