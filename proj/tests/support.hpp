#pragma once

// Shared test utilities: coherent coefficient tuples and the independent
// lattice + zoom grid search used as the optimization oracle.  Everything
// here goes through f_objective only; no branch logic of the optimizers or
// region formulas is reused.

#include "d2d/model.hpp"
#include "d2d/regions.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace testsupport {

// Coefficient tuples sampled log-uniform per underlay coordinate in
// [1e-2, 1e2]; the overlay pair is derived through a sampled cell-load split
// L = lambda_c/lambda_d so the five coordinates describe one operational
// point and overlay/underlay results are comparable.
inline std::vector<d2d::HeavyLoadCoefficients> sample_tuples(
    int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<d2d::HeavyLoadCoefficients> out;
  out.reserve(n);
  const double lo = std::log(1e-2), hi = std::log(1e2);
  while (static_cast<int>(out.size()) < n) {
    d2d::HeavyLoadCoefficients c;
    c.c1_bar = std::exp(lo + (hi - lo) * u(rng));
    c.c2_bar = std::exp(lo + (hi - lo) * u(rng));
    c.c3_bar = std::exp(lo + (hi - lo) * u(rng));
    const double load_split = std::exp(std::log(0.1) + std::log(100.0) * u(rng));
    c.c1 = c.c1_bar / (1.0 + load_split);
    c.c2 = c.c2_bar + c.c3_bar / (1.0 + load_split);
    if (!(c.c2_bar > 0.0)) continue;  // filter kept for form's sake
    out.push_back(c);
  }
  return out;
}

// Geometric lattice over (0, 1]: equal relative spacing resolves optima at
// any scale p* ~ 1/c, which a uniform grid cannot.
inline std::vector<double> lattice(int n = 200, double lo = 1e-6) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) {
    g[i] = lo * std::pow(1.0 / lo, static_cast<double>(i) / (n - 1));
  }
  g.back() = 1.0;
  return g;
}

struct GridMax {
  double f = -1e300;
  double p = 1.0, q = 1.0;
};

// Admissible (p,q) set of a scheme.
inline bool scheme_fixes_p(d2d::SchemeId s) {
  return s == d2d::SchemeId::S1 || s == d2d::SchemeId::S2;
}
inline bool scheme_fixes_q(d2d::SchemeId s) {
  return s == d2d::SchemeId::S1 || s == d2d::SchemeId::S3p ||
         s == d2d::SchemeId::S3d;
}

inline int scheme_gamma(d2d::SchemeId s) {
  return d2d::scheme_selection(s) == d2d::SelectionKind::DistanceBased ? 2 : 1;
}

// Lattice search over the scheme's admissible set followed by three zoom
// rounds around the incumbent cell.  The refinement only evaluates feasible
// points, so the result is a certified lower bound on sup f that resolves
// every feature with |f| above ~1e-9.
inline GridMax grid_search(const d2d::HeavyLoadCoefficients& c,
                           d2d::SchemeId scheme, d2d::DeploymentKind dep,
                           int n = 200) {
  const int gamma = scheme_gamma(scheme);
  const auto f = [&](double p, double q) {
    return d2d::f_objective(c, dep, gamma, p, q);
  };
  const std::vector<double> grid = lattice(n);
  const bool fix_p = scheme_fixes_p(scheme), fix_q = scheme_fixes_q(scheme);

  GridMax best;
  auto consider = [&](double p, double q) {
    const double v = f(p, q);
    if (v > best.f) best = {v, p, q};
  };
  if (fix_p && fix_q) {
    consider(1.0, 1.0);
    return best;
  }
  std::vector<double> ps = fix_p ? std::vector<double>{1.0} : grid;
  std::vector<double> qs = fix_q ? std::vector<double>{1.0} : grid;
  for (double p : ps) {
    for (double q : qs) consider(p, q);
  }

  // Zoom rounds with shrinking relative half-width around the incumbent.
  const int m = (fix_p || fix_q) ? 64 : 24;
  double width = std::pow(1.0 / 1e-6, 1.0 / (n - 1));  // one lattice cell
  for (int round = 0; round < 3; ++round) {
    const GridMax incumbent = best;
    auto window = [&](double v) {
      return std::pair<double, double>{std::max(1e-9, v / width),
                                       std::min(1.0, v * width)};
    };
    auto at = [&](std::pair<double, double> w, int i) {
      return w.first + (w.second - w.first) * i / (m - 1);
    };
    if (fix_p) {
      const auto wq = window(incumbent.q);
      for (int i = 0; i < m; ++i) consider(1.0, at(wq, i));
    } else if (fix_q) {
      const auto wp = window(incumbent.p);
      for (int i = 0; i < m; ++i) consider(at(wp, i), 1.0);
    } else {
      const auto wp = window(incumbent.p);
      const auto wq = window(incumbent.q);
      for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) consider(at(wp, i), at(wq, j));
      }
    }
    width = 1.0 + 3.0 * (width - 1.0) / (m - 1);
  }
  return best;
}

// Central difference with step tuned so truncation and rounding both stay
// well under the 1e-6 stationarity budget.
inline double fd_derivative(const std::function<double(double)>& fn,
                            double x, double h = 1e-7) {
  return (fn(x + h) - fn(x - h)) / (2.0 * h);
}

}  // namespace testsupport
