#include "d2d/numerics.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace d2d {

double kappa(double alpha) {
  if (!(alpha > 2.0)) {
    throw std::domain_error("kappa: path loss exponent must satisfy alpha > 2");
  }
  const double x = 2.0 * std::numbers::pi / alpha;  // in (0, pi) for alpha > 2
  return x / std::sin(x);
}

double rho(double theta, double alpha) {
  if (!(alpha > 2.0)) {
    throw std::domain_error("rho: path loss exponent must satisfy alpha > 2");
  }
  if (!(theta > 0.0) || !std::isfinite(theta)) {
    throw std::domain_error("rho: SIR threshold must be positive and finite");
  }

  const double s = alpha / 2.0;           // integrand decay exponent, > 1
  const double lower = std::pow(theta, -2.0 / alpha);
  const double split = std::max(1.0, lower);

  boost::math::quadrature::tanh_sinh<double> integ;
  constexpr double kTargetAbs = 1e-10;

  double head = 0.0, head_err = 0.0;
  if (lower < split) {
    head = integ.integrate(
        [s](double u) { return 1.0 / (1.0 + std::pow(u, s)); }, lower, split,
        1e-12, &head_err);
    head_err *= std::abs(head);  // tanh_sinh reports relative error
  }

  // Tail [split, inf) under u = 1/v: integral_0^{1/split} v^(s-2)/(1+v^s) dv.
  // The v -> 0 endpoint is integrable for every alpha > 2 and tanh_sinh
  // handles the singular endpoint directly.
  double tail_err = 0.0;
  const double tail = integ.integrate(
      [s](double v) { return std::pow(v, s - 2.0) / (1.0 + std::pow(v, s)); },
      0.0, 1.0 / split, 1e-12, &tail_err);
  tail_err *= std::abs(tail);

  const double weight = std::pow(theta, 2.0 / alpha);
  const double achieved = weight * (head_err + tail_err);
  if (!(achieved < kTargetAbs * std::max(1.0, weight * (head + tail)))) {
    std::ostringstream msg;
    msg << "rho: quadrature did not converge (achieved error estimate "
        << achieved << ", target " << kTargetAbs << ")";
    throw std::runtime_error(msg.str());
  }
  return weight * (head + tail);
}

double prob_cell_nonempty(double load_ratio) {
  if (!(load_ratio >= 0.0)) {
    throw std::domain_error("prob_cell_nonempty: load ratio must be >= 0");
  }
  return 1.0 - std::pow(1.0 + load_ratio / 3.5, -3.5);
}

double solve_monotone(const std::function<double(double)>& fn, Bracket br) {
  if (!(br.lo < br.hi) || !(br.tol > 0.0)) {
    throw std::invalid_argument("solve_monotone: need lo < hi and tol > 0");
  }
  double lo = br.lo, hi = br.hi;
  double flo = fn(lo), fhi = fn(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (flo * fhi > 0.0) {
    throw std::runtime_error("solve_monotone: no sign change on bracket");
  }
  constexpr int kMaxIter = 200;
  for (int i = 0; i < kMaxIter; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= br.tol || mid == lo || mid == hi) return mid;
    const double fmid = fn(mid);
    if (fmid == 0.0) return mid;
    if (flo * fmid < 0.0) {
      hi = mid;
    } else {
      lo = mid;
      flo = fmid;
    }
  }
  if (hi - lo <= br.tol * 16) return 0.5 * (lo + hi);
  throw std::runtime_error("solve_monotone: iteration cap reached before tol");
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

}  // namespace d2d
