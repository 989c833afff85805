#pragma once

#include <functional>

// Numerical substrate shared by the analytic model: the interference shape
// factor kappa, the coverage integral rho, the cell-occupancy probability,
// and bracketed root finding on monotone functions.

namespace d2d {

// (2*pi/alpha) / sin(2*pi/alpha).  Finite and > 1 for every alpha > 2,
// diverging as alpha -> 2+.  Throws std::domain_error for alpha <= 2.
double kappa(double alpha);

// theta^(2/alpha) * integral_{theta^(-2/alpha)}^inf du / (1 + u^(alpha/2)).
// Adaptive quadrature with absolute tolerance 1e-10; the tail is mapped to a
// finite interval with u = 1/v instead of being truncated.  Monotone
// nondecreasing in theta, -> 0 as theta -> 0.  Throws std::domain_error on
// invalid arguments, std::runtime_error (with the achieved error estimate)
// if the tolerance cannot be met.
double rho(double theta, double alpha);

// 1 - (1 + load_ratio/3.5)^(-3.5), the probability that a randomly chosen
// cell contains at least one cellular receiver when the mean number of
// receivers per cell is load_ratio.  In [0, 1), monotone in load_ratio.
double prob_cell_nonempty(double load_ratio);

struct Bracket {
  double lo = 0.0;
  double hi = 1.0;
  double tol = 1e-12;  // absolute tolerance on x
};

// Bisection root of a continuous, strictly monotone fn on [lo, hi].
// Requires fn(lo) * fn(hi) <= 0; unconditionally convergent on such a
// bracket and deterministic for fixed inputs.  Throws std::invalid_argument
// on a malformed bracket and std::runtime_error if there is no sign change
// or the iteration cap is hit before reaching tol.
double solve_monotone(const std::function<double(double)>& fn, Bracket br);

// dB <-> linear power ratio.  Conversion happens once, at the CLI boundary;
// every internal quantity is linear.
double db_to_linear(double db);
double linear_to_db(double lin);

}  // namespace d2d
