#pragma once

#include <Eigen/Core>
#include <functional>

#include "mzi/errors.hpp"

// Self-contained numeric primitives: error function, Lambert W, Gauss-Hermite
// rules, and bracketed 1D minimization / root finding. Everything is plain
// double precision and thread-safe (no hidden state).

namespace mzi {

/// Error function, |err| <= 1e-14 absolute, odd by construction.
double erf(double x);

/// Complementary error function with full relative accuracy in the tail.
double erfc(double x);

/// Principal branch W0 of w * exp(w) = z for z >= -1/e.
/// Residual |w exp(w) - z| <= 1e-13 * max(1, |z|).
/// Throws std::domain_error below the branch point.
double lambert_w0(double z);

/// Nodes and weights for integrals of the form  integral f(t) exp(-t^2) dt.
/// Nodes are symmetric about 0 and strictly increasing; weights are positive
/// and sum to sqrt(pi).
struct QuadratureRule {
    Eigen::ArrayXd nodes;
    Eigen::ArrayXd weights;
    int order = 0;
};

/// Gauss-Hermite rule of the given order (2..256). Nodes are seeded from the
/// symmetric tridiagonal Jacobi matrix (Golub-Welsch) and polished by Newton
/// steps on the orthonormal recurrence.
QuadratureRule gauss_hermite(int order);

/// Closed search interval, lo < hi.
struct Bracket {
    double lo;
    double hi;
};

struct ScalarMinimum {
    double x;
    double value;
};

/// Brent-style minimization of f on [bracket.lo, bracket.hi] to absolute
/// x-tolerance tol. Throws ConvergenceError past the iteration budget.
ScalarMinimum minimize_scalar(const std::function<double(double)>& f, Bracket bracket,
                              double tol = 1e-10, int max_iter = 200);

/// Solve f(x) = target for monotone f with f(bracket.lo), f(bracket.hi)
/// straddling the target; stops when |f(x) - target| <= tol. Throws
/// std::domain_error when the target is outside the bracketed range.
double invert_monotone(const std::function<double(double)>& f, double target, Bracket bracket,
                       double tol = 1e-10, int max_iter = 200);

/// n evenly spaced points from a to b inclusive.
Eigen::ArrayXd linspace(double a, double b, int n);

/// n log-spaced points from a to b inclusive (a, b > 0).
Eigen::ArrayXd geomspace(double a, double b, int n);

}  // namespace mzi
