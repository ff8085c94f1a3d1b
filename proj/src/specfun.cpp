#include "mzi/specfun.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <numbers>

namespace mzi {

namespace {

constexpr double kInvSqrtPi = 0.5641895835477563;  // 1/sqrt(pi)

// Confluent-hypergeometric series, all terms positive so there is no
// alternating cancellation: erf(x) = 2x e^{-x^2}/sqrt(pi) * sum (2x^2)^n/(2n+1)!!
double erf_series(double x) {
    const double x2 = x * x;
    double term = 1.0;
    double sum = 1.0;
    for (int n = 1; n < 200; ++n) {
        term *= 2.0 * x2 / (2.0 * n + 1.0);
        sum += term;
        if (term < 1e-18 * sum) break;
    }
    return 2.0 * kInvSqrtPi * x * std::exp(-x2) * sum;
}

// Modified Lentz continued fraction for Gamma(1/2, x^2)/sqrt(pi), x >= 2.5.
double erfc_cf(double x) {
    constexpr double kFpMin = std::numeric_limits<double>::min() / 1e-30;
    const double a = 0.5;
    const double x2 = x * x;
    double b = x2 + 1.0 - a;
    double c = 1.0 / kFpMin;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 200; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < kFpMin) d = kFpMin;
        c = b + an / c;
        if (std::abs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-17) break;
    }
    return kInvSqrtPi * x * std::exp(-x2) * h;
}

double erfc_positive(double x) {
    if (x < 2.5) return 1.0 - erf_series(x);
    if (x > 27.3) return 0.0;  // below the smallest normal double
    return erfc_cf(x);
}

}  // namespace

double erf(double x) {
    const double ax = std::abs(x);
    double r;
    if (ax < 2.5)
        r = erf_series(ax);
    else if (ax < 6.0)
        r = 1.0 - erfc_cf(ax);
    else
        r = 1.0;
    return std::copysign(r, x);
}

double erfc(double x) {
    if (x < 0.0) return 2.0 - erfc_positive(-x);
    return erfc_positive(x);
}

double lambert_w0(double z) {
    const double e = std::exp(1.0);
    double s = e * z + 1.0;  // distance from the branch point, scaled
    if (s < 0.0) {
        if (s < -1e-12) throw std::domain_error("lambert_w0: z below branch point -1/e");
        s = 0.0;
    }
    const double p = std::sqrt(2.0 * s);
    double w;
    if (z < -0.25) {
        // branch-point series in p = sqrt(2(ez+1))
        w = -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0 - p * 43.0 / 540.0)));
    } else if (z < 1.0) {
        w = z * (1.0 + z * (-1.0 + z * 1.5));  // Taylor about 0
    } else if (z < 4.0) {
        // the asymptotic seed degenerates as log(z) -> 0; anything mildly
        // positive converges here, the logarithm keeps it within ~0.5
        w = 0.5 * std::log1p(z);
    } else {
        const double l1 = std::log(z);
        const double l2 = std::log(l1);
        w = l1 - l2 + l2 / l1;
    }
    const double tol = 1e-15 * std::max(1.0, std::abs(z));
    for (int it = 0; it < 40; ++it) {
        const double ew = std::exp(w);
        const double f = w * ew - z;
        if (std::abs(f) <= tol) break;
        const double wp1 = w + 1.0;
        if (std::abs(wp1) < 1e-8) {
            // too close to the branch point for Halley; the series value stands
            break;
        }
        const double denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        w -= f / denom;
        if (w < -1.0) w = -1.0 + 1e-7;  // overshot the branch point; step back inside
    }
    const double resid = std::abs(w * std::exp(w) - z);
    if (resid > 1e-13 * std::max(1.0, std::abs(z)))
        throw ConvergenceError("lambert_w0: residual did not converge");
    return w;
}

namespace {

// Orthonormal Hermite recurrence; returns the polynomial of the given order
// and its derivative at x.
void hermite_eval(int order, double x, double& pn, double& dpn) {
    constexpr double kPiQuarter = 0.7511255444649425;  // pi^{-1/4}
    double pprev = 0.0;
    double p = kPiQuarter;
    for (int j = 0; j < order; ++j) {
        const double pnew =
            x * std::sqrt(2.0 / (j + 1.0)) * p - std::sqrt(j / (j + 1.0)) * pprev;
        pprev = p;
        p = pnew;
    }
    pn = p;
    dpn = std::sqrt(2.0 * order) * pprev;
}

}  // namespace

QuadratureRule gauss_hermite(int order) {
    if (order < 2 || order > 256)
        throw std::invalid_argument("gauss_hermite: order must be in [2, 256]");

    // Golub-Welsch: eigenvalues of the Jacobi matrix seed the nodes.
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(order);
    Eigen::VectorXd sub(order - 1);
    for (int k = 1; k < order; ++k) sub[k - 1] = std::sqrt(k / 2.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);

    QuadratureRule rule;
    rule.order = order;
    rule.nodes.resize(order);
    rule.weights.resize(order);

    const int half = order / 2;
    for (int i = 0; i < half + (order % 2); ++i) {
        double x = es.eigenvalues()[order - 1 - i];  // largest first
        double pn, dpn;
        if (order % 2 == 1 && i == half) {
            x = 0.0;  // center node is exact by symmetry
            hermite_eval(order, x, pn, dpn);
        } else {
            for (int it = 0; it < 16; ++it) {
                hermite_eval(order, x, pn, dpn);
                const double dx = pn / dpn;
                x -= dx;
                if (std::abs(dx) <= 1e-15 * (1.0 + std::abs(x))) break;
            }
            hermite_eval(order, x, pn, dpn);
        }
        const double w = 2.0 / (dpn * dpn);
        rule.nodes[order - 1 - i] = x;
        rule.nodes[i] = -x;
        rule.weights[order - 1 - i] = w;
        rule.weights[i] = w;
    }

    for (int i = 1; i < order; ++i)
        if (!(rule.nodes[i] > rule.nodes[i - 1]))
            throw ConvergenceError("gauss_hermite: nodes failed to separate");
    const double wsum = rule.weights.sum();
    if (std::abs(wsum - std::sqrt(std::numbers::pi)) > 1e-12)
        throw ConvergenceError("gauss_hermite: weight normalization drifted");
    return rule;
}

ScalarMinimum minimize_scalar(const std::function<double(double)>& f, Bracket bracket,
                              double tol, int max_iter) {
    if (!(bracket.lo < bracket.hi))
        throw std::invalid_argument("minimize_scalar: requires lo < hi");
    constexpr double kGold = 0.3819660112501051;
    double a = bracket.lo, b = bracket.hi;
    double x = a + kGold * (b - a);
    double w = x, v = x;
    double fx = f(x), fw = fx, fv = fx;
    double d = 0.0, e = 0.0;

    for (int it = 0; it < max_iter; ++it) {
        const double xm = 0.5 * (a + b);
        const double tol1 = tol + 4.0 * std::numeric_limits<double>::epsilon() * std::abs(x);
        const double tol2 = 2.0 * tol1;
        if (std::abs(x - xm) <= tol2 - 0.5 * (b - a)) return {x, fx};

        bool parabolic = false;
        if (std::abs(e) > tol1) {
            const double r = (x - w) * (fx - fv);
            double q = (x - v) * (fx - fw);
            double p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if (q > 0.0) p = -p;
            q = std::abs(q);
            const double etemp = e;
            e = d;
            if (std::abs(p) < std::abs(0.5 * q * etemp) && p > q * (a - x) && p < q * (b - x)) {
                parabolic = true;
                d = p / q;
                const double u = x + d;
                if (u - a < tol2 || b - u < tol2) d = std::copysign(tol1, xm - x);
            }
        }
        if (!parabolic) {
            e = (x >= xm) ? a - x : b - x;
            d = kGold * e;
        }
        const double u = (std::abs(d) >= tol1) ? x + d : x + std::copysign(tol1, d);
        const double fu = f(u);
        if (fu <= fx) {
            if (u >= x) a = x; else b = x;
            v = w; w = x; x = u;
            fv = fw; fw = fx; fx = fu;
        } else {
            if (u < x) a = u; else b = u;
            if (fu <= fw || w == x) {
                v = w; w = u; fv = fw; fw = fu;
            } else if (fu <= fv || v == x || v == w) {
                v = u; fv = fu;
            }
        }
    }
    throw ConvergenceError("minimize_scalar: iteration budget exhausted");
}

double invert_monotone(const std::function<double(double)>& f, double target, Bracket bracket,
                       double tol, int max_iter) {
    if (!(bracket.lo < bracket.hi))
        throw std::invalid_argument("invert_monotone: requires lo < hi");
    double a = bracket.lo, b = bracket.hi;
    double fa = f(a) - target;
    double fb = f(b) - target;
    if (std::abs(fa) <= tol) return a;
    if (std::abs(fb) <= tol) return b;
    if (fa * fb > 0.0) throw std::domain_error("invert_monotone: target outside bracketed range");

    double x = a, fx = fa;
    for (int it = 0; it < max_iter; ++it) {
        // secant candidate, safeguarded by bisection
        double m = 0.5 * (a + b);
        if (std::abs(fb - fa) > 0.0) {
            const double s = b - fb * (b - a) / (fb - fa);
            const double lo = std::min(a, b), hi = std::max(a, b);
            if (s > lo + 0.01 * (hi - lo) && s < hi - 0.01 * (hi - lo)) m = s;
        }
        x = m;
        fx = f(x) - target;
        if (std::abs(fx) <= tol) return x;
        if (fa * fx <= 0.0) {
            b = x; fb = fx;
        } else {
            a = x; fa = fx;
        }
        if (std::abs(b - a) <= 4.0 * std::numeric_limits<double>::epsilon() *
                                   std::max({1.0, std::abs(a), std::abs(b)}))
            break;
    }
    if (std::abs(fx) <= tol) return x;
    throw ConvergenceError("invert_monotone: residual tolerance not reached");
}

Eigen::ArrayXd linspace(double a, double b, int n) {
    if (n < 1) throw std::invalid_argument("linspace: need at least one point");
    Eigen::ArrayXd out(n);
    if (n == 1) {
        out[0] = a;
        return out;
    }
    for (int i = 0; i < n; ++i) out[i] = a + (i * (b - a)) / (n - 1);
    out[n - 1] = b;
    return out;
}

Eigen::ArrayXd geomspace(double a, double b, int n) {
    if (!(a > 0.0) || !(b > 0.0))
        throw std::invalid_argument("geomspace: endpoints must be positive");
    Eigen::ArrayXd out = linspace(std::log(a), std::log(b), n).exp();
    out[0] = a;
    if (n > 1) out[n - 1] = b;
    return out;
}

}  // namespace mzi
