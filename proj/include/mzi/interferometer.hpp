#pragma once

#include <functional>
#include <optional>
#include <variant>

#include "mzi/specfun.hpp"

// Coherent light through a balanced two-port interferometer: binary-outcome
// probability models for windowed and zero-point quadrature detection, photon
// parity, and zero/nonzero counting, with linear loss folded into the mean
// photon number and Gaussian phase diffusion applied by convolution.

namespace mzi {

struct InterferometerConfig {
    double mean_photons = 0.0;    // N, input coherent intensity
    double diffusion_rate = 0.0;  // gamma, variance/2 of the collective phase kick
    double transmission = 1.0;    // T, per-photon survival probability

    void validate() const;
    double effective_photons() const { return mean_photons * transmission; }
    double amplitude() const { return std::sqrt(effective_photons()); }
    // width growth of the central fringe under diffusion
    double broadening() const { return std::sqrt(1.0 + 2.0 * effective_photons() * diffusion_rate); }
    // same, for the zero/nonzero counting fringe (half the exponent curvature)
    double broadening_zn() const { return std::sqrt(1.0 + effective_photons() * diffusion_rate); }
};

struct HomodyneWindow { double p0 = 0.5; };  // accept |p| <= p0 on the dark port
struct HomodyneZero {};                      // zero-point quadrature density
struct Parity {};                            // photon-number parity, dark port
struct ZeroNonzero {};                       // vacuum vs any photons, dark port

using DetectionScheme = std::variant<HomodyneWindow, HomodyneZero, Parity, ZeroNonzero>;

/// Binary-outcome description of one detection scheme: P(+|phi) and its
/// complement (evaluated in a cancellation-free form), the analytic phase
/// derivative of P(+|phi), and the two outcome labels.
struct BinaryModel {
    std::function<double(double)> p_plus;
    std::function<double(double)> p_minus;
    std::function<double(double)> dp_plus;  // may be empty; callers then difference
    double mu_plus = 1.0;
    double mu_minus = 0.0;
    bool is_density = false;   // p_plus is a probability density value, not a mass
    double upper_bound = 1.0;  // sup of p_plus over phi
    // Finite Fisher information limit at phi -> 0 where the point estimate
    // P in {0,1} makes the direct quotient 0/0 (noiseless parity / zero-count).
    std::optional<double> origin_fisher_limit;

    double signal(double phi) const {
        return mu_plus * p_plus(phi) + mu_minus * p_minus(phi);
    }
};

/// Dark-port quadrature density of Eq-of-motion output, T folded in.
double homodyne_density(const InterferometerConfig& cfg, double p, double phi);

/// Joint photocount probability P(n, m | phi) on the two ports, evaluated in
/// log space. Out-of-support (negative n or m) returns 0.
double coincidence_prob(const InterferometerConfig& cfg, int n, int m, double phi);

/// Mean photocount on the bright port.
double intensity_signal(const InterferometerConfig& cfg, double phi);

/// Noiseless (gamma ignored) binary model for the given scheme.
BinaryModel binary_model(const InterferometerConfig& cfg, const DetectionScheme& scheme);

/// P(+|phi) for Parity / ZeroNonzero by explicit summation of the joint
/// photocount law, marginalized over the bright port. Truncation tail mass
/// above the cutoff is reported through tail_defect when given, and a warning
/// is emitted if it exceeds 1e-12.
double brute_force_binary(const InterferometerConfig& cfg, const DetectionScheme& scheme,
                          double phi, double* tail_defect = nullptr);

/// Gaussian phase-diffusion convolution of a binary model using the given
/// quadrature rule (captured by value). gamma = 0 returns the input unchanged.
/// Construction cross-checks the rule against a refined one on a probe grid
/// and throws ConvergenceError if the results shift by more than 1e-9.
BinaryModel diffuse_model(const BinaryModel& model, double gamma, const QuadratureRule& rule);

/// Rewrite with loss folded into the photon number (N*T, T = 1).
InterferometerConfig apply_loss(const InterferometerConfig& cfg);

/// Quadrature order used when none is requested: MZI_QUAD_ORDER when set,
/// otherwise 64 escalating through 128 to 256 as the convergence probe asks.
/// Returns the model for cfg with diffusion applied when gamma > 0.
BinaryModel effective_model(const InterferometerConfig& cfg, const DetectionScheme& scheme,
                            int quad_order = 0);

/// Stable kind name: "homodyne-window", "homodyne-zero", "parity", "zero-nonzero".
const char* scheme_name(const DetectionScheme& scheme);

}  // namespace mzi
