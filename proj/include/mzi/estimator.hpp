#pragma once

#include <cstdint>

#include "mzi/interferometer.hpp"
#include "mzi/specfun.hpp"

namespace mzi {

// Monte Carlo check of the inversion estimator: sample binary outcomes at a
// known phase, estimate the phase from the observed click fraction, and
// compare the spread of the estimates with the error-propagation prediction.
struct ExperimentSpec {
    InterferometerConfig config;
    DetectionScheme scheme = Parity{};
    double phi_true = 0.1;
    int trials = 1000;   // shots per repeat; the estimate inverts their mean
    int repeats = 100;   // independent repeats forming the empirical spread
    std::uint64_t seed = 12345;

    // trials >= 100 and repeats >= 10 keep the normal-approximation
    // diagnostics meaningful.
    void validate() const;
};

struct EstimationReport {
    ExperimentSpec spec;
    // what was actually sampled; differs from spec.scheme for the zero-point
    // homodyne idealization, which is realized as a narrow window
    DetectionScheme sampled_scheme;
    double mean_estimate = 0;
    double empirical_std = 0;
    double predicted_std = 0;  // sensitivity(phi_true) / sqrt(trials)
    double std_ratio = 0;      // empirical / predicted
    int failures = 0;          // repeats whose fraction left the invertible range
    bool degenerate = false;   // saturated working point, outcomes deterministic
};

// Phase interval on which the click probability is monotone and inversion is
// well defined: (0, pi) for the counting schemes, (0, pi/2) for homodyne.
Bracket inversion_branch(const DetectionScheme& scheme);

// Fraction of `trials` Bernoulli draws below p_plus(phi). Deterministic for a
// given seed; the generator is seeded directly with `seed`.
double sample_click_fraction(const BinaryModel& model, double phi, int trials,
                             std::uint64_t seed);

// Solve p_plus(x) = fraction on the branch. Throws std::domain_error when the
// fraction lies outside the attainable range.
double invert_signal(const BinaryModel& model, double fraction, Bracket branch,
                     double tol = 1e-14);

// Throws ExperimentAbort when more than 20% of repeats are uninvertible and
// DegenerateModelError when the predicted sensitivity diverges at phi_true.
EstimationReport run_experiment(const ExperimentSpec& spec, int quad_order = 0);

}  // namespace mzi
