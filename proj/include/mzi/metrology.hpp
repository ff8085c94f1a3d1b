#pragma once

#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "mzi/interferometer.hpp"
#include "mzi/specfun.hpp"

namespace mzi {

// One point of a phase scan. delta_phi is the error-propagation sensitivity
// sqrt(P+ P-)/|dP+/dphi|; fisher is the binary-outcome Fisher information.
// The two are computed through independent code paths so their product can be
// used as a consistency probe.
struct ScanRow {
    double phi = 0;
    double signal = 0;
    double p_plus = 0;
    double delta_phi = 0;
    double fisher = 0;
};

// Phase sensitivity of a binary model at phi. Returns +inf at stationary
// points carrying no information; at a perfectly saturated stationary point
// falls back to the model's origin Fisher limit when one is attached.
double sensitivity(const BinaryModel& model, double phi);

// Fisher information (dP/dphi)^2 / (P+ P-). Uses the model's analytic
// derivative when present, otherwise a central difference.
double fisher_binary(const BinaryModel& model, double phi);

// Closed-form references for the continuous-readout strategies. Both are
// derived for pure loss only and reject nonzero diffusion.
double fisher_homodyne_full(const InterferometerConfig& cfg, double phi);
double fisher_intensity(const InterferometerConfig& cfg, double phi);

std::vector<ScanRow> scan(const InterferometerConfig& cfg, const DetectionScheme& scheme,
                          const Eigen::ArrayXd& grid, int quad_order = 0);

// Full width at half maximum of the interference signal around phi = 0,
// measured between the peak and the signal floor on [0, pi]. Throws
// NoCrossingError when the peak is not resolvable.
double fwhm(const BinaryModel& model);
double fwhm(const InterferometerConfig& cfg, const DetectionScheme& scheme, int quad_order = 0);

// Gaussian-approximation width. NaN for the windowed scheme, which has no
// simple closed form.
double fwhm_analytic(const InterferometerConfig& cfg, const DetectionScheme& scheme);

struct OptimumReport {
    double phi_min = 0;
    double delta_phi_min = 0;
    double analytic_phi_min = std::numeric_limits<double>::quiet_NaN();
    double analytic_delta_phi_min = std::numeric_limits<double>::quiet_NaN();
    double series_delta_phi_min = std::numeric_limits<double>::quiet_NaN();
    double shot_noise = 0;
};

// Numerically minimized sensitivity over the search interval, with the
// closed-form (Lambert W) optimum and its small-dephasing expansion where the
// scheme admits one. Default search: [0, 1] without diffusion (the optimum of
// the dark-fringe counting schemes sits on the boundary), [1e-4, 1] with it.
OptimumReport best_sensitivity(const InterferometerConfig& cfg, const DetectionScheme& scheme,
                               std::optional<Bracket> search = std::nullopt, int quad_order = 0);

// max |delta_phi * sqrt(F) - 1| over the grid, skipping uninformative points.
double crb_saturation_defect(const InterferometerConfig& cfg, const DetectionScheme& scheme,
                             const Eigen::ArrayXd& grid, int quad_order = 0);

}  // namespace mzi
