#include "mzi/metrology.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "mzi/errors.hpp"

namespace mzi {

namespace {

// Below this slope a point is treated as stationary. The probability factor
// decides between "saturated at the fringe origin" (finite information limit)
// and "flat fringe" (no information).
constexpr double kStationaryDp = 1e-12;
constexpr double kSaturated = 1e-8;

double dp_of(const BinaryModel& m, double phi) {
    if (m.dp_plus) return m.dp_plus(phi);
    const double h = 1e-6;
    return (m.p_plus(phi + h) - m.p_plus(phi - h)) / (2.0 * h);
}

}  // namespace

double sensitivity(const BinaryModel& m, double phi) {
    const double pp = m.p_plus(phi);
    const double pm = m.p_minus(phi);
    const double num = std::sqrt(std::max(0.0, pp * pm));
    const double dp = dp_of(m, phi);
    if (std::abs(dp) < kStationaryDp) {
        if (num < kSaturated && m.origin_fisher_limit && *m.origin_fisher_limit > 0.0)
            return 1.0 / std::sqrt(*m.origin_fisher_limit);
        return std::numeric_limits<double>::infinity();
    }
    return num / std::abs(dp);
}

double fisher_binary(const BinaryModel& m, double phi) {
    const double pp = m.p_plus(phi);
    const double pm = m.p_minus(phi);
    const double denom = pp * pm;
    const double dp = dp_of(m, phi);
    if (std::abs(dp) < kStationaryDp) {
        if (denom < kSaturated * kSaturated && m.origin_fisher_limit &&
            *m.origin_fisher_limit > 0.0)
            return *m.origin_fisher_limit;
        return 0.0;
    }
    if (!(denom > 0.0))
        throw DegenerateModelError("fisher_binary: saturated probability with nonzero slope");
    return dp * dp / denom;
}

double fisher_homodyne_full(const InterferometerConfig& cfg, double phi) {
    cfg.validate();
    if (cfg.diffusion_rate != 0.0)
        throw std::domain_error("fisher_homodyne_full: closed form holds only without dephasing");
    const double c = std::cos(phi);
    return cfg.effective_photons() * c * c;
}

double fisher_intensity(const InterferometerConfig& cfg, double phi) {
    cfg.validate();
    if (cfg.diffusion_rate != 0.0)
        throw std::domain_error("fisher_intensity: closed form holds only without dephasing");
    const double s = std::sin(0.5 * phi);
    return cfg.effective_photons() * s * s;
}

std::vector<ScanRow> scan(const InterferometerConfig& cfg, const DetectionScheme& scheme,
                          const Eigen::ArrayXd& grid, int quad_order) {
    cfg.validate();
    const BinaryModel m = effective_model(cfg, scheme, quad_order);
    std::vector<ScanRow> rows;
    rows.reserve(static_cast<std::size_t>(grid.size()));
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
        const double phi = grid[i];
        rows.push_back({phi, m.signal(phi), m.p_plus(phi), sensitivity(m, phi),
                        fisher_binary(m, phi)});
    }
    return rows;
}

double fwhm(const BinaryModel& m) {
    const double peak = m.signal(0.0);
    const int n = 1025;
    const Eigen::ArrayXd grid = linspace(0.0, std::numbers::pi, n);
    Eigen::ArrayXd vals(n);
    int imin = 0;
    for (int i = 0; i < n; ++i) {
        vals[i] = m.signal(grid[i]);
        if (vals[i] < vals[imin]) imin = i;
    }
    double baseline = vals[imin];
    if (imin > 0 && imin < n - 1) {
        const ScalarMinimum refined = minimize_scalar(
            [&m](double x) { return m.signal(x); }, {grid[imin - 1], grid[imin + 1]});
        baseline = std::min(baseline, refined.value);
    }
    const double scale = std::max({1.0, std::abs(peak), std::abs(baseline)});
    if (!(peak - baseline > 1e-9 * scale))
        throw NoCrossingError("fwhm: signal peak is not resolvable above its floor");
    const double level = baseline + 0.5 * (peak - baseline);

    int j = 1;
    while (j <= imin && vals[j] > level) ++j;
    if (j > imin) throw NoCrossingError("fwhm: no half-level crossing before the signal floor");
    const double half = invert_monotone([&m](double x) { return m.signal(x); }, level,
                                        {grid[j - 1], grid[j]}, 1e-12 * scale);
    return 2.0 * half;
}

double fwhm(const InterferometerConfig& cfg, const DetectionScheme& scheme, int quad_order) {
    cfg.validate();
    return fwhm(effective_model(cfg, scheme, quad_order));
}

double fwhm_analytic(const InterferometerConfig& cfg, const DetectionScheme& scheme) {
    cfg.validate();
    const double neff = cfg.effective_photons();
    if (!(neff > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    const double ln2 = std::numbers::ln2;
    if (std::get_if<Parity>(&scheme) || std::get_if<HomodyneZero>(&scheme))
        return 2.0 * cfg.broadening() * std::sqrt(2.0 * ln2 / neff);
    if (std::get_if<ZeroNonzero>(&scheme))
        return 4.0 * cfg.broadening_zn() * std::sqrt(ln2 / neff);
    return std::numeric_limits<double>::quiet_NaN();
}

OptimumReport best_sensitivity(const InterferometerConfig& cfg, const DetectionScheme& scheme,
                               std::optional<Bracket> search, int quad_order) {
    cfg.validate();
    const double neff = cfg.effective_photons();
    if (!(neff > 0.0))
        throw DegenerateModelError("best_sensitivity: zero effective photon number");
    const BinaryModel m = effective_model(cfg, scheme, quad_order);
    const Bracket b =
        search.value_or(cfg.diffusion_rate > 0.0 ? Bracket{1e-4, 1.0} : Bracket{0.0, 1.0});
    if (!(b.lo < b.hi)) throw std::invalid_argument("best_sensitivity: requires lo < hi");

    const auto g = [&m](double phi) { return sensitivity(m, phi); };

    // coarse presearch, then a local refine; the boundary can win outright
    // (without dephasing the counting schemes are best at the fringe origin)
    const int n = 129;
    const Eigen::ArrayXd grid = linspace(b.lo, b.hi, n);
    Eigen::ArrayXd vals(n);
    int imin = 0;
    for (int i = 0; i < n; ++i) {
        vals[i] = g(grid[i]);
        if (vals[i] < vals[imin]) imin = i;
    }
    if (!std::isfinite(vals[imin]))
        throw DegenerateModelError("best_sensitivity: no informative phase in the search interval");

    const ScalarMinimum local = minimize_scalar(
        g, {grid[std::max(imin - 1, 0)], grid[std::min(imin + 1, n - 1)]}, 1e-10);
    double x = local.x, v = local.value;
    if (vals[n - 1] < v) {
        x = b.hi;
        v = vals[n - 1];
    }
    // Ties go to the lower edge; the slack absorbs rounding noise from the
    // interior polish so an optimum sitting exactly on the edge is reported there.
    if (vals[0] <= v * (1.0 + 4e-15)) {
        x = b.lo;
        v = vals[0];
    }

    OptimumReport rep;
    rep.phi_min = x;
    rep.delta_phi_min = v;
    rep.shot_noise = 1.0 / std::sqrt(neff);

    const double gamma = cfg.diffusion_rate;
    const double ng = neff * gamma;
    const double d2 = 1.0 + 2.0 * ng;  // squared fringe broadening
    const double d = std::sqrt(d2);
    const double d0 = std::sqrt(1.0 + ng);
    const double sqn = std::sqrt(neff);
    if (std::get_if<Parity>(&scheme)) {
        const double w = lambert_w0(-std::exp(-1.0) / d2);
        rep.analytic_delta_phi_min = d2 / sqn * std::exp(0.5 * (1.0 + w));
        rep.analytic_phi_min = d * std::sqrt(std::max(0.0, 1.0 + w) / neff);
        rep.series_delta_phi_min = (1.0 + std::sqrt(ng) + 11.0 * ng / 6.0) / sqn;
    } else if (std::get_if<ZeroNonzero>(&scheme)) {
        const double w = lambert_w0(-std::exp(-1.0) / d0);
        rep.analytic_delta_phi_min = d0 / std::sqrt(-neff * w);
        rep.analytic_phi_min = 2.0 * d0 * std::sqrt(std::max(0.0, 1.0 + w) / neff);
        rep.series_delta_phi_min = (1.0 + 0.5 * std::sqrt(ng) + 17.0 * ng / 24.0) / sqn;
    } else if (std::get_if<HomodyneZero>(&scheme)) {
        const double root = std::sqrt(std::numbers::e * std::numbers::pi / 2.0);
        rep.analytic_delta_phi_min = d * std::sqrt(d * root - 1.0) / sqn;
        rep.analytic_phi_min = d / sqn;
        const double eta2 = root - 1.0;
        rep.series_delta_phi_min =
            std::sqrt(eta2) / sqn * (1.0 + (3.0 * eta2 + 1.0) / (2.0 * eta2) * ng);
    }
    return rep;
}

double crb_saturation_defect(const InterferometerConfig& cfg, const DetectionScheme& scheme,
                             const Eigen::ArrayXd& grid, int quad_order) {
    cfg.validate();
    const BinaryModel m = effective_model(cfg, scheme, quad_order);
    double worst = 0.0;
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
        const double d = sensitivity(m, grid[i]);
        const double f = fisher_binary(m, grid[i]);
        if (!std::isfinite(d) || !(f > 0.0)) continue;
        worst = std::max(worst, std::abs(d * std::sqrt(f) - 1.0));
    }
    return worst;
}

}  // namespace mzi
