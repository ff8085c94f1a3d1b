#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mzi/errors.hpp"
#include "mzi/metrology.hpp"

using namespace mzi;

namespace {

double simpson(const std::function<double(double)>& f, double a, double b, int n) {
    const double h = (b - a) / n;
    double acc = f(a) + f(b);
    for (int i = 1; i < n; ++i) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return acc * h / 3.0;
}

}  // namespace

TEST_CASE("fringe origin of the noiseless counting schemes is regular") {
    const InterferometerConfig cfg{200.0, 0.0, 1.0};
    const BinaryModel parity = binary_model(cfg, Parity{});
    CHECK(sensitivity(parity, 0.0) == 1.0 / std::sqrt(200.0));
    CHECK(fisher_binary(parity, 0.0) == 200.0);

    const BinaryModel zn = binary_model(cfg, ZeroNonzero{});
    CHECK(sensitivity(zn, 0.0) == 1.0 / std::sqrt(200.0));
    CHECK(fisher_binary(zn, 0.0) == 200.0);
}

TEST_CASE("sensitivity and Fisher match independently derived closed forms") {
    const double n = 200.0;
    const InterferometerConfig cfg{n, 0.0, 1.0};
    const BinaryModel parity = binary_model(cfg, Parity{});
    const BinaryModel zn = binary_model(cfg, ZeroNonzero{});
    const BinaryModel hz = binary_model(cfg, HomodyneZero{});

    // stay on the live part of the fringe: past ~0.6 the N=200 slope drops
    // below the stationary-point cutoff and the sensitivity is reported as inf
    for (double phi : {0.1, 0.3, 0.5}) {
        const double s2 = std::pow(std::sin(0.5 * phi), 2);
        const double sin2 = std::pow(std::sin(phi), 2);

        const double f_parity = n * n * sin2 / std::expm1(4.0 * n * s2);
        CHECK(fisher_binary(parity, phi) == doctest::Approx(f_parity).epsilon(1e-12));
        CHECK(sensitivity(parity, phi) ==
              doctest::Approx(1.0 / std::sqrt(f_parity)).epsilon(1e-12));

        const double f_zn = n * n * sin2 / (4.0 * std::expm1(n * s2));
        CHECK(fisher_binary(zn, phi) == doctest::Approx(f_zn).epsilon(1e-12));

        const double d_hz = 2.0 / (n * std::abs(std::sin(2.0 * phi))) *
                            std::sqrt(std::sqrt(std::numbers::pi / 2.0) *
                                          std::exp(0.5 * n * sin2) -
                                      1.0);
        CHECK(sensitivity(hz, phi) == doctest::Approx(d_hz).epsilon(1e-12));
    }
}

TEST_CASE("sensitivity handles stationary and saturated points") {
    // diffused fringe: flat top at the center, no finite-information fallback
    const InterferometerConfig cfg{200.0, 1e-4, 1.0};
    const BinaryModel m = effective_model(cfg, Parity{});
    CHECK(std::isinf(sensitivity(m, 0.0)));
    CHECK(fisher_binary(m, 0.0) == 0.0);

    // saturated probability with a live slope is a modeling contradiction
    BinaryModel broken;
    broken.p_plus = [](double) { return 1.0; };
    broken.p_minus = [](double) { return 0.0; };
    broken.dp_plus = [](double) { return 0.5; };
    CHECK_THROWS_AS(fisher_binary(broken, 0.1), DegenerateModelError);

    // without an analytic derivative the central-difference fallback engages
    const InterferometerConfig clean{200.0, 0.0, 1.0};
    BinaryModel nodpp = binary_model(clean, Parity{});
    const double analytic = sensitivity(nodpp, 0.3);
    nodpp.dp_plus = nullptr;
    CHECK(sensitivity(nodpp, 0.3) == doctest::Approx(analytic).epsilon(1e-6));
}

TEST_CASE("continuous-readout information references") {
    const InterferometerConfig cfg{50.0, 0.0, 1.0};
    const double phi = 0.7;
    CHECK(fisher_homodyne_full(cfg, phi) ==
          doctest::Approx(50.0 * std::pow(std::cos(phi), 2)).epsilon(1e-15));
    CHECK(fisher_intensity(cfg, phi) ==
          doctest::Approx(50.0 * std::pow(std::sin(0.5 * phi), 2)).epsilon(1e-15));

    // Simpson evaluation of the quadrature-readout information integral
    // integral (d rho / d phi)^2 / rho dp over the dark-port density
    const double c = 0.5 * std::sqrt(50.0) * std::sin(phi);
    const double dc = 0.5 * std::sqrt(50.0) * std::cos(phi);
    const double integral = simpson(
        [&](double p) {
            const double rho = homodyne_density(cfg, p, phi);
            const double drho = -4.0 * (p + c) * dc * rho;
            return drho * drho / rho;
        },
        -14.0, 14.0, 40000);
    CHECK(std::abs(integral / fisher_homodyne_full(cfg, phi) - 1.0) < 1e-8);

    const InterferometerConfig diffusing{50.0, 1e-4, 1.0};
    CHECK_THROWS_AS(fisher_homodyne_full(diffusing, 0.3), std::domain_error);
    CHECK_THROWS_AS(fisher_intensity(diffusing, 0.3), std::domain_error);
}

TEST_CASE("phase scan rows are self-consistent") {
    const InterferometerConfig cfg{200.0, 0.0, 1.0};
    const Eigen::ArrayXd grid = linspace(-0.8, 0.8, 401);
    const std::vector<ScanRow> rows = scan(cfg, Parity{}, grid);
    REQUIRE(rows.size() == 401);

    const ScanRow& center = rows[200];
    CHECK(center.phi == 0.0);
    CHECK(center.signal == 1.0);
    CHECK(center.delta_phi == 1.0 / std::sqrt(200.0));
    CHECK(center.fisher == 200.0);

    const BinaryModel m = binary_model(cfg, Parity{});
    std::size_t best = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].phi == grid[static_cast<Eigen::Index>(i)]);
        CHECK(rows[i].p_plus == m.p_plus(rows[i].phi));
        CHECK(rows[i].signal == doctest::Approx(2.0 * rows[i].p_plus - 1.0).epsilon(1e-12));
        if (rows[i].delta_phi < rows[best].delta_phi) best = i;
    }
    CHECK(best == 200);  // the noiseless optimum sits at the fringe center

    // with diffusion the center is uninformative and the scan records that
    const std::vector<ScanRow> drows =
        scan({200.0, 1e-4, 1.0}, Parity{}, linspace(-0.1, 0.1, 3));
    CHECK(std::isinf(drows[1].delta_phi));
    CHECK(drows[1].fisher == 0.0);
}

TEST_CASE("interference peak width: frozen roots and the Gaussian approximation") {
    // reference roots from 30-digit bisection of the exact half-level condition
    const double w_parity = fwhm({200.0, 0.0, 1.0}, Parity{});
    CHECK(std::abs(w_parity / 0.1665590500106973 - 1.0) < 1e-9);

    const double w_zn = fwhm({200.0, 0.0, 1.0}, ZeroNonzero{});
    CHECK(std::abs(w_zn / 0.2356182368151497 - 1.0) < 1e-9);

    const double w_diff = fwhm({200.0, 1e-4, 1.0}, Parity{});
    CHECK(std::abs(w_diff / 0.1698617246290800 - 1.0) < 1e-6);

    // Gaussian-approximation widths track the exact roots to well under 1%
    CHECK(std::abs(w_parity / fwhm_analytic({200.0, 0.0, 1.0}, Parity{}) - 1.0) < 0.01);
    CHECK(std::abs(w_zn / fwhm_analytic({200.0, 0.0, 1.0}, ZeroNonzero{}) - 1.0) < 0.01);
    CHECK(std::abs(w_diff / fwhm_analytic({200.0, 1e-4, 1.0}, Parity{}) - 1.0) < 0.01);

    // the zero-point density shares the parity fringe's Gaussian core; the
    // exact widths then differ only at the sub-percent level
    CHECK(fwhm_analytic({200.0, 0.0, 1.0}, HomodyneZero{}) ==
          fwhm_analytic({200.0, 0.0, 1.0}, Parity{}));
    const double w_hz = fwhm({200.0, 0.0, 1.0}, HomodyneZero{});
    CHECK(w_hz > w_parity);
    CHECK(std::abs(w_hz / w_parity - 1.0) < 2e-3);

    CHECK(std::isnan(fwhm_analytic({200.0, 0.0, 1.0}, HomodyneWindow{0.5})));
    CHECK(std::isnan(fwhm_analytic({0.0, 0.0, 1.0}, Parity{})));
    CHECK_THROWS_AS(fwhm({0.0, 0.0, 1.0}, Parity{}), NoCrossingError);
}

TEST_CASE("optimal working point: noiseless counting schemes reach shot noise") {
    const InterferometerConfig cfg{200.0, 0.0, 1.0};
    for (const DetectionScheme& scheme : {DetectionScheme{Parity{}}, DetectionScheme{ZeroNonzero{}}}) {
        const OptimumReport rep = best_sensitivity(cfg, scheme);
        CHECK(rep.phi_min == 0.0);
        CHECK(rep.delta_phi_min == 1.0 / std::sqrt(200.0));
        CHECK(rep.shot_noise == 1.0 / std::sqrt(200.0));
        // Lambert optimum collapses onto shot noise (branch-point rounding only)
        CHECK(std::abs(rep.analytic_delta_phi_min / rep.shot_noise - 1.0) < 1e-7);
        CHECK(rep.analytic_phi_min < 1e-4);
        CHECK(rep.series_delta_phi_min == rep.shot_noise);
    }
}

TEST_CASE("optimal working point: zero-point quadrature reference values") {
    // frozen 30-digit minimizations of the exact sensitivity
    struct Ref { double n, phi, norm; };
    const Ref refs[] = {{50.0, 0.14332554511182606, 1.0430781890675517},
                        {200.0, 0.07254888689312115, 1.0349050264485196},
                        {1000.0, 0.03255174477103678, 1.0327167189419442}};
    for (const Ref& r : refs) {
        const OptimumReport rep = best_sensitivity({r.n, 0.0, 1.0}, HomodyneZero{});
        CHECK(std::abs(rep.phi_min - r.phi) < 1e-5);
        CHECK(std::abs(rep.delta_phi_min * std::sqrt(r.n) / r.norm - 1.0) < 1e-6);
        // the closed form is the N -> inf asymptote and always sits below
        CHECK(rep.analytic_delta_phi_min < rep.delta_phi_min);
        CHECK(std::abs(rep.analytic_delta_phi_min * std::sqrt(r.n) - 1.0327143) < 1e-3);
    }
}

TEST_CASE("optimal working point: windowed detection reference values") {
    const OptimumReport rep = best_sensitivity({200.0, 0.0, 1.0}, HomodyneWindow{0.5});
    CHECK(std::abs(rep.phi_min - 0.09670815825114657) < 1e-5);
    CHECK(std::abs(rep.delta_phi_min * std::sqrt(200.0) / 1.3721842412852223 - 1.0) < 1e-6);
    // no closed form is claimed for the window
    CHECK(std::isnan(rep.analytic_delta_phi_min));
    CHECK(std::isnan(rep.analytic_phi_min));
    CHECK(std::isnan(rep.series_delta_phi_min));
}

TEST_CASE("optimal working point under diffusion matches the convolution oracle") {
    const InterferometerConfig cfg{200.0, 1e-4, 1.0};

    const OptimumReport parity = best_sensitivity(cfg, Parity{});
    CHECK(std::abs(parity.phi_min - 0.03636493981388813) < 1e-6);
    CHECK(std::abs(parity.delta_phi_min / 0.08353678522242444 - 1.0) < 1e-9);
    CHECK(std::abs(parity.analytic_delta_phi_min / 0.08352094421063679 - 1.0) < 1e-12);
    CHECK(std::abs(parity.series_delta_phi_min / 0.08330340298300541 - 1.0) < 1e-12);
    CHECK(std::abs(parity.delta_phi_min / parity.analytic_delta_phi_min - 1.0) < 5e-3);
    CHECK(std::abs(parity.analytic_phi_min / parity.phi_min - 1.0) < 5e-3);

    const OptimumReport zn = best_sensitivity(cfg, ZeroNonzero{});
    CHECK(std::abs(zn.phi_min - 0.05220518043856356) < 1e-6);
    CHECK(std::abs(zn.delta_phi_min / 0.07677787979862875 - 1.0) < 1e-9);
    CHECK(std::abs(zn.analytic_delta_phi_min / 0.07674962253577452 - 1.0) < 1e-12);
    CHECK(std::abs(zn.delta_phi_min / zn.analytic_delta_phi_min - 1.0) < 5e-3);

    // dephasing only ever degrades the optimum, and zero/nonzero counting
    // degrades more slowly than parity
    const double base = best_sensitivity({200.0, 0.0, 1.0}, Parity{}).delta_phi_min;
    const double worse = best_sensitivity({200.0, 1e-3, 1.0}, Parity{}).delta_phi_min;
    CHECK(base < parity.delta_phi_min);
    CHECK(parity.delta_phi_min < worse);
    for (double n : {10.0, 1000.0}) {
        const double p = best_sensitivity({n, 1e-4, 1.0}, Parity{}).delta_phi_min;
        const double z = best_sensitivity({n, 1e-4, 1.0}, ZeroNonzero{}).delta_phi_min;
        CHECK(z <= p * (1.0 + 1e-9));
    }
}

TEST_CASE("optimal working point: search interval control and failure modes") {
    const InterferometerConfig cfg{200.0, 0.0, 1.0};
    const OptimumReport rep = best_sensitivity(cfg, Parity{}, Bracket{0.3, 0.6});
    CHECK(rep.phi_min == 0.3);  // objective is increasing there: boundary wins
    CHECK(rep.delta_phi_min == sensitivity(binary_model(cfg, Parity{}), 0.3));

    CHECK_THROWS_AS(best_sensitivity({0.0, 0.0, 1.0}, Parity{}), DegenerateModelError);
    CHECK_THROWS_AS(best_sensitivity({200.0, 0.0, 0.0}, Parity{}), DegenerateModelError);
    CHECK_THROWS_AS(best_sensitivity(cfg, Parity{}, Bracket{0.6, 0.3}), std::invalid_argument);
}

TEST_CASE("inverse-sensitivity and information agree across the fringe") {
    const Eigen::ArrayXd grid = linspace(0.01, 0.8, 101);
    const DetectionScheme schemes[] = {HomodyneWindow{0.5}, HomodyneZero{}, Parity{},
                                       ZeroNonzero{}};
    for (const DetectionScheme& scheme : schemes) {
        CHECK(crb_saturation_defect({200.0, 0.0, 1.0}, scheme, grid) < 1e-12);
        CHECK(crb_saturation_defect({200.0, 1e-3, 1.0}, scheme, grid) < 1e-12);
    }
}
