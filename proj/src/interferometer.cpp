#include "mzi/interferometer.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>

namespace mzi {

namespace {

constexpr double kSqrt2OverPi = 0.7978845608028654;  // sqrt(2/pi)

double half_angle_sin_sq(double phi) {
    const double s = std::sin(0.5 * phi);
    return s * s;
}

}  // namespace

void InterferometerConfig::validate() const {
    if (!(mean_photons >= 0.0) || !std::isfinite(mean_photons))
        throw std::invalid_argument("config: mean photon number must be >= 0");
    if (!(diffusion_rate >= 0.0) || !std::isfinite(diffusion_rate))
        throw std::invalid_argument("config: diffusion rate must be >= 0");
    if (!(transmission >= 0.0) || !(transmission <= 1.0))
        throw std::invalid_argument("config: transmission must be in [0, 1]");
}

double homodyne_density(const InterferometerConfig& cfg, double p, double phi) {
    const double c = 0.5 * cfg.amplitude() * std::sin(phi);
    const double u = p + c;
    return kSqrt2OverPi * std::exp(-2.0 * u * u);
}

double coincidence_prob(const InterferometerConfig& cfg, int n, int m, double phi) {
    if (n < 0 || m < 0) return 0.0;
    const double neff = cfg.effective_photons();
    const double dark = neff * half_angle_sin_sq(phi);
    const double bright = neff - dark;  // N cos^2(phi/2)
    double logp = -neff - std::lgamma(n + 1.0) - std::lgamma(m + 1.0);
    if (n > 0) {
        if (dark <= 0.0) return 0.0;
        logp += n * std::log(dark);
    }
    if (m > 0) {
        if (bright <= 0.0) return 0.0;
        logp += m * std::log(bright);
    }
    return std::exp(logp);
}

double intensity_signal(const InterferometerConfig& cfg, double phi) {
    return cfg.effective_photons() - cfg.effective_photons() * half_angle_sin_sq(phi);
}

BinaryModel binary_model(const InterferometerConfig& cfg, const DetectionScheme& scheme) {
    cfg.validate();
    const double neff = cfg.effective_photons();
    BinaryModel model;

    if (const auto* window = std::get_if<HomodyneWindow>(&scheme)) {
        const double p0 = window->p0;
        if (!(p0 > 0.0)) throw std::invalid_argument("homodyne window: p0 must be > 0");
        const double amp = std::sqrt(neff);
        model.p_plus = [amp, p0](double phi) {
            const double c = std::abs(0.5 * amp * std::sin(phi));
            const double kSqrt2 = std::numbers::sqrt2;
            return 0.5 * (erfc(kSqrt2 * (c - p0)) - erfc(kSqrt2 * (c + p0)));
        };
        model.p_minus = [amp, p0](double phi) {
            const double c = std::abs(0.5 * amp * std::sin(phi));
            const double kSqrt2 = std::numbers::sqrt2;
            return 0.5 * (erfc(kSqrt2 * (p0 - c)) + erfc(kSqrt2 * (c + p0)));
        };
        model.dp_plus = [amp, p0](double phi) {
            const double c = 0.5 * amp * std::sin(phi);
            const double dc = 0.5 * amp * std::cos(phi);
            const double arg = 4.0 * p0 * c;
            if (std::abs(arg) <= 30.0)
                return -2.0 * kSqrt2OverPi * dc * std::exp(-2.0 * (p0 * p0 + c * c)) *
                       std::sinh(arg);
            // far tail: the two window edges are exponentially separated
            const double lo = c - p0, hi = c + p0;
            return kSqrt2OverPi * dc *
                   (std::exp(-2.0 * hi * hi) - std::exp(-2.0 * lo * lo));
        };
        model.upper_bound = erf(std::numbers::sqrt2 * p0);
        return model;
    }

    if (std::holds_alternative<HomodyneZero>(scheme)) {
        model.p_plus = [neff](double phi) {
            const double s = std::sin(phi);
            return kSqrt2OverPi * std::exp(-0.5 * neff * s * s);
        };
        model.p_minus = [p = model.p_plus](double phi) { return 1.0 - p(phi); };
        model.dp_plus = [neff](double phi) {
            const double s = std::sin(phi);
            return -0.5 * neff * std::sin(2.0 * phi) * kSqrt2OverPi *
                   std::exp(-0.5 * neff * s * s);
        };
        model.is_density = true;
        model.upper_bound = kSqrt2OverPi;
        return model;
    }

    if (std::holds_alternative<Parity>(scheme)) {
        model.p_plus = [neff](double phi) {
            return 0.5 * (1.0 + std::exp(-2.0 * neff * half_angle_sin_sq(phi)));
        };
        model.p_minus = [neff](double phi) {
            return -0.5 * std::expm1(-2.0 * neff * half_angle_sin_sq(phi));
        };
        model.dp_plus = [neff](double phi) {
            return -0.5 * neff * std::sin(phi) *
                   std::exp(-2.0 * neff * half_angle_sin_sq(phi));
        };
        model.mu_plus = 1.0;
        model.mu_minus = -1.0;
        if (neff > 0.0) model.origin_fisher_limit = neff;
        return model;
    }

    // ZeroNonzero
    model.p_plus = [neff](double phi) {
        return std::exp(-neff * half_angle_sin_sq(phi));
    };
    model.p_minus = [neff](double phi) {
        return -std::expm1(-neff * half_angle_sin_sq(phi));
    };
    model.dp_plus = [neff](double phi) {
        return -0.5 * neff * std::sin(phi) * std::exp(-neff * half_angle_sin_sq(phi));
    };
    if (neff > 0.0) model.origin_fisher_limit = neff;
    return model;
}

double brute_force_binary(const InterferometerConfig& cfg, const DetectionScheme& scheme,
                          double phi, double* tail_defect) {
    const bool parity = std::holds_alternative<Parity>(scheme);
    if (!parity && !std::holds_alternative<ZeroNonzero>(scheme))
        throw std::invalid_argument("brute_force_binary: photocount schemes only");
    const double neff = cfg.effective_photons();
    const int cutoff = static_cast<int>(std::ceil(neff + 10.0 * std::sqrt(neff) + 20.0));

    double total = 0.0;
    double selected = 0.0;
    for (int n = 0; n <= cutoff; ++n) {
        double row = 0.0;
        for (int m = 0; m <= cutoff; ++m) row += coincidence_prob(cfg, n, m, phi);
        total += row;
        const bool in_plus = parity ? (n % 2 == 0) : (n == 0);
        if (in_plus) selected += row;
    }
    const double defect = 1.0 - total;
    if (tail_defect) *tail_defect = defect;
    if (std::abs(defect) > 1e-12)
        std::fprintf(stderr, "brute_force_binary: truncation tail %.3e exceeds 1e-12\n", defect);
    return selected;
}

namespace {

// f convolved with the unit-normalized Gaussian kernel of variance 2*gamma,
// phi + 2 sqrt(gamma) t substitution. Node pairs are accumulated symmetrically
// so even/odd structure of f survives in floating point.
double convolve(const Eigen::ArrayXd& nodes, const Eigen::ArrayXd& weights, double scale,
                const std::function<double(double)>& f, double phi) {
    const int n = static_cast<int>(nodes.size());
    double acc = 0.0;
    for (int i = 0; i < n / 2; ++i) {
        const int j = n - 1 - i;
        acc += weights[i] * (f(phi + scale * nodes[i]) + f(phi + scale * nodes[j]));
    }
    if (n % 2 == 1) acc += weights[n / 2] * f(phi);
    return acc / std::sqrt(std::numbers::pi);
}

Eigen::ArrayXd probe_points() {
    // multi-scale set around the fringe center plus the period edge
    Eigen::ArrayXd pts(29);
    pts[0] = 0.0;
    double w = 1e-3;
    for (int j = 0; j < 13; ++j) {
        pts[1 + 2 * j] = std::min(w, std::numbers::pi);
        pts[2 + 2 * j] = -pts[1 + 2 * j];
        w *= 2.0;
    }
    pts[27] = std::numbers::pi;
    pts[28] = -std::numbers::pi;
    return pts;
}

}  // namespace

BinaryModel diffuse_model(const BinaryModel& model, double gamma, const QuadratureRule& rule) {
    if (!(gamma >= 0.0) || !std::isfinite(gamma))
        throw std::invalid_argument("diffuse_model: gamma must be >= 0");
    if (gamma == 0.0) return model;

    const double scale = 2.0 * std::sqrt(gamma);

    const int refined_order = (2 * rule.order <= 256) ? 2 * rule.order : 250;
    const QuadratureRule refined = gauss_hermite(refined_order);
    const Eigen::ArrayXd probes = probe_points();
    for (int i = 0; i < probes.size(); ++i) {
        const double coarse = convolve(rule.nodes, rule.weights, scale, model.p_plus, probes[i]);
        const double fine =
            convolve(refined.nodes, refined.weights, scale, model.p_plus, probes[i]);
        if (std::abs(coarse - fine) > 1e-9)
            throw ConvergenceError("diffuse_model: quadrature order insufficient for this model");
    }

    BinaryModel out;
    out.p_plus = [nodes = rule.nodes, weights = rule.weights, scale,
                  f = model.p_plus](double phi) {
        return convolve(nodes, weights, scale, f, phi);
    };
    out.p_minus = [nodes = rule.nodes, weights = rule.weights, scale,
                   f = model.p_minus](double phi) {
        return convolve(nodes, weights, scale, f, phi);
    };
    if (model.dp_plus) {
        out.dp_plus = [nodes = rule.nodes, weights = rule.weights, scale,
                       f = model.dp_plus](double phi) {
            return convolve(nodes, weights, scale, f, phi);
        };
    }
    out.mu_plus = model.mu_plus;
    out.mu_minus = model.mu_minus;
    out.is_density = model.is_density;
    out.upper_bound = model.upper_bound;
    return out;  // origin Fisher limit does not survive diffusion
}

InterferometerConfig apply_loss(const InterferometerConfig& cfg) {
    cfg.validate();
    return {cfg.effective_photons(), cfg.diffusion_rate, 1.0};
}

BinaryModel effective_model(const InterferometerConfig& cfg, const DetectionScheme& scheme,
                            int quad_order) {
    BinaryModel model = binary_model(cfg, scheme);
    if (cfg.diffusion_rate == 0.0) return model;

    if (quad_order == 0) {
        if (const char* env = std::getenv("MZI_QUAD_ORDER")) {
            char* end = nullptr;
            const long parsed = std::strtol(env, &end, 10);
            if (end == env || *end != '\0' || parsed < 2 || parsed > 256)
                throw std::invalid_argument("MZI_QUAD_ORDER: expected an integer in [2, 256]");
            quad_order = static_cast<int>(parsed);
        }
    }
    if (quad_order > 0)
        return diffuse_model(model, cfg.diffusion_rate, gauss_hermite(quad_order));

    for (int order : {64, 128}) {
        try {
            return diffuse_model(model, cfg.diffusion_rate, gauss_hermite(order));
        } catch (const ConvergenceError&) {
            // narrow fringe vs wide kernel; retry with a denser rule
        }
    }
    return diffuse_model(model, cfg.diffusion_rate, gauss_hermite(256));
}

const char* scheme_name(const DetectionScheme& scheme) {
    if (std::get_if<HomodyneWindow>(&scheme)) return "homodyne-window";
    if (std::get_if<HomodyneZero>(&scheme)) return "homodyne-zero";
    if (std::get_if<Parity>(&scheme)) return "parity";
    return "zero-nonzero";
}

}  // namespace mzi
