#include "mzi/cli.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <stdexcept>
#include <system_error>

#include <json.hpp>

#include "mzi/errors.hpp"
#include "mzi/estimator.hpp"
#include "mzi/metrology.hpp"
#include "mzi/specfun.hpp"

namespace mzi {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = s.find(sep, start);
        parts.push_back(s.substr(start, pos == std::string::npos ? pos : pos - start));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return parts;
}

double to_double(const std::string& s) {
    std::string t = s;
    if (!t.empty() && t.front() == '+') t.erase(t.begin());
    double v = 0;
    const char* b = t.data();
    const char* e = b + t.size();
    const auto res = std::from_chars(b, e, v);
    if (res.ec != std::errc{} || res.ptr != e)
        throw std::invalid_argument("not a number: '" + s + "'");
    return v;
}

int to_count(const std::string& s) {
    int v = 0;
    const char* b = s.data();
    const char* e = b + s.size();
    const auto res = std::from_chars(b, e, v);
    if (res.ec != std::errc{} || res.ptr != e || v < 1)
        throw std::invalid_argument("not a positive count: '" + s + "'");
    return v;
}

// Write-to-temp-then-rename so readers never observe a partial file.
int emit(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::cout << text;
        return 0;
    }
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            std::cerr << "error: cannot open " << tmp << " for writing\n";
            return 3;
        }
        out << text << std::flush;
        if (!out) {
            std::cerr << "error: short write to " << tmp << "\n";
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            return 3;
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::cerr << "error: cannot move " << tmp << " into place: " << ec.message() << "\n";
        std::error_code ec2;
        std::filesystem::remove(tmp, ec2);
        return 3;
    }
    return 0;
}

int guard(const std::function<int()>& body, bool estimating) {
    try {
        return body();
    } catch (const ExperimentAbort& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 5;
    } catch (const NoCrossingError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    } catch (const DegenerateModelError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return estimating ? 5 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}

int selfcheck_body(const RunConfig& rc) {
    const DetectionScheme scheme = make_scheme(rc.scheme, rc.p0);
    const BinaryModel m = effective_model(rc.config, scheme, rc.quad_order);
    bool all_ok = true;
    const auto report = [&all_ok](const char* name, double worst, double tol) {
        const bool pass = worst <= tol;
        std::cout << "check " << name << ": " << (pass ? "ok" : "FAILED") << " (defect "
                  << format_double(worst) << ", tol " << format_double(tol) << ")\n";
        all_ok = all_ok && pass;
    };

    const Eigen::ArrayXd grid = linspace(-std::numbers::pi, std::numbers::pi, 257);
    double bounds = 0, even = 0, periodic = 0;
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
        const double phi = grid[i];
        const double p = m.p_plus(phi);
        const double q = m.p_minus(phi);
        bounds = std::max({bounds, -p, p - 1.0, std::abs(p + q - 1.0)});
        even = std::max(even, std::abs(p - m.p_plus(-phi)));
        periodic = std::max(periodic, std::abs(m.p_plus(phi + 2.0 * std::numbers::pi) - p));
    }
    report("probability-bounds", bounds, 1e-12);
    report("even-in-phase", even, 1e-12);
    report("periodic-2pi", periodic, 1e-9);

    double deriv = 0;
    const double h = 1e-5;
    for (double phi : {0.05, 0.15, 0.3, 0.5, 0.7, 0.9}) {
        const double central = (m.p_plus(phi + h) - m.p_plus(phi - h)) / (2.0 * h);
        const double dp = m.dp_plus(phi);
        // unit floor: where the fringe is numerically dead the central
        // difference is pure roundoff and carries no signal to compare
        deriv = std::max(deriv,
                         std::abs(dp - central) / std::max({1.0, std::abs(dp), std::abs(central)}));
    }
    report("derivative-consistency", deriv, 1e-4);

    report("sensitivity-fisher-identity",
           crb_saturation_defect(rc.config, scheme, linspace(0.01, 0.8, 101), rc.quad_order),
           1e-9);

    if (rc.config.diffusion_rate == 0.0 &&
        (std::get_if<Parity>(&scheme) || std::get_if<ZeroNonzero>(&scheme))) {
        const double neff = rc.config.effective_photons();
        report("origin-shot-noise", std::abs(sensitivity(m, 0.0) * std::sqrt(neff) - 1.0), 1e-12);
    }
    return all_ok ? 0 : 1;
}

}  // namespace

DetectionScheme make_scheme(const std::string& name, double p0) {
    if (name == "homodyne-window") return HomodyneWindow{p0};
    if (name == "homodyne-zero") return HomodyneZero{};
    if (name == "parity") return Parity{};
    if (name == "zero-nonzero") return ZeroNonzero{};
    throw std::invalid_argument("unknown scheme: '" + name + "'");
}

Eigen::ArrayXd parse_grid(const std::string& spec, bool pi_units) {
    const auto parts = split(spec, ':');
    if (parts.size() != 3)
        throw std::invalid_argument("grid spec must be start:end:points, got '" + spec + "'");
    const double unit = pi_units ? std::numbers::pi : 1.0;
    return linspace(to_double(parts[0]) * unit, to_double(parts[1]) * unit, to_count(parts[2]));
}

std::vector<double> resolve_photon_sweep(const RunConfig& rc) {
    if (!rc.n_list_spec.empty() && !rc.n_geom_spec.empty())
        throw std::invalid_argument("give either --N-list or --N-geom, not both");
    std::vector<double> out;
    if (!rc.n_list_spec.empty()) {
        for (const std::string& tok : split(rc.n_list_spec, ',')) out.push_back(to_double(tok));
    } else if (!rc.n_geom_spec.empty()) {
        const auto parts = split(rc.n_geom_spec, ':');
        if (parts.size() != 3)
            throw std::invalid_argument("--N-geom must be start:end:points");
        const Eigen::ArrayXd g =
            geomspace(to_double(parts[0]), to_double(parts[1]), to_count(parts[2]));
        out.assign(g.data(), g.data() + g.size());
    } else {
        out.push_back(rc.config.mean_photons);
    }
    return out;
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

int run_selfcheck(const RunConfig& rc) {
    return guard([&rc] { return selfcheck_body(rc); }, false);
}

int cmd_scan(const RunConfig& rc) {
    return guard(
        [&rc] {
            if (rc.check) return selfcheck_body(rc);
            const DetectionScheme scheme = make_scheme(rc.scheme, rc.p0);
            const Eigen::ArrayXd grid = parse_grid(rc.phi_range, rc.pi_units);
            const std::vector<ScanRow> rows = scan(rc.config, scheme, grid, rc.quad_order);
            const double unit = rc.pi_units ? std::numbers::pi : 1.0;
            std::string text = "phi,signal,p_plus,delta_phi,fisher\n";
            for (const ScanRow& r : rows) {
                text += format_double(r.phi / unit);
                text += ',';
                text += format_double(r.signal);
                text += ',';
                text += format_double(r.p_plus);
                text += ',';
                text += format_double(r.delta_phi);
                text += ',';
                text += format_double(r.fisher);
                text += '\n';
            }
            return emit(text, rc.output_path);
        },
        false);
}

int cmd_best(const RunConfig& rc) {
    return guard(
        [&rc] {
            if (rc.check) return selfcheck_body(rc);
            const DetectionScheme scheme = make_scheme(rc.scheme, rc.p0);
            const std::vector<double> sweep = resolve_photon_sweep(rc);
            const bool sweeping = sweep.size() > 1;
            std::string text =
                "N,phi_min,delta_phi_min_exact,delta_phi_min_analytic,delta_phi_min_series,"
                "shot_noise\n";
            for (double n : sweep) {
                InterferometerConfig cfg = rc.config;
                cfg.mean_photons = n;
                text += format_double(n);
                try {
                    const OptimumReport rep =
                        best_sensitivity(cfg, scheme, std::nullopt, rc.quad_order);
                    text += ',' + format_double(rep.phi_min);
                    text += ',' + format_double(rep.delta_phi_min);
                    text += ',' + format_double(rep.analytic_delta_phi_min);
                    text += ',' + format_double(rep.series_delta_phi_min);
                    text += ',' + format_double(rep.shot_noise);
                    text += '\n';
                } catch (const ConvergenceError& e) {
                    if (!sweeping) throw;
                    std::cerr << "note: N=" << format_double(n) << ": " << e.what() << '\n';
                    text += ",nan,nan,nan,nan,nan\n";
                } catch (const DegenerateModelError& e) {
                    if (!sweeping) throw;
                    std::cerr << "note: N=" << format_double(n) << ": " << e.what() << '\n';
                    text += ",nan,nan,nan,nan,nan\n";
                }
            }
            return emit(text, rc.output_path);
        },
        false);
}

int cmd_fwhm(const RunConfig& rc) {
    return guard(
        [&rc] {
            if (rc.check) return selfcheck_body(rc);
            const DetectionScheme scheme = make_scheme(rc.scheme, rc.p0);
            const std::vector<double> sweep = resolve_photon_sweep(rc);
            const bool sweeping = sweep.size() > 1;
            std::string text = "N,gamma,fwhm_exact,fwhm_analytic\n";
            for (double n : sweep) {
                InterferometerConfig cfg = rc.config;
                cfg.mean_photons = n;
                text += format_double(n);
                text += ',' + format_double(cfg.diffusion_rate);
                try {
                    const double exact = fwhm(cfg, scheme, rc.quad_order);
                    text += ',' + format_double(exact);
                    text += ',' + format_double(fwhm_analytic(cfg, scheme));
                    text += '\n';
                } catch (const NoCrossingError& e) {
                    if (!sweeping) throw;
                    std::cerr << "note: N=" << format_double(n) << ": " << e.what() << '\n';
                    text += ",nan,nan\n";
                } catch (const ConvergenceError& e) {
                    if (!sweeping) throw;
                    std::cerr << "note: N=" << format_double(n) << ": " << e.what() << '\n';
                    text += ",nan,nan\n";
                }
            }
            return emit(text, rc.output_path);
        },
        false);
}

int cmd_estimate(const RunConfig& rc) {
    return guard(
        [&rc] {
            if (rc.check) return selfcheck_body(rc);
            ExperimentSpec spec;
            spec.config = rc.config;
            spec.scheme = make_scheme(rc.scheme, rc.p0);
            spec.phi_true = rc.phi_true;
            spec.trials = rc.trials;
            spec.repeats = rc.repeats;
            spec.seed = rc.seed;
            const EstimationReport rep = run_experiment(spec, rc.quad_order);

            nlohmann::ordered_json j;
            j["spec"]["mean_photons"] = spec.config.mean_photons;
            j["spec"]["diffusion_rate"] = spec.config.diffusion_rate;
            j["spec"]["transmission"] = spec.config.transmission;
            j["spec"]["scheme"] = scheme_name(spec.scheme);
            if (const auto* w = std::get_if<HomodyneWindow>(&spec.scheme))
                j["spec"]["p0"] = w->p0;
            j["spec"]["phi_true"] = spec.phi_true;
            j["spec"]["trials"] = spec.trials;
            j["spec"]["repeats"] = spec.repeats;
            j["spec"]["seed"] = spec.seed;
            j["sampling"]["scheme"] = scheme_name(rep.sampled_scheme);
            if (const auto* w = std::get_if<HomodyneWindow>(&rep.sampled_scheme))
                j["sampling"]["p0"] = w->p0;
            j["mean_estimate"] = rep.mean_estimate;
            j["empirical_std"] = rep.empirical_std;
            j["predicted_std"] = rep.predicted_std;
            j["std_ratio"] = rep.std_ratio;
            j["failures"] = rep.failures;
            j["degenerate"] = rep.degenerate;
            return emit(j.dump(2) + "\n", rc.output_path);
        },
        true);
}

}  // namespace mzi
