#include "mzi/estimator.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "mzi/errors.hpp"
#include "mzi/metrology.hpp"

namespace mzi {

namespace {

// Half-width of the window standing in for the zero-point idealization. Small
// enough that the window probability tracks the central density, large enough
// to keep a usable click rate.
constexpr double kZeroPointWindow = 0.05;

// splitmix64 finalizer; decorrelates per-repeat generator seeds.
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t s = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
    s = (s ^ (s >> 30)) * 0xBF58476D1CE4E5B9ull;
    s = (s ^ (s >> 27)) * 0x94D049BB133111EBull;
    return s ^ (s >> 31);
}

}  // namespace

void ExperimentSpec::validate() const {
    config.validate();
    if (trials < 100) throw std::invalid_argument("ExperimentSpec: trials must be at least 100");
    if (repeats < 10) throw std::invalid_argument("ExperimentSpec: repeats must be at least 10");
    if (!(phi_true >= 0.0))
        throw std::invalid_argument("ExperimentSpec: phi_true must be nonnegative");
}

Bracket inversion_branch(const DetectionScheme& scheme) {
    if (std::get_if<HomodyneWindow>(&scheme) || std::get_if<HomodyneZero>(&scheme))
        return {0.0, 0.5 * std::numbers::pi};
    return {0.0, std::numbers::pi};
}

double sample_click_fraction(const BinaryModel& model, double phi, int trials,
                             std::uint64_t seed) {
    if (trials < 1) throw std::invalid_argument("sample_click_fraction: trials must be positive");
    const double p = model.p_plus(phi);
    std::mt19937_64 eng(seed);
    long hits = 0;
    for (int t = 0; t < trials; ++t) {
        // top 53 bits, uniform in [0, 1); bit-reproducible across platforms
        const double u = static_cast<double>(eng() >> 11) * 0x1.0p-53;
        if (u < p) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(trials);
}

double invert_signal(const BinaryModel& model, double fraction, Bracket branch, double tol) {
    return invert_monotone([&model](double x) { return model.p_plus(x); }, fraction, branch,
                           tol);
}

EstimationReport run_experiment(const ExperimentSpec& spec, int quad_order) {
    spec.validate();

    DetectionScheme sampled = spec.scheme;
    if (std::get_if<HomodyneZero>(&spec.scheme)) sampled = HomodyneWindow{kZeroPointWindow};

    const Bracket branch = inversion_branch(sampled);
    if (spec.phi_true > branch.hi)
        throw std::invalid_argument("run_experiment: phi_true outside the invertible branch");

    const BinaryModel model = effective_model(spec.config, sampled, quad_order);
    const double predicted = sensitivity(model, spec.phi_true);
    if (!std::isfinite(predicted))
        throw DegenerateModelError(
            "run_experiment: predicted sensitivity diverges at the working point");

    std::vector<double> estimates;
    estimates.reserve(static_cast<std::size_t>(spec.repeats));
    int failures = 0;
    for (int rep = 0; rep < spec.repeats; ++rep) {
        const double f = sample_click_fraction(model, spec.phi_true, spec.trials,
                                               substream_seed(spec.seed, rep));
        try {
            estimates.push_back(invert_signal(model, f, branch));
        } catch (const std::domain_error&) {
            ++failures;
        } catch (const ConvergenceError&) {
            ++failures;
        }
    }
    if (failures > 0.2 * spec.repeats || estimates.size() < 2)
        throw ExperimentAbort("run_experiment: too many repeats left the invertible fringe");

    double mean = 0.0;
    for (double e : estimates) mean += e;
    mean /= static_cast<double>(estimates.size());
    double var = 0.0;
    for (double e : estimates) var += (e - mean) * (e - mean);
    var /= static_cast<double>(estimates.size() - 1);

    EstimationReport report;
    report.spec = spec;
    report.sampled_scheme = sampled;
    report.mean_estimate = mean;
    report.empirical_std = std::sqrt(var);
    report.predicted_std = predicted / std::sqrt(static_cast<double>(spec.trials));
    report.std_ratio = report.empirical_std / report.predicted_std;
    report.failures = failures;
    const double p = model.p_plus(spec.phi_true);
    report.degenerate = !(p > 0.0 && p < 1.0);
    return report;
}

}  // namespace mzi
