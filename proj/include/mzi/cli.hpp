#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "mzi/interferometer.hpp"

namespace mzi {

// Everything a subcommand needs, filled in by the argument parser. Kept as a
// plain struct so the command bodies are callable from tests without a
// process boundary.
struct RunConfig {
    InterferometerConfig config{200.0, 0.0, 1.0};
    std::string scheme = "parity";
    double p0 = 0.5;

    std::string phi_range = "-0.8:0.8:401";  // start:end:points
    bool pi_units = false;

    std::string n_list_spec;  // comma-separated photon numbers
    std::string n_geom_spec;  // start:end:points, log-spaced

    double phi_true = 0.1;
    int trials = 1000;
    int repeats = 100;
    std::uint64_t seed = 12345;

    int quad_order = 0;  // 0 = automatic
    std::string output_path;  // empty = stdout
    bool check = false;
};

DetectionScheme make_scheme(const std::string& name, double p0);

// "start:end:points" -> linear grid; with pi_units the endpoints are given in
// units of pi.
Eigen::ArrayXd parse_grid(const std::string& spec, bool pi_units);

// Photon-number sweep from the list/geom specs; falls back to the single
// configured value when both are empty.
std::vector<double> resolve_photon_sweep(const RunConfig& rc);

// Shortest round-trip decimal form; "inf"/"-inf"/"nan" spelled out.
std::string format_double(double v);

// Exit codes: 0 success, 1 consistency-check violation, 2 invalid input or
// failed numeric convergence, 3 output I/O failure, 4 no half-maximum
// crossing, 5 estimation aborted or degenerate.
int cmd_scan(const RunConfig& rc);
int cmd_best(const RunConfig& rc);
int cmd_fwhm(const RunConfig& rc);
int cmd_estimate(const RunConfig& rc);

// Model invariants for the configured scheme, one printed line per check.
int run_selfcheck(const RunConfig& rc);

}  // namespace mzi
