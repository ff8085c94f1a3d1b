#include <CLI11.hpp>

#include "mzi/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"binary-outcome phase metrology for a lossy, dephasing interferometer"};
    app.require_subcommand(1);
    // common options live on the top-level app so they can be set before or
    // after the subcommand name and picked up from a config file
    app.fallthrough();
    mzi::RunConfig rc;

    app.add_option("--N", rc.config.mean_photons, "mean photon number at the input");
    app.add_option("--gamma", rc.config.diffusion_rate, "phase diffusion rate");
    app.add_option("--T", rc.config.transmission, "intensity transmission in [0, 1]");
    app.add_option("--scheme", rc.scheme,
                   "homodyne-window | homodyne-zero | parity | zero-nonzero");
    app.add_option("--p0", rc.p0, "homodyne window half-width");
    app.add_option("--quad-order", rc.quad_order,
                   "Gauss-Hermite order for dephasing, 0 = automatic");
    app.add_option("-o,--output", rc.output_path, "write to this file (atomic replace)");
    app.add_flag("--check", rc.check, "run model consistency checks instead of the command");
    app.set_config("--config", "", "read key=value defaults from a file");

    CLI::App* scan = app.add_subcommand(
        "scan", "tabulate signal, sensitivity and Fisher information over a phase grid");
    scan->add_option("--phi", rc.phi_range, "phase grid as start:end:points");
    scan->add_flag("--pi-units", rc.pi_units, "interpret and print phases in units of pi");

    CLI::App* best =
        app.add_subcommand("best", "minimize the phase sensitivity over the working point");
    best->add_option("--N-list", rc.n_list_spec, "comma-separated photon numbers to sweep");
    best->add_option("--N-geom", rc.n_geom_spec, "log-spaced photon sweep as start:end:points");

    CLI::App* width = app.add_subcommand("fwhm", "width of the central interference peak");
    width->add_option("--N-list", rc.n_list_spec, "comma-separated photon numbers to sweep");
    width->add_option("--N-geom", rc.n_geom_spec, "log-spaced photon sweep as start:end:points");

    CLI::App* est =
        app.add_subcommand("estimate", "Monte Carlo check of the inversion estimator");
    est->add_option("--phi-true", rc.phi_true, "true phase being estimated");
    est->add_option("--trials", rc.trials, "shots per repeat");
    est->add_option("--repeats", rc.repeats, "independent repeats");
    est->add_option("--seed", rc.seed, "random seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (app.got_subcommand(scan)) return mzi::cmd_scan(rc);
    if (app.got_subcommand(best)) return mzi::cmd_best(rc);
    if (app.got_subcommand(width)) return mzi::cmd_fwhm(rc);
    if (app.got_subcommand(est)) return mzi::cmd_estimate(rc);
    return 2;
}
