#include "cli.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    using n1ma::cli::RunConfig;
    RunConfig cfg;
    CLI::App app{"n1ma: (n-1)-plurisubharmonic calculus and the (n-1)-Monge-Ampere equation on flat tori"};
    app.require_subcommand(1);
    app.add_flag("-v,--verbose", cfg.verbosity, "Increase verbosity");

    const auto with_problem = [&](CLI::App* sub) {
        sub->add_option("-c,--config", cfg.config_path, "Problem config (INI)")->required()->check(CLI::ExistingFile);
        sub->add_option("-o,--output", cfg.output_dir, "Output directory")->required();
    };
    with_problem(app.add_subcommand("solve", "Solve the equation for one problem"));
    CLI::App* verify = app.add_subcommand("verify", "Solve and run every audit");
    with_problem(verify);
    verify->add_option("--seed", cfg.seed, "Seed for randomized audits");
    with_problem(app.add_subcommand("family", "Solve a deformation family and check uniformity"));

    CLI::App* radial = app.add_subcommand("radial", "Radial eigenvalue table and integrability threshold");
    radial->add_option("--n", cfg.n, "Complex dimension")->required();
    radial->add_option("--p", cfg.p, "Exponent p")->required();
    radial->add_option("--levels", cfg.levels, "Refinement levels");
    radial->add_option("-o,--output", cfg.output_dir, "Output directory (default: stdout)");

    CLI::App* cones = app.add_subcommand("cones", "Cone classification on random spectra");
    cones->add_option("--samples", cfg.samples, "Samples per dimension");
    cones->add_option("--seed", cfg.seed, "Seed");
    cones->add_option("-o,--output", cfg.output_dir, "Output directory (default: stdout)");

    CLI::App* forms = app.add_subcommand("forms-check", "Hodge identity and equivalence checks");
    forms->add_option("--n", cfg.n, "Complex dimension");
    forms->add_option("--trials", cfg.trials, "Random Hermitian matrices");
    forms->add_option("--seed", cfg.seed, "Seed");
    forms->add_option("-o,--output", cfg.output_dir, "Output directory (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : n1ma::cli::kBadConfig;
    }
    cfg.subcommand = app.get_subcommands().front()->get_name();
    return n1ma::cli::run(cfg, std::cout, std::cerr);
}
