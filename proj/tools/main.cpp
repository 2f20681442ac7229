#include <CLI11.hpp>

#include <iostream>

#include "commands.hpp"

int main(int argc, char** argv) {
    using namespace fpprop::cli;

    CLI::App app{
        "fpprop: exact Gaussian propagator for linear advection-diffusion problems with "
        "time-dependent coefficients, with operator-identity verification and "
        "finite-difference / Monte Carlo cross-checks. Set FPPROP_THREADS to cap "
        "parallelism."};
    app.require_subcommand(1);

    SolveOptions solve_opt;
    CLI::App* solve = app.add_subcommand("solve", "evaluate the closed-form solution");
    solve->add_option("spec", solve_opt.spec_path, "problem spec file")->required();
    solve->add_option("--time", solve_opt.times, "output times (overrides the spec)");
    solve->add_option("--out", solve_opt.out_path, "output table path")->required();
    solve->add_option("--format", solve_opt.format, "csv or json");

    VerifyOptions verify_opt;
    CLI::App* verify = app.add_subcommand("verify", "run the operator-identity suites");
    verify->add_option("--suite", verify_opt.suite,
                       "commutator|suzuki|substitution|residual|all");
    verify->add_option("--trials", verify_opt.trials, "trials per suite");
    verify->add_option("--seed", verify_opt.seed, "random seed");
    verify->add_option("--tol", verify_opt.tol, "integrator tolerance");
    verify
        ->add_flag("--flip-suzuki-sign", verify_opt.flip_suzuki_sign,
                   "mutation self-test: corrupt the reweighting sign (the suite must fail)")
        ->group("");  // hidden

    CompareOptions compare_opt;
    CLI::App* compare = app.add_subcommand("compare", "cross-validate against an oracle");
    compare->add_option("spec", compare_opt.spec_path, "problem spec file")->required();
    compare->add_option("--oracle", compare_opt.oracle, "fd|mc|both");
    compare->add_option("--time", compare_opt.time, "comparison time (default: last)");
    compare->add_option("--out", compare_opt.out_path, "CSV dump of the fd comparison");
    compare->add_option("--fd-dt", compare_opt.fd_dt, "fd time step");
    compare->add_option("--fd-tol", compare_opt.fd_tol, "fd Linf tolerance");
    compare->add_option("--mc-paths", compare_opt.mc_paths, "Monte Carlo path count");
    compare->add_option("--mc-dt", compare_opt.mc_dt, "Monte Carlo time step");
    compare->add_option("--seed", compare_opt.seed, "Monte Carlo seed");
    compare->add_option("--mc-z", compare_opt.mc_z_limit, "moment z-score limit");

    SchedulesOptions sched_opt;
    CLI::App* schedules =
        app.add_subcommand("schedules", "tabulate coefficients and their integrals");
    schedules->add_option("spec", sched_opt.spec_path, "problem spec file")->required();
    schedules->add_option("--out", sched_opt.out_path, "output CSV path")->required();
    schedules->add_option("--samples", sched_opt.samples, "sample count (default 256)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (solve->parsed()) return cmd_solve(solve_opt, std::cout);
        if (verify->parsed()) return cmd_verify(verify_opt, std::cout);
        if (compare->parsed()) return cmd_compare(compare_opt, std::cout);
        if (schedules->parsed()) return cmd_schedules(sched_opt, std::cout);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitContractViolation;
    }
    return kExitUsage;
}
