#include <iostream>

#include <CLI11.hpp>

#include "ibdwaves/errors.hpp"
#include "ibdwaves/version.hpp"
#include "ibdwaves_cli/commands.hpp"

using namespace ibdwaves;
using namespace ibdwaves::cli;

int main(int argc, char** argv) {
    CLI::App app{"Travelling waves in the mutant/immune reaction-diffusion model"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "key = value file pre-setting any flag");

    GlobalOptions g;
    std::string out = ".";
    app.add_option("--alpha2", g.alpha2)->capture_default_str();
    app.add_option("--beta1", g.beta1)->capture_default_str();
    app.add_option("--beta2", g.beta2)->capture_default_str();
    app.add_option("--delta", g.delta)->capture_default_str();
    app.add_option("--D", g.D, "I diffusivity ratio")->capture_default_str();
    app.add_option("--epsilon", g.epsilon)->capture_default_str();
    app.add_option("--out", out, "output directory")->capture_default_str();
    app.add_option("--threads", g.threads, "worker threads for sweeps")->capture_default_str()->check(CLI::PositiveNumber);
    app.add_flag("--seedless-deterministic", g.seedless_deterministic,
                 "record that the run uses no random state (all commands are deterministic)");

    SpeedCurveArgs sc;
    auto* c_sc = app.add_subcommand("speed-curve", "speed as a function of sigma");
    c_sc->add_option("--sigma", sc.sigma, "start:stop:step or list")->required();
    c_sc->add_option("--delta-list", sc.deltas, "delta values for bvp (default: --delta)");
    c_sc->add_option("--methods", sc.methods, "shoot,bvp,asym,exact")->capture_default_str();

    ProfileArgs pr;
    auto* c_pr = app.add_subcommand("profile", "travelling-wave profiles");
    c_pr->add_option("--kind", pr.kind, "fptw, uptw or lptw")->capture_default_str();
    c_pr->add_option("--sigma", pr.sigma)->capture_default_str();
    c_pr->add_option("--delta-list", pr.deltas, "delta values (default: --delta)");
    c_pr->add_option("--methods", pr.methods, "bvp,shoot,asym")->capture_default_str();

    SimulateArgs si;
    auto* c_si = app.add_subcommand("simulate", "initial-value simulation from Heaviside data");
    c_si->add_option("--model", si.model, "lds or rds")->capture_default_str();
    c_si->add_option("--sigma", si.sigma)->capture_default_str();
    c_si->add_option("--M0", si.M0)->capture_default_str();
    c_si->add_option("--I0", si.I0)->capture_default_str();
    c_si->add_option("--t-end", si.t_end)->capture_default_str();
    c_si->add_option("--x-min", si.x_min)->capture_default_str();
    c_si->add_option("--x-max", si.x_max, "default sizes the domain from the expected speed");
    c_si->add_option("--dx", si.dx)->capture_default_str();
    c_si->add_option("--dt", si.dt, "0 selects delta/20")->capture_default_str();
    c_si->add_option("--snapshots", si.snapshots)->capture_default_str();

    TbpArgs tb;
    auto* c_tb = app.add_subcommand("tbp", "universal transition problem and its constants");
    c_tb->add_option("--sigma", tb.sigmas, "sigma values for the rescaled check")->capture_default_str();

    PhasePortraitArgs pp;
    auto* c_pp = app.add_subcommand("phase-portrait", "(m, i) trajectories of the temporal system");
    c_pp->add_option("--sigma", pp.sigma)->capture_default_str();
    c_pp->add_option("--t-end", pp.t_end)->capture_default_str();
    c_pp->add_option("--grid", pp.grid, "initial points per axis")->capture_default_str();

    ValidateArgs va;
    auto* c_va = app.add_subcommand("validate", "run the acceptance suite");
    c_va->add_option("--skip", va.skip, "criterion ids to skip, e.g. 8,9");
    c_va->add_flag("--fast", va.fast, "skip the long PDE criteria");
    c_va->add_option("--tamper", va.tamper, "alpha2 multiplier for a negative control")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }
    g.out = out;

    try {
        if (*c_sc) return cmd_speed_curve(g, sc);
        if (*c_pr) return cmd_profile(g, pr);
        if (*c_si) return cmd_simulate(g, si);
        if (*c_tb) return cmd_tbp(g, tb);
        if (*c_pp) return cmd_phase_portrait(g, pp);
        if (*c_va) return cmd_validate(g, va);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const ParameterError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const DomainError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const RegimeMismatch& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "solver failure: " << e.what() << '\n';
        return kSolverFailure;
    }
    return kUsage;
}
