#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "mfg/errors.hpp"
#include "mfg/scenario_io.hpp"
#include "report.hpp"

namespace {

std::size_t threadsFromEnv() {
    const char* v = std::getenv("MFG_SPLIT_THREADS");
    if (!v || !*v) return 1;
    char* end = nullptr;
    const long n = std::strtol(v, &end, 10);
    if (*end != '\0' || n < 1) throw mfg::InvalidArgument("MFG_SPLIT_THREADS must be a positive integer");
    return static_cast<std::size_t>(n);
}

}  // namespace

int main(int argc, char** argv) {
    using mfgsplit::RunConfig;
    RunConfig cfg;
    CLI::App app{"Splitting schemes for mean field game master equations"};
    app.set_version_flag("--version", mfgsplit::kVersion);
    const std::vector<std::string> commands{"solve-mfg", "master-first", "master-linear", "split",
                                            "major",     "audit",        "convergence",   "stochastic"};
    std::string positional;
    app.add_option("cmd", positional, "command to run (same as --command)")
        ->check(CLI::IsMember(commands));
    app.add_option("--command", cfg.command, "command to run")->check(CLI::IsMember(commands));
    app.add_option("--scenario", cfg.scenarioPath, "scenario file; the built-in default scenario otherwise")
        ->check(CLI::ExistingFile);
    app.add_option("--N", cfg.Ns, "split counts, e.g. --N 1 2 4")->check(CLI::PositiveNumber);
    app.add_option("--grid", cfg.grid,
                   "grid cells: a refinement list for audit and convergence, 'n n0' for major");
    app.add_option("--tol", cfg.tol,
                   "inner Picard tolerance of the schemes (split, convergence, major, stochastic) or the MFG "
                   "fixed-point tolerance (other commands)")
        ->check(CLI::PositiveNumber);
    app.add_option("--budget", cfg.budget, "MFG sub-solve budget per scheme evaluation (0 = unlimited)");
    app.add_option("--seed", cfg.seed, "master RNG seed");
    app.add_option("--out", cfg.out, "output directory");
    app.add_option("--samples", cfg.samples, "number of sample measures")->check(CLI::PositiveNumber);
    app.add_option("--paths", cfg.paths, "Monte-Carlo paths for stochastic")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }
    if (cfg.command.empty()) cfg.command = positional;
    if (cfg.command.empty() || (!positional.empty() && positional != cfg.command)) {
        std::cerr << "mfgsplit: exactly one command is required\n";
        return 1;
    }

    try {
        cfg.threads = threadsFromEnv();
        const mfg::Scenario s = cfg.scenarioPath.empty() ? mfg::defaultScenario() : mfg::loadScenario(cfg.scenarioPath);
        mfgsplit::runCommand(cfg, s);
    } catch (const mfgsplit::AssertionFailure& e) {
        std::cerr << "mfgsplit: assertion failed: " << e.what << '\n';
        return 1;
    } catch (const mfgsplit::PartialResult& e) {
        std::cerr << "mfgsplit: budget exceeded, partial artifacts written: " << e.what << '\n';
        return 2;
    } catch (const mfg::NonConvergence& e) {
        std::cerr << "mfgsplit: " << e.solve() << " did not converge: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "mfgsplit: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
