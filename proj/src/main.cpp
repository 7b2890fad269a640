#include <nonloc/barriers.hpp>
#include <nonloc/config.hpp>
#include <nonloc/errors.hpp>
#include <nonloc/studies.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

namespace {

// Exit codes: 0 success, 1 bad configuration, 2 internal failure or
// non-convergence, 3 a certification/threshold check ran and failed.
constexpr int exit_ok = 0;
constexpr int exit_config = 1;
constexpr int exit_internal = 2;
constexpr int exit_threshold = 3;

struct cli_options {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_dir = "out";
};

nonloc::run_config load(const cli_options& opt) {
    nonloc::run_config cfg = nonloc::run_config::parse_file(opt.config_path);
    for (const std::string& assignment : opt.overrides)
        cfg.apply_override(assignment);
    return cfg;
}

int finish(const nonloc::study_outcome& out, const nonloc::run_config& cfg,
           const cli_options& opt) {
    const std::string hash = nonloc::emit_outcome(out, cfg, opt.out_dir);
    for (const std::string& line : out.lines)
        std::printf("%s\n", line.c_str());
    std::printf("artifacts: %s (content hash %s)\n", opt.out_dir.c_str(), hash.c_str());
    if (!out.converged) return exit_internal;
    return out.pass ? exit_ok : exit_threshold;
}

void add_common(CLI::App* cmd, cli_options& opt) {
    cmd->add_option("-c,--config", opt.config_path, "run configuration file")
        ->required();
    cmd->add_option("--set", opt.overrides,
                    "override an entry, e.g. --set solver.tol=1e-8");
    cmd->add_option("-o,--out", opt.out_dir, "artifact directory");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"zero-order nonlocal Dirichlet solver"};
    app.require_subcommand(1);

    cli_options opt;
    std::string study_name;

    CLI::App* solve = app.add_subcommand("solve", "solve one problem instance");
    add_common(solve, opt);

    CLI::App* barrier =
        app.add_subcommand("barrier-check", "certify a boundary barrier exponent");
    add_common(barrier, opt);

    CLI::App* study = app.add_subcommand("study", "run a named sweep study");
    add_common(study, opt);
    study->add_option("name", study_name, "study name")->required();

    CLI::App* validate =
        app.add_subcommand("validate", "parse and cross-check a configuration");
    add_common(validate, opt);

    CLI11_PARSE(app, argc, argv);

    try {
        const nonloc::run_config cfg = load(opt);
        if (validate->parsed()) {
            cfg.cross_validate();
            std::printf("ok: %s\n%s", cfg.origin().c_str(), cfg.serialize().c_str());
            return exit_ok;
        }
        if (solve->parsed()) return finish(nonloc::run_solve(cfg), cfg, opt);
        if (barrier->parsed()) return finish(nonloc::run_barrier_check(cfg), cfg, opt);
        return finish(nonloc::run_study(cfg, study_name), cfg, opt);
    } catch (const nonloc::config_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return exit_config;
    } catch (const nonloc::certification_error& e) {
        std::fprintf(stderr, "certification failed: %s\n", e.what());
        return exit_threshold;
    } catch (const nonloc::internal_error& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return exit_internal;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_internal;
    }
}
