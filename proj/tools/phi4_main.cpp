// phi4: spectral workbench for the dynamical Phi^4 model on the 3-torus.
//
// Usage: phi4 <verb> <config-file> [--out DIR]
//        phi4 run <config-file> [--out DIR]   (verb taken from run.verb)
#include <CLI11.hpp>

#include <cstdio>
#include <exception>

#include "phi4/harness.hpp"

int main(int argc, char** argv) {
    CLI::App app{"phi4 spectral workbench"};
    app.require_subcommand(1);

    const std::vector<std::string> verbs{
        "simulate",  "sample-gibbs",     "verify-invariance", "trees", "renorm-constants",
        "besov",     "commutator-scan",  "diagnostics",       "calibrate", "run"};

    std::string config_path, out_dir;
    for (const std::string& v : verbs) {
        CLI::App* sub = app.add_subcommand(v, "run the '" + v + "' verb from a config file");
        sub->add_option("config", config_path, "key-value config file")->required();
        sub->add_option("--out", out_dir, "output directory (overrides PHI4_OUTPUT_DIR)");
    }

    CLI11_PARSE(app, argc, argv);

    try {
        const std::string verb_arg = app.get_subcommands().front()->get_name();
        phi4::Config cfg = phi4::Config::from_file(config_path);
        const std::string verb = verb_arg == "run" ? cfg.get_str("run.verb") : verb_arg;
        return phi4::run_verb(verb, cfg, phi4::resolve_out_dir(out_dir));
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
