// harness_cli: config parsing, manifests, reports, verb determinism.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "phi4/harness.hpp"
#include "phi4/manifest.hpp"
#include "phi4/stats.hpp"

using namespace phi4;

namespace {
std::string tmpdir(const std::string& name) {
    const std::string d = std::filesystem::temp_directory_path() / name;
    std::filesystem::remove_all(d);
    std::filesystem::create_directories(d);
    return d;
}
} // namespace

TEST_CASE("config parsing: sections, types, errors") {
    Config c = Config::from_string("a.x = 1.5\nb.y = inf # comment\n\n a.z = 7\n");
    CHECK(c.get_double("a.x") == 1.5);
    CHECK(c.get_str("b.y") == "inf");
    CHECK(c.get_int("a.z") == 7);
    CHECK(c.get_int("a.missing", 3) == 3);
    CHECK_THROWS_AS(Config::from_string("noseparator = 1\n"), ConfigError);
    CHECK_THROWS_AS(Config::from_string("a.x = 1\na.x = 2\n"), ConfigError);
    CHECK_THROWS_AS(Config::from_string("a.x 1\n"), ConfigError);
    CHECK_THROWS_AS(c.get_double("b.y"), ConfigError);
    CHECK_THROWS_AS(Config::from_string("a.x =\n"), ConfigError);

    Config list = Config::from_string("l.v = 1e-3, 2e-3 ,4e-3\n");
    const auto xs = list.get_list("l.v");
    CHECK(xs.size() == 3);
    CHECK(xs[1] == 2e-3);
}

TEST_CASE("unknown keys are hard errors with the key path") {
    Config c = Config::from_string("renorm.n_max = 1\nrenorm.mistyped = 2\nrun.seed = 1\n");
    const std::string dir = tmpdir("phi4_badkey");
    try {
        run_verb("renorm-constants", c, dir);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("renorm.mistyped") != std::string::npos);
    }
}

TEST_CASE("canonical form and digests are stable") {
    Config a = Config::from_string("b.y = 2\na.x = 1\n");
    Config b = Config::from_string("a.x = 1\n# order should not matter\nb.y = 2\n");
    CHECK(a.canonical() == b.canonical());
    CHECK(hex64(fnv1a64_str(a.canonical())) == hex64(fnv1a64_str(b.canonical())));
}

TEST_CASE("report verdicts and degenerate SE flag") {
    StatReport rep;
    rep.z_threshold = 3.0;
    StatLine l;
    l.observable = "x";
    l.estimate = 1.0;
    l.se = 0.1;
    l.target = 1.15;
    l.z = (l.estimate - l.target) / l.se;
    l.pass = std::abs(l.z) < rep.z_threshold;
    rep.lines.push_back(l);
    CHECK(rep.all_pass());
    l.target = 2.0;
    l.z = -10.0;
    l.pass = false;
    rep.lines.push_back(l);
    CHECK_FALSE(rep.all_pass());
    CHECK(rep.text().find("FAIL") != std::string::npos);

    MeanSE degenerate = batch_means_se({1.0, 2.0}, 30);
    CHECK_FALSE(degenerate.reliable);
}

TEST_CASE("re-running an identical config reproduces identical artifacts") {
    const std::string cfg_text =
        "run.seed = 9\nrun.threads = 2\ntrees.n = 0\ntrees.draws = 400\ntrees.chains = 8\n"
        "trees.dt_study = true\ntrees.burn_in = 2.0\n";
    Config c = Config::from_string(cfg_text);
    const std::string d1 = tmpdir("phi4_det1"), d2 = tmpdir("phi4_det2");
    run_verb("trees", c, d1);
    run_verb("trees", c, d2);
    for (const std::string f : {"constants.csv", "tree_stats.csv", "resonant_residual.csv"}) {
        CHECK(file_digest(d1 + "/" + f) == file_digest(d2 + "/" + f));
    }
    // thread count must not change the artifacts
    Config c1 = Config::from_string("run.seed = 9\nrun.threads = 1\ntrees.n = 0\ntrees.draws = 400\n"
                                    "trees.chains = 8\ntrees.dt_study = true\ntrees.burn_in = 2.0\n");
    const std::string d3 = tmpdir("phi4_det3");
    run_verb("trees", c1, d3);
    CHECK(file_digest(d1 + "/tree_stats.csv") == file_digest(d3 + "/tree_stats.csv"));
    CHECK(file_digest(d1 + "/resonant_residual.csv") == file_digest(d3 + "/resonant_residual.csv"));
}

TEST_CASE("empty-dynamics run produces a valid manifest") {
    Config c = Config::from_string(
        "run.seed = 5\nsim.t = 0\nsim.n = 0\nsim.lambda = 0.1\nsimulate.init = free\nsim.chains = 2\n");
    const std::string dir = tmpdir("phi4_empty");
    CHECK(run_verb("simulate", c, dir) == 0);
    CHECK(std::filesystem::exists(dir + "/manifest.json"));
    CHECK(std::filesystem::exists(dir + "/timeseries.csv"));
    std::ifstream in(dir + "/manifest.json");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(text.find("config_digest") != std::string::npos);
    CHECK(text.find("timeseries.csv") != std::string::npos);
}

TEST_CASE("besov verb round trip on a snapshot") {
    const std::string dir = tmpdir("phi4_besov");
    SpectralField f(Cutoff(2), true);
    f.at(0, 0, 0) = 1.0;
    f.at(1, 0, 0) = cplx(0.25, 0.1);
    f.at(-1, 0, 0) = cplx(0.25, -0.1);
    save_snapshot(f, dir + "/f.phi4");
    Config c = Config::from_string("run.seed = 1\nbesov.snapshot = " + dir + "/f.phi4\nbesov.p = 2\n");
    CHECK(run_verb("besov", c, dir) == 0);
    std::ifstream in(dir + "/block_norms.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "j,block_lp");
    int rows = 0;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) ++rows;
    CHECK(rows >= 2);
}

TEST_CASE("output directory resolution order") {
    CHECK(resolve_out_dir("explicit") == "explicit");
    setenv("PHI4_OUTPUT_DIR", "/tmp/phi4_env_dir", 1);
    CHECK(resolve_out_dir("") == "/tmp/phi4_env_dir");
    unsetenv("PHI4_OUTPUT_DIR");
    CHECK(resolve_out_dir("") == ".");
}
