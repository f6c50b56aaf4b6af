#include "phi4/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>

#include "phi4/experiments.hpp"
#include "phi4/gibbs.hpp"
#include "phi4/manifest.hpp"
#include "phi4/paracontrolled.hpp"

namespace phi4 {

namespace {

struct VerbIo {
    Config cfg;
    std::string out;
    RunManifest man;

    VerbIo(const std::string& verb, const Config& c, const std::string& out_dir) : cfg(c), out(out_dir) {
        std::filesystem::create_directories(out);
        man.verb = verb;
        man.config_text = c.canonical();
        man.seed = std::uint64_t(c.get_int("run.seed", 1));
        man.code_version = phi4_version();
        man.started_utc = utc_now();
    }
    std::string path(const std::string& name) const { return out + "/" + name; }
    void finish() {
        man.finished_utc = utc_now();
        man.write(path("manifest.json"));
    }
};

std::FILE* open_csv(const VerbIo& io, const std::string& name, RunManifest& man) {
    (void)man;
    std::FILE* fp = std::fopen(io.path(name).c_str(), "w");
    if (!fp) throw ConfigError("cannot open output " + io.path(name));
    return fp;
}

SimConfig sim_from(const Config& cfg) {
    SimConfig sc;
    sc.N = int(cfg.get_int("sim.n", 0));
    sc.m0 = cfg.get_double("sim.m0", 1.0);
    sc.lambda = cfg.get_double("sim.lambda", 0.1);
    sc.dt = cfg.get_double("sim.dt", 1e-3);
    sc.T = cfg.get_double("sim.t", 1.0);
    sc.seed = std::uint64_t(cfg.get_int("run.seed", 1));
    sc.chains = int(cfg.get_int("sim.chains", 1));
    sc.lambda0 = cfg.get_double("sim.lambda0", 1.0);
    sc.blowup_ceiling = cfg.get_double("sim.blowup_ceiling", 1e6);
    const std::string scheme = cfg.get_str("sim.scheme", "exponential-euler");
    if (scheme == "exponential-euler")
        sc.scheme = Scheme::exponential_euler;
    else if (scheme == "tamed-euler")
        sc.scheme = Scheme::tamed_euler;
    else
        throw ConfigError("sim.scheme must be exponential-euler or tamed-euler");
    sc.validate();
    return sc;
}

GibbsConfig gibbs_from(const Config& cfg) {
    GibbsConfig gc;
    gc.mala_step = cfg.get_double("gibbs.step", 0.5);
    gc.thinning = int(cfg.get_int("gibbs.thinning", 20));
    gc.burn_steps = int(cfg.get_int("gibbs.burn", 500));
    gc.n_steps = int(cfg.get_int("gibbs.samples", 1000));
    gc.acc_lo = cfg.get_double("gibbs.acc_lo", 0.4);
    gc.acc_hi = cfg.get_double("gibbs.acc_hi", 0.8);
    if (!(gc.mala_step > 0.0)) throw ConfigError("gibbs.step must be positive");
    return gc;
}

const std::vector<std::string> kCommonKeys{"run.verb", "run.seed", "run.threads"};
const std::vector<std::string> kSimKeys{"sim.n",      "sim.m0",     "sim.lambda",
                                        "sim.dt",     "sim.t",      "sim.scheme",
                                        "sim.chains", "sim.lambda0", "sim.blowup_ceiling"};
const std::vector<std::string> kGibbsKeys{"gibbs.step",   "gibbs.thinning", "gibbs.burn",
                                          "gibbs.samples", "gibbs.acc_lo",   "gibbs.acc_hi"};

std::vector<std::string> allowed(std::initializer_list<std::vector<std::string>> groups,
                                 std::initializer_list<const char*> extra) {
    std::vector<std::string> keys;
    for (const auto& g : groups) keys.insert(keys.end(), g.begin(), g.end());
    for (const char* e : extra) keys.emplace_back(e);
    return keys;
}

// ---- renorm-constants ---------------------------------------------------------

int verb_renorm(VerbIo& io) {
    io.cfg.check_known(allowed({kCommonKeys}, {"renorm.n_max", "renorm.m0", "renorm.budget"}));
    const int n_max = int(io.cfg.get_int("renorm.n_max", 2));
    const MassParam m(io.cfg.get_double("renorm.m0", 1.0));
    const std::int64_t budget = io.cfg.get_int("renorm.budget", 400000000);
    const CutoffProfile prof = default_profile();
    std::FILE* fp = open_csv(io, "renorm_constants.csv", io.man);
    std::fprintf(fp, "N,c1,c2\n");
    for (int N = 0; N <= n_max; ++N) {
        const double c1 = renorm_c1(N, m, prof);
        const double c2 = renorm_c2(N, m, prof, budget);
        std::fprintf(fp, "%d,%.17g,%.17g\n", N, c1, c2);
        std::printf("N=%d  C1=%.12g  C2=%.12g\n", N, c1, c2);
    }
    std::fclose(fp);
    io.man.add_output(io.out, "renorm_constants.csv");
    return 0;
}

// ---- besov ---------------------------------------------------------------------

int verb_besov(VerbIo& io) {
    io.cfg.check_known(allowed({kCommonKeys}, {"besov.snapshot", "besov.p"}));
    const SpectralField f = load_snapshot(io.cfg.get_str("besov.snapshot"));
    const std::string ps = io.cfg.get_str("besov.p", "2");
    const LebesgueExp p = (ps == "inf") ? LebesgueExp::inf() : LebesgueExp::finite(std::stod(ps));
    const DyadicPartition P = build_partition();
    std::FILE* fp = open_csv(io, "block_norms.csv", io.man);
    std::fprintf(fp, "j,block_lp\n");
    for (int j = -1; j <= P.j_max(f.K.radius()); ++j) {
        const double a = lp_norm(dyadic_block(j, f, P), p);
        std::fprintf(fp, "%d,%.17g\n", j, a);
        std::printf("%d,%.17g\n", j, a);
    }
    std::fclose(fp);
    io.man.add_output(io.out, "block_norms.csv");
    return 0;
}

// ---- commutator-scan --------------------------------------------------------------

int verb_commutator_scan(VerbIo& io) {
    io.cfg.check_known(allowed({kCommonKeys},
                               {"scan.alpha", "scan.beta", "scan.gamma", "scan.epsilon", "scan.kxy",
                                "scan.kz", "scan.t_min", "scan.t_max", "scan.points"}));
    const CutoffProfile prof = default_profile();
    const DyadicPartition P = build_partition();
    CommutatorScan scan = commutator_scan(
        io.cfg.get_double("scan.alpha", 0.5), io.cfg.get_double("scan.beta", -1.05),
        io.cfg.get_double("scan.gamma", -0.5), io.cfg.get_double("scan.epsilon", 0.1),
        int(io.cfg.get_int("scan.kxy", 64)), int(io.cfg.get_int("scan.kz", 2)),
        io.cfg.get_double("scan.t_min", 1e-4), io.cfg.get_double("scan.t_max", 1e-1),
        int(io.cfg.get_int("scan.points", 8)), std::uint64_t(io.cfg.get_int("run.seed", 1)), prof, P);
    std::FILE* fp = open_csv(io, "commutator_scan.csv", io.man);
    std::fprintf(fp, "t,norm,predicted_power\n");
    for (std::size_t i = 0; i < scan.t.size(); ++i)
        std::fprintf(fp, "%.17g,%.17g,%.17g\n", scan.t[i], scan.norm[i], scan.predicted[i]);
    std::fclose(fp);
    std::printf("fitted slope %.4f, predicted %.4f\n", scan.fitted_slope, scan.predicted_slope);
    std::FILE* fs = open_csv(io, "scan_summary.csv", io.man);
    std::fprintf(fs, "fitted_slope,predicted_slope\n%.17g,%.17g\n", scan.fitted_slope,
                 scan.predicted_slope);
    std::fclose(fs);
    io.man.add_output(io.out, "commutator_scan.csv");
    io.man.add_output(io.out, "scan_summary.csv");
    return 0;
}

// ---- trees ------------------------------------------------------------------------

int verb_trees(VerbIo& io) {
    io.cfg.check_known(allowed({kCommonKeys},
                               {"trees.n", "trees.m0", "trees.dt", "trees.t", "trees.burn_in",
                                "trees.burn_dt", "trees.snapshot_every", "trees.chains",
                                "trees.draws", "trees.dt_study"}));
    const int N = int(io.cfg.get_int("trees.n", 0));
    const MassParam m(io.cfg.get_double("trees.m0", 1.0));
    const CutoffProfile prof = default_profile();
    const DyadicPartition P = build_partition();
    const RenormConstants consts = renorm_constants(N, m, prof);
    const int threads = int(io.cfg.get_int("run.threads", 2));
    const std::uint64_t seed = std::uint64_t(io.cfg.get_int("run.seed", 1));

    std::FILE* fc = open_csv(io, "constants.csv", io.man);
    std::fprintf(fc, "N,c1,c2\n%d,%.17g,%.17g\n", N, consts.c1, consts.c2);
    std::fclose(fc);

    // Wick centering statistics over stationary draws (no burn-in needed)
    const int draws = int(io.cfg.get_int("trees.draws", 10000));
    std::vector<double> w2(std::size_t(draws), 0.0), w3(std::size_t(draws), 0.0);
    const double cm = std::pow(2.0 * M_PI, 1.5);
    parallel_for(draws, threads, [&](int i) {
        OUParams op;
        op.N = N;
        op.m0 = m.m0;
        op.K = Cutoff(project_support(1, N));
        op.seed = seed;
        op.chain = std::uint64_t(i);
        OUEnsemble e = ou_init_stationary(op);
        const WickPowers w = wick_powers(e, consts, prof);
        cplx s2(0.0), s3(0.0);
        for (const auto& z : w.z2.c) s2 += z;
        for (const auto& z : w.z3.c) s3 += z;
        w2[std::size_t(i)] = s2.real() / cm;  // field value at x = 0
        w3[std::size_t(i)] = s3.real() / cm;
    });
    StatReport rep;
    rep.z_threshold = 4.0;
    auto add = [&rep](const std::string& name, const MeanSE& m_, double target) {
        StatLine l;
        l.observable = name;
        l.estimate = m_.mean;
        l.se = m_.se;
        l.target = target;
        l.z = z_score(m_, target);
        l.pass = std::abs(l.z) < rep.z_threshold;
        l.se_reliable = m_.reliable;
        rep.lines.push_back(l);
    };
    add("wick2_mean_at_origin", mean_se(w2), 0.0);
    add("wick3_mean_at_origin", mean_se(w3), 0.0);

    // time-discretized resonant centering: report the residual versus dt
    if (io.cfg.get_bool("trees.dt_study", true)) {
        const int chains = int(io.cfg.get_int("trees.chains", 64));
        const double burn = io.cfg.get_double("trees.burn_in", recommended_burn_in(m.m0));
        std::FILE* fr = open_csv(io, "resonant_residual.csv", io.man);
        std::fprintf(fr, "dt,residual_mean,se\n");
        for (double dt : {2e-2, 1e-2, 5e-3}) {
            std::vector<double> r22(std::size_t(chains), 0.0);
            parallel_for(chains, threads, [&](int c) {
                OUParams op;
                op.N = N;
                op.m0 = m.m0;
                op.K = Cutoff(project_support(1, N));
                op.seed = seed + 1;
                op.chain = std::uint64_t(c);
                OUEnsemble e = ou_init_stationary(op);
                tree_start(e, consts, prof);
                const int steps = int(std::ceil(burn / dt));
                for (int s = 0; s < steps; ++s) tree_convolved_step(e, dt, consts, prof);
                ResonantTrees rt = tree_resonant(e, consts, prof, P);
                cplx s22(0.0);
                for (const auto& z : rt.z22.c) s22 += z;
                r22[std::size_t(c)] = s22.real() / cm;
            });
            MeanSE ms = mean_se(r22);
            std::fprintf(fr, "%.17g,%.17g,%.17g\n", dt, ms.mean, ms.se);
        }
        std::fclose(fr);
        io.man.add_output(io.out, "resonant_residual.csv");
    }

    // tree snapshots along one path
    const int snap_every = int(io.cfg.get_int("trees.snapshot_every", 0));
    if (snap_every > 0) {
        const double dt = io.cfg.get_double("trees.dt", 1e-2);
        const double T = io.cfg.get_double("trees.t", 0.2);
        const double burn = io.cfg.get_double("trees.burn_in", recommended_burn_in(m.m0));
        const double burn_dt = io.cfg.get_double("trees.burn_dt", 5e-3);
        OUParams op;
        op.N = N;
        op.m0 = m.m0;
        op.K = Cutoff(project_support(1, N));
        op.seed = seed;
        OUEnsemble e = ou_init_stationary(op);
        tree_start(e, consts, prof);
        if (burn < minimum_burn_in(m.m0))
            std::fprintf(stderr, "warning: burn-in %.3g below 10/m0^2 = %.3g\n", burn,
                         minimum_burn_in(m.m0));
        for (int s = 0; s < int(std::ceil(burn / burn_dt)); ++s)
            tree_convolved_step(e, burn_dt, consts, prof);
        const int steps = int(std::llround(T / dt));
        for (int s = 0; s <= steps; ++s) {
            if (s % snap_every == 0) {
                const WickPowers w = wick_powers(e, consts, prof);
                const ResonantTrees rt = tree_resonant(e, consts, prof, P);
                const std::string tag = "t" + std::to_string(s);
                save_snapshot(w.z2, io.path("tree_z2_" + tag + ".phi4"));
                save_snapshot(w.z3, io.path("tree_z3_" + tag + ".phi4"));
                save_snapshot(rt.z22, io.path("tree_z22_" + tag + ".phi4"));
                save_snapshot(rt.z23, io.path("tree_z23_" + tag + ".phi4"));
                io.man.add_output(io.out, "tree_z2_" + tag + ".phi4");
                io.man.add_output(io.out, "tree_z3_" + tag + ".phi4");
                io.man.add_output(io.out, "tree_z22_" + tag + ".phi4");
                io.man.add_output(io.out, "tree_z23_" + tag + ".phi4");
            }
            if (s < steps) tree_convolved_step(e, dt, consts, prof);
        }
    }

    rep.write_csv(io.path("tree_stats.csv"));
    io.man.add_output(io.out, "tree_stats.csv");
    io.man.add_output(io.out, "constants.csv");
    std::fputs(rep.text().c_str(), stdout);
    return rep.all_pass() ? 0 : 1;
}

// ---- simulate -----------------------------------------------------------------------

int verb_simulate(VerbIo& io) {
    io.cfg.check_known(
        allowed({kCommonKeys, kSimKeys, kGibbsKeys}, {"simulate.init", "simulate.obs_every"}));
    SimConfig sc = sim_from(io.cfg);
    const CutoffProfile prof = default_profile();
    const RenormConstants consts = renorm_constants(sc.N, MassParam(sc.m0), prof);
    const int threads = int(io.cfg.get_int("run.threads", 2));
    const int obs_every = int(io.cfg.get_int("simulate.obs_every", 10));
    const std::string init = io.cfg.get_str("simulate.init", "free");
    const int steps = int(std::llround(sc.T / sc.dt));
    const int n_obs_times = steps / obs_every + 1;

    std::vector<SpectralField> inits{std::size_t(sc.chains)};
    if (init == "gibbs") {
        inits = sample_gibbs_ensemble(sc.chains, gibbs_from(io.cfg), sc, consts, prof, 16, threads);
    } else if (init == "free") {
        parallel_for(sc.chains, threads,
                     [&](int i) { inits[std::size_t(i)] = sample_free(sc, std::uint64_t(i), 0); });
    } else {
        throw ConfigError("simulate.init must be free or gibbs");
    }
    parallel_for(sc.chains, threads, [&](int i) {
        inits[std::size_t(i)] = project(2, sc.N, inits[std::size_t(i)], prof);
    });

    // time series of the two physical observables, averaged across chains
    std::vector<std::vector<double>> l2s(std::size_t(n_obs_times),
                                         std::vector<double>(std::size_t(sc.chains)));
    std::vector<std::vector<double>> q4s = l2s;
    parallel_for(sc.chains, threads, [&](int c) {
        SdeState st;
        st.y = inits[std::size_t(c)];
        st.chain = std::uint64_t(c);
        int slot = 0;
        auto record = [&]() {
            const auto o = observe(st.y, sc, prof);
            l2s[std::size_t(slot)][std::size_t(c)] = o[0];
            q4s[std::size_t(slot)][std::size_t(c)] = o[1];
            ++slot;
        };
        record();
        for (int s = 0; s < steps; ++s) {
            step_sde(st, sc, consts, prof, true);
            if ((s + 1) % obs_every == 0) record();
        }
        if (c == 0) save_snapshot(st.y, io.path("final_state.phi4"));
    });

    std::FILE* fp = open_csv(io, "timeseries.csv", io.man);
    std::fprintf(fp, "t,l2_sq_mean,l2_sq_se,quartic_mean,quartic_se\n");
    std::vector<double> kb_l2, kb_q4;
    for (int i = 0; i < n_obs_times; ++i) {
        MeanSE a = mean_se(l2s[std::size_t(i)]);
        MeanSE b = mean_se(q4s[std::size_t(i)]);
        std::fprintf(fp, "%.17g,%.17g,%.17g,%.17g,%.17g\n", sc.dt * obs_every * i, a.mean, a.se,
                     b.mean, b.se);
        kb_l2.push_back(l2s[std::size_t(i)][0]);
        kb_q4.push_back(q4s[std::size_t(i)][0]);
    }
    std::fclose(fp);

    // Krylov-Bogoliubov time averages along chain 0
    std::FILE* fk = open_csv(io, "kb_averages.csv", io.man);
    std::fprintf(fk, "observable,time_average\n");
    std::fprintf(fk, "l2_norm_sq,%.17g\n", kb_average(kb_l2, sc.dt * obs_every));
    std::fprintf(fk, "quartic_P1,%.17g\n", kb_average(kb_q4, sc.dt * obs_every));
    std::fclose(fk);

    io.man.add_output(io.out, "timeseries.csv");
    io.man.add_output(io.out, "kb_averages.csv");
    io.man.add_output(io.out, "final_state.phi4");
    return 0;
}

// ---- sample-gibbs ---------------------------------------------------------------------

int verb_sample_gibbs(VerbIo& io) {
    io.cfg.check_known(allowed({kCommonKeys, kSimKeys, kGibbsKeys}, {"gibbs.chains"}));
    SimConfig sc = sim_from(io.cfg);
    GibbsConfig gc = gibbs_from(io.cfg);
    const CutoffProfile prof = default_profile();
    const RenormConstants consts = renorm_constants(sc.N, MassParam(sc.m0), prof);
    const int threads = int(io.cfg.get_int("run.threads", 2));
    const int n_chains = int(io.cfg.get_int("gibbs.chains", 16));
    const int n = gc.n_steps;

    std::vector<SpectralField> samples{std::size_t(n)};
    std::vector<double> acceptance(std::size_t(n_chains), 0.0);
    parallel_for(n_chains, threads, [&](int c) {
        GibbsSampler sampler(gc, sc, consts, prof, std::uint64_t(c));
        sampler.burn();
        for (int i = c; i < n; i += n_chains) samples[std::size_t(i)] = sampler.sample();
        acceptance[std::size_t(c)] = sampler.acceptance_rate();
    });

    bool acc_ok = true;
    std::FILE* fa = open_csv(io, "acceptance.csv", io.man);
    std::fprintf(fa, "chain,acceptance\n");
    for (int c = 0; c < n_chains; ++c) {
        std::fprintf(fa, "%d,%.6f\n", c, acceptance[std::size_t(c)]);
        if (sc.lambda > 0.0 &&
            (acceptance[std::size_t(c)] < gc.acc_lo || acceptance[std::size_t(c)] > gc.acc_hi))
            acc_ok = false;
    }
    std::fclose(fa);
    if (!acc_ok)
        std::fprintf(stderr,
                     "warning: acceptance outside [%.2f, %.2f]; tune gibbs.step "
                     "(larger step lowers acceptance)\n",
                     gc.acc_lo, gc.acc_hi);

    std::vector<std::vector<double>> obs(observable_names(sc).size(),
                                         std::vector<double>(std::size_t(n)));
    parallel_for(n, threads, [&](int i) {
        const auto o = observe(samples[std::size_t(i)], sc, prof);
        for (std::size_t j = 0; j < o.size(); ++j) obs[j][std::size_t(i)] = o[j];
    });
    std::FILE* fp = open_csv(io, "gibbs_stats.csv", io.man);
    std::fprintf(fp, "observable,estimate,se\n");
    const auto names = observable_names(sc);
    for (std::size_t j = 0; j < names.size(); ++j) {
        MeanSE m = mean_se(obs[j]);
        std::fprintf(fp, "%s,%.17g,%.17g\n", names[j].c_str(), m.mean, m.se);
    }
    std::fclose(fp);
    save_snapshot(samples[0], io.path("sample0.phi4"));
    io.man.add_output(io.out, "acceptance.csv");
    io.man.add_output(io.out, "gibbs_stats.csv");
    io.man.add_output(io.out, "sample0.phi4");
    return 0;
}

// ---- verify-invariance -------------------------------------------------------------------

int verb_verify_invariance(VerbIo& io) {
    io.cfg.check_known(allowed({kCommonKeys, kSimKeys, kGibbsKeys},
                               {"inv.chains", "inv.dt_ladder", "inv.checkpoints", "inv.z",
                                "inv.control_z", "inv.with_control"}));
    InvarianceConfig ic;
    ic.sim = sim_from(io.cfg);
    ic.gibbs = gibbs_from(io.cfg);
    ic.n_chains = int(io.cfg.get_int("inv.chains", 1000));
    if (io.cfg.has("inv.dt_ladder")) ic.dt_ladder = io.cfg.get_list("inv.dt_ladder");
    if (io.cfg.has("inv.checkpoints")) ic.checkpoints = io.cfg.get_list("inv.checkpoints");
    ic.threads = int(io.cfg.get_int("run.threads", 2));
    const double z_main = io.cfg.get_double("inv.z", 3.0);
    const double z_control = io.cfg.get_double("inv.control_z", 4.0);
    const CutoffProfile prof = default_profile();
    const RenormConstants consts = renorm_constants(ic.sim.N, MassParam(ic.sim.m0), prof);

    InvarianceReport rep = invariance_test(ic, consts, prof);

    StatReport sr;
    sr.z_threshold = z_main;
    for (const InvarianceEntry& e : rep.entries) {
        StatLine l;
        l.observable = "drift_" + e.name;
        l.estimate = e.after.mean;
        l.target = e.before.mean;
        l.se = std::sqrt(e.after.se * e.after.se + e.before.se * e.before.se);
        l.z = e.z;
        l.pass = std::abs(e.z) < z_main;
        sr.lines.push_back(l);
    }
    for (std::size_t c = 0; c < rep.checkpoint_l2.size(); ++c) {
        StatLine l;
        l.observable = "l2_checkpoint_t" + std::to_string(rep.checkpoint_times[c]);
        l.estimate = rep.checkpoint_l2[c].mean;
        l.target = rep.entries[0].before.mean;
        l.se = std::sqrt(rep.checkpoint_l2[c].se * rep.checkpoint_l2[c].se +
                         rep.entries[0].before.se * rep.entries[0].before.se);
        l.z = (l.estimate - l.target) / l.se;
        l.pass = std::abs(l.z) < z_main;
        sr.lines.push_back(l);
    }
    // dt-ladder residual ordering (coarsest first must not increase)
    {
        std::vector<std::size_t> order(rep.dt_ladder.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return rep.dt_ladder[a] > rep.dt_ladder[b]; });
        bool mono = true;
        for (std::size_t i = 1; i < order.size(); ++i)
            if (rep.ladder_residual_l2[order[i]] > rep.ladder_residual_l2[order[i - 1]]) mono = false;
        StatLine l;
        l.observable = "l2_residual_monotone_in_dt";
        l.estimate = rep.ladder_residual_l2.back();
        l.target = 0.0;
        l.z = 0.0;
        l.pass = mono;
        sr.lines.push_back(l);
    }
    // lambda = 0 control
    if (io.cfg.get_bool("inv.with_control", true) && ic.sim.lambda > 0.0) {
        InvarianceConfig ctrl = ic;
        ctrl.sim.lambda = 0.0;
        ctrl.dt_ladder = {ic.sim.dt};
        InvarianceReport crep = invariance_test(ctrl, consts, prof);
        StatLine l;
        l.observable = "control_lambda0_max_z";
        l.estimate = crep.z_max;
        l.target = 0.0;
        l.z = crep.z_max;
        l.pass = crep.z_max < z_control;
        sr.lines.push_back(l);
    }

    sr.write_csv(io.path("invariance_report.csv"));
    std::FILE* ft = std::fopen(io.path("invariance_report.txt").c_str(), "w");
    std::fputs(sr.text().c_str(), ft);
    std::fclose(ft);
    std::FILE* fl = open_csv(io, "ladder_residuals.csv", io.man);
    std::fprintf(fl, "dt,residual_l2,residual_quartic\n");
    for (std::size_t i = 0; i < rep.dt_ladder.size(); ++i)
        std::fprintf(fl, "%.17g,%.17g,%.17g\n", rep.dt_ladder[i], rep.ladder_residual_l2[i],
                     rep.ladder_residual_quartic[i]);
    std::fclose(fl);
    io.man.add_output(io.out, "invariance_report.csv");
    io.man.add_output(io.out, "invariance_report.txt");
    io.man.add_output(io.out, "ladder_residuals.csv");
    std::fputs(sr.text().c_str(), stdout);
    return sr.all_pass() ? 0 : 1;
}

// ---- diagnostics -----------------------------------------------------------------------------

int verb_diagnostics(VerbIo& io) {
    io.cfg.check_known(allowed({kCommonKeys, kSimKeys, kGibbsKeys},
                               {"diag.seeds", "diag.n_list", "diag.burn_in", "diag.burn_dt",
                                "diag.holder_stride", "diag.snapshot_stride", "diag.init",
                                "energy.eta", "energy.gamma", "energy.epsilon", "energy.q"}));
    SimConfig base = sim_from(io.cfg);
    EnergyParams ep;
    ep.eta = io.cfg.get_double("energy.eta", 0.4);
    ep.gamma = io.cfg.get_double("energy.gamma", 0.1);
    ep.epsilon = io.cfg.get_double("energy.epsilon", 0.04);
    ep.q = io.cfg.get_double("energy.q", 1.1);
    ep.validate(true);
    const int seeds = int(io.cfg.get_int("diag.seeds", 30));
    std::vector<double> n_list{0.0};
    if (io.cfg.has("diag.n_list")) n_list = io.cfg.get_list("diag.n_list");
    const int threads = int(io.cfg.get_int("run.threads", 2));
    const CutoffProfile prof = default_profile();
    const DyadicPartition P = build_partition();

    std::FILE* ff = open_csv(io, "functionals.csv", io.man);
    std::fprintf(ff, "N,seed,energy_X,energy_Y,energy_Y_pow_q,sup_lt,sup_geq,final_gap\n");
    std::FILE* fs = open_csv(io, "summary.csv", io.man);
    std::fprintf(fs, "N,mean_X,relspread_X,mean_Yq,relspread_Yq\n");

    bool integrands_written = false;
    for (double Nd : n_list) {
        const int N = int(Nd);
        SimConfig sc = base;
        sc.N = N;
        const RenormConstants consts = renorm_constants(N, MassParam(sc.m0), prof);
        std::vector<double> exs(std::size_t(seeds), 0.0), eyqs(std::size_t(seeds), 0.0);
        std::vector<std::array<double, 6>> rows{std::size_t(seeds)};
        parallel_for(seeds, threads, [&](int s) {
            SplitRunConfig rc;
            rc.sim = sc;
            rc.sim.seed = sc.seed + std::uint64_t(s);
            rc.chain = std::uint64_t(s);
            rc.burn_in = io.cfg.get_double("diag.burn_in", recommended_burn_in(sc.m0));
            rc.burn_dt = io.cfg.get_double("diag.burn_dt", 5e-3);
            rc.snapshot_stride = int(io.cfg.get_int("diag.snapshot_stride", 1));
            rc.init_from_gibbs = io.cfg.get_str("diag.init", "gibbs") == "gibbs";
            rc.gibbs = gibbs_from(io.cfg);
            SplitRunResult res = run_split_common_path(rc, consts, prof, P);
            const int stride = int(io.cfg.get_int("diag.holder_stride", 4));
            const double ex = energy_X(res.traj, ep, sc.lambda, N, prof, stride);
            const double ey = energy_Y(res.traj, ep, P);
            rows[std::size_t(s)] = {ex,
                                    ey,
                                    std::pow(ey, ep.q),
                                    sup_weighted_lt(res.traj, ep, P),
                                    sup_weighted_geq(res.traj, ep, P),
                                    res.gap_l2.back()};
            exs[std::size_t(s)] = ex;
            eyqs[std::size_t(s)] = std::pow(ey, ep.q);
            if (s == 0 && !integrands_written) {
                std::FILE* fi = std::fopen((io.out + "/integrands_N" + std::to_string(N) + ".csv").c_str(), "w");
                std::fprintf(fi, "t,grad_geq_l2_sq,x2_l2_sq,quartic_P1,besov_lt,besov_geq,gap_l2\n");
                for (std::size_t i = 0; i < res.traj.times.size(); ++i) {
                    const SpectralField& x2 = res.traj.x2[i];
                    const SpectralField p1x2 =
                        truncate(project(1, N, x2, prof), Cutoff(project_support(1, N)));
                    double grd = 0.0;
                    for (int kx = -x2.K.x; kx <= x2.K.x; ++kx)
                        for (int ky = -x2.K.y; ky <= x2.K.y; ++ky)
                            for (int kz = -x2.K.z; kz <= x2.K.z; ++kz)
                                grd += (double(kx) * kx + double(ky) * ky + double(kz) * kz) *
                                       std::norm(res.traj.x_geq[i].at(kx, ky, kz));
                    std::fprintf(fi, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                                 res.traj.times[i], grd, std::pow(l2_norm(x2), 2.0),
                                 std::pow(lp_norm(p1x2, 4.0), 4.0),
                                 std::pow(besov_norm(res.traj.x_lt[i], 1.0 - ep.epsilon, 4.0, P), 3.0),
                                 besov_norm(res.traj.x_geq[i], 1.0 + ep.epsilon, 4.0 / 3.0, P),
                                 res.gap_l2[i]);
                }
                std::fclose(fi);
            }
        });
        integrands_written = true;
        for (int s = 0; s < seeds; ++s)
            std::fprintf(ff, "%d,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", N, s,
                         rows[std::size_t(s)][0], rows[std::size_t(s)][1], rows[std::size_t(s)][2],
                         rows[std::size_t(s)][3], rows[std::size_t(s)][4], rows[std::size_t(s)][5]);
        MeanSE mx = mean_se(exs), myq = mean_se(eyqs);
        const double sx = mx.se * std::sqrt(double(seeds));
        const double syq = myq.se * std::sqrt(double(seeds));
        std::fprintf(fs, "%d,%.17g,%.17g,%.17g,%.17g\n", N, mx.mean,
                     mx.mean != 0.0 ? sx / std::abs(mx.mean) : 0.0, myq.mean,
                     myq.mean != 0.0 ? syq / std::abs(myq.mean) : 0.0);
    }
    std::fclose(ff);
    std::fclose(fs);
    io.man.add_output(io.out, "functionals.csv");
    io.man.add_output(io.out, "summary.csv");
    return 0;
}

// ---- calibrate --------------------------------------------------------------------------------

int verb_calibrate(VerbIo& io) {
    io.cfg.check_known(allowed({kCommonKeys}, {"calibrate.headroom"}));
    const double headroom = io.cfg.get_double("calibrate.headroom", 1.10);
    const DyadicPartition P = build_partition();
    const CutoffProfile prof = default_profile();
    std::map<std::string, double> q = measure_regression_quantities(P, prof);
    for (auto& [name, value] : q) value *= headroom;
    write_bounds(q, io.path("regression_bounds.txt"));
    io.man.add_output(io.out, "regression_bounds.txt");
    std::printf("wrote %zu calibrated bounds (headroom %.2f)\n", q.size(), headroom);
    return 0;
}

} // namespace

int run_verb(const std::string& verb, const Config& cfg, const std::string& out_dir) {
    VerbIo io(verb, cfg, out_dir);
    int rc = 0;
    if (verb == "renorm-constants")
        rc = verb_renorm(io);
    else if (verb == "besov")
        rc = verb_besov(io);
    else if (verb == "commutator-scan")
        rc = verb_commutator_scan(io);
    else if (verb == "trees")
        rc = verb_trees(io);
    else if (verb == "simulate")
        rc = verb_simulate(io);
    else if (verb == "sample-gibbs")
        rc = verb_sample_gibbs(io);
    else if (verb == "verify-invariance")
        rc = verb_verify_invariance(io);
    else if (verb == "diagnostics")
        rc = verb_diagnostics(io);
    else if (verb == "calibrate")
        rc = verb_calibrate(io);
    else
        throw ConfigError("unknown verb '" + verb + "'");
    io.finish();
    return rc;
}

std::string resolve_out_dir(const std::string& cli_out) {
    if (!cli_out.empty()) return cli_out;
    if (const char* env = std::getenv("PHI4_OUTPUT_DIR")) return env;
    return ".";
}

} // namespace phi4
