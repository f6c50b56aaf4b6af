#include "phi4/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <thread>

namespace phi4 {

void SimConfig::validate() const {
    if (N < 0) throw FieldError("sim: N >= 0 required");
    if (!(m0 > 0.0)) throw FieldError("sim: m0 > 0 required");
    if (lambda < 0.0 || lambda > lambda0)
        throw FieldError("sim: lambda must lie in [0, lambda0]");
    if (!(dt > 0.0)) throw FieldError("sim: dt > 0 required");
    if (T < 0.0) throw FieldError("sim: T >= 0 required");
    if (noise_fine_steps < 1) throw FieldError("sim: noise_fine_steps >= 1 required");
    if (scheme == Scheme::tamed_euler) {
        const double kmax = double(grid_K());
        const double theta_max = 3.0 * kmax * kmax + m0 * m0;
        if (dt * theta_max >= 0.5)
            throw FieldError("sim: tamed-euler stability requires dt * max eigenvalue < 0.5");
    }
}

double energy_U(const SpectralField& phi, int N, double lambda, const RenormConstants& consts,
                const CutoffProfile& prof) {
    const SpectralField p = project(1, N, phi, prof);
    const double q4 = std::pow(lp_norm(p, 4.0), 4.0);
    const double q2 = l2_norm(p) * l2_norm(p);
    const double c = consts.c1 - 3.0 * lambda * consts.c2;
    return 0.25 * lambda * q4 - 1.5 * lambda * c * q2;
}

SpectralField interaction_drift(const SpectralField& phi, int N, double lambda,
                                const RenormConstants& consts, const CutoffProfile& prof) {
    const int K1 = project_support(1, N);
    const SpectralField p = truncate(project(1, N, phi, prof), Cutoff(std::min(K1, phi.K.x)));
    SpectralField cube = pointwise_product(pointwise_product(p, p), p);
    const double c = consts.c1 - 3.0 * lambda * consts.c2;
    cube -= 3.0 * c * truncate(p, cube.K);
    SpectralField d = project(1, N, cube, prof);
    d *= lambda;
    return truncate(d, Cutoff(std::min(K1, d.K.x)));
}

SpectralField drift(const SpectralField& y, const SimConfig& cfg, const RenormConstants& consts,
                    const CutoffProfile& prof) {
    SpectralField d(y.K, y.real_valued);
    const double m2 = cfg.m0 * cfg.m0;
    for (int kx = -y.K.x; kx <= y.K.x; ++kx)
        for (int ky = -y.K.y; ky <= y.K.y; ++ky)
            for (int kz = -y.K.z; kz <= y.K.z; ++kz) {
                const double theta = double(kx) * kx + double(ky) * ky + double(kz) * kz + m2;
                d.at(kx, ky, kz) = -theta * y.at(kx, ky, kz);
            }
    if (cfg.lambda != 0.0) d -= interaction_drift(y, cfg.N, cfg.lambda, consts, prof);
    return d;
}

void step_sde(SdeState& st, const SimConfig& cfg, const RenormConstants& consts,
              const CutoffProfile& prof, bool filter_noise) {
    const double dt = cfg.dt;
    const double m2 = cfg.m0 * cfg.m0;

    SpectralField F;
    const bool interacting = cfg.lambda != 0.0;
    if (interacting) F = interaction_drift(st.y, cfg.N, cfg.lambda, consts, prof);
    double tame = 1.0;
    if (cfg.scheme == Scheme::tamed_euler && interacting) tame = 1.0 / (1.0 + dt * l2_norm(F));

    SpectralField xi;
    if (cfg.noise_enabled) {
        xi = ou_noise_field(st.y.K, cfg.m0, dt, cfg.noise_fine_steps, st.step_index, cfg.seed,
                            st.chain);
        if (filter_noise) {
            for (int kx = -xi.K.x; kx <= xi.K.x; ++kx)
                for (int ky = -xi.K.y; ky <= xi.K.y; ++ky)
                    for (int kz = -xi.K.z; kz <= xi.K.z; ++kz)
                        xi.at(kx, ky, kz) *= prof.tensor(2, cfg.N, {kx, ky, kz});
        }
    }

    ou_decay(st.y, dt, cfg.m0);
    if (interacting) {
        for (int kx = -F.K.x; kx <= F.K.x; ++kx)
            for (int ky = -F.K.y; ky <= F.K.y; ++ky)
                for (int kz = -F.K.z; kz <= F.K.z; ++kz) {
                    const double theta = double(kx) * kx + double(ky) * ky + double(kz) * kz + m2;
                    const double phi1 = -std::expm1(-theta * dt) / theta;
                    st.y.at(kx, ky, kz) -= phi1 * tame * F.at(kx, ky, kz);
                }
    }
    if (cfg.noise_enabled) st.y += xi;
    st.step_index += std::uint64_t(cfg.noise_fine_steps);
    st.t += dt;

    const double norm = l2_norm(st.y);
    if (!(norm <= cfg.blowup_ceiling))
        throw BlowUpError("step_sde: ||Y||_{L2} = " + std::to_string(norm) + " exceeds ceiling " +
                          std::to_string(cfg.blowup_ceiling) + " at t = " + std::to_string(st.t));
}

// --- Gibbs sampler ------------------------------------------------------------

GibbsSampler::GibbsSampler(const GibbsConfig& gc, const SimConfig& sc, const RenormConstants& consts,
                           const CutoffProfile& prof, std::uint64_t chain)
    : gc_(gc), sc_(sc), consts_(consts), prof_(&prof), chain_(chain) {
    sc_.validate();
    const Cutoff K1(project_support(1, sc_.N));
    x_ = SpectralField(K1, true);
    const double m2 = sc_.m0 * sc_.m0;
    for (int kx = -K1.x; kx <= K1.x; ++kx)
        for (int ky = -K1.y; ky <= K1.y; ++ky)
            for (int kz = -K1.z; kz <= K1.z; ++kz) {
                const LatticePoint k{kx, ky, kz};
                if (!owns_pair(k)) continue;
                const double theta = k.norm2() + m2;
                RngStream st = mode_stream(sc_.seed, StreamPurpose::gibbs_init, chain_, k);
                if (kx == 0 && ky == 0 && kz == 0) {
                    x_.at(k) = cplx(st.gauss(0, 0) / std::sqrt(2.0 * theta), 0.0);
                } else {
                    const double sd = 0.5 / std::sqrt(theta);
                    const cplx v(sd * st.gauss(0, 0), sd * st.gauss(0, 1));
                    x_.at(k) = v;
                    x_.at(-k) = std::conj(v);
                }
            }
    drift_ = interaction_drift(x_, sc_.N, sc_.lambda, consts_, prof);
}

double GibbsSampler::log_target(const SpectralField& x, const SpectralField& /*dr*/) const {
    const double m2 = sc_.m0 * sc_.m0;
    double g = 0.0;
    for (int kx = -x.K.x; kx <= x.K.x; ++kx)
        for (int ky = -x.K.y; ky <= x.K.y; ++ky)
            for (int kz = -x.K.z; kz <= x.K.z; ++kz) {
                const double theta = double(kx) * kx + double(ky) * ky + double(kz) * kz + m2;
                g += theta * std::norm(x.at(kx, ky, kz));
            }
    // invariant density of the unit-noise dynamics: exp(-2U) d mu0~
    return -g - 2.0 * energy_U(x, sc_.N, sc_.lambda, consts_, *prof_);
}

void GibbsSampler::propose(SpectralField& out, const SpectralField& x, const SpectralField& dr,
                           std::uint64_t ctr) const {
    const double tau = gc_.mala_step;
    const double m2 = sc_.m0 * sc_.m0;
    out = SpectralField(x.K, true);
    for (int kx = -x.K.x; kx <= x.K.x; ++kx)
        for (int ky = -x.K.y; ky <= x.K.y; ++ky)
            for (int kz = -x.K.z; kz <= x.K.z; ++kz) {
                const LatticePoint k{kx, ky, kz};
                if (!owns_pair(k)) continue;
                const double theta = k.norm2() + m2;
                const double a = std::exp(-theta * tau);
                const double phi1 = -std::expm1(-theta * tau) / theta;
                const double v = -std::expm1(-2.0 * theta * tau) / (2.0 * theta);
                const cplx mean = a * x.at(k) - phi1 * dr.coeff(k);
                RngStream st = mode_stream(sc_.seed, StreamPurpose::mcmc, chain_, k);
                if (kx == 0 && ky == 0 && kz == 0) {
                    out.at(k) = cplx(mean.real() + std::sqrt(v) * st.gauss(ctr, 0), 0.0);
                } else {
                    const double sd = std::sqrt(0.5 * v);
                    const cplx noise(sd * st.gauss(ctr, 0), sd * st.gauss(ctr, 1));
                    out.at(k) = mean + noise;
                    out.at(-k) = std::conj(mean + noise);
                }
            }
}

double GibbsSampler::log_q(const SpectralField& to, const SpectralField& from,
                           const SpectralField& dr_from) const {
    const double tau = gc_.mala_step;
    const double m2 = sc_.m0 * sc_.m0;
    double lq = 0.0;
    for (int kx = -from.K.x; kx <= from.K.x; ++kx)
        for (int ky = -from.K.y; ky <= from.K.y; ++ky)
            for (int kz = -from.K.z; kz <= from.K.z; ++kz) {
                const LatticePoint k{kx, ky, kz};
                if (!owns_pair(k)) continue;
                const double theta = k.norm2() + m2;
                const double a = std::exp(-theta * tau);
                const double phi1 = -std::expm1(-theta * tau) / theta;
                const double v = -std::expm1(-2.0 * theta * tau) / (2.0 * theta);
                const cplx mean = a * from.at(k) - phi1 * dr_from.coeff(k);
                const cplx d = to.at(k) - mean;
                if (kx == 0 && ky == 0 && kz == 0)
                    lq -= d.real() * d.real() / (2.0 * v);
                else
                    lq -= std::norm(d) / v;
            }
    return lq;
}

void GibbsSampler::advance(int steps) {
    RngStream acc = scalar_stream(sc_.seed, StreamPurpose::mcmc, chain_);
    for (int s = 0; s < steps; ++s) {
        SpectralField prop;
        propose(prop, x_, drift_, n_steps_);
        SpectralField dr_prop = interaction_drift(prop, sc_.N, sc_.lambda, consts_, *prof_);
        const double la = log_target(prop, dr_prop) + log_q(x_, prop, dr_prop) -
                          log_target(x_, drift_) - log_q(prop, x_, drift_);
        const double u = acc.u01(n_steps_, 3);
        if (std::log(u) < la) {
            x_ = std::move(prop);
            drift_ = std::move(dr_prop);
            ++n_accept_;
        }
        ++n_steps_;
    }
}

SpectralField GibbsSampler::sample() {
    advance(gc_.thinning);
    const Cutoff K2(project_support(2, sc_.N));
    SpectralField full(K2, true);
    const double m2 = sc_.m0 * sc_.m0;
    for (int kx = -K2.x; kx <= K2.x; ++kx)
        for (int ky = -K2.y; ky <= K2.y; ++ky)
            for (int kz = -K2.z; kz <= K2.z; ++kz) {
                const LatticePoint k{kx, ky, kz};
                if (!owns_pair(k)) continue;
                if (x_.K.contains(k)) {
                    full.at(k) = x_.at(k);
                    full.at(-k) = std::conj(x_.at(k));
                    continue;
                }
                const double theta = k.norm2() + m2;
                RngStream st = mode_stream(sc_.seed, StreamPurpose::free_modes, chain_, k);
                const double sd = 0.5 / std::sqrt(theta);
                const cplx v(sd * st.gauss(emitted_, 0), sd * st.gauss(emitted_, 1));
                full.at(k) = v;
                full.at(-k) = std::conj(v);
            }
    ++emitted_;
    return full;
}

double GibbsSampler::acceptance_rate() const {
    return n_steps_ == 0 ? 1.0 : double(n_accept_) / double(n_steps_);
}

double GibbsSampler::detailed_balance_residual() {
    SpectralField prop;
    propose(prop, x_, drift_, n_steps_ + 7777);
    SpectralField dr_prop = interaction_drift(prop, sc_.N, sc_.lambda, consts_, *prof_);
    const double fwd = log_target(prop, dr_prop) + log_q(x_, prop, dr_prop) -
                       log_target(x_, drift_) - log_q(prop, x_, drift_);
    const double bwd = log_target(x_, drift_) + log_q(prop, x_, drift_) -
                       log_target(prop, dr_prop) - log_q(x_, prop, dr_prop);
    return std::abs(fwd + bwd);
}

void parallel_for(int n, int threads, const std::function<void(int)>& f) {
    const int nt = std::max(1, std::min(threads, n));
    if (nt == 1) {
        for (int i = 0; i < n; ++i) f(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(std::size_t(nt));
    for (int t = 0; t < nt; ++t)
        pool.emplace_back([&, t]() {
            for (int i = t; i < n; i += nt) f(i);
        });
    for (auto& th : pool) th.join();
}

std::vector<SpectralField> sample_gibbs_ensemble(int n, const GibbsConfig& gc, const SimConfig& sc,
                                                 const RenormConstants& consts,
                                                 const CutoffProfile& prof, int n_chains,
                                                 int threads) {
    std::vector<SpectralField> out{std::size_t(n)};
    const int nc = std::min(n_chains, std::max(1, n));
    parallel_for(nc, threads, [&](int c) {
        GibbsSampler sampler(gc, sc, consts, prof, std::uint64_t(c));
        sampler.burn();
        for (int i = c; i < n; i += nc) out[std::size_t(i)] = sampler.sample();
    });
    return out;
}

SpectralField sample_free(const SimConfig& sc, std::uint64_t chain, std::uint64_t tag) {
    const Cutoff K2(project_support(2, sc.N));
    SpectralField f(K2, true);
    const double m2 = sc.m0 * sc.m0;
    for (int kx = -K2.x; kx <= K2.x; ++kx)
        for (int ky = -K2.y; ky <= K2.y; ++ky)
            for (int kz = -K2.z; kz <= K2.z; ++kz) {
                const LatticePoint k{kx, ky, kz};
                if (!owns_pair(k)) continue;
                const double theta = k.norm2() + m2;
                RngStream st = mode_stream(sc.seed, StreamPurpose::initial_draw, chain, k);
                if (kx == 0 && ky == 0 && kz == 0) {
                    f.at(k) = cplx(st.gauss(tag, 0) / std::sqrt(2.0 * theta), 0.0);
                } else {
                    const double sd = 0.5 / std::sqrt(theta);
                    const cplx v(sd * st.gauss(tag, 0), sd * st.gauss(tag, 1));
                    f.at(k) = v;
                    f.at(-k) = std::conj(v);
                }
            }
    return f;
}

// --- invariance ----------------------------------------------------------------

namespace {
std::vector<LatticePoint> lowest_modes(int count) {
    std::vector<LatticePoint> owners;
    for (int kx = -2; kx <= 2; ++kx)
        for (int ky = -2; ky <= 2; ++ky)
            for (int kz = -2; kz <= 2; ++kz)
                if (owns_pair({kx, ky, kz})) owners.push_back({kx, ky, kz});
    std::sort(owners.begin(), owners.end(), [](const LatticePoint& a, const LatticePoint& b) {
        if (a.norm2() != b.norm2()) return a.norm2() < b.norm2();
        return std::tie(a.kx, a.ky, a.kz) < std::tie(b.kx, b.ky, b.kz);
    });
    owners.resize(std::size_t(count));
    return owners;
}
} // namespace

std::vector<std::string> observable_names(const SimConfig&) {
    std::vector<std::string> names{"l2_norm_sq", "quartic_P1"};
    for (const LatticePoint& k : lowest_modes(10))
        names.push_back("mode_sq_" + std::to_string(k.kx) + "_" + std::to_string(k.ky) + "_" +
                        std::to_string(k.kz));
    return names;
}

std::vector<double> observe(const SpectralField& x, const SimConfig& sc, const CutoffProfile& prof) {
    std::vector<double> obs;
    obs.reserve(12);
    const double l2 = l2_norm(x);
    obs.push_back(l2 * l2);
    const SpectralField p = truncate(project(1, sc.N, x, prof),
                                     Cutoff(std::min(project_support(1, sc.N), x.K.x)));
    obs.push_back(std::pow(lp_norm(p, 4.0), 4.0));
    for (const LatticePoint& k : lowest_modes(10)) obs.push_back(std::norm(x.coeff(k)));
    return obs;
}

bool InvarianceReport::pass(double z_threshold) const { return z_max < z_threshold; }

InvarianceReport invariance_test(const InvarianceConfig& ic, const RenormConstants& consts,
                                 const CutoffProfile& prof) {
    SimConfig sc = ic.sim;
    sc.validate();
    const double dt_min = *std::min_element(ic.dt_ladder.begin(), ic.dt_ladder.end());
    if (std::abs(sc.dt - dt_min) > 1e-15)
        throw FieldError("invariance_test: sim.dt must equal the finest ladder entry");

    const int n = ic.n_chains;
    const auto names = observable_names(sc);
    const std::size_t n_obs = names.size();

    // initial ensemble; the dynamics starts from X_0 = P2 xi, so the samples
    // are pushed through the rough projection
    std::vector<SpectralField> init{std::size_t(n)};
    if (sc.lambda == 0.0) {
        parallel_for(n, ic.threads, [&](int i) { init[std::size_t(i)] = sample_free(sc, std::uint64_t(i), 0); });
    } else {
        init = sample_gibbs_ensemble(n, ic.gibbs, sc, consts, prof, 16, ic.threads);
    }
    parallel_for(n, ic.threads,
                 [&](int i) { init[std::size_t(i)] = project(2, sc.N, init[std::size_t(i)], prof); });

    std::vector<std::vector<double>> before(n_obs, std::vector<double>(std::size_t(n)));
    parallel_for(n, ic.threads, [&](int i) {
        const auto o = observe(init[std::size_t(i)], sc, prof);
        for (std::size_t j = 0; j < n_obs; ++j) before[j][std::size_t(i)] = o[j];
    });

    InvarianceReport rep;
    rep.dt_ladder = ic.dt_ladder;
    rep.checkpoint_times = ic.checkpoints;

    for (double dt : ic.dt_ladder) {
        const int fine = int(std::llround(dt / dt_min));
        if (std::abs(fine * dt_min - dt) > 1e-12)
            throw FieldError("invariance_test: ladder entries must be multiples of the finest dt");
        SimConfig level = sc;
        level.dt = dt;
        level.noise_fine_steps = fine;
        const int steps = int(std::llround(sc.T / dt));
        const bool finest = fine == 1;

        std::vector<int> cp_steps;
        for (double ct : ic.checkpoints) cp_steps.push_back(int(std::llround(ct / dt)));

        std::vector<std::vector<double>> after(n_obs, std::vector<double>(std::size_t(n)));
        std::vector<std::vector<double>> cp_l2(ic.checkpoints.size(),
                                               std::vector<double>(std::size_t(n)));
        parallel_for(n, ic.threads, [&](int i) {
            SdeState st;
            st.y = init[std::size_t(i)];
            st.chain = std::uint64_t(i);
            for (int s = 0; s < steps; ++s) {
                step_sde(st, level, consts, prof, true);
                if (finest) {
                    for (std::size_t c = 0; c < cp_steps.size(); ++c)
                        if (s + 1 == cp_steps[std::size_t(c)]) {
                            const double l2 = l2_norm(st.y);
                            cp_l2[c][std::size_t(i)] = l2 * l2;
                        }
                }
            }
            const auto o = observe(st.y, sc, prof);
            for (std::size_t j = 0; j < n_obs; ++j) after[j][std::size_t(i)] = o[j];
        });

        rep.ladder_residual_l2.push_back(std::abs(mean_se(after[0]).mean - mean_se(before[0]).mean));
        rep.ladder_residual_quartic.push_back(
            std::abs(mean_se(after[1]).mean - mean_se(before[1]).mean));

        if (finest) {
            for (std::size_t j = 0; j < n_obs; ++j) {
                InvarianceEntry e;
                e.name = names[j];
                e.before = mean_se(before[j]);
                e.after = mean_se(after[j]);
                e.z = welch_z(e.after, e.before);
                rep.z_max = std::max(rep.z_max, std::abs(e.z));
                rep.entries.push_back(e);
            }
            for (std::size_t c = 0; c < ic.checkpoints.size(); ++c)
                rep.checkpoint_l2.push_back(mean_se(cp_l2[c]));
        }
    }
    return rep;
}

double kb_average(const std::vector<double>& values, double /*dt*/) {
    if (values.empty()) throw FieldError("kb_average: empty trajectory");
    if (values.size() == 1) return values[0];
    // trapezoidal integral over [0, T] divided by T; the step length cancels
    double acc = 0.5 * (values.front() + values.back());
    for (std::size_t i = 1; i + 1 < values.size(); ++i) acc += values[i];
    return acc / double(values.size() - 1);
}

} // namespace phi4
