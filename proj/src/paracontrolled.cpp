#include "phi4/paracontrolled.hpp"

#include <cmath>

namespace phi4 {

namespace {
const double kConstMode = std::pow(2.0 * M_PI, 1.5);

SpectralField P1(const SpectralField& f, int N, const CutoffProfile& prof) {
    return truncate(project(1, N, f, prof), Cutoff(std::min(project_support(1, N), f.K.x)));
}

// exponential-Euler increment: u <- e^{-dt theta} u + (1-e^{-dt theta})/theta * rhs
void exp_euler(SpectralField& u, const SpectralField& rhs, double dt, double m0) {
    ou_decay(u, dt, m0);
    const double m2 = m0 * m0;
    for (int kx = -rhs.K.x; kx <= rhs.K.x; ++kx)
        for (int ky = -rhs.K.y; ky <= rhs.K.y; ++ky)
            for (int kz = -rhs.K.z; kz <= rhs.K.z; ++kz) {
                const double theta = double(kx) * kx + double(ky) * ky + double(kz) * kz + m2;
                const cplx v = -std::expm1(-theta * dt) / theta * rhs.at(kx, ky, kz);
                if (u.K.contains({kx, ky, kz}))
                    u.at(kx, ky, kz) += v;
            }
}
} // namespace

void EnergyParams::validate(bool uniform_bound_suite) const {
    if (eta < 0.0 || eta >= 1.0) throw FieldError("energy params: eta in [0,1) required");
    if (!(gamma > 0.0 && gamma < 0.125)) throw FieldError("energy params: gamma in (0,1/8) required");
    if (!(epsilon > 0.0 && epsilon < 0.5 * gamma))
        throw FieldError("energy params: epsilon in (0, gamma/2) required");
    if (!(q > 1.0 && q < 8.0 / 7.0)) throw FieldError("energy params: q in (1, 8/7) required");
    if (uniform_bound_suite && !(eta > gamma + 0.25))
        throw FieldError("energy params: eta > gamma + 1/4 required for the uniform-bound suite");
}

std::pair<SpectralField, SpectralField> shift_fields(const SpectralField& x,
                                                     const SpectralField& z,
                                                     const SpectralField& z03, int N,
                                                     double lambda, const CutoffProfile& prof) {
    SpectralField p2z = truncate(project(2, N, z, prof), x.K);
    SpectralField x1 = x - p2z;
    SpectralField x2 = x1 + lambda * truncate(z03, x.K);
    return {std::move(x1), std::move(x2)};
}

TreeBundle tree_bundle(const OUEnsemble& ens, const RenormConstants& consts,
                       const CutoffProfile& prof, const DyadicPartition& P,
                       const SpectralField& tail2_at_t0, double t0) {
    TreeBundle tb;
    const WickPowers w = wick_powers(ens, consts, prof);
    tb.z1 = w.z1;
    tb.z2 = w.z2;
    tb.z03 = ens.conv3;
    const ResonantTrees r = tree_resonant(ens, consts, prof, P);
    tb.z22 = r.z22;
    tb.z23 = r.z23;
    tb.tail2_flow = semigroup(ens.t - t0, MassParam(ens.prm.m0), tail2_at_t0);
    return tb;
}

SplitState split_init(const SpectralField& x2_initial, int N, double m0, double lambda) {
    SplitState st;
    st.N = N;
    st.m0 = m0;
    st.lambda = lambda;
    st.x_geq = x2_initial;
    st.x_lt = SpectralField(x2_initial.K, true);
    const Cutoff K1(project_support(1, N));
    st.acc_I = SpectralField(K1, true);
    st.acc_B = SpectralField(K1, true);
    return st;
}

SpectralField split_rhs_lt(const SplitState& st, const TreeBundle& tb, const CutoffProfile& prof,
                           const DyadicPartition& P) {
    const double l = st.lambda;
    SpectralField w = P1(st.x_lt, st.N, prof) + P1(st.x_geq, st.N, prof);
    SpectralField v = w - l * truncate(tb.z03, w.K);
    SpectralField rhs = paraproduct(v, tb.z2, ParaKind::lt, P);
    rhs = project(1, st.N, rhs, prof);
    rhs *= -3.0 * l;
    return rhs;
}

namespace {
struct GeqTerms {
    SpectralField w, v;       // P x_lt + P x_geq and w - lambda z03
    SpectralField w2;         // w^2
    SpectralField phi1, phi2, phi3, psi1, psi2;
};

GeqTerms assemble_geq(const SplitState& st, const TreeBundle& tb, const CutoffProfile& prof,
                      const DyadicPartition& P) {
    const double l = st.lambda;
    GeqTerms g;
    g.w = P1(st.x_lt, st.N, prof) + P1(st.x_geq, st.N, prof);
    g.v = g.w - l * truncate(tb.z03, g.w.K);
    g.w2 = pointwise_product(g.w, g.w);

    // shared combinations
    SpectralField z1_shift = tb.z1 - l * truncate(tb.z03, tb.z1.K);          // Z1 - l Z03
    SpectralField pair = tb.z1 + (tb.z1 - l * truncate(tb.z03, tb.z1.K));    // 2 Z1 - l Z03
    SpectralField pair_z03 = pointwise_product(pair, tb.z03);                // (2 Z1 - l Z03) Z03

    g.phi1 = (-3.0) * paraproduct(z1_shift, g.w2, ParaKind::leq, P) +
             (3.0 * l) * paraproduct(pair_z03, g.w, ParaKind::leq, P);

    SpectralField z03sq = pointwise_product(tb.z03, tb.z03);
    SpectralField triple = pointwise_product(3.0 * tb.z1 - l * truncate(tb.z03, tb.z1.K), z03sq);
    SpectralField z22_corr = tb.z22 - paraproduct(tb.z2, tb.tail2_flow, ParaKind::res, P);
    g.phi2 = (-3.0) * paraproduct(g.v, tb.z2, ParaKind::gt, P) + (3.0 * l) * tb.z23 +
             (9.0 * l) * pointwise_product(g.v, z22_corr) - (l * l) * triple;

    g.phi3 = (-3.0) * paraproduct(z1_shift, g.w2, ParaKind::gt, P) +
             (3.0 * l) * paraproduct(pair_z03, g.w, ParaKind::gt, P);

    g.psi1 = st.acc_I - paraproduct(g.v, st.acc_B, ParaKind::lt, P);
    SpectralField v_accB = paraproduct(g.v, st.acc_B, ParaKind::lt, P);
    g.psi2 = paraproduct(v_accB, tb.z2, ParaKind::res, P) -
             pointwise_product(g.v, paraproduct(st.acc_B, tb.z2, ParaKind::res, P));
    return g;
}
} // namespace

SpectralField split_rhs_geq(const SplitState& st, const TreeBundle& tb, const CutoffProfile& prof,
                            const DyadicPartition& P) {
    const double l = st.lambda;
    GeqTerms g = assemble_geq(st, tb, prof, P);
    SpectralField cube = pointwise_product(g.w2, g.w);
    SpectralField rhs = (-l) * project(1, st.N, cube, prof);
    rhs += l * project(1, st.N, g.phi1, prof);
    rhs += l * project(1, st.N, g.phi2, prof);
    rhs += l * project(1, st.N, g.phi3, prof);
    rhs += (-3.0 * l) * project(1, st.N, paraproduct(P1(st.x_geq, st.N, prof), tb.z2, ParaKind::res, P), prof);
    rhs += (9.0 * l * l) * project(1, st.N, paraproduct(g.psi1, tb.z2, ParaKind::res, P), prof);
    rhs += (9.0 * l * l) * project(1, st.N, g.psi2, prof);
    return truncate(rhs, Cutoff(project_support(1, st.N)));
}

SpectralField unsplit_rhs(const SpectralField& x2, const TreeBundle& tb, double lambda, int N,
                          double c2, const CutoffProfile& prof, const DyadicPartition& P) {
    const double l = lambda;
    SpectralField w = truncate(project(1, N, x2, prof), Cutoff(std::min(project_support(1, N), x2.K.x)));
    SpectralField v = w - l * truncate(tb.z03, w.K);
    SpectralField v2 = pointwise_product(v, v);
    SpectralField v3 = pointwise_product(v2, v);
    SpectralField rhs = (-l) * project(1, N, v3, prof);
    rhs += (-3.0 * l) * project(1, N, pointwise_product(tb.z1, v2), prof);
    rhs += (-3.0 * l) * project(1, N, pointwise_product(tb.z2, v), prof);
    SpectralField lin = w + truncate(tb.z1, w.K) - l * truncate(tb.z03, w.K);
    rhs += (-9.0 * l * l * c2) * project(1, N, lin, prof);
    return truncate(rhs, Cutoff(project_support(1, N)));
}

void evolve_split(SplitState& st, const TreeBundle& tb, double dt, const CutoffProfile& prof,
                  const DyadicPartition& P) {
    // freeze every right side at time t, then apply the exponential update;
    // the accumulators use the same rule as the states, so P x_lt = -3 lambda acc_I
    // holds exactly in the discrete system
    SpectralField w = P1(st.x_lt, st.N, prof) + P1(st.x_geq, st.N, prof);
    SpectralField v = w - st.lambda * truncate(tb.z03, w.K);
    SpectralField para_v_z2 = paraproduct(v, tb.z2, ParaKind::lt, P);
    SpectralField rlt = (-3.0 * st.lambda) * project(1, st.N, para_v_z2, prof);
    SpectralField rgeq = split_rhs_geq(st, tb, prof, P);
    SpectralField fI = project(1, st.N, project(1, st.N, para_v_z2, prof), prof);
    SpectralField fB = project(1, st.N, project(1, st.N, tb.z2, prof), prof);

    exp_euler(st.x_lt, truncate(rlt, Cutoff(project_support(1, st.N))), dt, st.m0);
    exp_euler(st.x_geq, rgeq, dt, st.m0);
    exp_euler(st.acc_I, truncate(fI, st.acc_I.K), dt, st.m0);
    exp_euler(st.acc_B, truncate(fB, st.acc_B.K), dt, st.m0);
    st.t += dt;

    const double n1 = l2_norm(st.x_lt), n2 = l2_norm(st.x_geq);
    if (!(n1 + n2 <= st.blowup_ceiling))
        throw BlowUpError("evolve_split: state norm " + std::to_string(n1 + n2) +
                          " exceeds ceiling at t = " + std::to_string(st.t));
}

// --- energies -----------------------------------------------------------------------

namespace {
double grad_l2_sq(const SpectralField& f) {
    double s = 0.0;
    for (int kx = -f.K.x; kx <= f.K.x; ++kx)
        for (int ky = -f.K.y; ky <= f.K.y; ++ky)
            for (int kz = -f.K.z; kz <= f.K.z; ++kz)
                s += (double(kx) * kx + double(ky) * ky + double(kz) * kz) *
                     std::norm(f.at(kx, ky, kz));
    return s;
}

double trapezoid(const std::vector<double>& t, const std::vector<double>& v) {
    double acc = 0.0;
    for (std::size_t i = 1; i < t.size(); ++i) acc += 0.5 * (v[i] + v[i - 1]) * (t[i] - t[i - 1]);
    return acc;
}
} // namespace

double energy_X(const SplitTrajectory& traj, const EnergyParams& ep, double lambda, int N,
                const CutoffProfile& prof, int holder_stride) {
    ep.validate(false);
    const std::size_t n = traj.times.size();
    if (n == 0 || traj.x2.size() != n || traj.x_geq.size() != n)
        throw FieldError("energy_X: inconsistent trajectory");
    std::vector<double> integrand(n);
    for (std::size_t i = 0; i < n; ++i) {
        const SpectralField p1x2 = truncate(project(1, N, traj.x2[i], prof),
                                            Cutoff(std::min(project_support(1, N), traj.x2[i].K.x)));
        integrand[i] = grad_l2_sq(traj.x_geq[i]) + std::pow(l2_norm(traj.x2[i]), 2.0) +
                       lambda * std::pow(lp_norm(p1x2, 4.0), 4.0);
    }
    double e = trapezoid(traj.times, integrand);
    // discrete weighted Hoelder supremum over sampled pairs (a lower bound of
    // the continuum supremum)
    double sup = 0.0;
    const int stride = std::max(1, holder_stride);
    for (std::size_t i = 0; i < n; i += std::size_t(stride))
        for (std::size_t j = i + 1; j < n; j += std::size_t(stride)) {
            const double s = traj.times[i], t = traj.times[j];
            if (!(t > s)) continue;
            const double w = std::pow(s, ep.eta) / std::pow(t - s, ep.gamma);
            if (w == 0.0) continue;
            const double d = lp_norm(traj.x2[j] - traj.x2[i], 4.0 / 3.0);
            sup = std::max(sup, w * d);
        }
    return e + sup;
}

double energy_Y(const SplitTrajectory& traj, const EnergyParams& ep, const DyadicPartition& P) {
    ep.validate(false);
    const std::size_t n = traj.times.size();
    std::vector<double> i1(n), i2(n);
    for (std::size_t i = 0; i < n; ++i) {
        i1[i] = std::pow(besov_norm(traj.x_lt[i], 1.0 - ep.epsilon, 4.0, P), 3.0);
        i2[i] = besov_norm(traj.x_geq[i], 1.0 + ep.epsilon, 4.0 / 3.0, P);
    }
    return trapezoid(traj.times, i1) + trapezoid(traj.times, i2);
}

double sup_weighted_lt(const SplitTrajectory& traj, const EnergyParams& ep,
                       const DyadicPartition& P) {
    double sup = 0.0;
    for (std::size_t i = 0; i < traj.times.size(); ++i)
        sup = std::max(sup, std::pow(traj.times[i], ep.eta) *
                                std::pow(besov_norm(traj.x_lt[i], 2.0 * ep.gamma, 4.0, P), 3.0));
    return sup;
}

double sup_weighted_geq(const SplitTrajectory& traj, const EnergyParams& ep,
                        const DyadicPartition& P) {
    double sup = 0.0;
    for (std::size_t i = 0; i < traj.times.size(); ++i)
        sup = std::max(sup, std::pow(traj.times[i], ep.eta) *
                                besov_norm(traj.x_geq[i], 2.0 * ep.gamma, 4.0 / 3.0, P));
    return sup;
}

// --- common-noise harness --------------------------------------------------------------

SplitRunResult run_split_common_path(const SplitRunConfig& rc, const RenormConstants& consts,
                                     const CutoffProfile& prof, const DyadicPartition& P) {
    SimConfig sc = rc.sim;
    sc.validate();
    SplitRunResult out;

    // Z-ensemble on the P2-support cube, trees burnt in from zero
    OUParams op;
    op.N = sc.N;
    op.m0 = sc.m0;
    op.K = Cutoff(sc.grid_K());
    op.seed = sc.seed;
    op.chain = rc.chain;
    OUEnsemble ens = ou_init_stationary(op);
    tree_start(ens, consts, prof);
    const double burn = rc.burn_in < 0.0 ? recommended_burn_in(sc.m0) : rc.burn_in;
    out.burn_in_used = burn;
    out.burn_in_warning = burn < minimum_burn_in(sc.m0);
    const int burn_steps = int(std::ceil(burn / rc.burn_dt));
    for (int s = 0; s < burn_steps; ++s) tree_convolved_step(ens, rc.burn_dt, consts, prof);

    // Galerkin flow (SDEN4 form) driven by the same white noise as Z: both
    // consume identical per-mode counters from here on
    SdeState y;
    y.chain = rc.chain;
    y.step_index = ens.step_index;
    if (rc.init_from_gibbs) {
        GibbsSampler sampler(rc.gibbs, sc, consts, prof, rc.chain);
        sampler.burn();
        y.y = project(2, sc.N, sampler.sample(), prof);
    } else {
        y.y = project(2, sc.N, sample_free(sc, rc.chain, 0), prof);
    }

    SimConfig level = sc;
    level.noise_fine_steps = rc.noise_fine_steps;

    const double t0 = ens.t;
    const SpectralField tail2_at_t0 = ens.conv2sq;

    auto x2_of = [&](const SdeState& yy) {
        return shift_fields(yy.y, ens.z, ens.conv3, sc.N, sc.lambda, prof).second;
    };

    SplitState split = split_init(x2_of(y), sc.N, sc.m0, sc.lambda);
    split.blowup_ceiling = sc.blowup_ceiling;

    auto snapshot = [&]() {
        out.traj.times.push_back(split.t);
        out.traj.x_lt.push_back(split.x_lt);
        out.traj.x_geq.push_back(split.x_geq);
        SpectralField x2 = x2_of(y);
        SpectralField combined = split.x_lt + split.x_geq;
        out.gap_l2.push_back(l2_norm(truncate(combined, x2.K) - x2));
        out.traj.x2.push_back(std::move(x2));
    };

    const int steps = int(std::llround(sc.T / sc.dt));
    snapshot();
    for (int s = 0; s < steps; ++s) {
        TreeBundle tb = tree_bundle(ens, consts, prof, P, tail2_at_t0, t0);
        evolve_split(split, tb, sc.dt, prof, P);
        tree_convolved_step(ens, sc.dt, consts, prof, rc.noise_fine_steps);
        step_sde(y, level, consts, prof, true);
        if ((s + 1) % rc.snapshot_stride == 0 || s + 1 == steps) snapshot();
    }
    return out;
}

} // namespace phi4
