#include "phi4/ou.hpp"

#include <cmath>
#include <vector>

#include "phi4/paraproduct.hpp"

namespace phi4 {

namespace {
const double kTwoPi3 = std::pow(2.0 * M_PI, 3.0);
const double kConstMode = std::pow(2.0 * M_PI, 1.5);  // e_0 coefficient of the constant 1

// per-axis psi1 table |m| <= extent
std::vector<double> psi1_table(int N, const CutoffProfile& prof, int extent) {
    std::vector<double> t(std::size_t(extent) + 1);
    const double s = std::ldexp(1.0, -N);
    for (int m = 0; m <= extent; ++m) t[std::size_t(m)] = prof.psi(1, s * m);
    return t;
}
} // namespace

double renorm_c1(int N, const MassParam& m, const CutoffProfile& prof) {
    const int R = project_support(1, N);
    const auto t = psi1_table(N, prof, R);
    const double m2 = m.m0 * m.m0;
    double sum = 0.0;
    for (int kx = -R; kx <= R; ++kx)
        for (int ky = -R; ky <= R; ++ky)
            for (int kz = -R; kz <= R; ++kz) {
                const double w =
                    t[std::size_t(std::abs(kx))] * t[std::size_t(std::abs(ky))] * t[std::size_t(std::abs(kz))];
                if (w == 0.0) continue;
                const double k2 = double(kx) * kx + double(ky) * ky + double(kz) * kz;
                sum += w * w / (k2 + m2);
            }
    return sum / (2.0 * kTwoPi3);
}

double renorm_c2(int N, const MassParam& m, const CutoffProfile& prof, std::int64_t term_budget) {
    const int R = project_support(1, N);
    const auto t = psi1_table(N, prof, 2 * R);
    const double m2 = m.m0 * m.m0;

    // enumerate the support of psi^2 once
    struct Node {
        int x, y, z;
        double w2;  // psi(l)^2
        double l2;
    };
    std::vector<Node> support;
    for (int kx = -R; kx <= R; ++kx)
        for (int ky = -R; ky <= R; ++ky)
            for (int kz = -R; kz <= R; ++kz) {
                const double w =
                    t[std::size_t(std::abs(kx))] * t[std::size_t(std::abs(ky))] * t[std::size_t(std::abs(kz))];
                if (w == 0.0) continue;
                support.push_back({kx, ky, kz, w * w, double(kx) * kx + double(ky) * ky + double(kz) * kz});
            }
    const std::int64_t pairs = std::int64_t(support.size()) * std::int64_t(support.size());
    if (pairs > term_budget)
        throw BudgetError("renorm_c2: pair count " + std::to_string(pairs) + " exceeds budget " +
                          std::to_string(term_budget));

    // symmetric summand: run l1 <= l2 (by index) and double the off-diagonal
    double sum = 0.0;
    for (std::size_t i = 0; i < support.size(); ++i) {
        const Node& a = support[i];
        for (std::size_t j = i; j < support.size(); ++j) {
            const Node& b = support[j];
            const int sx = a.x + b.x, sy = a.y + b.y, sz = a.z + b.z;
            if (std::abs(sx) > 2 * R || std::abs(sy) > 2 * R || std::abs(sz) > 2 * R) continue;
            const double ws = t[std::size_t(std::abs(sx))] * t[std::size_t(std::abs(sy))] *
                              t[std::size_t(std::abs(sz))];
            if (ws == 0.0) continue;
            const double s2 = double(sx) * sx + double(sy) * sy + double(sz) * sz;
            const double term =
                a.w2 * b.w2 * ws * ws / ((a.l2 + m2) * (b.l2 + m2) * (a.l2 + b.l2 + s2 + 3.0 * m2));
            sum += (i == j) ? term : 2.0 * term;
        }
    }
    return sum / (2.0 * kTwoPi3 * kTwoPi3);
}

RenormConstants renorm_constants(int N, const MassParam& m, const CutoffProfile& prof) {
    RenormConstants c;
    c.N = N;
    c.m0 = m.m0;
    c.c1 = renorm_c1(N, m, prof);
    c.c2 = renorm_c2(N, m, prof);
    return c;
}

SpectralField ou_noise_field(Cutoff K, double m0, double dt, int fine_steps,
                             std::uint64_t first_fine, std::uint64_t seed, std::uint64_t chain) {
    if (fine_steps < 1) throw FieldError("ou_noise_field: fine_steps >= 1 required");
    SpectralField xi(K, true);
    const double m2 = m0 * m0;
    const double delta = dt / fine_steps;
    for (int kx = -K.x; kx <= K.x; ++kx)
        for (int ky = -K.y; ky <= K.y; ++ky)
            for (int kz = -K.z; kz <= K.z; ++kz) {
                const LatticePoint k{kx, ky, kz};
                if (!owns_pair(k)) continue;
                const double theta = k.norm2() + m2;
                const double var1 = -std::expm1(-2.0 * theta * delta) / (2.0 * theta);
                const double decay = std::exp(-theta * delta);
                RngStream st = mode_stream(seed, StreamPurpose::ou_noise, chain, k);
                if (kx == 0 && ky == 0 && kz == 0) {
                    const double sd = std::sqrt(var1);
                    double acc = 0.0;
                    for (int i = 0; i < fine_steps; ++i) acc = acc * decay + sd * st.gauss(first_fine + i, 0);
                    xi.at(k) = cplx(acc, 0.0);
                } else {
                    const double sd = std::sqrt(0.5 * var1);
                    cplx acc(0.0);
                    for (int i = 0; i < fine_steps; ++i) {
                        const std::uint64_t ctr = first_fine + std::uint64_t(i);
                        acc = acc * decay + cplx(sd * st.gauss(ctr, 0), sd * st.gauss(ctr, 1));
                    }
                    xi.at(k) = acc;
                    xi.at(-k) = std::conj(acc);
                }
            }
    return xi;
}

void ou_decay(SpectralField& z, double dt, double m0) {
    const double m2 = m0 * m0;
    for (int kx = -z.K.x; kx <= z.K.x; ++kx)
        for (int ky = -z.K.y; ky <= z.K.y; ++ky)
            for (int kz = -z.K.z; kz <= z.K.z; ++kz) {
                const double theta = double(kx) * kx + double(ky) * ky + double(kz) * kz + m2;
                z.at(kx, ky, kz) *= std::exp(-dt * theta);
            }
}

OUEnsemble ou_init_stationary(const OUParams& prm) {
    OUEnsemble ens;
    ens.prm = prm;
    ens.z = SpectralField(prm.K, true);
    const double m2 = prm.m0 * prm.m0;
    for (int kx = -prm.K.x; kx <= prm.K.x; ++kx)
        for (int ky = -prm.K.y; ky <= prm.K.y; ++ky)
            for (int kz = -prm.K.z; kz <= prm.K.z; ++kz) {
                const LatticePoint k{kx, ky, kz};
                if (!owns_pair(k)) continue;
                const double theta = k.norm2() + m2;
                RngStream st = mode_stream(prm.seed, StreamPurpose::initial_draw, prm.chain, k);
                if (kx == 0 && ky == 0 && kz == 0) {
                    ens.z.at(k) = cplx(st.gauss(0, 0) / std::sqrt(2.0 * theta), 0.0);
                } else {
                    const double sd = 0.5 / std::sqrt(theta);  // per-component
                    const cplx v(sd * st.gauss(0, 0), sd * st.gauss(0, 1));
                    ens.z.at(k) = v;
                    ens.z.at(-k) = std::conj(v);
                }
            }
    return ens;
}

void ou_step(OUEnsemble& ens, double dt, int fine_steps) {
    SpectralField xi = ou_noise_field(ens.prm.K, ens.prm.m0, dt, fine_steps, ens.step_index,
                                      ens.prm.seed, ens.prm.chain);
    ou_decay(ens.z, dt, ens.prm.m0);
    ens.z += xi;
    ens.step_index += std::uint64_t(fine_steps);
    ens.t += dt;
}

WickPowers wick_powers(const OUEnsemble& ens, const RenormConstants& consts,
                       const CutoffProfile& prof) {
    const int K1 = project_support(1, consts.N);
    // C1/C2 sum the full P1 support; a narrower ensemble would break the centering
    if (ens.prm.K.x < K1 - 1)
        throw FieldError("wick_powers: ensemble cutoff below the P1 support");
    WickPowers w;
    w.z1 = truncate(project(1, consts.N, ens.z, prof), Cutoff(std::min(K1, ens.prm.K.x)));
    SpectralField sq = pointwise_product(w.z1, w.z1);
    SpectralField cube = pointwise_product(sq, w.z1);
    w.z2 = std::move(sq);
    w.z2.at(0, 0, 0) -= consts.c1 * kConstMode;
    w.z3 = cube - 3.0 * consts.c1 * truncate(w.z1, cube.K);
    return w;
}

SpectralField tree_wick2(const OUEnsemble& ens, const RenormConstants& consts,
                         const CutoffProfile& prof) {
    return wick_powers(ens, consts, prof).z2;
}

SpectralField tree_wick3(const OUEnsemble& ens, const RenormConstants& consts,
                         const CutoffProfile& prof) {
    return wick_powers(ens, consts, prof).z3;
}

namespace {
// forcings entering the three accumulators, all supported on the P1 band
struct Forcings {
    SpectralField pz2, pz3, p2z2;
};
Forcings projected_forcings(const OUEnsemble& ens, const RenormConstants& consts,
                            const CutoffProfile& prof) {
    const WickPowers w = wick_powers(ens, consts, prof);
    const Cutoff Kc(project_support(1, consts.N));
    Forcings f;
    f.pz2 = truncate(project(1, consts.N, w.z2, prof), Kc);
    f.pz3 = truncate(project(1, consts.N, w.z3, prof), Kc);
    f.p2z2 = project(1, consts.N, f.pz2, prof);
    return f;
}
} // namespace

void tree_start(OUEnsemble& ens, const RenormConstants& consts, const CutoffProfile& prof) {
    const Cutoff Kc(project_support(1, consts.N));
    ens.conv2 = SpectralField(Kc, true);
    ens.conv3 = SpectralField(Kc, true);
    ens.conv2sq = SpectralField(Kc, true);
    Forcings f = projected_forcings(ens, consts, prof);
    ens.prev_pz2 = std::move(f.pz2);
    ens.prev_pz3 = std::move(f.pz3);
    ens.prev_p2z2 = std::move(f.p2z2);
    ens.trees_on = true;
    ens.burn_in_elapsed = 0.0;
}

void tree_convolved_step(OUEnsemble& ens, double dt, const RenormConstants& consts,
                         const CutoffProfile& prof, int fine_steps) {
    if (!ens.trees_on) throw FieldError("tree_convolved_step: call tree_start first");
    ou_step(ens, dt, fine_steps);
    Forcings f = projected_forcings(ens, consts, prof);
    const MassParam m(ens.prm.m0);
    auto advance = [&](SpectralField& v, const SpectralField& f_old, const SpectralField& f_new) {
        v = semigroup(dt, m, v);
        SpectralField mid = semigroup(0.5 * dt, m, 0.5 * dt * (f_old + f_new));
        v += mid;
    };
    advance(ens.conv2, ens.prev_pz2, f.pz2);
    advance(ens.conv3, ens.prev_pz3, f.pz3);
    advance(ens.conv2sq, ens.prev_p2z2, f.p2z2);
    ens.prev_pz2 = std::move(f.pz2);
    ens.prev_pz3 = std::move(f.pz3);
    ens.prev_p2z2 = std::move(f.p2z2);
    ens.burn_in_elapsed += dt;
}

ResonantTrees tree_resonant(const OUEnsemble& ens, const RenormConstants& consts,
                            const CutoffProfile& prof, const DyadicPartition& P) {
    if (!ens.trees_on) throw FieldError("tree_resonant: trees not running");
    const WickPowers w = wick_powers(ens, consts, prof);
    ResonantTrees r;
    r.z22 = paraproduct(w.z2, ens.conv2sq, ParaKind::res, P);
    r.z22.at(0, 0, 0) -= consts.c2 * kConstMode;
    r.z23 = paraproduct(w.z2, ens.conv3, ParaKind::res, P);
    r.z23 -= 3.0 * consts.c2 * truncate(w.z1, r.z23.K);
    return r;
}

double recommended_burn_in(double m0) { return 20.0 / (m0 * m0); }
double minimum_burn_in(double m0) { return 10.0 / (m0 * m0); }

} // namespace phi4
