#include "phi4/dyadic.hpp"

#include <algorithm>
#include <cmath>

#include "phi4/bump.hpp"

namespace phi4 {

double DyadicPartition::chi(double r) const { return smooth_step_down(r, lo, hi); }

double DyadicPartition::phi(double r) const { return chi(0.5 * r) - chi(r); }

bool DyadicPartition::block_active(int j, double radius) const {
    if (j < -1) return false;
    if (j == -1) return true;
    // supp phi(2^{-j} .) = [lo 2^j, 2 hi 2^j]
    return radius > lo * std::ldexp(1.0, j);
}

int DyadicPartition::j_max(double radius) const {
    int j = -1;
    while (block_active(j + 1, radius)) ++j;
    return j;
}

DyadicPartition build_partition() {
    DyadicPartition P;
    // support constraints from the construction itself
    if (!(P.hi < 4.0 / 3.0) || !(2.0 * P.hi <= 8.0 / 3.0) || !(P.lo >= 3.0 / 4.0))
        throw FieldError("dyadic partition: profile supports out of range");
    const double res = partition_residual(P, 20001, 4096.0);
    if (res > 1e-12) throw FieldError("dyadic partition self-check failed: residual " + std::to_string(res));
    // disjointness spot checks: phi_j phi_k = 0 for |j-k|>=2, chi phi_j = 0 for j>=1
    for (int i = 0; i <= 2000; ++i) {
        const double r = 4096.0 * i / 2000.0;
        for (int j = 0; j <= 12; ++j) {
            const double pj = P.phi(std::ldexp(r, -j));
            if (pj == 0.0) continue;
            if (j >= 1 && P.chi(r) != 0.0)
                throw FieldError("dyadic partition: chi/phi overlap");
            for (int k = j + 2; k <= 13; ++k)
                if (P.phi(std::ldexp(r, -k)) != 0.0)
                    throw FieldError("dyadic partition: phi blocks overlap at gap >= 2");
        }
    }
    return P;
}

double partition_residual(const DyadicPartition& P, std::size_t samples, double rmax) {
    double worst = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
        const double r = rmax * double(i) / double(samples - 1);
        double s = P.chi(r);
        const int jm = P.j_max(r) + 1;
        for (int j = 0; j <= jm; ++j) s += P.phi(std::ldexp(r, -j));
        worst = std::max(worst, std::abs(s - 1.0));
    }
    return worst;
}

SpectralField dyadic_block(int j, const SpectralField& f, const DyadicPartition& P) {
    if (j < -1) return SpectralField(f.K, f.real_valued);
    if (!P.block_active(j, f.K.radius())) return SpectralField(f.K, f.real_valued);
    if (j == -1) return apply_radial_multiplier(f, [&P](double r) { return P.chi(r); });
    return apply_radial_multiplier(f, [&P, j](double r) { return P.phi(std::ldexp(r, -j)); });
}

SpectralField s_partial(int j, const SpectralField& f, const DyadicPartition& P) {
    if (j < 0) return SpectralField(f.K, f.real_valued);  // S_{-1} f := 0
    const int top = std::min(j - 1, P.j_max(f.K.radius()));
    return apply_radial_multiplier(f, [&P, top](double r) {
        double s = P.chi(r);
        for (int l = 0; l <= top; ++l) s += P.phi(std::ldexp(r, -l));
        return s;
    });
}

std::vector<SpectralField> all_blocks(const SpectralField& f, const DyadicPartition& P) {
    const int jm = P.j_max(f.K.radius());
    std::vector<SpectralField> blocks;
    blocks.reserve(std::size_t(jm + 2));
    for (int j = -1; j <= jm; ++j) blocks.push_back(dyadic_block(j, f, P));
    return blocks;
}

double lp_norm(const SpectralField& f, const LebesgueExp& p) {
    if (p.is_inf) return lp_norm_inf(f);
    return lp_norm(f, p.value);
}

double besov_norm(const SpectralField& f, const BesovParams& bp, const DyadicPartition& P) {
    const int jm = P.j_max(f.K.radius());
    double acc = 0.0;
    for (int j = -1; j <= jm; ++j) {
        const double a = lp_norm(dyadic_block(j, f, P), bp.p);
        const double w = std::pow(2.0, double(j) * bp.s) * a;
        if (bp.r.is_inf)
            acc = std::max(acc, w);
        else
            acc += std::pow(w, bp.r.value);
    }
    return bp.r.is_inf ? acc : std::pow(acc, 1.0 / bp.r.value);
}

double besov_norm(const SpectralField& f, double s, double p, const DyadicPartition& P) {
    BesovParams bp;
    bp.s = s;
    bp.p = LebesgueExp::finite(p);
    bp.r = LebesgueExp::inf();
    return besov_norm(f, bp, P);
}

} // namespace phi4
