// Littlewood-Paley dyadic blocks and Besov norms on the torus.
//
// The profiles chi, phi satisfy, by construction:
//   supp chi = [0, 21/16]  (subset of [0, 4/3)),
//   supp phi = [1, 21/8]   (subset of [3/4, 8/3]),
//   chi(r) + sum_{j>=0} phi(2^{-j} r) = 1   (telescoping, so exact),
//   phi(2^{-j}r) phi(2^{-k}r) = 0 for |j-k| >= 2,  chi(r) phi(2^{-j}r) = 0 for j >= 1.
#pragma once

#include <vector>

#include "phi4/field.hpp"

namespace phi4 {

// Integrability/summability exponent in [1, infinity]; infinity is a distinct
// state, never a large float.
struct LebesgueExp {
    double value = 2.0;
    bool is_inf = false;

    static LebesgueExp finite(double p) {
        if (p < 1.0) throw FieldError("Lebesgue exponent must satisfy p >= 1");
        return {p, false};
    }
    static LebesgueExp inf() { return {0.0, true}; }
    double reciprocal() const { return is_inf ? 0.0 : 1.0 / value; }
};

struct BesovParams {
    double s = 0.0;
    LebesgueExp p = LebesgueExp::finite(2.0);
    LebesgueExp r = LebesgueExp::inf();
};

struct DyadicPartition {
    // transition interval of chi: 1 on [0, lo], 0 on [hi, inf)
    double lo = 1.0;
    double hi = 21.0 / 16.0;

    double chi(double r) const;
    double phi(double r) const;  // chi(r/2) - chi(r)

    // Largest block index whose annulus meets radii <= radius; -1 when only
    // the chi block acts.
    int j_max(double radius) const;
    bool block_active(int j, double radius) const;
};

// Returns the fixed partition after running its self-checks (partition of
// unity residual, support disjointness) on a sample grid.
DyadicPartition build_partition();

// sup over `samples` radii in [0, rmax] of |chi + sum_j phi(2^{-j} .) - 1|.
double partition_residual(const DyadicPartition& P, std::size_t samples, double rmax);

// Delta_j f: multiplier phi(2^{-j}|k|), or chi(|k|) for j = -1.
SpectralField dyadic_block(int j, const SpectralField& f, const DyadicPartition& P);

// S_j f = sum_{l=-1}^{j-1} Delta_l f;  S_{-1} f = 0, S_0 f = Delta_{-1} f.
SpectralField s_partial(int j, const SpectralField& f, const DyadicPartition& P);

// All blocks j = -1 .. j_max in one pass (index 0 holds j = -1).
std::vector<SpectralField> all_blocks(const SpectralField& f, const DyadicPartition& P);

double lp_norm(const SpectralField& f, const LebesgueExp& p);

// Besov norm: ell^r over j of 2^{js} ||Delta_j f||_{L^p}.  L^p by Parseval for
// p = 2, max norm for p = infinity, grid quadrature at M = 2(2K+1) otherwise.
double besov_norm(const SpectralField& f, const BesovParams& bp, const DyadicPartition& P);

// Convenience for the paper's B_p^s := B_{p,infinity}^s.
double besov_norm(const SpectralField& f, double s, double p, const DyadicPartition& P);

} // namespace phi4
