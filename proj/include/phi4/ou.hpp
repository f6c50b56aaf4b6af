// The infinite-dimensional OU process dZ = dW - (-lap + m0^2) Z dt, integrated
// exactly in law per mode, the renormalization constants C1/C2, and the seven
// stochastic trees built from Z with counterterm subtraction.
//
// Noise convention fixed by the mode covariance Cov(<W_t,e_k>,<W_s,e_l>) =
// min(s,t) 1_{k+l=0}: complex modes carry independent Re/Im parts of variance
// t/2 each, the zero mode is real with variance t, and conjugate pairs are
// Hermitian-mirrored.  Per-mode streams are counter-based, so results do not
// depend on iteration order or thread count.
#pragma once

#include "phi4/dyadic.hpp"
#include "phi4/field.hpp"
#include "phi4/projection.hpp"
#include "phi4/rng.hpp"

namespace phi4 {

struct BudgetError : FieldError {
    explicit BudgetError(const std::string& what) : FieldError(what) {}
};

struct RenormConstants {
    int N = 0;
    double m0 = 1.0;
    double c1 = 0.0;
    double c2 = 0.0;
};

// C1 = 1/(2(2pi)^3) sum_k psi(k)^2/(k^2+m0^2), psi the tensor cutoff of P_N^1.
double renorm_c1(int N, const MassParam& m, const CutoffProfile& prof);

// C2 = 1/(2(2pi)^6) sum_{l1,l2} psi(l1)^2 psi(l2)^2 psi(l1+l2)^2 /
//      [(l1^2+m0^2)(l2^2+m0^2)(l1^2+l2^2+(l1+l2)^2+3 m0^2)].
// Throws BudgetError when the pair count exceeds term_budget.
double renorm_c2(int N, const MassParam& m, const CutoffProfile& prof,
                 std::int64_t term_budget = 400000000);

RenormConstants renorm_constants(int N, const MassParam& m, const CutoffProfile& prof);

// Exact OU-integrated noise for a step of length dt, composed of `fine_steps`
// sub-integrals drawn at counters first_fine, first_fine+1, ...  Composition
// is exact in law, which couples runs at different dt sharing a fine grid.
SpectralField ou_noise_field(Cutoff K, double m0, double dt, int fine_steps,
                             std::uint64_t first_fine, std::uint64_t seed, std::uint64_t chain);

// Exact-in-law linear update z <- e^{-dt(k^2+m0^2)} z + noise.
void ou_decay(SpectralField& z, double dt, double m0);

struct OUParams {
    int N = 0;
    double m0 = 1.0;
    Cutoff K{2};  // stored cutoff; >= P1 support for trees, >= P2 support when coupling to the dynamics
    std::uint64_t seed = 1;
    std::uint64_t chain = 0;
};

// OU state plus the running stochastic-convolution accumulators
//   conv2   = int_{-inf}^t e^{(t-s)(lap-m0^2)} P  Z2 ds      (tree Z^{(0,2)})
//   conv3   = int_{-inf}^t e^{(t-s)(lap-m0^2)} P  Z3 ds      (tree Z^{(0,3)})
//   conv2sq = int_{-inf}^t e^{(t-s)(lap-m0^2)} P^2 Z2 ds     (feeds Z^{(2,2)})
// with the -infinity lower limit realized by burn-in from zero.
struct OUEnsemble {
    OUParams prm;
    double t = 0.0;
    std::uint64_t step_index = 0;
    SpectralField z;
    bool trees_on = false;
    SpectralField conv2, conv3, conv2sq;
    SpectralField prev_pz2, prev_pz3, prev_p2z2;  // projected forcings at time t
    double burn_in_elapsed = 0.0;
};

// Stationary initial draw: Var <Z,e_k> = 1/(2(k^2+m0^2)), Hermitian-paired.
OUEnsemble ou_init_stationary(const OUParams& prm);

// One exact OU step (no trees).  fine_steps > 1 composes that many sub-draws
// (equal in law; couples runs sharing a fine noise grid).
void ou_step(OUEnsemble& ens, double dt, int fine_steps = 1);

// Wick powers of the projected field at the current time:
//   z1 = P Z,  z2 = (P Z)^2 - C1,  z3 = (P Z)^3 - 3 C1 P Z.
// The scalar counterterm C1 subtracts as the constant function, i.e. the
// coefficient C1 (2pi)^{3/2} at mode zero.
struct WickPowers {
    SpectralField z1, z2, z3;
};
WickPowers wick_powers(const OUEnsemble& ens, const RenormConstants& consts,
                       const CutoffProfile& prof);
SpectralField tree_wick2(const OUEnsemble& ens, const RenormConstants& consts,
                         const CutoffProfile& prof);
SpectralField tree_wick3(const OUEnsemble& ens, const RenormConstants& consts,
                         const CutoffProfile& prof);

// Prepare the convolution accumulators (zeroed; forcing cached) at the current state.
void tree_start(OUEnsemble& ens, const RenormConstants& consts, const CutoffProfile& prof);

// Advance Z and the three accumulators by dt with the exponential midpoint
// rule: V <- e^{dt A} V + dt e^{(dt/2) A} (F_t + F_{t+dt})/2, A = lap - m0^2.
void tree_convolved_step(OUEnsemble& ens, double dt, const RenormConstants& consts,
                         const CutoffProfile& prof, int fine_steps = 1);

// Resonant trees at the current time:
//   z22 = Z2 =. conv2sq - C2,   z23 = Z2 =. conv3 - 3 C2 Z1.
struct ResonantTrees {
    SpectralField z22, z23;
};
ResonantTrees tree_resonant(const OUEnsemble& ens, const RenormConstants& consts,
                            const CutoffProfile& prof, const DyadicPartition& P);

double recommended_burn_in(double m0);  // 20 / m0^2
double minimum_burn_in(double m0);      // 10 / m0^2 (below this the harness warns)

} // namespace phi4
