// Paracontrolled decomposition of the shifted dynamics: the split system for
// (X^{(2),<}, X^{(2),>=}) driven by the stochastic trees, and the energy
// functionals used as uniform-bound diagnostics.
//
// Writing w = P x_lt + P x_geq and v = w - lambda Z03, the right sides are
//   lt:  -3 lambda P[ v <. Z2 ]
//   geq: -lambda P[w^3] + lambda P Phi1(w) + lambda P Phi2(w) + lambda P Phi3(w)
//        - 3 lambda P[(P x_geq) =. Z2]
//        + 9 lambda^2 P[Psi1(w) =. Z2] + 9 lambda^2 P Psi2(w)
// with
//   Phi1 = -3 (Z1 - l Z03) <=. w^2 + 3 l [(2 Z1 - l Z03) Z03] <=. w
//   Phi2 = -3 v >. Z2 + 3 l Z23 + 9 l v (Z22 - Z2 =. tail2(t)) - l^2 (3 Z1 - l Z03) Z03^2
//   Phi3 = -3 (Z1 - l Z03) >. w^2 + 3 l [(2 Z1 - l Z03) Z03] >. w
//   Psi1 = I(t) - v <. B(t),     Psi2 = (v <. B(t)) =. Z2 - v (B(t) =. Z2)
// where I(t), B(t) are the running integrals from 0 of e^{(t-s)(lap-m0^2)}(P)^2
// applied to [v <. Z2] and Z2, and tail2(t) is the heat flow of the
// (-inf, 0] part of the (P)^2-convolved Z2.  The assembled right side equals
// the unsplit X^{(2)} right side plus the lt right side identically; a unit
// test enforces that identity to ~1e-12.
#pragma once

#include "phi4/gibbs.hpp"
#include "phi4/ou.hpp"
#include "phi4/paraproduct.hpp"

namespace phi4 {

struct EnergyParams {
    double eta = 0.4;      // [0,1); eta > gamma + 1/4 for the uniform-bound suite
    double gamma = 0.1;    // (0, 1/8)
    double epsilon = 0.04; // (0, gamma/2)
    double q = 1.1;        // (1, 8/7)
    void validate(bool uniform_bound_suite = true) const;
};

// X^{N,(1)} = X - P2 Z and X^{N,(2)} = X - P2 Z + lambda Z03.
std::pair<SpectralField, SpectralField> shift_fields(const SpectralField& x,
                                                     const SpectralField& z,
                                                     const SpectralField& z03, int N,
                                                     double lambda, const CutoffProfile& prof);

// Tree inputs to the split right sides at a fixed time.
struct TreeBundle {
    SpectralField z1, z2, z03;
    SpectralField z22, z23;
    SpectralField tail2_flow;  // e^{(t-t0)(lap - m0^2)} conv2sq(t0)
};

// Assembled from a tree-running ensemble; tail2_at_t0 is the conv2sq snapshot
// taken when the split clock started.
TreeBundle tree_bundle(const OUEnsemble& ens, const RenormConstants& consts,
                       const CutoffProfile& prof, const DyadicPartition& P,
                       const SpectralField& tail2_at_t0, double t0);

struct SplitState {
    SpectralField x_lt, x_geq;
    SpectralField acc_I, acc_B;  // Psi accumulators (exponential-Euler updates)
    double t = 0.0;
    int N = 0;
    double m0 = 1.0, lambda = 0.1;
    double blowup_ceiling = 1e6;
};

// x_lt(0) = 0, x_geq(0) = x2_initial, accumulators zeroed.
SplitState split_init(const SpectralField& x2_initial, int N, double m0, double lambda);

// Right sides (exposed for the exactness test).
SpectralField split_rhs_lt(const SplitState& st, const TreeBundle& tb, const CutoffProfile& prof,
                           const DyadicPartition& P);
SpectralField split_rhs_geq(const SplitState& st, const TreeBundle& tb, const CutoffProfile& prof,
                            const DyadicPartition& P);
// Unsplit right side of the X^{(2)} equation evaluated at x2.
SpectralField unsplit_rhs(const SpectralField& x2, const TreeBundle& tb, double lambda, int N,
                          double c2, const CutoffProfile& prof, const DyadicPartition& P);

// One exponential-Euler step of the split system with trees frozen at st.t;
// the tree bundle must be synchronized with the state clock.
void evolve_split(SplitState& st, const TreeBundle& tb, double dt, const CutoffProfile& prof,
                  const DyadicPartition& P);

// --- trajectories and energy functionals -----------------------------------------

struct SplitTrajectory {
    std::vector<double> times;
    std::vector<SpectralField> x_lt, x_geq, x2;
};

// int_0^t (||grad x_geq||_{L2}^2 + ||X2||_{L2}^2 + lambda ||P1 X2||_{L4}^4) ds
// + sup (s')^eta ||X2_{t'} - X2_{s'}||_{L^{4/3}} / (t'-s')^gamma  over sampled pairs.
double energy_X(const SplitTrajectory& traj, const EnergyParams& ep, double lambda, int N,
                const CutoffProfile& prof, int holder_stride = 4);

// int ||x_lt||_{B_4^{1-eps}}^3 ds + int ||x_geq||_{B_{4/3}^{1+eps}} ds.
double energy_Y(const SplitTrajectory& traj, const EnergyParams& ep, const DyadicPartition& P);

// Thm-4.17-style weighted suprema over the trajectory.
double sup_weighted_lt(const SplitTrajectory& traj, const EnergyParams& ep,
                       const DyadicPartition& P);
double sup_weighted_geq(const SplitTrajectory& traj, const EnergyParams& ep,
                        const DyadicPartition& P);

// --- common-noise run: Z-ensemble + Galerkin flow + split system -------------------

struct SplitRunConfig {
    SimConfig sim;          // dt, T, lambda, N, m0, seed
    std::uint64_t chain = 0;
    double burn_in = -1.0;  // < 0: use recommended_burn_in(m0)
    double burn_dt = 5e-3;
    int noise_fine_steps = 1;  // fine composition for dt-refinement coupling
    bool init_from_gibbs = false;
    GibbsConfig gibbs;
    int snapshot_stride = 1;
};

struct SplitRunResult {
    SplitTrajectory traj;
    std::vector<double> gap_l2;  // ||(x_lt + x_geq) - X2||_{L2} at snapshots
    double burn_in_used = 0.0;
    bool burn_in_warning = false;  // burn-in below 10/m0^2
};

SplitRunResult run_split_common_path(const SplitRunConfig& rc, const RenormConstants& consts,
                                     const CutoffProfile& prof, const DyadicPartition& P);

} // namespace phi4
