// Finite-dimensional approximation dynamics
//   dY = dW - (-lap + m0^2) Y dt - lambda P[(P Y)^3 - 3(C1 - 3 lambda C2) P Y] dt
// (P = P_N^(1)), its Gibbs measure, and the invariance verification.
//
// The sampled measure is the invariant law of this dynamics: with unit-noise
// Langevin drift -grad(H0 + U) the stationary density is exp(-2U) relative to
// the free Gaussian (per real coordinate, dX = dB - f dt is stationary for
// exp(-2 int f)), so the target below carries the factor 2 on U.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "phi4/ou.hpp"
#include "phi4/stats.hpp"

namespace phi4 {

struct BlowUpError : FieldError {
    explicit BlowUpError(const std::string& what) : FieldError(what) {}
};

enum class Scheme { exponential_euler, tamed_euler };

struct SimConfig {
    int N = 0;
    double m0 = 1.0;
    double lambda = 0.1;
    double dt = 1e-3;
    double T = 1.0;
    Scheme scheme = Scheme::exponential_euler;
    std::uint64_t seed = 1;
    int chains = 1;
    double burn_in = 0.0;        // OU tree burn-in where trees are involved
    double lambda0 = 1.0;        // admissible coupling ceiling
    double blowup_ceiling = 1e6; // L2 ceiling for the blow-up detector
    int noise_fine_steps = 1;    // dt is composed of this many fine noise draws
    bool noise_enabled = true;   // off: deterministic flow (refinement studies)

    int grid_K() const { return project_support(2, N); }  // stored cutoff of the dynamics
    void validate() const;
};

struct GibbsConfig {
    double mala_step = 0.5;  // proposal = one exponential-Euler step of this length
    int n_steps = 2000;
    int thinning = 20;
    int burn_steps = 500;
    double acc_lo = 0.4, acc_hi = 0.8;
};

// U_N(phi) = int (lambda/4)(P phi)^4 - (3 lambda/2)(C1 - 3 lambda C2)(P phi)^2
double energy_U(const SpectralField& phi, int N, double lambda, const RenormConstants& consts,
                const CutoffProfile& prof);

// D = lambda P[(P phi)^3 - 3(C1 - 3 lambda C2) P phi]; the L2 gradient of U.
SpectralField interaction_drift(const SpectralField& phi, int N, double lambda,
                                const RenormConstants& consts, const CutoffProfile& prof);

// Full drift -(-lap + m0^2) Y - D(Y).
SpectralField drift(const SpectralField& y, const SimConfig& cfg, const RenormConstants& consts,
                    const CutoffProfile& prof);

struct SdeState {
    SpectralField y;
    double t = 0.0;
    std::uint64_t step_index = 0;
    std::uint64_t chain = 0;
};

// One time step.  filter_noise applies the psi2 tensor weights to the noise
// (the P2-projected form of the dynamics); streams are shared per mode, so a
// filtered and an unfiltered run with equal seeds see the same white noise.
void step_sde(SdeState& st, const SimConfig& cfg, const RenormConstants& consts,
              const CutoffProfile& prof, bool filter_noise = true);

// --- Gibbs sampler -----------------------------------------------------------

// Metropolis-adjusted chain for mu_N on the interacting sector (the P1-support
// cube); the proposal is one exponential-Euler step of the dynamics, which is
// exactly reversible for the free measure, so lambda = 0 accepts always.
// Modes outside the interacting sector are exactly Gaussian under mu_N and are
// drawn directly when a full sample is emitted.
class GibbsSampler {
  public:
    GibbsSampler(const GibbsConfig& gc, const SimConfig& sc, const RenormConstants& consts,
                 const CutoffProfile& prof, std::uint64_t chain);

    void burn() { advance(gc_.burn_steps); }
    void advance(int steps);
    // advance `thinning` steps and emit a full K2-cube sample
    SpectralField sample();

    double acceptance_rate() const;
    // |log r(x->x') + log r(x'->x)| for the next proposal: zero in exact arithmetic
    double detailed_balance_residual();
    const SpectralField& state() const { return x_; }

  private:
    double log_target(const SpectralField& x, const SpectralField& dr) const;
    void propose(SpectralField& out, const SpectralField& x, const SpectralField& dr,
                 std::uint64_t ctr) const;
    double log_q(const SpectralField& to, const SpectralField& from,
                 const SpectralField& dr_from) const;

    GibbsConfig gc_;
    SimConfig sc_;
    RenormConstants consts_;
    const CutoffProfile* prof_;
    std::uint64_t chain_;
    SpectralField x_;       // interacting sector (K1 cube)
    SpectralField drift_;   // cached interaction drift at x_
    std::uint64_t n_steps_ = 0, n_accept_ = 0, emitted_ = 0;
};

// n approximately independent samples (multiple thinned chains, round-robin).
std::vector<SpectralField> sample_gibbs_ensemble(int n, const GibbsConfig& gc, const SimConfig& sc,
                                                 const RenormConstants& consts,
                                                 const CutoffProfile& prof, int n_chains = 16,
                                                 int threads = 2);

// Exact free-measure sample on the K2 cube (the lambda = 0 law).
SpectralField sample_free(const SimConfig& sc, std::uint64_t chain, std::uint64_t tag);

// --- invariance verification ----------------------------------------------------

// Observables: ||X||_{L2}^2, int (P1 X)^4, and |<X,e_k>|^2 for the 10 lowest modes.
std::vector<std::string> observable_names(const SimConfig& sc);
std::vector<double> observe(const SpectralField& x, const SimConfig& sc,
                            const CutoffProfile& prof);

struct InvarianceEntry {
    std::string name;
    MeanSE before, after;
    double z = 0.0;
};

struct InvarianceReport {
    std::vector<InvarianceEntry> entries;            // finest dt: t = 0 vs t = T
    std::vector<double> checkpoint_times;
    std::vector<MeanSE> checkpoint_l2;               // E||X_t||^2 per checkpoint (finest dt)
    std::vector<double> dt_ladder;
    std::vector<double> ladder_residual_l2;          // |mean after - mean before| per dt
    std::vector<double> ladder_residual_quartic;
    double z_max = 0.0;
    bool pass(double z_threshold) const;
};

struct InvarianceConfig {
    SimConfig sim;                        // sim.dt must equal the finest ladder entry
    GibbsConfig gibbs;
    int n_chains = 1000;
    std::vector<double> dt_ladder = {4e-3, 2e-3, 1e-3};
    std::vector<double> checkpoints = {0.2, 0.4, 0.6, 0.8, 1.0};
    int threads = 2;
};

InvarianceReport invariance_test(const InvarianceConfig& ic, const RenormConstants& consts,
                                 const CutoffProfile& prof);

// Trapezoidal time average of a sampled observable.
double kb_average(const std::vector<double>& values, double dt);

// Deterministic parallel map: f(i) for i in [0,n), fixed result order.
void parallel_for(int n, int threads, const std::function<void(int)>& f);

} // namespace phi4
