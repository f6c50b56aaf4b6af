// Counter-based random streams (Philox4x32-10).
//
// Every stochastic object in the workbench draws from a stream addressed by
// (seed, purpose, chain, mode, step).  Draws depend only on the address, never
// on program order, so mode loops and chain tasks can run in any order or
// thread count and reproduce identical output.
#pragma once

#include <cstdint>
#include <cmath>

#include "phi4/lattice.hpp"

namespace phi4 {

struct Philox4x32 {
    std::uint32_t key[2];

    // One 10-round Philox block: 128-bit counter -> 128 pseudo-random bits.
    void block(const std::uint32_t ctr_in[4], std::uint32_t out[4]) const;
};

// Stable 64-bit mix used to derive stream keys from integer tags.
std::uint64_t mix64(std::uint64_t x);
std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v);

// A deterministic stream of doubles/gaussians indexed by a 64-bit counter.
class RngStream {
  public:
    RngStream() : RngStream(0) {}
    explicit RngStream(std::uint64_t key);

    // Uniform in (0,1), draw index `ctr`, sub-slot `slot` in [0,4).
    double u01(std::uint64_t ctr, unsigned slot = 0) const;
    // Standard normal, draw index `ctr`, sub-slot `slot` in [0,2).
    double gauss(std::uint64_t ctr, unsigned slot = 0) const;

    std::uint64_t key() const { return key_; }

  private:
    Philox4x32 ph_;
    std::uint64_t key_;
};

// Sequential convenience wrapper over a stream (for samplers that are
// inherently serial, e.g. one MCMC chain).
class SequentialRng {
  public:
    explicit SequentialRng(std::uint64_t key) : s_(key) {}
    double u01() { return s_.u01(n_++, 0); }
    double gauss() { return s_.gauss(n_++, 0); }

  private:
    RngStream s_;
    std::uint64_t n_ = 0;
};

// Stream addresses.  `purpose` separates independent uses of the same seed.
enum class StreamPurpose : std::uint64_t {
    ou_noise = 1,      // OU / SDE mode noise
    initial_draw = 2,  // stationary initial conditions
    mcmc = 3,          // Gibbs sampler proposals
    corpus = 4,        // random test fields
    mc_oracle = 5,     // Monte-Carlo oracles
    gibbs_init = 6,    // Gibbs chain starting states
    free_modes = 7,    // Gaussian modes outside the interacting sector
};

RngStream mode_stream(std::uint64_t seed, StreamPurpose purpose, std::uint64_t chain,
                      const LatticePoint& k);
RngStream scalar_stream(std::uint64_t seed, StreamPurpose purpose, std::uint64_t chain);

} // namespace phi4
