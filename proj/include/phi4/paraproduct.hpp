// Bony paraproducts and the two commutator quantities used by the
// paracontrolled machinery:
//   f <. g  = sum_{j>=0} (S_j f)(Delta_{j+1} g)          (low-high)
//   f =. g  = sum_j Delta_j f (Delta_{j-1}+Delta_j+Delta_{j+1}) g   (resonant)
//   f >. g  = g <. f                                     (high-low)
// and fg = (f <. g) + (f =. g) + (f >. g) exactly on band-limited fields.
#pragma once

#include "phi4/dyadic.hpp"
#include "phi4/projection.hpp"

namespace phi4 {

enum class ParaKind { lt, res, gt, leq, geq };

SpectralField paraproduct(const SpectralField& f, const SpectralField& g, ParaKind kind,
                          const DyadicPartition& P);

// (f <. g) =. h - f (g =. h)   (Prop "com2" quantity)
SpectralField commutator_res(const SpectralField& f, const SpectralField& g,
                             const SpectralField& h, const DyadicPartition& P);

// e^{t laplace}(P_N^1)^2 (f <. g) - f <. (e^{t laplace}(P_N^1)^2 g)  ("com3")
SpectralField commutator_heat(const SpectralField& f, const SpectralField& g, double t, int N,
                              const CutoffProfile& prof, const DyadicPartition& P);

} // namespace phi4
