// Random real field generators for test corpora and calibration runs.
#pragma once

#include <functional>

#include "phi4/field.hpp"
#include "phi4/rng.hpp"

namespace phi4 {

// Hermitian Gaussian field: owner modes get (xi + i eta)/sqrt(2) * amp(|k|),
// the zero mode a real unit Gaussian * amp(0); mirrors conjugated.
SpectralField random_real_field(Cutoff K, const std::function<double(double)>& amplitude,
                                std::uint64_t seed, std::uint64_t tag);

// Amplitude (1+|k|^2)^{-q/2} with q chosen so that ||Delta_j f||_{L^2} ~ 2^{-js}
// for spectra filling `dim` effective dimensions (3 = cubic, 2 = slab).
SpectralField random_besov_field(Cutoff K, double s, std::uint64_t seed, std::uint64_t tag,
                                 int dim = 3);

} // namespace phi4
