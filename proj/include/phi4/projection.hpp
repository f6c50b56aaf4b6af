// Smooth/rough spectral projections P_N^(1), P_N^(2) and the heat/mass
// semigroup multiplier exp(-t(|k|^2 + m0^2)).
#pragma once

#include <string>

#include "phi4/field.hpp"

namespace phi4 {

struct MassParam {
    double m0;
    explicit MassParam(double m) : m0(m) {
        if (!(m > 0.0)) throw FieldError("mass parameter must be positive");
    }
};

// psi1: smooth nonincreasing, 1 on [0,1], 0 on [2,inf).
// psi2: piecewise-linear ramp, 1 on [0,2], 0 on [4,inf) (continuity of psi2 is
// not required by the definition; linear keeps its total variation equal to 2).
struct CutoffProfile {
    double psi(int i, double r) const;
    // tensor weight psi_i(2^-N |k1|) psi_i(2^-N |k2|) psi_i(2^-N |k3|)
    double tensor(int i, int N, const LatticePoint& k) const;

    void dump_csv(const std::string& path, int samples = 2000, double rmax = 5.0) const;
};

CutoffProfile default_profile();

// Per-axis support bound of P_N^(i): 2^{N+1} for i=1, 2^{N+2} for i=2.
int project_support(int i, int N);

// P_N^(i) f; evaluated per axis, so Hermitian symmetry survives bit-exactly.
SpectralField project(int i, int N, const SpectralField& f, const CutoffProfile& prof);

// e^{t(laplace - m0^2)} f (pass m0 = 0 for the pure heat flow via MassParam
// being strictly positive, use heat_semigroup below instead).
SpectralField semigroup(double t, const MassParam& m, const SpectralField& f);
SpectralField heat_semigroup(double t, const SpectralField& f);  // e^{t laplace} f

} // namespace phi4
