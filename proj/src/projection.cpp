#include "phi4/projection.hpp"

#include <cmath>
#include <cstdio>
#include <vector>

#include "phi4/bump.hpp"

namespace phi4 {

double CutoffProfile::psi(int i, double r) const {
    if (i == 1) return smooth_step_down(r, 1.0, 2.0);
    if (i == 2) {
        if (r <= 2.0) return 1.0;
        if (r >= 4.0) return 0.0;
        return 0.5 * (4.0 - r);
    }
    throw FieldError("projection index must be 1 or 2");
}

double CutoffProfile::tensor(int i, int N, const LatticePoint& k) const {
    const double s = std::ldexp(1.0, -N);
    return psi(i, s * std::abs(double(k.kx))) * psi(i, s * std::abs(double(k.ky))) *
           psi(i, s * std::abs(double(k.kz)));
}

void CutoffProfile::dump_csv(const std::string& path, int samples, double rmax) const {
    std::FILE* fp = std::fopen(path.c_str(), "w");
    if (!fp) throw FieldError("cannot open " + path + " for writing");
    std::fprintf(fp, "r,psi1,psi2\n");
    for (int i = 0; i < samples; ++i) {
        const double r = rmax * double(i) / double(samples - 1);
        std::fprintf(fp, "%.17g,%.17g,%.17g\n", r, psi(1, r), psi(2, r));
    }
    std::fclose(fp);
}

CutoffProfile default_profile() { return CutoffProfile{}; }

int project_support(int i, int N) {
    if (i != 1 && i != 2) throw FieldError("projection index must be 1 or 2");
    return 1 << (N + i);
}

SpectralField project(int i, int N, const SpectralField& f, const CutoffProfile& prof) {
    const double s = std::ldexp(1.0, -N);
    std::vector<double> wx(std::size_t(f.nx())), wy(std::size_t(f.ny())), wz(std::size_t(f.nz()));
    for (int k = -f.K.x; k <= f.K.x; ++k) wx[std::size_t(k + f.K.x)] = prof.psi(i, s * std::abs(double(k)));
    for (int k = -f.K.y; k <= f.K.y; ++k) wy[std::size_t(k + f.K.y)] = prof.psi(i, s * std::abs(double(k)));
    for (int k = -f.K.z; k <= f.K.z; ++k) wz[std::size_t(k + f.K.z)] = prof.psi(i, s * std::abs(double(k)));
    SpectralField r(f.K, f.real_valued);
    std::size_t n = 0;
    for (int ax = 0; ax < f.nx(); ++ax)
        for (int ay = 0; ay < f.ny(); ++ay) {
            const double wxy = wx[std::size_t(ax)] * wy[std::size_t(ay)];
            for (int az = 0; az < f.nz(); ++az, ++n) r.c[n] = wxy * wz[std::size_t(az)] * f.c[n];
        }
    return r;
}

SpectralField semigroup(double t, const MassParam& m, const SpectralField& f) {
    if (t < 0.0) throw FieldError("semigroup requires t >= 0");
    const double m2 = m.m0 * m.m0;
    return apply_radial_multiplier(f, [t, m2](double r) { return std::exp(-t * (r * r + m2)); });
}

SpectralField heat_semigroup(double t, const SpectralField& f) {
    if (t < 0.0) throw FieldError("semigroup requires t >= 0");
    return apply_radial_multiplier(f, [t](double r) { return std::exp(-t * r * r); });
}

} // namespace phi4
