// Field representation on the 3-torus (R/2piZ)^3 and its spectral calculus:
// Fourier transforms, inner products, multipliers, dealiased products.
//
// Conventions (single source of truth for every downstream constant):
//   e_k(x) = exp(i k.x) / (2 pi)^{3/2},   <f,g> = int_L f(x) conj(g(x)) dx,
//   c_k = <f, e_k>,  so  f(x) = sum_k c_k e_k(x)  and  <f,g> = sum_k f_k conj(g_k).
#pragma once

#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "phi4/lattice.hpp"

namespace phi4 {

using cplx = std::complex<double>;

struct FieldError : std::runtime_error {
    explicit FieldError(const std::string& what) : std::runtime_error(what) {}
};

// Complex Fourier coefficients on a truncated lattice, kx slowest index.
// Real-valued fields carry Hermitian symmetry c_{-k} = conj(c_k) exactly.
struct SpectralField {
    Cutoff K;
    bool real_valued = true;
    std::vector<cplx> c;

    SpectralField() : c(1, cplx(0.0)) {}
    explicit SpectralField(Cutoff cut, bool real = true)
        : K(cut), real_valued(real), c(std::size_t(cut.count()), cplx(0.0)) {}

    int nx() const { return 2 * K.x + 1; }
    int ny() const { return 2 * K.y + 1; }
    int nz() const { return 2 * K.z + 1; }

    std::size_t idx(int kx, int ky, int kz) const {
        return (std::size_t(kx + K.x) * ny() + (ky + K.y)) * nz() + (kz + K.z);
    }
    cplx& at(int kx, int ky, int kz) { return c[idx(kx, ky, kz)]; }
    const cplx& at(int kx, int ky, int kz) const { return c[idx(kx, ky, kz)]; }
    cplx& at(const LatticePoint& k) { return at(k.kx, k.ky, k.kz); }
    const cplx& at(const LatticePoint& k) const { return at(k.kx, k.ky, k.kz); }
    // 0 outside the stored cutoff
    cplx coeff(const LatticePoint& k) const { return K.contains(k) ? at(k) : cplx(0.0); }

    SpectralField& operator+=(const SpectralField& o);
    SpectralField& operator-=(const SpectralField& o);
    SpectralField& operator*=(double a);
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(double a, SpectralField f);

// Real samples on a uniform grid of [0,2pi)^3, x slowest index.
struct GridField {
    Cutoff M;  // points per axis are M.x, M.y, M.z (stored as counts, not cutoffs)
    std::vector<double> v;

    GridField() = default;
    GridField(int mx, int my, int mz) : M(0, 0, 0), v(std::size_t(mx) * my * mz, 0.0) {
        M.x = mx; M.y = my; M.z = mz;
    }
    std::size_t idx(int jx, int jy, int jz) const {
        return (std::size_t(jx) * M.y + jy) * M.z + jz;
    }
    double cell_volume() const {
        return (2.0 * M_PI / M.x) * (2.0 * M_PI / M.y) * (2.0 * M_PI / M.z);
    }
};

// --- construction / symmetry -------------------------------------------------

// Enforce c_{-k} = conj(c_k) and Im c_0 = 0.  Throws if the asymmetry exceeds
// tol relative to the largest amplitude, otherwise symmetrizes exactly.
void symmetrize(SpectralField& f, double tol = 1e-10);
double hermitian_residual(const SpectralField& f);
void check_finite(const SpectralField& f);

// Widen or shrink the stored cutoff (coefficients outside are dropped/zero).
SpectralField truncate(const SpectralField& f, Cutoff K_new);

// Per-axis extent of the nonzero coefficients (<= K; 0 for the zero field).
Cutoff effective_bandwidth(const SpectralField& f);

// --- transforms ---------------------------------------------------------------

// Smallest FFT-friendly size (factors 2,3,5,7) that is >= n.
int fast_grid_size(int n);

// Quadrature-exact analysis of a band-limited grid sample (requires M >= 2K+1).
SpectralField forward_transform(const GridField& g, Cutoff K, double sym_tol = 1e-10);

// Pointwise synthesis sum_k c_k e_k(x_j) on an (mx,my,mz) grid; the field must
// be Hermitian within 1e-10 (output is real).
GridField inverse_transform(const SpectralField& f, int mx, int my, int mz);
GridField inverse_transform(const SpectralField& f, int m);

// <f,g> = sum_k f_k conj(g_k); cutoffs may differ (implicit zero-padding).
cplx inner_product(const SpectralField& f, const SpectralField& g);
double l2_norm(const SpectralField& f);

// --- multipliers ---------------------------------------------------------------

// h(grad) f = sum_k h(k) c_k e_k.  The general form measures the Hermitian
// symmetry of h on the fly and drops the real flag when h(-k) != conj(h(k)).
SpectralField apply_multiplier(const SpectralField& f, const std::function<cplx(const LatticePoint&)>& h);
// Radial real h(|k|): even by construction, preserves realness bit-exactly.
SpectralField apply_radial_multiplier(const SpectralField& f, const std::function<double(double)>& h);

// --- products -------------------------------------------------------------------

// Exact spectral coefficients of f*g, computed on a grid padded per axis to
// 2(Bf+Bg)+1 effective bandwidths (no aliasing).  Output cutoff Bf+Bg unless
// K_out is given (in which case the exact result is truncated to K_out).
SpectralField pointwise_product(const SpectralField& f, const SpectralField& g);
SpectralField pointwise_product(const SpectralField& f, const SpectralField& g, Cutoff K_out);

// --- norms on the grid ------------------------------------------------------------

// L^p norm by quadrature on an (m,m,m)-style grid (defaults to 2(2K+1) per axis,
// exact for p in {2,4} on real band-limited fields).  p = infinity -> max norm.
double lp_norm(const SpectralField& f, double p);
double lp_norm_inf(const SpectralField& f);

// --- io ----------------------------------------------------------------------------

// Binary snapshot: magic "PHI4", version u32, K u32, real flag u8, then
// (2K+1)^3 complex doubles in row-major order (kx slowest), little-endian.
// Cubic cutoffs only.
void save_snapshot(const SpectralField& f, const std::string& path);
SpectralField load_snapshot(const std::string& path);
void export_csv(const SpectralField& f, const std::string& path);

} // namespace phi4
