// Mode-index bookkeeping for the truncated Fourier lattice on the 3-torus.
#pragma once

#include <cmath>
#include <cstdint>

namespace phi4 {

// A point of Z^3 indexing the basis function e_k(x) = exp(i k.x)/(2 pi)^{3/2}.
struct LatticePoint {
    int kx = 0, ky = 0, kz = 0;

    double norm2() const { return double(kx) * kx + double(ky) * ky + double(kz) * kz; }
    double norm() const { return std::sqrt(norm2()); }
    LatticePoint operator-() const { return {-kx, -ky, -kz}; }
    LatticePoint operator+(const LatticePoint& o) const { return {kx + o.kx, ky + o.ky, kz + o.kz}; }
    LatticePoint operator-(const LatticePoint& o) const { return {kx - o.kx, ky - o.ky, kz - o.kz}; }
    bool operator==(const LatticePoint& o) const { return kx == o.kx && ky == o.ky && kz == o.kz; }
};

// Per-axis cutoff of a truncated lattice {|k_x|<=x, |k_y|<=y, |k_z|<=z}.
// Most fields are cubic; anisotropic cutoffs keep dealiased products of
// spectrally thin fields affordable.
struct Cutoff {
    int x = 0, y = 0, z = 0;

    Cutoff() = default;
    Cutoff(int cx, int cy, int cz) : x(cx), y(cy), z(cz) {}
    explicit Cutoff(int c) : x(c), y(c), z(c) {}

    bool cubic() const { return x == y && y == z; }
    std::int64_t count() const {
        return std::int64_t(2 * x + 1) * (2 * y + 1) * (2 * z + 1);
    }
    bool contains(const LatticePoint& k) const {
        return std::abs(k.kx) <= x && std::abs(k.ky) <= y && std::abs(k.kz) <= z;
    }
    double radius() const { return std::sqrt(double(x) * x + double(y) * y + double(z) * z); }
    Cutoff operator+(const Cutoff& o) const { return {x + o.x, y + o.y, z + o.z}; }
    bool operator==(const Cutoff& o) const { return x == o.x && y == o.y && z == o.z; }
};

// Canonical half-lattice owner of a conjugate pair {k, -k}: k itself if it is
// lexicographically positive (kx, then ky, then kz), else -k.  k = 0 owns itself.
inline bool owns_pair(const LatticePoint& k) {
    if (k.kx != 0) return k.kx > 0;
    if (k.ky != 0) return k.ky > 0;
    return k.kz >= 0;
}

} // namespace phi4
