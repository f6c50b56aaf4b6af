#include "phi4/field.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <map>
#include <mutex>

namespace phi4 {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;
const double kBasisNorm = std::pow(kTwoPi, 1.5);  // (2 pi)^{3/2}

// ---- FFT engine: cached c2c plans, executed on caller buffers -------------

struct AlignedBuf {
    fftw_complex* p = nullptr;
    std::size_t n = 0;
    explicit AlignedBuf(std::size_t count) : n(count) {
        p = fftw_alloc_complex(count);
        if (!p) throw std::bad_alloc();
        std::memset(p, 0, sizeof(fftw_complex) * count);
    }
    ~AlignedBuf() { fftw_free(p); }
    AlignedBuf(const AlignedBuf&) = delete;
    AlignedBuf& operator=(const AlignedBuf&) = delete;
    cplx* data() { return reinterpret_cast<cplx*>(p); }
};

struct PlanKey {
    int mx, my, mz, sign;
    bool operator<(const PlanKey& o) const {
        return std::tie(mx, my, mz, sign) < std::tie(o.mx, o.my, o.mz, o.sign);
    }
};

std::mutex g_plan_mutex;
std::map<PlanKey, fftw_plan>& plan_cache() {
    static std::map<PlanKey, fftw_plan> cache;
    return cache;
}

// Plans are created once per (size, direction) on an fftw_malloc'd buffer and
// reused with the new-array interface; all our buffers share that alignment.
fftw_plan get_plan(int mx, int my, int mz, int sign) {
    std::lock_guard<std::mutex> lock(g_plan_mutex);
    PlanKey key{mx, my, mz, sign};
    auto& cache = plan_cache();
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    AlignedBuf tmp(std::size_t(mx) * my * mz);
    fftw_plan p = fftw_plan_dft_3d(mx, my, mz, tmp.p, tmp.p, sign, FFTW_ESTIMATE);
    if (!p) throw FieldError("fftw plan creation failed");
    cache[key] = p;
    return p;
}

void run_fft(cplx* buf, int mx, int my, int mz, int sign) {
    fftw_plan p = get_plan(mx, my, mz, sign);
    fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(buf), reinterpret_cast<fftw_complex*>(buf));
}

inline int wrap(int k, int m) { return ((k % m) + m) % m; }

// sum_k c_k e^{i k.x_j} on the grid (unscaled by the basis norm).
void synth_complex(const SpectralField& f, int mx, int my, int mz, AlignedBuf& buf) {
    if (mx < f.nx() || my < f.ny() || mz < f.nz())
        throw FieldError("inverse_transform: grid resolution below 2K+1");
    cplx* b = buf.data();
    std::memset(buf.p, 0, sizeof(fftw_complex) * buf.n);
    for (int kx = -f.K.x; kx <= f.K.x; ++kx) {
        const int jx = wrap(kx, mx);
        for (int ky = -f.K.y; ky <= f.K.y; ++ky) {
            const int jy = wrap(ky, my);
            const cplx* row = &f.c[(std::size_t(kx + f.K.x) * f.ny() + (ky + f.K.y)) * f.nz()];
            cplx* out = &b[(std::size_t(jx) * my + jy) * mz];
            for (int kz = -f.K.z; kz <= f.K.z; ++kz) out[wrap(kz, mz)] += row[kz + f.K.z];
        }
    }
    run_fft(b, mx, my, mz, FFTW_BACKWARD);
}

// inverse of synth_complex up to the 1/(mx my mz) DFT factor
SpectralField analyze_complex(AlignedBuf& buf, int mx, int my, int mz, Cutoff K) {
    if (mx < 2 * K.x + 1 || my < 2 * K.y + 1 || mz < 2 * K.z + 1)
        throw FieldError("forward_transform: grid resolution below 2K+1");
    run_fft(buf.data(), mx, my, mz, FFTW_FORWARD);
    const double scale = 1.0 / (double(mx) * my * mz);
    SpectralField f(K, false);
    const cplx* b = buf.data();
    for (int kx = -K.x; kx <= K.x; ++kx) {
        const int jx = wrap(kx, mx);
        for (int ky = -K.y; ky <= K.y; ++ky) {
            const int jy = wrap(ky, my);
            const cplx* in = &b[(std::size_t(jx) * my + jy) * mz];
            cplx* row = &f.c[(std::size_t(kx + K.x) * f.ny() + (ky + K.y)) * f.nz()];
            for (int kz = -K.z; kz <= K.z; ++kz) row[kz + K.z] = scale * in[wrap(kz, mz)];
        }
    }
    return f;
}

} // namespace

// ---- arithmetic -------------------------------------------------------------

SpectralField& SpectralField::operator+=(const SpectralField& o) {
    if (K == o.K) {
        for (std::size_t i = 0; i < c.size(); ++i) c[i] += o.c[i];
    } else {
        Cutoff Kn(std::max(K.x, o.K.x), std::max(K.y, o.K.y), std::max(K.z, o.K.z));
        SpectralField r = truncate(*this, Kn);
        for (int kx = -o.K.x; kx <= o.K.x; ++kx)
            for (int ky = -o.K.y; ky <= o.K.y; ++ky)
                for (int kz = -o.K.z; kz <= o.K.z; ++kz) r.at(kx, ky, kz) += o.at(kx, ky, kz);
        r.real_valued = real_valued && o.real_valued;
        *this = std::move(r);
        return *this;
    }
    real_valued = real_valued && o.real_valued;
    return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
    SpectralField neg = o;
    for (auto& z : neg.c) z = -z;
    return (*this += neg);
}

SpectralField& SpectralField::operator*=(double a) {
    for (auto& z : c) z *= a;
    return *this;
}

SpectralField operator+(SpectralField a, const SpectralField& b) { a += b; return a; }
SpectralField operator-(SpectralField a, const SpectralField& b) { a -= b; return a; }
SpectralField operator*(double a, SpectralField f) { f *= a; return f; }

// ---- symmetry ---------------------------------------------------------------

double hermitian_residual(const SpectralField& f) {
    double worst = 0.0;
    for (int kx = -f.K.x; kx <= f.K.x; ++kx)
        for (int ky = -f.K.y; ky <= f.K.y; ++ky)
            for (int kz = -f.K.z; kz <= f.K.z; ++kz) {
                const cplx d = f.at(kx, ky, kz) - std::conj(f.at(-kx, -ky, -kz));
                worst = std::max(worst, std::abs(d));
            }
    return worst;
}

void symmetrize(SpectralField& f, double tol) {
    double amax = 0.0;
    for (const auto& z : f.c) amax = std::max(amax, std::abs(z));
    const double res = hermitian_residual(f);
    if (res > tol * std::max(1.0, amax))
        throw FieldError("real-valued field violates Hermitian symmetry: residual " + std::to_string(res));
    for (int kx = 0; kx <= f.K.x; ++kx)
        for (int ky = -f.K.y; ky <= f.K.y; ++ky)
            for (int kz = -f.K.z; kz <= f.K.z; ++kz) {
                if (!owns_pair({kx, ky, kz})) continue;
                const cplx avg = 0.5 * (f.at(kx, ky, kz) + std::conj(f.at(-kx, -ky, -kz)));
                f.at(kx, ky, kz) = avg;
                f.at(-kx, -ky, -kz) = std::conj(avg);
            }
    f.at(0, 0, 0) = cplx(f.at(0, 0, 0).real(), 0.0);
    f.real_valued = true;
}

void check_finite(const SpectralField& f) {
    for (const auto& z : f.c)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw FieldError("non-finite coefficient in field");
}

SpectralField truncate(const SpectralField& f, Cutoff K_new) {
    SpectralField r(K_new, f.real_valued);
    const int bx = std::min(f.K.x, K_new.x), by = std::min(f.K.y, K_new.y), bz = std::min(f.K.z, K_new.z);
    for (int kx = -bx; kx <= bx; ++kx)
        for (int ky = -by; ky <= by; ++ky)
            for (int kz = -bz; kz <= bz; ++kz) r.at(kx, ky, kz) = f.at(kx, ky, kz);
    return r;
}

Cutoff effective_bandwidth(const SpectralField& f) {
    Cutoff b(0, 0, 0);
    for (int kx = -f.K.x; kx <= f.K.x; ++kx)
        for (int ky = -f.K.y; ky <= f.K.y; ++ky)
            for (int kz = -f.K.z; kz <= f.K.z; ++kz) {
                if (f.at(kx, ky, kz) != cplx(0.0)) {
                    b.x = std::max(b.x, std::abs(kx));
                    b.y = std::max(b.y, std::abs(ky));
                    b.z = std::max(b.z, std::abs(kz));
                }
            }
    return b;
}

// ---- transforms ---------------------------------------------------------------

int fast_grid_size(int n) {
    for (int m = std::max(n, 1);; ++m) {
        int r = m;
        for (int p : {2, 3, 5, 7})
            while (r % p == 0) r /= p;
        if (r == 1) return m;
    }
}

SpectralField forward_transform(const GridField& g, Cutoff K, double sym_tol) {
    AlignedBuf buf(std::size_t(g.M.x) * g.M.y * g.M.z);
    cplx* b = buf.data();
    for (std::size_t i = 0; i < g.v.size(); ++i) b[i] = g.v[i];
    SpectralField f = analyze_complex(buf, g.M.x, g.M.y, g.M.z, K);
    const double hvol = kBasisNorm;  // (2 pi)^{3/2} / M^3 absorbed: scale below
    for (auto& z : f.c) z *= hvol;
    symmetrize(f, sym_tol);
    return f;
}

GridField inverse_transform(const SpectralField& f, int mx, int my, int mz) {
    if (f.real_valued && hermitian_residual(f) > 1e-10)
        throw FieldError("inverse_transform: Hermitian symmetry violated on real field");
    AlignedBuf buf(std::size_t(mx) * my * mz);
    synth_complex(f, mx, my, mz, buf);
    GridField g(mx, my, mz);
    const cplx* b = buf.data();
    const double s = 1.0 / kBasisNorm;
    for (std::size_t i = 0; i < g.v.size(); ++i) g.v[i] = b[i].real() * s;
    return g;
}

GridField inverse_transform(const SpectralField& f, int m) { return inverse_transform(f, m, m, m); }

cplx inner_product(const SpectralField& f, const SpectralField& g) {
    check_finite(f);
    check_finite(g);
    const int bx = std::min(f.K.x, g.K.x), by = std::min(f.K.y, g.K.y), bz = std::min(f.K.z, g.K.z);
    cplx s(0.0);
    for (int kx = -bx; kx <= bx; ++kx)
        for (int ky = -by; ky <= by; ++ky)
            for (int kz = -bz; kz <= bz; ++kz) s += f.at(kx, ky, kz) * std::conj(g.at(kx, ky, kz));
    return s;
}

double l2_norm(const SpectralField& f) {
    double s = 0.0;
    for (const auto& z : f.c) s += std::norm(z);
    return std::sqrt(s);
}

// ---- multipliers ----------------------------------------------------------------

SpectralField apply_multiplier(const SpectralField& f,
                               const std::function<cplx(const LatticePoint&)>& h) {
    SpectralField hv(f.K, false);
    for (int kx = -f.K.x; kx <= f.K.x; ++kx)
        for (int ky = -f.K.y; ky <= f.K.y; ++ky)
            for (int kz = -f.K.z; kz <= f.K.z; ++kz) {
                const cplx w = h({kx, ky, kz});
                if (!std::isfinite(w.real()) || !std::isfinite(w.imag()))
                    throw FieldError("multiplier not finite on the lattice");
                hv.at(kx, ky, kz) = w;
            }
    const double hres = hermitian_residual(hv);
    SpectralField r(f.K, false);
    for (std::size_t i = 0; i < f.c.size(); ++i) r.c[i] = hv.c[i] * f.c[i];
    if (f.real_valued && hres <= 1e-12) {
        // h(-k) = conj(h(k)): the operator maps real fields to real fields
        r.real_valued = true;
        if (hres > 0.0) symmetrize(r, 1e-10);
    }
    return r;
}

SpectralField apply_radial_multiplier(const SpectralField& f, const std::function<double(double)>& h) {
    SpectralField r(f.K, f.real_valued);
    for (int kx = -f.K.x; kx <= f.K.x; ++kx)
        for (int ky = -f.K.y; ky <= f.K.y; ++ky)
            for (int kz = -f.K.z; kz <= f.K.z; ++kz) {
                const double w = h(LatticePoint{kx, ky, kz}.norm());
                if (!std::isfinite(w)) throw FieldError("multiplier not finite on the lattice");
                r.at(kx, ky, kz) = w * f.at(kx, ky, kz);
            }
    return r;
}

// ---- products ------------------------------------------------------------------

SpectralField pointwise_product(const SpectralField& f, const SpectralField& g, Cutoff K_out) {
    const Cutoff bf = effective_bandwidth(f), bg = effective_bandwidth(g);
    const Cutoff bmax = bf + bg;
    const Cutoff keep(std::min(K_out.x, bmax.x), std::min(K_out.y, bmax.y), std::min(K_out.z, bmax.z));
    const int mx = fast_grid_size(2 * bmax.x + 1), my = fast_grid_size(2 * bmax.y + 1),
              mz = fast_grid_size(2 * bmax.z + 1);

    AlignedBuf a(std::size_t(mx) * my * mz), b(std::size_t(mx) * my * mz);
    // stored cutoffs may exceed the nonzero content; shrink before synthesis
    if (bf == f.K && bg == g.K) {
        synth_complex(f, mx, my, mz, a);
        synth_complex(g, mx, my, mz, b);
    } else {
        synth_complex(truncate(f, bf), mx, my, mz, a);
        synth_complex(truncate(g, bg), mx, my, mz, b);
    }
    cplx* pa = a.data();
    const cplx* pb = b.data();
    // physical product carries one basis normalization: e_k e_l = e_{k+l}/(2 pi)^{3/2}
    const double s = 1.0 / kBasisNorm;
    for (std::size_t i = 0; i < a.n; ++i) pa[i] = pa[i] * pb[i] * s;
    SpectralField r = analyze_complex(a, mx, my, mz, keep);
    if (f.real_valued && g.real_valued) {
        r.real_valued = true;
        symmetrize(r, 1e-10);
    }
    if (!(keep == K_out)) r = truncate(r, K_out);
    return r;
}

SpectralField pointwise_product(const SpectralField& f, const SpectralField& g) {
    return pointwise_product(f, g, f.K + g.K);
}

// ---- grid norms -----------------------------------------------------------------

double lp_norm(const SpectralField& f, double p) {
    if (p == 2.0) {
        // Parseval under the orthonormal basis
        return l2_norm(f);
    }
    const int mx = 2 * (2 * f.K.x + 1), my = 2 * (2 * f.K.y + 1), mz = 2 * (2 * f.K.z + 1);
    GridField g = inverse_transform(f, mx, my, mz);
    const double dv = g.cell_volume();
    double s = 0.0;
    for (double v : g.v) s += std::pow(std::abs(v), p);
    return std::pow(s * dv, 1.0 / p);
}

double lp_norm_inf(const SpectralField& f) {
    const int mx = 2 * (2 * f.K.x + 1), my = 2 * (2 * f.K.y + 1), mz = 2 * (2 * f.K.z + 1);
    GridField g = inverse_transform(f, mx, my, mz);
    double s = 0.0;
    for (double v : g.v) s = std::max(s, std::abs(v));
    return s;
}

// ---- io --------------------------------------------------------------------------

void save_snapshot(const SpectralField& f, const std::string& path) {
    if (!f.K.cubic()) throw FieldError("snapshot format is cubic-only");
    std::FILE* fp = std::fopen(path.c_str(), "wb");
    if (!fp) throw FieldError("cannot open " + path + " for writing");
    const char magic[4] = {'P', 'H', 'I', '4'};
    const std::uint32_t version = 1, K = std::uint32_t(f.K.x);
    const std::uint8_t real_flag = f.real_valued ? 1 : 0;
    std::fwrite(magic, 1, 4, fp);
    std::fwrite(&version, 4, 1, fp);
    std::fwrite(&K, 4, 1, fp);
    std::fwrite(&real_flag, 1, 1, fp);
    std::fwrite(f.c.data(), sizeof(cplx), f.c.size(), fp);
    std::fclose(fp);
}

SpectralField load_snapshot(const std::string& path) {
    std::FILE* fp = std::fopen(path.c_str(), "rb");
    if (!fp) throw FieldError("cannot open " + path);
    char magic[4];
    std::uint32_t version = 0, K = 0;
    std::uint8_t real_flag = 0;
    bool ok = std::fread(magic, 1, 4, fp) == 4 && std::memcmp(magic, "PHI4", 4) == 0;
    ok = ok && std::fread(&version, 4, 1, fp) == 1 && version == 1;
    ok = ok && std::fread(&K, 4, 1, fp) == 1 && std::fread(&real_flag, 1, 1, fp) == 1;
    if (!ok) {
        std::fclose(fp);
        throw FieldError("bad snapshot header in " + path);
    }
    SpectralField f(Cutoff(int(K)), real_flag != 0);
    ok = std::fread(f.c.data(), sizeof(cplx), f.c.size(), fp) == f.c.size();
    std::fclose(fp);
    if (!ok) throw FieldError("truncated snapshot " + path);
    check_finite(f);
    if (f.real_valued) symmetrize(f, 1e-10);
    return f;
}

void export_csv(const SpectralField& f, const std::string& path) {
    std::FILE* fp = std::fopen(path.c_str(), "w");
    if (!fp) throw FieldError("cannot open " + path + " for writing");
    std::fprintf(fp, "kx,ky,kz,re,im\n");
    for (int kx = -f.K.x; kx <= f.K.x; ++kx)
        for (int ky = -f.K.y; ky <= f.K.y; ++ky)
            for (int kz = -f.K.z; kz <= f.K.z; ++kz) {
                const cplx z = f.at(kx, ky, kz);
                std::fprintf(fp, "%d,%d,%d,%.17g,%.17g\n", kx, ky, kz, z.real(), z.imag());
            }
    std::fclose(fp);
}

} // namespace phi4
