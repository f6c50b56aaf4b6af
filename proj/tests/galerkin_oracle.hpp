// Test-only oracles for the Galerkin dynamics, kept independent of the
// library's spectral-product path: the interaction gradient is evaluated by a
// direct triple convolution over modes, and the measure is cross-checked by a
// separate Hamiltonian Monte Carlo sampler built on that gradient.
#pragma once

#include <cmath>
#include <vector>

#include "phi4/gibbs.hpp"

namespace phi4_test {

using namespace phi4;

// lambda psi(k) [ (2pi)^{-3} sum_{l1+l2+l3=k} psi psi psi x x x ] - 3 lambda (C1-3 lambda C2) psi(k)^2 x_k
inline SpectralField drift_convolution_oracle(const SpectralField& x, int N, double lambda,
                                              const RenormConstants& c, const CutoffProfile& prof) {
    const int K1 = project_support(1, N);
    const double vol = std::pow(2.0 * M_PI, -3.0);
    SpectralField d(Cutoff(K1), false);
    // enumerate the psi-support once; the triple sum runs over it
    std::vector<std::pair<LatticePoint, double>> supp;
    for (int ax = -K1; ax <= K1; ++ax)
        for (int ay = -K1; ay <= K1; ++ay)
            for (int az = -K1; az <= K1; ++az) {
                const LatticePoint l{ax, ay, az};
                const double w = prof.tensor(1, N, l);
                if (w != 0.0) supp.emplace_back(l, w);
            }
    for (const auto& [l1, w1] : supp)
        for (const auto& [l2, w2] : supp) {
            const cplx x12 = x.coeff(l1) * x.coeff(l2) * (w1 * w2);
            for (const auto& [l3, w3] : supp) {
                const LatticePoint k = l1 + l2 + l3;
                if (!d.K.contains(k)) continue;
                const double wk = prof.tensor(1, N, k);
                if (wk == 0.0) continue;
                d.at(k) += lambda * wk * vol * w3 * x12 * x.coeff(l3);
            }
        }
    const double cc = c.c1 - 3.0 * lambda * c.c2;
    for (int kx = -K1; kx <= K1; ++kx)
        for (int ky = -K1; ky <= K1; ++ky)
            for (int kz = -K1; kz <= K1; ++kz) {
                const double wk = prof.tensor(1, N, {kx, ky, kz});
                d.at(kx, ky, kz) -= 3.0 * lambda * cc * wk * wk * x.coeff({kx, ky, kz});
            }
    d.real_valued = x.real_valued;
    return d;
}

// Independent real coordinates of a Hermitian field on the K1 cube.
struct ModeCoords {
    std::vector<LatticePoint> owners;  // zero mode first
    explicit ModeCoords(int K) {
        owners.push_back({0, 0, 0});
        for (int kx = -K; kx <= K; ++kx)
            for (int ky = -K; ky <= K; ++ky)
                for (int kz = -K; kz <= K; ++kz) {
                    const LatticePoint k{kx, ky, kz};
                    if (owns_pair(k) && !(kx == 0 && ky == 0 && kz == 0)) owners.push_back(k);
                }
    }
    std::size_t dim() const { return 2 * owners.size() - 1; }
    SpectralField unpack(const std::vector<double>& q, int K) const {
        SpectralField x(Cutoff(K), true);
        x.at(0, 0, 0) = q[0];
        for (std::size_t i = 1; i < owners.size(); ++i) {
            const cplx v(q[2 * i - 1], q[2 * i]);
            x.at(owners[i]) = v;
            x.at(-owners[i]) = std::conj(v);
        }
        return x;
    }
    std::vector<double> pack(const SpectralField& x) const {
        std::vector<double> q(dim());
        q[0] = x.at(0, 0, 0).real();
        for (std::size_t i = 1; i < owners.size(); ++i) {
            q[2 * i - 1] = x.at(owners[i]).real();
            q[2 * i] = x.at(owners[i]).imag();
        }
        return q;
    }
};

// HMC for the density exp(-G - 2U) in the independent coordinates, with the
// gradient assembled from the convolution oracle.
class HmcOracle {
  public:
    HmcOracle(const SimConfig& sc, const RenormConstants& c, const CutoffProfile& prof,
              std::uint64_t chain, double eps = 0.08, int leaps = 12)
        : sc_(sc), c_(c), prof_(&prof), coords_(project_support(1, sc.N)),
          rng_(hash_combine(mix64(sc.seed), 0xAC5Eull + chain)), eps_(eps), leaps_(leaps) {
        q_.assign(coords_.dim(), 0.0);
    }

    double potential(const std::vector<double>& q) const {
        const SpectralField x = coords_.unpack(q, project_support(1, sc_.N));
        const double m2 = sc_.m0 * sc_.m0;
        // sum over all modes of theta |x_k|^2 (pairs counted twice)
        double g = 0.0;
        for (int kx = -x.K.x; kx <= x.K.x; ++kx)
            for (int ky = -x.K.y; ky <= x.K.y; ++ky)
                for (int kz = -x.K.z; kz <= x.K.z; ++kz)
                    g += (double(kx) * kx + double(ky) * ky + double(kz) * kz + m2) *
                         std::norm(x.at(kx, ky, kz));
        return g + 2.0 * energy_U(x, sc_.N, sc_.lambda, c_, *prof_);
    }

    std::vector<double> gradient(const std::vector<double>& q) const {
        const int K1 = project_support(1, sc_.N);
        const SpectralField x = coords_.unpack(q, K1);
        const SpectralField d = drift_convolution_oracle(x, sc_.N, sc_.lambda, c_, *prof_);
        const double m2 = sc_.m0 * sc_.m0;
        std::vector<double> g(coords_.dim());
        g[0] = 2.0 * m2 * q[0] + 2.0 * d.at(0, 0, 0).real();
        for (std::size_t i = 1; i < coords_.owners.size(); ++i) {
            const LatticePoint k = coords_.owners[i];
            const double theta = k.norm2() + m2;
            g[2 * i - 1] = 4.0 * theta * q[2 * i - 1] + 4.0 * d.coeff(k).real();
            g[2 * i] = 4.0 * theta * q[2 * i] + 4.0 * d.coeff(k).imag();
        }
        return g;
    }

    void step() {
        std::vector<double> p(coords_.dim());
        for (auto& v : p) v = rng_.gauss();
        std::vector<double> q = q_;
        double h0 = potential(q) + 0.5 * dot(p, p);
        std::vector<double> g = gradient(q);
        for (int l = 0; l < leaps_; ++l) {
            axpy(p, -0.5 * eps_, g);
            axpy(q, eps_, p);
            g = gradient(q);
            axpy(p, -0.5 * eps_, g);
        }
        const double h1 = potential(q) + 0.5 * dot(p, p);
        if (std::log(rng_.u01()) < h0 - h1) q_ = q;
        ++steps_;
    }

    const std::vector<double>& state() const { return q_; }
    double mode0() const { return q_[0]; }

  private:
    static double dot(const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
        return s;
    }
    static void axpy(std::vector<double>& y, double a, const std::vector<double>& x) {
        for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
    }

    SimConfig sc_;
    RenormConstants c_;
    const CutoffProfile* prof_;
    ModeCoords coords_;
    SequentialRng rng_;
    double eps_;
    int leaps_;
    std::vector<double> q_;
    std::uint64_t steps_ = 0;
};

} // namespace phi4_test
