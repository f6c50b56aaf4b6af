#include "phi4/gaussian_moments.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <unordered_map>

#include "phi4/rng.hpp"

namespace phi4 {

void GaussianSpec::validate() const {
    const std::size_t n = mean.size();
    if (cov.size() != n) throw FieldError("gaussian spec: cov dimension mismatch");
    for (std::size_t i = 0; i < n; ++i) {
        if (cov[i].size() != n) throw FieldError("gaussian spec: cov dimension mismatch");
        for (std::size_t j = 0; j < n; ++j)
            if (std::abs(cov[i][j] - cov[j][i]) > 1e-12 * (1.0 + std::abs(cov[i][j])))
                throw FieldError("gaussian spec: covariance must be symmetric (bilinear pairing)");
    }
}

GaussianSpec spec_from_factor(const std::vector<cplx>& mean,
                              const std::vector<std::vector<cplx>>& factor) {
    GaussianSpec s;
    s.mean = mean;
    const std::size_t n = mean.size();
    const std::size_t m = factor.empty() ? 0 : factor[0].size();
    s.cov.assign(n, std::vector<cplx>(n, cplx(0.0)));
    for (std::size_t i = 0; i < n; ++i) {
        if (factor[i].size() != m) throw FieldError("gaussian factor: ragged matrix");
        for (std::size_t j = 0; j < n; ++j) {
            cplx acc(0.0);
            for (std::size_t l = 0; l < m; ++l) acc += factor[i][l] * factor[j][l];
            s.cov[i][j] = acc;
        }
    }
    return s;
}

cplx isserlis_moment(const GaussianSpec& spec, const std::vector<int>& indices) {
    spec.validate();
    const std::size_t m = indices.size();
    if (m > 12) throw FieldError("isserlis_moment: order capped at 12");
    for (int i : indices)
        if (i < 0 || std::size_t(i) >= spec.dim()) throw FieldError("isserlis_moment: index out of range");
    if (m == 0) return cplx(1.0);

    // memoize on the subset of positions still present
    std::unordered_map<std::uint32_t, cplx> memo;
    const std::uint32_t full = (1u << m) - 1u;
    std::function<cplx(std::uint32_t)> eval = [&](std::uint32_t mask) -> cplx {
        if (mask == 0) return cplx(1.0);
        auto it = memo.find(mask);
        if (it != memo.end()) return it->second;
        const unsigned p = unsigned(__builtin_ctz(mask));
        const std::uint32_t rest = mask & ~(1u << p);
        cplx acc = spec.mean[std::size_t(indices[p])] * eval(rest);
        for (std::uint32_t r = rest; r != 0; r &= r - 1) {
            const unsigned q = unsigned(__builtin_ctz(r));
            acc += spec.cov[std::size_t(indices[p])][std::size_t(indices[q])] * eval(rest & ~(1u << q));
        }
        memo.emplace(mask, acc);
        return acc;
    };
    return eval(full);
}

cplx isserlis_moment_perm(const GaussianSpec& spec, const std::vector<int>& indices) {
    spec.validate();
    const std::size_t m = indices.size();
    if (m == 0) return cplx(1.0);
    if (m % 2 != 0) throw FieldError("isserlis_moment_perm: even order required");
    if (m > 8) throw FieldError("isserlis_moment_perm: order capped at 8");
    const std::size_t n = m / 2;

    std::vector<int> perm(m);
    auto factorial = [](std::size_t k) {
        double f = 1.0;
        for (std::size_t i = 2; i <= k; ++i) f *= double(i);
        return f;
    };
    cplx total(0.0);
    for (std::size_t i = 0; i <= n; ++i) {
        const double weight = 1.0 / (factorial(2 * i) * factorial(n - i) * std::pow(2.0, double(n - i)));
        cplx osum(0.0);
        std::iota(perm.begin(), perm.end(), 0);
        do {
            cplx term(1.0);
            for (std::size_t j = 0; j < 2 * i; ++j)
                term *= spec.mean[std::size_t(indices[std::size_t(perm[j])])];
            for (std::size_t j = i; j < n; ++j) {
                const int a = indices[std::size_t(perm[2 * j])];
                const int b = indices[std::size_t(perm[2 * j + 1])];
                term *= spec.cov[std::size_t(a)][std::size_t(b)];
            }
            osum += term;
        } while (std::next_permutation(perm.begin(), perm.end()));
        total += weight * osum;
    }
    return total;
}

std::vector<std::vector<cplx>> symmetric_factor(const std::vector<std::vector<cplx>>& cov) {
    const std::size_t n = cov.size();
    double scale = 0.0;
    for (const auto& row : cov)
        for (const auto& z : row) scale = std::max(scale, std::abs(z));
    std::vector<std::vector<cplx>> L(n, std::vector<cplx>(n, cplx(0.0)));
    for (std::size_t j = 0; j < n; ++j) {
        cplx d = cov[j][j];
        for (std::size_t l = 0; l < j; ++l) d -= L[j][l] * L[j][l];
        if (std::abs(d) <= 1e-12 * std::max(scale, 1.0)) {
            // semidefinite pivot: the remaining column must vanish too
            for (std::size_t i = j + 1; i < n; ++i) {
                cplx r = cov[i][j];
                for (std::size_t l = 0; l < j; ++l) r -= L[i][l] * L[j][l];
                if (std::abs(r) > 1e-8 * std::max(scale, 1.0))
                    throw FieldError("symmetric_factor: zero pivot with nonzero column");
            }
            continue;
        }
        const cplx piv = std::sqrt(d);
        L[j][j] = piv;
        for (std::size_t i = j + 1; i < n; ++i) {
            cplx r = cov[i][j];
            for (std::size_t l = 0; l < j; ++l) r -= L[i][l] * L[j][l];
            L[i][j] = r / piv;
        }
    }
    return L;
}

std::pair<cplx, double> mc_moment(const std::vector<cplx>& mean,
                                  const std::vector<std::vector<cplx>>& factor,
                                  const std::vector<int>& indices, std::size_t samples,
                                  std::uint64_t seed) {
    if (samples < 100) throw FieldError("mc_moment: need at least 100 samples");
    const std::size_t n = mean.size();
    const std::size_t m = factor.empty() ? 0 : factor[0].size();
    RngStream st = scalar_stream(seed, StreamPurpose::mc_oracle, 0);
    cplx acc(0.0);
    double acc2_re = 0.0, acc2_im = 0.0;
    std::vector<cplx> z(n);
    std::vector<double> xi(m);
    for (std::size_t s = 0; s < samples; ++s) {
        for (std::size_t l = 0; l < m; ++l) xi[l] = st.gauss(s * m + l, 0);
        for (std::size_t i = 0; i < n; ++i) {
            cplx v = mean[i];
            for (std::size_t l = 0; l < m; ++l) v += factor[i][l] * xi[l];
            z[i] = v;
        }
        cplx prod(1.0);
        for (int i : indices) prod *= z[std::size_t(i)];
        acc += prod;
        acc2_re += prod.real() * prod.real();
        acc2_im += prod.imag() * prod.imag();
    }
    const double ns = double(samples);
    const cplx est = acc / ns;
    const double var_re = std::max(0.0, acc2_re / ns - est.real() * est.real());
    const double var_im = std::max(0.0, acc2_im / ns - est.imag() * est.imag());
    const double se = std::sqrt((var_re + var_im) / ns);
    return {est, se};
}

std::pair<cplx, double> mc_moment(const GaussianSpec& spec, const std::vector<int>& indices,
                                  std::size_t samples, std::uint64_t seed) {
    spec.validate();
    return mc_moment(spec.mean, symmetric_factor(spec.cov), indices, samples, seed);
}

} // namespace phi4
