#include "phi4/random_fields.hpp"

#include <cmath>

namespace phi4 {

SpectralField random_real_field(Cutoff K, const std::function<double(double)>& amplitude,
                                std::uint64_t seed, std::uint64_t tag) {
    SpectralField f(K, true);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (int kx = -K.x; kx <= K.x; ++kx)
        for (int ky = -K.y; ky <= K.y; ++ky)
            for (int kz = -K.z; kz <= K.z; ++kz) {
                const LatticePoint k{kx, ky, kz};
                if (!owns_pair(k)) continue;
                RngStream st = mode_stream(seed, StreamPurpose::corpus, tag, k);
                const double a = amplitude(k.norm());
                if (kx == 0 && ky == 0 && kz == 0) {
                    f.at(k) = cplx(a * st.gauss(0, 0), 0.0);
                } else {
                    const cplx z(a * inv_sqrt2 * st.gauss(0, 0), a * inv_sqrt2 * st.gauss(0, 1));
                    f.at(k) = z;
                    f.at(-k) = std::conj(z);
                }
            }
    return f;
}

SpectralField random_besov_field(Cutoff K, double s, std::uint64_t seed, std::uint64_t tag, int dim) {
    const double q = s + 0.5 * double(dim);  // shell count ~ r^{dim-1}
    return random_real_field(
        K, [q](double r) { return std::pow(1.0 + r * r, -0.5 * q); }, seed, tag);
}

} // namespace phi4
