#include "phi4/rng.hpp"

namespace phi4 {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void philox_round(std::uint32_t ctr[4], const std::uint32_t key[2]) {
    const std::uint64_t p0 = std::uint64_t(kPhiloxM0) * ctr[0];
    const std::uint64_t p1 = std::uint64_t(kPhiloxM1) * ctr[2];
    const std::uint32_t hi0 = std::uint32_t(p0 >> 32), lo0 = std::uint32_t(p0);
    const std::uint32_t hi1 = std::uint32_t(p1 >> 32), lo1 = std::uint32_t(p1);
    ctr[0] = hi1 ^ ctr[1] ^ key[0];
    ctr[1] = lo1;
    ctr[2] = hi0 ^ ctr[3] ^ key[1];
    ctr[3] = lo0;
}

} // namespace

void Philox4x32::block(const std::uint32_t ctr_in[4], std::uint32_t out[4]) const {
    std::uint32_t c[4] = {ctr_in[0], ctr_in[1], ctr_in[2], ctr_in[3]};
    std::uint32_t k[2] = {key[0], key[1]};
    for (int r = 0; r < 10; ++r) {
        philox_round(c, k);
        k[0] += kWeyl0;
        k[1] += kWeyl1;
    }
    out[0] = c[0]; out[1] = c[1]; out[2] = c[2]; out[3] = c[3];
}

std::uint64_t mix64(std::uint64_t x) {
    // splitmix64 finalizer
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v) {
    return mix64(h ^ (v + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2)));
}

RngStream::RngStream(std::uint64_t key) : key_(key) {
    ph_.key[0] = std::uint32_t(key);
    ph_.key[1] = std::uint32_t(key >> 32);
}

double RngStream::u01(std::uint64_t ctr, unsigned slot) const {
    std::uint32_t c[4] = {std::uint32_t(ctr), std::uint32_t(ctr >> 32), 0u, 0u};
    std::uint32_t o[4];
    ph_.block(c, o);
    // (x + 1/2) / 2^32: strictly inside (0,1)
    return (double(o[slot & 3]) + 0.5) * (1.0 / 4294967296.0);
}

double RngStream::gauss(std::uint64_t ctr, unsigned slot) const {
    std::uint32_t c[4] = {std::uint32_t(ctr), std::uint32_t(ctr >> 32), 0u, 0u};
    std::uint32_t o[4];
    ph_.block(c, o);
    const double u = (double(o[0]) + 0.5) * (1.0 / 4294967296.0);
    const double v = (double(o[1]) + 0.5) * (1.0 / 4294967296.0);
    const double r = std::sqrt(-2.0 * std::log(u));
    const double th = 2.0 * M_PI * v;
    return (slot & 1) ? r * std::sin(th) : r * std::cos(th);
}

RngStream mode_stream(std::uint64_t seed, StreamPurpose purpose, std::uint64_t chain,
                      const LatticePoint& k) {
    std::uint64_t h = mix64(seed);
    h = hash_combine(h, std::uint64_t(purpose));
    h = hash_combine(h, chain);
    // offset mode components so the tag is a plain non-negative integer
    h = hash_combine(h, (std::uint64_t(std::uint32_t(k.kx + (1 << 20))) << 42) ^
                            (std::uint64_t(std::uint32_t(k.ky + (1 << 20))) << 21) ^
                            std::uint64_t(std::uint32_t(k.kz + (1 << 20))));
    return RngStream(h);
}

RngStream scalar_stream(std::uint64_t seed, StreamPurpose purpose, std::uint64_t chain) {
    std::uint64_t h = mix64(seed);
    h = hash_combine(h, std::uint64_t(purpose));
    h = hash_combine(h, chain);
    return RngStream(h);
}

} // namespace phi4
