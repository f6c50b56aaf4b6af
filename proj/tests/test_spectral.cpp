// torus_spectral: transforms, inner products, multipliers, dealiased products.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "phi4/field.hpp"
#include "phi4/random_fields.hpp"

using namespace phi4;

namespace {
const double kNorm = std::pow(2.0 * M_PI, 1.5);

SpectralField basis_field(Cutoff K, const LatticePoint& k) {
    SpectralField f(K, false);
    f.at(k) = 1.0;
    f.real_valued = (k == LatticePoint{0, 0, 0});
    return f;
}
} // namespace

TEST_CASE("forward transform of the constant function e_0") {
    const int M = 8;
    GridField g(M, M, M);
    for (auto& v : g.v) v = 1.0 / kNorm;
    SpectralField f = forward_transform(g, Cutoff(2));
    CHECK(std::abs(f.at(0, 0, 0) - cplx(1.0)) < 1e-13);
    double off = 0.0;
    for (int kx = -2; kx <= 2; ++kx)
        for (int ky = -2; ky <= 2; ++ky)
            for (int kz = -2; kz <= 2; ++kz)
                if (!(kx == 0 && ky == 0 && kz == 0)) off = std::max(off, std::abs(f.at(kx, ky, kz)));
    CHECK(off < 1e-14);
}

TEST_CASE("forward transform of cos(x1)/(2pi)^{3/2}") {
    const int M = 9;
    GridField g(M, M, M);
    for (int jx = 0; jx < M; ++jx)
        for (int jy = 0; jy < M; ++jy)
            for (int jz = 0; jz < M; ++jz)
                g.v[g.idx(jx, jy, jz)] = std::cos(2.0 * M_PI * jx / M) / kNorm;
    SpectralField f = forward_transform(g, Cutoff(3));
    CHECK(std::abs(f.at(1, 0, 0) - cplx(0.5)) < 1e-13);
    CHECK(std::abs(f.at(-1, 0, 0) - cplx(0.5)) < 1e-13);
    CHECK(std::abs(f.at(0, 0, 0)) < 1e-14);
    CHECK(std::abs(f.at(1, 1, 0)) < 1e-14);
}

TEST_CASE("inverse transform reproduces constants and cosines") {
    SpectralField f(Cutoff(1), true);
    f.at(0, 0, 0) = 1.0;
    GridField g = inverse_transform(f, 5);
    for (double v : g.v) CHECK(v == doctest::Approx(1.0 / kNorm).epsilon(1e-13));

    SpectralField h(Cutoff(1), true);
    h.at(1, 0, 0) = 0.5;
    h.at(-1, 0, 0) = 0.5;
    GridField gh = inverse_transform(h, 6);
    for (int jx = 0; jx < 6; ++jx)
        CHECK(gh.v[gh.idx(jx, 0, 0)] ==
              doctest::Approx(std::cos(2.0 * M_PI * jx / 6.0) / kNorm).epsilon(1e-12));
}

TEST_CASE("round trip is the identity on band-limited fields") {
    const Cutoff K(3);
    SpectralField f = random_besov_field(K, 0.5, 99, 1);
    GridField g = inverse_transform(f, 8);
    SpectralField f2 = forward_transform(g, K);
    double err = 0.0;
    for (std::size_t i = 0; i < f.c.size(); ++i) err = std::max(err, std::abs(f.c[i] - f2.c[i]));
    CHECK(err < 1e-12);
}

TEST_CASE("resolution below 2K+1 is rejected") {
    SpectralField f(Cutoff(3), true);
    CHECK_THROWS_AS(inverse_transform(f, 6), FieldError);
    GridField g(6, 6, 6);
    CHECK_THROWS_AS(forward_transform(g, Cutoff(3)), FieldError);
}

TEST_CASE("inner product: orthonormality and Parseval against quadrature") {
    const Cutoff K(2);
    SpectralField ek = basis_field(K, {1, 0, -1});
    SpectralField el = basis_field(K, {0, 2, 0});
    CHECK(std::abs(inner_product(ek, ek) - cplx(1.0)) < 1e-15);
    CHECK(std::abs(inner_product(ek, el)) < 1e-15);

    SpectralField f = random_besov_field(K, 0.25, 7, 2);
    const double ip = inner_product(f, f).real();
    GridField g = inverse_transform(f, 12);
    double quad = 0.0;
    for (double v : g.v) quad += v * v;
    quad *= g.cell_volume();
    CHECK(std::abs(ip - quad) <= 1e-10 * ip);
}

TEST_CASE("multipliers: identity, Laplacian eigenvalue, heat semigroup composition") {
    const Cutoff K(2);
    SpectralField f = random_besov_field(K, 0.5, 13, 3);
    SpectralField id = apply_multiplier(f, [](const LatticePoint&) { return cplx(1.0); });
    for (std::size_t i = 0; i < f.c.size(); ++i) CHECK(id.c[i] == f.c[i]);

    SpectralField e110 = basis_field(K, {1, 1, 0});
    SpectralField lap = apply_multiplier(e110, [](const LatticePoint& k) { return cplx(-k.norm2()); });
    CHECK(std::abs(lap.at(1, 1, 0) - cplx(-2.0)) < 1e-15);

    const double t = 0.3;
    auto heat = [](double tt) {
        return [tt](double r) { return std::exp(-tt * r * r); };
    };
    SpectralField once = apply_radial_multiplier(f, heat(t));
    SpectralField twice = apply_radial_multiplier(apply_radial_multiplier(f, heat(t / 2)), heat(t / 2));
    double err = 0.0;
    for (std::size_t i = 0; i < f.c.size(); ++i) err = std::max(err, std::abs(once.c[i] - twice.c[i]));
    CHECK(err < 1e-12);
}

TEST_CASE("multiplier symmetry loss is flagged") {
    SpectralField f = random_besov_field(Cutoff(1), 0.5, 17, 4);
    CHECK(f.real_valued);
    // real odd h breaks Hermitian symmetry; i * (odd) is a real operator (a derivative)
    SpectralField odd = apply_multiplier(f, [](const LatticePoint& k) { return cplx(double(k.kx)); });
    CHECK_FALSE(odd.real_valued);
    SpectralField deriv = apply_multiplier(f, [](const LatticePoint& k) { return cplx(0.0, k.kx); });
    CHECK(deriv.real_valued);
    SpectralField even = apply_multiplier(f, [](const LatticePoint& k) { return cplx(k.norm2()); });
    CHECK(even.real_valued);
}

TEST_CASE("real even multipliers preserve Hermitian symmetry bit-exactly") {
    SpectralField f = random_besov_field(Cutoff(3), -0.5, 21, 5);
    SpectralField r = apply_radial_multiplier(f, [](double rr) { return 1.0 / (1.0 + rr); });
    CHECK(hermitian_residual(r) == 0.0);
}

TEST_CASE("pointwise product: unit, exponent addition, convolution oracle") {
    const Cutoff K(2);
    SpectralField one(K, true);
    one.at(0, 0, 0) = kNorm;  // the constant function 1
    SpectralField f = random_besov_field(K, 0.5, 31, 6);
    SpectralField p = pointwise_product(f, one, K);
    double err = 0.0;
    for (std::size_t i = 0; i < f.c.size(); ++i) err = std::max(err, std::abs(p.c[i] - f.c[i]));
    CHECK(err < 1e-12);

    SpectralField ek = basis_field(Cutoff(2), {1, 0, 1});
    SpectralField el = basis_field(Cutoff(2), {-2, 1, 0});
    SpectralField prod = pointwise_product(ek, el);
    CHECK(std::abs(prod.at(-1, 1, 1) - cplx(1.0 / kNorm)) < 1e-14);
    cplx rest(0.0);
    for (const auto& z : prod.c) rest += z;
    CHECK(std::abs(rest - prod.at(-1, 1, 1)) < 1e-13);

    // direct convolution oracle: (fg)_k = (2pi)^{-3/2} sum_m f_m g_{k-m}
    SpectralField g = random_besov_field(K, 0.25, 37, 7);
    SpectralField fg = pointwise_product(f, g);
    double worst = 0.0, scale = 0.0;
    for (int kx = -4; kx <= 4; ++kx)
        for (int ky = -4; ky <= 4; ++ky)
            for (int kz = -4; kz <= 4; ++kz) {
                cplx s(0.0);
                for (int mx = -2; mx <= 2; ++mx)
                    for (int my = -2; my <= 2; ++my)
                        for (int mz = -2; mz <= 2; ++mz)
                            s += f.at(mx, my, mz) * g.coeff({kx - mx, ky - my, kz - mz});
                s /= kNorm;
                worst = std::max(worst, std::abs(fg.at(kx, ky, kz) - s));
                scale = std::max(scale, std::abs(s));
            }
    CHECK(worst <= 1e-10 * std::max(1.0, scale));
}

TEST_CASE("pointwise product is commutative and bilinear") {
    const Cutoff K(2);
    SpectralField f = random_besov_field(K, 0.0, 41, 8);
    SpectralField g = random_besov_field(K, 0.0, 43, 9);
    SpectralField h = random_besov_field(K, 0.0, 47, 10);
    SpectralField fg = pointwise_product(f, g), gf = pointwise_product(g, f);
    double err = 0.0;
    for (std::size_t i = 0; i < fg.c.size(); ++i) err = std::max(err, std::abs(fg.c[i] - gf.c[i]));
    CHECK(err < 1e-14);

    SpectralField lin = pointwise_product(f, g + 2.0 * h);
    SpectralField rhs = pointwise_product(f, g) + 2.0 * pointwise_product(f, h);
    err = 0.0;
    for (std::size_t i = 0; i < lin.c.size(); ++i) err = std::max(err, std::abs(lin.c[i] - rhs.c[i]));
    CHECK(err < 1e-13);
}

TEST_CASE("snapshot round trip and symmetry checks") {
    SpectralField f = random_besov_field(Cutoff(3), 0.5, 51, 11);
    save_snapshot(f, "snap_test.phi4");
    SpectralField g = load_snapshot("snap_test.phi4");
    CHECK(g.K.x == 3);
    CHECK(g.real_valued);
    for (std::size_t i = 0; i < f.c.size(); ++i) CHECK(f.c[i] == g.c[i]);
    std::remove("snap_test.phi4");

    SpectralField bad(Cutoff(1), true);
    bad.at(1, 0, 0) = cplx(1.0, 0.0);
    bad.at(-1, 0, 0) = cplx(0.5, 0.0);  // not conjugate
    CHECK_THROWS_AS(symmetrize(bad, 1e-10), FieldError);
}
