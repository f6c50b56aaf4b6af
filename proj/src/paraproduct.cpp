#include "phi4/paraproduct.hpp"

namespace phi4 {

namespace {

// Terms are accumulated in ascending j for reproducible summation order.
SpectralField para_lt(const SpectralField& f, const SpectralField& g, const DyadicPartition& P) {
    const Cutoff Kout = f.K + g.K;
    SpectralField acc(Kout, f.real_valued && g.real_valued);
    const int jg = P.j_max(g.K.radius());
    if (jg < 1) return acc;  // no Delta_l g with l >= 1
    SpectralField s = dyadic_block(-1, f, P);  // S_0 f
    for (int l = 1; l <= jg; ++l) {
        if (l >= 2) s += dyadic_block(l - 2, f, P);  // S_{l-1} f
        acc += pointwise_product(s, dyadic_block(l, g, P), Kout);
    }
    return acc;
}

SpectralField para_res(const SpectralField& f, const SpectralField& g, const DyadicPartition& P) {
    const Cutoff Kout = f.K + g.K;
    SpectralField acc(Kout, f.real_valued && g.real_valued);
    const int jf = P.j_max(f.K.radius());
    const int jg = P.j_max(g.K.radius());
    for (int j = -1; j <= jf; ++j) {
        if (j - 1 > jg) break;
        SpectralField near(g.K, g.real_valued);
        for (int l = j - 1; l <= j + 1; ++l)
            if (l >= -1 && l <= jg) near += dyadic_block(l, g, P);
        acc += pointwise_product(dyadic_block(j, f, P), near, Kout);
    }
    return acc;
}

} // namespace

SpectralField paraproduct(const SpectralField& f, const SpectralField& g, ParaKind kind,
                          const DyadicPartition& P) {
    switch (kind) {
        case ParaKind::lt: return para_lt(f, g, P);
        case ParaKind::res: return para_res(f, g, P);
        case ParaKind::gt: return para_lt(g, f, P);
        case ParaKind::leq: return para_lt(f, g, P) + para_res(f, g, P);
        case ParaKind::geq: return para_lt(g, f, P) + para_res(f, g, P);
    }
    throw FieldError("unknown paraproduct kind");
}

SpectralField commutator_res(const SpectralField& f, const SpectralField& g,
                             const SpectralField& h, const DyadicPartition& P) {
    const SpectralField a = paraproduct(paraproduct(f, g, ParaKind::lt, P), h, ParaKind::res, P);
    const SpectralField b = pointwise_product(f, paraproduct(g, h, ParaKind::res, P));
    return a - b;
}

SpectralField commutator_heat(const SpectralField& f, const SpectralField& g, double t, int N,
                              const CutoffProfile& prof, const DyadicPartition& P) {
    if (!(t > 0.0)) throw FieldError("commutator_heat requires t > 0");
    const SpectralField fg = paraproduct(f, g, ParaKind::lt, P);
    const SpectralField a = heat_semigroup(t, project(1, N, project(1, N, fg, prof), prof));
    const SpectralField gs = heat_semigroup(t, project(1, N, project(1, N, g, prof), prof));
    return a - paraproduct(f, gs, ParaKind::lt, P);
}

} // namespace phi4
