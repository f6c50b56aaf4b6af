#include "phi4/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace phi4 {

MeanSE mean_se(const std::vector<double>& x) {
    MeanSE r;
    r.n = x.size();
    if (x.empty()) {
        r.reliable = false;
        return r;
    }
    double s = 0.0;
    for (double v : x) s += v;
    r.mean = s / double(x.size());
    if (x.size() < 2) {
        r.reliable = false;
        return r;
    }
    double q = 0.0;
    for (double v : x) q += (v - r.mean) * (v - r.mean);
    r.se = std::sqrt(q / (double(x.size()) * double(x.size() - 1)));
    return r;
}

MeanSE batch_means_se(const std::vector<double>& x, int batches) {
    MeanSE r;
    r.n = x.size();
    const std::size_t b = std::size_t(std::max(batches, 1));
    if (x.size() < 2 * b) {
        // fall back to the iid estimate but flag it
        r = mean_se(x);
        r.reliable = false;
        return r;
    }
    const std::size_t len = x.size() / b;
    std::vector<double> bm(b, 0.0);
    for (std::size_t i = 0; i < b; ++i) {
        double s = 0.0;
        for (std::size_t j = i * len; j < (i + 1) * len; ++j) s += x[j];
        bm[i] = s / double(len);
    }
    MeanSE inner = mean_se(bm);
    double s = 0.0;
    for (double v : x) s += v;
    r.mean = s / double(x.size());
    r.se = inner.se;
    return r;
}

double z_score(const MeanSE& est, double target) {
    if (est.se == 0.0) return est.mean == target ? 0.0 : INFINITY;
    return (est.mean - target) / est.se;
}

double welch_z(const MeanSE& a, const MeanSE& b) {
    const double denom = std::sqrt(a.se * a.se + b.se * b.se);
    if (denom == 0.0) return a.mean == b.mean ? 0.0 : INFINITY;
    return (a.mean - b.mean) / denom;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

namespace {
// Kolmogorov distribution tail Q(lambda) = 2 sum_{m>=1} (-1)^{m-1} exp(-2 m^2 lambda^2)
double kolmogorov_q(double lambda) {
    if (lambda < 1e-8) return 1.0;
    double q = 0.0;
    for (int m = 1; m <= 100; ++m) {
        const double term = 2.0 * ((m % 2 == 1) ? 1.0 : -1.0) * std::exp(-2.0 * m * m * lambda * lambda);
        q += term;
        if (std::abs(term) < 1e-12) break;
    }
    return std::clamp(q, 0.0, 1.0);
}
} // namespace

KSResult ks_test_normal(std::vector<double> x, double mean, double sd) {
    KSResult r;
    if (x.empty() || sd <= 0.0) throw std::invalid_argument("ks_test_normal: bad input");
    std::sort(x.begin(), x.end());
    const double n = double(x.size());
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double f = normal_cdf((x[i] - mean) / sd);
        d = std::max(d, std::abs(f - double(i) / n));
        d = std::max(d, std::abs(double(i + 1) / n - f));
    }
    r.statistic = d;
    const double sq = std::sqrt(n);
    r.p_value = kolmogorov_q((sq + 0.12 + 0.11 / sq) * d);
    return r;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_line: bad input");
    const double n = double(x.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    LineFit f;
    f.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    f.intercept = (sy - f.slope * sx) / n;
    return f;
}

} // namespace phi4
