// Estimators and two-sample tests shared by the statistical harnesses.
#pragma once

#include <cstddef>
#include <vector>

namespace phi4 {

struct MeanSE {
    double mean = 0.0;
    double se = 0.0;
    std::size_t n = 0;
    bool reliable = true;  // false when the SE convention could not be applied
};

MeanSE mean_se(const std::vector<double>& x);

// Batch-means standard error (the single SE convention for correlated series);
// flagged unreliable when fewer than 2 batches fit.
MeanSE batch_means_se(const std::vector<double>& x, int batches = 30);

// z statistics
double z_score(const MeanSE& est, double target);
double welch_z(const MeanSE& a, const MeanSE& b);

// Kolmogorov-Smirnov test of x against N(mean, sd^2).
struct KSResult {
    double statistic = 0.0;
    double p_value = 1.0;
};
KSResult ks_test_normal(std::vector<double> x, double mean, double sd);

double normal_cdf(double x);

// Least-squares line y ~ intercept + slope x.
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

} // namespace phi4
