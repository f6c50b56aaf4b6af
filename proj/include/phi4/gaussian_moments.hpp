// Moments of real/complex Gaussian vectors by pairing formulas; the ground
// truth for every renormalization test.
//
// Covariances are bilinear (no conjugation): Cov(Z1,Z2) = E[(Z1-EZ1)(Z2-EZ2)].
// Mixed moments E[prod Z_i] depend only on the means and these bilinear
// covariances, which is what both evaluation routes below consume.
#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "phi4/field.hpp"  // cplx, FieldError

namespace phi4 {

struct GaussianSpec {
    std::vector<cplx> mean;
    std::vector<std::vector<cplx>> cov;  // symmetric

    std::size_t dim() const { return mean.size(); }
    void validate() const;
};

// Spec with bilinear covariance A A^T (so moments can be cross-checked by
// sampling Z = mean + A xi with real standard normal xi).
GaussianSpec spec_from_factor(const std::vector<cplx>& mean,
                              const std::vector<std::vector<cplx>>& factor);

// Route 1: recursive pairing expansion with memoization,
//   E[X_S] = E[X_p] E[X_{S-p}] + sum_q Cov(X_p, X_q) E[X_{S-pq}],
// valid for any order (odd included); capped at moment order 12.
cplx isserlis_moment(const GaussianSpec& spec, const std::vector<int>& indices);

// Route 2: the literal permutation-class sum
//   sum_i 1/((2i)! (n-i)! 2^{n-i}) sum_{sigma} prod E[..] prod Cov(..),
// even orders 2n <= 8 (independent of route 1; used as its oracle).
cplx isserlis_moment_perm(const GaussianSpec& spec, const std::vector<int>& indices);

// Monte-Carlo moment of prod Z_{indices} for Z = mean + A xi.
// Returns (estimate, standard error) where the SE combines re/im spread.
std::pair<cplx, double> mc_moment(const std::vector<cplx>& mean,
                                  const std::vector<std::vector<cplx>>& factor,
                                  const std::vector<int>& indices, std::size_t samples,
                                  std::uint64_t seed);

// Convenience: factor the bilinear covariance (complex symmetric L L^T with a
// zero-pivot tolerance for semidefinite cases) and sample.
std::pair<cplx, double> mc_moment(const GaussianSpec& spec, const std::vector<int>& indices,
                                  std::size_t samples, std::uint64_t seed);

std::vector<std::vector<cplx>> symmetric_factor(const std::vector<std::vector<cplx>>& cov);

} // namespace phi4
