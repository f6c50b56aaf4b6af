// Reusable experiment drivers: the heat-commutator scaling scan and the
// deterministic measurements behind the frozen regression bounds.
#pragma once

#include <map>
#include <string>
#include <vector>

#include "phi4/dyadic.hpp"
#include "phi4/paraproduct.hpp"

namespace phi4 {

struct CommutatorScan {
    std::vector<double> t, norm, predicted;  // predicted = t^{(gamma-alpha-beta)/2}
    double fitted_slope = 0.0;
    double predicted_slope = 0.0;
};

// || e^{t lap}(P^1)^2 (f <. g) - f <. (e^{t lap}(P^1)^2 g) ||_{B_2^gamma} over a
// log-spaced t grid.  f, g are random fields of regularity alpha+epsilon and
// beta with full radial reach kxy in two axes and a thin third axis, so the
// dominant dyadic shells stay inside the band over the whole t range.  The
// projection level is chosen to make P^1 the identity on the product band.
CommutatorScan commutator_scan(double alpha, double beta, double gamma, double epsilon, int kxy,
                               int kz, double t_min, double t_max, int points, std::uint64_t seed,
                               const CutoffProfile& prof, const DyadicPartition& P);

// Deterministic corpus measurements of the inequality constants that the
// property tests freeze: Besov embedding, paraproduct bound, com2 trilinear
// bound, projection uniformity, heat smoothing, and the three delta-splitting
// inequalities.  Keys are stable identifiers.
std::map<std::string, double> measure_regression_quantities(const DyadicPartition& P,
                                                            const CutoffProfile& prof);

// Fixture io: "name value" lines.
std::map<std::string, double> read_bounds(const std::string& path);
void write_bounds(const std::map<std::string, double>& bounds, const std::string& path);

} // namespace phi4
