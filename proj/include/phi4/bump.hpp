// C-infinity cutoff profiles built from the exponential bump.
#pragma once

#include <cmath>

namespace phi4 {

// exp(-1/x) extended by 0; the standard building block for smooth steps.
inline double bump_tail(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }

// Smooth nonincreasing step: exactly 1 on (-inf, a], exactly 0 on [b, inf).
inline double smooth_step_down(double r, double a, double b) {
    if (r <= a) return 1.0;
    if (r >= b) return 0.0;
    const double x = (b - r) / (b - a);
    const double num = bump_tail(x);
    return num / (num + bump_tail(1.0 - x));
}

} // namespace phi4
