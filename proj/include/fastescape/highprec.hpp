#pragma once

#include "fastescape/complexpoly.hpp"

#include <vector>

namespace fastescape {

/// One recomputed orbit value from the high-precision pass.
struct PrefixStep {
    cdbl value;        // double rounding of the value (components may be +-inf)
    double im_mod;     // Im(value) mod 2pi, in (-pi, pi]
    double im_mod_err; // absolute error bound on im_mod
};

/**
 * Recompute the orbit z_{i+1} = f(z_i), f(z) = sum_k a_k e^{(k-1) z}, from
 * the exact double seed z0 with `bits` of working precision, returning
 * steps 1..L where L <= steps is the last index whose Im is still pinned
 * mod 2pi by the precision budget (the walk stops once log2 |z| exceeds
 * bits - 60, or when a component stops being finite at that precision).
 *
 * result[i] corresponds to orbit step i + 1.
 */
std::vector<PrefixStep> orbit_prefix_highprec(const ComplexPoly& P, cdbl z0,
                                              int steps, int bits);

} // namespace fastescape
