#pragma once

#include "fastescape/complexpoly.hpp"

#include <array>

namespace fastescape {

/// Radii controlling where the exponential substitution w = e^z puts the
/// map into its tractable regimes (see the doc comments in constants.cpp
/// for the exact role of each one).
struct Radii {
    double r0; // pi / (N - 1)
    double R1; // 1 + 4K/|aN|
    double R2; // |a0| / (4K + |a0|)
    double R3; // log(2 + 8K/K0)
    double R4; // 1 + max{(2K+4)/|aN|, (K/|aN|)(2N^2/(N-1) + 1)}
    double R5; // min{|a0|/(2(KN+2)), (1/(2N)) sqrt(|a0|/K)}
    double R6; // max{log R4, -log R5}
};

Radii admissible_radii(const ComplexPoly& P);

/// Largest admissible square side for degree N: squares of side r with
/// 0 < r <= 1/(4N) keep all the distortion machinery valid.  The default
/// used throughout is min(1/8, 1/(4N)).
double default_square_side(int degree);

/**
 * Distortion constant attached to the family and a square side r:
 *
 *     c0(r) = 32 sqrt(2) / (K0 r) + 1/(4 K0^2) + 12 sqrt(2) / K0.
 *
 * Requires 0 < r <= 1/(4N).
 */
double distortion_constant(const ComplexPoly& P, double r);

/// x_star = max{R3, R6, 6 log 2, 12 + 2 log c1}: the smallest base scale at
/// which every estimate used by the escape certification holds at once.
double base_scale(double R3, double R6, double c1);

/**
 * One factor of the nesting density product:
 *
 *     rho_k = 1 - 2 c1 e^4 exp(-x_k / 2),
 *
 * where x_0 = x0 and x_{k+1} = 2 exp(x_k / 2).  Requires x0 >= 6 log 2 and
 * c1 > 0; throws std::domain_error when the factor is not positive (the
 * bound is vacuous for such small x0).  Values indistinguishable from 1 in
 * double precision are returned as exactly 1.
 */
double nesting_ratio(double c1, double x0, int k);

/// log(1 - rho_k) = log(2 c1) + 4 - x_k/2, or -inf once the tower exceeds
/// double range (the factor is then 1 to machine precision).
double nesting_ratio_log1m(double c1, double x0, int k);

/// prod_{k>=0} rho_k, the full nesting density product (converges doubly
/// exponentially; factors equal to 1 are absorbed).
double nesting_ratio_product(double c1, double x0);

/// Closed-form lower bound exp(-8 c1 e^4 exp(-x/2)) for the density of the
/// certified set in any admissible square with |Re z| >= x on it.  Always
/// <= nesting_ratio_product(c1, x).
double square_density_bound(double c1, double x);

/**
 * Upper bound for the area of the complement of the fast escaping set
 * inside one horizontal period strip, truncated at the base scale:
 *
 *     (4 pi + 4 r) * (x_star + r + 8 c1 e^{4 - x_star/2} * r / (1 - e^{-r/2})).
 */
double area_upper_bound(double r, double c1, double x_star);

/// Every named constant for one family instance, as computed by
/// compute_constants().
struct ConstantSet {
    int N = 0;
    double K = 0.0;   // max_k |a_k|
    double K0 = 0.0;  // min(|a0|, |aN|)
    double r = 0.0;   // square side in use
    Radii radii{};
    double c0 = 0.0;
    double c1 = 0.0;      // defaults to c0; may be overridden
    double x_star = 0.0;  // defaults to base_scale(R3, R6, c1); may be overridden upward
    std::array<double, 10> rho{};  // nesting ratios at x0 = x_star, k = 0..9
    double rho_product = 0.0;      // full product at x0 = x_star
    double area_bound = 0.0;
};

/**
 * Evaluate the whole constant set.  r = 0 selects the default side
 * min(1/8, 1/(4N)); c1_override/x0_override = 0 select the computed
 * defaults.  An x0_override below the computed base scale is rejected
 * (the estimates do not hold there).
 */
ConstantSet compute_constants(const ComplexPoly& P, double r = 0.0,
                              double c1_override = 0.0, double x0_override = 0.0);

} // namespace fastescape
