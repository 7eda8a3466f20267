#include "fastescape/constants.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fastescape {

namespace {
constexpr double kLn2 = 0.6931471805599453;
const double kSqrt2 = std::sqrt(2.0);
} // namespace

Radii admissible_radii(const ComplexPoly& P) {
    const int N = P.degree();
    const double K = P.coeff_max();
    const double K0 = P.coeff_min_edge();
    const double a0 = std::abs(P.tail());
    const double aN = std::abs(P.head());
    const double dN = static_cast<double>(N);

    Radii R;
    R.r0 = M_PI / (dN - 1.0);
    R.R1 = 1.0 + 4.0 * K / aN;
    R.R2 = a0 / (4.0 * K + a0);
    R.R3 = std::log(2.0 + 8.0 * K / K0);
    R.R4 = 1.0 + std::max((2.0 * K + 4.0) / aN,
                          (K / aN) * (2.0 * dN * dN / (dN - 1.0) + 1.0));
    R.R5 = std::min(a0 / (2.0 * (K * dN + 2.0)),
                    std::sqrt(a0 / K) / (2.0 * dN));
    R.R6 = std::max(std::log(R.R4), -std::log(R.R5));
    return R;
}

double default_square_side(int degree) {
    return std::min(0.125, 1.0 / (4.0 * static_cast<double>(degree)));
}

double distortion_constant(const ComplexPoly& P, double r) {
    const int N = P.degree();
    if (!(r > 0.0) || r > 1.0 / (4.0 * static_cast<double>(N)))
        throw std::invalid_argument("distortion_constant: need 0 < r <= 1/(4N)");
    const double K0 = P.coeff_min_edge();
    return 32.0 * kSqrt2 / (K0 * r) + 1.0 / (4.0 * K0 * K0) + 12.0 * kSqrt2 / K0;
}

double base_scale(double R3, double R6, double c1) {
    if (!(c1 > 0.0)) throw std::invalid_argument("base_scale: c1 must be positive");
    return std::max({R3, R6, 6.0 * kLn2, 12.0 + 2.0 * std::log(c1)});
}

double nesting_ratio_log1m(double c1, double x0, int k) {
    if (!(c1 > 0.0)) throw std::invalid_argument("nesting_ratio: c1 must be positive");
    if (!(x0 >= 6.0 * kLn2)) throw std::invalid_argument("nesting_ratio: need x0 >= 6 log 2");
    if (k < 0) throw std::invalid_argument("nesting_ratio: k must be nonnegative");

    // Walk the tower x_{i+1} = 2 exp(x_i / 2) until level k or until the
    // next level leaves double range (then the factor is 1 exactly).
    double xk = x0;
    for (int i = 0; i < k; ++i) {
        const double half = xk / 2.0;
        if (half > 700.0) return -std::numeric_limits<double>::infinity();
        xk = 2.0 * std::exp(half);
    }
    return std::log(2.0 * c1) + 4.0 - xk / 2.0;
}

double nesting_ratio(double c1, double x0, int k) {
    const double l = nesting_ratio_log1m(c1, x0, k);
    if (l >= 0.0)
        throw std::domain_error("nesting_ratio: factor not positive at this base scale");
    return -std::expm1(l); // 1 - e^l, accurate near 1
}

double nesting_ratio_product(double c1, double x0) {
    double log_prod = 0.0;
    for (int k = 0; k < 64; ++k) {
        const double l = nesting_ratio_log1m(c1, x0, k);
        if (l >= 0.0)
            throw std::domain_error("nesting_ratio_product: factor not positive");
        if (std::isinf(l)) break;
        const double term = std::log1p(-std::exp(l));
        log_prod += term;
        if (term == 0.0) break;
    }
    return std::exp(log_prod);
}

double square_density_bound(double c1, double x) {
    return std::exp(-8.0 * c1 * std::exp(4.0 - x / 2.0));
}

double area_upper_bound(double r, double c1, double x_star) {
    const double tail = 8.0 * c1 * std::exp(4.0 - x_star / 2.0) * r / (-std::expm1(-r / 2.0));
    return (4.0 * M_PI + 4.0 * r) * (x_star + r + tail);
}

ConstantSet compute_constants(const ComplexPoly& P, double r,
                              double c1_override, double x0_override) {
    ConstantSet cs;
    cs.N = P.degree();
    cs.K = P.coeff_max();
    cs.K0 = P.coeff_min_edge();
    cs.r = (r == 0.0) ? default_square_side(cs.N) : r;
    cs.radii = admissible_radii(P);
    cs.c0 = distortion_constant(P, cs.r);
    cs.c1 = (c1_override == 0.0) ? cs.c0 : c1_override;
    if (!(cs.c1 > 0.0)) throw std::invalid_argument("compute_constants: c1 must be positive");

    const double x_min = base_scale(cs.radii.R3, cs.radii.R6, cs.c1);
    if (x0_override == 0.0) {
        cs.x_star = x_min;
    } else {
        if (x0_override < x_min)
            throw std::invalid_argument("compute_constants: x0 override below the base scale");
        cs.x_star = x0_override;
    }

    for (int k = 0; k < static_cast<int>(cs.rho.size()); ++k)
        cs.rho[static_cast<size_t>(k)] = nesting_ratio(cs.c1, cs.x_star, k);
    cs.rho_product = nesting_ratio_product(cs.c1, cs.x_star);
    cs.area_bound = area_upper_bound(cs.r, cs.c1, cs.x_star);
    return cs;
}

} // namespace fastescape
