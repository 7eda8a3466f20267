#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

namespace fastescape {

using cdbl = std::complex<double>;

/**
 * Polynomial with complex coefficients, stored lowest degree first:
 *
 *     P(w) = a[0] + a[1] w + ... + a[N] w^N.
 *
 * Instances are restricted to the shape required by the transcendental
 * family f(z) = P(e^z) / e^z studied by this library: degree N >= 2 and
 * a[0] * a[N] != 0, so that both the w^N head and the constant tail are
 * genuinely present.  The constructor rejects anything else.
 */
class ComplexPoly {
public:
    explicit ComplexPoly(std::vector<cdbl> coeffs);

    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    const std::vector<cdbl>& coeffs() const { return coeffs_; }
    cdbl coeff(int k) const { return coeffs_.at(static_cast<size_t>(k)); }
    cdbl head() const { return coeffs_.back(); }   // a[N]
    cdbl tail() const { return coeffs_.front(); }  // a[0]

    /// Largest coefficient modulus, max_k |a_k|.
    double coeff_max() const;
    /// min(|a[0]|, |a[N]|), the smaller of the two pinned coefficients.
    double coeff_min_edge() const;

    /// Horner evaluation of P at w.
    cdbl operator()(cdbl w) const;
    /// P'(w).
    cdbl derivative(cdbl w) const;
    /// P''(w).
    cdbl second_derivative(cdbl w) const;

    /**
     * The two-parameter family whose exponential substitution gives
     * (alpha/2)(e^z - e^{-z}) + i beta, i.e.
     *
     *     P(w) = (alpha/2) w^2 + i beta w - alpha/2,   alpha != 0.
     */
    static ComplexPoly sine_family(cdbl alpha, cdbl beta);

private:
    std::vector<cdbl> coeffs_;
};

} // namespace fastescape
