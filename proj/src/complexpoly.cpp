#include "fastescape/complexpoly.hpp"

#include <algorithm>
#include <cmath>

namespace fastescape {

ComplexPoly::ComplexPoly(std::vector<cdbl> coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.size() < 3)
        throw std::invalid_argument("ComplexPoly: degree must be at least 2");
    if (coeffs_.front() == cdbl{0.0, 0.0})
        throw std::invalid_argument("ComplexPoly: constant coefficient must be nonzero");
    if (coeffs_.back() == cdbl{0.0, 0.0})
        throw std::invalid_argument("ComplexPoly: leading coefficient must be nonzero");
    for (const cdbl& a : coeffs_) {
        if (!std::isfinite(a.real()) || !std::isfinite(a.imag()))
            throw std::invalid_argument("ComplexPoly: coefficients must be finite");
    }
}

double ComplexPoly::coeff_max() const {
    double m = 0.0;
    for (const cdbl& a : coeffs_) m = std::max(m, std::abs(a));
    return m;
}

double ComplexPoly::coeff_min_edge() const {
    return std::min(std::abs(coeffs_.front()), std::abs(coeffs_.back()));
}

cdbl ComplexPoly::operator()(cdbl w) const {
    cdbl acc{0.0, 0.0};
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * w + *it;
    return acc;
}

cdbl ComplexPoly::derivative(cdbl w) const {
    cdbl acc{0.0, 0.0};
    const int n = degree();
    for (int k = n; k >= 1; --k) acc = acc * w + static_cast<double>(k) * coeffs_[static_cast<size_t>(k)];
    return acc;
}

cdbl ComplexPoly::second_derivative(cdbl w) const {
    cdbl acc{0.0, 0.0};
    const int n = degree();
    for (int k = n; k >= 2; --k)
        acc = acc * w + static_cast<double>(k) * static_cast<double>(k - 1) * coeffs_[static_cast<size_t>(k)];
    return acc;
}

ComplexPoly ComplexPoly::sine_family(cdbl alpha, cdbl beta) {
    if (alpha == cdbl{0.0, 0.0})
        throw std::invalid_argument("sine_family: alpha must be nonzero");
    const cdbl i{0.0, 1.0};
    return ComplexPoly({-alpha / 2.0, i * beta, alpha / 2.0});
}

} // namespace fastescape
