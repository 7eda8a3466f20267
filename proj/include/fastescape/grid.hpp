#pragma once

#include "fastescape/complexpoly.hpp"

#include <cstdint>
#include <stdexcept>

namespace fastescape {

/// Thrown when an operation is asked about a square that violates its
/// preconditions (e.g. sampling a square that crosses the base scale).
struct InadmissibleSquare : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Axis-aligned closed square [re0, re0 + side] x [im0, im0 + side].
struct Square {
    double re0 = 0.0;
    double im0 = 0.0;
    double side = 0.0;

    cdbl corner(int i) const { // i = 0..3, counterclockwise from (re0, im0)
        switch (i & 3) {
            case 0: return {re0, im0};
            case 1: return {re0 + side, im0};
            case 2: return {re0 + side, im0 + side};
            default: return {re0, im0 + side};
        }
    }
    cdbl center() const { return {re0 + side / 2.0, im0 + side / 2.0}; }
    bool contains(cdbl z, double tol = 0.0) const {
        return z.real() >= re0 - tol && z.real() <= re0 + side + tol &&
               z.imag() >= im0 - tol && z.imag() <= im0 + side + tol;
    }
    /// Smallest |Re z| over the square; 0 if it straddles the imaginary axis.
    double min_abs_re() const {
        if (re0 >= 0.0) return re0;
        if (re0 + side <= 0.0) return -(re0 + side);
        return 0.0;
    }
};

/// Square of the side-r grid indexed by (m, n): [m r, (m+1) r] x [n r, (n+1) r].
struct GridSquare {
    int64_t m = 0;
    int64_t n = 0;
    double r = 0.0;

    Square geometry() const {
        return Square{static_cast<double>(m) * r, static_cast<double>(n) * r, r};
    }
};

/// Grid index of the square containing z (lowest-corner convention).
/// Rejects coordinates too large for exact 64-bit indexing.
inline GridSquare grid_square_of(cdbl z, double r) {
    const double fm = std::floor(z.real() / r);
    const double fn = std::floor(z.imag() / r);
    if (std::abs(fm) > 9.0e15 || std::abs(fn) > 9.0e15)
        throw InadmissibleSquare("grid_square_of: coordinates exceed exact index range");
    return GridSquare{static_cast<int64_t>(fm), static_cast<int64_t>(fn), r};
}

} // namespace fastescape
