#pragma once

#include "fastescape/extcomplex.hpp"
#include "fastescape/tower.hpp"

#include <vector>

namespace fastescape {

enum class OrbitStatus {
    Certified,         // |Re z_j| >= x_j held (or the modulus criterion, once
                       // magnitudes pass tower scale) for every j <= depth
    Failed,            // some step provably violates its threshold
    IndeterminateAngle // double/high-precision angle knowledge ran out before
                       // the question could be decided
};

struct OrbitVerdict {
    OrbitStatus status = OrbitStatus::Certified;
    int depth = 0; // requested depth
    int at = -1;   // step where Failed/IndeterminateAngle was declared; -1 if certified
    /// Signed slack of each resolved step at the level where its threshold
    /// comparison was decided (grows tower-fast, so it is log-scale beyond
    /// step 1).  Contains one entry per resolved step, including a negative
    /// entry for the failing step; NaN marks an indeterminate final entry.
    std::vector<double> margins;
};

struct OrbitOptions {
    int prec_bits = 2048;       // high-precision angle budget; 0 disables
    double arg_tol = kArgTrustTol;
    double axis_window = 1e-6;  // exclusion band around +-pi/2 directions
    double tie_tol = 1e-12;     // threshold-comparison tie tolerance
};

/**
 * Certify |Re z_j| >= x_j for the orbit z_{j+1} = f(z_j) against the
 * threshold tower x_{k+1} = 2 e^{x_k / 2}, for j = 0..depth.
 *
 * While values fit in doubles the check is literal.  In the log-magnitude
 * window the real part is bounded through (log |z|, arg) with the stored
 * angle-error interval; once magnitudes pass double range entirely the
 * modulus criterion |z_j| >= x_j takes over (any orbit whose modulus
 * dominates this tower is fast escaping, so the combined criterion is
 * sound).  When the angle information honestly runs out before depth is
 * reached the verdict is IndeterminateAngle, never a guess.
 */
OrbitVerdict classify_orbit(const EntireMap& f, cdbl z0, int depth,
                            const ThresholdTower& tower, const OrbitOptions& opt = {});

/// Report for the doubly-exponential minorant/majorant pair
///   u_{n+1} = R e^{R u_n},  u_0 = R;   v_{n+1} = e^{v_n},  v_0 given.
struct ShiftReport {
    int shift = 0;                // smallest l with v_l >= 2 R^2
    bool verified = false;        // v_{n+l} >= 2 R u_n held for n = 0..n_max
    std::vector<double> margins;  // per-n slack at the decisive level
    std::vector<double> log_u;    // log u_n while it fits in a double
    std::vector<double> log_v;    // log v_n while it fits in a double
};

/**
 * Find the alignment shift between the two towers above and verify the
 * domination v_{n+l} >= 2 R u_n up to n_max.  Requires R > 0; throws
 * std::runtime_error (ShiftNotFound) when 10^6 iterations do not reach
 * v_l >= 2 R^2 (possible only for pathological v_0).
 */
ShiftReport max_modulus_sequences(double R, double v0, int n_max);

} // namespace fastescape
