#pragma once

#include "fastescape/extcomplex.hpp"
#include "fastescape/grid.hpp"
#include "fastescape/tower.hpp"

#include <cstdint>
#include <vector>

namespace fastescape {

/// Thrown when a check is invoked outside its stated hypotheses (e.g. the
/// linear-response bound with nonlinearity >= 1, or a chain with squares
/// too large for the composition estimate).
struct PreconditionViolated : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Thrown when consecutive squares of a chain fail the containment
/// Q_{i+1} subset f(Q_i) at the sampled resolution.
struct ChainBroken : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// True when the square lies in the pair of half-planes {|Re z| > x}.
bool square_in_half_planes(const GridSquare& Q, double x);

/**
 * Nonlinearity estimate sup |f''/f'| * diam(Q) over an s x s lattice of
 * sample points (i/s, j/s scaled into Q, so refining s -> 2s only adds
 * points).  diam(Q) = r sqrt(2).
 */
double nonlinearity(const ComplexPoly& P, const GridSquare& Q, int grid_samples = 64);

/**
 * Distortion estimate sup |f'| / inf |f'| over the same nested lattice.
 * On convex domains this ratio is the optimal Lipschitz-ratio constant.
 * Throws SingularDerivative when |f'| < 1e-14 at a sample point.
 */
double distortion(const ComplexPoly& P, const GridSquare& Q, int grid_samples = 64);

struct LNReport {
    double nnl = 0.0;   // nonlinearity estimate
    double L = 1.0;     // distortion estimate
    double bound = 0.0; // 1 + 2 * nnl
    bool pass = false;  // L <= bound * (1 + sampling slack)
};

/// Checks the linear-response inequality L <= 1 + 2 N (valid for N < 1)
/// with 2% relative slack for lattice sampling error.  Throws
/// PreconditionViolated when the nonlinearity estimate reaches 1.
LNReport check_LN(const ComplexPoly& P, const GridSquare& Q, int grid_samples = 64);

struct ChainReport {
    double Lest = 1.0;      // product of per-square distortion estimates
    double bound = 0.0;     // e^2
    int steps = 0;          // number of containment steps verified
    bool levels_ok = false; // squares sit on the ascending threshold levels
    bool pass = false;      // Lest <= bound
};

/**
 * Distortion of a composition along a chain of squares Q_0, ..., Q_k with
 * Q_{i+1} subset f(Q_i).  The estimate multiplies per-square forward
 * distortions, which upper-bounds the composition's distortion on the set
 * that survives to the end.  Containment is verified by winding of
 * f(boundary Q_i) around the corners of Q_{i+1} (step <= r/64) plus the
 * requirement that the image curve stays out of Q_{i+1}; failure throws
 * ChainBroken.  Requires every square inside {|Re| > R6} and r <= 1/(4N);
 * violations throw PreconditionViolated.
 */
ChainReport chain_distortion(const ComplexPoly& P, const std::vector<GridSquare>& chain,
                             const ThresholdTower& tower, int grid_samples = 64);

/**
 * Builds a chain for chain_distortion by forward packing: starting from q0,
 * each next square is a grid square strictly inside the image of the
 * previous one, biased toward small |Re| so every step stays evaluable in
 * doubles.  Returns between 1 and `squares` squares (shorter if the image
 * offers no admissible square, which does not occur for the families used
 * in the tests).
 */
std::vector<GridSquare> build_forward_chain(const ComplexPoly& P, const GridSquare& q0,
                                            double min_abs_re, int squares);

/// Number of side-r grid squares meeting the closed vertical segment
/// {x} x [y0, y1] (gridline touches count both neighbors).
long squares_meeting_vertical_segment(double x, double y0, double y1, double r);

struct BoundaryCountReport {
    long count = 0;           // grid squares meeting the curve system
    double c = 0.0;           // 16 + 12 sqrt(2) L |f'(z0)|
    double L = 1.0;           // distortion estimate used in c
    double fprime_center = 0.0;
    bool clip_nonempty = false; // whether {|Re| = x} actually cuts f(Q)
    bool pass = false;          // count <= c
};

/**
 * Counts grid squares (side r, the square's own r) meeting
 * boundary(f(Q)) together with the part of {|Re w| = x} inside f(Q).
 * The image boundary is walked adaptively (parameter step <= r/16,
 * image chord <= r/4) so no touched square can be skipped; the clip
 * segments are recovered from the boundary crossings of the lines
 * {Re w = +-x} and counted row-by-row.
 */
BoundaryCountReport count_boundary_squares(const ComplexPoly& P, const GridSquare& Q, double x);

struct PolyAsymReport {
    double outer_radius = 0.0; // 1 + K / (eps |aN|)
    double inner_radius = 0.0; // eps |a0| / (K + eps |a0|)
    long checked = 0;
    long failures = 0;
    double worst_outer_slack = 0.0; // min over samples of allowance - defect
    double worst_inner_slack = 0.0;
    bool pass = false;
};

/**
 * Samples the two tail estimates for P: |P(w) - aN w^N| <= eps |aN| |w|^N
 * for |w| >= outer_radius and |P(w) - a0| <= eps |a0| for
 * |w| <= inner_radius, on the threshold circles and one circle beyond /
 * within.  The inequalities must hold with zero tolerance.
 */
PolyAsymReport check_poly_asymptotics(const ComplexPoly& P, double epsilon, int samples);

struct DerivBoundReport {
    long checked = 0;
    long failures = 0;
    double worst_first_slack = 0.0;  // min |P' - P/w| - 2
    double worst_second_slack = 0.0; // min N - |w^2 P'' / (w P' - P) - 1|
    double min_abs_fprime = 0.0;     // min |f'| on {|Re z| = R6}
    bool pass = false;
};

/**
 * Samples the derivative separation bounds on the circles
 * |w| in {R4, 2 R4, R5, R5/2}: |P'(w) - P(w)/w| > 2 and
 * |w^2 P''(w) / (w P'(w) - P(w)) - 1| < N, plus |f'(z)| > 2 on the
 * boundary lines {Re z = +-R6} (one period of Im z).  Zero tolerance.
 */
DerivBoundReport check_derivative_bounds(const ComplexPoly& P, int samples);

/// Region for univalence probing: either the closed disk of radius R2/2
/// about 0, or the truncated sector {2 R1 < |z| <= 10 R1,
/// |arg z - theta| < pi / (2(N-1))}.
struct ProbeRegion {
    bool small_disk = true;
    double theta = 0.0; // sector direction when small_disk is false

    static ProbeRegion disk() { return ProbeRegion{true, 0.0}; }
    static ProbeRegion sector(double theta) { return ProbeRegion{false, theta}; }
};

struct UnivalenceReport {
    long pairs = 0;
    long failures = 0;
    double min_ratio = 0.0; // min |g(z)-g(z')| / |z-z'|, g(w) = P(w)/w
    bool pass = false;
};

/// Ratio |g(z) - g(z')| / |z - z'| for g(w) = P(w)/w; rejects z == z'.
double separation_ratio(const ComplexPoly& P, cdbl z, cdbl zp);

/**
 * Samples `pairs` random distinct pairs in the region and verifies that
 * g(w) = P(w)/w separates them: |g(z) - g(z')| > 1e-12 |z - z'|.
 */
UnivalenceReport univalence_probe(const ComplexPoly& P, const ProbeRegion& region, long pairs,
                                  std::uint64_t seed);

} // namespace fastescape
