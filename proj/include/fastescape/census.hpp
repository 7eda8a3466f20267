#pragma once

#include "fastescape/constants.hpp"
#include "fastescape/grid.hpp"
#include "fastescape/orbit.hpp"

#include <cstdint>
#include <vector>

namespace fastescape {

/// Thrown internally when Newton inversion of the conformal restriction
/// does not converge within its iteration budget; enumeration routines
/// catch it, count the square as unresolved and move on.
struct InversionFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Shared knobs for the sampling and packing estimators.  c1 = 0 and
/// x_star = 0 mean "derive from the family": c1 becomes the honest
/// distortion constant for the square side in use and x_star the base
/// scale it implies.  Overriding them tightens or loosens only the
/// *reported bounds* and the admissibility gate — the certification
/// itself always tests the literal threshold tower.
struct CensusOptions {
    double c1 = 0.0;
    double x_star = 0.0;
    OrbitOptions orbit{};
    int workers = 0; // 0 = library default / environment cap
};

struct DensityReport {
    GridSquare square{};  // grid indices when the region is grid-aligned
    Square region{};      // the geometry actually sampled
    bool on_grid = true;
    int depth = 0;
    long samples = 0;
    std::uint64_t seed = 0;
    double certifiedFraction = 0.0;
    double indeterminateFraction = 0.0;
    double boundProduct = 1.0; // prod_{j<depth} rho_j at the square's base
    double boundExp = 0.0;     // exp(-8 c1 e^4 e^{-x/2}) at the square's base
    double sigma = 0.0;        // binomial std error of the binding bound
    bool pass = false;         // certified + indeterminate >= bound - 3 sigma
};

/**
 * Monte-Carlo density of the certified-to-depth set in Q0.  Samples are
 * drawn from a per-square RNG stream seeded by (seed, m, n), so results
 * do not depend on scheduling.  The threshold tower is based at the
 * square's own min |Re|.  Throws InadmissibleSquare when Q0 is not inside
 * {|Re| >= x_star} and std::invalid_argument when the side exceeds 1/(4N).
 */
DensityReport sample_square_density(const ComplexPoly& P, const GridSquare& Q0, int depth,
                                    long samples, std::uint64_t seed,
                                    const CensusOptions& opt = {});

/// Same estimator on a free (not grid-aligned) square, e.g. one anchored
/// exactly at the base scale.  The RNG stream is seeded from the corner
/// coordinates instead of grid indices.
DensityReport sample_square_density(const ComplexPoly& P, const Square& Q0, int depth,
                                    long samples, std::uint64_t seed,
                                    const CensusOptions& opt = {});

struct SquareCell {
    long m = 0;
    long n = 0;
    double certifiedFraction = 0.0;
    double indeterminateFraction = 0.0;
    bool skipped = false; // below the base scale: counted wholly uncertified
};

struct StripCensus {
    double stripImOffset = 0.0; // S = {offset <= Im <= offset + 2 pi}
    double r = 0.0;
    double xMax = 0.0;
    int depth = 0;
    long samplesPerSquare = 0;
    std::uint64_t seed = 0;
    double truncatedArea = 0.0; // uncertified area within |Re| <= xMax
    double tailBound = 0.0;     // analytic bound for |Re| > xMax
    double totalUpper = 0.0;    // truncatedArea + tailBound
    double areaBound = 0.0;     // closed-form strip bound for comparison
    long sampledSquares = 0;
    long skippedSquares = 0;
    long indeterminateSamples = 0;
    std::vector<SquareCell> cells; // sorted by (m, n)
};

/**
 * Full census of one period strip: every grid square with |Re| <= xMax and
 * Im in [offset, offset + 2 pi] is either sampled (when inside
 * {|Re| >= x_star}) or counted wholly uncertified, and the area beyond
 * xMax is covered by the closed-form geometric tail.  Deterministic for
 * fixed inputs regardless of worker count.
 */
StripCensus strip_census(const ComplexPoly& P, double stripImOffset, double r, double xMax,
                         int depth, long samplesPerSquare, std::uint64_t seed,
                         const CensusOptions& opt = {});

/// The analytic tail: 2 (n0+1) r^2 sum_{m r >= xMax} min(1, 8 c1 e^4 e^{-mr/2})
/// evaluated in closed form (n0 = [2 pi / r] + 1 rows per half-strip).
double census_tail_bound(double c1, double r, double xMax);

/// Direct summation of the same series (test oracle; stops once terms fall
/// below 1e-18 of the running sum).
double census_tail_bound_direct(double c1, double r, double xMax);

struct NestingOptions {
    double c1 = 0.0;     // 0 -> honest constant for Q0.r
    double x_star = 0.0; // 0 -> base scale implied by c1
    int area_lattice = 6;     // quadrature points per packed-square side
    int sample_lattice = 96;  // k=2 membership lattice per side
    int newton_iters = 100;
    double newton_tol = 1e-12;
    long max_enumeration = 4000000; // refuse image grids beyond this
};

struct NestingReport {
    int k = 0;
    GridSquare square{};
    long packed = 0;             // image squares fully inside f(Q0) and {|Re| >= x1}
    long partial = 0;            // image squares meeting the region but not inside
    long inversion_failures = 0; // Newton non-convergences (squares excluded)
    double density = 0.0;        // area fraction of Q0 carried into packed squares
    double boundary_fraction = 0.0; // pullback area of partially covered squares
    double rho_bound = 0.0;      // prod_{j<k} rho_j at the square's base
};

/**
 * Explicit packing oracle for the nested certified sets.
 *
 *  k = 0: the packing is Q0 itself (density 1).
 *  k = 1: enumerates every grid square contained in f(Q0) ∩ {|Re| >= x1},
 *         pulls each back through the conformal inverse branch by Newton
 *         iteration and integrates |1/f'|^2 to measure the preimage —
 *         a brute-force oracle for depth-1 sampling.
 *  k = 2: exact enumeration of the second-level image is far beyond any
 *         memory budget, so membership is evaluated pointwise instead: a
 *         deterministic lattice over Q0 is classified by pulling the
 *         corners of the level-2 square back into the level-1 square and
 *         the level-1 corners back into Q0.
 *
 * Throws InadmissibleSquare when Q0 is not inside {|Re| >= x_star} and
 * std::invalid_argument for k > 2 or when the level-1 image grid exceeds
 * max_enumeration squares.
 */
NestingReport build_nesting_level(const ComplexPoly& P, const GridSquare& Q0, int k,
                                  const NestingOptions& opt = {});

} // namespace fastescape
