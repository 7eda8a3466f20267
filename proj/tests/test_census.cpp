#include "doctest.h"

#include "fastescape/census.hpp"
#include "fastescape/constants.hpp"

#include <cmath>
#include <stdexcept>

using namespace fastescape;

namespace {
ComplexPoly unit_sine() { return ComplexPoly::sine_family(1.0, 0.0); }

// 2 c1 e^4 e^{-x/2}, written out so the comparison is independent of the
// library's own helpers.
double level_gap(double c1, double x) { return 2.0 * c1 * std::exp(4.0 - x / 2.0); }
} // namespace

TEST_CASE("depth zero certifies every point of an admissible square") {
    const auto P = unit_sine();
    const ConstantSet cs = compute_constants(P);
    const Square Q0{cs.x_star, 0.0, 0.125};
    const DensityReport rep = sample_square_density(P, Q0, 0, 1000, 1);
    CHECK(rep.certifiedFraction == 1.0);
    CHECK(rep.indeterminateFraction == 0.0);
    CHECK(!rep.on_grid);
    CHECK(rep.depth == 0);
    CHECK(rep.samples == 1000);
    CHECK(rep.pass);
}

TEST_CASE("depth-two density on the square anchored at the base scale") {
    const auto P = unit_sine();
    const ConstantSet cs = compute_constants(P);
    const Square Q0{cs.x_star, 0.0, 0.125};
    const DensityReport rep = sample_square_density(P, Q0, 2, 10000, 1);
    CHECK(rep.certifiedFraction == 1.0);
    CHECK(rep.indeterminateFraction == 0.0);
    CHECK(rep.boundProduct == doctest::Approx(0.729329).epsilon(1e-4));
    CHECK(rep.boundExp == doctest::Approx(0.338686).epsilon(1e-4));
    CHECK(rep.sigma == doctest::Approx(0.00444).epsilon(2e-2));
    CHECK(rep.pass);
}

TEST_CASE("grid-aligned density reports carry closed-form bounds") {
    const auto P = unit_sine();
    const ConstantSet cs = compute_constants(P);
    const GridSquare Q{203, 0, 0.125}; // base |Re| = 25.375
    const DensityReport rep = sample_square_density(P, Q, 2, 2000, 1);
    CHECK(rep.on_grid);
    CHECK(rep.square.m == 203);
    CHECK(rep.square.n == 0);

    const double x = 25.375;
    const double rho0 = 1.0 - level_gap(cs.c1, x);
    // The second factor is saturated: the next threshold is ~6.5e5.
    CHECK(rep.boundProduct == doctest::Approx(rho0).epsilon(1e-12));
    CHECK(rep.boundExp == doctest::Approx(std::exp(-4.0 * level_gap(cs.c1, x))).epsilon(1e-12));
    CHECK(rep.certifiedFraction + rep.indeterminateFraction >=
          rep.boundProduct - 3.0 * rep.sigma);
    CHECK(rep.pass);
}

TEST_CASE("density sampling validates its input") {
    const auto P = unit_sine();
    CHECK_THROWS_AS(sample_square_density(P, GridSquare{100, 0, 0.125}, 1, 100, 1),
                    InadmissibleSquare); // |Re| ~ 12.5, below the base scale
    CHECK_THROWS_AS(sample_square_density(P, Square{-0.06, 0.0, 0.125}, 1, 100, 1),
                    InadmissibleSquare); // straddles the imaginary axis
    CHECK_THROWS_AS(sample_square_density(P, GridSquare{60, 0, 0.5}, 1, 100, 1),
                    std::invalid_argument); // side exceeds 1/(4N)
    CHECK_THROWS_AS(sample_square_density(P, GridSquare{203, 0, 0.125}, -1, 100, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(sample_square_density(P, GridSquare{203, 0, 0.125}, 1, 0, 1),
                    std::invalid_argument);
}

TEST_CASE("deeper certification never grows the certified fraction") {
    const auto P = unit_sine();
    const GridSquare Q{203, 5, 0.125};
    double prev = 2.0;
    for (int depth = 0; depth <= 3; ++depth) {
        const DensityReport rep = sample_square_density(P, Q, depth, 2000, 9);
        CHECK(rep.certifiedFraction <= prev);
        prev = rep.certifiedFraction;
        if (depth == 0) CHECK(rep.certifiedFraction == 1.0);
    }
}

TEST_CASE("strip census accounting at a small truncation") {
    const auto P = unit_sine();
    const ConstantSet cs = compute_constants(P);
    const double xMax = cs.x_star + 2.0;
    const StripCensus cen = strip_census(P, 0.0, 0.125, xMax, 1, 64, 1);

    // 30 sampled columns of 52 rows against 406 skipped columns.
    CHECK(cen.sampledSquares == 1560);
    CHECK(cen.skippedSquares == 21112);
    CHECK(cen.cells.size() == 22672);
    CHECK(cen.indeterminateSamples == 0);

    // Every sampled square certifies fully at depth 1, so the truncated sum
    // is exactly the skipped area 21112 / 64.
    CHECK(cen.truncatedArea == doctest::Approx(329.875).epsilon(1e-12));
    CHECK(cen.tailBound == doctest::Approx(census_tail_bound(cs.c1, 0.125, xMax)).epsilon(1e-15));
    CHECK(cen.totalUpper ==
          doctest::Approx(cen.truncatedArea + cen.tailBound).epsilon(1e-15));
    CHECK(cen.areaBound == doctest::Approx(cs.area_bound).epsilon(1e-15));
    CHECK(cen.totalUpper < cen.areaBound);

    long skippedSeen = 0;
    for (const SquareCell& cell : cen.cells) {
        if (cell.skipped) {
            ++skippedSeen;
            CHECK(cell.certifiedFraction == 0.0);
        } else {
            CHECK(cell.certifiedFraction == 1.0);
        }
    }
    CHECK(skippedSeen == cen.skippedSquares);

    CHECK_THROWS_AS(strip_census(P, 0.0, 0.125, cs.x_star - 5.0, 1, 64, 1),
                    std::invalid_argument);
}

TEST_CASE("strip census is reproducible across worker counts") {
    const auto P = unit_sine();
    const ConstantSet cs = compute_constants(P);
    CensusOptions one;
    one.workers = 1;
    CensusOptions four;
    four.workers = 4;
    const StripCensus a = strip_census(P, 0.0, 0.125, cs.x_star + 1.0, 2, 32, 3, one);
    const StripCensus b = strip_census(P, 0.0, 0.125, cs.x_star + 1.0, 2, 32, 3, four);
    CHECK(a.truncatedArea == b.truncatedArea);
    CHECK(a.totalUpper == b.totalUpper);
    CHECK(a.indeterminateSamples == b.indeterminateSamples);
    REQUIRE(a.cells.size() == b.cells.size());
    for (size_t i = 0; i < a.cells.size(); ++i) {
        CHECK(a.cells[i].m == b.cells[i].m);
        CHECK(a.cells[i].n == b.cells[i].n);
        CHECK(a.cells[i].certifiedFraction == b.cells[i].certifiedFraction);
        CHECK(a.cells[i].indeterminateFraction == b.cells[i].indeterminateFraction);
    }
}

TEST_CASE("tail bound closed form agrees with the direct column sum") {
    const auto P = unit_sine();
    const ConstantSet cs = compute_constants(P);
    const double tb = census_tail_bound(cs.c1, 0.125, cs.x_star);
    const double td = census_tail_bound_direct(cs.c1, 0.125, cs.x_star);
    CHECK(tb == doctest::Approx(27.432146).epsilon(1e-6));
    CHECK(std::abs(tb - td) / td < 1e-10);

    // Coarser integral-style estimate it must sit below.
    const double display =
        (4.0 * 3.14159265358979323846 + 0.5) * std::exp(-2.0) / (-std::expm1(-1.0 / 16.0));
    CHECK(tb <= display * (1.0 + 1e-12));
    CHECK(tb >= 0.85 * display);

    CHECK(census_tail_bound(cs.c1, 0.125, cs.x_star + 2.0) < tb);
    CHECK_THROWS_AS(census_tail_bound(-1.0, 0.125, 25.0), std::invalid_argument);
}

TEST_CASE("nesting level zero is the square itself") {
    const auto P = unit_sine();
    NestingOptions opt;
    opt.c1 = 0.02; // admissible base scale ~4.18
    const NestingReport rep = build_nesting_level(P, GridSquare{34, 0, 0.125}, 0, opt);
    CHECK(rep.k == 0);
    CHECK(rep.density == 1.0);
    CHECK(rep.rho_bound == 1.0);
    CHECK(rep.inversion_failures == 0);
}

TEST_CASE("nesting level one packs most of the square") {
    const auto P = unit_sine();
    NestingOptions opt;
    opt.c1 = 0.02;
    const GridSquare Q{34, 0, 0.125};
    const NestingReport rep = build_nesting_level(P, Q, 1, opt);
    CHECK(rep.k == 1);
    CHECK(rep.packed == 1298);
    CHECK(rep.partial == 156);
    CHECK(rep.inversion_failures == 0);
    CHECK(rep.density == doctest::Approx(0.9293).epsilon(2e-3));
    // The whole image stays right of the level-1 threshold here, so packed
    // plus partial pullbacks tile the square up to quadrature error.
    CHECK(rep.density + rep.boundary_fraction == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(rep.density >= rep.rho_bound);
    // rho_0 at base 4.25 with this constant.
    CHECK(rep.rho_bound == doctest::Approx(1.0 - level_gap(opt.c1, 4.25)).epsilon(1e-12));

    // Monte-Carlo certification of the same square brackets the packing.
    CensusOptions copt;
    copt.c1 = opt.c1;
    const DensityReport ds = sample_square_density(P, Q, 1, 20000, 7, copt);
    CHECK(ds.certifiedFraction >= rep.density);
    CHECK(ds.certifiedFraction <= rep.density + rep.boundary_fraction + 3.0 * ds.sigma + 1e-9);
}

TEST_CASE("nesting level two on a finer grid") {
    const auto P = unit_sine();
    NestingOptions opt;
    opt.c1 = 0.015;
    opt.sample_lattice = 48;
    const GridSquare Q{267, 0, 1.0 / 64.0};
    const NestingReport rep = build_nesting_level(P, Q, 2, opt);
    CHECK(rep.k == 2);
    CHECK(rep.packed == 975);
    CHECK(rep.inversion_failures == 0);
    CHECK(rep.density == doctest::Approx(0.9271).epsilon(2e-3));
    CHECK(rep.rho_bound == doctest::Approx(0.7962).epsilon(1e-3));
    CHECK(rep.density >= rep.rho_bound);

    CHECK_THROWS_AS(build_nesting_level(P, Q, 3, opt), std::invalid_argument);
}

TEST_CASE("nesting refuses oversized image grids") {
    const auto P = unit_sine();
    NestingOptions opt;
    opt.c1 = 0.02;
    opt.max_enumeration = 10;
    CHECK_THROWS_AS(build_nesting_level(P, GridSquare{34, 0, 0.125}, 1, opt),
                    std::invalid_argument);
}
