#include "doctest.h"

#include "fastescape/constants.hpp"
#include "fastescape/extcomplex.hpp"
#include "fastescape/highprec.hpp"
#include "fastescape/orbit.hpp"
#include "fastescape/tower.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

using namespace fastescape;

namespace {
const double kPi = 3.14159265358979323846;
const double kTau = 6.283185307179586;
const double kLn2 = 0.6931471805599453;

ComplexPoly unit_sine() { return ComplexPoly::sine_family(1.0, 0.0); }
} // namespace

TEST_CASE("angle reduction utilities") {
    CHECK(reduce_mod_tau(0.0).value == 0.0);
    CHECK(reduce_mod_tau(3.0 * kPi).value == doctest::Approx(kPi).epsilon(1e-14));

    // Against an extended-precision remainder: fmodl is exact, so the
    // long-double oracle is good to ~1e-6 at this magnitude.
    const double x = 1e14;
    const long double tauL = 6.283185307179586476925286766559L;
    long double rL = std::fmod(static_cast<long double>(x), tauL);
    if (rL > tauL / 2.0L) rL -= tauL;
    const ReducedAngle red = reduce_mod_tau(x);
    CHECK(std::abs(red.value - static_cast<double>(rL)) <= red.err + 1e-6);
    CHECK(red.err < 1e-1);
    CHECK(red.value <= kPi + 1e-15);
    CHECK(red.value > -kPi - 1e-15);

    CHECK(wrap_angle(7.0) == doctest::Approx(7.0 - kTau).epsilon(1e-14));
    CHECK(wrap_angle(-4.0) == doctest::Approx(kTau - 4.0).epsilon(1e-14));

    CHECK(axis_distance(kPi / 2.0) == doctest::Approx(0.0));
    CHECK(axis_distance(-kPi / 2.0 + 0.1) == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(axis_distance(0.0) == doctest::Approx(kPi / 2.0).epsilon(1e-15));
    CHECK(axis_distance(kPi) == doctest::Approx(kPi / 2.0).epsilon(1e-12));
}

TEST_CASE("the unit sine family evaluates to sinh") {
    const EntireMap map(unit_sine());
    const cdbl z(1.0, 0.5);
    const ExtComplex w = map.apply(ExtComplex::exact(z));
    REQUIRE(w.is_exact());
    CHECK(std::abs(w.z - std::sinh(z)) < 1e-14);

    const ExtComplex d = map.apply_derivative(ExtComplex::exact(z));
    REQUIRE(d.is_exact());
    CHECK(std::abs(d.z - std::cosh(z)) < 1e-14);

    CHECK(map.log_abs_derivative(cdbl(5.0, 0.0)) ==
          doctest::Approx(std::log(std::cosh(5.0))).epsilon(1e-12));
}

TEST_CASE("a linear shift enters through the middle coefficient") {
    const cdbl beta(0.3, 0.2);
    const EntireMap map(ComplexPoly::sine_family(1.0, beta));
    const cdbl z(0.7, -0.4);
    const ExtComplex w = map.apply(ExtComplex::exact(z));
    REQUIRE(w.is_exact());
    CHECK(std::abs(w.z - (std::sinh(z) + cdbl(0.0, 1.0) * beta)) < 1e-14);
}

TEST_CASE("representation switches at the configured threshold") {
    const EntireMap map(unit_sine(), 40.0);
    CHECK(map.switch_threshold() == 40.0);

    const ExtComplex small = map.apply(ExtComplex::exact(cdbl(10.0, 0.3)));
    CHECK(small.is_exact());

    const ExtComplex big = map.apply(ExtComplex::exact(cdbl(50.0, 0.0)));
    REQUIRE(!big.is_exact());
    // f ~ (1/2) e^z up to e^{-100} here.
    CHECK(big.log_mod == doctest::Approx(50.0 - kLn2).epsilon(1e-12));
    CHECK(std::abs(wrap_angle(big.arg)) < 1e-10);
    CHECK(big.arg_err < 1e-6);

    CHECK_THROWS_AS(EntireMap(unit_sine(), 0.0), std::invalid_argument);
    CHECK_THROWS_AS(EntireMap(unit_sine(), 800.0), std::invalid_argument);
}

TEST_CASE("dominant-term expansion matches direct evaluation in the overlap") {
    const EntireMap map(unit_sine());
    // Below the log-magnitude switch the expansion materializes to an exact
    // value; read modulus and angle from whichever representation came back.
    const auto log_mod_of = [](const ExtComplex& v) {
        return v.is_exact() ? std::log(std::abs(v.z)) : v.log_mod;
    };
    const auto arg_of = [](const ExtComplex& v) {
        return v.is_exact() ? std::arg(v.z) : v.arg;
    };
    for (const double re : {20.0, 30.0, 250.0}) {
        const cdbl z(re, 2.0);
        const ExtComplex asym = map.apply_asymptotic(z);
        const cdbl w = std::sinh(z);
        CHECK(log_mod_of(asym) == doctest::Approx(std::log(std::abs(w))).epsilon(1e-8));
        CHECK(std::abs(wrap_angle(arg_of(asym) - std::arg(w))) < 1e-8);
    }
    // Negative-direction dominance goes through the constant coefficient.
    const cdbl zn(-35.0, 1.0);
    const ExtComplex asymn = map.apply_asymptotic(zn);
    const cdbl wn = std::sinh(zn);
    CHECK(log_mod_of(asymn) == doctest::Approx(std::log(std::abs(wn))).epsilon(1e-8));
    CHECK(std::abs(wrap_angle(arg_of(asymn) - std::arg(wn))) < 1e-8);
}

TEST_CASE("direct evaluation refuses out-of-range magnitudes") {
    const EntireMap map(unit_sine());
    CHECK(map.direct_ok(300.0));
    CHECK(!map.direct_ok(800.0));
    CHECK_THROWS_AS(map.apply_exact(cdbl(800.0, 0.0)), RegimeOverflow);
    CHECK(std::abs(map.apply_exact(cdbl(3.0, 1.0)) - std::sinh(cdbl(3.0, 1.0))) < 1e-13);
}

TEST_CASE("log-magnitude inputs beyond double range throw") {
    const EntireMap map(unit_sine());
    const ExtComplex huge = ExtComplex::logmag(1000.0, 0.1, 1e-9);
    CHECK_THROWS_AS(map.apply(huge), RegimeOverflow);
}

TEST_CASE("tower reals canonicalize and compare") {
    const TowerReal a = TowerReal::from_value(5.0);
    CHECK(a.depth == 0);
    CHECK(a.value == 5.0);

    // e^10 still fits in a double, e^800 does not.
    CHECK(tower_compare(TowerReal::from_log(10.0), TowerReal::from_value(std::exp(10.0))).ord ==
          0);
    const TowerReal big = TowerReal::from_log(800.0);
    CHECK(big.depth >= 1);
    CHECK(tower_compare(big, TowerReal::from_value(1e300)).ord == 1);
    CHECK(tower_compare(TowerReal::from_value(1e300), big).ord == -1);

    const TowerOrder ord = tower_compare(TowerReal::from_value(5.0), TowerReal::from_value(4.0));
    CHECK(ord.ord == 1);
    CHECK(ord.margin == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(TowerReal::from_value(-1.0).log_of(), std::domain_error);
}

TEST_CASE("threshold levels double-exponentiate") {
    const ThresholdTower tw(6.0 * kLn2);
    CHECK(tw.x0() == doctest::Approx(6.0 * kLn2).epsilon(1e-15));
    CHECK(tw.level(0).depth == 0);
    CHECK(tw.level(0).value == doctest::Approx(6.0 * kLn2).epsilon(1e-15));
    // x1 = 2 e^{3 log 2} = 16, x2 = 2 e^8.
    CHECK(tw.level(1).value == doctest::Approx(16.0).epsilon(1e-14));
    CHECK(tw.level(2).value == doctest::Approx(2.0 * std::exp(8.0)).epsilon(1e-13));
    CHECK(tw.level(3).depth >= 1);

    CHECK(tw.compare_value(16.0, 1).ord == 0);
    CHECK(tw.compare_value(16.1, 1).ord == 1);
    CHECK(tw.compare_value(15.9, 1).ord == -1);

    // Level 3 is ~e^2981, beyond double range; log-scale comparisons decide.
    const double log_x3 = kLn2 + tw.level(2).value / 2.0;
    CHECK(tw.compare_log(log_x3 + 0.5, 3).ord == 1);
    CHECK(tw.compare_log(log_x3 - 0.5, 3).ord == -1);
    CHECK(tw.compare_log(std::log(1e6), 1).ord == 1);

    CHECK_THROWS_AS(ThresholdTower(1.0), std::invalid_argument);
    CHECK_THROWS_AS(tw.level(-1), std::invalid_argument);
}

TEST_CASE("orbit certification at the natural base scale") {
    const auto P = unit_sine();
    const EntireMap map(P);
    const ConstantSet cs = compute_constants(P);
    const ThresholdTower tw(cs.x_star);

    SUBCASE("the origin fails immediately") {
        const OrbitVerdict v = classify_orbit(map, cdbl(0.0, 0.0), 2, tw);
        CHECK(v.status == OrbitStatus::Failed);
        CHECK(v.at == 0);
        REQUIRE(v.margins.size() == 1);
        CHECK(v.margins[0] < 0.0);
    }

    SUBCASE("a real seed past the base scale certifies to depth 3") {
        const cdbl z0(cs.x_star + 1.0, 0.0);
        for (int depth = 0; depth <= 3; ++depth) {
            const OrbitVerdict v = classify_orbit(map, z0, depth, tw);
            CHECK(v.status == OrbitStatus::Certified);
            CHECK(v.at == -1);
            CHECK(v.margins.size() == static_cast<size_t>(depth) + 1);
            for (const double m : v.margins) CHECK(m >= 0.0);
        }
    }

    SUBCASE("a seed sent to the imaginary axis fails at step one") {
        // sinh maps x* + i pi/2 to (almost exactly) i cosh(x*).
        const cdbl z0(cs.x_star, kPi / 2.0);
        const OrbitVerdict v0 = classify_orbit(map, z0, 0, tw);
        CHECK(v0.status == OrbitStatus::Certified); // |Re z0| sits exactly at the base
        const OrbitVerdict v = classify_orbit(map, z0, 2, tw);
        CHECK(v.status == OrbitStatus::Failed);
        CHECK(v.at == 1);
        REQUIRE(v.margins.size() == 2);
        CHECK(v.margins[1] < 0.0);
    }

    SUBCASE("a seed exactly on the base scale has zero margin") {
        const OrbitVerdict v = classify_orbit(map, cdbl(cs.x_star, 0.1), 0, tw);
        CHECK(v.status == OrbitStatus::Certified);
        REQUIRE(v.margins.size() == 1);
        CHECK(std::abs(v.margins[0]) < 1e-9);
    }

    SUBCASE("verdicts are invariant under the vertical period") {
        const cdbl z0(26.0, 0.5);
        const cdbl z1(26.0, 0.5 + kTau);
        const OrbitVerdict a = classify_orbit(map, z0, 2, tw);
        const OrbitVerdict b = classify_orbit(map, z1, 2, tw);
        CHECK(a.status == OrbitStatus::Certified);
        CHECK(b.status == a.status);
        REQUIRE(a.margins.size() == b.margins.size());
        for (size_t i = 0; i < a.margins.size(); ++i)
            CHECK(a.margins[i] == doctest::Approx(b.margins[i]).epsilon(1e-9));
    }
}

TEST_CASE("angle exhaustion is reported, not guessed") {
    // At Re = 400 the image is log-magnitude only, and the seed's imaginary
    // part sits within 7e-17 of pi/2: the image direction cannot be pulled
    // off the imaginary axis, extra precision or not, and the verdict says
    // so rather than guessing a side.
    const auto P = unit_sine();
    const EntireMap map(P);
    const ThresholdTower tw(6.0 * kLn2);
    const cdbl z0(400.0, kPi / 2.0);

    OrbitOptions noRescue;
    noRescue.prec_bits = 0;
    const OrbitVerdict v = classify_orbit(map, z0, 1, tw, noRescue);
    CHECK(v.status == OrbitStatus::IndeterminateAngle);
    CHECK(v.at == 1);
    REQUIRE(v.margins.size() == 2);
    CHECK(std::isnan(v.margins.back()));

    const OrbitVerdict w = classify_orbit(map, z0, 2, tw);
    CHECK(w.status == OrbitStatus::IndeterminateAngle);
    CHECK(w.at == 1);
}

TEST_CASE("high-precision pass extends angle trust by a step") {
    // After one exact step from (33, 1) the iterate is ~(5.8e13, 9.0e13)
    // and the tracked component error ball (~0.4) swamps any double-only
    // reduction of Im mod 2pi; without the arbitrary-precision pass the
    // next check is honest-indeterminate, with it depth 2 certifies.
    const auto P = unit_sine();
    const EntireMap map(P);
    const ThresholdTower tw(6.0 * kLn2);
    const cdbl z0(33.0, 1.0);

    OrbitOptions noRescue;
    noRescue.prec_bits = 0;
    const OrbitVerdict v = classify_orbit(map, z0, 2, tw, noRescue);
    CHECK(v.status == OrbitStatus::IndeterminateAngle);
    CHECK(v.at == 2);
    REQUIRE(v.margins.size() == 3);
    CHECK(std::isnan(v.margins.back()));

    const OrbitVerdict w = classify_orbit(map, z0, 2, tw);
    CHECK(w.status == OrbitStatus::Certified);
    REQUIRE(w.margins.size() == 3);
    for (const double m : w.margins) CHECK(m >= 0.0);
}

TEST_CASE("deep certification survives leaving double range") {
    const auto P = unit_sine();
    const EntireMap map(P);
    const ThresholdTower tw(6.0 * kLn2);
    // Orbit: 6 -> ~201.7 -> ~e^201 -> e^{e^201}; all thresholds tower-dominated.
    const OrbitVerdict v = classify_orbit(map, cdbl(6.0, 0.0), 3, tw);
    CHECK(v.status == OrbitStatus::Certified);
    CHECK(v.margins.size() == 4);
}

TEST_CASE("minorant and majorant towers align after a short shift") {
    const ShiftReport rep = max_modulus_sequences(2.0, 2.0, 6);
    CHECK(rep.shift == 2); // v: 2, e^2 < 8, then e^{e^2} >= 8
    CHECK(rep.verified);
    CHECK(rep.margins.size() == 7);
    for (const double m : rep.margins) CHECK(m >= 0.0);
    CHECK(rep.log_u.size() >= 2);
    CHECK(rep.log_u[1] == doctest::Approx(std::log(2.0) + 4.0).epsilon(1e-12));

    const ShiftReport small = max_modulus_sequences(0.5, 0.6, 5);
    CHECK(small.shift == 0); // v0 already exceeds 2 R^2 = 0.5
    CHECK(small.verified);

    CHECK_THROWS_AS(max_modulus_sequences(0.0, 1.0, 3), std::invalid_argument);
}

TEST_CASE("high-precision prefix tracks the double orbit while it fits") {
    const auto P = unit_sine();

    const auto prefix = orbit_prefix_highprec(P, cdbl(1.0, 0.5), 3, 256);
    REQUIRE(prefix.size() == 3);
    cdbl z = std::sinh(cdbl(1.0, 0.5));
    CHECK(std::abs(prefix[0].value - z) < 1e-13);
    CHECK(prefix[0].im_mod == doctest::Approx(z.imag()).epsilon(1e-12));
    CHECK(prefix[0].im_mod_err < 1e-20);
    z = std::sinh(std::sinh(z));
    CHECK(std::abs(prefix[2].value - z) < 1e-10);
}

TEST_CASE("high-precision prefix stops before magnitudes leave its budget") {
    const auto P = unit_sine();

    // First step already needs ~433 bits of exponent headroom.
    CHECK(orbit_prefix_highprec(P, cdbl(300.0, 0.2), 3, 256).empty());

    // At 2048 bits the first step is fine, the second (exponent ~9e16) is not.
    const auto prefix = orbit_prefix_highprec(P, cdbl(40.0, 1.0), 2, 2048);
    REQUIRE(prefix.size() == 1);
    const cdbl w = std::sinh(cdbl(40.0, 1.0));
    CHECK(std::abs(prefix[0].value - w) / std::abs(w) < 1e-12);

    // The reduced imaginary part, against an extended-precision oracle.
    const long double tauL = 6.283185307179586476925286766559L;
    const long double imL = std::cosh(40.0L) * std::sin(1.0L);
    long double rL = std::fmod(imL, tauL);
    if (rL > tauL / 2.0L) rL -= tauL;
    CHECK(std::abs(prefix[0].im_mod - static_cast<double>(rL)) < 0.01);
    CHECK(prefix[0].im_mod_err < 1e-12);
}
