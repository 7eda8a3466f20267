#include "fastescape/census.hpp"

#include "fastescape/parallel.hpp"
#include "fastescape/rng.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <map>

namespace fastescape {

namespace {

constexpr double kTau = 6.283185307179586;

struct ResolvedBounds {
    double c1;
    double x_star;
};

ResolvedBounds resolve_bounds(const ComplexPoly& P, double r, double c1_opt, double x_star_opt) {
    const double c1 = c1_opt > 0.0 ? c1_opt : distortion_constant(P, r);
    const Radii rad = admissible_radii(P);
    const double xs = x_star_opt > 0.0 ? x_star_opt : base_scale(rad.R3, rad.R6, c1);
    return {c1, xs};
}

void check_side(const ComplexPoly& P, double r) {
    if (!(r > 0.0) || r > 1.0 / (4.0 * P.degree()) * (1.0 + 1e-12))
        throw std::invalid_argument("census: square side must satisfy 0 < r <= 1/(4N)");
}

double partial_rho_product(double c1, double x0, int depth) {
    double prod = 1.0;
    for (int j = 0; j < depth; ++j) prod *= nesting_ratio(c1, x0, j);
    return prod;
}

DensityReport density_core(const ComplexPoly& P, const Square& region, int depth, long samples,
                           std::uint64_t seed, std::uint64_t stream, const CensusOptions& opt) {
    if (depth < 0) throw std::invalid_argument("census: depth must be nonnegative");
    if (samples < 1) throw std::invalid_argument("census: need at least one sample");
    check_side(P, region.side);
    const ResolvedBounds rb = resolve_bounds(P, region.side, opt.c1, opt.x_star);
    const double x0 = region.min_abs_re();
    if (x0 < rb.x_star * (1.0 - 1e-12))
        throw InadmissibleSquare("census: square is not inside {|Re| >= x_star}");

    const ThresholdTower tower(x0);
    const EntireMap map(P);
    SplitMix64 rng(stream);
    long certified = 0, indeterminate = 0;
    for (long i = 0; i < samples; ++i) {
        const double u = rng.uniform();
        const double v = rng.uniform();
        const cdbl z{region.re0 + u * region.side, region.im0 + v * region.side};
        const OrbitVerdict verdict = classify_orbit(map, z, depth, tower, opt.orbit);
        if (verdict.status == OrbitStatus::Certified)
            ++certified;
        else if (verdict.status == OrbitStatus::IndeterminateAngle)
            ++indeterminate;
    }

    DensityReport rep;
    rep.region = region;
    rep.depth = depth;
    rep.samples = samples;
    rep.seed = seed;
    rep.certifiedFraction = static_cast<double>(certified) / samples;
    rep.indeterminateFraction = static_cast<double>(indeterminate) / samples;
    rep.boundProduct = partial_rho_product(rb.c1, x0, depth);
    rep.boundExp = square_density_bound(rb.c1, x0);
    const double b = std::max(rep.boundProduct, rep.boundExp);
    rep.sigma = std::sqrt(std::max(0.0, b * (1.0 - b) / samples));
    rep.pass = rep.certifiedFraction + rep.indeterminateFraction >= b - 3.0 * rep.sigma;
    return rep;
}

} // namespace

DensityReport sample_square_density(const ComplexPoly& P, const GridSquare& Q0, int depth,
                                    long samples, std::uint64_t seed, const CensusOptions& opt) {
    const std::uint64_t stream =
        mix64(seed, static_cast<std::uint64_t>(Q0.m), static_cast<std::uint64_t>(Q0.n));
    DensityReport rep = density_core(P, Q0.geometry(), depth, samples, seed, stream, opt);
    rep.square = Q0;
    rep.on_grid = true;
    return rep;
}

DensityReport sample_square_density(const ComplexPoly& P, const Square& Q0, int depth,
                                    long samples, std::uint64_t seed, const CensusOptions& opt) {
    const std::uint64_t stream = mix64(seed, std::bit_cast<std::uint64_t>(Q0.re0),
                                       std::bit_cast<std::uint64_t>(Q0.im0));
    DensityReport rep = density_core(P, Q0, depth, samples, seed, stream, opt);
    rep.on_grid = false;
    return rep;
}

double census_tail_bound(double c1, double r, double xMax) {
    if (!(c1 > 0.0) || !(r > 0.0) || !(xMax > 0.0))
        throw std::invalid_argument("tail bound: c1, r, xMax must be positive");
    const long rows = static_cast<long>(std::floor(kTau / r)) + 2; // n = 0..n0
    const double m_min = std::ceil(xMax / r);
    // mr threshold beyond which 8 c1 e^{4 - mr/2} <= 1
    const double t = 8.0 + 2.0 * std::log(8.0 * c1);
    const double m_g = std::max(m_min, std::ceil(t / r));
    const double n_full = m_g - m_min;
    const double geom = 8.0 * c1 * std::exp(4.0 - m_g * r / 2.0) / (-std::expm1(-r / 2.0));
    return 2.0 * static_cast<double>(rows) * r * r * (n_full + geom);
}

double census_tail_bound_direct(double c1, double r, double xMax) {
    if (!(c1 > 0.0) || !(r > 0.0) || !(xMax > 0.0))
        throw std::invalid_argument("tail bound: c1, r, xMax must be positive");
    const long rows = static_cast<long>(std::floor(kTau / r)) + 2;
    double m = std::ceil(xMax / r);
    double sum = 0.0;
    for (long guard = 0; guard < 10000000; ++guard, m += 1.0) {
        const double term = std::min(1.0, 8.0 * c1 * std::exp(4.0 - m * r / 2.0));
        sum += term;
        if (term < 1e-18) break;
    }
    return 2.0 * static_cast<double>(rows) * r * r * sum;
}

StripCensus strip_census(const ComplexPoly& P, double stripImOffset, double r, double xMax,
                         int depth, long samplesPerSquare, std::uint64_t seed,
                         const CensusOptions& opt) {
    check_side(P, r);
    if (depth < 0) throw std::invalid_argument("census: depth must be nonnegative");
    if (samplesPerSquare < 1) throw std::invalid_argument("census: need at least one sample per square");
    const ResolvedBounds rb = resolve_bounds(P, r, opt.c1, opt.x_star);
    if (xMax < rb.x_star)
        throw std::invalid_argument("census: xMax must be at least the base scale x_star");

    StripCensus census;
    census.stripImOffset = stripImOffset;
    census.r = r;
    census.xMax = xMax;
    census.depth = depth;
    census.samplesPerSquare = samplesPerSquare;
    census.seed = seed;
    census.tailBound = census_tail_bound(rb.c1, r, xMax);
    census.areaBound = area_upper_bound(r, rb.c1, rb.x_star);

    const long m_lo = static_cast<long>(std::ceil(-xMax / r));
    const long m_hi = static_cast<long>(std::floor(xMax / r)) - 1;
    const long n0 = static_cast<long>(std::floor(kTau / r)) + 1;

    census.cells.reserve(static_cast<size_t>((m_hi - m_lo + 1) * (n0 + 1)));
    for (long m = m_lo; m <= m_hi; ++m) {
        const double col_min_abs_re =
            (m >= 0) ? m * r : ((m + 1) * r <= 0.0 ? -(m + 1) * r : 0.0);
        const bool skipped = col_min_abs_re < rb.x_star * (1.0 - 1e-12);
        for (long n = 0; n <= n0; ++n) {
            SquareCell cell;
            cell.m = m;
            cell.n = n;
            cell.skipped = skipped;
            census.cells.push_back(cell);
        }
    }

    const EntireMap map(P);
    std::vector<long> indet_counts(census.cells.size(), 0);
    parallel_for(
        census.cells.size(),
        [&](size_t i) {
            SquareCell& cell = census.cells[i];
            if (cell.skipped) return;
            const Square region{cell.m * r, stripImOffset + cell.n * r, r};
            const ThresholdTower tower(region.min_abs_re());
            SplitMix64 rng(mix64(seed, static_cast<std::uint64_t>(cell.m),
                                 static_cast<std::uint64_t>(cell.n)));
            long certified = 0, indeterminate = 0;
            for (long s = 0; s < samplesPerSquare; ++s) {
                const double u = rng.uniform();
                const double v = rng.uniform();
                const cdbl z{region.re0 + u * r, region.im0 + v * r};
                const OrbitVerdict verdict = classify_orbit(map, z, depth, tower, opt.orbit);
                if (verdict.status == OrbitStatus::Certified)
                    ++certified;
                else if (verdict.status == OrbitStatus::IndeterminateAngle)
                    ++indeterminate;
            }
            cell.certifiedFraction = static_cast<double>(certified) / samplesPerSquare;
            cell.indeterminateFraction = static_cast<double>(indeterminate) / samplesPerSquare;
            indet_counts[i] = indeterminate;
        },
        opt.workers);

    // Deterministic reduction in (m, n) order.
    double truncated = 0.0;
    for (size_t i = 0; i < census.cells.size(); ++i) {
        const SquareCell& cell = census.cells[i];
        if (cell.skipped) {
            truncated += r * r;
            ++census.skippedSquares;
        } else {
            truncated += (1.0 - cell.certifiedFraction) * r * r;
            ++census.sampledSquares;
            census.indeterminateSamples += indet_counts[i];
        }
    }
    census.truncatedArea = truncated;
    census.totalUpper = census.truncatedArea + census.tailBound;
    return census;
}

namespace {

cdbl newton_invert(const EntireMap& map, cdbl w, cdbl z_start, int iters, double tol) {
    cdbl z = z_start;
    const double scale = std::max(1.0, std::abs(w));
    for (int i = 0; i < iters; ++i) {
        if (!map.direct_ok(z.real()))
            throw InversionFailure("inverse branch: iterate left the direct regime");
        cdbl fz;
        try {
            fz = map.apply_exact(z);
        } catch (const RegimeOverflow&) {
            throw InversionFailure("inverse branch: image overflow during iteration");
        }
        if (std::abs(fz - w) <= tol * scale) return z;
        const cdbl fp = map.derivative(z);
        if (!(std::abs(fp) > 1e-300))
            throw InversionFailure("inverse branch: derivative vanished");
        z -= (fz - w) / fp;
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw InversionFailure("inverse branch: iterate diverged");
    }
    throw InversionFailure("inverse branch: no convergence within the iteration budget");
}

double winding_turns(const std::vector<cdbl>& loop, cdbl c) {
    double total = 0.0;
    for (size_t i = 0; i + 1 < loop.size(); ++i)
        total += std::arg((loop[i + 1] - c) / (loop[i] - c));
    return total / kTau;
}

std::vector<cdbl> boundary_loop(const EntireMap& map, const Square& g, int per_side) {
    std::vector<cdbl> pts;
    pts.reserve(static_cast<size_t>(4 * per_side + 1));
    for (int side = 0; side < 4; ++side) {
        const cdbl a = g.corner(side);
        const cdbl b = g.corner((side + 1) % 4);
        for (int t = 0; t < per_side; ++t)
            pts.push_back(map.apply_exact(a + (static_cast<double>(t) / per_side) * (b - a)));
    }
    pts.push_back(pts.front());
    return pts;
}

double tower_level_value(const ThresholdTower& tower, int k) {
    const TowerReal lv = tower.level(k);
    if (lv.depth != 0)
        throw std::invalid_argument("nesting: threshold level exceeds double range at this base");
    return lv.value;
}

} // namespace

NestingReport build_nesting_level(const ComplexPoly& P, const GridSquare& Q0, int k,
                                  const NestingOptions& opt) {
    if (k < 0 || k > 2)
        throw std::invalid_argument("nesting: only levels k <= 2 are constructible");
    const double r = Q0.r;
    check_side(P, r);
    const ResolvedBounds rb = resolve_bounds(P, r, opt.c1, opt.x_star);
    const Square g = Q0.geometry();
    const double x0 = g.min_abs_re();
    if (x0 < rb.x_star * (1.0 - 1e-12))
        throw InadmissibleSquare("nesting: square is not inside {|Re| >= x_star}");

    NestingReport rep;
    rep.k = k;
    rep.square = Q0;
    rep.rho_bound = 1.0;
    try {
        for (int j = 0; j < k; ++j) rep.rho_bound *= nesting_ratio(rb.c1, x0, j);
    } catch (const std::domain_error&) {
        rep.rho_bound = 0.0; // the analytic bound is vacuous at this base
    }

    if (k == 0) {
        rep.packed = 1;
        rep.density = 1.0;
        return rep;
    }

    const EntireMap map(P);
    const ThresholdTower tower(x0);
    const double x1 = tower_level_value(tower, 1);
    const cdbl z_center = g.center();

    if (k == 1) {
        const std::vector<cdbl> loop = boundary_loop(map, g, 256);
        double re_lo = loop[0].real(), re_hi = re_lo;
        double im_lo = loop[0].imag(), im_hi = im_lo;
        for (const cdbl& w : loop) {
            re_lo = std::min(re_lo, w.real());
            re_hi = std::max(re_hi, w.real());
            im_lo = std::min(im_lo, w.imag());
            im_hi = std::max(im_hi, w.imag());
        }
        const long c_lo = static_cast<long>(std::floor(re_lo / r)) - 1;
        const long c_hi = static_cast<long>(std::floor(re_hi / r)) + 1;
        const long w_lo = static_cast<long>(std::floor(im_lo / r)) - 1;
        const long w_hi = static_cast<long>(std::floor(im_hi / r)) + 1;
        const long cols = c_hi - c_lo + 1, rws = w_hi - w_lo + 1;
        if (cols <= 0 || rws <= 0 || cols > opt.max_enumeration / std::max(rws, 1L))
            throw std::invalid_argument("nesting: level-1 image grid too large to enumerate");

        // Corner-winding cache over the candidate lattice.
        std::vector<double> cw(static_cast<size_t>((cols + 1) * (rws + 1)));
        for (long ci = 0; ci <= cols; ++ci)
            for (long wi = 0; wi <= rws; ++wi)
                cw[static_cast<size_t>(ci * (rws + 1) + wi)] =
                    winding_turns(loop, cdbl{(c_lo + ci) * r, (w_lo + wi) * r});

        double packed_area = 0.0, partial_area = 0.0;
        const int q = std::max(2, opt.area_lattice);
        const double cellw = r / q;
        // Pullback area of one image cell through the inverse branch; with
        // past_level_only, only the part beyond the level line is charged.
        auto pullback_area = [&](const Square& sg, bool past_level_only) {
            double area = 0.0;
            for (int a = 0; a < q; ++a) {
                for (int b = 0; b < q; ++b) {
                    const cdbl w{sg.re0 + (a + 0.5) * cellw, sg.im0 + (b + 0.5) * cellw};
                    if (past_level_only && std::abs(w.real()) < x1) continue;
                    try {
                        const cdbl z = newton_invert(map, w, z_center, opt.newton_iters,
                                                     opt.newton_tol);
                        if (!g.contains(z)) continue;
                        const double fp = std::abs(map.derivative(z));
                        area += cellw * cellw / (fp * fp);
                    } catch (const InversionFailure&) {
                        ++rep.inversion_failures;
                    }
                }
            }
            return area;
        };
        for (long ci = 0; ci < cols; ++ci) {
            for (long wi = 0; wi < rws; ++wi) {
                const GridSquare S{c_lo + ci, w_lo + wi, r};
                const Square sg = S.geometry();
                const double wind[4] = {
                    cw[static_cast<size_t>(ci * (rws + 1) + wi)],
                    cw[static_cast<size_t>((ci + 1) * (rws + 1) + wi)],
                    cw[static_cast<size_t>((ci + 1) * (rws + 1) + wi + 1)],
                    cw[static_cast<size_t>(ci * (rws + 1) + wi + 1)]};
                int inside = 0;
                for (double t : wind)
                    if (std::abs(t - 1.0) < 0.25) ++inside;
                if (inside == 0) continue;
                if (sg.min_abs_re() < x1) {
                    ++rep.partial; // meets the image but fails the level cut
                    // When the level line crosses the cell, the far-side
                    // sliver can still carry certified points; charge its
                    // pullback to the boundary term so the packing brackets
                    // the sampled fraction.
                    if (std::max(std::abs(sg.re0), std::abs(sg.re0 + r)) >= x1)
                        partial_area += pullback_area(sg, true);
                    continue;
                }
                // Confirm by pulling corners + center through the inverse branch.
                bool failed = false;
                int contained = 0;
                std::array<cdbl, 5> probes{sg.corner(0), sg.corner(1), sg.corner(2), sg.corner(3),
                                           sg.center()};
                for (const cdbl& w : probes) {
                    try {
                        const cdbl z = newton_invert(map, w, z_center, opt.newton_iters, opt.newton_tol);
                        if (g.contains(z)) ++contained;
                    } catch (const InversionFailure&) {
                        ++rep.inversion_failures;
                        failed = true;
                        break;
                    }
                }
                if (failed) continue;
                if (contained == 0) continue;
                // Pullback area via the inverse Jacobian on a centered lattice.
                const double area = pullback_area(sg, false);
                if (contained == 5 && inside == 4) {
                    ++rep.packed;
                    packed_area += area;
                } else {
                    ++rep.partial;
                    partial_area += area;
                }
            }
        }
        rep.density = packed_area / (r * r);
        rep.boundary_fraction = partial_area / (r * r);
        return rep;
    }

    // k == 2: pointwise membership on a deterministic lattice over Q0.
    const double x2 = tower_level_value(tower, 2);
    const int s = std::max(8, opt.sample_lattice);
    std::map<std::pair<long, long>, bool> pack1;
    std::map<std::array<long, 4>, bool> step2;
    long passes = 0;

    auto level1_packed = [&](const GridSquare& S1) -> bool {
        const auto key = std::make_pair(S1.m, S1.n);
        const auto it = pack1.find(key);
        if (it != pack1.end()) return it->second;
        bool ok = S1.geometry().min_abs_re() >= x1;
        if (ok) {
            const Square sg = S1.geometry();
            const std::array<cdbl, 5> probes{sg.corner(0), sg.corner(1), sg.corner(2), sg.corner(3),
                                             sg.center()};
            for (const cdbl& w : probes) {
                try {
                    const cdbl z = newton_invert(map, w, z_center, opt.newton_iters, opt.newton_tol);
                    if (!g.contains(z)) {
                        ok = false;
                        break;
                    }
                } catch (const InversionFailure&) {
                    ++rep.inversion_failures;
                    ok = false;
                    break;
                }
            }
        }
        pack1.emplace(key, ok);
        if (ok) ++rep.packed;
        return ok;
    };

    for (int a = 0; a < s; ++a) {
        for (int b = 0; b < s; ++b) {
            const cdbl z{g.re0 + (a + 0.5) * r / s, g.im0 + (b + 0.5) * r / s};
            const cdbl w1 = map.apply_exact(z);
            const GridSquare S1 = grid_square_of(w1, r);
            if (!level1_packed(S1)) continue;
            cdbl w2;
            try {
                w2 = map.apply_exact(w1);
            } catch (const RegimeOverflow&) {
                continue; // cannot place the level-2 square
            }
            const GridSquare S2 = grid_square_of(w2, r);
            const std::array<long, 4> key{S1.m, S1.n, S2.m, S2.n};
            const auto it = step2.find(key);
            bool ok;
            if (it != step2.end()) {
                ok = it->second;
            } else {
                ok = S2.geometry().min_abs_re() >= x2;
                if (ok) {
                    const Square s2g = S2.geometry();
                    const Square s1g = S1.geometry();
                    const std::array<cdbl, 5> probes{s2g.corner(0), s2g.corner(1), s2g.corner(2),
                                                     s2g.corner(3), s2g.center()};
                    for (const cdbl& w : probes) {
                        try {
                            const cdbl u = newton_invert(map, w, s1g.center(), opt.newton_iters,
                                                         opt.newton_tol);
                            if (!s1g.contains(u)) {
                                ok = false;
                                break;
                            }
                        } catch (const InversionFailure&) {
                            ++rep.inversion_failures;
                            ok = false;
                            break;
                        }
                    }
                }
                step2.emplace(key, ok);
            }
            if (ok) ++passes;
        }
    }
    rep.density = static_cast<double>(passes) / (static_cast<double>(s) * s);
    return rep;
}

} // namespace fastescape
