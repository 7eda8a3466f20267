#include "fastescape/distortion.hpp"

#include "fastescape/constants.hpp"
#include "fastescape/rng.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <unordered_set>

namespace fastescape {

namespace {

constexpr double kTau = 6.283185307179586;

/// Visit the nested s x s sample lattice of Q: the points
/// (re0 + side * i/s, im0 + side * j/s), 0 <= i, j < s.  Doubling s keeps
/// every existing point (i/s and (2i)/(2s) round identically), which makes
/// sup-estimates monotone under refinement.
template <typename F>
void for_lattice(const GridSquare& Q, int s, F&& fn) {
    if (s < 1) throw std::invalid_argument("sample lattice must have at least one point");
    const Square g = Q.geometry();
    for (int i = 0; i < s; ++i) {
        const double re = g.re0 + g.side * (static_cast<double>(i) / s);
        for (int j = 0; j < s; ++j) {
            const double im = g.im0 + g.side * (static_cast<double>(j) / s);
            fn(cdbl{re, im});
        }
    }
}

} // namespace

bool square_in_half_planes(const GridSquare& Q, double x) {
    return Q.geometry().min_abs_re() >= x;
}

double nonlinearity(const ComplexPoly& P, const GridSquare& Q, int grid_samples) {
    const EntireMap map(P);
    double worst = 0.0;
    for_lattice(Q, grid_samples, [&](cdbl z) {
        worst = std::max(worst, std::abs(map.log_derivative_ratio(z)));
    });
    return worst * Q.r * std::sqrt(2.0);
}

double distortion(const ComplexPoly& P, const GridSquare& Q, int grid_samples) {
    const EntireMap map(P);
    constexpr double kSingular = -32.23619130191664; // log(1e-14)
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for_lattice(Q, grid_samples, [&](cdbl z) {
        const double l = map.log_abs_derivative(z);
        if (l < kSingular)
            throw SingularDerivative("distortion: |f'| below 1e-14 at a sample point");
        lo = std::min(lo, l);
        hi = std::max(hi, l);
    });
    return std::exp(hi - lo);
}

LNReport check_LN(const ComplexPoly& P, const GridSquare& Q, int grid_samples) {
    LNReport rep;
    rep.nnl = nonlinearity(P, Q, grid_samples);
    if (rep.nnl >= 1.0)
        throw PreconditionViolated("check_LN: nonlinearity >= 1, the linear bound does not apply");
    rep.L = distortion(P, Q, grid_samples);
    rep.bound = 1.0 + 2.0 * rep.nnl;
    rep.pass = rep.L <= rep.bound * 1.02;
    return rep;
}

namespace {

/// Image of the boundary of Q under f, sampled with parameter step
/// <= Q.r / 64, as a closed polyline (first point repeated at the end).
std::vector<cdbl> boundary_image(const EntireMap& map, const GridSquare& Q, int per_side) {
    const Square g = Q.geometry();
    std::vector<cdbl> pts;
    pts.reserve(static_cast<size_t>(4 * per_side + 1));
    for (int side = 0; side < 4; ++side) {
        const cdbl a = g.corner(side);
        const cdbl b = g.corner((side + 1) % 4);
        for (int t = 0; t < per_side; ++t) {
            const double u = static_cast<double>(t) / per_side;
            pts.push_back(map.apply_exact(a + u * (b - a)));
        }
    }
    pts.push_back(pts.front());
    return pts;
}

/// Winding number of the closed polyline around c (expected 0 or 1 here).
double winding_turns(const std::vector<cdbl>& loop, cdbl c) {
    double total = 0.0;
    for (size_t i = 0; i + 1 < loop.size(); ++i) {
        const cdbl u = loop[i] - c;
        const cdbl v = loop[i + 1] - c;
        total += std::arg(v / u);
    }
    return total / kTau;
}

void verify_containment(const EntireMap& map, const GridSquare& from, const GridSquare& to) {
    std::vector<cdbl> loop;
    try {
        loop = boundary_image(map, from, 64);
    } catch (const RegimeOverflow&) {
        throw PreconditionViolated("chain: image of a square exceeds double range");
    }
    const Square target = to.geometry();
    for (const cdbl& w : loop) {
        if (target.contains(w))
            throw ChainBroken("chain: image boundary enters the next square");
    }
    for (int corner = 0; corner < 4; ++corner) {
        const double turns = winding_turns(loop, target.corner(corner));
        if (std::abs(turns - 1.0) > 0.25)
            throw ChainBroken("chain: next square's corner is not surrounded by the image boundary");
    }
}

} // namespace

ChainReport chain_distortion(const ComplexPoly& P, const std::vector<GridSquare>& chain,
                             const ThresholdTower& tower, int grid_samples) {
    ChainReport rep;
    rep.bound = std::exp(2.0);
    rep.levels_ok = true;
    if (chain.empty()) {
        rep.pass = true;
        return rep;
    }

    const int N = P.degree();
    const double r = chain.front().r;
    if (r > 1.0 / (4.0 * N) * (1.0 + 1e-12))
        throw PreconditionViolated("chain: side must satisfy r <= 1/(4N)");
    const double R6 = admissible_radii(P).R6;
    for (const GridSquare& Q : chain) {
        if (Q.r != r)
            throw PreconditionViolated("chain: all squares must share one side length");
        if (!square_in_half_planes(Q, R6))
            throw PreconditionViolated("chain: square leaves the admissible half-planes");
    }
    for (size_t i = 0; i < chain.size(); ++i) {
        if (tower.compare_value(chain[i].geometry().min_abs_re(), static_cast<int>(i)).ord < 0)
            rep.levels_ok = false;
    }

    const EntireMap map(P);
    for (size_t i = 0; i + 1 < chain.size(); ++i) {
        verify_containment(map, chain[i], chain[i + 1]);
        ++rep.steps;
    }
    rep.Lest = 1.0;
    for (const GridSquare& Q : chain) rep.Lest *= distortion(P, Q, grid_samples);
    rep.pass = rep.Lest <= rep.bound;
    return rep;
}

std::vector<GridSquare> build_forward_chain(const ComplexPoly& P, const GridSquare& q0,
                                            double min_abs_re, int squares) {
    std::vector<GridSquare> chain{q0};
    const EntireMap map(P);
    const double r = q0.r;

    while (static_cast<int>(chain.size()) < squares) {
        const GridSquare& Q = chain.back();
        const cdbl z0 = Q.geometry().center();
        if (!map.direct_ok(z0.real())) break;
        cdbl w0;
        try {
            w0 = map.apply_exact(z0);
        } catch (const RegimeOverflow&) {
            break;
        }
        const double fp = std::exp(map.log_abs_derivative(z0));
        // Everything within rho of f(center) is inside the image: the
        // distortion of f on the square is < 2, so the inradius of the
        // image is at least (r/2) * inf|f'| >= (r/2) * fp / 2.
        const double rho = 0.25 * r * fp;

        const double lo_target = min_abs_re + 1.5 * r;
        const double reach_lo = std::abs(w0.real()) - 0.6 * rho;
        const double reach_hi = std::abs(w0.real()) + 0.6 * rho;
        double abs_re = std::clamp(lo_target, reach_lo, reach_hi);
        if (abs_re < lo_target) break;
        const double sgn = (w0.real() >= 0.0) ? 1.0 : -1.0;
        const cdbl target{sgn * abs_re, w0.imag()};

        GridSquare next{};
        try {
            next = grid_square_of(target, r);
        } catch (const InadmissibleSquare&) {
            break;
        }
        bool fits = true;
        const Square ng = next.geometry();
        for (int cidx = 0; cidx < 4; ++cidx)
            if (std::abs(ng.corner(cidx) - w0) > 0.85 * rho) fits = false;
        if (!fits || ng.min_abs_re() < min_abs_re) break;
        chain.push_back(next);
    }
    return chain;
}

long squares_meeting_vertical_segment(double x, double y0, double y1, double r) {
    if (!(r > 0.0)) throw std::invalid_argument("segment count: r must be positive");
    if (y0 > y1) std::swap(y0, y1);
    const double cf = std::floor(x / r);
    long cols = 1;
    if (cf * r == x) cols = 2; // the segment lies on a grid line
    const long rlo = static_cast<long>(std::floor(y0 / r));
    const long rhi = static_cast<long>(std::floor(y1 / r));
    long rows = rhi - rlo + 1;
    if (std::floor(y0 / r) * r == y0 && y0 != y1) {
        // touching row below at a single gridline point
        rows += 1;
    }
    return cols * rows;
}

namespace {

struct CellHash {
    size_t operator()(const std::pair<long, long>& c) const {
        return std::hash<long long>()((static_cast<long long>(c.first) << 20) ^ c.second);
    }
};

using CellSet = std::unordered_set<std::pair<long, long>, CellHash>;

std::pair<long, long> cell_of(cdbl w, double r) {
    const double mre = std::floor(w.real() / r);
    const double mim = std::floor(w.imag() / r);
    if (std::abs(mre) > 9e15 || std::abs(mim) > 9e15)
        throw InadmissibleSquare("boundary count: image cell index exceeds exact integer range");
    return {static_cast<long>(mre), static_cast<long>(mim)};
}

/// Insert the cells touched by the image of the parameter segment [a, b]
/// of the boundary of Q, subdividing until consecutive image points are
/// close (chord <= r/4) and stay within one cell step of each other.
void insert_segment_cells(const EntireMap& map, CellSet& cells, cdbl a, cdbl wa, cdbl b, cdbl wb,
                          double r, int depth, std::vector<cdbl>* polyline) {
    const auto ca = cell_of(wa, r);
    const auto cb = cell_of(wb, r);
    const bool close = std::abs(wb - wa) <= 0.25 * r;
    const bool adjacent = std::abs(ca.first - cb.first) + std::abs(ca.second - cb.second) <= 1;
    if ((close && adjacent) || depth >= 14) {
        cells.insert(ca);
        cells.insert(cb);
        if (depth >= 14 && !adjacent) {
            // resolution cap: record the midpoint cell so nothing inside
            // the residual chord can be skipped
            cells.insert(cell_of(map.apply_exact(0.5 * (a + b)), r));
        }
        if (polyline) polyline->push_back(wb);
        return;
    }
    const cdbl m = 0.5 * (a + b);
    const cdbl wm = map.apply_exact(m);
    insert_segment_cells(map, cells, a, wa, m, wm, r, depth + 1, polyline);
    insert_segment_cells(map, cells, m, wm, b, wb, r, depth + 1, polyline);
}

void insert_vertical_segment_cells(CellSet& cells, double x, double y0, double y1, double r) {
    if (y0 > y1) std::swap(y0, y1);
    const double cf = std::floor(x / r);
    if (std::abs(cf) > 9e15 || std::abs(y1 / r) > 9e15 || std::abs(y0 / r) > 9e15)
        throw InadmissibleSquare("boundary count: clip cell index exceeds exact integer range");
    std::vector<long> colv{static_cast<long>(cf)};
    if (cf * r == x) colv.push_back(static_cast<long>(cf) - 1);
    const long rlo = static_cast<long>(std::floor(y0 / r));
    const long rhi = static_cast<long>(std::floor(y1 / r));
    for (long col : colv)
        for (long row = rlo; row <= rhi; ++row) cells.insert({col, row});
}

} // namespace

BoundaryCountReport count_boundary_squares(const ComplexPoly& P, const GridSquare& Q, double x) {
    BoundaryCountReport rep;
    const EntireMap map(P);
    const cdbl z0 = Q.geometry().center();
    rep.fprime_center = std::exp(map.log_abs_derivative(z0));
    rep.L = distortion(P, Q, 64);
    rep.c = 16.0 + 12.0 * std::sqrt(2.0) * rep.L * rep.fprime_center;

    const double r = Q.r;
    CellSet cells;
    std::vector<cdbl> polyline;
    const Square g = Q.geometry();
    std::vector<cdbl> param;
    for (int side = 0; side < 4; ++side) {
        const cdbl a = g.corner(side);
        const cdbl b = g.corner((side + 1) % 4);
        for (int t = 0; t < 16; ++t) param.push_back(a + (static_cast<double>(t) / 16.0) * (b - a));
    }
    param.push_back(param.front());
    polyline.push_back(map.apply_exact(param.front()));
    for (size_t i = 0; i + 1 < param.size(); ++i) {
        const cdbl wa = polyline.back();
        const cdbl wb = map.apply_exact(param[i + 1]);
        insert_segment_cells(map, cells, param[i], wa, param[i + 1], wb, r, 0, &polyline);
    }

    // Clip lines {Re w = +-x}: recover the portions inside f(Q) from the
    // crossings of the image boundary and count their rows.
    for (const double line : {x, -x}) {
        std::vector<double> ys;
        for (size_t i = 0; i + 1 < polyline.size(); ++i) {
            const double da = polyline[i].real() - line;
            const double db = polyline[i + 1].real() - line;
            if (da == 0.0) ys.push_back(polyline[i].imag());
            if ((da < 0.0 && db > 0.0) || (da > 0.0 && db < 0.0)) {
                const double t = da / (da - db);
                ys.push_back(polyline[i].imag() + t * (polyline[i + 1].imag() - polyline[i].imag()));
            }
        }
        std::sort(ys.begin(), ys.end());
        for (size_t i = 0; i + 1 < ys.size(); i += 2) {
            insert_vertical_segment_cells(cells, line, ys[i], ys[i + 1], r);
            rep.clip_nonempty = true;
        }
        if (line == 0.0) break; // x = 0: the two lines coincide
    }

    rep.count = static_cast<long>(cells.size());
    rep.pass = rep.count <= rep.c;
    return rep;
}

PolyAsymReport check_poly_asymptotics(const ComplexPoly& P, double epsilon, int samples) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("check_poly_asymptotics: epsilon must be positive");
    if (samples < 1) throw std::invalid_argument("check_poly_asymptotics: samples must be positive");
    PolyAsymReport rep;
    const int N = P.degree();
    const double K = P.coeff_max();
    const double aN = std::abs(P.head());
    const double a0 = std::abs(P.tail());
    rep.outer_radius = 1.0 + K / (epsilon * aN);
    rep.inner_radius = epsilon * a0 / (K + epsilon * a0);
    rep.worst_outer_slack = std::numeric_limits<double>::infinity();
    rep.worst_inner_slack = std::numeric_limits<double>::infinity();

    for (const double rad : {rep.outer_radius, 2.0 * rep.outer_radius}) {
        for (int j = 0; j < samples; ++j) {
            const double th = kTau * j / samples;
            const cdbl w = rad * cdbl{std::cos(th), std::sin(th)};
            const double defect = std::abs(P(w) - P.head() * std::pow(w, N));
            const double allow = epsilon * aN * std::pow(rad, N);
            rep.worst_outer_slack = std::min(rep.worst_outer_slack, allow - defect);
            ++rep.checked;
            if (defect > allow) ++rep.failures;
        }
    }
    for (const double rad : {rep.inner_radius, 0.5 * rep.inner_radius}) {
        for (int j = 0; j < samples; ++j) {
            const double th = kTau * j / samples;
            const cdbl w = rad * cdbl{std::cos(th), std::sin(th)};
            const double defect = std::abs(P(w) - P.tail());
            const double allow = epsilon * a0;
            rep.worst_inner_slack = std::min(rep.worst_inner_slack, allow - defect);
            ++rep.checked;
            if (defect > allow) ++rep.failures;
        }
    }
    rep.pass = rep.failures == 0;
    return rep;
}

DerivBoundReport check_derivative_bounds(const ComplexPoly& P, int samples) {
    if (samples < 1) throw std::invalid_argument("check_derivative_bounds: samples must be positive");
    DerivBoundReport rep;
    const Radii rad = admissible_radii(P);
    const int N = P.degree();
    rep.worst_first_slack = std::numeric_limits<double>::infinity();
    rep.worst_second_slack = std::numeric_limits<double>::infinity();

    for (const double rr : {rad.R4, 2.0 * rad.R4, rad.R5, 0.5 * rad.R5}) {
        for (int j = 0; j < samples; ++j) {
            const double th = kTau * j / samples;
            const cdbl w = rr * cdbl{std::cos(th), std::sin(th)};
            const cdbl p = P(w), p1 = P.derivative(w), p2 = P.second_derivative(w);
            const double first = std::abs(p1 - p / w);
            const double second = std::abs(w * w * p2 / (w * p1 - p) - 1.0);
            rep.worst_first_slack = std::min(rep.worst_first_slack, first - 2.0);
            rep.worst_second_slack = std::min(rep.worst_second_slack, N - second);
            ++rep.checked;
            if (!(first > 2.0) || !(second < N)) ++rep.failures;
        }
    }

    const EntireMap map(P);
    double min_log = std::numeric_limits<double>::infinity();
    for (const double side : {rad.R6, -rad.R6}) {
        for (int j = 0; j < samples; ++j) {
            const double y = kTau * j / samples;
            min_log = std::min(min_log, map.log_abs_derivative(cdbl{side, y}));
            ++rep.checked;
        }
    }
    rep.min_abs_fprime = std::exp(min_log);
    if (!(rep.min_abs_fprime > 2.0)) ++rep.failures;
    rep.pass = rep.failures == 0;
    return rep;
}

double separation_ratio(const ComplexPoly& P, cdbl z, cdbl zp) {
    if (z == zp) throw std::invalid_argument("separation_ratio: degenerate pair");
    const cdbl g1 = P(z) / z;
    const cdbl g2 = P(zp) / zp;
    return std::abs(g1 - g2) / std::abs(z - zp);
}

UnivalenceReport univalence_probe(const ComplexPoly& P, const ProbeRegion& region, long pairs,
                                  std::uint64_t seed) {
    if (pairs < 1) throw std::invalid_argument("univalence_probe: need at least one pair");
    UnivalenceReport rep;
    rep.min_ratio = std::numeric_limits<double>::infinity();
    const Radii rad = admissible_radii(P);
    const int N = P.degree();
    SplitMix64 rng(seed);

    auto draw = [&]() -> cdbl {
        if (region.small_disk) {
            for (;;) {
                const double u = rng.uniform();
                const double phi = kTau * rng.uniform();
                const double rr = 0.5 * rad.R2 * std::sqrt(u);
                if (rr > 1e-12 * rad.R2) return rr * cdbl{std::cos(phi), std::sin(phi)};
            }
        }
        const double rr = 2.0 * rad.R1 + 8.0 * rad.R1 * rng.uniform();
        const double half = 3.141592653589793 / (2.0 * (N - 1));
        const double phi = region.theta + half * (2.0 * rng.uniform() - 1.0);
        return rr * cdbl{std::cos(phi), std::sin(phi)};
    };

    for (long i = 0; i < pairs; ++i) {
        cdbl z = draw(), zp = draw();
        while (z == zp) zp = draw();
        const double ratio = separation_ratio(P, z, zp);
        rep.min_ratio = std::min(rep.min_ratio, ratio);
        ++rep.pairs;
        if (!(ratio > 1e-12)) ++rep.failures;
    }
    rep.pass = rep.failures == 0;
    return rep;
}

} // namespace fastescape
