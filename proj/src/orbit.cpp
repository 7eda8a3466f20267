#include "fastescape/orbit.hpp"

#include "fastescape/highprec.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fastescape {

namespace {

constexpr double kEps = 2.220446049250313e-16;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// log of the smallest |cos| over the angle interval [theta - h, theta + h],
/// assuming the interval stays away from +-pi/2 (caller guarantees it).
double log_abs_cos_min(double theta, double h) {
    const double a = std::abs(std::cos(theta - h));
    const double b = std::abs(std::cos(theta + h));
    return std::log(std::min(a, b));
}

/// log of the largest |cos| over the same interval: 1 if the interval
/// contains a multiple of pi, else the larger endpoint.
double log_abs_cos_max(double theta, double h) {
    const double to_pi_mult = std::abs(std::remainder(theta, M_PI));
    if (to_pi_mult <= h) return 0.0;
    const double a = std::abs(std::cos(theta - h));
    const double b = std::abs(std::cos(theta + h));
    return std::log(std::max(a, b));
}

} // namespace

OrbitVerdict classify_orbit(const EntireMap& f, cdbl z0, int depth,
                            const ThresholdTower& tower, const OrbitOptions& opt) {
    if (depth < 0) throw std::invalid_argument("classify_orbit: depth must be nonnegative");

    OrbitVerdict v;
    v.depth = depth;
    v.margins.reserve(static_cast<size_t>(depth) + 1);

    enum class Phase { Value, Tower };
    Phase phase = Phase::Value;
    ExtComplex cur = ExtComplex::exact(z0, 0.0);
    TowerReal cur_log_mod; // valid in Phase::Tower: log |z_j|

    const int N1 = f.poly().degree() - 1;
    std::vector<PrefixStep> prefix;
    int prefix_bits = 0;

    // Build (or, if a later step turns out to need a sharper pass, rebuild)
    // the high-precision prefix with just enough working precision to pin
    // the given magnitude mod 2pi: ~log2(mag) bits to cross the integer
    // part plus headroom for the accumulated roundoff. Sizing the pass this
    // way instead of always using opt.prec_bits makes the common rescue --
    // one moderately large step -- orders of magnitude cheaper.
    auto ensure_prefix = [&](double need_log2) {
        int want = 128 + static_cast<int>(std::ceil(std::max(need_log2, 0.0)));
        want = std::max(want, 192);
        want = std::min(want, std::max(opt.prec_bits, 64));
        if (prefix_bits >= want) return;
        prefix = orbit_prefix_highprec(f.poly(), z0, depth, want);
        prefix_bits = want;
    };

    auto fail = [&](int j, double margin) {
        v.status = OrbitStatus::Failed;
        v.at = j;
        v.margins.push_back(margin);
        return v;
    };
    auto indeterminate = [&](int j) {
        v.status = OrbitStatus::IndeterminateAngle;
        v.at = j;
        v.margins.push_back(kNaN);
        return v;
    };

    for (int j = 0; j <= depth; ++j) {
        // --- check step j ---
        if (phase == Phase::Tower) {
            const TowerOrder ord = tower.compare_tower(cur_log_mod.exp_of(), j, opt.tie_tol);
            if (ord.ord < 0) return fail(j, ord.margin);
            v.margins.push_back(ord.margin);
        } else if (cur.is_exact()) {
            const TowerOrder ord = tower.compare_value(std::abs(cur.z.real()), j, opt.tie_tol);
            if (ord.ord < 0) return fail(j, ord.margin);
            v.margins.push_back(ord.margin);
        } else {
            // LogMag: first see whether even the full modulus clears x_j.
            const TowerOrder mod_ord = tower.compare_log(cur.log_mod, j, opt.tie_tol);
            if (mod_ord.ord < 0) return fail(j, mod_ord.margin);
            if (!cur.arg_trusted()) return indeterminate(j);
            const double h = cur.arg_err;
            const double axis_d = axis_distance(cur.arg);
            if (axis_d <= h + opt.axis_window) return indeterminate(j);
            const TowerOrder lo =
                tower.compare_log(cur.log_mod + log_abs_cos_min(cur.arg, h), j, opt.tie_tol);
            if (lo.ord >= 0) {
                v.margins.push_back(
                    tower.compare_log(cur.log_mod + std::log(std::abs(std::cos(cur.arg))), j, opt.tie_tol)
                        .margin);
            } else {
                const TowerOrder hi =
                    tower.compare_log(cur.log_mod + log_abs_cos_max(cur.arg, h), j, opt.tie_tol);
                if (hi.ord < 0) return fail(j, hi.margin);
                return indeterminate(j); // |Re| straddles the threshold within the error interval
            }
        }

        if (j == depth) break;

        // --- advance to step j + 1 ---
        if (phase == Phase::Tower) {
            // Magnitude alone cannot pick the left/right regime of the next
            // image; the honest answer is that the next check is undecidable.
            return indeterminate(j + 1);
        }

        if (cur.is_exact()) {
            // If forming the next angle would exhaust double accuracy, pull
            // the reduced imaginary part from the high-precision pass.
            const double im_abs = std::abs(cur.z.imag());
            const double next_arg_err =
                static_cast<double>(std::max(N1, 1)) * (cur.im_err + 4.0 * kEps * (im_abs + 1.0));
            if (!cur.has_im_mod() && next_arg_err > opt.arg_tol * 0.5 && opt.prec_bits > 0 && j >= 1) {
                // Size the pass by the whole point's magnitude: the prefix
                // recomputation stops once an iterate outgrows the budget,
                // so a request keyed to |Im| alone could stop short of z_j
                // (e.g. a real iterate whose tracked error ball is huge).
                ensure_prefix(std::log2(std::abs(cur.z) + 2.0));
                if (static_cast<int>(prefix.size()) >= j) {
                    cur.im_mod = prefix[static_cast<size_t>(j) - 1].im_mod;
                    cur.im_mod_err = prefix[static_cast<size_t>(j) - 1].im_mod_err;
                }
            }
            cur = f.apply(cur);
            continue;
        }

        // LogMag state.
        if (cur.log_mod <= 708.0) {
            if (opt.prec_bits > 0 && !cur.has_im_mod()) {
                ensure_prefix(cur.log_mod * 1.4426950408889634);
                if (static_cast<int>(prefix.size()) >= j) {
                    cur.im_mod = prefix[static_cast<size_t>(j) - 1].im_mod;
                    cur.im_mod_err = prefix[static_cast<size_t>(j) - 1].im_mod_err;
                }
            }
            cur = f.apply(cur);
            continue;
        }

        // Beyond double range: move to tower bookkeeping.  The check for
        // step j already passed, so the angle is trusted and bounded away
        // from +-pi/2; the sign of cos picks the regime.
        if (!cur.arg_trusted()) return indeterminate(j + 1);
        const double c = std::cos(cur.arg);
        const double axis_d = axis_distance(cur.arg);
        if (axis_d <= cur.arg_err + opt.axis_window) return indeterminate(j + 1);
        const double mu = cur.log_mod + std::log(std::abs(c)); // log |Re z_j|
        const double n1 = static_cast<double>(N1);
        TowerReal next_log;
        if (c > 0.0) {
            // log |z_{j+1}| = (N-1) |Re z_j| + log |aN| + o(1)
            next_log = TowerReal::from_log(mu).scaled(n1).shifted(std::log(std::abs(f.poly().head())));
        } else {
            // log |z_{j+1}| = |Re z_j| + log |a0| + o(1)
            next_log = TowerReal::from_log(mu).shifted(std::log(std::abs(f.poly().tail())));
        }
        phase = Phase::Tower;
        cur_log_mod = next_log;
    }

    v.status = OrbitStatus::Certified;
    v.at = -1;
    return v;
}

ShiftReport max_modulus_sequences(double R, double v0, int n_max) {
    if (!(R > 0.0) || !std::isfinite(R))
        throw std::invalid_argument("max_modulus_sequences: need finite R > 0");
    if (!std::isfinite(v0))
        throw std::invalid_argument("max_modulus_sequences: v0 must be finite");
    if (n_max < 0 || n_max > 1000000)
        throw std::invalid_argument("max_modulus_sequences: n_max out of range");

    ShiftReport rep;

    // Find the smallest l with v_l >= 2 R^2, iterating in plain doubles
    // (the sequence explodes immediately once it passes ~1).
    const double target = 2.0 * R * R;
    double vd = v0;
    int l = 0;
    while (vd < target && std::isfinite(vd)) {
        vd = std::exp(vd);
        ++l;
        if (l > 1000000) throw std::runtime_error("max_modulus_sequences: shift not found");
    }
    rep.shift = l;

    // Tower forms of both sequences.
    std::vector<TowerReal> u, v;
    u.push_back(TowerReal::from_value(R));
    v.push_back(TowerReal::from_value(v0));
    const int need_v = n_max + l;
    for (int n = 0; n < need_v; ++n) {
        // u_{n+1} = R e^{R u_n}
        if (n < n_max) u.push_back(u.back().scaled(R).exp_of().scaled(R));
        v.push_back(v.back().exp_of());
    }

    rep.verified = true;
    for (int n = 0; n <= n_max; ++n) {
        const TowerOrder ord = tower_compare(v[static_cast<size_t>(n + l)],
                                             u[static_cast<size_t>(n)].scaled(2.0 * R));
        rep.margins.push_back(ord.margin);
        if (ord.ord < 0) rep.verified = false;
    }

    // Log-scale prefixes while they are materializable.
    for (const TowerReal& t : u) {
        if (t.depth == 0 && t.value > 0.0) rep.log_u.push_back(std::log(t.value));
        else if (t.depth == 1) rep.log_u.push_back(t.value);
        else break;
    }
    for (const TowerReal& t : v) {
        if (t.depth == 0) {
            if (t.value > 0.0) rep.log_v.push_back(std::log(t.value));
            else rep.log_v.push_back(-std::numeric_limits<double>::infinity());
        } else if (t.depth == 1) {
            rep.log_v.push_back(t.value);
        } else {
            break;
        }
    }
    return rep;
}

} // namespace fastescape
