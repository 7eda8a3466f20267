#include "fastescape/extcomplex.hpp"

#include <algorithm>

namespace fastescape {

namespace {

constexpr double kEps = 2.220446049250313e-16; // 2^-52
constexpr double kTau = 6.283185307179586;     // 2*pi rounded to double
// 2*pi split into three non-overlapping pieces, hi+mid+lo ~ 2*pi to ~150 bits.
constexpr double kTauHi = 6.283185307179586232;
constexpr double kTauMid = 2.4492935982947064e-16;
constexpr double kTauLo = -5.9893396195994689e-33;
constexpr double kPi = 3.141592653589793;
// Largest per-term exponent we allow in the direct summation regime;
// exp(690) ~ 1e299 leaves headroom for coefficient sizes and sums.
constexpr double kDirectExpLimit = 690.0;
// Beyond this log-magnitude even the components of a value overflow doubles.
constexpr double kLogMagLimit = 708.0;

} // namespace

ExtComplex ExtComplex::exact(cdbl v, double im_err) {
    ExtComplex e;
    e.repr = Repr::Exact;
    e.z = v;
    e.im_err = im_err;
    return e;
}

ExtComplex ExtComplex::logmag(double log_mod, double arg, double arg_err) {
    ExtComplex e;
    e.repr = Repr::LogMag;
    e.log_mod = log_mod;
    e.arg = arg;
    e.arg_err = std::min(arg_err, 4.0); // beyond a full turn the bound is moot
    return e;
}

double ExtComplex::abs_log() const {
    if (repr == Repr::LogMag) return log_mod;
    return std::log(std::abs(z));
}

ReducedAngle reduce_mod_tau(double x) {
    const double k = std::nearbyint(x * (1.0 / kTau));
    double r = x - k * kTauHi;
    r -= k * kTauMid;
    r -= k * kTauLo;
    // k was rounded from a possibly inexact quotient; fold any leftover
    // whole turns and land in (-pi, pi].
    r = std::remainder(r, kTau);
    if (r <= -kPi) r += kTau;
    const double err = 4.0 * kEps * (std::abs(x) + 1.0);
    return ReducedAngle{r, err};
}

double wrap_angle(double theta) {
    double r = std::remainder(theta, kTau);
    if (r <= -kPi) r += kTau;
    return r;
}

double axis_distance(double theta) {
    const double d1 = std::abs(std::remainder(theta - kPi / 2.0, kTau));
    const double d2 = std::abs(std::remainder(theta + kPi / 2.0, kTau));
    return std::min(d1, d2);
}

EntireMap::EntireMap(ComplexPoly P, double switch_threshold)
    : P_(std::move(P)), switch_(switch_threshold), logK_(std::log(P_.coeff_max())) {
    if (!(switch_ > 0.0) || switch_ > 690.0)
        throw std::invalid_argument("EntireMap: switch threshold must lie in (0, 690]");
}

bool EntireMap::direct_ok(double re) const {
    const double n1 = static_cast<double>(P_.degree() - 1);
    const double emax = std::max({n1 * re, -re, 0.0});
    return emax + logK_ <= kDirectExpLimit;
}

namespace {

/// Accumulates f, |terms|, f' and |f' terms| in one pass of the direct sum.
struct DirectSums {
    cdbl f{0.0, 0.0};
    double f_abs = 0.0; // sum of term moduli
    cdbl fp{0.0, 0.0};
    double fp_abs = 0.0;
};

DirectSums direct_sums(const ComplexPoly& P, cdbl z) {
    const int N = P.degree();
    DirectSums s;
    const cdbl E = std::exp(z);
    // k = 0 term uses e^{-z}; higher terms accumulate powers of E.
    cdbl Em = std::exp(-z);
    {
        const cdbl t = P.coeff(0) * Em;
        s.f += t;
        s.f_abs += std::abs(t);
        s.fp += -t;
        s.fp_abs += std::abs(t);
    }
    cdbl pw{1.0, 0.0}; // E^{k-1} for k = 1
    for (int k = 1; k <= N; ++k) {
        const cdbl t = P.coeff(k) * pw;
        s.f += t;
        s.f_abs += std::abs(t);
        const double m = static_cast<double>(k - 1);
        s.fp += m * t;
        s.fp_abs += std::abs(m * t);
        pw *= E;
    }
    return s;
}

} // namespace

ExtComplex EntireMap::apply_exact_repr(const ExtComplex& v) const {
    const double re = v.z.real();
    const double im = v.z.imag();

    if (direct_ok(re)) {
        const DirectSums s = direct_sums(P_, v.z);
        // Component error: local roundoff plus the input error pushed
        // through the derivative magnitude.
        const double err = s.f_abs * 16.0 * kEps + s.fp_abs * v.im_err;
        const double ab = std::abs(s.f);
        if (ab > 0.0 && std::log(ab) > switch_) {
            const double arg_err = err / ab + 8.0 * kEps;
            return ExtComplex::logmag(std::log(ab), std::arg(s.f), arg_err);
        }
        return ExtComplex::exact(s.f, err);
    }

    // Deep regimes: one exponential dominates and the rest is a tiny
    // relative correction.
    double imr, imr_err;
    if (v.has_im_mod()) {
        imr = v.im_mod;
        imr_err = v.im_mod_err;
    } else {
        const ReducedAngle red = reduce_mod_tau(im);
        imr = red.value;
        imr_err = red.err + v.im_err;
    }
    return deep_repr(re, imr, imr_err);
}

ExtComplex EntireMap::deep_repr(double re, double imr, double imr_err) const {
    const int N = P_.degree();
    const double n1 = static_cast<double>(N - 1);

    if (re > 0.0) {
        // f = aN e^{(N-1) z} (1 + phi), phi = sum_{k<N} (a_k / aN) e^{(k-N) z}
        cdbl phi{0.0, 0.0};
        double phi_abs = 0.0;
        for (int k = 0; k < N; ++k) {
            const double mexp = static_cast<double>(k - N) * re;
            if (mexp < -745.0) continue; // underflows to zero
            const double ang = wrap_angle(static_cast<double>(k - N) * imr);
            const cdbl term = (P_.coeff(k) / P_.head()) * std::exp(mexp) * cdbl{std::cos(ang), std::sin(ang)};
            phi += term;
            phi_abs += std::abs(term);
        }
        const double lm = std::log(std::abs(P_.head())) + n1 * re + std::log(std::abs(cdbl{1.0, 0.0} + phi));
        const double theta = wrap_angle(std::arg(P_.head()) + wrap_angle(n1 * imr) + std::arg(cdbl{1.0, 0.0} + phi));
        const double aerr = n1 * imr_err + 2.0 * phi_abs + 16.0 * kEps;
        if (lm <= switch_) {
            // Only possible for tiny coefficients; materialize.
            const cdbl val = std::exp(lm) * cdbl{std::cos(theta), std::sin(theta)};
            return ExtComplex::exact(val, std::exp(lm) * (aerr + 4.0 * kEps));
        }
        return ExtComplex::logmag(lm, theta, aerr);
    }

    // re < 0: f = a0 e^{-z} (1 + psi), psi = sum_{k>=1} (a_k / a0) e^{k z}
    cdbl psi{0.0, 0.0};
    double psi_abs = 0.0;
    for (int k = 1; k <= N; ++k) {
        const double mexp = static_cast<double>(k) * re;
        if (mexp < -745.0) continue;
        const double ang = wrap_angle(static_cast<double>(k) * imr);
        const cdbl term = (P_.coeff(k) / P_.tail()) * std::exp(mexp) * cdbl{std::cos(ang), std::sin(ang)};
        psi += term;
        psi_abs += std::abs(term);
    }
    const double lm = std::log(std::abs(P_.tail())) - re + std::log(std::abs(cdbl{1.0, 0.0} + psi));
    const double theta = wrap_angle(std::arg(P_.tail()) - imr + std::arg(cdbl{1.0, 0.0} + psi));
    const double aerr = imr_err + 2.0 * psi_abs + 16.0 * kEps;
    if (lm <= switch_) {
        const cdbl val = std::exp(lm) * cdbl{std::cos(theta), std::sin(theta)};
        return ExtComplex::exact(val, std::exp(lm) * (aerr + 4.0 * kEps));
    }
    return ExtComplex::logmag(lm, theta, aerr);
}

ExtComplex EntireMap::materialize_input(const ExtComplex& v) const {
    if (v.log_mod > kLogMagLimit)
        throw RegimeOverflow("EntireMap: log-magnitude input exceeds double range");

    // Materialize the LogMag value so the Exact path can be reused.  The
    // component error reflects both the angle uncertainty and the log scale.
    const double mag = std::exp(v.log_mod);
    const cdbl z{mag * std::cos(v.arg), mag * std::sin(v.arg)};
    ExtComplex e = ExtComplex::exact(z, mag * (v.arg_err + (std::abs(v.log_mod) + 2.0) * kEps));
    if (v.has_im_mod()) {
        e.im_mod = v.im_mod;
        e.im_mod_err = v.im_mod_err;
    }
    return e;
}

ExtComplex EntireMap::apply(const ExtComplex& v) const {
    if (v.is_exact()) return apply_exact_repr(v);
    return apply_exact_repr(materialize_input(v));
}

ExtComplex EntireMap::apply_asymptotic(cdbl z) const {
    const ReducedAngle red = reduce_mod_tau(z.imag());
    return deep_repr(z.real(), red.value, red.err);
}

ExtComplex EntireMap::apply_derivative(const ExtComplex& vin) const {
    const ExtComplex v = vin.is_exact() ? vin : materialize_input(vin);
    const int N = P_.degree();
    const double n1 = static_cast<double>(N - 1);
    const double re = v.z.real();

    if (direct_ok(re)) {
        const DirectSums s = direct_sums(P_, v.z);
        // f'' term moduli bound how the input error moves the derivative.
        double fpp_abs = 0.0;
        {
            const double E = std::exp(re);
            double pw = 1.0, Ek = std::exp(-re);
            fpp_abs += std::abs(P_.coeff(0)) * Ek;
            for (int k = 1; k <= N; ++k) {
                const double m = static_cast<double>(k - 1);
                fpp_abs += m * m * std::abs(P_.coeff(k)) * pw;
                pw *= E;
            }
        }
        const double err = s.fp_abs * 16.0 * kEps + fpp_abs * v.im_err;
        const double ab = std::abs(s.fp);
        if (ab > 0.0 && std::log(ab) > switch_) {
            const double arg_err = err / ab + 8.0 * kEps;
            return ExtComplex::logmag(std::log(ab), std::arg(s.fp), arg_err);
        }
        return ExtComplex::exact(s.fp, err);
    }

    double imr, imr_err;
    if (v.has_im_mod()) {
        imr = v.im_mod;
        imr_err = v.im_mod_err;
    } else {
        const ReducedAngle red = reduce_mod_tau(v.z.imag());
        imr = red.value;
        imr_err = red.err + v.im_err;
    }

    if (re > 0.0) {
        // f' = (N-1) aN e^{(N-1) z} (1 + delta)
        cdbl delta{0.0, 0.0};
        double delta_abs = 0.0;
        for (int k = 0; k < N; ++k) {
            if (k == 1) continue;
            const double mexp = static_cast<double>(k - N) * re;
            if (mexp < -745.0) continue;
            const double ang = wrap_angle(static_cast<double>(k - N) * imr);
            const cdbl term = (static_cast<double>(k - 1) * P_.coeff(k)) / (n1 * P_.head()) * std::exp(mexp) *
                              cdbl{std::cos(ang), std::sin(ang)};
            delta += term;
            delta_abs += std::abs(term);
        }
        const double lm = std::log(n1 * std::abs(P_.head())) + n1 * re + std::log(std::abs(cdbl{1.0, 0.0} + delta));
        const double theta = wrap_angle(std::arg(P_.head()) + wrap_angle(n1 * imr) + std::arg(cdbl{1.0, 0.0} + delta));
        const double aerr = n1 * imr_err + 2.0 * delta_abs + 16.0 * kEps;
        return ExtComplex::logmag(lm, theta, aerr);
    }

    // f' = -a0 e^{-z} (1 + delta'), delta' = sum_{k>=2} (k-1) a_k / (-a0) e^{k z}
    cdbl delta{0.0, 0.0};
    double delta_abs = 0.0;
    for (int k = 2; k <= N; ++k) {
        const double mexp = static_cast<double>(k) * re;
        if (mexp < -745.0) continue;
        const double ang = wrap_angle(static_cast<double>(k) * imr);
        const cdbl term = (static_cast<double>(k - 1) * P_.coeff(k)) / (-P_.tail()) * std::exp(mexp) *
                          cdbl{std::cos(ang), std::sin(ang)};
        delta += term;
        delta_abs += std::abs(term);
    }
    const double lm = std::log(std::abs(P_.tail())) - re + std::log(std::abs(cdbl{1.0, 0.0} + delta));
    const double theta = wrap_angle(std::arg(-P_.tail()) - imr + std::arg(cdbl{1.0, 0.0} + delta));
    const double aerr = imr_err + 2.0 * delta_abs + 16.0 * kEps;
    return ExtComplex::logmag(lm, theta, aerr);
}

cdbl EntireMap::apply_exact(cdbl z) const {
    const ExtComplex r = apply(ExtComplex::exact(z));
    if (r.is_exact()) return r.z;
    if (r.log_mod > kLogMagLimit)
        throw RegimeOverflow("EntireMap::apply_exact: result exceeds double range");
    const double mag = std::exp(r.log_mod);
    return cdbl{mag * std::cos(r.arg), mag * std::sin(r.arg)};
}

cdbl EntireMap::derivative(cdbl z) const {
    if (!direct_ok(z.real()))
        throw RegimeOverflow("EntireMap::derivative: outside the direct regime");
    return direct_sums(P_, z).fp;
}

double EntireMap::log_abs_derivative(cdbl z) const {
    const int N = P_.degree();
    const double n1 = static_cast<double>(N - 1);
    const double re = z.real();
    if (direct_ok(re)) {
        const double a = std::abs(direct_sums(P_, z).fp);
        return std::log(a); // -inf at a genuine zero of f'
    }
    if (re > 0.0) {
        // f' = (N-1) aN e^{(N-1) z} (1 + delta)
        cdbl delta{0.0, 0.0};
        for (int k = 0; k < N; ++k) {
            if (k == 1) continue;
            const double mexp = static_cast<double>(k - N) * re;
            if (mexp < -745.0) continue;
            const double ang = wrap_angle(static_cast<double>(k - N) * reduce_mod_tau(z.imag()).value);
            delta += (static_cast<double>(k - 1) * P_.coeff(k)) / (n1 * P_.head()) * std::exp(mexp) *
                     cdbl{std::cos(ang), std::sin(ang)};
        }
        return std::log(n1 * std::abs(P_.head())) + n1 * re + std::log(std::abs(cdbl{1.0, 0.0} + delta));
    }
    // f' = -a0 e^{-z} (1 + delta'), delta' = sum_{k>=2} (k-1) a_k / (-a0) e^{k z}
    cdbl delta{0.0, 0.0};
    for (int k = 2; k <= N; ++k) {
        const double mexp = static_cast<double>(k) * re;
        if (mexp < -745.0) continue;
        const double ang = wrap_angle(static_cast<double>(k) * reduce_mod_tau(z.imag()).value);
        delta += (static_cast<double>(k - 1) * P_.coeff(k)) / (-P_.tail()) * std::exp(mexp) *
                 cdbl{std::cos(ang), std::sin(ang)};
    }
    return std::log(std::abs(P_.tail())) - re + std::log(std::abs(cdbl{1.0, 0.0} + delta));
}

cdbl EntireMap::log_derivative_ratio(cdbl z) const {
    const int N = P_.degree();
    const double re = z.real();
    if (direct_ok(re)) {
        const DirectSums s = direct_sums(P_, z);
        // f'' = sum (k-1)^2 a_k e^{(k-1) z}; accumulate alongside a scale.
        cdbl f2{0.0, 0.0};
        const cdbl E = std::exp(z);
        cdbl t0 = P_.coeff(0) * std::exp(-z);
        f2 += t0;
        cdbl pw{1.0, 0.0};
        for (int k = 1; k <= N; ++k) {
            const double m = static_cast<double>(k - 1);
            f2 += m * m * P_.coeff(k) * pw;
            pw *= E;
        }
        if (std::abs(s.fp) <= 1e-14 * s.fp_abs)
            throw SingularDerivative("log_derivative_ratio: f' vanishes to working precision");
        return f2 / s.fp;
    }
    const double imr = reduce_mod_tau(z.imag()).value;
    if (re > 0.0) {
        // Scale both sums by e^{(N-1) z}: u_k = e^{(k-N) z} are tiny.
        cdbl num{0.0, 0.0}, den{0.0, 0.0};
        for (int k = 0; k <= N; ++k) {
            const double m = static_cast<double>(k - 1);
            cdbl u{1.0, 0.0};
            if (k < N) {
                const double mexp = static_cast<double>(k - N) * re;
                if (mexp < -745.0) continue;
                const double ang = wrap_angle(static_cast<double>(k - N) * imr);
                u = std::exp(mexp) * cdbl{std::cos(ang), std::sin(ang)};
            }
            num += m * m * P_.coeff(k) * u;
            den += m * P_.coeff(k) * u;
        }
        return num / den;
    }
    cdbl num{0.0, 0.0}, den{0.0, 0.0};
    for (int k = 0; k <= N; ++k) {
        const double m = static_cast<double>(k - 1);
        cdbl u{1.0, 0.0};
        if (k > 0) {
            const double mexp = static_cast<double>(k) * re;
            if (mexp < -745.0) continue;
            const double ang = wrap_angle(static_cast<double>(k) * imr);
            u = std::exp(mexp) * cdbl{std::cos(ang), std::sin(ang)};
        }
        num += m * m * P_.coeff(k) * u;
        den += m * P_.coeff(k) * u;
    }
    return num / den;
}

} // namespace fastescape
