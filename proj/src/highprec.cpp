#include "fastescape/highprec.hpp"

#include <mpfr.h>

#include <algorithm>
#include <cmath>

namespace fastescape {

namespace {

/// Minimal complex wrapper over a pair of mpfr_t, enough for the
/// exponential-sum evaluation below.
struct MpfrComplex {
    mpfr_t re, im;
    explicit MpfrComplex(mpfr_prec_t prec) {
        mpfr_init2(re, prec);
        mpfr_init2(im, prec);
        mpfr_set_zero(re, 1);
        mpfr_set_zero(im, 1);
    }
    MpfrComplex(const MpfrComplex&) = delete;
    MpfrComplex& operator=(const MpfrComplex&) = delete;
    ~MpfrComplex() {
        mpfr_clear(re);
        mpfr_clear(im);
    }
    void set(cdbl v) {
        mpfr_set_d(re, v.real(), MPFR_RNDN);
        mpfr_set_d(im, v.imag(), MPFR_RNDN);
    }
};

} // namespace

std::vector<PrefixStep> orbit_prefix_highprec(const ComplexPoly& P, cdbl z0,
                                              int steps, int bits) {
    std::vector<PrefixStep> out;
    if (steps <= 0 || bits < 64) return out;
    const mpfr_prec_t prec = static_cast<mpfr_prec_t>(bits);
    const int N = P.degree();

    MpfrComplex z(prec), acc(prec), term(prec), pw(prec), coeff(prec);
    mpfr_t ex, s, c, t1, t2, tau, mag;
    mpfr_init2(ex, prec);
    mpfr_init2(s, prec);
    mpfr_init2(c, prec);
    mpfr_init2(t1, prec);
    mpfr_init2(t2, prec);
    mpfr_init2(tau, prec);
    mpfr_init2(mag, prec);
    mpfr_const_pi(tau, MPFR_RNDN);
    mpfr_mul_ui(tau, tau, 2, MPFR_RNDN);

    z.set(z0);

    auto cmul = [&](MpfrComplex& a, const MpfrComplex& b) {
        // a *= b, using t1/t2 as scratch
        mpfr_mul(t1, a.re, b.re, MPFR_RNDN);
        mpfr_mul(t2, a.im, b.im, MPFR_RNDN);
        mpfr_sub(t1, t1, t2, MPFR_RNDN);
        mpfr_mul(t2, a.re, b.im, MPFR_RNDN);
        mpfr_swap(a.re, t1);
        mpfr_mul(t1, a.im, b.re, MPFR_RNDN);
        mpfr_add(a.im, t2, t1, MPFR_RNDN);
    };

    for (int step = 1; step <= steps; ++step) {
        // Predict the output size before paying for the step: the dominant
        // term is a_N e^{(N-1)z} on the right half plane and a_0 e^{-z} on
        // the left, so the result exponent is about max((N-1)Re z, -Re z)
        // in log2 units. If that already exceeds the precision budget the
        // step below would be discarded anyway -- and at large |Re z| it is
        // by far the most expensive call in the whole pipeline.
        const double re_d = mpfr_get_d(z.re, MPFR_RNDN);
        const double grow = std::max(static_cast<double>(std::max(N - 1, 1)) * std::max(re_d, 0.0),
                                     std::max(-re_d, 0.0));
        if (grow * 1.4426950408889634 > static_cast<double>(bits - 40)) break;

        // E = e^{z}; Em = e^{-z}; accumulate sum a_k E^{k-1}.
        MpfrComplex E(prec), Em(prec);
        mpfr_exp(ex, z.re, MPFR_RNDN);
        mpfr_sin_cos(s, c, z.im, MPFR_RNDN);
        mpfr_mul(E.re, ex, c, MPFR_RNDN);
        mpfr_mul(E.im, ex, s, MPFR_RNDN);
        mpfr_neg(t1, z.re, MPFR_RNDN);
        mpfr_exp(ex, t1, MPFR_RNDN);
        mpfr_mul(Em.re, ex, c, MPFR_RNDN);
        mpfr_neg(t1, s, MPFR_RNDN);
        mpfr_mul(Em.im, ex, t1, MPFR_RNDN);

        // acc = a0 * Em
        coeff.set(P.coeff(0));
        mpfr_set(acc.re, coeff.re, MPFR_RNDN);
        mpfr_set(acc.im, coeff.im, MPFR_RNDN);
        cmul(acc, Em);

        // pw = 1; for k = 1..N: acc += a_k * pw; pw *= E
        mpfr_set_ui(pw.re, 1, MPFR_RNDN);
        mpfr_set_zero(pw.im, 1);
        for (int k = 1; k <= N; ++k) {
            coeff.set(P.coeff(k));
            cmul(coeff, pw);
            mpfr_add(acc.re, acc.re, coeff.re, MPFR_RNDN);
            mpfr_add(acc.im, acc.im, coeff.im, MPFR_RNDN);
            if (k < N) cmul(pw, E);
        }

        mpfr_set(z.re, acc.re, MPFR_RNDN);
        mpfr_set(z.im, acc.im, MPFR_RNDN);

        // Magnitude check: stop once the precision budget no longer pins
        // Im z mod 2pi.
        mpfr_abs(t1, z.re, MPFR_RNDN);
        mpfr_abs(t2, z.im, MPFR_RNDN);
        mpfr_max(mag, t1, t2, MPFR_RNDN);
        const long e = (mpfr_zero_p(mag) != 0) ? 0 : mpfr_get_exp(mag);
        if (e > static_cast<long>(bits) - 60) break;

        PrefixStep st;
        st.value = cdbl{mpfr_get_d(z.re, MPFR_RNDN), mpfr_get_d(z.im, MPFR_RNDN)};
        mpfr_remainder(t1, z.im, tau, MPFR_RNDN);
        st.im_mod = mpfr_get_d(t1, MPFR_RNDN);
        // Error: the value carries (step count) * 2^{e - bits + guard} of
        // accumulated roundoff relative to its own magnitude.
        st.im_mod_err = static_cast<double>(step) *
                        std::ldexp(1.0, static_cast<int>(std::min<long>(e, 1 << 20)) - bits + 24);
        out.push_back(st);
    }

    mpfr_clears(ex, s, c, t1, t2, tau, mag, static_cast<mpfr_ptr>(nullptr));
    return out;
}

} // namespace fastescape
