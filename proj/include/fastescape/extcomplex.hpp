#pragma once

#include "fastescape/complexpoly.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace fastescape {

/// Thrown when a value leaves the largest representation a routine supports
/// (e.g. materializing a log-magnitude value whose components overflow
/// double range).  Callers that can continue switch to tower bookkeeping.
struct RegimeOverflow : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Thrown when a derivative ratio is requested at a point where the
/// denominator vanishes to working precision.
struct SingularDerivative : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Absolute angle error above which a stored argument is no longer trusted
/// to locate the real axis direction of a value.
constexpr double kArgTrustTol = 1e-3;

/**
 * A complex value in one of two representations:
 *
 *  - Exact: an ordinary complex double `z`, with `im_err` an absolute error
 *    bound for its components (what limits downstream angle knowledge);
 *  - LogMag: (log_mod, arg) = (log |z|, Arg z in (-pi, pi]) with `arg_err`
 *    an absolute error bound on arg.
 *
 * Either representation may carry `im_mod`: a high-accuracy representative
 * of Im(z) mod 2pi in (-pi, pi] with its own error bound, used to keep
 * angle information alive where plain doubles have already lost it.  It is
 * NaN when not tracked.
 */
struct ExtComplex {
    enum class Repr { Exact, LogMag };

    Repr repr = Repr::Exact;
    cdbl z{0.0, 0.0};     // Exact payload
    double im_err = 0.0;  // Exact: absolute component error bound
    double log_mod = 0.0; // LogMag payload: log |z|
    double arg = 0.0;     // LogMag payload: Arg z in (-pi, pi]
    double arg_err = 0.0; // LogMag: absolute error bound on arg
    double im_mod = std::numeric_limits<double>::quiet_NaN();
    double im_mod_err = 0.0;

    static ExtComplex exact(cdbl v, double im_err = 0.0);
    static ExtComplex logmag(double log_mod, double arg, double arg_err);

    bool is_exact() const { return repr == Repr::Exact; }
    bool arg_trusted() const { return !is_exact() && arg_err <= kArgTrustTol; }
    bool has_im_mod() const { return !std::isnan(im_mod); }

    /// log |z| in either representation.
    double abs_log() const;
};

/// x reduced modulo 2pi into (-pi, pi], together with an absolute error
/// bound (grows like |x| * eps: for |x| beyond ~1e12 the result no longer
/// pins the angle and the error bound says so).
struct ReducedAngle {
    double value;
    double err;
};
ReducedAngle reduce_mod_tau(double x);

/// Wrap an angle of moderate size (|theta| up to a few thousand) into
/// (-pi, pi].
double wrap_angle(double theta);

/// Circle distance from theta (in (-pi, pi]) to the nearest of +-pi/2,
/// i.e. how far the direction is from the imaginary axis.
double axis_distance(double theta);

/**
 * The entire function f(z) = P(e^z) / e^z = sum_k a_k e^{(k-1) z}.
 *
 * apply() evaluates one step in whichever representation the size of the
 * result demands: results stay Exact while log |f| <= switch_threshold,
 * move to LogMag above it, and throw RegimeOverflow once even the LogMag
 * input's components exceed double range (log |z| > 708).  All error
 * bounds (im_err / arg_err) are propagated honestly; no silent loss of
 * angle information occurs.
 */
class EntireMap {
public:
    explicit EntireMap(ComplexPoly P, double switch_threshold = 300.0);

    const ComplexPoly& poly() const { return P_; }
    double switch_threshold() const { return switch_; }

    /// One application of f with representation dispatch.
    ExtComplex apply(const ExtComplex& v) const;

    /// One application of f' = sum_k (k-1) a_k e^{(k-1) z} with the same
    /// representation dispatch and error bookkeeping as apply().
    ExtComplex apply_derivative(const ExtComplex& v) const;

    /// Evaluation through the dominant-exponential expansion regardless of
    /// whether the direct sum would still fit; |Re z| must be large enough
    /// that the subordinate terms are genuinely small (|Re z| >= 2 is ample
    /// for the expansions to converge).  Used to cross-check the two
    /// evaluation regimes against each other on their overlap.
    ExtComplex apply_asymptotic(cdbl z) const;

    /// Direct evaluation for values whose image still fits in a complex
    /// double; throws RegimeOverflow otherwise.
    cdbl apply_exact(cdbl z) const;

    /// f'(z) = sum_k (k-1) a_k e^{(k-1) z}, direct regime only.
    cdbl derivative(cdbl z) const;

    /// log |f'(z)| in any regime (asymptotic forms for |Re z| deep).
    double log_abs_derivative(cdbl z) const;

    /// f''(z) / f'(z); approaches N-1 far right and -1 far left.  Throws
    /// SingularDerivative where f' vanishes to working precision.
    cdbl log_derivative_ratio(cdbl z) const;

    /// True when every term a_k e^{(k-1) z} for this Re z fits comfortably
    /// in a double (the direct summation regime).
    bool direct_ok(double re) const;

private:
    ExtComplex apply_exact_repr(const ExtComplex& v) const;
    ExtComplex deep_repr(double re, double imr, double imr_err) const;
    ExtComplex materialize_input(const ExtComplex& v) const;

    ComplexPoly P_;
    double switch_;
    double logK_; // log of max coefficient modulus
};

} // namespace fastescape
