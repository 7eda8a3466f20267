#pragma once

namespace fastescape {

/**
 * A real number stored as an iterated exponential,
 *
 *     (depth, value)  ==  exp(exp(... exp(value)))   [depth times],
 *
 * so magnitudes far beyond double range (towers like 2 e^{e^{e^{x}}/2})
 * stay comparable.  Representations are kept canonical: the stack of exps
 * is materialized down into `value` while that stays a finite double, so
 * depth >= 1 implies value > 700 (the number itself exceeds e^700).
 *
 * depth == 0 holds an arbitrary real; depth >= 1 is always positive.
 */
struct TowerReal {
    int depth = 0;
    double value = 0.0;

    static TowerReal from_value(double v);
    static TowerReal from_log(double lg);

    TowerReal exp_of() const;                 // e^x
    TowerReal log_of() const;                 // log x; requires x > 0
    TowerReal scaled(double factor) const;    // x * factor; factor > 0
    /// x + delta.  Once x > e^700 any |delta| <= 1e280 is absorbed without
    /// effect (it is below the representation's resolution); larger shifts
    /// at such magnitudes are rejected.
    TowerReal shifted(double delta) const;

    bool positive() const { return depth >= 1 || value > 0.0; }
};

struct TowerOrder {
    int ord;        // -1, 0, +1 for a < b, a == b (within tol), a > b
    double margin;  // a - b at the level where the comparison resolved;
                    // +-inf when the gap exceeds e^700 at that level
};

/**
 * Compare two tower-represented reals by descending through logs
 * simultaneously.  Ties are declared when the values at the decisive level
 * agree within tol * max(1, |a|, |b|).
 */
TowerOrder tower_compare(TowerReal a, TowerReal b, double tol = 1e-12);

/**
 * The escape threshold tower x_0 = x0, x_{k+1} = 2 exp(x_k / 2).
 * Requires x0 >= 6 log 2 (which makes the sequence strictly increasing).
 */
class ThresholdTower {
public:
    explicit ThresholdTower(double x0);

    double x0() const { return x0_; }
    /// x_k as a TowerReal (computed on the fly; instances are immutable and
    /// safe to share across threads).
    TowerReal level(int k) const;

    TowerOrder compare_value(double v, int k, double tol = 1e-12) const;
    TowerOrder compare_log(double log_v, int k, double tol = 1e-12) const;
    TowerOrder compare_tower(const TowerReal& v, int k, double tol = 1e-12) const;

private:
    double x0_;
};

} // namespace fastescape
