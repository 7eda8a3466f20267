#include "fastescape/tower.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fastescape {

namespace {

constexpr double kLn2 = 0.6931471805599453;
constexpr double kMaterializeLimit = 700.0; // exp(700) is still a finite double
constexpr double kInf = std::numeric_limits<double>::infinity();

TowerReal canonical(int depth, double value) {
    while (depth >= 1 && value <= kMaterializeLimit) {
        value = std::exp(value);
        --depth;
    }
    return TowerReal{depth, value};
}

} // namespace

TowerReal TowerReal::from_value(double v) { return TowerReal{0, v}; }

TowerReal TowerReal::from_log(double lg) { return canonical(1, lg); }

TowerReal TowerReal::exp_of() const { return canonical(depth + 1, value); }

TowerReal TowerReal::log_of() const {
    if (depth >= 1) return TowerReal{depth - 1, value};
    if (!(value > 0.0)) throw std::domain_error("TowerReal::log_of: value not positive");
    return TowerReal{0, std::log(value)};
}

TowerReal TowerReal::scaled(double factor) const {
    if (!(factor > 0.0)) throw std::domain_error("TowerReal::scaled: factor must be positive");
    if (depth == 0) return TowerReal{0, value * factor};
    // x * s = exp(log x + log s)
    return log_of().shifted(std::log(factor)).exp_of();
}

TowerReal TowerReal::shifted(double delta) const {
    if (depth == 0) return TowerReal{0, value + delta};
    // Canonical deep tower: the number exceeds e^700 ~ 1e304, so any shift
    // up to 1e280 lands below one ulp of it.
    if (std::abs(delta) <= 1e280) return *this;
    throw std::domain_error("TowerReal::shifted: shift not negligible at tower magnitude");
}

TowerOrder tower_compare(TowerReal a, TowerReal b, double tol) {
    // Descend through logs on both sides at once; log is monotone and both
    // sides are positive whenever depth >= 1, so order is preserved.
    while (a.depth >= 1 || b.depth >= 1) {
        if (a.depth >= 1 && b.depth >= 1) {
            --a.depth;
            --b.depth;
            continue;
        }
        TowerReal& shallow = (a.depth == 0) ? a : b;
        TowerReal& deep = (a.depth == 0) ? b : a;
        const double sign = (a.depth == 0) ? -1.0 : 1.0; // sign of (deep side wins)
        if (shallow.value <= 0.0) {
            // deep side is > e^700 > 0 >= shallow
            return TowerOrder{(a.depth == 0) ? -1 : 1, sign * kInf};
        }
        shallow.value = std::log(shallow.value);
        --deep.depth;
    }
    const double diff = a.value - b.value;
    const double scale = std::max({1.0, std::abs(a.value), std::abs(b.value)});
    if (std::abs(diff) <= tol * scale) return TowerOrder{0, diff};
    return TowerOrder{diff < 0.0 ? -1 : 1, diff};
}

ThresholdTower::ThresholdTower(double x0) : x0_(x0) {
    if (!(x0 >= 6.0 * kLn2))
        throw std::invalid_argument("ThresholdTower: need x0 >= 6 log 2");
}

TowerReal ThresholdTower::level(int k) const {
    if (k < 0) throw std::invalid_argument("ThresholdTower::level: k must be nonnegative");
    TowerReal x = TowerReal::from_value(x0_);
    for (int i = 0; i < k; ++i) x = x.scaled(0.5).exp_of().scaled(2.0);
    return x;
}

TowerOrder ThresholdTower::compare_value(double v, int k, double tol) const {
    return tower_compare(TowerReal::from_value(v), level(k), tol);
}

TowerOrder ThresholdTower::compare_log(double log_v, int k, double tol) const {
    return tower_compare(TowerReal::from_log(log_v), level(k), tol);
}

TowerOrder ThresholdTower::compare_tower(const TowerReal& v, int k, double tol) const {
    return tower_compare(v, level(k), tol);
}

} // namespace fastescape
