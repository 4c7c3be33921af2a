#ifndef FLOORLINE_MATH_UTIL_HPP
#define FLOORLINE_MATH_UTIL_HPP

#include <cmath>

namespace floorline {

// Gaussian tail Q(x) = 0.5 erfc(x / sqrt(2)), evaluated in extended precision
// because error-floor arguments run far into the tail.
inline long double q_func(long double x) {
    return 0.5L * erfcl(x / 1.41421356237309504880168872420969808L);
}

// Pairwise check-node combination z = 2 atanh(tanh(x/2) tanh(y/2)) in the
// numerically stable log form. Unlike the literal tanh/atanh evaluation this
// does not saturate for large |x|, |y|.
inline double boxplus(double x, double y) {
    const double ax = std::fabs(x), ay = std::fabs(y);
    const double sgn = ((x < 0) != (y < 0)) ? -1.0 : 1.0;
    const double mn = ax < ay ? ax : ay;
    const double corr = std::log1p(std::exp(-(ax + ay))) - std::log1p(std::exp(-std::fabs(ax - ay)));
    return sgn * (mn + corr);
}

// Compensated accumulator for sums whose terms span many orders of magnitude.
class KahanSum {
public:
    void add(long double x) {
        long double y = x - c_;
        long double t = sum_ + y;
        c_ = (t - sum_) - y;
        sum_ = t;
    }
    long double value() const { return sum_; }
private:
    long double sum_ = 0.0L;
    long double c_ = 0.0L;
};

} // namespace floorline

#endif
