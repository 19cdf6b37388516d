#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>

namespace hashalloc {

// Neumaier-compensated accumulator. The scale-function series alternate with
// terms that grow before cancelling, so plain summation sheds digits.
class CompensatedSum {
public:
    void add(double v) {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v)) {
            comp_ += (sum_ - t) + v;
        } else {
            comp_ += (v - t) + sum_;
        }
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

// Bisection on [lo, hi] with f(lo) <= 0 <= f(hi). Returns the interval
// midpoint once its width drops below xtol.
template <class F>
double bisect_root(F f, double lo, double hi, double xtol = 1e-12, int max_iter = 200) {
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if (flo > 0.0 || fhi < 0.0) {
        throw std::invalid_argument("bisect_root: interval does not bracket a root");
    }
    for (int i = 0; i < max_iter && (hi - lo) > xtol; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// Golden-section maximization of a unimodal f on [lo, hi]; tolerance is on
// the argument. Returns (argmax, max) among all probed points.
template <class F>
std::pair<double, double> golden_section_max(F f, double lo, double hi, double xtol = 1e-6) {
    constexpr double invphi = 0.6180339887498949;
    double best_x = lo;
    double best_f = f(lo);
    const double fhi = f(hi);
    if (fhi > best_f) {
        best_x = hi;
        best_f = fhi;
    }
    double a = lo, b = hi;
    double x1 = b - invphi * (b - a);
    double x2 = a + invphi * (b - a);
    double f1 = f(x1);
    double f2 = f(x2);
    while (b - a > xtol) {
        if (f1 >= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = f(x2);
        }
        if (f1 > best_f) { best_x = x1; best_f = f1; }
        if (f2 > best_f) { best_x = x2; best_f = f2; }
    }
    return {best_x, best_f};
}

}  // namespace hashalloc
