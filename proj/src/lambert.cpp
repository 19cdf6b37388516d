#include "hashalloc/lambert.hpp"

#include <cmath>
#include <stdexcept>

namespace hashalloc {

double lambert_w0(double z) {
    constexpr double kNegInvE = -0.36787944117144233;
    if (std::isnan(z)) return z;
    if (z < kNegInvE) {
        if (z > kNegInvE * (1.0 + 1e-12)) {
            z = kNegInvE;
        } else {
            throw std::domain_error("lambert_w0: argument below -1/e");
        }
    }
    if (z == 0.0) return 0.0;

    const double p2 = 2.0 * (1.0 + std::exp(1.0) * z);  // squared branch-point distance
    if (p2 <= 0.0) return -1.0;
    if (p2 < 1e-8) {
        // Branch-point series; Halley's denominator degenerates as w -> -1.
        const double p = std::sqrt(p2);
        return -1.0 + p - p2 / 3.0 + (11.0 / 72.0) * p * p2;
    }

    double w;
    if (z < -0.25) {
        const double p = std::sqrt(p2);
        w = -1.0 + p - p2 / 3.0 + (11.0 / 72.0) * p * p2;
    } else if (z < 3.0) {
        w = z < 0.5 ? z * (1.0 - z * (1.0 - 1.5 * z)) : std::log1p(z);
    } else {
        // Log-asymptotic guess, also safe where z*e^z-style arguments overflow.
        const double l1 = std::log(z);
        const double l2 = std::log(l1);
        w = l1 - l2 + l2 / l1;
    }

    for (int i = 0; i < 64; ++i) {
        const double ew = std::exp(w);
        const double f = w * ew - z;
        const double w1 = w + 1.0;
        const double denom = ew * w1 - (w + 2.0) * f / (2.0 * w1);
        const double dw = f / denom;
        w -= dw;
        if (std::abs(dw) <= 1e-16 * (1.0 + std::abs(w))) break;
    }
    return w;
}

}  // namespace hashalloc
