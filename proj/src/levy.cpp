#include "hashalloc/levy.hpp"

#include <cmath>
#include <stdexcept>

#include "hashalloc/lambert.hpp"
#include "hashalloc/numerics.hpp"

namespace hashalloc {

namespace {

double psi_prime(const CompoundPoissonModel& m, double theta) {
    double s = 0.0;
    for (const auto& a : m.atoms()) {
        s += a.probability * a.jump_size * std::exp(-a.jump_size * theta);
    }
    return m.drift() - m.total_intensity() * s;
}

}  // namespace

double laplace_exponent(const CompoundPoissonModel& model, double theta) {
    if (!std::isfinite(theta)) throw std::invalid_argument("laplace_exponent: theta must be finite");
    double jump_part = 0.0;
    for (const auto& a : model.atoms()) {
        jump_part += a.probability * std::expm1(-a.jump_size * theta);
    }
    return model.drift() * theta + model.total_intensity() * jump_part;
}

double psi_prime_zero(const CompoundPoissonModel& model) {
    return model.drift() - model.total_intensity() * model.mean_jump();
}

bool net_profit_condition(const CompoundPoissonModel& model) {
    return model.total_intensity() * model.mean_jump() > model.drift();
}

double phi(const CompoundPoissonModel& model, double q) {
    if (!(q >= 0.0)) throw std::invalid_argument("phi: q must be >= 0");
    const double slope0 = psi_prime_zero(model);
    if (q == 0.0 && slope0 >= 0.0) return 0.0;  // largest nonnegative root is 0

    // psi is convex; bracket from its minimizer so the largest root is found.
    double lo = 0.0;
    if (slope0 < 0.0) {
        double hi_p = 1.0;
        while (psi_prime(model, hi_p) < 0.0) hi_p *= 2.0;
        lo = bisect_root([&](double t) { return psi_prime(model, t); }, 0.0, hi_p);
    }
    const double hi = (model.total_intensity() + q) / model.drift() + 1.0;
    return bisect_root([&](double t) { return laplace_exponent(model, t) - q; }, lo, hi);
}

double phi_solo_lambertw(double lambda, double b, double c, double q) {
    if (!(lambda > 0.0) || !(b > 0.0) || !(c > 0.0) || !(q >= 0.0)) {
        throw std::invalid_argument("phi_solo_lambertw: require lambda, b, c > 0 and q >= 0");
    }
    // w e^w = -(lambda b / c) e^{-(q+lambda) b / c}; the argument never drops
    // below -1/e since u e^{-u} <= 1/e, so W0 is always defined and picks the
    // largest root of psi(theta) = q.
    const double arg = -(lambda * b / c) * std::exp(-(q + lambda) * b / c);
    return lambert_w0(arg) / b + (q + lambda) / c;
}

double ruin_probability(const CompoundPoissonModel& model, double x) {
    if (!(x >= 0.0)) throw std::invalid_argument("ruin_probability: x must be >= 0");
    return std::exp(-phi(model, 0.0) * x);
}

double initial_wealth_for_ruin(const CompoundPoissonModel& model, double beta) {
    if (!(beta > 0.0 && beta < 1.0)) {
        throw std::invalid_argument("initial_wealth_for_ruin: beta must lie in (0, 1)");
    }
    const double phi0 = phi(model, 0.0);
    if (phi0 <= 0.0) {
        throw std::domain_error(
            "initial_wealth_for_ruin: ruin certain; no finite wealth achieves beta < 1");
    }
    return -std::log(beta) / phi0;
}

}  // namespace hashalloc
