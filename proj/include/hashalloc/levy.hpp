#pragma once

#include "hashalloc/model.hpp"

namespace hashalloc {

// Laplace exponent of the surplus process,
//   psi(theta) = c*theta + mu * (sum_k p_k e^{-b_k theta} - 1),
// with psi(0) = 0 exactly.
double laplace_exponent(const CompoundPoissonModel& model, double theta);

// psi'(0) = c - mu * E[B]; negative exactly when the net profit condition holds.
double psi_prime_zero(const CompoundPoissonModel& model);

// Expected reward rate strictly exceeds the cost rate.
bool net_profit_condition(const CompoundPoissonModel& model);

// Largest nonnegative root of psi(theta) = q, by bracketed bisection between
// the minimizer of psi and (mu+q)/c + 1. Returns 0 for q = 0 on break-even or
// unprofitable models (ruin is then certain).
double phi(const CompoundPoissonModel& model, double q);

// Closed form for phi(q) of a single-atom model through the principal branch
// of the Lambert W function:
//   phi(q) = W0(-(lambda*b/c) e^{-(q+lambda)b/c}) / b + (q+lambda)/c.
// The argument lies in [-1/e, 0), where W0 selects the largest root.
double phi_solo_lambertw(double lambda, double b, double c, double q);

// P(ruin | initial wealth x) = e^{-phi(0) x}; equals 1 when unprofitable.
double ruin_probability(const CompoundPoissonModel& model, double x);

// Wealth x with ruin_probability(x) = beta, i.e. -ln(beta)/phi(0).
// Throws when ruin is certain (phi(0) = 0).
double initial_wealth_for_ruin(const CompoundPoissonModel& model, double beta);

}  // namespace hashalloc
