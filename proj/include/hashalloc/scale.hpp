#pragma once

#include <vector>

#include "hashalloc/model.hpp"

namespace hashalloc {

// Kernel family behind the scale-function series:
//   g(x, j)    = e^x x^j / j! for x >= 0 (0 otherwise), with g(0,0) = 1,
//   G(x, j)    = integral of g(., j) over [0, x],
//   Gbar(x, j) = double integral of g(., j) over the triangle 0<=z<=y<=x.
// G and Gbar evaluate through the integration-by-parts forms
//   G(x,j)    = sum_{i=0}^{j} (-1)^{j-i} g(x,i) + (-1)^{j+1}
//   Gbar(x,j) = sum_{i=0}^{j} (-1)^{j-i} G(x,i) + (-1)^{j+1} x
// in double precision up to j = 25 and in long double beyond, since the
// alternating sums shed digits as the order grows.
double g_kernel(double x, int j);
double G_kernel(double x, int j);
double Gbar_kernel(double x, int j);

// Evaluates the q-scale functions W, Z and Zbar of a compound-Poisson surplus
// process through finite multinomial series. The series depth needed at x is
// floor(x / b*) with b* the smallest jump; asking beyond the depth cap is an
// error, never a silent truncation. Double precision with compensated
// summation is certified up to depth 40.
//
// Construction enumerates all jump-size compositions up to the depth cap, so
// the cost grows like C(depth + A, A) for A+1 active atoms; keep active sets
// small or lower the cap for models with many atoms.
//
// Immutable after construction; safe for concurrent reads.
class ScaleEvaluator {
public:
    static constexpr int kCertifiedDepth = 40;

    ScaleEvaluator(CompoundPoissonModel model, double q, int depth_cap = kCertifiedDepth);

    // W^{(q)}(x); zero for x < 0, 1/c at x = 0.
    double W(double x) const;
    // Z^{(q)}(x) = 1 + q * int_0^x W; identically 1 for x <= 0.
    double Z(double x) const;
    // Zbar^{(q)}(x) = int_0^x Z; equals x for x <= 0.
    double Zbar(double x) const;

    int required_depth(double x) const;
    // Sum of the cached multinomial weights at one depth; 1 up to rounding.
    double composition_weight_sum(int depth) const;
    int depth_cap() const { return depth_cap_; }
    double q() const { return q_; }
    double phi_q() const { return phi_q_; }
    const CompoundPoissonModel& model() const { return model_; }

private:
    struct DepthTable {
        std::vector<double> offset;  // sum_k i_k b_k, ascending
        std::vector<double> weight;  // multinomial * prod p_k^{i_k}
    };

    void build_tables();
    void ensure_depth(double x) const;

    CompoundPoissonModel model_;
    double q_;
    int depth_cap_;
    double ratio_;  // (mu + q) / c
    double phi_q_;
    std::vector<DepthTable> depths_;
};

}  // namespace hashalloc
