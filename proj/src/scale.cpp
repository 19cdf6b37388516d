#include "hashalloc/scale.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include "hashalloc/levy.hpp"
#include "hashalloc/numerics.hpp"

namespace hashalloc {

namespace {

// Above this order the alternating kernel sums run in long double. The
// switch sits well below the certified depth because for x < j the sums
// cancel from terms of size ~e^x x^j/j! down to tiny values, and double
// precision falls short of the kernel tolerances there.
constexpr int kRecursionMaxOrder = 12;

double log_factorial(int j) {
    static const std::array<double, 64> table = [] {
        std::array<double, 64> t{};
        for (int i = 0; i < 64; ++i) t[i] = std::lgamma(static_cast<double>(i) + 1.0);
        return t;
    }();
    return j < 64 ? table[j] : std::lgamma(static_cast<double>(j) + 1.0);
}

long double log_factorial_l(int j) {
    static const std::array<long double, 64> table = [] {
        std::array<long double, 64> t{};
        for (int i = 0; i < 64; ++i) t[i] = lgammal(static_cast<long double>(i) + 1.0L);
        return t;
    }();
    return j < 64 ? table[j] : lgammal(static_cast<long double>(j) + 1.0L);
}

long double g_kernel_l(long double x, int j) {
    if (x < 0.0L) return 0.0L;
    if (x == 0.0L) return j == 0 ? 1.0L : 0.0L;
    if (j == 0) return expl(x);
    return expl(x + j * logl(x) - log_factorial_l(j));
}

void check_order(int j) {
    if (j < 0) throw std::invalid_argument("kernel order j must be >= 0");
}

}  // namespace

double g_kernel(double x, int j) {
    check_order(j);
    if (x < 0.0) return 0.0;
    if (x == 0.0) return j == 0 ? 1.0 : 0.0;
    if (j == 0) return std::exp(x);
    // Log form keeps x^j / j! from overflowing before the exponential damps it.
    return std::exp(x + j * std::log(x) - log_factorial(j));
}

double G_kernel(double x, int j) {
    check_order(j);
    if (x <= 0.0) return 0.0;
    if (j <= kRecursionMaxOrder) {
        double G = std::expm1(x);
        for (int i = 1; i <= j; ++i) G = g_kernel(x, i) - G;
        return G;
    }
    long double acc = (j % 2 == 0) ? -1.0L : 1.0L;
    long double sign = 1.0L;  // (-1)^{j-i}, from i = j downward
    for (int i = j; i >= 0; --i, sign = -sign) acc += sign * g_kernel_l(x, i);
    return static_cast<double>(acc);
}

double Gbar_kernel(double x, int j) {
    check_order(j);
    if (x <= 0.0) return 0.0;
    if (j <= kRecursionMaxOrder) {
        double G = std::expm1(x);
        double Gb = G - x;
        for (int i = 1; i <= j; ++i) {
            G = g_kernel(x, i) - G;
            Gb = G - Gb;
        }
        return Gb;
    }
    long double G = expm1l(static_cast<long double>(x));
    long double Gb = G - x;
    for (int i = 1; i <= j; ++i) {
        G = g_kernel_l(x, i) - G;
        Gb = G - Gb;
    }
    return static_cast<double>(Gb);
}

ScaleEvaluator::ScaleEvaluator(CompoundPoissonModel model, double q, int depth_cap)
    : model_(std::move(model)), q_(q), depth_cap_(depth_cap) {
    if (!(q >= 0.0) || !std::isfinite(q)) {
        throw std::invalid_argument("ScaleEvaluator: q must be finite and >= 0");
    }
    if (depth_cap < 1 || depth_cap > kCertifiedDepth) {
        throw std::invalid_argument("ScaleEvaluator: depth_cap must lie in [1, " +
                                    std::to_string(kCertifiedDepth) + "]");
    }
    ratio_ = (model_.total_intensity() + q_) / model_.drift();
    phi_q_ = phi(model_, q_);
    build_tables();
}

void ScaleEvaluator::build_tables() {
    const auto& atoms = model_.atoms();
    const int n_atoms = static_cast<int>(atoms.size());

    // Total composition count is C(depth_cap + n_atoms, n_atoms).
    double total = 1.0;
    for (int i = 1; i <= n_atoms; ++i) {
        total *= static_cast<double>(depth_cap_ + i) / static_cast<double>(i);
    }
    if (total > 2e7) {
        throw std::invalid_argument(
            "ScaleEvaluator: composition table would hold " + std::to_string(total) +
            " entries; lower depth_cap or reduce the number of active atoms");
    }

    depths_.resize(depth_cap_ + 1);
    std::vector<std::pair<double, double>> entries;  // (offset, weight)

    // Enumerate compositions of j over the atoms, carrying the factored
    // multinomial weight prod_k C(rem_k, i_k) p_k^{i_k} incrementally.
    auto recurse = [&](auto&& self, int k, int rem, double weight, double offset) -> void {
        if (k == n_atoms - 1) {
            const double w = weight * std::pow(atoms[k].probability, rem);
            entries.emplace_back(offset + rem * atoms[k].jump_size, w);
            return;
        }
        double binom = 1.0;
        double pp = 1.0;
        for (int i = 0; i <= rem; ++i) {
            if (i > 0) {
                binom *= static_cast<double>(rem - i + 1) / static_cast<double>(i);
                pp *= atoms[k].probability;
            }
            self(self, k + 1, rem - i, weight * binom * pp, offset + i * atoms[k].jump_size);
        }
    };

    for (int j = 0; j <= depth_cap_; ++j) {
        entries.clear();
        recurse(recurse, 0, j, 1.0, 0.0);
        std::sort(entries.begin(), entries.end());
        auto& t = depths_[j];
        t.offset.reserve(entries.size());
        t.weight.reserve(entries.size());
        for (const auto& [off, w] : entries) {
            t.offset.push_back(off);
            t.weight.push_back(w);
        }
    }
}

double ScaleEvaluator::composition_weight_sum(int depth) const {
    if (depth < 0 || depth > depth_cap_) {
        throw std::invalid_argument("composition_weight_sum: depth outside the cached range");
    }
    CompensatedSum acc;
    for (double w : depths_[depth].weight) acc.add(w);
    return acc.value();
}

int ScaleEvaluator::required_depth(double x) const {
    if (x <= 0.0) return 0;
    const double d = std::floor(x / model_.min_jump());
    return d > 1e9 ? 1000000000 : static_cast<int>(d);
}

void ScaleEvaluator::ensure_depth(double x) const {
    const int need = required_depth(x);
    if (need > depth_cap_) {
        throw std::domain_error("scale series at x = " + std::to_string(x) +
                                " requires depth " + std::to_string(need) +
                                " beyond the evaluator cap " + std::to_string(depth_cap_) +
                                " (certified maximum " + std::to_string(kCertifiedDepth) + ")");
    }
}

double ScaleEvaluator::W(double x) const {
    if (x < 0.0) return 0.0;
    ensure_depth(x);
    const int J = std::min(depth_cap_, required_depth(x));
    const double r = -model_.total_intensity() / (model_.total_intensity() + q_);
    CompensatedSum acc;
    double coef = 1.0;
    for (int j = 0; j <= J; ++j, coef *= r) {
        const DepthTable& t = depths_[j];
        for (std::size_t i = 0; i < t.offset.size() && t.offset[i] <= x; ++i) {
            acc.add(coef * t.weight[i] * g_kernel(ratio_ * (x - t.offset[i]), j));
        }
    }
    return acc.value() / model_.drift();
}

double ScaleEvaluator::Z(double x) const {
    if (x <= 0.0) return 1.0;
    if (q_ == 0.0) return 1.0;
    ensure_depth(x);
    const int J = std::min(depth_cap_, required_depth(x));
    const double mu = model_.total_intensity();
    const double r = -mu / (mu + q_);
    CompensatedSum acc;
    double coef = 1.0;
    for (int j = 0; j <= J; ++j, coef *= r) {
        const DepthTable& t = depths_[j];
        for (std::size_t i = 0; i < t.offset.size() && t.offset[i] <= x; ++i) {
            acc.add(coef * t.weight[i] * G_kernel(ratio_ * (x - t.offset[i]), j));
        }
    }
    return 1.0 + q_ / (mu + q_) * acc.value();
}

double ScaleEvaluator::Zbar(double x) const {
    if (x <= 0.0) return x;
    if (q_ == 0.0) return x;
    ensure_depth(x);
    const int J = std::min(depth_cap_, required_depth(x));
    const double mu = model_.total_intensity();
    const double r = -mu / (mu + q_);
    CompensatedSum acc;
    double coef = 1.0;
    for (int j = 0; j <= J; ++j, coef *= r) {
        const DepthTable& t = depths_[j];
        for (std::size_t i = 0; i < t.offset.size() && t.offset[i] <= x; ++i) {
            acc.add(coef * t.weight[i] * Gbar_kernel(ratio_ * (x - t.offset[i]), j));
        }
    }
    const double pref = q_ * model_.drift() / ((mu + q_) * (mu + q_));
    return x + pref * acc.value();
}

}  // namespace hashalloc
