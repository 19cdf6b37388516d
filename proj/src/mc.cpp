#include "hashalloc/mc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "hashalloc/levy.hpp"
#include "hashalloc/rng.hpp"

namespace hashalloc {

namespace {

struct JumpSampler {
    explicit JumpSampler(const CompoundPoissonModel& m) {
        double cum = 0.0;
        for (const auto& a : m.atoms()) {
            cum += a.probability;
            cum_prob.push_back(cum);
            jump.push_back(a.jump_size);
        }
        cum_prob.back() = 1.0;
    }

    double draw(UniformSource& u) const {
        const double v = u.next();
        const auto it = std::lower_bound(cum_prob.begin(), cum_prob.end(), v);
        const std::size_t k = std::min<std::size_t>(it - cum_prob.begin(), jump.size() - 1);
        return jump[k];
    }

    std::vector<double> cum_prob;
    std::vector<double> jump;
};

McEstimate summarize(const std::vector<double>& values) {
    const double n = static_cast<double>(values.size());
    double sum = 0.0;
    for (double v : values) sum += v;
    const double mean = sum / n;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double se = values.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
    return {mean, se};
}

// Runs per-path simulations; with antithetic pairing the reported units are
// pair means, which is what the standard error is computed over.
template <class PathFn>
std::vector<double> collect(const SimConfig& cfg, PathFn path_value) {
    std::vector<double> values;
    if (cfg.antithetic) {
        const std::int64_t pairs = std::max<std::int64_t>(1, cfg.n_paths / 2);
        values.reserve(pairs);
        for (std::int64_t i = 0; i < pairs; ++i) {
            UniformSource u1(cfg.seed, static_cast<std::uint64_t>(i), false);
            UniformSource u2(cfg.seed, static_cast<std::uint64_t>(i), true);
            values.push_back(0.5 * (path_value(u1) + path_value(u2)));
        }
    } else {
        values.reserve(cfg.n_paths);
        for (std::int64_t i = 0; i < cfg.n_paths; ++i) {
            UniformSource u(cfg.seed, static_cast<std::uint64_t>(i), false);
            values.push_back(path_value(u));
        }
    }
    return values;
}

}  // namespace

SimConfig::SimConfig(std::int64_t n_paths_, double horizon_, std::uint64_t seed_, bool antithetic_)
    : n_paths(n_paths_), horizon(horizon_), seed(seed_), antithetic(antithetic_) {
    if (n_paths < 1) throw std::invalid_argument("SimConfig: n_paths must be >= 1");
    if (!(horizon > 0.0)) throw std::invalid_argument("SimConfig: horizon must be > 0");
}

double default_dividend_horizon(double q) {
    if (!(q > 0.0)) throw std::invalid_argument("default_dividend_horizon: q must be > 0");
    return std::log(1e8) / q;
}

double default_ruin_horizon(double phi0) {
    if (phi0 <= 0.0) return 1e6;
    return std::min(50.0 / phi0, 1e6);
}

McEstimate simulate_dividends(const CompoundPoissonModel& model, double x, double a, double q,
                              const SimConfig& config) {
    if (!(q > 0.0)) throw std::invalid_argument("simulate_dividends: q must be > 0");
    if (!(x >= 0.0)) throw std::invalid_argument("simulate_dividends: x must be >= 0");
    if (!(a >= 0.0)) throw std::invalid_argument("simulate_dividends: barrier must be >= 0");
    const JumpSampler sampler(model);
    const double c = model.drift();
    const double mu = model.total_intensity();

    auto path_value = [&](UniformSource& u) {
        double t = 0.0;
        double pv = std::max(0.0, x - a);
        double surplus = std::min(x, a);
        for (;;) {
            const double tau = u.exponential(mu);
            if (surplus - c * tau < 0.0) break;  // drift reaches 0 before the next jump
            t += tau;
            if (t > config.horizon) break;
            surplus += -c * tau + sampler.draw(u);
            if (surplus > a) {
                pv += std::exp(-q * t) * (surplus - a);
                surplus = a;
            }
        }
        return pv;
    };
    return summarize(collect(config, path_value));
}

McEstimate simulate_ruin(const CompoundPoissonModel& model, double x, const SimConfig& config) {
    if (!(x >= 0.0)) throw std::invalid_argument("simulate_ruin: x must be >= 0");
    const JumpSampler sampler(model);
    const double c = model.drift();
    const double mu = model.total_intensity();

    auto path_value = [&](UniformSource& u) {
        double t = 0.0;
        double surplus = x;
        for (;;) {
            const double tau = u.exponential(mu);
            const double hit = surplus / c;  // time until the drift reaches 0
            if (tau >= hit) return (t + hit <= config.horizon) ? 1.0 : 0.0;
            t += tau;
            if (t > config.horizon) return 0.0;
            surplus += -c * tau + sampler.draw(u);
        }
    };
    return summarize(collect(config, path_value));
}

MomentsEstimate simulate_moments(const CompoundPoissonModel& model, double x, double t,
                                 const SimConfig& config) {
    if (!(t >= 0.0)) throw std::invalid_argument("simulate_moments: t must be >= 0");
    const JumpSampler sampler(model);
    const double c = model.drift();
    const double mu = model.total_intensity();

    auto path_value = [&](UniformSource& u) {
        double gains = 0.0;
        double s = u.exponential(mu);
        while (s <= t) {
            gains += sampler.draw(u);
            s += u.exponential(mu);
        }
        return x - c * t + gains;
    };
    const std::vector<double> values = collect(config, path_value);
    const McEstimate mean_est = summarize(values);

    // Sample variance with an asymptotic standard error from the 4th moment.
    const double n = static_cast<double>(values.size());
    double m2 = 0.0, m4 = 0.0;
    for (double v : values) {
        const double d = v - mean_est.mean;
        m2 += d * d;
        m4 += d * d * d * d;
    }
    const double variance = values.size() > 1 ? m2 / (n - 1.0) : 0.0;
    m2 /= n;
    m4 /= n;
    const double var_se = values.size() > 1 ? std::sqrt(std::max(0.0, m4 - m2 * m2) / n) : 0.0;
    return {mean_est.mean, variance, mean_est.std_error, var_se};
}

}  // namespace hashalloc
