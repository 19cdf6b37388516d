#include "hashalloc/dividends.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "hashalloc/levy.hpp"
#include "hashalloc/numerics.hpp"
#include "hashalloc/rng.hpp"

namespace hashalloc {

namespace {

void require_discounting(const ScaleEvaluator& ev, const char* who) {
    if (!(ev.q() > 0.0)) {
        throw std::domain_error(std::string(who) + ": discount rate must be positive");
    }
}

}  // namespace

double kappa(const ScaleEvaluator& evaluator, double y) {
    require_discounting(evaluator, "kappa");
    const double tail = psi_prime_zero(evaluator.model()) / evaluator.q();
    if (y <= 0.0) return y - 1.0 / evaluator.phi_q() + tail;
    return evaluator.Zbar(y) - evaluator.Z(y) / evaluator.phi_q() + tail;
}

double value_function(const ScaleEvaluator& evaluator, double x, double a) {
    require_discounting(evaluator, "value_function");
    if (!(x >= 0.0)) throw std::invalid_argument("value_function: x must be >= 0");
    if (!(a >= 0.0)) throw std::invalid_argument("value_function: barrier must be >= 0");
    if (x > a) {
        // Surplus above the barrier is paid out immediately.
        return (x - a) + value_function(evaluator, a, a);
    }
    const double y = a - x;
    return -kappa(evaluator, y) + evaluator.Z(y) / evaluator.Z(a) * kappa(evaluator, a);
}

double optimal_barrier(const ScaleEvaluator& evaluator) {
    require_discounting(evaluator, "optimal_barrier");
    const double target = -psi_prime_zero(evaluator.model()) / evaluator.q();
    if (target <= 0.0) return 0.0;
    try {
        double hi = evaluator.model().min_jump();
        while (evaluator.Zbar(hi) < target) hi *= 2.0;
        return bisect_root([&](double a) { return evaluator.Zbar(a) - target; }, 0.0, hi, 1e-10);
    } catch (const std::domain_error& e) {
        throw std::domain_error(std::string("optimal_barrier: ") + e.what());
    }
}

ValueReport optimal_value(const ScaleEvaluator& evaluator, double x) {
    ValueReport report;
    report.barrier = optimal_barrier(evaluator);
    report.value = value_function(evaluator, x, report.barrier);
    report.phi_q = evaluator.phi_q();
    report.psi_prime0 = psi_prime_zero(evaluator.model());
    return report;
}

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

ValueReport evaluate_allocation(const MinerProfile& miner, const std::vector<PoolTerms>& pools,
                                std::vector<double> weights, double q, int depth_cap) {
    Allocation alloc = Allocation::normalized(std::move(weights));
    CompoundPoissonModel model = build_model(miner, pools, alloc);
    // The optimal barrier cannot exceed -psi'(0)/q (Zbar(a) >= a) and the
    // bracketing stays below twice that, so the series depth the search can
    // touch is known up front; sizing the table to it keeps the per-candidate
    // cost flat inside the swarm loop.
    const double target = std::max(0.0, -psi_prime_zero(model) / q);
    const double reach = std::ceil(2.0 * target / model.min_jump()) + 2.0;
    const int local_cap = std::clamp(static_cast<int>(std::min(reach, 1e9)), 1, depth_cap);
    ScaleEvaluator ev(std::move(model), q, local_cap);
    ValueReport report = optimal_value(ev, miner.initial_wealth);
    for (std::size_t k = 0; k < alloc.size(); ++k) {
        if (alloc[k] > 0.0) report.active_pools.push_back(static_cast<int>(k));
    }
    report.allocation = std::move(alloc);
    return report;
}

std::vector<double> softmax(const std::vector<double>& z) {
    const double zmax = *std::max_element(z.begin(), z.end());
    std::vector<double> w(z.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        w[i] = std::exp(z[i] - zmax);
        sum += w[i];
    }
    for (double& wi : w) wi /= sum;
    return w;
}

struct SearchState {
    ValueReport incumbent;
    double incumbent_value = kNegInf;

    // Strict improvement beyond rounding noise; on ties the earlier
    // (lexicographically lower) candidate stays.
    void consider(const ValueReport& report) {
        if (!std::isfinite(incumbent_value)) {
            incumbent = report;
            incumbent_value = report.value;
            return;
        }
        const double eps = 1e-12 * std::max(1.0, std::abs(incumbent_value));
        if (report.value > incumbent_value + eps) {
            incumbent = report;
            incumbent_value = report.value;
        }
    }
};

struct SubsetResult {
    std::vector<std::size_t> subset;
    std::vector<double> weights;  // over the subset
    ValueReport report;
    double value = kNegInf;
};

}  // namespace

ValueReport optimize_allocation(const MinerProfile& miner, const std::vector<PoolTerms>& pools,
                                double q, const OptimizeOptions& options) {
    if (pools.empty()) throw std::invalid_argument("optimize_allocation: pool list is empty");
    if (!(q > 0.0)) throw std::invalid_argument("optimize_allocation: q must be > 0");
    validate_pool_ordering(pools);

    const std::size_t n = pools.size();
    auto eval_subset = [&](const std::vector<std::size_t>& subset,
                           const std::vector<double>& sub_weights) {
        std::vector<double> full(n, 0.0);
        for (std::size_t i = 0; i < subset.size(); ++i) full[subset[i]] = sub_weights[i];
        return evaluate_allocation(miner, pools, std::move(full), q, options.depth_cap);
    };

    SearchState state;

    // Stage 1: every single pool.
    SubsetResult best_prev;
    for (std::size_t k = 0; k < n; ++k) {
        ValueReport rep = eval_subset({k}, {1.0});
        if (rep.value > best_prev.value) {
            best_prev = {{k}, {1.0}, rep, rep.value};
        }
        state.consider(rep);
    }

    // Stage 2: golden-section over every pair.
    if (n >= 2) {
        SubsetResult best_pair;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                auto line_value = [&](double w) { return eval_subset({i, j}, {w, 1.0 - w}).value; };
                const auto [w_best, f_best] =
                    golden_section_max(line_value, 0.0, 1.0, options.pair_tol);
                (void)f_best;
                ValueReport rep = eval_subset({i, j}, {w_best, 1.0 - w_best});
                if (rep.value > best_pair.value) {
                    best_pair = {{i, j}, {w_best, 1.0 - w_best}, rep, rep.value};
                }
                state.consider(rep);
            }
        }
        best_prev = best_pair;
    }

    // Stage 3+: enlarge the best (k-1)-subset pool by pool, refining each
    // candidate subset with a particle swarm on softmax-reparameterized
    // weights. Stop once a stage no longer improves the incumbent.
    const std::size_t k_max = std::min<std::size_t>(options.k_max, n);
    for (std::size_t k = 3; k <= k_max; ++k) {
        const double incumbent_before = state.incumbent_value;
        SubsetResult best_stage;
        for (std::size_t p = 0; p < n; ++p) {
            if (std::find(best_prev.subset.begin(), best_prev.subset.end(), p) !=
                best_prev.subset.end()) {
                continue;
            }
            std::vector<std::size_t> subset = best_prev.subset;
            subset.push_back(p);
            std::sort(subset.begin(), subset.end());

            // Seed: the parent's solution with a sliver on the new pool.
            std::vector<double> seed_w(subset.size(), 1e-3);
            for (std::size_t i = 0; i < subset.size(); ++i) {
                for (std::size_t pi = 0; pi < best_prev.subset.size(); ++pi) {
                    if (best_prev.subset[pi] == subset[i]) seed_w[i] += best_prev.weights[pi];
                }
            }

            const int dim = static_cast<int>(subset.size());
            const int particles = options.pso_particles;
            std::uint64_t salt = 0x50534fULL;
            for (std::size_t idx : subset) salt = salt * 1315423911ULL + idx + 1;
            PathRng rng(options.seed, salt);

            std::vector<std::vector<double>> z(particles, std::vector<double>(dim));
            std::vector<std::vector<double>> vel(particles, std::vector<double>(dim, 0.0));
            for (int d = 0; d < dim; ++d) z[0][d] = std::log(seed_w[d]);
            for (int p2 = 1; p2 < particles; ++p2) {
                for (int d = 0; d < dim; ++d) z[p2][d] = 6.0 * rng.uniform() - 3.0;
            }

            std::vector<std::vector<double>> pbest_z = z;
            std::vector<double> pbest_f(particles, kNegInf);
            std::vector<double> gbest_z = z[0];
            double gbest_f = kNegInf;

            auto score = [&](const std::vector<double>& zp) {
                return eval_subset(subset, softmax(zp)).value;
            };
            for (int p2 = 0; p2 < particles; ++p2) {
                const double f = score(z[p2]);
                pbest_f[p2] = f;
                if (f > gbest_f) {
                    gbest_f = f;
                    gbest_z = z[p2];
                }
            }
            for (int it = 0; it < options.pso_iterations; ++it) {
                for (int p2 = 0; p2 < particles; ++p2) {
                    for (int d = 0; d < dim; ++d) {
                        const double r1 = rng.uniform();
                        const double r2 = rng.uniform();
                        vel[p2][d] = options.pso_inertia * vel[p2][d] +
                                     options.pso_cognitive * r1 * (pbest_z[p2][d] - z[p2][d]) +
                                     options.pso_social * r2 * (gbest_z[d] - z[p2][d]);
                        z[p2][d] += vel[p2][d];
                    }
                    const double f = score(z[p2]);
                    if (f > pbest_f[p2]) {
                        pbest_f[p2] = f;
                        pbest_z[p2] = z[p2];
                    }
                    if (f > gbest_f) {
                        gbest_f = f;
                        gbest_z = z[p2];
                    }
                }
            }

            std::vector<double> w_final = softmax(gbest_z);
            ValueReport rep = eval_subset(subset, w_final);
            if (rep.value > best_stage.value) {
                best_stage = {subset, std::move(w_final), rep, rep.value};
            }
            state.consider(rep);
        }
        if (best_stage.subset.empty()) break;
        const double gain = best_stage.value - incumbent_before;
        best_prev = best_stage;
        if (gain < options.rel_tol * std::max(1.0, std::abs(incumbent_before))) break;
    }

    return state.incumbent;
}

}  // namespace hashalloc
