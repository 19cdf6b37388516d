#include "hashalloc/validation.hpp"

#include <cmath>

#include "hashalloc/dividends.hpp"
#include "hashalloc/levy.hpp"
#include "hashalloc/mc.hpp"
#include "hashalloc/mean_variance.hpp"
#include "hashalloc/rng.hpp"
#include "hashalloc/scale.hpp"

namespace hashalloc {

namespace {

CheckResult make_check(const std::string& name, double analytic, const McEstimate& est,
                       double z_tolerance) {
    // Guard against a degenerate standard error on deterministic outcomes.
    const double se = std::max(est.std_error, 1e-300);
    const double z = std::abs(analytic - est.mean) / se;
    return {name, analytic, est.mean, est.std_error, z, z <= z_tolerance};
}

}  // namespace

std::vector<CheckResult> run_validation(ValidationLevel level, std::uint64_t seed,
                                        double z_tolerance) {
    const std::int64_t paths = level == ValidationLevel::quick ? 10'000 : 100'000;
    std::vector<CheckResult> results;

    // Reference solo miner: 6 blocks/hour, 3.125 per block, cost set by a 30%
    // profit margin; initial wealth matches a 50% ruin probability.
    const double lambda = 6.0, b = 3.125;
    const double cost = lambda * b / 1.3;
    const CompoundPoissonModel solo(cost, lambda, {{1.0, b}});
    const double x0 = initial_wealth_for_ruin(solo, 0.5);
    const double q = 0.1;

    {
        const double phi0 = phi(solo, 0.0);
        SimConfig cfg(paths, default_ruin_horizon(phi0), seed);
        results.push_back(make_check("ruin_probability.solo", ruin_probability(solo, x0),
                                     simulate_ruin(solo, x0, cfg), z_tolerance));
    }
    {
        SimConfig cfg(paths, 2.0, seed + 1);
        const auto m = simulate_moments(solo, x0, 1.0, cfg);
        results.push_back(make_check("expected_wealth.solo", expected_wealth(solo, x0, 1.0),
                                     {m.mean, m.mean_std_error}, z_tolerance));
        results.push_back(make_check("wealth_variance.solo", wealth_variance(solo, 1.0),
                                     {m.variance, m.variance_std_error}, z_tolerance));
    }
    {
        const ScaleEvaluator ev(solo, q);
        const double a_star = optimal_barrier(ev);
        SimConfig cfg(paths, default_dividend_horizon(q), seed + 2);
        results.push_back(make_check("dividends.solo.optimal_barrier",
                                     value_function(ev, x0, a_star),
                                     simulate_dividends(solo, x0, a_star, q, cfg), z_tolerance));
        results.push_back(make_check("dividends.solo.half_barrier",
                                     value_function(ev, x0, 0.5 * a_star),
                                     simulate_dividends(solo, x0, 0.5 * a_star, q, cfg),
                                     z_tolerance));
    }

    // Seeded random two-atom models.
    PathRng rng(seed, 0xA11CE);
    for (int i = 0; i < 2; ++i) {
        const double b1 = 1.5 + 2.0 * rng.uniform();
        const double b2 = b1 * (1.2 + 0.8 * rng.uniform());
        const double p1 = 0.3 + 0.4 * rng.uniform();
        const double mu = 4.0 + 4.0 * rng.uniform();
        const double margin = 0.1 + 0.3 * rng.uniform();
        const double mean_jump = p1 * b1 + (1.0 - p1) * b2;
        const CompoundPoissonModel model(mu * mean_jump / (1.0 + margin), mu,
                                         {{p1, b1}, {1.0 - p1, b2}});
        const double qq = 0.08 + 0.15 * rng.uniform();
        const double x = initial_wealth_for_ruin(model, 0.4 + 0.3 * rng.uniform());
        const std::string tag = "random_model_" + std::to_string(i);

        SimConfig ruin_cfg(paths, default_ruin_horizon(phi(model, 0.0)), seed + 10 + i);
        results.push_back(make_check(tag + ".ruin", ruin_probability(model, x),
                                     simulate_ruin(model, x, ruin_cfg), z_tolerance));

        const ScaleEvaluator ev(model, qq);
        const double a_star = optimal_barrier(ev);
        SimConfig div_cfg(paths, default_dividend_horizon(qq), seed + 20 + i);
        results.push_back(make_check(tag + ".dividends", value_function(ev, x, a_star),
                                     simulate_dividends(model, x, a_star, qq, div_cfg),
                                     z_tolerance));
    }
    return results;
}

}  // namespace hashalloc
