#include <doctest.h>

#include <cmath>
#include <cstring>
#include <stdexcept>
#include <vector>

#include "hashalloc/dividends.hpp"
#include "hashalloc/levy.hpp"
#include "hashalloc/mc.hpp"
#include "hashalloc/rng.hpp"
#include "oracles.hpp"

using namespace hashalloc;

namespace {

constexpr double kLambda = 6.0;
constexpr double kReward = 3.125;
const double kCostExact = kLambda * kReward / 1.3;

CompoundPoissonModel solo_model(double cost, double rate = kLambda, double reward = kReward) {
    return CompoundPoissonModel(cost, rate, {{1.0, reward}});
}

// Contracts behind the four reference candidates: solo plus three pools.
const std::vector<PoolOffer> kOffers = {
    PoolOffer::solo(), PoolOffer(0.005, 0.99), PoolOffer(0.010, 0.85), PoolOffer(0.100, 0.75)};

std::vector<PoolTerms> reference_pools() {
    std::vector<PoolTerms> pools;
    for (const auto& o : kOffers) pools.push_back(pool_terms(o, kLambda, kReward));
    return pools;
}

}  // namespace

TEST_SUITE("dividends") {

TEST_CASE("kappa extension and substitution values") {
    const ScaleEvaluator ev(solo_model(kCostExact), 0.1);
    const double pq = ev.phi_q();
    const double tail = psi_prime_zero(ev.model()) / 0.1;
    CHECK(kappa(ev, 0.0) == doctest::Approx(-1.0 / pq + tail).epsilon(1e-15));
    CHECK(kappa(ev, -2.0) == doctest::Approx(-2.0 - 1.0 / pq + tail).epsilon(1e-15));

    const ScaleEvaluator ev0(solo_model(kCostExact), 0.0);
    CHECK_THROWS_WITH_AS(kappa(ev0, 1.0), doctest::Contains("discount rate"),
                         std::domain_error);
}

TEST_CASE("kappa cross-checked by independent quadrature of Z and Zbar") {
    const double q = 0.1, y = 3.0;
    const ScaleEvaluator ev(solo_model(kCostExact), q);
    const double z_quad =
        1.0 + q * oracles::adaptive_simpson([&](double s) { return ev.W(s); }, 0.0, y, 1e-12);
    const double zbar_quad =
        oracles::adaptive_simpson([&](double s) { return ev.Z(s); }, 0.0, y, 1e-12);
    const double kappa_quad =
        zbar_quad - z_quad / ev.phi_q() + psi_prime_zero(ev.model()) / q;
    CHECK(kappa(ev, y) == doctest::Approx(kappa_quad).epsilon(1e-8));
}

TEST_CASE("value function boundary behavior") {
    const ScaleEvaluator ev(solo_model(kCostExact), 0.1);
    CHECK(std::abs(value_function(ev, 0.0, 0.0)) < 1e-12);
    // At x = a the formula collapses to -kappa(0) + kappa(a)/Z(a).
    const double a = 4.2;
    CHECK(value_function(ev, a, a) ==
          doctest::Approx(-kappa(ev, 0.0) + kappa(ev, a) / ev.Z(a)).epsilon(1e-14));
    // Above the barrier the excess is paid as a lump.
    CHECK(value_function(ev, a + 2.0, a) ==
          doctest::Approx(2.0 + value_function(ev, a, a)).epsilon(1e-14));
    CHECK_THROWS_AS(value_function(ev, -1.0, 2.0), std::invalid_argument);
}

TEST_CASE("value function matches the Monte Carlo oracle") {
    const auto model = solo_model(kCostExact);
    const double q = 0.1;
    const ScaleEvaluator ev(model, q);
    const double x = initial_wealth_for_ruin(model, 0.5);
    const double a_star = optimal_barrier(ev);
    const SimConfig cfg(20000, default_dividend_horizon(q), 99);
    const auto mc = simulate_dividends(model, x, a_star, q, cfg);
    const double analytic = value_function(ev, x, a_star);
    CHECK(std::abs(analytic - mc.mean) <= 3.0 * mc.std_error);
}

TEST_CASE("optimal barrier") {
    SUBCASE("unprofitable model pays everything immediately") {
        const ScaleEvaluator ev(solo_model(20.0), 0.1);
        CHECK(optimal_barrier(ev) == 0.0);
    }
    SUBCASE("solves Zbar(a) = -psi'(0)/q") {
        const ScaleEvaluator ev(solo_model(14.42), 0.1);
        const double target = -psi_prime_zero(ev.model()) / 0.1;
        CHECK(target == doctest::Approx(43.3).epsilon(1e-12));
        const double a_star = optimal_barrier(ev);
        CHECK(std::abs(ev.Zbar(a_star) - target) < 1e-8);
    }
    SUBCASE("doubling q lowers the barrier") {
        const ScaleEvaluator ev1(solo_model(14.42), 0.1);
        const ScaleEvaluator ev2(solo_model(14.42), 0.2);
        CHECK(optimal_barrier(ev2) < optimal_barrier(ev1));
    }
    SUBCASE("frozen reference point") {
        const ScaleEvaluator ev(solo_model(kCostExact), 0.1);
        CHECK(optimal_barrier(ev) == doctest::Approx(19.705015200331296).epsilon(1e-8));
        CHECK(value_function(ev, 3.9393322762484975, optimal_barrier(ev)) ==
              doctest::Approx(18.516647381273277).epsilon(1e-8));
    }
}

TEST_CASE("optimal value dominates a barrier grid") {
    const auto model = solo_model(kCostExact);
    const ScaleEvaluator ev(model, 0.1);
    const double x = initial_wealth_for_ruin(model, 0.5);
    const ValueReport rep = optimal_value(ev, x);
    double grid_max = 0.0;
    for (int i = 1; i <= 80; ++i) {
        grid_max = std::max(grid_max, value_function(ev, x, rep.barrier * 2.0 * i / 80.0));
    }
    CHECK(rep.value >= grid_max - 1e-8);
    CHECK(rep.value >= 0.0);
    CHECK(rep.phi_q == ev.phi_q());
}

TEST_CASE("optimal value on degenerate cases") {
    SUBCASE("unprofitable model returns the initial wealth as a lump") {
        const ScaleEvaluator ev(solo_model(25.0), 0.1);
        const ValueReport rep = optimal_value(ev, 1.0);
        CHECK(rep.barrier == 0.0);
        CHECK(rep.value == doctest::Approx(1.0).epsilon(1e-12));
        const auto mc = simulate_dividends(ev.model(), 1.0, 0.0, 0.1,
                                           SimConfig(1000, 10.0, 3));
        CHECK(mc.mean == 1.0);
        CHECK(mc.std_error == 0.0);
    }
    SUBCASE("zero wealth ruins instantly, so the value is exactly zero") {
        // The drift crosses zero immediately from x = 0 and no jump can
        // arrive in that instant; the simulation confirms it.
        const ScaleEvaluator ev(solo_model(kCostExact), 0.1);
        const ValueReport rep = optimal_value(ev, 0.0);
        CHECK(rep.value == 0.0);
        const auto mc = simulate_dividends(ev.model(), 0.0, rep.barrier, 0.1,
                                           SimConfig(2000, 50.0, 5));
        CHECK(mc.mean == 0.0);
        // Any positive wealth has positive value.
        CHECK(optimal_value(ev, 0.25).value > 0.0);
    }
}

TEST_CASE("barrier dominance on random profitable models") {
    PathRng rng(301, 0);
    int done = 0;
    while (done < 3) {
        const auto m = oracles::random_model(rng, 3);
        const double q = 0.08 + 0.2 * rng.uniform();
        const ScaleEvaluator probe(m, q);
        const double a_star = optimal_barrier(probe);
        if (probe.required_depth(3.0 * a_star) > probe.depth_cap()) continue;
        const double x = 2.0 * a_star * rng.uniform();
        const double v_star = value_function(probe, x, a_star);
        for (int i = 1; i <= 50; ++i) {
            const double a = 3.0 * a_star * i / 50.0;
            CHECK(v_star >= value_function(probe, x, a) - 1e-8);
        }
        ++done;
    }
}

TEST_CASE("smooth fit at the optimal barrier") {
    const double h = 1e-5;
    PathRng rng(302, 0);
    std::vector<CompoundPoissonModel> models = {solo_model(kCostExact)};
    models.push_back(oracles::random_model(rng, 2));
    models.push_back(oracles::random_model(rng, 3));
    for (const auto& m : models) {
        const double q = 0.06 + 0.2 * rng.uniform();
        const ScaleEvaluator ev(m, q);
        const double a = optimal_barrier(ev);
        if (a <= h) continue;
        const double slope = (value_function(ev, a, a) - value_function(ev, a - h, a)) / h;
        CHECK(slope == doctest::Approx(1.0).epsilon(1e-4));
    }
}

TEST_CASE("reference candidates reproduce the pinned single-pool values at q = 0.5") {
    // The four-candidate table: expected discounted dividends 6.027 (pool 2),
    // 6.008 (solo), 5.935 (pool 1), 4.694 (pool 3) at half-unit discounting.
    const auto pools = reference_pools();
    const double q = 0.5;
    const double x = initial_wealth_for_ruin(solo_model(kCostExact), 0.5);
    std::vector<double> values;
    for (const auto& p : pools) {
        const ScaleEvaluator ev(solo_model(kCostExact, p.share_rate, p.share_reward), q);
        values.push_back(optimal_value(ev, x).value);
    }
    CHECK(values[0] == doctest::Approx(6.008).epsilon(2e-4));
    CHECK(values[1] == doctest::Approx(5.935).epsilon(2e-4));
    CHECK(values[2] == doctest::Approx(6.027).epsilon(2e-4));
    CHECK(values[3] == doctest::Approx(4.694).epsilon(2e-4));
    CHECK(values[2] > values[0]);
    CHECK(values[0] > values[1]);
    CHECK(values[1] > values[3]);
}

TEST_CASE("optimizer on a single pool") {
    const MinerProfile miner(kLambda, kCostExact, 3.9393322762484975);
    const std::vector<PoolTerms> pools = {pool_terms(PoolOffer::solo(), kLambda, kReward)};
    const ValueReport rep = optimize_allocation(miner, pools, 0.1);
    CHECK(rep.allocation.size() == 1);
    CHECK(rep.allocation[0] == 1.0);
    const ScaleEvaluator ev(solo_model(kCostExact), 0.1);
    CHECK(rep.value == doctest::Approx(optimal_value(ev, miner.initial_wealth).value));
}

TEST_CASE("optimizer concentrates on the best reference pool") {
    const double x = initial_wealth_for_ruin(solo_model(kCostExact), 0.5);
    const MinerProfile miner(kLambda, kCostExact, x);
    const ValueReport rep = optimize_allocation(miner, reference_pools(), 0.5);
    REQUIRE(rep.allocation.size() == 4);
    CHECK(rep.allocation[2] == 1.0);  // pool 2 dominates and mixing does not improve
    CHECK(rep.active_pools == std::vector<int>{2});
}

TEST_CASE("optimizer never loses a single-pool candidate") {
    const double x = initial_wealth_for_ruin(solo_model(kCostExact), 0.5);
    const MinerProfile miner(kLambda, kCostExact, x);
    const auto pools = reference_pools();
    const double q = 0.12;
    OptimizeOptions opts;
    opts.pso_particles = 12;
    opts.pso_iterations = 40;
    const ValueReport rep = optimize_allocation(miner, pools, q, opts);
    for (std::size_t k = 0; k < pools.size(); ++k) {
        std::vector<double> w(pools.size(), 0.0);
        w[k] = 1.0;
        const ScaleEvaluator ev(build_model(miner, pools, Allocation(w)), q);
        CHECK(rep.value >= optimal_value(ev, x).value - 1e-12);
    }
}

TEST_CASE("identical pools tie-break to the lower index vertex") {
    const double x = initial_wealth_for_ruin(solo_model(kCostExact), 0.5);
    const MinerProfile miner(kLambda, kCostExact, x);
    const PoolTerms best = pool_terms(PoolOffer(0.010, 0.85), kLambda, kReward);
    const std::vector<PoolTerms> pools = {
        pool_terms(PoolOffer::solo(), kLambda, kReward), best, best};
    const ValueReport rep = optimize_allocation(miner, pools, 0.5);
    CHECK(rep.allocation[1] == 1.0);
    CHECK(rep.allocation[2] == 0.0);
}

TEST_CASE("optimizer is deterministic for a fixed seed") {
    const double x = initial_wealth_for_ruin(solo_model(kCostExact), 0.5);
    const MinerProfile miner(kLambda, kCostExact, x);
    OptimizeOptions opts;
    opts.seed = 7;
    opts.pso_particles = 12;
    opts.pso_iterations = 40;
    const ValueReport r1 = optimize_allocation(miner, reference_pools(), 0.12, opts);
    const ValueReport r2 = optimize_allocation(miner, reference_pools(), 0.12, opts);
    CHECK(std::memcmp(&r1.value, &r2.value, sizeof(double)) == 0);
    CHECK(std::memcmp(&r1.barrier, &r2.barrier, sizeof(double)) == 0);
    REQUIRE(r1.allocation.size() == r2.allocation.size());
    for (std::size_t k = 0; k < r1.allocation.size(); ++k) {
        CHECK(std::memcmp(&r1.allocation.weights()[k], &r2.allocation.weights()[k],
                          sizeof(double)) == 0);
    }
}

TEST_CASE("optimizer input validation") {
    const MinerProfile miner(kLambda, kCostExact, 1.0);
    const std::vector<PoolTerms> unsorted = {{6.0, 3.125}, {5.0, 4.0}};
    CHECK_THROWS_AS(optimize_allocation(miner, unsorted, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(optimize_allocation(miner, reference_pools(), 0.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(optimize_allocation(miner, {}, 0.1), std::invalid_argument);
}

}  // TEST_SUITE
