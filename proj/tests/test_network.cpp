#include <doctest.h>

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "hashalloc/dividends.hpp"
#include "hashalloc/levy.hpp"
#include "hashalloc/network.hpp"
#include "hashalloc/scale.hpp"

using namespace hashalloc;

namespace {

NetworkConfig small_config() {
    NetworkConfig c;
    c.n_miners = 4;
    c.n_pools = 3;
    c.seed = 42;
    c.k_max = 3;
    return c;
}

double average_miner_pool_value(const NetworkConfig& c, double fee, double delta) {
    const double lambda_bar = c.total_block_rate / c.n_miners;
    const double cost_bar = lambda_bar * c.block_reward / (1.0 + c.avg_margin);
    const PoolTerms t = pool_terms(PoolOffer(fee, delta), lambda_bar, c.block_reward);
    const CompoundPoissonModel m(cost_bar, t.share_rate, {{1.0, t.share_reward}});
    const CompoundPoissonModel solo(cost_bar, lambda_bar, {{1.0, c.block_reward}});
    const ScaleEvaluator ev(m, c.q);
    return optimal_value(ev, initial_wealth_for_ruin(solo, 0.5)).value;
}

}  // namespace

TEST_SUITE("network") {

TEST_CASE("miner sampling") {
    NetworkConfig c = small_config();

    SUBCASE("a single miner receives the whole hashrate") {
        c.n_miners = 1;
        PathRng rng(c.seed, 0);
        const auto miners = sample_miners(c, rng);
        REQUIRE(miners.size() == 1);
        CHECK(miners[0].block_rate == doctest::Approx(c.total_block_rate).epsilon(1e-15));
    }
    SUBCASE("hashrate is conserved and every miner is profitable") {
        c.n_miners = 25;
        PathRng rng(c.seed, 0);
        const auto miners = sample_miners(c, rng);
        double total = 0.0;
        for (const auto& m : miners) {
            total += m.block_rate;
            const CompoundPoissonModel solo(m.cost_rate, m.block_rate,
                                            {{1.0, c.block_reward}});
            CHECK(net_profit_condition(solo));
            CHECK(m.risk_aversion.value() >= c.gamma_range.first);
            CHECK(m.risk_aversion.value() <= c.gamma_range.second);
            CHECK(m.target_ruin_prob.value() > 0.0);
            CHECK(m.target_ruin_prob.value() < 1.0);
            // Initial wealth reproduces the sampled ruin level.
            CHECK(ruin_probability(solo, m.initial_wealth) ==
                  doctest::Approx(m.target_ruin_prob.value()).epsilon(1e-9));
        }
        CHECK(std::abs(total - c.total_block_rate) <= 1e-9);
    }
    SUBCASE("sampling is deterministic in the seed") {
        PathRng r1(c.seed, 0), r2(c.seed, 0);
        const auto a = sample_miners(c, r1);
        const auto b = sample_miners(c, r2);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].block_rate == b[i].block_rate);
            CHECK(a[i].cost_rate == b[i].cost_rate);
            CHECK(a[i].initial_wealth == b[i].initial_wealth);
        }
    }
}

TEST_CASE("beta sampler moments") {
    PathRng rng(7, 99);
    NetworkConfig c;
    double sum = 0.0, sum2 = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        PathRng local(7, i);
        const auto miners = sample_miners(
            [&] {
                NetworkConfig one = c;
                one.n_miners = 1;
                return one;
            }(),
            local);
        const double b = miners[0].target_ruin_prob.value();
        sum += b;
        sum2 += b * b;
    }
    const double mean = sum / n;
    const double var = sum2 / n - mean * mean;
    CHECK(mean == doctest::Approx(0.5).epsilon(0.02));         // Beta(1.5,1.5) mean
    CHECK(var == doctest::Approx(0.0625).epsilon(0.08));       // Beta(1.5,1.5) variance
}

TEST_CASE("difficulty calibration") {
    const NetworkConfig c = small_config();

    SUBCASE("zero fee calibrates to no difficulty reduction") {
        const auto deltas = calibrate_difficulties({0.0}, c);
        REQUIRE(deltas.size() == 1);
        CHECK(deltas[0] == 1.0);
    }
    SUBCASE("positive fees require easier shares") {
        const auto deltas = calibrate_difficulties({0.01, 0.01, 0.035}, c);
        CHECK(deltas[0] < 1.0);
        CHECK(deltas[0] == deltas[1]);  // equal fees, equal equation
        CHECK(deltas[2] < deltas[0]);   // larger fee needs more risk relief
    }
    SUBCASE("calibrated pools match the solo target value") {
        const double lambda_bar = c.total_block_rate / c.n_miners;
        const double cost_bar = lambda_bar * c.block_reward / (1.0 + c.avg_margin);
        const CompoundPoissonModel solo(cost_bar, lambda_bar, {{1.0, c.block_reward}});
        const ScaleEvaluator ev(solo, c.q);
        const double target = optimal_value(ev, initial_wealth_for_ruin(solo, 0.5)).value;
        const std::vector<double> fees = {0.005, 0.02, 0.04};
        const auto deltas = calibrate_difficulties(fees, c);
        for (std::size_t k = 0; k < fees.size(); ++k) {
            const double v = average_miner_pool_value(c, fees[k], deltas[k]);
            CHECK(std::abs(v - target) <= 1e-6 * std::abs(target));
        }
    }
    SUBCASE("value falls as delta grows, fee fixed") {
        double prev = 1e300;
        for (double delta : {0.2, 0.4, 0.6, 0.8, 1.0}) {
            const double v = average_miner_pool_value(c, 0.02, delta);
            CHECK(v < prev);
            prev = v;
        }
    }
    SUBCASE("an unpayable fee reports the attainable range") {
        CHECK_THROWS_WITH_AS(calibrate_difficulties({0.9}, c),
                             doctest::Contains("calibration failed"), std::runtime_error);
    }
}

TEST_CASE("allocate_all aggregates hashpower") {
    const NetworkConfig c = small_config();

    SUBCASE("identical risk-averse miners pick one pool, HHI = 1") {
        std::vector<MinerProfile> miners;
        for (int i = 0; i < 5; ++i) {
            miners.emplace_back(1.2, 1.2 * c.block_reward / 1.08, 3.0, 0.4, 0.5);
        }
        NetworkConfig cc = c;
        cc.n_miners = 5;
        cc.total_block_rate = 6.0;
        const std::vector<PoolOffer> offers = {PoolOffer::solo(), PoolOffer(0.01, 0.8),
                                               PoolOffer(0.03, 0.6)};
        const auto res = allocate_all(miners, offers, Criterion::mv_utility, cc);
        CHECK(res.hhi == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(res.nakamoto == 1);
        for (const auto& w : res.miner_weights) {
            int nonzero = 0;
            for (double wi : w) nonzero += wi > 0.0;
            CHECK(nonzero == 1);  // vertex allocations
        }
    }
    SUBCASE("no pools means everything stays solo") {
        std::vector<MinerProfile> miners;
        miners.emplace_back(6.0, 6.0 * c.block_reward / 1.3, 4.0, 0.2, 0.5);
        NetworkConfig cc = c;
        cc.n_miners = 1;
        const auto res =
            allocate_all(miners, {PoolOffer::solo()}, Criterion::dividends, cc);
        REQUIRE(res.pool_shares.size() == 1);
        CHECK(res.pool_shares[0] == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("run_study end to end") {
    const NetworkConfig c = small_config();
    const NetworkReport report = run_study(c);

    REQUIRE(report.criteria.size() == 3);
    for (const auto& [name, res] : report.criteria) {
        REQUIRE(res.pool_shares.size() == static_cast<std::size_t>(c.n_pools) + 1);
        double sum = 0.0;
        for (double s : res.pool_shares) {
            CHECK(s >= 0.0);
            sum += s;
        }
        CHECK(std::abs(sum - 1.0) <= 1e-9);
        CHECK(res.nakamoto >= 1);
    }
    // Every mv_utility allocation is a vertex.
    const auto& util = report.criteria.at("mv_utility");
    for (const auto& w : util.miner_weights) {
        int nonzero = 0;
        for (double wi : w) nonzero += wi > 0.0;
        CHECK(nonzero == 1);
    }
    // Frontier allocations mix at most two destinations.
    for (const auto& w : report.criteria.at("mv_frontier").miner_weights) {
        int nonzero = 0;
        for (double wi : w) nonzero += wi > 0.0;
        CHECK(nonzero <= 2);
    }

    SUBCASE("repeated runs are byte-identical") {
        const NetworkReport again = run_study(c);
        CHECK(network_report_to_json(report).dump() == network_report_to_json(again).dump());
    }
}

TEST_CASE("run_study without pools degenerates to solo") {
    NetworkConfig c = small_config();
    c.n_pools = 0;
    c.n_miners = 2;
    const NetworkReport report = run_study(c);
    CHECK(report.fees.empty());
    CHECK(report.deltas.empty());
    for (const auto& [name, res] : report.criteria) {
        REQUIRE(res.pool_shares.size() == 1);
        CHECK(res.pool_shares[0] == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(res.hhi == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("config JSON round trip and validation") {
    const nlohmann::json j = {{"n_miners", 10},
                              {"n_pools", 2},
                              {"fee_range", {0.0, 0.02}},
                              {"q", 0.25},
                              {"seed", 9}};
    const NetworkConfig c = network_config_from_json(j);
    CHECK(c.n_miners == 10);
    CHECK(c.q == 0.25);
    CHECK(c.block_reward == 3.125);  // default
    const NetworkConfig back = network_config_from_json(network_config_to_json(c));
    CHECK(back.n_miners == c.n_miners);
    CHECK(back.fee_range == c.fee_range);

    nlohmann::json bad = j;
    bad["fee_range"] = {0.5, 0.1};
    CHECK_THROWS_AS(network_config_from_json(bad), std::invalid_argument);
    bad = j;
    bad["n_miners"] = 0;
    CHECK_THROWS_AS(network_config_from_json(bad), std::invalid_argument);
}

TEST_CASE("shares CSV layout") {
    NetworkConfig c = small_config();
    c.n_miners = 2;
    c.n_pools = 1;
    const NetworkReport report = run_study(c);
    std::ostringstream out;
    write_shares_csv(out, report);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "criterion,pool_id,share");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 3 * (c.n_pools + 1));
}

}  // TEST_SUITE
