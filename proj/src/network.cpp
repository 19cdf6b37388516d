#include "hashalloc/network.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "hashalloc/dividends.hpp"
#include "hashalloc/levy.hpp"
#include "hashalloc/mean_variance.hpp"
#include "hashalloc/numerics.hpp"
#include "hashalloc/scale.hpp"

namespace hashalloc {

namespace {

double uniform_in(PathRng& rng, std::pair<double, double> range) {
    return range.first + (range.second - range.first) * rng.uniform();
}

double sample_gamma_dist(PathRng& rng, double shape) {
    if (shape < 1.0) {
        const double u = rng.uniform();
        return sample_gamma_dist(rng, shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    // Marsaglia-Tsang squeeze.
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double z, v;
        do {
            z = rng.normal();
            v = 1.0 + c * z;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = rng.uniform();
        if (u < 1.0 - 0.0331 * z * z * z * z) return d * v;
        if (std::log(u) < 0.5 * z * z + d * (1.0 - v + std::log(v))) return d * v;
    }
}

double sample_beta(PathRng& rng, std::pair<double, double> params) {
    const double g1 = sample_gamma_dist(rng, params.first);
    const double g2 = sample_gamma_dist(rng, params.second);
    const double b = g1 / (g1 + g2);
    return std::clamp(b, 1e-9, 1.0 - 1e-9);
}

CompoundPoissonModel solo_model(double cost, double rate, double reward) {
    return CompoundPoissonModel(cost, rate, {{1.0, reward}});
}

std::pair<double, double> range_from_json(const nlohmann::json& j) {
    if (!j.is_array() || j.size() != 2) {
        throw std::invalid_argument("network config: ranges must be two-element arrays");
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

struct SortedPools {
    std::vector<PoolTerms> terms;        // per sorted position, for one miner
    std::vector<std::size_t> original;   // sorted position -> original pool id
};

// One pool order works for every miner: share rates scale with the miner's
// block rate while rewards do not depend on it. Sort by fee ascending
// (share reward descending); solo stays in front.
std::vector<std::size_t> pool_sort_order(const std::vector<PoolOffer>& offers) {
    std::vector<std::size_t> order(offers.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double ra = offers[a].difficulty_reduction * (1.0 - offers[a].fee);
        const double rb = offers[b].difficulty_reduction * (1.0 - offers[b].fee);
        if (ra != rb) return ra > rb;
        return a < b;
    });
    return order;
}

SortedPools terms_for_miner(const std::vector<PoolOffer>& offers,
                            const std::vector<std::size_t>& order, double block_rate,
                            double block_reward) {
    SortedPools sp;
    sp.original = order;
    sp.terms.reserve(offers.size());
    for (std::size_t id : order) {
        sp.terms.push_back(pool_terms(offers[id], block_rate, block_reward));
    }
    return sp;
}

}  // namespace

void NetworkConfig::validate() const {
    if (n_miners < 1) throw std::invalid_argument("network config: n_miners must be >= 1");
    if (n_pools < 0) throw std::invalid_argument("network config: n_pools must be >= 0");
    if (!(total_block_rate > 0.0)) {
        throw std::invalid_argument("network config: total_block_rate must be > 0");
    }
    if (!(block_reward > 0.0)) throw std::invalid_argument("network config: block_reward must be > 0");
    auto check_range = [](std::pair<double, double> r, double lo, double hi, const char* name) {
        if (!(r.first <= r.second) || r.first < lo || r.second > hi) {
            throw std::invalid_argument(std::string("network config: invalid range for ") + name);
        }
    };
    check_range(profit_margin_range, 0.0, 10.0, "profit_margin_range");
    check_range(gamma_range, 0.0, 1e9, "gamma_range");
    check_range(fee_range, 0.0, 0.999, "fee_range");
    if (!(ruin_beta_params.first > 0.0 && ruin_beta_params.second > 0.0)) {
        throw std::invalid_argument("network config: ruin_beta_params must be positive");
    }
    if (!(avg_margin > 0.0)) throw std::invalid_argument("network config: avg_margin must be > 0");
    if (!(q > 0.0)) throw std::invalid_argument("network config: q must be > 0");
    if (k_max < 1) throw std::invalid_argument("network config: k_max must be >= 1");
    if (!(profit_margin_range.first > 0.0)) {
        throw std::invalid_argument("network config: profit margins must be > 0");
    }
}

NetworkConfig network_config_from_json(const nlohmann::json& j) {
    NetworkConfig c;
    if (j.contains("n_miners")) c.n_miners = j["n_miners"].get<int>();
    if (j.contains("n_pools")) c.n_pools = j["n_pools"].get<int>();
    if (j.contains("total_block_rate")) c.total_block_rate = j["total_block_rate"].get<double>();
    if (j.contains("block_reward")) c.block_reward = j["block_reward"].get<double>();
    if (j.contains("profit_margin_range")) c.profit_margin_range = range_from_json(j["profit_margin_range"]);
    if (j.contains("ruin_beta_params")) c.ruin_beta_params = range_from_json(j["ruin_beta_params"]);
    if (j.contains("gamma_range")) c.gamma_range = range_from_json(j["gamma_range"]);
    if (j.contains("fee_range")) c.fee_range = range_from_json(j["fee_range"]);
    if (j.contains("avg_margin")) c.avg_margin = j["avg_margin"].get<double>();
    if (j.contains("q")) c.q = j["q"].get<double>();
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("k_max")) c.k_max = j["k_max"].get<int>();
    c.validate();
    return c;
}

nlohmann::json network_config_to_json(const NetworkConfig& c) {
    return nlohmann::json{
        {"n_miners", c.n_miners},
        {"n_pools", c.n_pools},
        {"total_block_rate", c.total_block_rate},
        {"block_reward", c.block_reward},
        {"profit_margin_range", {c.profit_margin_range.first, c.profit_margin_range.second}},
        {"ruin_beta_params", {c.ruin_beta_params.first, c.ruin_beta_params.second}},
        {"gamma_range", {c.gamma_range.first, c.gamma_range.second}},
        {"fee_range", {c.fee_range.first, c.fee_range.second}},
        {"avg_margin", c.avg_margin},
        {"q", c.q},
        {"seed", c.seed},
        {"k_max", c.k_max},
    };
}

const char* criterion_name(Criterion c) {
    switch (c) {
        case Criterion::mv_utility: return "mv_utility";
        case Criterion::mv_frontier: return "mv_frontier";
        case Criterion::dividends: return "dividends";
    }
    return "unknown";
}

std::vector<MinerProfile> sample_miners(const NetworkConfig& config, PathRng& rng) {
    config.validate();
    const int m = config.n_miners;

    // Dirichlet(1,...,1) split of the network hashrate.
    std::vector<double> raw(m);
    double total = 0.0;
    for (int l = 0; l < m; ++l) {
        raw[l] = rng.exponential(1.0);
        total += raw[l];
    }

    std::vector<MinerProfile> miners;
    miners.reserve(m);
    for (int l = 0; l < m; ++l) {
        const double lambda_l = config.total_block_rate * raw[l] / total;
        const double eta = uniform_in(rng, config.profit_margin_range);
        const double beta = sample_beta(rng, config.ruin_beta_params);
        const double gamma = uniform_in(rng, config.gamma_range);
        const double cost = lambda_l * config.block_reward / (1.0 + eta);
        const double wealth =
            initial_wealth_for_ruin(solo_model(cost, lambda_l, config.block_reward), beta);
        miners.emplace_back(lambda_l, cost, wealth, gamma, beta);
    }
    return miners;
}

std::vector<double> calibrate_difficulties(const std::vector<double>& fees,
                                           const NetworkConfig& config) {
    config.validate();
    const double b = config.block_reward;
    const double lambda_bar = config.total_block_rate / config.n_miners;
    const double cost_bar = lambda_bar * b / (1.0 + config.avg_margin);
    const CompoundPoissonModel solo = solo_model(cost_bar, lambda_bar, b);
    const double x_bar = initial_wealth_for_ruin(solo, 0.5);
    const ScaleEvaluator solo_ev(solo, config.q);
    const double v_target = optimal_value(solo_ev, x_bar).value;

    auto pool_value = [&](double fee, double delta) {
        const PoolTerms t = pool_terms(PoolOffer(fee, delta), lambda_bar, b);
        const ScaleEvaluator ev(solo_model(cost_bar, t.share_rate, t.share_reward), config.q);
        return optimal_value(ev, x_bar).value;
    };

    std::vector<double> deltas;
    deltas.reserve(fees.size());
    const double tol = 1e-8 * std::max(1.0, std::abs(v_target));
    for (double fee : fees) {
        const double at_one = pool_value(fee, 1.0);
        if (std::abs(at_one - v_target) <= tol) {
            deltas.push_back(1.0);  // zero-fee pool: terms equal solo
            continue;
        }
        // Mean reward rate does not depend on delta but the variance shrinks
        // with it, so the value rises as delta falls. Keep the series depth
        // certified by bounding delta away from 0.
        const double net_gain = lambda_bar * b * (1.0 - fee) - cost_bar;
        double delta_min = 1e-3;
        if (net_gain > 0.0) {
            delta_min = std::max(delta_min, net_gain / (config.q * 36.0 * b * (1.0 - fee)));
        }
        delta_min = std::min(delta_min, 0.5);
        const double at_min = pool_value(fee, delta_min);
        if (at_min < v_target || at_one > v_target) {
            char msg[200];
            std::snprintf(msg, sizeof msg,
                          "calibration failed for fee %.6g: attainable value range "
                          "[%.10g, %.10g] does not reach the target %.10g",
                          fee, at_one, at_min, v_target);
            throw std::runtime_error(msg);
        }
        deltas.push_back(bisect_root(
            [&](double d) { return v_target - pool_value(fee, d); }, delta_min, 1.0, 1e-12));
    }
    return deltas;
}

CriterionResult allocate_all(const std::vector<MinerProfile>& miners,
                             const std::vector<PoolOffer>& offers, Criterion criterion,
                             const NetworkConfig& config) {
    if (offers.empty()) throw std::invalid_argument("allocate_all: offer list is empty");
    const std::size_t n_dest = offers.size();
    const std::vector<std::size_t> order = pool_sort_order(offers);

    CriterionResult result;
    result.pool_shares.assign(n_dest, 0.0);
    result.miner_weights.reserve(miners.size());

    for (std::size_t l = 0; l < miners.size(); ++l) {
        const MinerProfile& miner = miners[l];
        const SortedPools sp =
            terms_for_miner(offers, order, miner.block_rate, config.block_reward);

        std::vector<double> sorted_weights(n_dest, 0.0);
        switch (criterion) {
            case Criterion::mv_utility: {
                const double gamma = miner.risk_aversion.value_or(0.0);
                sorted_weights[mv_best_pool(sp.terms, gamma)] = 1.0;
                break;
            }
            case Criterion::mv_frontier: {
                // Risk budget proxy: the solo variance rate scaled by the
                // miner's ruin tolerance, clamped to the feasible interval.
                double v_min = std::numeric_limits<double>::infinity();
                double v_max = -std::numeric_limits<double>::infinity();
                for (const auto& t : sp.terms) {
                    const double v = t.share_rate * t.share_reward * t.share_reward;
                    v_min = std::min(v_min, v);
                    v_max = std::max(v_max, v);
                }
                const double beta = miner.target_ruin_prob.value_or(0.5);
                const double solo_var =
                    miner.block_rate * config.block_reward * config.block_reward;
                const double sigma2 = std::clamp(beta * solo_var, v_min, v_max);
                sorted_weights = efficient_frontier_point(sp.terms, sigma2).allocation.weights();
                break;
            }
            case Criterion::dividends: {
                OptimizeOptions opts;
                opts.k_max = config.k_max;
                opts.seed = config.seed ^ (0x6d696e65ULL + l * 0x9e3779b97f4a7c15ULL);
                sorted_weights =
                    optimize_allocation(miner, sp.terms, config.q, opts).allocation.weights();
                break;
            }
        }

        std::vector<double> weights(n_dest, 0.0);
        for (std::size_t pos = 0; pos < n_dest; ++pos) {
            weights[sp.original[pos]] = sorted_weights[pos];
        }
        for (std::size_t k = 0; k < n_dest; ++k) {
            result.pool_shares[k] += weights[k] * miner.block_rate / config.total_block_rate;
        }
        result.miner_weights.push_back(std::move(weights));
    }

    result.hhi = 0.0;
    for (double s : result.pool_shares) result.hhi += s * s;
    std::vector<double> sorted_shares = result.pool_shares;
    std::sort(sorted_shares.begin(), sorted_shares.end(), std::greater<double>());
    double cum = 0.0;
    result.nakamoto = 0;
    for (double s : sorted_shares) {
        cum += s;
        ++result.nakamoto;
        if (cum > 0.5) break;
    }
    return result;
}

NetworkReport run_study(const NetworkConfig& config) {
    config.validate();
    NetworkReport report;
    report.config = config;

    PathRng miner_rng(config.seed, 0);
    const std::vector<MinerProfile> miners = sample_miners(config, miner_rng);

    PathRng fee_rng(config.seed, 1);
    report.fees.reserve(config.n_pools);
    for (int k = 0; k < config.n_pools; ++k) {
        report.fees.push_back(uniform_in(fee_rng, config.fee_range));
    }
    report.deltas = calibrate_difficulties(report.fees, config);

    {
        const double b = config.block_reward;
        const double lambda_bar = config.total_block_rate / config.n_miners;
        const double cost_bar = lambda_bar * b / (1.0 + config.avg_margin);
        const CompoundPoissonModel solo = solo_model(cost_bar, lambda_bar, b);
        const ScaleEvaluator ev(solo, config.q);
        report.calibration_target = optimal_value(ev, initial_wealth_for_ruin(solo, 0.5)).value;
    }

    std::vector<PoolOffer> offers;
    offers.reserve(config.n_pools + 1);
    offers.push_back(PoolOffer::solo());
    for (int k = 0; k < config.n_pools; ++k) {
        offers.emplace_back(report.fees[k], report.deltas[k]);
    }

    for (Criterion crit : {Criterion::mv_utility, Criterion::mv_frontier, Criterion::dividends}) {
        report.criteria[criterion_name(crit)] = allocate_all(miners, offers, crit, config);
    }
    return report;
}

nlohmann::json network_report_to_json(const NetworkReport& report) {
    nlohmann::json j;
    j["config"] = network_config_to_json(report.config);
    j["fees"] = report.fees;
    j["difficulty_reductions"] = report.deltas;
    j["calibration_target"] = report.calibration_target;
    j["frontier_sigma2_rule"] = report.frontier_sigma2_rule;
    nlohmann::json crit = nlohmann::json::object();
    for (const auto& [name, res] : report.criteria) {
        crit[name] = nlohmann::json{
            {"pool_shares", res.pool_shares},
            {"hhi", res.hhi},
            {"nakamoto", res.nakamoto},
            {"miner_weights", res.miner_weights},
        };
    }
    j["criteria"] = crit;
    return j;
}

void write_shares_csv(std::ostream& out, const NetworkReport& report) {
    out << "criterion,pool_id,share\n";
    char buf[96];
    for (const auto& [name, res] : report.criteria) {
        for (std::size_t k = 0; k < res.pool_shares.size(); ++k) {
            std::snprintf(buf, sizeof buf, "%s,%zu,%.17g\n", name.c_str(), k,
                          res.pool_shares[k]);
            out << buf;
        }
    }
}

}  // namespace hashalloc
