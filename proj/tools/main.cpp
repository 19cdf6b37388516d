#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hashalloc/dividends.hpp"
#include "hashalloc/levy.hpp"
#include "hashalloc/mean_variance.hpp"
#include "hashalloc/network.hpp"
#include "hashalloc/scale.hpp"
#include "hashalloc/scenario.hpp"
#include "hashalloc/validation.hpp"

namespace {

using hashalloc::Scenario;
using nlohmann::json;

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<double> parse_weights(const std::string& csv) {
    std::vector<double> w;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) w.push_back(std::stod(item));
    return w;
}

hashalloc::CompoundPoissonModel scenario_model(const Scenario& sc,
                                               const std::optional<std::string>& weights_csv) {
    const auto terms = sc.pool_terms_list();
    std::vector<double> w(terms.size(), 0.0);
    if (weights_csv) {
        w = parse_weights(*weights_csv);
        if (w.size() != terms.size()) {
            throw std::invalid_argument("--weights length does not match the pool count (" +
                                        std::to_string(terms.size()) + ")");
        }
    } else {
        w[0] = 1.0;  // all hashpower on pool 0 (solo unless no_solo)
    }
    return build_model(sc.miner, terms, hashalloc::Allocation::normalized(w));
}

int cmd_eval(const std::string& scenario_path, const std::string& what,
             std::optional<double> x_opt, const std::string& a_str,
             std::optional<double> theta_opt, std::optional<double> q_opt,
             const std::optional<std::string>& weights_csv) {
    Scenario sc = hashalloc::load_scenario(scenario_path);
    const double q = q_opt.value_or(sc.q);
    const auto model = scenario_model(sc, weights_csv);

    json inputs{{"scenario", scenario_path}, {"what", what}, {"q", q}};
    if (x_opt) inputs["x"] = *x_opt;
    if (theta_opt) inputs["theta"] = *theta_opt;
    if (weights_csv) inputs["weights"] = *weights_csv;

    json outputs;
    auto need_x = [&]() {
        if (!x_opt) throw std::invalid_argument("eval " + what + ": --x is required");
        return *x_opt;
    };
    if (what == "psi") {
        if (!theta_opt) throw std::invalid_argument("eval psi: --theta is required");
        outputs["psi"] = hashalloc::laplace_exponent(model, *theta_opt);
    } else if (what == "phi") {
        outputs["phi"] = hashalloc::phi(model, q);
    } else if (what == "ruin") {
        outputs["ruin"] = hashalloc::ruin_probability(model, need_x());
    } else if (what == "W" || what == "Z" || what == "Zbar") {
        hashalloc::ScaleEvaluator ev(model, q);
        const double x = need_x();
        outputs[what] = what == "W" ? ev.W(x) : what == "Z" ? ev.Z(x) : ev.Zbar(x);
    } else if (what == "value") {
        hashalloc::ScaleEvaluator ev(model, q);
        const double x = need_x();
        double a;
        if (a_str == "auto") {
            a = hashalloc::optimal_barrier(ev);
        } else {
            a = std::stod(a_str);
        }
        inputs["a"] = a;
        outputs["value"] = hashalloc::value_function(ev, x, a);
        outputs["barrier"] = a;
    } else {
        throw std::invalid_argument("eval: unknown quantity '" + what + "'");
    }
    std::cout << json{{"inputs", inputs}, {"outputs", outputs}}.dump() << "\n";
    return 0;
}

int cmd_optimize(const std::string& scenario_path, std::optional<double> q_opt,
                 std::uint64_t seed, const std::string& out_csv) {
    Scenario sc = hashalloc::load_scenario(scenario_path);
    const double q = q_opt.value_or(sc.q);
    const auto terms = sc.pool_terms_list();

    hashalloc::OptimizeOptions opts;
    opts.seed = seed;
    const auto report = hashalloc::optimize_allocation(sc.miner, terms, q, opts);

    json jrep{{"allocation", report.allocation.weights()},
              {"barrier", report.barrier},
              {"value", report.value},
              {"phi_q", report.phi_q},
              {"psi_prime0", report.psi_prime0},
              {"active_pools", report.active_pools},
              {"q", q}};
    std::cout << jrep.dump() << "\n";

    // Per-pool candidate table: every single-pool value, best first.
    struct Row {
        std::size_t pool;
        double value;
    };
    std::vector<Row> rows;
    for (std::size_t k = 0; k < terms.size(); ++k) {
        std::vector<double> w(terms.size(), 0.0);
        w[k] = 1.0;
        hashalloc::ScaleEvaluator ev(
            build_model(sc.miner, terms, hashalloc::Allocation(w)), q);
        rows.push_back({k, hashalloc::optimal_value(ev, sc.miner.initial_wealth).value});
    }
    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        return a.value != b.value ? a.value > b.value : a.pool < b.pool;
    });

    std::ostringstream csv;
    csv << "pool,share_rate,share_reward,fee,difficulty_reduction,value\n";
    for (const auto& r : rows) {
        const auto& p = sc.pools[r.pool];
        csv << r.pool << "," << fmt17(p.terms.share_rate) << "," << fmt17(p.terms.share_reward)
            << ",";
        if (p.offer) {
            csv << fmt17(p.offer->fee) << "," << fmt17(p.offer->difficulty_reduction);
        } else {
            csv << ",";
        }
        csv << "," << fmt17(r.value) << "\n";
    }
    if (out_csv.empty()) {
        std::cout << csv.str();
    } else {
        std::ofstream out(out_csv);
        if (!out) throw std::runtime_error("cannot write " + out_csv);
        out << csv.str();
    }
    return 0;
}

int cmd_frontier(const std::string& scenario_path, int n_points, const std::string& out_path,
                 const std::string& format) {
    Scenario sc = hashalloc::load_scenario(scenario_path);
    const auto curve = hashalloc::frontier_curve(sc.pool_terms_list(), n_points);
    std::ostringstream body;
    if (format == "json") {
        json arr = json::array();
        for (const auto& pt : curve) {
            const auto i = pt.segment.first;
            const auto j = pt.segment.second;
            arr.push_back({{"sigma2", pt.variance_rate},
                           {"expected_rate", pt.expected_rate},
                           {"pool_i", i},
                           {"pool_j", j},
                           {"w_i", pt.allocation[i]},
                           {"w_j", i == j ? 0.0 : pt.allocation[j]}});
        }
        body << arr.dump() << "\n";
    } else if (format == "csv") {
        hashalloc::write_frontier_csv(body, curve);
    } else {
        throw std::invalid_argument("frontier: --format must be json or csv");
    }
    if (out_path.empty()) {
        std::cout << body.str();
    } else {
        std::ofstream out(out_path);
        if (!out) throw std::runtime_error("cannot write " + out_path);
        out << body.str();
    }
    return 0;
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir,
                 std::optional<std::uint64_t> seed_opt) {
    std::ifstream in(config_path);
    if (!in) throw std::runtime_error("cannot open config file: " + config_path);
    json jc;
    in >> jc;
    hashalloc::NetworkConfig config = hashalloc::network_config_from_json(jc);
    if (seed_opt) config.seed = *seed_opt;

    const auto report = hashalloc::run_study(config);

    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    {
        std::ofstream out(fs::path(out_dir) / "report.json");
        out << hashalloc::network_report_to_json(report).dump(2) << "\n";
    }
    {
        std::ofstream out(fs::path(out_dir) / "shares.csv");
        hashalloc::write_shares_csv(out, report);
    }

    std::printf("%-12s %-10s %-9s %s\n", "criterion", "hhi", "nakamoto", "top shares");
    for (const auto& [name, res] : report.criteria) {
        std::vector<double> s = res.pool_shares;
        std::sort(s.begin(), s.end(), std::greater<double>());
        std::printf("%-12s %-10.4f %-9d %.3f %.3f %.3f\n", name.c_str(), res.hhi, res.nakamoto,
                    s[0], s.size() > 1 ? s[1] : 0.0, s.size() > 2 ? s[2] : 0.0);
    }
    return 0;
}

int cmd_validate(const std::string& level_str, std::uint64_t seed) {
    const auto level = level_str == "full" ? hashalloc::ValidationLevel::full
                                           : hashalloc::ValidationLevel::quick;
    const auto results = hashalloc::run_validation(level, seed);
    bool all_pass = true;
    for (const auto& r : results) {
        std::printf("%s %-32s analytic=%.8g mc=%.8g se=%.3g z=%.2f\n",
                    r.pass ? "PASS" : "FAIL", r.name.c_str(), r.analytic, r.simulated,
                    r.std_error, r.z);
        all_pass = all_pass && r.pass;
    }
    return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hashpower allocation across pay-per-share mining pools"};
    app.require_subcommand(1);

    std::string scenario_path, what, a_str = "auto", config_path;
    std::string opt_csv, frontier_out, frontier_format = "csv", sim_out_dir = ".";
    std::string level = "quick";
    std::optional<double> x_opt, theta_opt, q_opt;
    std::optional<std::string> weights_csv;
    std::optional<std::uint64_t> seed_opt;
    std::uint64_t seed = 1;
    int n_points = 50;

    auto* eval = app.add_subcommand("eval", "evaluate one quantity on a scenario");
    eval->add_option("--scenario", scenario_path, "scenario JSON path")->required();
    eval->add_option("--what", what, "psi|phi|ruin|W|Z|Zbar|value")->required();
    eval->add_option("--x", x_opt, "wealth / evaluation point");
    eval->add_option("--a", a_str, "barrier level or 'auto'");
    eval->add_option("--theta", theta_opt, "Laplace exponent argument");
    eval->add_option("--q", q_opt, "discount rate override");
    eval->add_option("--weights", weights_csv, "comma-separated pool weights (default: pool 0)");

    auto* optimize = app.add_subcommand("optimize", "optimal hashpower split by dividend value");
    optimize->add_option("--scenario", scenario_path, "scenario JSON path")->required();
    optimize->add_option("--q", q_opt, "discount rate override");
    optimize->add_option("--seed", seed, "random seed for the swarm stage");
    optimize->add_option("--out", opt_csv, "write the candidate table CSV here");

    auto* frontier = app.add_subcommand("frontier", "mean-variance efficient frontier CSV");
    frontier->add_option("--scenario", scenario_path, "scenario JSON path")->required();
    frontier->add_option("--n", n_points, "number of frontier points");
    frontier->add_option("--out", frontier_out, "output path (default stdout)");
    frontier->add_option("--format", frontier_format, "json|csv");

    auto* simulate = app.add_subcommand("simulate", "network decentralization study");
    simulate->add_option("--config", config_path, "network config JSON path")->required();
    simulate->add_option("--out-dir", sim_out_dir, "output directory");
    simulate->add_option("--seed", seed_opt, "seed override");

    auto* validate = app.add_subcommand("validate", "Monte Carlo vs closed-form checks");
    validate->add_option("--level", level, "quick|full");
    validate->add_option("--seed", seed, "random seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (eval->parsed()) return cmd_eval(scenario_path, what, x_opt, a_str, theta_opt, q_opt, weights_csv);
        if (optimize->parsed()) return cmd_optimize(scenario_path, q_opt, seed, opt_csv);
        if (frontier->parsed()) return cmd_frontier(scenario_path, n_points, frontier_out, frontier_format);
        if (simulate->parsed()) return cmd_simulate(config_path, sim_out_dir, seed_opt);
        if (validate->parsed()) return cmd_validate(level, seed);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
