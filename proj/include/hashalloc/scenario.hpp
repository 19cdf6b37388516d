#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hashalloc/model.hpp"

namespace hashalloc {

// One pool entry of a scenario file: either a posted (fee, difficulty
// reduction) contract or raw (share rate, share reward) terms. When the offer
// form is used the terms are derived for the scenario's miner.
struct ScenarioPool {
    std::optional<PoolOffer> offer;
    PoolTerms terms;
};

// Parsed scenario: the miner, the block reward, a discount rate and the pool
// list with solo prepended at index 0 (unless no_solo is set). If the miner's
// initial wealth is omitted but a target ruin probability is given, the
// wealth is derived from the solo model.
struct Scenario {
    MinerProfile miner;
    double block_reward;
    double q;
    bool no_solo;
    std::vector<ScenarioPool> pools;

    std::vector<PoolTerms> pool_terms_list() const;
};

Scenario parse_scenario(const nlohmann::json& j);
Scenario load_scenario(const std::string& path);

}  // namespace hashalloc
