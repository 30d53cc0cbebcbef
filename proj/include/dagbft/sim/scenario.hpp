#pragma once

#include "dagbft/sim/config.hpp"

#include <string>
#include <vector>

namespace dagbft::sim {

// One experiment: a run configuration template plus the seed set and the
// checks to assert. Loaded from a JSON config file (conventionally *.cfg).
struct Scenario {
    std::string name;
    RunConfig base;                   // seed field ignored; filled per run
    std::vector<uint64_t> seeds;
    std::vector<std::string> checks;  // empty -> defaults for the drain mode
    uint32_t fairness_window = 32;

    RunConfig config_for_seed(uint64_t seed) const {
        RunConfig c = base;
        c.seed = seed;
        return c;
    }
};

// Parses and validates; throws std::invalid_argument naming the offending
// field on bad input.
Scenario load_scenario_file(const std::string& path);
Scenario parse_scenario_json(const std::string& text, const std::string& origin);

}  // namespace dagbft::sim
