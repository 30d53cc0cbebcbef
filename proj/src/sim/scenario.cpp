#include "dagbft/sim/scenario.hpp"

#include "dagbft/check/checker.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace dagbft::sim {

namespace {

using nlohmann::json;

DelayRange parse_range(const json& j, const std::string& field) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw std::invalid_argument(field + ": expected [lo, hi] in time units");
    DelayRange r;
    r.lo = ticks_from_units(j[0].get<double>());
    r.hi = ticks_from_units(j[1].get<double>());
    if (r.lo < 0 || r.hi < r.lo) throw std::invalid_argument(field + ": invalid range");
    return r;
}

ByzantineBehavior::Kind behavior_kind(const std::string& s) {
    if (s == "silent") return ByzantineBehavior::Kind::Silent;
    if (s == "equivocate") return ByzantineBehavior::Kind::Equivocate;
    if (s == "malformed_edges") return ByzantineBehavior::Kind::MalformedEdges;
    if (s == "withhold") return ByzantineBehavior::Kind::Withhold;
    if (s == "adaptive_corrupt") return ByzantineBehavior::Kind::AdaptiveCorrupt;
    throw std::invalid_argument("behaviors.kind: unknown '" + s + "'");
}

}  // namespace

Scenario parse_scenario_json(const std::string& text, const std::string& origin) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(origin + ": " + e.what());
    }

    Scenario sc;
    sc.name = j.value("name", origin);

    RunConfig& c = sc.base;
    if (!j.contains("n") || !j.contains("f"))
        throw std::invalid_argument("n/f: both are required");
    c.n = j.at("n").get<uint32_t>();
    c.f = j.at("f").get<uint32_t>();
    c.horizon_rounds = j.value("horizonRounds", uint64_t{40});
    c.drain = j.value("drain", true);
    c.batch_size = j.value("batchSize", uint32_t{1});
    c.tx_bytes = j.value("txBytes", uint32_t{8});
    if (j.contains("maxEvents")) c.max_events = j.at("maxEvents").get<uint64_t>();

    const std::string model = j.value("model", std::string("random_arrival"));
    const auto mk = model_from_name(model);
    if (!mk) throw std::invalid_argument("model: unknown '" + model + "'");
    c.model = *mk;

    if (j.contains("modelParams")) {
        const json& mp = j.at("modelParams");
        if (mp.contains("omega")) c.model_params.omega = parse_range(mp.at("omega"), "modelParams.omega");
        if (mp.contains("omega1"))
            c.model_params.omega1 = parse_range(mp.at("omega1"), "modelParams.omega1");
        if (mp.contains("omega2"))
            c.model_params.omega2 = parse_range(mp.at("omega2"), "modelParams.omega2");
        if (mp.contains("headGap"))
            c.model_params.head_gap = parse_range(mp.at("headGap"), "modelParams.headGap");
        if (mp.contains("adversarialDelay"))
            c.model_params.adversarial_delay =
                ticks_from_units(mp.at("adversarialDelay").get<double>());
        if (mp.contains("k")) c.model_params.k = mp.at("k").get<uint32_t>();
        if (mp.contains("strategy")) c.model_params.strategy = mp.at("strategy").get<std::string>();
        if (mp.contains("victim")) c.model_params.victim = mp.at("victim").get<uint32_t>();
        if (mp.contains("repartitionPeriod"))
            c.model_params.repartition_period =
                ticks_from_units(mp.at("repartitionPeriod").get<double>());
    }

    if (j.contains("behaviors")) {
        for (const json& b : j.at("behaviors")) {
            BehaviorSpec spec;
            if (!b.contains("process")) throw std::invalid_argument("behaviors.process: required");
            spec.process = b.at("process").get<uint32_t>();
            spec.behavior.kind = behavior_kind(b.value("kind", std::string()));
            if (b.contains("targets"))
                for (const json& t : b.at("targets"))
                    spec.behavior.withhold_targets.push_back(t.get<uint32_t>());
            if (b.contains("at")) spec.behavior.corrupt_at = ticks_from_units(b.at("at").get<double>());
            c.behaviors.push_back(std::move(spec));
        }
    }

    if (j.contains("seeds")) {
        const json& s = j.at("seeds");
        if (s.is_array()) {
            for (const json& v : s) sc.seeds.push_back(v.get<uint64_t>());
        } else if (s.is_object()) {
            const uint64_t start = s.value("start", uint64_t{1});
            const uint64_t count = s.value("count", uint64_t{1});
            for (uint64_t i = 0; i < count; ++i) sc.seeds.push_back(start + i);
        } else {
            throw std::invalid_argument("seeds: expected array or {start, count}");
        }
    } else {
        sc.seeds = {1};
    }
    if (sc.seeds.empty()) throw std::invalid_argument("seeds: empty");

    if (j.contains("checks"))
        for (const json& v : j.at("checks")) sc.checks.push_back(v.get<std::string>());
    else
        sc.checks = check::default_checks(c.drain);
    for (const auto& name : sc.checks) {
        const auto& known = check::all_check_names();
        if (std::find(known.begin(), known.end(), name) == known.end())
            throw std::invalid_argument("checks: unknown '" + name + "'");
    }

    sc.fairness_window = j.value("fairnessWindow", uint32_t{32});

    c.seed = sc.seeds.front();
    c.validate();
    return sc;
}

Scenario load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open scenario file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scenario_json(ss.str(), path);
}

}  // namespace dagbft::sim
