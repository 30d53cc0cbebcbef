// Experiment runner: executes seeded simulation sweeps over scenario
// configs, invokes the checker, and emits reports. Exit code is nonzero iff
// any asserted property failed.

#include "dagbft/check/checker.hpp"
#include "dagbft/sim/scenario.hpp"
#include "dagbft/sweep/sweep.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>

using namespace dagbft;
using nlohmann::json;

namespace {

std::vector<std::string> split_list(const std::string& csv) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : csv) {
        if (c == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

json report_json(const sim::Scenario& sc, const sweep::Aggregate& agg,
                 const std::vector<sweep::SeedOutcome>& outcomes) {
    json rep;
    rep["scenario"] = sc.name;
    rep["n"] = sc.base.n;
    rep["f"] = sc.base.f;
    rep["model"] = sim::model_name(sc.base.model);
    rep["runs"] = agg.runs;
    rep["failedRuns"] = agg.failed_runs;
    rep["drainedRuns"] = agg.drained_runs;
    rep["drainCompletedRuns"] = agg.drain_completed_runs;

    json checks = json::array();
    for (const auto& [name, failures] : agg.check_failures) {
        json c;
        c["name"] = name;
        c["failures"] = failures;
        c["pass"] = failures == 0;
        for (const auto& ff : agg.first_failures) {
            if (ff.name == name && ff.cx) {
                c["counterexample"] = {{"seed", ff.cx->seed},
                                       {"simTime", ff.cx->time},
                                       {"what", ff.cx->what}};
            }
        }
        checks.push_back(c);
    }
    rep["checks"] = checks;

    rep["metrics"] = {
        {"completedWaves", agg.totals.completed_waves},
        {"commits", agg.totals.commits},
        {"wavesPerCommit", agg.totals.waves_per_commit()},
        {"commitProbPerWave", agg.totals.commit_prob()},
        {"latencyTimeUnits", agg.totals.mean_latency_units()},
        {"orderedTxs", agg.totals.ordered_txs},
        {"msgsPerOrderedTx", agg.totals.msgs_per_tx()},
        {"bitsPerOrderedTx", agg.totals.bits_per_tx()},
        {"meanTimeUnit", agg.mean_time_unit},
    };
    rep["fairness"] = {{"horizonRatio", agg.horizon_ratio},
                       {"minWindowRatio", agg.min_window_ratio},
                       {"window", sc.fairness_window}};

    json seeds = json::array();
    for (const auto& o : outcomes)
        if (!o.all_pass) seeds.push_back(o.seed);
    rep["failingSeeds"] = seeds;
    return rep;
}

int cmd_run(const std::string& path, const std::string& seed_range, int jobs,
            const std::string& emit_dir, const std::string& report_path,
            const std::string& check_list) {
    sim::Scenario sc = sim::load_scenario_file(path);
    if (!seed_range.empty()) {
        const auto colon = seed_range.find(':');
        if (colon == std::string::npos)
            throw std::invalid_argument("--seed-range expects A:B");
        const uint64_t a = std::stoull(seed_range.substr(0, colon));
        const uint64_t b = std::stoull(seed_range.substr(colon + 1));
        if (b < a) throw std::invalid_argument("--seed-range expects A <= B");
        sc.seeds.clear();
        for (uint64_t s = a; s <= b; ++s) sc.seeds.push_back(s);
    }
    if (!check_list.empty()) {
        sc.checks = split_list(check_list);
        const auto& known = check::all_check_names();
        for (const auto& name : sc.checks)
            if (std::find(known.begin(), known.end(), name) == known.end())
                throw std::invalid_argument("--check: unknown '" + name + "'");
    }

    const auto outcomes = sweep::run_many(sc, jobs);
    const auto agg = sweep::aggregate(sc, outcomes);

    std::cout << "scenario " << sc.name << ": " << agg.runs << " runs, "
              << (agg.runs - agg.failed_runs) << " clean\n";
    for (const auto& [name, failures] : agg.check_failures)
        std::cout << "  [" << (failures == 0 ? "PASS" : "FAIL") << "] " << name
                  << (failures ? " (" + std::to_string(failures) + " failing runs)" : "") << "\n";
    std::cout << "  wavesPerCommit=" << agg.totals.waves_per_commit()
              << " commitProb=" << agg.totals.commit_prob()
              << " latency=" << agg.totals.mean_latency_units() << "tu"
              << " bits/tx=" << agg.totals.bits_per_tx() << "\n";
    for (const auto& ff : agg.first_failures)
        if (ff.cx)
            std::cout << "  counterexample " << ff.name << ": seed " << ff.cx->seed << " — "
                      << ff.cx->what << "\n";

    if (!emit_dir.empty()) {
        std::filesystem::create_directories(emit_dir);
        for (uint64_t seed : sc.seeds) {
            const auto r = sim::run_simulation(sc.config_for_seed(seed));
            std::ofstream t(emit_dir + "/" + sc.name + "_" + std::to_string(seed) +
                            ".trace.jsonl");
            t << sim::trace_to_jsonl(r);
            std::ofstream d(emit_dir + "/" + sc.name + "_" + std::to_string(seed) +
                            ".deliveries.jsonl");
            for (uint32_t p = 0; p < r.config.n; ++p) d << sim::delivery_log_to_jsonl(r, p);
        }
    }
    if (!report_path.empty()) {
        std::ofstream rep(report_path);
        rep << report_json(sc, agg, outcomes).dump(2) << "\n";
    }
    return agg.all_pass() ? 0 : 1;
}

int cmd_replay(const std::string& path, uint64_t seed, const std::string& trace_file) {
    const sim::Scenario sc = sim::load_scenario_file(path);
    const auto first = sim::run_simulation(sc.config_for_seed(seed));
    const std::string trace = sim::trace_to_jsonl(first);

    std::string reference;
    if (!trace_file.empty()) {
        std::ifstream in(trace_file, std::ios::binary);
        if (!in) throw std::invalid_argument("cannot open trace file: " + trace_file);
        std::ostringstream ss;
        ss << in.rdbuf();
        reference = ss.str();
    } else {
        const auto second = sim::run_simulation(sc.config_for_seed(seed));
        reference = sim::trace_to_jsonl(second);
    }
    if (trace == reference) {
        std::cout << "replay identical: " << sc.name << " seed " << seed << " ("
                  << trace.size() << " bytes)\n";
        return 0;
    }
    size_t i = 0;
    while (i < std::min(trace.size(), reference.size()) && trace[i] == reference[i]) ++i;
    std::cout << "replay DIVERGED at byte " << i << "\n";
    return 1;
}

int cmd_copies(uint32_t n, uint32_t f, uint32_t copies, uint64_t trials, uint64_t seed) {
    const double exact = check::copy_inclusion_probability(n, f, copies);
    const double mc = check::copy_inclusion_monte_carlo(n, f, copies, trials, seed);
    std::cout << "P(include a correct process | n=" << n << ", f=" << f << ", copies=" << copies
              << ") = " << exact << " (exact), " << mc << " (monte carlo, " << trials
              << " trials)\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"DAG-based asynchronous BFT atomic broadcast simulator"};
    app.require_subcommand(1);

    std::string scenario_path, seed_range, emit_dir, report_path, check_list, trace_file;
    int jobs = 0;
    uint64_t seed = 1, trials = 100000;
    uint32_t cn = 100, cf = 33, ccopies = 4;

    auto* run = app.add_subcommand("run", "execute a scenario sweep and check properties");
    run->add_option("scenario", scenario_path, "scenario config file")->required();
    run->add_option("--seed-range", seed_range, "override seeds as A:B inclusive");
    run->add_option("--jobs", jobs, "parallel runs (0 = all cores, 1 = serial)");
    run->add_option("--emit-traces", emit_dir, "write per-seed trace/delivery JSONL here");
    run->add_option("--report", report_path, "write a JSON report here");
    run->add_option("--check", check_list, "comma-separated check list override");

    auto* replay = app.add_subcommand("replay", "re-execute one seed and demand a byte-identical trace");
    replay->add_option("scenario", scenario_path, "scenario config file")->required();
    replay->add_option("--seed", seed, "seed to replay")->required();
    replay->add_option("--trace", trace_file, "compare against this archived trace");

    auto* copies = app.add_subcommand("copies", "client copy inclusion probability");
    copies->add_option("--n", cn, "total processes");
    copies->add_option("--f", cf, "faulty processes");
    copies->add_option("--copies", ccopies, "copies the client sends");
    copies->add_option("--trials", trials, "monte carlo trials");
    copies->add_option("--seed", seed, "monte carlo seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed())
            return cmd_run(scenario_path, seed_range, jobs, emit_dir, report_path, check_list);
        if (replay->parsed()) return cmd_replay(scenario_path, seed, trace_file);
        if (copies->parsed()) return cmd_copies(cn, cf, ccopies, trials, seed);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
