#pragma once

#include "dagbft/check/checker.hpp"
#include "dagbft/sim/scenario.hpp"

#include <string>
#include <vector>

namespace dagbft::sweep {

struct SeedOutcome {
    uint64_t seed = 0;
    bool all_pass = true;
    std::vector<check::CheckResult> checks;
    check::Metrics metrics;
    check::FairnessMetrics fairness;
    uint64_t trace_hash = 0;
    sim::RunFlags flags;
    sim::SimTime time_unit_ticks = 0;
};

// Runs every seed of a scenario and checks each run. The serial path is the
// reference implementation; the parallel path distributes seeds over OpenMP
// threads and must produce bit-identical outcomes (runs share no state).
std::vector<SeedOutcome> run_many_serial(const sim::Scenario& sc);
std::vector<SeedOutcome> run_many_parallel(const sim::Scenario& sc, int jobs);
// Dispatches on jobs (<=1 -> serial).
std::vector<SeedOutcome> run_many(const sim::Scenario& sc, int jobs);

struct Aggregate {
    uint64_t runs = 0;
    uint64_t failed_runs = 0;
    // Per check name: failure count and the first counterexample seen.
    std::vector<std::pair<std::string, uint64_t>> check_failures;
    std::vector<check::CheckResult> first_failures;
    check::Metrics totals;
    // Fairness over all seeds: tx-share per process and the smallest
    // windowed share any seed exhibited.
    std::vector<double> horizon_ratio;
    std::vector<double> min_window_ratio;
    uint64_t drained_runs = 0;
    uint64_t drain_completed_runs = 0;
    double mean_time_unit = 0;  // in units

    bool all_pass() const { return failed_runs == 0; }
};

Aggregate aggregate(const sim::Scenario& sc, const std::vector<SeedOutcome>& outcomes);

// One SeedOutcome end to end (exposed for tests and the CLI replay path).
SeedOutcome evaluate_seed(const sim::Scenario& sc, uint64_t seed);

}  // namespace dagbft::sweep
