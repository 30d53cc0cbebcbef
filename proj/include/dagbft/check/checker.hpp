#pragma once

#include "dagbft/sim/simulator.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace dagbft::check {

struct Counterexample {
    uint64_t seed = 0;
    sim::SimTime time = 0;
    std::string what;  // processes / vertices involved
};

struct CheckResult {
    std::string name;
    bool pass = true;
    bool applicable = true;  // e.g. validity on an undrained run
    std::string detail;
    std::optional<Counterexample> cx;
};

// BAB safety properties, per run.
CheckResult check_total_order(const sim::RunResult& r);
CheckResult check_integrity(const sim::RunResult& r);
// Drained runs only: logs prefix-comparable and correct DAGs converged at
// quiescence.
CheckResult check_agreement(const sim::RunResult& r);
// Drained runs only: every pre-drain client a_bcast from a correct process
// appears in every correct DeliveryLog.
CheckResult check_validity(const sim::RunResult& r);
// Every prefix of size (2f+1)r carries >= (f+1)r correct-sourced entries.
CheckResult check_chain_quality(const sim::RunResult& r);
// Commit-path: a committed leader is strong-reachable from every later wave
// leader present in any correct DAG.
CheckResult check_lemma1(const sim::RunResult& r);
// Common core: every completed wave has V (round w,1) and U (round w,4),
// both >= 2f+1, fully strong-connected; brute-force subset search.
CheckResult check_lemma2(const sim::RunResult& r);
CheckResult check_increasing_commit_order(const sim::RunResult& r);
// Quorum intersection: 2f+1 voters at one process imply >= f+1 at every
// process that completed the round.
CheckResult check_quorum_intersection(const sim::RunResult& r);
// No two r_deliveries per tag, no duplicate (round, source) anywhere.
CheckResult check_no_equivocation(const sim::RunResult& r);

// The named checks, in a stable order. Unknown names throw.
std::vector<CheckResult> run_checks(const sim::RunResult& r,
                                    const std::vector<std::string>& names);
const std::vector<std::string>& all_check_names();
// Safety set (always applicable) vs the drained-only additions.
std::vector<std::string> default_checks(bool drained);

struct Metrics {
    uint64_t completed_waves = 0;
    uint64_t commits = 0;
    uint64_t ordered_txs = 0;   // txs in client blocks delivered at all correct processes
    uint64_t latency_samples = 0;
    double latency_units_sum = 0;  // (deliver - a_bcast) / time_unit, summed
    uint64_t msgs_sent = 0;
    uint64_t bits_sent = 0;

    double waves_per_commit() const {
        return commits ? static_cast<double>(completed_waves) / commits : 0.0;
    }
    double commit_prob() const {
        return completed_waves ? static_cast<double>(commits) / completed_waves : 0.0;
    }
    double mean_latency_units() const {
        return latency_samples ? latency_units_sum / latency_samples : 0.0;
    }
    double msgs_per_tx() const {
        return ordered_txs ? static_cast<double>(msgs_sent) / ordered_txs : 0.0;
    }
    double bits_per_tx() const {
        return ordered_txs ? static_cast<double>(bits_sent) / ordered_txs : 0.0;
    }

    void add(const Metrics& o) {
        completed_waves += o.completed_waves;
        commits += o.commits;
        ordered_txs += o.ordered_txs;
        latency_samples += o.latency_samples;
        latency_units_sum += o.latency_units_sum;
        msgs_sent += o.msgs_sent;
        bits_sent += o.bits_sent;
    }
};

Metrics measure_performance(const sim::RunResult& r);

// Long-run and windowed proposer shares over the delivered ledger,
// tx-weighted, denominators restricted to correct proposers.
struct FairnessMetrics {
    uint32_t window = 0;
    std::vector<double> horizon_ratio;     // per process; -1 for faulty
    std::vector<double> min_window_ratio;  // per process; -1 for faulty
    std::vector<uint64_t> txs_by_proposer;
    uint64_t correct_txs_total = 0;
};

FairnessMetrics measure_fairness(const sim::RunResult& r, uint32_t window);

// Probability that `copies` distinct uniformly-chosen processes out of n
// include at least one of the n-f correct ones: 1 - C(f,copies)/C(n,copies).
double copy_inclusion_probability(uint32_t n, uint32_t f, uint32_t copies);
double copy_inclusion_monte_carlo(uint32_t n, uint32_t f, uint32_t copies, uint64_t trials,
                                  uint64_t seed);

}  // namespace dagbft::check
