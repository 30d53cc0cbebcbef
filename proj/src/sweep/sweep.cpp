#include "dagbft/sweep/sweep.hpp"

#include <algorithm>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace dagbft::sweep {

SeedOutcome evaluate_seed(const sim::Scenario& sc, uint64_t seed) {
    SeedOutcome out;
    out.seed = seed;
    try {
        const sim::RunResult r = sim::run_simulation(sc.config_for_seed(seed));
        out.checks = check::run_checks(r, sc.checks);
        for (const auto& c : out.checks)
            if (c.applicable && !c.pass) out.all_pass = false;
        out.metrics = check::measure_performance(r);
        out.fairness = check::measure_fairness(r, sc.fairness_window);
        out.trace_hash = sim::trace_hash(r);
        out.flags = r.flags;
        out.time_unit_ticks = r.time_unit_ticks;
    } catch (const std::exception& e) {
        // Exceptions cannot cross the OpenMP region; surface them as a
        // failing outcome tied to the seed instead.
        out.all_pass = false;
        check::CheckResult res;
        res.name = "run";
        res.pass = false;
        res.detail = e.what();
        res.cx = check::Counterexample{seed, 0, e.what()};
        out.checks.assign(sc.checks.size(), res);
        if (out.checks.empty()) out.checks.push_back(res);
    }
    return out;
}

std::vector<SeedOutcome> run_many_serial(const sim::Scenario& sc) {
    std::vector<SeedOutcome> out(sc.seeds.size());
    for (size_t i = 0; i < sc.seeds.size(); ++i) out[i] = evaluate_seed(sc, sc.seeds[i]);
    return out;
}

std::vector<SeedOutcome> run_many_parallel(const sim::Scenario& sc, int jobs) {
    std::vector<SeedOutcome> out(sc.seeds.size());
#ifdef _OPENMP
    if (jobs < 1) jobs = omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(jobs)
    for (size_t i = 0; i < sc.seeds.size(); ++i) out[i] = evaluate_seed(sc, sc.seeds[i]);
#else
    (void)jobs;
    for (size_t i = 0; i < sc.seeds.size(); ++i) out[i] = evaluate_seed(sc, sc.seeds[i]);
#endif
    return out;
}

std::vector<SeedOutcome> run_many(const sim::Scenario& sc, int jobs) {
    if (jobs == 1) return run_many_serial(sc);
    return run_many_parallel(sc, jobs);
}

Aggregate aggregate(const sim::Scenario& sc, const std::vector<SeedOutcome>& outcomes) {
    Aggregate agg;
    agg.runs = outcomes.size();
    const uint32_t n = sc.base.n;
    std::vector<uint64_t> txs_by(n, 0);
    uint64_t txs_total = 0;
    agg.horizon_ratio.assign(n, -1.0);
    agg.min_window_ratio.assign(n, 2.0);
    double time_unit_sum = 0;

    for (const auto& name : sc.checks) agg.check_failures.emplace_back(name, 0);

    for (const auto& o : outcomes) {
        if (!o.all_pass) ++agg.failed_runs;
        for (size_t i = 0; i < o.checks.size(); ++i) {
            const auto& c = o.checks[i];
            if (c.applicable && !c.pass) {
                ++agg.check_failures[i].second;
                bool seen = false;
                for (const auto& ff : agg.first_failures)
                    if (ff.name == c.name) seen = true;
                if (!seen) agg.first_failures.push_back(c);
            }
        }
        agg.totals.add(o.metrics);
        for (uint32_t p = 0; p < n; ++p) {
            if (o.fairness.horizon_ratio[p] < 0) continue;
            txs_by[p] += o.fairness.txs_by_proposer[p];
            agg.min_window_ratio[p] = std::min(agg.min_window_ratio[p], o.fairness.min_window_ratio[p]);
        }
        txs_total += o.fairness.correct_txs_total;
        if (o.flags.drained) ++agg.drained_runs;
        if (o.flags.drain_completed) ++agg.drain_completed_runs;
        time_unit_sum += static_cast<double>(o.time_unit_ticks) / sim::TICKS_PER_UNIT;
    }
    for (uint32_t p = 0; p < n; ++p) {
        if (agg.min_window_ratio[p] > 1.5) {
            agg.min_window_ratio[p] = -1.0;  // never correct in any run
            continue;
        }
        agg.horizon_ratio[p] =
            txs_total ? static_cast<double>(txs_by[p]) / static_cast<double>(txs_total) : 0.0;
    }
    if (!outcomes.empty()) agg.mean_time_unit = time_unit_sum / static_cast<double>(outcomes.size());
    return agg;
}

}  // namespace dagbft::sweep
