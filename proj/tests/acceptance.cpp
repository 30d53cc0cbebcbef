// Acceptance suite: runs every gate criterion at its stated scale and prints
// one PASS/FAIL line per criterion. Exit code is nonzero iff any fail.
//
// DAGBFT_ACCEPT_SEEDS overrides the per-combination seed count of the big
// safety sweep (default 1000) for quick local iteration; the default is the
// gate.

#include "synthetic_violations.hpp"

#include "dagbft/check/checker.hpp"
#include "dagbft/sweep/sweep.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <sstream>

using namespace dagbft;

namespace {

struct Criterion {
    int id;
    std::string name;
    bool pass;
    std::string detail;
};

std::vector<Criterion> results;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
    results.push_back({id, name, pass, detail});
    std::cout << "[" << (pass ? "PASS" : "FAIL") << "] criterion " << id << " (" << name
              << "): " << detail << std::endl;
}

uint64_t sweep_seeds() {
    if (const char* env = std::getenv("DAGBFT_ACCEPT_SEEDS")) {
        const uint64_t v = std::strtoull(env, nullptr, 10);
        if (v >= 1) return v;
    }
    return 1000;
}

sim::Scenario scenario(uint32_t n, uint32_t f, sim::ModelKind model,
                       std::vector<sim::BehaviorSpec> behaviors, uint64_t horizon, bool drain,
                       uint64_t seed_base, uint64_t seed_count) {
    sim::Scenario sc;
    sc.base.n = n;
    sc.base.f = f;
    sc.base.model = model;
    sc.base.behaviors = std::move(behaviors);
    sc.base.horizon_rounds = horizon;
    sc.base.drain = drain;
    if (model == sim::ModelKind::MobilePartialControl ||
        model == sim::ModelKind::RandomPartialControl)
        sc.base.model_params.k = 2 * f + 1;
    sc.checks = check::default_checks(drain);
    for (uint64_t i = 0; i < seed_count; ++i) sc.seeds.push_back(seed_base + i);
    return sc;
}

sim::BehaviorSpec byz(uint32_t process, ByzantineBehavior::Kind kind) {
    sim::BehaviorSpec b;
    b.process = process;
    b.behavior.kind = kind;
    return b;
}

std::vector<std::vector<sim::BehaviorSpec>> behavior_bundles(uint32_t n, uint32_t f) {
    std::vector<std::vector<sim::BehaviorSpec>> bundles;
    bundles.push_back({});  // fault-free

    std::vector<sim::BehaviorSpec> silent;
    for (uint32_t i = 0; i < f; ++i) silent.push_back(byz(n - 1 - i, ByzantineBehavior::Kind::Silent));
    bundles.push_back(silent);

    auto with_fill = [&](sim::BehaviorSpec primary) {
        std::vector<sim::BehaviorSpec> out{std::move(primary)};
        for (uint32_t i = 1; i < f; ++i) out.push_back(byz(n - 1 - i, ByzantineBehavior::Kind::Silent));
        return out;
    };
    bundles.push_back(with_fill(byz(n - 1, ByzantineBehavior::Kind::Equivocate)));
    bundles.push_back(with_fill(byz(n - 1, ByzantineBehavior::Kind::MalformedEdges)));
    auto withhold = byz(n - 1, ByzantineBehavior::Kind::Withhold);
    withhold.behavior.withhold_targets = {0, 1};
    bundles.push_back(with_fill(std::move(withhold)));
    auto adaptive = byz(n - 1, ByzantineBehavior::Kind::AdaptiveCorrupt);
    adaptive.behavior.corrupt_at = 15 * sim::TICKS_PER_UNIT;
    bundles.push_back(with_fill(std::move(adaptive)));
    return bundles;
}

const char* bundle_names[] = {"none", "silent", "equivocate", "malformed", "withhold", "adaptive"};

// Criteria 1, 2 and 4 all evaluate the same big sweep.
void run_safety_sweep() {
    const uint64_t seeds = sweep_seeds();
    const std::vector<std::string> safety = {
        "total_order",        "integrity",           "chain_quality",
        "lemma1_commit_path", "lemma2_common_core",  "increasing_commit_order",
        "quorum_intersection"};

    uint64_t runs = 0, safety_failures = 0, validity_failures = 0, equivocation_failures = 0;
    uint64_t equivocation_runs = 0;
    std::string first_failure;

    const auto t0 = std::chrono::steady_clock::now();
    struct NF {
        uint32_t n, f;
    };
    for (const NF nf : {NF{4, 1}, NF{7, 2}}) {
        const auto bundles = behavior_bundles(nf.n, nf.f);
        for (const sim::ModelKind model :
             {sim::ModelKind::FullControl, sim::ModelKind::RandomArrival,
              sim::ModelKind::MobilePartialControl, sim::ModelKind::RandomPartialControl,
              sim::ModelKind::RandomOrdering}) {
            for (size_t bi = 0; bi < bundles.size(); ++bi) {
                auto sc = scenario(nf.n, nf.f, model, bundles[bi], 40, true,
                                   1 + 100000 * static_cast<uint64_t>(bi), seeds);
                sc.checks = safety;
                sc.checks.push_back("validity");
                sc.checks.push_back("agreement");
                sc.checks.push_back("no_equivocation");
                const auto outcomes = sweep::run_many(sc, 0);
                const auto agg = sweep::aggregate(sc, outcomes);
                runs += agg.runs;
                for (size_t ci = 0; ci < sc.checks.size(); ++ci) {
                    const auto& [name, failures] = agg.check_failures[ci];
                    if (failures == 0) continue;
                    if (name == "validity" || name == "agreement")
                        validity_failures += failures;
                    else if (name == "no_equivocation")
                        equivocation_failures += failures;
                    else
                        safety_failures += failures;
                    if (first_failure.empty())
                        for (const auto& ff : agg.first_failures)
                            if (ff.cx)
                                first_failure = "n=" + std::to_string(nf.n) + " model=" +
                                                sim::model_name(model) + " bundle=" +
                                                bundle_names[bi] + " " + ff.name + " seed=" +
                                                std::to_string(ff.cx->seed);
                }
                if (bi == 2) {  // the equivocate bundle
                    equivocation_runs += agg.runs;
                }
            }
        }
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    std::ostringstream d1;
    d1 << runs << " runs (n in {4,7} x 5 models x 6 bundles x " << seeds << " seeds), "
       << safety_failures << " safety violations, " << std::fixed << std::setprecision(1) << secs
       << "s";
    if (!first_failure.empty()) d1 << "; first: " << first_failure;
    report(1, "safety sweep", safety_failures == 0, d1.str());

    std::ostringstream d2;
    d2 << validity_failures << " validity/agreement failures across " << runs << " drained runs";
    report(2, "liveness/validity", validity_failures == 0, d2.str());

    std::ostringstream d4;
    d4 << equivocation_failures << " equivocation-check failures (" << equivocation_runs
       << " runs with an active equivocator, plus all other bundles)";
    report(4, "equivocation resistance", equivocation_failures == 0, d4.str());
}

void run_wave_efficiency() {
    auto sc = scenario(4, 1, sim::ModelKind::RandomArrival, {}, 100, false, 1, 8);
    sc.checks = {"total_order"};
    const auto agg = sweep::aggregate(sc, sweep::run_many(sc, 0));
    const double wpc = agg.totals.waves_per_commit();
    const double prob = agg.totals.commit_prob();

    auto fc = scenario(4, 1, sim::ModelKind::FullControl, {}, 100, false, 1, 8);
    fc.base.model_params.strategy = "leader_suppressor";
    fc.checks = {"total_order"};
    const auto agg_fc = sweep::aggregate(fc, sweep::run_many(fc, 0));
    const double prob_fc = agg_fc.totals.commit_prob();

    std::ostringstream d;
    d << "random arrival: wavesPerCommit=" << std::fixed << std::setprecision(3) << wpc
      << " (<=1.65), commitProb=" << prob << " (>=0.65) over " << agg.totals.completed_waves
      << " waves; leader-suppressor commitProb=" << prob_fc << " (>=0.5667) over "
      << agg_fc.totals.completed_waves << " waves";
    const bool pass = agg.totals.completed_waves >= 500 && wpc <= 1.5 + 0.15 && prob >= 0.65 &&
                      agg_fc.totals.completed_waves >= 500 && prob_fc >= 2.0 / 3.0 - 0.1;
    report(3, "wave efficiency", pass, d.str());
}

void run_latency_scaling() {
    double lo = 1e18, hi = 0;
    std::ostringstream d;
    d << std::fixed << std::setprecision(3);
    struct NF {
        uint32_t n, f;
    };
    for (const NF nf : {NF{4, 1}, NF{7, 2}, NF{10, 3}}) {
        auto sc = scenario(nf.n, nf.f, sim::ModelKind::RandomArrival, {}, 60, true, 1, 6);
        sc.checks = {"total_order"};
        const auto agg = sweep::aggregate(sc, sweep::run_many(sc, 0));
        const double lat = agg.totals.mean_latency_units();
        lo = std::min(lo, lat);
        hi = std::max(hi, lat);
        d << "n=" << nf.n << ": " << lat << "tu  ";
    }
    d << "(max/min=" << (hi / lo) << " <= 2)";
    report(5, "time complexity proxy", hi <= 2.0 * lo && lo > 0, d.str());
}

void run_batch_scaling() {
    double bits_per_tx[3] = {0, 0, 0};
    const uint32_t batches[3] = {1, 10, 100};
    for (int i = 0; i < 3; ++i) {
        auto sc = scenario(4, 1, sim::ModelKind::RandomArrival, {}, 60, true, 1, 5);
        sc.base.batch_size = batches[i];
        sc.base.tx_bytes = 0;
        sc.checks = {"total_order"};
        const auto agg = sweep::aggregate(sc, sweep::run_many(sc, 0));
        bits_per_tx[i] = agg.totals.bits_per_tx();
    }
    bool pass = bits_per_tx[0] > 0;
    std::ostringstream d;
    d << std::fixed << std::setprecision(2) << "bits/tx: B=1: " << bits_per_tx[0];
    for (int i = 1; i < 3; ++i) {
        const double predicted = bits_per_tx[0] / batches[i];
        const double rel = std::abs(bits_per_tx[i] - predicted) / predicted;
        pass = pass && rel <= 0.20;
        d << ", B=" << batches[i] << ": " << bits_per_tx[i] << " (1/B predicts " << predicted
          << ", off " << std::setprecision(1) << 100 * rel << "%" << std::setprecision(2) << ")";
    }
    report(6, "communication scaling", pass, d.str());
}

void run_copy_inclusion() {
    const double closed_form = 1.0 - 40920.0 / 3921225.0;  // 1 - C(33,4)/C(100,4)
    const double exact = check::copy_inclusion_probability(100, 33, 4);
    const double mc = check::copy_inclusion_monte_carlo(100, 33, 4, 100000, 7);
    const bool pass = exact == closed_form && std::abs(mc - exact) <= 0.005 &&
                      std::abs(exact - 0.99) <= 0.005 &&
                      check::copy_inclusion_probability(100, 33, 34) == 1.0 &&
                      check::copy_inclusion_probability(100, 33, 0) == 0.0;
    std::ostringstream d;
    d << std::setprecision(6) << "exact=" << exact << " (closed form " << closed_form
      << "), monte carlo=" << mc << ", f+1 copies -> 1.0, 0 copies -> 0.0";
    report(7, "copy inclusion", pass, d.str());
}

void run_fairness() {
    auto fair = scenario(4, 1, sim::ModelKind::RandomArrival, {}, 100, true, 1, 6);
    fair.checks = {"total_order"};
    const auto agg = sweep::aggregate(fair, sweep::run_many(fair, 0));
    bool all_fair = true;
    double worst = 1.0;
    for (uint32_t p = 0; p < 4; ++p) {
        if (agg.horizon_ratio[p] < 0) continue;
        worst = std::min(worst, agg.horizon_ratio[p]);
        if (agg.horizon_ratio[p] < 0.25 - 0.05) all_fair = false;
    }

    // Suppression only starves windows when the victim's traffic lags by
    // many waves; weak edges patch anything shorter back in.
    auto target = scenario(4, 1, sim::ModelKind::FullControl, {}, 100, true, 1, 6);
    target.base.model_params.strategy = "targeted_suppressor";
    target.base.model_params.victim = 0;
    target.base.model_params.adversarial_delay = 48 * sim::TICKS_PER_UNIT;
    target.checks = {"total_order"};
    const auto agg_t = sweep::aggregate(target, sweep::run_many(target, 0));
    // The spec asks for "at least one correct process"; pinning the victim
    // itself keeps the demonstration from leaning on window noise.
    const bool suppressed = agg_t.min_window_ratio[0] >= 0 && agg_t.min_window_ratio[0] < 0.25 - 0.05;
    std::ostringstream d;
    d << std::fixed << std::setprecision(3) << "random arrival: min horizon ratio " << worst
      << " (>=0.2); targeted full control: victim windowed ratio "
      << agg_t.min_window_ratio[0] << " (<0.2)";
    report(8, "fairness phenomenon", all_fair && suppressed, d.str());
}

void run_determinism() {
    bool pass = true;
    std::string detail = "byte-identical replays: ";
    struct Case {
        const char* name;
        sim::ModelKind model;
        ByzantineBehavior::Kind kind;
    };
    const Case cases[] = {
        {"random_arrival", sim::ModelKind::RandomArrival, ByzantineBehavior::Kind::Correct},
        {"full_control", sim::ModelKind::FullControl, ByzantineBehavior::Kind::Correct},
        {"mobile_partial", sim::ModelKind::MobilePartialControl, ByzantineBehavior::Kind::Correct},
        {"random_ordering", sim::ModelKind::RandomOrdering, ByzantineBehavior::Kind::Equivocate},
        {"random_partial", sim::ModelKind::RandomPartialControl,
         ByzantineBehavior::Kind::AdaptiveCorrupt},
    };
    for (const auto& c : cases) {
        std::vector<sim::BehaviorSpec> behaviors;
        if (c.kind != ByzantineBehavior::Kind::Correct) {
            auto b = byz(3, c.kind);
            if (c.kind == ByzantineBehavior::Kind::AdaptiveCorrupt)
                b.behavior.corrupt_at = 10 * sim::TICKS_PER_UNIT;
            behaviors.push_back(b);
        }
        auto sc = scenario(4, 1, c.model, behaviors, 24, true, 1, 1);
        const auto a = sim::run_simulation(sc.config_for_seed(11));
        const auto b2 = sim::run_simulation(sc.config_for_seed(11));
        const auto c2 = sim::run_simulation(sc.config_for_seed(12));
        if (sim::trace_to_jsonl(a) != sim::trace_to_jsonl(b2)) {
            pass = false;
            detail += std::string(c.name) + " DIVERGED; ";
        }
        if (sim::trace_to_jsonl(a) == sim::trace_to_jsonl(c2)) {
            pass = false;
            detail += std::string(c.name) + " seed-insensitive; ";
        }
    }
    detail += "5 scenario families x replay + seed sensitivity";
    report(9, "determinism", pass, detail);
}

void run_checker_soundness() {
    struct Case {
        const char* check;
        sim::RunResult result;
    };
    std::vector<Case> cases;
    cases.push_back({"total_order", testing::violate_total_order()});
    cases.push_back({"integrity", testing::violate_integrity()});
    cases.push_back({"agreement", testing::violate_agreement()});
    cases.push_back({"validity", testing::violate_validity()});
    cases.push_back({"chain_quality", testing::violate_chain_quality()});
    cases.push_back({"lemma1_commit_path", testing::violate_lemma1()});
    cases.push_back({"lemma2_common_core", testing::violate_lemma2()});
    cases.push_back({"increasing_commit_order", testing::violate_increasing_commit()});
    cases.push_back({"quorum_intersection", testing::violate_quorum_intersection()});
    cases.push_back({"no_equivocation", testing::violate_no_equivocation()});

    uint32_t detected = 0;
    std::string missed;
    for (const auto& c : cases) {
        const auto res = check::run_checks(c.result, {c.check});
        if (!res[0].pass && res[0].applicable && res[0].cx)
            ++detected;
        else
            missed += std::string(c.check) + " ";
    }
    std::ostringstream d;
    d << detected << "/" << cases.size() << " synthetic violations detected";
    if (!missed.empty()) d << "; missed: " << missed;
    report(10, "checker soundness", detected == cases.size(), d.str());
}

}  // namespace

int main() {
    std::cout << "acceptance suite (seeds per sweep combination: " << sweep_seeds() << ")\n";
    const auto t0 = std::chrono::steady_clock::now();

    run_safety_sweep();       // criteria 1, 2, 4
    run_wave_efficiency();    // criterion 3
    run_latency_scaling();    // criterion 5
    run_batch_scaling();      // criterion 6
    run_copy_inclusion();     // criterion 7
    run_fairness();           // criterion 8
    run_determinism();        // criterion 9
    run_checker_soundness();  // criterion 10

    std::sort(results.begin(), results.end(),
              [](const Criterion& a, const Criterion& b) { return a.id < b.id; });
    uint32_t failed = 0;
    for (const auto& c : results)
        if (!c.pass) ++failed;
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << "\n" << (results.size() - failed) << "/" << results.size()
              << " criteria passed in " << std::fixed << std::setprecision(1) << secs << "s\n";
    return failed == 0 ? 0 : 1;
}
