#include "dagbft/check/checker.hpp"

#include "dagbft/protocol/dag_builder.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace dagbft::check {

namespace {

using sim::RunResult;
using sim::TraceEvent;
using sim::TraceKind;

std::vector<uint32_t> correct_processes(const RunResult& r) {
    std::vector<uint32_t> out;
    for (uint32_t i = 0; i < r.config.n; ++i)
        if (r.correct[i]) out.push_back(i);
    return out;
}

bool entries_equal(const DeliveryEntry& a, const DeliveryEntry& b) {
    return a.round == b.round && a.source == b.source && a.seq == b.seq &&
           a.tx_count == b.tx_count;
}

CheckResult fail(std::string name, const RunResult& r, sim::SimTime t, std::string what) {
    CheckResult res;
    res.name = std::move(name);
    res.pass = false;
    res.detail = what;
    res.cx = Counterexample{r.config.seed, t, std::move(what)};
    return res;
}

CheckResult pass(std::string name, std::string detail = {}) {
    CheckResult res;
    res.name = std::move(name);
    res.detail = std::move(detail);
    return res;
}

CheckResult not_applicable(std::string name, std::string why) {
    CheckResult res;
    res.name = std::move(name);
    res.applicable = false;
    res.detail = std::move(why);
    return res;
}

uint64_t block_key(uint32_t source, uint64_t seq) { return (uint64_t{source} << 40) | seq; }

// Commits as (process, wave, leader) triples, back-chained leaders included.
struct CommitView {
    uint32_t process;
    uint64_t wave;
    VertexRef leader;
    const TraceEvent* ev;
};

std::vector<CommitView> all_commits(const RunResult& r) {
    std::vector<CommitView> out;
    for (const auto& ev : r.trace) {
        if (ev.kind != TraceKind::Commit || !r.correct[ev.process]) continue;
        for (const auto& leader : ev.refs2) {
            const uint64_t wave = (leader.round + 3) / 4;
            out.push_back(CommitView{ev.process, wave, leader, &ev});
        }
    }
    return out;
}

}  // namespace

CheckResult check_total_order(const RunResult& r) {
    const auto correct = correct_processes(r);
    for (size_t a = 0; a < correct.size(); ++a) {
        for (size_t b = a + 1; b < correct.size(); ++b) {
            const auto& la = r.logs[correct[a]];
            const auto& lb = r.logs[correct[b]];
            const size_t common = std::min(la.size(), lb.size());
            for (size_t k = 0; k < common; ++k) {
                if (!entries_equal(la[k], lb[k]))
                    return fail("total_order", r, la[k].sim_time,
                                "logs of p" + std::to_string(correct[a]) + " and p" +
                                    std::to_string(correct[b]) + " diverge at index " +
                                    std::to_string(k));
            }
        }
    }
    return pass("total_order");
}

CheckResult check_integrity(const RunResult& r) {
    for (uint32_t p : correct_processes(r)) {
        std::unordered_set<uint64_t> seen;
        for (const auto& e : r.logs[p]) {
            const uint64_t key = e.round * r.config.n + e.source.index;
            if (!seen.insert(key).second)
                return fail("integrity", r, e.sim_time,
                            "p" + std::to_string(p) + " delivered (round=" +
                                std::to_string(e.round) + ", source=" +
                                std::to_string(e.source.index) + ") twice");
        }
    }
    return pass("integrity");
}

CheckResult check_agreement(const RunResult& r) {
    if (!r.flags.drained || !r.flags.quiescent)
        return not_applicable("agreement", "requires a drained run at quiescence");
    const auto to = check_total_order(r);
    if (!to.pass) {
        auto res = to;
        res.name = "agreement";
        return res;
    }
    // At quiescence every correct DAG must hold exactly the same vertices.
    const auto correct = correct_processes(r);
    for (size_t a = 0; a + 1 < correct.size(); ++a) {
        const DagStore& da = r.dags[correct[a]];
        const DagStore& db = r.dags[correct[a + 1]];
        const uint64_t rounds = std::max(da.max_round(), db.max_round());
        for (uint64_t round = 0; round <= rounds; ++round) {
            auto ra = da.round_refs(round);
            auto rb = db.round_refs(round);
            std::sort(ra.begin(), ra.end());
            std::sort(rb.begin(), rb.end());
            if (ra != rb)
                return fail("agreement", r, r.end_time,
                            "DAGs of p" + std::to_string(correct[a]) + " and p" +
                                std::to_string(correct[a + 1]) + " differ in round " +
                                std::to_string(round));
        }
    }
    return pass("agreement");
}

CheckResult check_validity(const RunResult& r) {
    if (!r.flags.drained) return not_applicable("validity", "requires a drained run");
    if (!r.flags.drain_completed)
        return fail("validity", r, r.end_time, "drain stalled before all blocks were delivered");
    const auto correct = correct_processes(r);
    for (uint32_t p : correct) {
        std::unordered_set<uint64_t> delivered;
        for (const auto& e : r.logs[p])
            if (!e.filler) delivered.insert(block_key(e.source.index, e.seq));
        for (uint32_t src : correct) {
            for (const auto& rec : r.abcasts[src]) {
                if (!delivered.count(block_key(src, rec.seq)))
                    return fail("validity", r, rec.time,
                                "block (proposer=" + std::to_string(src) +
                                    ", seq=" + std::to_string(rec.seq) + ") missing from p" +
                                    std::to_string(p) + "'s log");
            }
        }
    }
    return pass("validity");
}

CheckResult check_chain_quality(const RunResult& r) {
    const uint32_t q = 2 * r.config.f + 1;
    const uint32_t need = r.config.f + 1;
    for (uint32_t p : correct_processes(r)) {
        uint64_t correct_sourced = 0;
        const auto& log = r.logs[p];
        for (size_t i = 0; i < log.size(); ++i) {
            if (r.correct[log[i].source.index]) ++correct_sourced;
            if ((i + 1) % q == 0) {
                const uint64_t k = (i + 1) / q;
                if (correct_sourced < static_cast<uint64_t>(need) * k)
                    return fail("chain_quality", r, log[i].sim_time,
                                "p" + std::to_string(p) + " prefix of size " +
                                    std::to_string(i + 1) + " has only " +
                                    std::to_string(correct_sourced) + " correct-sourced entries");
            }
        }
    }
    return pass("chain_quality");
}

CheckResult check_lemma1(const RunResult& r) {
    const auto commits = all_commits(r);
    const auto correct = correct_processes(r);
    for (const auto& c : commits) {
        for (const auto& [wave, leader_idx] : r.coin_reveals) {
            if (wave <= c.wave) continue;
            const VertexRef u{ProcessId{leader_idx}, wave_round(wave, 1)};
            for (uint32_t j : correct) {
                const DagStore& dag = r.dags[j];
                if (!dag.contains(u)) continue;
                bool ok = false;
                try {
                    ok = dag.strong_path(u, c.leader);
                } catch (const DagError&) {
                    ok = false;  // committed leader absent from dag_j
                }
                if (!ok)
                    return fail("lemma1_commit_path", r, c.ev->time,
                                "wave " + std::to_string(wave) + " leader at p" +
                                    std::to_string(j) + " lacks a strong path to wave " +
                                    std::to_string(c.wave) + " leader committed by p" +
                                    std::to_string(c.process));
            }
        }
    }
    return pass("lemma1_commit_path");
}

CheckResult check_lemma2(const RunResult& r) {
    const uint32_t q = 2 * r.config.f + 1;
    for (const auto& ev : r.trace) {
        if (ev.kind != TraceKind::WaveReady || !r.correct[ev.process]) continue;
        const auto& snap_r1 = ev.refs;
        const auto& snap_r4 = ev.refs2;
        const DagStore& dag = r.dags[ev.process];
        if (snap_r1.size() < q || snap_r4.size() < q)
            return fail("lemma2_common_core", r, ev.time,
                        "wave " + std::to_string(ev.a) + " completion snapshot at p" +
                            std::to_string(ev.process) + " is below 2f+1");

        // reach[u] = bitmask over snap_r1 strong-reachable from snap_r4[u].
        std::vector<uint32_t> reach(snap_r4.size(), 0);
        for (size_t u = 0; u < snap_r4.size(); ++u)
            for (size_t v = 0; v < snap_r1.size(); ++v)
                if (dag.strong_path(snap_r4[u], snap_r1[v])) reach[u] |= 1u << v;

        bool found = false;
        const uint32_t m = static_cast<uint32_t>(snap_r1.size());
        for (uint32_t mask = 0; mask < (1u << m) && !found; ++mask) {
            if (std::popcount(mask) != static_cast<int>(q)) continue;
            uint32_t supporters = 0;
            for (size_t u = 0; u < snap_r4.size(); ++u)
                if ((reach[u] & mask) == mask) ++supporters;
            if (supporters >= q) found = true;
        }
        if (!found)
            return fail("lemma2_common_core", r, ev.time,
                        "no common core in wave " + std::to_string(ev.a) + " at p" +
                            std::to_string(ev.process));
    }
    return pass("lemma2_common_core");
}

CheckResult check_increasing_commit_order(const RunResult& r) {
    std::vector<uint64_t> last(r.config.n, 0);
    for (const auto& ev : r.trace) {
        if (ev.kind != TraceKind::Commit || !r.correct[ev.process]) continue;
        if (ev.a <= last[ev.process])
            return fail("increasing_commit_order", r, ev.time,
                        "p" + std::to_string(ev.process) + " committed wave " +
                            std::to_string(ev.a) + " after wave " +
                            std::to_string(last[ev.process]));
        last[ev.process] = ev.a;
    }
    return pass("increasing_commit_order");
}

CheckResult check_quorum_intersection(const RunResult& r) {
    const uint32_t need = r.config.f + 1;
    // Wave-completion snapshots per (process, wave).
    std::unordered_map<uint64_t, const TraceEvent*> completions;
    for (const auto& ev : r.trace)
        if (ev.kind == TraceKind::WaveReady && r.correct[ev.process])
            completions[(uint64_t{ev.process} << 32) | ev.a] = &ev;

    for (const auto& ev : r.trace) {
        if (ev.kind != TraceKind::Commit || !r.correct[ev.process]) continue;
        const uint64_t wave = ev.a;
        const VertexRef leader{ProcessId{static_cast<uint32_t>(ev.b)}, ev.c};
        if (ev.refs.size() < 2 * r.config.f + 1)
            return fail("quorum_intersection", r, ev.time,
                        "commit at p" + std::to_string(ev.process) + " carries only " +
                            std::to_string(ev.refs.size()) + " voters");
        for (uint32_t j : correct_processes(r)) {
            if (j == ev.process) continue;
            auto it = completions.find((uint64_t{j} << 32) | wave);
            if (it == completions.end()) continue;  // j never completed this wave
            const DagStore& dag = r.dags[j];
            uint32_t have = 0;
            for (const auto& v4 : it->second->refs2) {
                try {
                    if (dag.strong_path(v4, leader)) ++have;
                } catch (const DagError&) {
                }
            }
            if (have < need)
                return fail("quorum_intersection", r, ev.time,
                            "p" + std::to_string(j) + " completed wave " + std::to_string(wave) +
                                " with only " + std::to_string(have) +
                                " round-4 vertices reaching the committed leader");
        }
    }
    return pass("quorum_intersection");
}

CheckResult check_no_equivocation(const RunResult& r) {
    if (r.counters.max_rbc_deliveries_per_tag > 1)
        return fail("no_equivocation", r, r.end_time,
                    "some rbc tag delivered " +
                        std::to_string(r.counters.max_rbc_deliveries_per_tag) + " times");
    for (uint32_t p : correct_processes(r)) {
        const DagStore& dag = r.dags[p];
        for (uint64_t round = 0; round <= dag.max_round(); ++round) {
            uint64_t seen = 0;
            for (const auto& ref : dag.round_refs(round)) {
                const uint64_t bit = uint64_t{1} << ref.source.index;
                if (seen & bit)
                    return fail("no_equivocation", r, r.end_time,
                                "p" + std::to_string(p) + " stores two vertices for (source=" +
                                    std::to_string(ref.source.index) + ", round=" +
                                    std::to_string(round) + ")");
                seen |= bit;
            }
        }
    }
    // Two correct stores must agree on the full content of any vertex both
    // hold, not just on its (round, source) slot.
    const auto correct = correct_processes(r);
    for (size_t a = 0; a + 1 < correct.size(); ++a) {
        const DagStore& da = r.dags[correct[a]];
        const DagStore& db = r.dags[correct[a + 1]];
        const uint64_t rounds = std::min(da.max_round(), db.max_round());
        for (uint64_t round = 1; round <= rounds; ++round) {
            for (const auto& ref : da.round_refs(round)) {
                if (!db.contains(ref)) continue;
                const Vertex& va = da.get(ref);
                const Vertex& vb = db.get(ref);
                const bool same = va.block.seq == vb.block.seq &&
                                  va.block.proposer == vb.block.proposer &&
                                  va.block.txs == vb.block.txs &&
                                  va.strong_edges == vb.strong_edges &&
                                  va.weak_edges == vb.weak_edges;
                if (!same)
                    return fail("no_equivocation", r, r.end_time,
                                "p" + std::to_string(correct[a]) + " and p" +
                                    std::to_string(correct[a + 1]) +
                                    " hold different content for (source=" +
                                    std::to_string(ref.source.index) + ", round=" +
                                    std::to_string(round) + ")");
            }
        }
    }
    const auto integ = check_integrity(r);
    if (!integ.pass) {
        auto res = integ;
        res.name = "no_equivocation";
        return res;
    }
    return pass("no_equivocation");
}

const std::vector<std::string>& all_check_names() {
    static const std::vector<std::string> names = {
        "total_order",     "integrity",          "agreement",
        "validity",        "chain_quality",      "lemma1_commit_path",
        "lemma2_common_core", "increasing_commit_order", "quorum_intersection",
        "no_equivocation",
    };
    return names;
}

std::vector<std::string> default_checks(bool drained) {
    std::vector<std::string> names = {"total_order", "integrity", "chain_quality",
                                      "lemma1_commit_path", "lemma2_common_core",
                                      "increasing_commit_order", "quorum_intersection",
                                      "no_equivocation"};
    if (drained) {
        names.push_back("agreement");
        names.push_back("validity");
    }
    return names;
}

std::vector<CheckResult> run_checks(const RunResult& r, const std::vector<std::string>& names) {
    std::vector<CheckResult> out;
    out.reserve(names.size());
    for (const auto& name : names) {
        if (name == "total_order") out.push_back(check_total_order(r));
        else if (name == "integrity") out.push_back(check_integrity(r));
        else if (name == "agreement") out.push_back(check_agreement(r));
        else if (name == "validity") out.push_back(check_validity(r));
        else if (name == "chain_quality") out.push_back(check_chain_quality(r));
        else if (name == "lemma1_commit_path") out.push_back(check_lemma1(r));
        else if (name == "lemma2_common_core") out.push_back(check_lemma2(r));
        else if (name == "increasing_commit_order") out.push_back(check_increasing_commit_order(r));
        else if (name == "quorum_intersection") out.push_back(check_quorum_intersection(r));
        else if (name == "no_equivocation") out.push_back(check_no_equivocation(r));
        else throw std::invalid_argument("unknown check: " + name);
    }
    return out;
}

Metrics measure_performance(const sim::RunResult& r) {
    Metrics m;
    m.msgs_sent = r.counters.msgs_sent;
    m.bits_sent = r.counters.bits_sent;
    const auto correct = correct_processes(r);
    uint64_t correct_mask = 0;
    for (uint32_t p : correct) correct_mask |= uint64_t{1} << p;
    for (uint32_t p : correct) {
        m.completed_waves += r.waves_completed[p];
        m.commits += r.commit_count[p];
    }

    // a_bcast times per client block.
    std::unordered_map<uint64_t, sim::SimTime> abcast_at;
    std::unordered_map<uint64_t, uint32_t> tx_count;
    for (uint32_t src = 0; src < r.config.n; ++src)
        for (const auto& rec : r.abcasts[src]) {
            abcast_at[block_key(src, rec.seq)] = rec.time;
            tx_count[block_key(src, rec.seq)] = rec.tx_count;
        }

    std::unordered_map<uint64_t, uint64_t> delivered_by;
    for (uint32_t p : correct) {
        for (const auto& e : r.logs[p]) {
            if (e.filler) continue;
            const uint64_t key = block_key(e.source.index, e.seq);
            auto it = abcast_at.find(key);
            if (it != abcast_at.end() && r.time_unit_ticks > 0) {
                m.latency_units_sum += static_cast<double>(e.sim_time - it->second) /
                                       static_cast<double>(r.time_unit_ticks);
                ++m.latency_samples;
            }
            delivered_by[key] |= uint64_t{1} << p;
        }
    }
    for (const auto& [key, mask] : delivered_by)
        if (mask == correct_mask) m.ordered_txs += tx_count.count(key) ? tx_count[key] : 0;
    return m;
}

FairnessMetrics measure_fairness(const sim::RunResult& r, uint32_t window) {
    FairnessMetrics fm;
    fm.window = window == 0 ? 32 : window;
    fm.horizon_ratio.assign(r.config.n, -1.0);
    fm.min_window_ratio.assign(r.config.n, -1.0);
    fm.txs_by_proposer.assign(r.config.n, 0);

    const auto correct = correct_processes(r);
    if (correct.empty()) return fm;
    // Longest correct log is the most complete view of the shared ledger.
    uint32_t ref = correct[0];
    for (uint32_t p : correct)
        if (r.logs[p].size() > r.logs[ref].size()) ref = p;
    const auto& log = r.logs[ref];

    for (const auto& e : log) {
        if (!r.correct[e.source.index]) continue;
        fm.txs_by_proposer[e.source.index] += e.tx_count;
        fm.correct_txs_total += e.tx_count;
    }
    for (uint32_t p : correct)
        fm.horizon_ratio[p] = fm.correct_txs_total
                                  ? static_cast<double>(fm.txs_by_proposer[p]) /
                                        static_cast<double>(fm.correct_txs_total)
                                  : 0.0;

    for (uint32_t p : correct) fm.min_window_ratio[p] = 1.0;
    for (size_t start = 0; start < log.size(); start += fm.window) {
        const size_t end = std::min(log.size(), start + fm.window);
        uint64_t total = 0;
        std::vector<uint64_t> by(r.config.n, 0);
        for (size_t i = start; i < end; ++i) {
            if (!r.correct[log[i].source.index]) continue;
            by[log[i].source.index] += log[i].tx_count;
            total += log[i].tx_count;
        }
        if (total == 0) continue;
        for (uint32_t p : correct)
            fm.min_window_ratio[p] = std::min(
                fm.min_window_ratio[p], static_cast<double>(by[p]) / static_cast<double>(total));
    }
    return fm;
}

double copy_inclusion_probability(uint32_t n, uint32_t f, uint32_t copies) {
    if (n == 0 || copies == 0) return 0.0;
    if (copies > f) return 1.0;
    // C(f,c)/C(n,c) as an exact integer ratio (falling factorials); one
    // division keeps the result bit-equal to the closed form.
    unsigned __int128 num = 1, den = 1;
    constexpr unsigned __int128 cap = ~static_cast<unsigned __int128>(0);
    bool overflow = false;
    for (uint32_t i = 0; i < copies && !overflow; ++i) {
        if (num > cap / (f - i) || den > cap / (n - i)) {
            overflow = true;
            break;
        }
        num *= f - i;
        den *= n - i;
    }
    if (!overflow) return 1.0 - static_cast<double>(num) / static_cast<double>(den);
    double all_faulty = 1.0;
    for (uint32_t i = 0; i < copies; ++i)
        all_faulty *= static_cast<double>(f - i) / static_cast<double>(n - i);
    return 1.0 - all_faulty;
}

double copy_inclusion_monte_carlo(uint32_t n, uint32_t f, uint32_t copies, uint64_t trials,
                                  uint64_t seed) {
    if (n == 0 || copies == 0 || trials == 0) return 0.0;
    if (copies > n) copies = n;
    sim::Rng rng(splitmix64(seed ^ 0xC0F1E5));
    std::vector<uint32_t> ids(n);
    uint64_t hits = 0;
    for (uint64_t t = 0; t < trials; ++t) {
        for (uint32_t i = 0; i < n; ++i) ids[i] = i;
        bool includes_correct = false;
        for (uint32_t c = 0; c < copies; ++c) {
            const uint32_t j = c + static_cast<uint32_t>(rng.below(n - c));
            std::swap(ids[c], ids[j]);
            if (ids[c] >= f) {  // processes f..n-1 are the correct ones
                includes_correct = true;
                break;
            }
        }
        if (includes_correct) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(trials);
}

}  // namespace dagbft::check
