#include "dagbft/sim/simulator.hpp"

#include <algorithm>
#include <cassert>
#include <deque>
#include <memory>
#include <queue>
#include <unordered_map>
#include <unordered_set>

namespace dagbft::sim {

const char* model_name(ModelKind m) {
    switch (m) {
        case ModelKind::FullControl: return "full_control";
        case ModelKind::RandomArrival: return "random_arrival";
        case ModelKind::MobilePartialControl: return "mobile_partial_control";
        case ModelKind::RandomPartialControl: return "random_partial_control";
        case ModelKind::RandomOrdering: return "random_ordering";
    }
    return "?";
}

std::optional<ModelKind> model_from_name(const std::string& name) {
    for (ModelKind m : {ModelKind::FullControl, ModelKind::RandomArrival,
                        ModelKind::MobilePartialControl, ModelKind::RandomPartialControl,
                        ModelKind::RandomOrdering})
        if (name == model_name(m)) return m;
    return std::nullopt;
}

const char* trace_kind_name(TraceKind k) {
    switch (k) {
        case TraceKind::VertexAdded: return "vertex_added";
        case TraceKind::RoundAdvance: return "round_advance";
        case TraceKind::WaveReady: return "wave_ready";
        case TraceKind::CoinRevealed: return "coin_revealed";
        case TraceKind::Commit: return "commit";
        case TraceKind::Deliver: return "deliver";
        case TraceKind::Corrupted: return "corrupted";
    }
    return "?";
}

void RunConfig::validate() const {
    if (f < 1) throw std::invalid_argument("f: must be >= 1");
    if (n != 3 * f + 1) throw std::invalid_argument("n: must equal 3f+1");
    if (horizon_rounds < 4) throw std::invalid_argument("horizonRounds: must be >= 4");
    if (batch_size < 1) throw std::invalid_argument("batchSize: must be >= 1");
    std::unordered_set<uint32_t> seen;
    for (const auto& b : behaviors) {
        if (b.process >= n) throw std::invalid_argument("behaviors.process: out of range");
        if (b.behavior.kind == ByzantineBehavior::Kind::Correct)
            throw std::invalid_argument("behaviors.kind: correct is not an injected behavior");
        if (!seen.insert(b.process).second)
            throw std::invalid_argument("behaviors.process: duplicate");
        for (uint32_t t : b.behavior.withhold_targets)
            if (t >= n) throw std::invalid_argument("behaviors.withholdTargets: out of range");
    }
    if (seen.size() > f)
        throw std::invalid_argument("behaviors: corruption budget exceeded (more than f)");
    if (model == ModelKind::MobilePartialControl || model == ModelKind::RandomPartialControl) {
        if (model_params.k < 1 || model_params.k > 2 * f + 1)
            throw std::invalid_argument("modelParams.k: must be in [1, 2f+1]");
    }
}

namespace {

enum class EvKind : uint8_t { Msg = 1, CoinWakeup = 2, Corrupt = 3, HeadDeliver = 4 };

struct Event {
    SimTime at = 0;
    uint32_t to = 0;
    uint32_t from = 0;
    uint64_t seq = 0;
    EvKind kind = EvKind::Msg;
    SimTime sent_at = 0;
    std::shared_ptr<const std::string> bytes;
};

struct EventAfter {
    bool operator()(const Event& a, const Event& b) const {
        if (a.at != b.at) return a.at > b.at;
        if (a.to != b.to) return a.to > b.to;
        if (a.from != b.from) return a.from > b.from;
        return a.seq > b.seq;
    }
};

struct InFlight {  // RandomOrdering M(t) entry
    uint32_t from;
    uint32_t to;
    SimTime sent_at;
    std::shared_ptr<const std::string> bytes;
};

class Simulator : public NodeEnv, public CoinView {
public:
    explicit Simulator(const RunConfig& cfg)
        : cfg_(cfg),
          params_(cfg.params()),
          oracle_(params_, cfg.seed),
          model_(cfg.model, cfg.model_params, params_, cfg.seed),
          net_rng_(splitmix64(cfg.seed ^ 0x517EDD)) {
        cfg_.validate();
        result_.config = cfg_;
        result_.correct.assign(cfg_.n, true);

        std::vector<ByzantineBehavior> behaviors(cfg_.n);
        for (const auto& b : cfg_.behaviors) {
            behaviors[b.process] = b.behavior;
            result_.correct[b.process] = false;
        }
        for (uint32_t i = 0; i < cfg_.n; ++i)
            if (result_.correct[i]) correct_mask_ |= uint64_t{1} << i;

        result_.logs.resize(cfg_.n);
        result_.abcasts.resize(cfg_.n);
        for (uint32_t i = 0; i < cfg_.n; ++i)
            nodes_.push_back(std::make_unique<Node>(params_, ProcessId{i}, *this, behaviors[i],
                                                    cfg_.batch_size, cfg_.tx_bytes));
        for (const auto& b : cfg_.behaviors)
            if (b.behavior.kind == ByzantineBehavior::Kind::AdaptiveCorrupt)
                push_event(Event{b.behavior.corrupt_at, b.process, b.process, next_seq(),
                                 EvKind::Corrupt, b.behavior.corrupt_at, nullptr});
    }

    RunResult run() {
        for (uint32_t i = 0; i < cfg_.n; ++i) nodes_[i]->on_start();
        check_phase();

        while (!queue_.empty() && !stop_) {
            if (++result_.counters.events_processed > cfg_.max_events) {
                result_.flags.event_cap_hit = true;
                break;
            }
            Event ev = queue_.top();
            queue_.pop();
            assert(ev.at >= now_);
            now_ = ev.at;
            dispatch(ev);
            check_phase();
        }
        result_.flags.quiescent = queue_.empty();
        result_.end_time = now_;
        result_.time_unit_ticks = max_cc_delay_;

        for (uint32_t i = 0; i < cfg_.n; ++i) {
            result_.dags.push_back(nodes_[i]->dag());
            result_.waves_completed.push_back(nodes_[i]->waves_completed());
            result_.commit_count.push_back(nodes_[i]->commits());
            result_.counters.rbc_misbehavior += nodes_[i]->rbc_layer().misbehavior_drops();
            result_.counters.malformed_dropped += nodes_[i]->builder().malformed_dropped();
            result_.counters.below_threshold_dropped +=
                nodes_[i]->builder().below_threshold_dropped();
            if (result_.correct[i])
                result_.counters.max_rbc_deliveries_per_tag =
                    std::max(result_.counters.max_rbc_deliveries_per_tag,
                             nodes_[i]->rbc_layer().max_deliveries_per_tag());
        }
        return std::move(result_);
    }

    // NodeEnv
    void send(ProcessId from, ProcessId to, std::shared_ptr<const std::string> payload) override {
        const bool from_faulty = nodes_[from.index]->currently_faulty();
        if (result_.correct[from.index]) {
            ++result_.counters.msgs_sent;
            result_.counters.bits_sent += 8 * payload->size();
        }
        if (from == to) {
            // Local handoff: same three-phase path, no network in between.
            push_event(Event{now_, to.index, from.index, next_seq(), EvKind::Msg, now_,
                             std::move(payload)});
            return;
        }
        if (cfg_.model == ModelKind::RandomOrdering && !from_faulty) {
            // Insert at a random position of M(t); the adversary only picks
            // when the head departs.
            const size_t pos = net_rng_.below(in_flight_.size() + 1);
            in_flight_.insert(in_flight_.begin() + static_cast<long>(pos),
                              InFlight{from.index, to.index, now_, std::move(payload)});
            schedule_head();
            return;
        }
        const MsgMeta meta{from, to, now_, from_faulty};
        const SimTime d = model_.pick_delay(meta, *this);
        push_event(Event{now_ + d, to.index, from.index, next_seq(), EvKind::Msg, now_,
                         std::move(payload)});
    }

    std::optional<ProcessId> coin_choose(ProcessId caller, uint64_t wave) override {
        const bool was_revealed = oracle_.revealed_leader(wave).has_value();
        auto res = oracle_.choose_leader(caller, wave);
        if (!was_revealed && res.leader) {
            result_.coin_reveals.emplace_back(wave, res.leader->index);
            TraceEvent ev;
            ev.kind = TraceKind::CoinRevealed;
            ev.process = res.leader->index;
            ev.time = now_;
            ev.a = wave;
            ev.b = res.leader->index;
            trace(std::move(ev));
            for (ProcessId waiter : res.resolved_waiters)
                push_event(Event{now_, waiter.index, waiter.index, next_seq(), EvKind::CoinWakeup,
                                 now_, nullptr});
        }
        return res.leader;
    }

    std::optional<ProcessId> coin_revealed(uint64_t wave) override {
        return oracle_.revealed_leader(wave);
    }

    void trace(TraceEvent ev) override { result_.trace.push_back(std::move(ev)); }

    void record_abcast(ProcessId p, uint64_t seq, uint32_t tx_count) override {
        result_.abcasts[p.index].push_back(AbcastRecord{seq, tx_count, now_});
    }

    void record_delivery(ProcessId p, const DeliveryEntry& e) override {
        result_.logs[p.index].push_back(e);
        if (e.filler || !result_.correct[p.index] || !result_.correct[e.source.index]) return;
        const uint64_t key = (uint64_t{e.source.index} << 40) | e.seq;
        uint64_t& mask = delivered_mask_[key];
        mask |= uint64_t{1} << p.index;
        if (phase_ == RunPhase::Drain && mask == correct_mask_) pending_blocks_.erase(key);
    }

    SimTime now() const override { return now_; }

    // CoinView (adversary side)
    std::optional<ProcessId> peek(uint64_t wave) const override {
        return oracle_.adversary_peek(wave);
    }

private:
    uint64_t next_seq() { return ++event_seq_; }

    void push_event(Event ev) { queue_.push(std::move(ev)); }

    void schedule_head() {
        if (head_scheduled_ || in_flight_.empty()) return;
        const MsgMeta meta{ProcessId{in_flight_.front().from}, ProcessId{in_flight_.front().to},
                           now_, false};
        const SimTime gap = model_.pick_delay(meta, *this);
        head_scheduled_ = true;
        push_event(Event{now_ + gap, in_flight_.front().to, in_flight_.front().from, next_seq(),
                         EvKind::HeadDeliver, now_, nullptr});
    }

    void deliver_msg(uint32_t from, uint32_t to, SimTime sent_at, const std::string& bytes) {
        if (corrupted_mask_ & (uint64_t{1} << from)) return;  // dropped at corruption
        if (result_.correct[from] && result_.correct[to])
            max_cc_delay_ = std::max(max_cc_delay_, now_ - sent_at);
        nodes_[to]->on_message(ProcessId{from}, bytes);
    }

    void dispatch(const Event& ev) {
        switch (ev.kind) {
            case EvKind::Msg:
                deliver_msg(ev.from, ev.to, ev.sent_at, *ev.bytes);
                return;
            case EvKind::CoinWakeup:
                nodes_[ev.to]->on_coin_wakeup();
                return;
            case EvKind::Corrupt: {
                corrupted_mask_ |= uint64_t{1} << ev.to;
                nodes_[ev.to]->corrupt_now();
                TraceEvent t;
                t.kind = TraceKind::Corrupted;
                t.process = ev.to;
                t.time = now_;
                trace(std::move(t));
                return;
            }
            case EvKind::HeadDeliver: {
                head_scheduled_ = false;
                // Skip entries whose sender got corrupted while queued.
                while (!in_flight_.empty() &&
                       (corrupted_mask_ & (uint64_t{1} << in_flight_.front().from)))
                    in_flight_.pop_front();
                if (in_flight_.empty()) return;
                InFlight head = std::move(in_flight_.front());
                in_flight_.pop_front();
                schedule_head();
                if (result_.correct[head.from] && result_.correct[head.to])
                    max_cc_delay_ = std::max(max_cc_delay_, now_ - head.sent_at);
                nodes_[head.to]->on_message(ProcessId{head.from}, *head.bytes);
                return;
            }
        }
    }

    bool all_correct_reached(uint64_t round) const {
        for (uint32_t i = 0; i < cfg_.n; ++i)
            if (result_.correct[i] && nodes_[i]->builder().current_round() < round) return false;
        return true;
    }

    void check_phase() {
        if (phase_ == RunPhase::Main && all_correct_reached(cfg_.horizon_rounds)) {
            result_.flags.reached_horizon = true;
            if (!cfg_.drain) {
                stop_ = true;
                return;
            }
            phase_ = RunPhase::Drain;
            result_.flags.drained = true;
            for (auto& n : nodes_) n->set_phase(RunPhase::Drain);
            // Every client block a correct process a_bcast so far must reach
            // every correct DeliveryLog before creation stops.
            for (uint32_t i = 0; i < cfg_.n; ++i) {
                if (!result_.correct[i]) continue;
                for (const auto& rec : result_.abcasts[i]) {
                    const uint64_t key = (uint64_t{i} << 40) | rec.seq;
                    auto it = delivered_mask_.find(key);
                    if (it == delivered_mask_.end() || it->second != correct_mask_)
                        pending_blocks_.insert(key);
                }
            }
        }
        if (phase_ == RunPhase::Drain) {
            if (pending_blocks_.empty()) {
                result_.flags.drain_completed = true;
                phase_ = RunPhase::Flush;
                for (auto& n : nodes_) n->set_phase(RunPhase::Flush);
            } else if (all_correct_reached(cfg_.horizon_rounds + cfg_.drain_round_slack)) {
                stop_ = true;  // drain stalled; validity will fail honestly
            }
        }
    }

    RunConfig cfg_;
    Params params_;
    CoinOracle oracle_;
    DelayModel model_;
    Rng net_rng_;
    std::vector<std::unique_ptr<Node>> nodes_;
    std::priority_queue<Event, std::vector<Event>, EventAfter> queue_;
    std::deque<InFlight> in_flight_;
    bool head_scheduled_ = false;
    uint64_t event_seq_ = 0;
    SimTime now_ = 0;
    SimTime max_cc_delay_ = 0;
    uint64_t corrupted_mask_ = 0;
    uint64_t correct_mask_ = 0;
    RunPhase phase_ = RunPhase::Main;
    bool stop_ = false;
    std::unordered_map<uint64_t, uint64_t> delivered_mask_;
    std::unordered_set<uint64_t> pending_blocks_;
    RunResult result_;
};

}  // namespace

RunResult run_simulation(const RunConfig& cfg) {
    Simulator sim(cfg);
    return sim.run();
}

namespace {

void append_refs(std::string& out, const char* key, const std::vector<VertexRef>& refs) {
    out += ",\"";
    out += key;
    out += "\":[";
    for (size_t i = 0; i < refs.size(); ++i) {
        if (i) out += ',';
        out += '[';
        out += std::to_string(refs[i].source.index);
        out += ',';
        out += std::to_string(refs[i].round);
        out += ']';
    }
    out += ']';
}

}  // namespace

std::string trace_to_jsonl(const RunResult& r) {
    std::string out;
    out.reserve(r.trace.size() * 64);
    for (const auto& ev : r.trace) {
        out += "{\"event\":\"";
        out += trace_kind_name(ev.kind);
        out += "\",\"process\":";
        out += std::to_string(ev.process);
        out += ",\"t\":";
        out += std::to_string(ev.time);
        switch (ev.kind) {
            case TraceKind::VertexAdded:
                out += ",\"round\":" + std::to_string(ev.a) + ",\"source\":" + std::to_string(ev.b);
                break;
            case TraceKind::RoundAdvance:
                out += ",\"round\":" + std::to_string(ev.a);
                break;
            case TraceKind::WaveReady:
                out += ",\"wave\":" + std::to_string(ev.a);
                append_refs(out, "r1", ev.refs);
                append_refs(out, "r4", ev.refs2);
                break;
            case TraceKind::CoinRevealed:
                out += ",\"wave\":" + std::to_string(ev.a) + ",\"leader\":" + std::to_string(ev.b);
                break;
            case TraceKind::Commit:
                out += ",\"wave\":" + std::to_string(ev.a) + ",\"leader\":[" +
                       std::to_string(ev.b) + "," + std::to_string(ev.c) + "]";
                append_refs(out, "voters", ev.refs);
                append_refs(out, "chain", ev.refs2);
                break;
            case TraceKind::Deliver:
                out += ",\"idx\":" + std::to_string(ev.a) +
                       ",\"round\":" + std::to_string(ev.c) +
                       ",\"source\":" + std::to_string(ev.b >> 32) +
                       ",\"txs\":" + std::to_string(ev.b & 0xffffffffu);
                break;
            case TraceKind::Corrupted:
                break;
        }
        out += "}\n";
    }
    return out;
}

std::string delivery_log_to_jsonl(const RunResult& r, uint32_t process) {
    std::string out;
    const auto& log = r.logs[process];
    for (size_t i = 0; i < log.size(); ++i) {
        out += "{\"idx\":" + std::to_string(i) + ",\"round\":" + std::to_string(log[i].round) +
               ",\"source\":" + std::to_string(log[i].source.index) +
               ",\"seq\":" + std::to_string(log[i].seq) +
               ",\"txCount\":" + std::to_string(log[i].tx_count) +
               ",\"simTime\":" + std::to_string(log[i].sim_time) + "}\n";
    }
    return out;
}

uint64_t trace_hash(const RunResult& r) {
    uint64_t h = 0xcbf29ce484222325ull;
    auto mix = [&h](uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            h ^= (v >> (8 * i)) & 0xff;
            h *= 0x100000001b3ull;
        }
    };
    for (const auto& ev : r.trace) {
        mix(static_cast<uint64_t>(ev.kind));
        mix(ev.process);
        mix(static_cast<uint64_t>(ev.time));
        mix(ev.a);
        mix(ev.b);
        mix(ev.c);
        for (const auto& ref : ev.refs) mix((uint64_t{ref.source.index} << 40) | ref.round);
        for (const auto& ref : ev.refs2) mix((uint64_t{ref.source.index} << 40) | ref.round);
    }
    for (uint32_t p = 0; p < r.config.n; ++p)
        for (const auto& e : r.logs[p]) {
            mix(p);
            mix(e.round);
            mix(e.source.index);
            mix(e.seq);
            mix(static_cast<uint64_t>(e.sim_time));
        }
    return h;
}

}  // namespace dagbft::sim
