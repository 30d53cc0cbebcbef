#include "dagbft/sim/adversary.hpp"

#include <algorithm>
#include <stdexcept>

namespace dagbft::sim {

namespace {

// Delays the most recently revealed leader's outbound traffic. By the time a
// wave's coin is visible the wave is over, so this can never bias the wave it
// learned about — the measured commit rate stays near the fair-coin bound.
class LeaderSuppressor : public AdversaryStrategy {
public:
    LeaderSuppressor(ModelParams mp, Params p) : mp_(mp), p_(p) {}

    SimTime delay(const MsgMeta& m, const CoinView& coin, Rng& rng) override {
        while (auto l = coin.peek(next_wave_)) {
            suspect_ = l->index;
            ++next_wave_;
        }
        if (suspect_ != UINT32_MAX && m.from.index == suspect_) return mp_.adversarial_delay;
        return rng.ticks_between(mp_.omega.lo, mp_.omega.hi);
    }
    const char* name() const override { return "leader_suppressor"; }

private:
    ModelParams mp_;
    Params p_;
    uint64_t next_wave_ = 1;
    uint32_t suspect_ = UINT32_MAX;
};

// Fixed victim whose outbound traffic is always slowed to the ceiling.
class TargetedSuppressor : public AdversaryStrategy {
public:
    TargetedSuppressor(ModelParams mp, Params p)
        : mp_(mp), victim_(mp.victim.value_or(0)) {
        if (victim_ >= p.n) throw std::invalid_argument("victim out of range");
    }

    SimTime delay(const MsgMeta& m, const CoinView&, Rng& rng) override {
        if (m.from.index == victim_) return mp_.adversarial_delay;
        return rng.ticks_between(mp_.omega.lo, mp_.omega.hi);
    }
    const char* name() const override { return "targeted_suppressor"; }

private:
    ModelParams mp_;
    uint32_t victim_;
};

// Splits processes into two halves and slows cross-half traffic; the halves
// swap every repartition_period.
class Partitioner : public AdversaryStrategy {
public:
    Partitioner(ModelParams mp, Params p) : mp_(mp), p_(p) {}

    SimTime delay(const MsgMeta& m, const CoinView&, Rng& rng) override {
        const uint64_t epoch =
            static_cast<uint64_t>(m.sent_at / std::max<SimTime>(1, mp_.repartition_period));
        const uint32_t half = p_.n / 2;
        const bool side_from = ((m.from.index + epoch) % p_.n) < half;
        const bool side_to = ((m.to.index + epoch) % p_.n) < half;
        if (side_from != side_to) return mp_.adversarial_delay;
        return rng.ticks_between(mp_.omega.lo, mp_.omega.hi);
    }
    const char* name() const override { return "partitioner"; }

private:
    ModelParams mp_;
    Params p_;
};

// Wide uniform window: maximizes reordering while staying finite.
class Reorderer : public AdversaryStrategy {
public:
    explicit Reorderer(ModelParams mp) : mp_(mp) {}

    SimTime delay(const MsgMeta&, const CoinView&, Rng& rng) override {
        return rng.ticks_between(TICKS_PER_UNIT / 10, mp_.adversarial_delay);
    }
    const char* name() const override { return "message_reorderer"; }

private:
    ModelParams mp_;
};

}  // namespace

std::unique_ptr<AdversaryStrategy> make_strategy(const std::string& name,
                                                 const ModelParams& mp, Params p) {
    if (name == "leader_suppressor") return std::make_unique<LeaderSuppressor>(mp, p);
    if (name == "targeted_suppressor") return std::make_unique<TargetedSuppressor>(mp, p);
    if (name == "partitioner") return std::make_unique<Partitioner>(mp, p);
    if (name == "message_reorderer") return std::make_unique<Reorderer>(mp);
    throw std::invalid_argument("unknown adversary strategy: " + name);
}

DelayModel::DelayModel(ModelKind kind, ModelParams mp, Params p, uint64_t seed)
    : kind_(kind), mp_(mp), p_(p), rng_(splitmix64(seed ^ 0xADFEED)) {
    if (kind_ == ModelKind::FullControl) strategy_ = make_strategy(mp_.strategy, mp_, p_);
    if (kind_ == ModelKind::MobilePartialControl || kind_ == ModelKind::RandomPartialControl) {
        if (mp_.k < 1 || mp_.k > p_.quorum())
            throw std::invalid_argument("modelParams.k must be in [1, 2f+1]");
    }
    episodes_.resize(p_.n);
}

bool DelayModel::mobile_controls(ProcessId sender, const CoinView& coin) {
    // Move control whenever a new wave reveals: grab the revealed leader and
    // fill the rest deterministically.
    while (auto l = coin.peek(mobile_seen_wave_ + 1)) {
        ++mobile_seen_wave_;
        mobile_set_.clear();
        const uint32_t budget = mp_.k - 1;  // strictly less than k
        if (budget == 0) break;
        mobile_set_.push_back(l->index);
        for (uint32_t i = 0; mobile_set_.size() < budget && i < p_.n; ++i) {
            const uint32_t cand = (l->index + 1 + i) % p_.n;
            if (std::find(mobile_set_.begin(), mobile_set_.end(), cand) == mobile_set_.end())
                mobile_set_.push_back(cand);
        }
    }
    return std::find(mobile_set_.begin(), mobile_set_.end(), sender.index) != mobile_set_.end();
}

bool DelayModel::random_partial_controls(ProcessId sender, SimTime now) {
    // Built-in adversary picks processes 0..k-2 as its episodic targets, so
    // strictly fewer than k are ever controlled at once.
    if (mp_.k < 2) return false;
    if (sender.index >= mp_.k - 1) return false;
    Episode& ep = episodes_[sender.index];
    while (true) {
        if (now < ep.control_until) return true;
        if (now < ep.cooldown_until) return false;
        // Start the next control episode at cooldown end.
        const SimTime start = std::max(ep.cooldown_until, SimTime{0});
        const SimTime len = rng_.ticks_between(mp_.omega1.lo, mp_.omega1.hi);
        const SimTime cool = rng_.ticks_between(mp_.omega2.lo, mp_.omega2.hi);
        ep.control_until = start + len;
        ep.cooldown_until = ep.control_until + cool;
        if (now < ep.control_until) return true;
    }
}

SimTime DelayModel::pick_delay(const MsgMeta& m, const CoinView& coin) {
    switch (kind_) {
        case ModelKind::FullControl: {
            const SimTime d = strategy_->delay(m, coin, rng_);
            if (d < 0 || d > 1000 * TICKS_PER_UNIT)
                throw std::logic_error("adversary strategy produced an unbounded delay");
            return d;
        }
        case ModelKind::RandomArrival:
            return rng_.ticks_between(mp_.omega.lo, mp_.omega.hi);
        case ModelKind::MobilePartialControl:
            if (mobile_controls(m.from, coin)) return mp_.adversarial_delay;
            return rng_.ticks_between(mp_.omega.lo, mp_.omega.hi);
        case ModelKind::RandomPartialControl:
            if (random_partial_controls(m.from, m.sent_at)) return mp_.adversarial_delay;
            return rng_.ticks_between(mp_.omega.lo, mp_.omega.hi);
        case ModelKind::RandomOrdering:
            // Handled by the scheduler's in-flight list; only the head gap is
            // sampled here.
            return rng_.ticks_between(mp_.head_gap.lo, mp_.head_gap.hi);
    }
    return mp_.omega.lo;
}

}  // namespace dagbft::sim
