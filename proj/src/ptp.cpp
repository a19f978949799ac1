#include "syncsim/ptp.hpp"

#include <cmath>

#include "syncsim/errors.hpp"

namespace syncsim {
namespace {

// Integer halving with ties away from zero, so +5/2 -> +3 and -5/2 -> -3.
std::int64_t half_away(std::int64_t v) {
    return (v >= 0 ? v + 1 : v - 1) / 2;
}

} // namespace

const char* to_string(PtpMessageKind k) {
    switch (k) {
    case PtpMessageKind::Sync: return "Sync";
    case PtpMessageKind::FollowUp: return "FollowUp";
    case PtpMessageKind::DelayReq: return "DelayReq";
    case PtpMessageKind::DelayResp: return "DelayResp";
    }
    return "?";
}

OffsetSample complete_exchange(const PtpExchange& ex) {
    if (!ex.complete())
        throw ContractError("complete_exchange: exchange is missing timestamps");
    std::int64_t fwd = delta(*ex.t2, *ex.t1).nanos(); // t2 - t1
    std::int64_t rev = delta(*ex.t4, *ex.t3).nanos(); // t4 - t3
    OffsetSample s;
    s.seq = ex.seq;
    s.offset_ns = half_away(fwd - rev);
    s.mean_path_delay_ns = half_away(fwd + rev);
    s.at = *ex.t2;
    return s;
}

LinkModel::LinkModel(Config cfg, NoiseStream rng)
    : cfg_(cfg), rng_(std::move(rng)) {
    if (cfg_.delay_m2s_ns < 0 || cfg_.delay_s2m_ns < 0)
        throw ConfigError("link delay must be >= 0");
    if (cfg_.jitter_ns_sigma < 0.0)
        throw ConfigError("link jitter sigma must be >= 0");
    if (cfg_.drop_prob < 0.0 || cfg_.drop_prob > 1.0)
        throw ConfigError("link drop probability must be in [0, 1]");
}

std::optional<TimeInstant> LinkModel::transmit(Direction dir, TimeInstant true_send) {
    if (cfg_.drop_prob > 0.0 && rng_.bernoulli(cfg_.drop_prob)) {
        ++dropped_;
        return std::nullopt;
    }
    std::int64_t base =
        dir == Direction::MasterToSlave ? cfg_.delay_m2s_ns : cfg_.delay_s2m_ns;
    double jit = rng_.normal(cfg_.jitter_ns_sigma);
    std::int64_t d = base + std::llround(jit);
    if (d < 0)
        d = 0;
    return add(true_send, TimeDelta::from_nanos(d));
}

std::pair<PtpMessage, PtpMessage> PtpMaster::emit_sync(SimClock& clk, std::uint32_t seq) {
    if (last_seq_ && seq == *last_seq_)
        throw SequencingError("emit_sync: sequence number reused");
    last_seq_ = seq;
    ++syncs_sent_;
    TimeInstant t1 = clk.sample();
    PtpMessage sync{PtpMessageKind::Sync, seq, std::nullopt};
    PtpMessage follow{PtpMessageKind::FollowUp, seq, t1};
    return {sync, follow};
}

PtpMessage PtpMaster::on_delay_req(SimClock& clk, const PtpMessage& req) {
    if (req.kind != PtpMessageKind::DelayReq)
        throw ContractError("on_delay_req: wrong message kind");
    TimeInstant t4 = clk.sample();
    return PtpMessage{PtpMessageKind::DelayResp, req.seq, t4};
}

PtpSlave::PtpSlave(Config cfg) : cfg_(cfg) {
    if (!(cfg_.exchange_timeout_s > 0.0))
        throw ConfigError("exchange timeout must be positive");
}

PtpExchange& PtpSlave::open(std::uint32_t seq, TimeInstant local_now) {
    auto it = pending_.find(seq);
    if (it == pending_.end()) {
        PtpExchange ex;
        ex.seq = seq;
        ex.opened_local = local_now;
        it = pending_.emplace(seq, ex).first;
    }
    return it->second;
}

void PtpSlave::on_sync(SimClock& clk, const PtpMessage& msg) {
    if (msg.kind != PtpMessageKind::Sync)
        throw ContractError("on_sync: wrong message kind");
    TimeInstant t2 = clk.sample();
    PtpExchange& ex = open(msg.seq, t2);
    if (ex.t2) {
        ++orphans_; // duplicate Sync for a live seq
        return;
    }
    ex.t2 = t2;
}

std::optional<PtpMessage> PtpSlave::on_follow_up(SimClock& clk, const PtpMessage& msg) {
    if (msg.kind != PtpMessageKind::FollowUp)
        throw ContractError("on_follow_up: wrong message kind");
    if (!msg.carried)
        throw ContractError("on_follow_up: FollowUp carries no timestamp");
    TimeInstant now = clk.sample();
    PtpExchange& ex = open(msg.seq, now);
    if (ex.t1) {
        ++orphans_;
        return std::nullopt;
    }
    ex.t1 = *msg.carried;
    // DelayReq goes out immediately, one per FollowUp, t3 stamped at egress.
    ex.t3 = now;
    return PtpMessage{PtpMessageKind::DelayReq, msg.seq, std::nullopt};
}

std::optional<OffsetSample> PtpSlave::on_delay_resp(SimClock& clk, const PtpMessage& msg) {
    if (msg.kind != PtpMessageKind::DelayResp)
        throw ContractError("on_delay_resp: wrong message kind");
    if (!msg.carried)
        throw ContractError("on_delay_resp: DelayResp carries no timestamp");
    (void)clk;
    auto it = pending_.find(msg.seq);
    // A DelayResp cannot open an exchange: with no t2/t3 it could never
    // complete, so an unknown seq here is an orphan by definition.
    if (it == pending_.end() || it->second.t4) {
        ++orphans_;
        return std::nullopt;
    }
    it->second.t4 = *msg.carried;
    if (!it->second.complete())
        return std::nullopt;
    OffsetSample s = complete_exchange(it->second);
    pending_.erase(it);
    ++completed_;
    return s;
}

void PtpSlave::purge_stale(TimeInstant local_now) {
    std::int64_t limit = std::llround(cfg_.exchange_timeout_s * 1e9);
    for (auto it = pending_.begin(); it != pending_.end();) {
        if (delta(local_now, it->second.opened_local).nanos() > limit) {
            it = pending_.erase(it);
            ++timeouts_;
        } else {
            ++it;
        }
    }
}

} // namespace syncsim
