#pragma once

// Two-step PTP over a point-to-point link (master = MC, slave = OBC).
//
// Message flow per exchange seq:
//   master Sync        -> slave records t2 on arrival
//   master FollowUp    -> carries t1 (master's Sync egress timestamp)
//   slave  DelayReq    -> slave records t3 at egress
//   master DelayResp   -> carries t4 (master's DelayReq ingress timestamp)
// offset = ((t2-t1) - (t4-t3)) / 2, mean path delay = ((t2-t1) + (t4-t3)) / 2,
// both with the /2 rounded half away from zero.

#include <cstdint>
#include <map>
#include <optional>
#include <utility>

#include "syncsim/oscillator.hpp"
#include "syncsim/rng.hpp"
#include "syncsim/time.hpp"

namespace syncsim {

enum class PtpMessageKind { Sync, FollowUp, DelayReq, DelayResp };

const char* to_string(PtpMessageKind k);

struct PtpMessage {
    PtpMessageKind kind = PtpMessageKind::Sync;
    std::uint32_t seq = 0;
    std::optional<TimeInstant> carried; // FollowUp: t1, DelayResp: t4
};

struct PtpExchange {
    std::uint32_t seq = 0;
    std::optional<TimeInstant> t1, t2, t3, t4;
    TimeInstant opened_local; // slave-local time the record was created
    bool complete() const { return t1 && t2 && t3 && t4; }
};

struct OffsetSample {
    std::uint32_t seq = 0;
    std::int64_t offset_ns = 0;          // slave - master
    std::int64_t mean_path_delay_ns = 0;
    TimeInstant at;                      // t2, the slave-side anchor
};

// Pure reduction of a finished exchange. Throws ContractError when any of
// t1..t4 is missing.
OffsetSample complete_exchange(const PtpExchange& ex);

// One direction of the physical link. The drop decision is always drawn
// before the jitter draw so that loss and delay stay on one stream per
// direction without reordering each other.
class LinkModel {
public:
    struct Config {
        std::int64_t delay_m2s_ns = 50'000;
        std::int64_t delay_s2m_ns = 50'000;
        double jitter_ns_sigma = 0.0;
        double drop_prob = 0.0;
    };
    enum class Direction { MasterToSlave, SlaveToMaster };

    LinkModel(Config cfg, NoiseStream rng);

    // Arrival time for a message sent at true_send, or nullopt if dropped.
    // Jittered delay is truncated at zero: arrival never precedes sending.
    std::optional<TimeInstant> transmit(Direction dir, TimeInstant true_send);

    std::int64_t dropped_count() const { return dropped_; }
    const Config& config() const { return cfg_; }

private:
    Config cfg_;
    NoiseStream rng_;
    std::int64_t dropped_ = 0;
};

// Master endpoint: stamps egress/ingress on the MC clock. The clock itself
// lives in the harness; it is passed in already advanced to the event time.
class PtpMaster {
public:
    // Sync plus its FollowUp (both leave back to back; the FollowUp carries
    // the Sync egress timestamp t1). Reusing a live seq is a caller bug.
    std::pair<PtpMessage, PtpMessage> emit_sync(SimClock& clk, std::uint32_t seq);

    PtpMessage on_delay_req(SimClock& clk, const PtpMessage& req);

    std::int64_t syncs_sent() const { return syncs_sent_; }

private:
    std::optional<std::uint32_t> last_seq_;
    std::int64_t syncs_sent_ = 0;
};

// Slave endpoint: one exchange record per seq, tolerant of reordering.
// FollowUp arriving before its Sync is buffered in the same record. Messages
// that cannot extend any exchange (unknown seq for a DelayResp, duplicate
// fields) are counted as orphans and dropped without touching other state.
class PtpSlave {
public:
    struct Config {
        double exchange_timeout_s = 2.0; // slave-local age before purge
    };

    PtpSlave() : PtpSlave(Config{}) {}
    explicit PtpSlave(Config cfg);

    void on_sync(SimClock& clk, const PtpMessage& msg);

    // DelayReq to transmit now, if this FollowUp armed the exchange.
    // Issued once per received FollowUp; t3 is stamped at egress, i.e. here.
    std::optional<PtpMessage> on_follow_up(SimClock& clk, const PtpMessage& msg);

    std::optional<OffsetSample> on_delay_resp(SimClock& clk, const PtpMessage& msg);

    // Drops exchanges older than the timeout. Runs on the slave's clock.
    void purge_stale(TimeInstant local_now);

    std::int64_t orphan_count() const { return orphans_; }
    std::int64_t timeout_count() const { return timeouts_; }
    std::int64_t completed_count() const { return completed_; }
    std::size_t pending_count() const { return pending_.size(); }

private:
    PtpExchange& open(std::uint32_t seq, TimeInstant local_now);

    Config cfg_;
    std::map<std::uint32_t, PtpExchange> pending_;
    std::int64_t orphans_ = 0;
    std::int64_t timeouts_ = 0;
    std::int64_t completed_ = 0;
};

} // namespace syncsim
