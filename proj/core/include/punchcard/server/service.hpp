#pragma once

#include <functional>
#include <memory>
#include <optional>

#include <spdlog/logger.h>

#include "punchcard/mergeable.hpp"
#include "punchcard/punchcard.hpp"
#include "punchcard/redeem_db.hpp"
#include "punchcard/scheme.hpp"
#include "punchcard/server/config.hpp"
#include "punchcard/server/stats.hpp"
#include "punchcard/transport.hpp"
#include "punchcard/wire.hpp"

namespace punchcard::server {

/// Request dispatcher shared by every connection. handle() is thread-safe:
/// punches touch no shared state, redemptions synchronise only inside the
/// database's check-and-insert.
class Service {
public:
    Service(ServerConfig config, RedeemDb db, const Secret32& secret,
            std::shared_ptr<spdlog::logger> logger = nullptr);

    wire::Frame handle(const wire::Frame& request);

    Scheme scheme() const { return config_.scheme; }
    const ServerConfig& config() const { return config_; }
    Bytes public_key() const;
    AggregateStats& stats() { return stats_; }
    RedeemDb& db() { return db_; }
    spdlog::logger& logger() { return *logger_; }

    /// Overrides the date used for expiry checks (tests).
    void set_clock(std::function<Date()> today) { today_ = std::move(today); }

    const PunchServer<MainGroup>* main_server() const { return main_ ? &*main_ : nullptr; }
    const MergePunchServer<MergeGroups>* merge_server() const { return merge_ ? &*merge_ : nullptr; }

    void log_stats();
    void flush();

private:
    wire::Frame handle_punch(const wire::Frame& f);
    wire::Frame handle_multi_punch(const wire::Frame& f);
    wire::Frame handle_redeem(const wire::Frame& f);
    wire::Frame handle_merge_punch(const wire::Frame& f);
    wire::Frame handle_merge_redeem(const wire::Frame& f);
    wire::Frame redeem_response(wire::MsgType type, VerifyOutcome outcome, bool merged);
    VerifyOutcome expiry_gate(const Secret32& u) const;

    ServerConfig config_;
    RedeemDb db_;
    std::optional<PunchServer<MainGroup>> main_;
    std::optional<MergePunchServer<MergeGroups>> merge_;
    AggregateStats stats_;
    std::shared_ptr<spdlog::logger> logger_;
    std::function<Date()> today_;
};

/// In-process transport straight into a Service, through full frame encoding.
class LoopbackTransport : public Transport {
public:
    explicit LoopbackTransport(Service& service) : service_(service) {}
    wire::Frame roundtrip(const wire::Frame& request) override;

private:
    Service& service_;
};

}  // namespace punchcard::server
