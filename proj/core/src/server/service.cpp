#include "punchcard/server/service.hpp"

#include <spdlog/spdlog.h>

#include "punchcard/errors.hpp"
#include "punchcard/extensions/expiry.hpp"
#include "punchcard/extensions/multi_punch.hpp"

namespace punchcard::server {

using wire::ErrorCode;
using wire::Frame;
using wire::MsgType;
using Counter = AggregateStats::Counter;

namespace {

Rng& thread_rng() {
    thread_local Rng rng = Rng::system();
    return rng;
}

Frame status_frame(MsgType type, VerifyOutcome outcome) {
    return Frame{type, Bytes{static_cast<std::uint8_t>(outcome)}};
}

}  // namespace

Service::Service(ServerConfig config, RedeemDb db, const Secret32& secret, std::shared_ptr<spdlog::logger> logger)
    : config_(std::move(config)), db_(std::move(db)), logger_(std::move(logger)), today_(today_utc) {
    validate(config_);
    if (!logger_) logger_ = spdlog::default_logger();
    if (config_.scheme == Scheme::Main) {
        main_.emplace(ServerKeys<MainGroup>::from_secret(MainGroup::Scalar::from_bytes(secret)));
    } else {
        merge_.emplace(MergeServerKeys<MergeGroups>::from_secret(MergeGroups::Scalar::from_bytes(secret)));
    }
}

Bytes Service::public_key() const {
    if (main_) {
        const auto pk = main_->keys().public_key_bytes();
        return Bytes(pk.begin(), pk.end());
    }
    return merge_->keys().public_key_bytes();
}

Frame Service::handle(const Frame& request) {
    try {
        switch (request.type) {
            case MsgType::GetPkReq:
                if (!request.body.empty()) throw InvalidEncoding("GET_PK_REQ carries no body");
                return Frame{MsgType::GetPkResp, public_key()};
            case MsgType::PunchReq: return handle_punch(request);
            case MsgType::MultiPunchReq: return handle_multi_punch(request);
            case MsgType::RedeemReq: return handle_redeem(request);
            case MsgType::MergePunchReq: return handle_merge_punch(request);
            case MsgType::MergeRedeemReq: return handle_merge_redeem(request);
            default:
                stats_.add(Counter::ProtocolErrors);
                return wire::make_error(ErrorCode::UnsupportedType,
                                        "unsupported message type " + std::to_string(static_cast<int>(request.type)));
        }
    } catch (const InvalidEncoding& e) {
        stats_.add(Counter::ProtocolErrors);
        logger_->debug("malformed {}: {}", wire::to_string(request.type), e.what());
        return wire::make_error(ErrorCode::Malformed, e.what());
    } catch (const PromotionTooLarge& e) {
        stats_.add(Counter::ProtocolErrors);
        return wire::make_error(ErrorCode::PromotionTooLarge, e.what());
    } catch (const StorageError& e) {
        logger_->error("redeemed-secret store failure: {}", e.what());
        return wire::make_error(ErrorCode::Internal, "storage failure");
    }
}

Frame Service::handle_punch(const Frame& f) {
    if (!main_) return wire::make_error(ErrorCode::WrongScheme, "server runs the mergeable scheme");
    const auto card = PunchCard<MainGroup>::deserialize(f.body);
    const auto resp = main_->punch(card.p, thread_rng());
    stats_.add(Counter::Punches);
    return Frame{MsgType::PunchResp, resp.serialize()};
}

Frame Service::handle_multi_punch(const Frame& f) {
    if (!main_) return wire::make_error(ErrorCode::WrongScheme, "server runs the mergeable scheme");
    if (f.body.size() != PunchCard<MainGroup>::kBytes + 1) throw InvalidEncoding("multi-punch request: wrong length");
    const auto card = PunchCard<MainGroup>::deserialize(ByteView(f.body).first(PunchCard<MainGroup>::kBytes));
    const std::uint32_t t = f.body.back();
    const auto resp = server_multi_punch<MainGroup>(main_->keys(), card.p, t, thread_rng(), config_.t_max);
    stats_.add(Counter::Punches);
    stats_.add(Counter::PromotionPunches, t);
    return Frame{MsgType::MultiPunchResp, resp.serialize()};
}

VerifyOutcome Service::expiry_gate(const Secret32& u) const {
    if (!config_.expiry_enabled) return VerifyOutcome::Accepted;
    switch (check_expiry(u, today_(), config_.expiry)) {
        case ExpiryStatus::Expired: return VerifyOutcome::Expired;
        case ExpiryStatus::TooFarOrMalformed: return VerifyOutcome::BadCard;
        case ExpiryStatus::Valid: break;
    }
    return VerifyOutcome::Accepted;
}

Frame Service::handle_redeem(const Frame& f) {
    if (!main_) return wire::make_error(ErrorCode::WrongScheme, "server runs the mergeable scheme");
    const auto [body, n] = wire::split_redeem_request(f, RedeemRequest<MainGroup>::kBytes);
    const auto req = RedeemRequest<MainGroup>::deserialize(body);
    if (!config_.accepts(n))
        return wire::make_error(ErrorCode::PunchCountNotAccepted, "punch count " + std::to_string(n) + " not accepted");
    VerifyOutcome outcome = expiry_gate(req.u);
    if (outcome == VerifyOutcome::Accepted) outcome = main_->verify(db_, req, n);
    return redeem_response(MsgType::RedeemResp, outcome, false);
}

Frame Service::handle_merge_punch(const Frame& f) {
    if (!merge_) return wire::make_error(ErrorCode::WrongScheme, "server runs the main scheme");
    const auto card = MergeCard<MergeGroups>::deserialize(f.body);
    const auto resp = merge_->punch(card, thread_rng());
    stats_.add(Counter::MergePunches);
    return Frame{MsgType::MergePunchResp, resp.serialize()};
}

Frame Service::handle_merge_redeem(const Frame& f) {
    if (!merge_) return wire::make_error(ErrorCode::WrongScheme, "server runs the main scheme");
    const auto [body, n] = wire::split_redeem_request(f, MergeRedeemRequest<MergeGroups>::kBytes);
    const auto req = MergeRedeemRequest<MergeGroups>::deserialize(body);
    if (!config_.accepts(n))
        return wire::make_error(ErrorCode::PunchCountNotAccepted, "punch count " + std::to_string(n) + " not accepted");
    VerifyOutcome outcome = expiry_gate(req.u);
    if (outcome == VerifyOutcome::Accepted) outcome = expiry_gate(req.u_other);
    if (outcome == VerifyOutcome::Accepted) outcome = merge_->verify(db_, req, n);
    return redeem_response(MsgType::MergeRedeemResp, outcome, true);
}

Frame Service::redeem_response(MsgType type, VerifyOutcome outcome, bool merged) {
    switch (outcome) {
        case VerifyOutcome::Accepted: stats_.add(merged ? Counter::MergeRedeemed : Counter::Redeemed); break;
        case VerifyOutcome::BadCard: stats_.add(Counter::RejectBadCard); break;
        case VerifyOutcome::DoubleSpend: stats_.add(Counter::RejectDoubleSpend); break;
        case VerifyOutcome::Expired: stats_.add(Counter::RejectExpired); break;
    }
    if (config_.opaque_reject && outcome != VerifyOutcome::Accepted) outcome = VerifyOutcome::BadCard;
    return status_frame(type, outcome);
}

void Service::log_stats() { logger_->info("stats {}", stats_.to_json()); }

void Service::flush() { db_.flush(); }

Frame LoopbackTransport::roundtrip(const Frame& request) {
    const auto decoded = wire::decode_frame(request.encode());
    if (decoded.status != wire::DecodeResult::Status::Ok) throw TransportError("loopback: " + decoded.error);
    const auto reply = service_.handle(decoded.frame).encode();
    const auto back = wire::decode_frame(reply);
    if (back.status != wire::DecodeResult::Status::Ok) throw TransportError("loopback: " + back.error);
    return back.frame;
}

}  // namespace punchcard::server
