#pragma once

// Binary framing: total-length (u32 LE, whole frame including these 4 bytes)
// || message-type (1 byte) || body. Bodies carry exactly the protocol
// messages; REDEEM_REQ and MERGE_REDEEM_REQ append n as a u16 LE trailer.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "punchcard/bytes.hpp"

namespace punchcard::wire {

enum class MsgType : std::uint8_t {
    PunchReq = 0x01,
    PunchResp = 0x02,
    RedeemReq = 0x03,
    RedeemResp = 0x04,
    MultiPunchReq = 0x05,
    MultiPunchResp = 0x06,
    MergePunchReq = 0x07,
    MergePunchResp = 0x08,
    MergeRedeemReq = 0x09,
    MergeRedeemResp = 0x0A,
    GetPkReq = 0x0B,
    GetPkResp = 0x0C,
    Error = 0x7F,
};

enum class ErrorCode : std::uint8_t {
    Malformed = 1,
    UnsupportedType = 2,
    WrongScheme = 3,
    PunchCountNotAccepted = 4,
    PromotionTooLarge = 5,
    Internal = 6,
    FrameTooLarge = 7,
};

inline constexpr std::size_t kHeaderBytes = 5;
inline constexpr std::size_t kMaxFrameBytes = 64 * 1024;
/// Size of the n trailer on redeem requests.
inline constexpr std::size_t kRedeemTrailerBytes = 2;

std::string_view to_string(MsgType t);
bool is_known(std::uint8_t type);

struct Frame {
    MsgType type = MsgType::Error;
    Bytes body;

    Bytes encode() const;
    std::size_t wire_size() const { return kHeaderBytes + body.size(); }

    /// Bytes of protocol payload, i.e. body minus framing metadata such as n.
    std::size_t payload_size() const;

    friend bool operator==(const Frame&, const Frame&) = default;
};

/// Outcome of trying to parse one frame from the front of a buffer.
struct DecodeResult {
    enum class Status { NeedMore, Ok, Invalid } status = Status::NeedMore;
    Frame frame;
    std::size_t consumed = 0;
    std::string error;
};

DecodeResult decode_frame(ByteView buffer);

Frame make_error(ErrorCode code, std::string_view message);
/// Returns (code, message) for an ERROR frame.
std::pair<ErrorCode, std::string> parse_error(const Frame& f);

Frame make_redeem_request(MsgType type, ByteView request, std::uint16_t n);
/// Splits a redeem body into (request bytes, n). Throws InvalidEncoding.
std::pair<ByteView, std::uint16_t> split_redeem_request(const Frame& f, std::size_t request_bytes);

/// Blocking helpers on a connected stream socket. Throw TransportError.
void write_frame(int fd, const Frame& f);
/// nullopt on orderly EOF before any byte of a frame.
std::optional<Frame> read_frame(int fd);

}  // namespace punchcard::wire
