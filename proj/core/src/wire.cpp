#include "punchcard/wire.hpp"

#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "punchcard/errors.hpp"

namespace punchcard::wire {

std::string_view to_string(MsgType t) {
    switch (t) {
        case MsgType::PunchReq: return "PUNCH_REQ";
        case MsgType::PunchResp: return "PUNCH_RESP";
        case MsgType::RedeemReq: return "REDEEM_REQ";
        case MsgType::RedeemResp: return "REDEEM_RESP";
        case MsgType::MultiPunchReq: return "MULTI_PUNCH_REQ";
        case MsgType::MultiPunchResp: return "MULTI_PUNCH_RESP";
        case MsgType::MergePunchReq: return "MERGE_PUNCH_REQ";
        case MsgType::MergePunchResp: return "MERGE_PUNCH_RESP";
        case MsgType::MergeRedeemReq: return "MERGE_REDEEM_REQ";
        case MsgType::MergeRedeemResp: return "MERGE_REDEEM_RESP";
        case MsgType::GetPkReq: return "GET_PK_REQ";
        case MsgType::GetPkResp: return "GET_PK_RESP";
        case MsgType::Error: return "ERROR";
    }
    return "UNKNOWN";
}

bool is_known(std::uint8_t type) { return (type >= 0x01 && type <= 0x0C) || type == 0x7F; }

Bytes Frame::encode() const {
    Bytes out;
    out.reserve(wire_size());
    put_u32_le(out, static_cast<std::uint32_t>(wire_size()));
    out.push_back(static_cast<std::uint8_t>(type));
    append_to(out, body);
    return out;
}

std::size_t Frame::payload_size() const {
    if ((type == MsgType::RedeemReq || type == MsgType::MergeRedeemReq) && body.size() >= kRedeemTrailerBytes)
        return body.size() - kRedeemTrailerBytes;
    return body.size();
}

DecodeResult decode_frame(ByteView buffer) {
    DecodeResult r;
    if (buffer.size() < 4) return r;
    const std::uint32_t total = get_u32_le(buffer.data());
    if (total < kHeaderBytes) {
        r.status = DecodeResult::Status::Invalid;
        r.error = "frame length below header size";
        return r;
    }
    if (total > kMaxFrameBytes) {
        r.status = DecodeResult::Status::Invalid;
        r.error = "frame too large";
        return r;
    }
    if (buffer.size() < total) return r;
    r.status = DecodeResult::Status::Ok;
    r.frame.type = static_cast<MsgType>(buffer[4]);
    r.frame.body.assign(buffer.begin() + kHeaderBytes, buffer.begin() + total);
    r.consumed = total;
    return r;
}

Frame make_error(ErrorCode code, std::string_view message) {
    Frame f{MsgType::Error, {}};
    f.body.push_back(static_cast<std::uint8_t>(code));
    f.body.insert(f.body.end(), message.begin(), message.end());
    return f;
}

std::pair<ErrorCode, std::string> parse_error(const Frame& f) {
    if (f.type != MsgType::Error || f.body.empty()) return {ErrorCode::Malformed, "not an error frame"};
    return {static_cast<ErrorCode>(f.body[0]), std::string(f.body.begin() + 1, f.body.end())};
}

Frame make_redeem_request(MsgType type, ByteView request, std::uint16_t n) {
    Frame f{type, Bytes(request.begin(), request.end())};
    put_u16_le(f.body, n);
    return f;
}

std::pair<ByteView, std::uint16_t> split_redeem_request(const Frame& f, std::size_t request_bytes) {
    if (f.body.size() != request_bytes + kRedeemTrailerBytes)
        throw InvalidEncoding("redeem request body has wrong length");
    return {ByteView(f.body.data(), request_bytes), get_u16_le(f.body.data() + request_bytes)};
}

namespace {

void write_all(int fd, const std::uint8_t* data, std::size_t len) {
    while (len > 0) {
        ssize_t n = ::send(fd, data, len, MSG_NOSIGNAL);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw TransportError(std::string("send: ") + std::strerror(errno));
        }
        data += n;
        len -= static_cast<std::size_t>(n);
    }
}

/// Returns false on EOF before the first byte; throws on EOF mid-buffer.
bool read_exact(int fd, std::uint8_t* data, std::size_t len) {
    std::size_t got = 0;
    while (got < len) {
        ssize_t n = ::recv(fd, data + got, len - got, 0);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw TransportError(std::string("recv: ") + std::strerror(errno));
        }
        if (n == 0) {
            if (got == 0) return false;
            throw TransportError("connection closed mid-frame");
        }
        got += static_cast<std::size_t>(n);
    }
    return true;
}

}  // namespace

void write_frame(int fd, const Frame& f) {
    auto bytes = f.encode();
    write_all(fd, bytes.data(), bytes.size());
}

std::optional<Frame> read_frame(int fd) {
    std::uint8_t header[kHeaderBytes];
    if (!read_exact(fd, header, 4)) return std::nullopt;
    const std::uint32_t total = get_u32_le(header);
    if (total < kHeaderBytes || total > kMaxFrameBytes)
        throw InvalidEncoding("frame length " + std::to_string(total) + " out of range");
    if (!read_exact(fd, header + 4, 1)) throw TransportError("connection closed mid-frame");
    Frame f;
    f.type = static_cast<MsgType>(header[4]);
    f.body.resize(total - kHeaderBytes);
    if (!f.body.empty() && !read_exact(fd, f.body.data(), f.body.size()))
        throw TransportError("connection closed mid-frame");
    return f;
}

}  // namespace punchcard::wire
