#pragma once

#include <chrono>
#include <cstdint>
#include <string>

#include "punchcard/wire.hpp"

namespace punchcard {

/// Request/response channel to a punch card server.
class Transport {
public:
    virtual ~Transport() = default;
    /// Throws TransportError when no response arrives.
    virtual wire::Frame roundtrip(const wire::Frame& request) = 0;
};

class TcpTransport : public Transport {
public:
    TcpTransport(std::string host, std::uint16_t port,
                 std::chrono::milliseconds timeout = std::chrono::milliseconds(10'000));
    ~TcpTransport() override;
    TcpTransport(const TcpTransport&) = delete;
    TcpTransport& operator=(const TcpTransport&) = delete;

    wire::Frame roundtrip(const wire::Frame& request) override;
    void close();

private:
    void connect();

    std::string host_;
    std::uint16_t port_;
    std::chrono::milliseconds timeout_;
    int fd_ = -1;
};

/// Returns `f` if it has the expected type; throws ProtocolError otherwise,
/// carrying the server's message for ERROR frames.
const wire::Frame& expect_frame(const wire::Frame& f, wire::MsgType expected);

}  // namespace punchcard
