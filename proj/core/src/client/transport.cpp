#include "punchcard/transport.hpp"

#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <sys/time.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "punchcard/errors.hpp"

namespace punchcard {

TcpTransport::TcpTransport(std::string host, std::uint16_t port, std::chrono::milliseconds timeout)
    : host_(std::move(host)), port_(port), timeout_(timeout) {}

TcpTransport::~TcpTransport() { close(); }

void TcpTransport::close() {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
}

void TcpTransport::connect() {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    hints.ai_flags = AI_NUMERICSERV;
    addrinfo* res = nullptr;
    const std::string port_str = std::to_string(port_);
    if (int rc = ::getaddrinfo(host_.c_str(), port_str.c_str(), &hints, &res); rc != 0)
        throw TransportError("resolve " + host_ + ": " + ::gai_strerror(rc));
    std::string last_error = "no usable address";
    for (addrinfo* ai = res; ai != nullptr; ai = ai->ai_next) {
        int fd = ::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC, ai->ai_protocol);
        if (fd < 0) continue;
        timeval tv{};
        tv.tv_sec = static_cast<time_t>(timeout_.count() / 1000);
        tv.tv_usec = static_cast<suseconds_t>((timeout_.count() % 1000) * 1000);
        ::setsockopt(fd, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof tv);
        ::setsockopt(fd, SOL_SOCKET, SO_SNDTIMEO, &tv, sizeof tv);
        int one = 1;
        ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
        if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) {
            fd_ = fd;
            break;
        }
        last_error = std::strerror(errno);
        ::close(fd);
    }
    ::freeaddrinfo(res);
    if (fd_ < 0) throw TransportError("connect " + host_ + ":" + port_str + ": " + last_error);
}

wire::Frame TcpTransport::roundtrip(const wire::Frame& request) {
    if (fd_ < 0) connect();
    try {
        wire::write_frame(fd_, request);
        auto reply = wire::read_frame(fd_);
        if (!reply) throw TransportError("server closed the connection");
        return std::move(*reply);
    } catch (const Error&) {
        // The stream position is unknown after a failure; start over next time.
        close();
        throw;
    }
}

const wire::Frame& expect_frame(const wire::Frame& f, wire::MsgType expected) {
    if (f.type == expected) return f;
    if (f.type == wire::MsgType::Error) {
        const auto [code, message] = wire::parse_error(f);
        throw ProtocolError("server error " + std::to_string(static_cast<int>(code)) + ": " + message);
    }
    throw ProtocolError("expected " + std::string(wire::to_string(expected)) + ", got " +
                        std::string(wire::to_string(f.type)));
}

}  // namespace punchcard
