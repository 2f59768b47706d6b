#include "punchcard/server/tcp_server.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include <spdlog/spdlog.h>

namespace punchcard::server {

TcpServer::TcpServer(Service& service, const std::string& host, std::uint16_t port) : service_(service) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    hints.ai_flags = AI_PASSIVE | AI_NUMERICSERV;
    addrinfo* res = nullptr;
    const std::string port_str = std::to_string(port);
    if (int rc = ::getaddrinfo(host.empty() ? nullptr : host.c_str(), port_str.c_str(), &hints, &res); rc != 0)
        throw BindError("resolve " + host + ": " + ::gai_strerror(rc));

    std::string last_error = "no usable address";
    for (addrinfo* ai = res; ai != nullptr; ai = ai->ai_next) {
        int fd = ::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC, ai->ai_protocol);
        if (fd < 0) {
            last_error = std::strerror(errno);
            continue;
        }
        int one = 1;
        ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
        if (::bind(fd, ai->ai_addr, ai->ai_addrlen) == 0 && ::listen(fd, 128) == 0) {
            listen_fd_ = fd;
            break;
        }
        last_error = std::strerror(errno);
        ::close(fd);
    }
    ::freeaddrinfo(res);
    if (listen_fd_ < 0) throw BindError("bind " + host + ":" + port_str + ": " + last_error);

    sockaddr_storage addr{};
    socklen_t len = sizeof addr;
    ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = addr.ss_family == AF_INET6 ? ntohs(reinterpret_cast<sockaddr_in6*>(&addr)->sin6_port)
                                       : ntohs(reinterpret_cast<sockaddr_in*>(&addr)->sin_port);
}

TcpServer::~TcpServer() {
    stop();
    if (listen_fd_ >= 0) ::close(listen_fd_);
}

void TcpServer::run(const std::atomic<bool>* stop_flag) {
    while (!stopping_.load() && (stop_flag == nullptr || !stop_flag->load())) {
        pollfd pfd{listen_fd_, POLLIN, 0};
        const int ready = ::poll(&pfd, 1, 100);
        {
            // Reap finished connections.
            std::lock_guard lock(mu_);
            for (auto it = conns_.begin(); it != conns_.end();) {
                if (it->done.load()) {
                    it->thread.join();
                    it = conns_.erase(it);
                } else {
                    ++it;
                }
            }
        }
        if (ready <= 0 || (pfd.revents & POLLIN) == 0) continue;
        const int fd = ::accept4(listen_fd_, nullptr, nullptr, SOCK_CLOEXEC);
        if (fd < 0) continue;
        int one = 1;
        ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);

        std::lock_guard lock(mu_);
        if (stopping_.load()) {
            ::close(fd);
            break;
        }
        auto& conn = conns_.emplace_back();
        conn.fd = fd;
        conn.thread = std::thread([this, &conn] {
            serve_connection(conn.fd);
            conn.done.store(true);
        });
    }
}

void TcpServer::stop() {
    if (stopping_.exchange(true)) return;
    std::list<Conn> conns;
    {
        std::lock_guard lock(mu_);
        for (auto& c : conns_) ::shutdown(c.fd, SHUT_RDWR);
        conns.splice(conns.end(), conns_);
    }
    for (auto& c : conns)
        if (c.thread.joinable()) c.thread.join();
}

void TcpServer::serve_connection(int fd) {
    try {
        while (!stopping_.load()) {
            std::optional<wire::Frame> request;
            try {
                request = wire::read_frame(fd);
            } catch (const InvalidEncoding& e) {
                // A bad length prefix leaves no way to find the next frame boundary.
                service_.stats().add(AggregateStats::Counter::ProtocolErrors);
                wire::write_frame(fd, wire::make_error(wire::ErrorCode::FrameTooLarge, e.what()));
                break;
            }
            if (!request) break;
            wire::write_frame(fd, service_.handle(*request));
        }
    } catch (const TransportError& e) {
        service_.logger().debug("connection closed: {}", e.what());
    } catch (const std::exception& e) {
        service_.logger().error("connection handler failed: {}", e.what());
    }
    ::close(fd);
}

}  // namespace punchcard::server
