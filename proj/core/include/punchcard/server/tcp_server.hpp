#pragma once

#include <atomic>
#include <cstdint>
#include <list>
#include <mutex>
#include <string>
#include <thread>

#include "punchcard/server/service.hpp"

namespace punchcard::server {

class BindError : public Error {
public:
    using Error::Error;
};

/// Thread-per-connection TCP front end for a Service.
class TcpServer {
public:
    /// Binds and listens immediately; port 0 picks an ephemeral port.
    TcpServer(Service& service, const std::string& host, std::uint16_t port);
    ~TcpServer();
    TcpServer(const TcpServer&) = delete;
    TcpServer& operator=(const TcpServer&) = delete;

    std::uint16_t port() const { return port_; }

    /// Accepts connections until stop() is called or `stop_flag` becomes true.
    void run(const std::atomic<bool>* stop_flag = nullptr);
    /// Stops accepting, shuts down open connections and joins their threads.
    void stop();

private:
    void serve_connection(int fd);

    Service& service_;
    int listen_fd_ = -1;
    std::uint16_t port_ = 0;
    std::atomic<bool> stopping_{false};
    std::mutex mu_;
    struct Conn {
        int fd;
        std::thread thread;
        std::atomic<bool> done{false};
    };
    std::list<Conn> conns_;
};

}  // namespace punchcard::server
