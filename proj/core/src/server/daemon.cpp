#include "punchcard/server/daemon.hpp"

#include <thread>

#include <spdlog/spdlog.h>

#include "punchcard/errors.hpp"
#include "punchcard/server/key_store.hpp"
#include "punchcard/server/tcp_server.hpp"

namespace punchcard::server {

int serve(const ServerConfig& config, const std::atomic<bool>& stop,
          const std::function<void(std::uint16_t)>& on_ready) {
    auto log = spdlog::default_logger();
    try {
        validate(config);
    } catch (const ConfigError& e) {
        log->error("config: {}", e.what());
        return kExitConfig;
    }

    KeyMaterial key;
    try {
        auto rng = Rng::system();
        key = load_or_create_key(config.key_store, config.scheme, rng);
    } catch (const KeyStoreError& e) {
        log->error("key store {}: {}", config.key_store.string(), e.what());
        return kExitKeyStore;
    }

    RedeemDb db = RedeemDb::in_memory();
    try {
        RedeemDbOptions opts;
        opts.sync = config.db_sync;
        opts.compact_after = config.compact_after;
        db = RedeemDb::open(config.db_path, opts);
    } catch (const CorruptStore& e) {
        log->error("redeemed-secret store {} is corrupt: {}", config.db_path.string(), e.what());
        return kExitDbCorrupt;
    } catch (const StorageError& e) {
        log->error("cannot open redeemed-secret store {}: {}", config.db_path.string(), e.what());
        return kExitIo;
    }
    log->info("opened store with {} redeemed secrets", db.size());

    Service service(config, std::move(db), key.secret, log);
    const auto [host, port] = split_host_port(config.listen);
    std::unique_ptr<TcpServer> server;
    try {
        server = std::make_unique<TcpServer>(service, host, port);
    } catch (const BindError& e) {
        log->error("{}", e.what());
        return kExitBind;
    }
    log->info("serving {} scheme on {}:{}", to_string(config.scheme), host, server->port());
    if (on_ready) on_ready(server->port());

    std::atomic<bool> done{false};
    std::thread stats_thread([&] {
        if (config.stats_interval.count() == 0) return;
        auto next = std::chrono::steady_clock::now() + config.stats_interval;
        while (!done.load()) {
            std::this_thread::sleep_for(std::chrono::milliseconds(100));
            if (std::chrono::steady_clock::now() >= next) {
                service.log_stats();
                next += config.stats_interval;
            }
        }
    });

    server->run(&stop);
    server->stop();
    done.store(true);
    stats_thread.join();

    int code = kExitOk;
    try {
        service.flush();
    } catch (const StorageError& e) {
        log->error("flush on shutdown failed: {}", e.what());
        code = kExitIo;
    }
    service.log_stats();
    log->info("shut down");
    return code;
}

std::size_t purge(const ServerConfig& config, Date today) {
    if (!config.expiry_enabled) throw ConfigError("purge refused: expiry encoding is disabled in the config");
    RedeemDbOptions opts;
    opts.sync = true;
    auto db = RedeemDb::open(config.db_path, opts);
    const auto removed = purge_expired(db, today);
    db.flush();
    return removed;
}

}  // namespace punchcard::server
