#pragma once

#include <atomic>
#include <cstdint>
#include <functional>

#include "punchcard/extensions/expiry.hpp"
#include "punchcard/server/config.hpp"

namespace punchcard::server {

/// Process exit codes of the daemon.
enum ExitCode : int {
    kExitOk = 0,
    kExitConfig = 2,
    kExitKeyStore = 3,
    kExitDbCorrupt = 4,
    kExitBind = 5,
    kExitIo = 6,
};

/// Runs the daemon until `stop` becomes true. Loads or creates the key, opens
/// the database, serves, then flushes the database. `on_ready` receives the
/// bound port once listening.
int serve(const ServerConfig& config, const std::atomic<bool>& stop,
          const std::function<void(std::uint16_t)>& on_ready = {});

/// Offline purge of spent secrets whose embedded expiry is before `today`.
/// Throws ConfigError when the configuration does not enable expiry: without
/// it secrets carry no date and nothing may be dropped.
std::size_t purge(const ServerConfig& config, Date today);

}  // namespace punchcard::server
