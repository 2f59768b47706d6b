#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "punchcard/extensions/expiry.hpp"
#include "punchcard/scheme.hpp"

namespace punchcard::server {

/// Daemon configuration, read from a flat `key = value` file (`#` comments).
///
///   listen          host:port                       (env PUNCHCARD_LISTEN overrides)
///   scheme          main | mergeable
///   accepted_n      comma-separated punch counts accepted at redemption
///   t_max           largest multi-punch promotion
///   expiry          off | month | quarter | year     (expiry boundary granularity)
///   expiry_horizon  periods ahead an expiry may lie
///   key_store       path of the server key file
///   db_path         directory of the redeemed-secret database
///   opaque_reject   true: every reject is reported as bad-card
///   db_sync         fsync each accepted redemption
///   compact_after   log records before the db snapshot is rewritten
///   stats_interval  seconds between aggregate statistics log lines
///   log_level       spdlog level name
struct ServerConfig {
    std::string listen = "127.0.0.1:7450";
    Scheme scheme = Scheme::Main;
    std::vector<std::uint16_t> accepted_n{10};
    std::uint32_t t_max = 10;
    bool expiry_enabled = false;
    ExpiryPolicy expiry;
    std::filesystem::path key_store = "punchcard.key";
    std::filesystem::path db_path = "redeemed-db";
    bool opaque_reject = false;
    bool db_sync = true;
    std::size_t compact_after = 100'000;
    std::chrono::seconds stats_interval{60};
    std::string log_level = "info";

    bool accepts(std::uint16_t n) const;
};

/// Throws ConfigError naming the offending line.
ServerConfig parse_config(std::string_view text);
ServerConfig load_config(const std::filesystem::path& path);
void apply_env_overrides(ServerConfig& config);
/// Throws ConfigError if the configuration is unusable.
void validate(const ServerConfig& config);

std::pair<std::string, std::uint16_t> split_host_port(std::string_view address);

}  // namespace punchcard::server
