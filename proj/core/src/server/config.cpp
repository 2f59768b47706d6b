#include "punchcard/server/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "punchcard/errors.hpp"

namespace punchcard::server {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view v, T min, T max) {
    T out{};
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size() || out < min || out > max)
        throw ConfigError(std::string(key) + ": expected an integer in [" + std::to_string(min) + ", " +
                          std::to_string(max) + "], got '" + std::string(v) + "'");
    return out;
}

bool parse_bool(std::string_view key, std::string_view v) {
    if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
    if (v == "false" || v == "no" || v == "off" || v == "0") return false;
    throw ConfigError(std::string(key) + ": expected a boolean, got '" + std::string(v) + "'");
}

std::vector<std::uint16_t> parse_n_list(std::string_view v) {
    std::vector<std::uint16_t> out;
    while (!v.empty()) {
        const auto comma = v.find(',');
        const auto item = trim(v.substr(0, comma));
        if (!item.empty()) out.push_back(parse_number<std::uint16_t>("accepted_n", item, 1, 65535));
        if (comma == std::string_view::npos) break;
        v.remove_prefix(comma + 1);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace

bool ServerConfig::accepts(std::uint16_t n) const {
    return std::find(accepted_n.begin(), accepted_n.end(), n) != accepted_n.end();
}

ServerConfig parse_config(std::string_view text) {
    ServerConfig cfg;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
        ++line_no;

        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));

        try {
            if (key == "listen") {
                split_host_port(value);
                cfg.listen = value;
            } else if (key == "scheme") {
                cfg.scheme = parse_scheme(value);
            } else if (key == "accepted_n") {
                cfg.accepted_n = parse_n_list(value);
            } else if (key == "t_max") {
                cfg.t_max = parse_number<std::uint32_t>(key, value, 1, 255);
            } else if (key == "expiry") {
                cfg.expiry_enabled = value != "off";
                if (cfg.expiry_enabled) cfg.expiry.granularity = parse_granularity(value);
            } else if (key == "expiry_horizon") {
                cfg.expiry.horizon_periods = parse_number<std::uint32_t>(key, value, 1, 1000);
            } else if (key == "key_store") {
                cfg.key_store = std::string(value);
            } else if (key == "db_path") {
                cfg.db_path = std::string(value);
            } else if (key == "opaque_reject") {
                cfg.opaque_reject = parse_bool(key, value);
            } else if (key == "db_sync") {
                cfg.db_sync = parse_bool(key, value);
            } else if (key == "compact_after") {
                cfg.compact_after = parse_number<std::size_t>(key, value, 1, std::size_t{1} << 40);
            } else if (key == "stats_interval") {
                cfg.stats_interval = std::chrono::seconds(parse_number<std::uint32_t>(key, value, 0, 86400));
            } else if (key == "log_level") {
                cfg.log_level = value;
            } else {
                throw ConfigError("unknown key '" + std::string(key) + "'");
            }
        } catch (const Error& e) {
            throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    validate(cfg);
    return cfg;
}

ServerConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    auto cfg = parse_config(ss.str());
    // Relative paths in the file resolve against the file's directory.
    const auto base = path.parent_path();
    if (cfg.key_store.is_relative()) cfg.key_store = base / cfg.key_store;
    if (cfg.db_path.is_relative()) cfg.db_path = base / cfg.db_path;
    return cfg;
}

void apply_env_overrides(ServerConfig& config) {
    if (const char* listen = std::getenv("PUNCHCARD_LISTEN"); listen != nullptr && *listen != '\0') {
        split_host_port(listen);
        config.listen = listen;
    }
}

void validate(const ServerConfig& config) {
    if (config.accepted_n.empty()) throw ConfigError("accepted_n must list at least one punch count");
    if (config.t_max == 0) throw ConfigError("t_max must be at least 1");
    split_host_port(config.listen);
}

std::pair<std::string, std::uint16_t> split_host_port(std::string_view address) {
    const auto colon = address.rfind(':');
    if (colon == std::string_view::npos || colon == 0)
        throw ConfigError("listen address '" + std::string(address) + "' is not host:port");
    std::string host(address.substr(0, colon));
    if (host.size() > 2 && host.front() == '[' && host.back() == ']') host = host.substr(1, host.size() - 2);
    return {host, parse_number<std::uint16_t>("port", address.substr(colon + 1), 0, 65535)};
}

}  // namespace punchcard::server
