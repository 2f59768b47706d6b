#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>

#include <nlohmann/json.hpp>

#include "punchcard/errors.hpp"
#include "punchcard/server/config.hpp"
#include "punchcard/server/key_store.hpp"
#include "punchcard/server/stats.hpp"
#include "temp_dir.hpp"

namespace punchcard::server {
namespace {

using testing::TempDir;

TEST(Config, Defaults) {
    const auto cfg = parse_config("");
    EXPECT_EQ(cfg.listen, "127.0.0.1:7450");
    EXPECT_EQ(cfg.scheme, Scheme::Main);
    EXPECT_TRUE(cfg.accepts(10));
    EXPECT_FALSE(cfg.accepts(9));
    EXPECT_FALSE(cfg.expiry_enabled);
    EXPECT_TRUE(cfg.db_sync);
}

TEST(Config, ParsesEveryKey) {
    const auto cfg = parse_config(R"(
# comment
listen = 0.0.0.0:9000
scheme = mergeable
accepted_n = 5, 10,20
t_max = 4
expiry = month
expiry_horizon = 3
key_store = /tmp/k
db_path = /tmp/db
opaque_reject = true
db_sync = false
compact_after = 50
stats_interval = 5
log_level = debug
)");
    EXPECT_EQ(cfg.listen, "0.0.0.0:9000");
    EXPECT_EQ(cfg.scheme, Scheme::Mergeable);
    EXPECT_EQ(cfg.accepted_n, (std::vector<std::uint16_t>{5, 10, 20}));
    EXPECT_EQ(cfg.t_max, 4u);
    EXPECT_TRUE(cfg.expiry_enabled);
    EXPECT_EQ(cfg.expiry.granularity, ExpiryGranularity::Month);
    EXPECT_EQ(cfg.expiry.horizon_periods, 3u);
    EXPECT_EQ(cfg.key_store, "/tmp/k");
    EXPECT_TRUE(cfg.opaque_reject);
    EXPECT_FALSE(cfg.db_sync);
    EXPECT_EQ(cfg.compact_after, 50u);
    EXPECT_EQ(cfg.stats_interval, std::chrono::seconds(5));
    EXPECT_EQ(cfg.log_level, "debug");
}

TEST(Config, ErrorsNameTheLine) {
    try {
        parse_config("scheme = main\nbogus = 1\n");
        FAIL() << "no error";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
    }
    EXPECT_THROW(parse_config("accepted_n = 0"), ConfigError);
    EXPECT_THROW(parse_config("accepted_n ="), ConfigError);
    EXPECT_THROW(parse_config("scheme = other"), ConfigError);
    EXPECT_THROW(parse_config("listen = nohost"), ConfigError);
    EXPECT_THROW(parse_config("db_sync = maybe"), ConfigError);
    EXPECT_THROW(parse_config("just words"), ConfigError);
}

TEST(Config, RelativePathsFollowTheFile) {
    TempDir dir;
    const auto p = dir / "server.conf";
    std::ofstream(p) << "key_store = k.key\ndb_path = /abs/db\n";
    const auto cfg = load_config(p);
    EXPECT_EQ(cfg.key_store, dir / "k.key");
    EXPECT_EQ(cfg.db_path, "/abs/db");
    EXPECT_THROW(load_config(dir / "missing.conf"), ConfigError);
}

TEST(Config, EnvironmentOverride) {
    auto cfg = parse_config("");
    ::setenv("PUNCHCARD_LISTEN", "127.0.0.1:1234", 1);
    apply_env_overrides(cfg);
    ::unsetenv("PUNCHCARD_LISTEN");
    EXPECT_EQ(cfg.listen, "127.0.0.1:1234");
}

TEST(Config, HostPort) {
    EXPECT_EQ(split_host_port("localhost:80"), std::make_pair(std::string("localhost"), std::uint16_t{80}));
    EXPECT_EQ(split_host_port("[::1]:7").first, "::1");
    EXPECT_THROW(split_host_port(":80"), ConfigError);
    EXPECT_THROW(split_host_port("h:99999"), ConfigError);
}

TEST(KeyStore, CreateThenLoad) {
    TempDir dir;
    auto rng = Rng::system();
    const auto p = dir / "sub" / "server.key";
    const auto created = load_or_create_key(p, Scheme::Main, rng, false);
    const auto loaded = load_or_create_key(p, Scheme::Main, rng, false);
    EXPECT_EQ(created.secret, loaded.secret);
    EXPECT_EQ(std::filesystem::file_size(p), 42u);
    EXPECT_EQ(std::filesystem::status(p).permissions() & std::filesystem::perms::others_read,
              std::filesystem::perms::none);
    EXPECT_THROW(load_or_create_key(p, Scheme::Mergeable, rng, false), KeyStoreError);
}

TEST(KeyStore, DetectsCorruption) {
    KeyMaterial k{Scheme::Mergeable, {}};
    k.secret[0] = 9;
    auto bytes = encode_key_file(k);
    EXPECT_EQ(bytes.size(), 42u);
    EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "PCKS");
    EXPECT_EQ(decode_key_file(bytes).secret, k.secret);
    bytes[10] ^= 1;
    EXPECT_THROW(decode_key_file(bytes), KeyStoreError);
    EXPECT_THROW(decode_key_file(Bytes(10, 0)), KeyStoreError);
}

TEST(Stats, CountsAndBuckets) {
    AggregateStats s;
    using C = AggregateStats::Counter;
    const auto t0 = AggregateStats::Clock::time_point(std::chrono::hours(1000));
    s.add(C::Punches, 3, t0);
    s.add(C::Punches, 1, t0 + std::chrono::hours(1));
    s.add(C::RejectBadCard, 1, t0);
    EXPECT_EQ(s.total(C::Punches), 4u);
    const auto b = s.buckets();
    ASSERT_EQ(b.size(), 2u);
    EXPECT_EQ(b.at(1000)[0], 3u);
    const auto j = nlohmann::json::parse(s.to_json());
    EXPECT_EQ(j["total"]["punches"], 4);
    EXPECT_EQ(j["total"]["reject_bad_card"], 1);
    for (int h = 0; h < 100; ++h) s.add(C::Redeemed, 1, t0 + std::chrono::hours(h));
    EXPECT_EQ(s.buckets().size(), AggregateStats::kRetainedBuckets);
}

}  // namespace
}  // namespace punchcard::server
