// punchcard: daemon, wallet and benchmark front end.

#include <csignal>
#include <cstdio>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "punchcard/bench/harness.hpp"
#include "punchcard/client/wallet.hpp"
#include "punchcard/errors.hpp"
#include "punchcard/server/daemon.hpp"

using namespace punchcard;

namespace {

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop.store(true); }

void setup_logging(const std::string& level) {
    auto logger = spdlog::stderr_color_mt("punchcard");
    logger->set_pattern("%Y-%m-%dT%H:%M:%S.%e %^%l%$ %v");
    logger->set_level(spdlog::level::from_str(level));
    spdlog::set_default_logger(logger);
}

struct WalletArgs {
    std::string wallet = "wallet.pcw";
    std::string server = "127.0.0.1:7450";
};

std::unique_ptr<TcpTransport> connect(const std::string& address) {
    const auto [host, port] = server::split_host_port(address);
    return std::make_unique<TcpTransport>(host, port);
}

client::Wallet open_wallet(const WalletArgs& a) { return client::Wallet::open(a.wallet); }

int report_outcome(VerifyOutcome outcome) {
    if (outcome == VerifyOutcome::Accepted) {
        std::cout << "accepted\n";
        return 0;
    }
    std::cout << "rejected: " << to_string(outcome) << "\n";
    return 1;
}

std::vector<std::size_t> parse_sizes(const std::string& list) {
    std::vector<std::size_t> out;
    std::size_t pos = 0;
    while (pos <= list.size()) {
        const auto comma = list.find(',', pos);
        const auto item = list.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        if (!item.empty()) out.push_back(static_cast<std::size_t>(std::stod(item)));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Unlinkable punch cards: server, wallet and benchmarks"};
    app.require_subcommand(1);

    // server
    auto* server_cmd = app.add_subcommand("server", "Run or maintain the punch card daemon");
    server_cmd->require_subcommand(1);
    std::string config_path = "punchcard.conf";
    std::string listen_override;
    auto* run = server_cmd->add_subcommand("run", "Serve punch and redeem requests until SIGINT/SIGTERM");
    run->add_option("-c,--config", config_path, "Config file")->capture_default_str();
    run->add_option("--listen", listen_override, "Override the listen address (host:port)");
    std::string purge_today;
    auto* purge = server_cmd->add_subcommand("purge", "Drop spent secrets whose expiry has passed (offline)");
    purge->add_option("-c,--config", config_path, "Config file")->capture_default_str();
    purge->add_option("--today", purge_today, "Reference date YYYY-MM-DD (default: today, UTC)");

    // wallet
    WalletArgs wa;
    auto* wallet_cmd = app.add_subcommand("wallet", "Client card store");
    wallet_cmd->require_subcommand(1);
    wallet_cmd->add_option("-w,--wallet", wa.wallet, "Wallet file")->capture_default_str();
    wallet_cmd->add_option("-s,--server", wa.server, "Server address host:port")->capture_default_str();

    std::string scheme_name = "main";
    std::string expiry_date;
    bool with_rs = false;
    std::string granularity = "quarter";
    std::uint32_t horizon = 8;
    auto* new_card = wallet_cmd->add_subcommand("new-card", "Create a card offline (fetches the server key once)");
    new_card->add_option("--scheme", scheme_name, "main or mergeable")->capture_default_str();
    new_card->add_option("--expiry", expiry_date, "Embed an expiry boundary date YYYY-MM-DD");
    new_card->add_option("--granularity", granularity, "Expiry boundary: month, quarter or year")->capture_default_str();
    new_card->add_option("--horizon", horizon, "Expiry horizon in periods")->capture_default_str();
    new_card->add_flag("--redemption-proof", with_rs, "Derive u from a redemption secret");

    std::uint32_t card_id = 0;
    std::uint32_t count = 1;
    auto* punch = wallet_cmd->add_subcommand("punch", "Get a card punched");
    punch->add_option("--card", card_id, "Card id")->required();
    punch->add_option("-t,--count", count, "Punches in one promotion")->capture_default_str();

    std::uint16_t n = 10;
    bool force = false;
    auto* redeem = wallet_cmd->add_subcommand("redeem", "Redeem a full card");
    redeem->add_option("--card", card_id, "Card id")->required();
    redeem->add_option("-n", n, "Punch count being redeemed")->capture_default_str();
    redeem->add_flag("--force", force, "Skip the local punch-count guard");

    std::vector<std::uint32_t> merge_ids;
    auto* merge = wallet_cmd->add_subcommand("merge-redeem", "Redeem two mergeable cards together");
    merge->add_option("--cards", merge_ids, "Two card ids: G0 half from the first, G1 half from the second")
        ->required()
        ->expected(2);
    merge->add_option("-n", n, "Total punch count")->capture_default_str();
    merge->add_flag("--force", force, "Skip the local punch-count guard");

    bool as_json = false;
    auto* list = wallet_cmd->add_subcommand("list", "Show cards (no secrets)");
    list->add_flag("--json", as_json, "JSON output");

    // bench
    bench::BenchOptions bo;
    bool csv = false;
    std::string scaling;
    unsigned parallel = 0;
    auto* bench_cmd = app.add_subcommand("bench", "Timing and wire-size tables");
    bench_cmd->require_subcommand(1);
    auto add_bench_opts = [&](CLI::App* cmd) {
        cmd->add_option("--trials", bo.trials, "Trials per operation (>= 100)")
            ->capture_default_str()
            ->check(CLI::Range(std::size_t{bench::kMinTrials}, std::size_t{1} << 30));
        cmd->add_option("--db-size", bo.db_size, "Spent secrets in the db while timing ServerVerify")
            ->capture_default_str();
        cmd->add_option("-n", bo.n, "Punches per redeemed card")->capture_default_str();
        cmd->add_option("--seed", bo.seed, "Deterministic randomness (0: system)");
        cmd->add_flag("--csv", csv, "CSV instead of an aligned table");
    };
    auto* bench_main = bench_cmd->add_subcommand("main", "Main scheme over ristretto255");
    add_bench_opts(bench_main);
    bench_main->add_option("--scaling", scaling, "Also time ServerVerify at these db sizes, e.g. 0,1e4,1e6");
    bench_main->add_option("--parallel", parallel, "Also run the concurrency exercise with this many threads");
    auto* bench_merge = bench_cmd->add_subcommand("mergeable", "Mergeable scheme over BLS12-381");
    add_bench_opts(bench_merge);

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            server::ServerConfig cfg;
            try {
                cfg = server::load_config(config_path);
                server::apply_env_overrides(cfg);
                if (!listen_override.empty()) {
                    server::split_host_port(listen_override);
                    cfg.listen = listen_override;
                }
            } catch (const ConfigError& e) {
                std::cerr << "config error: " << e.what() << "\n";
                return server::kExitConfig;
            }
            setup_logging(cfg.log_level);
            std::signal(SIGINT, on_signal);
            std::signal(SIGTERM, on_signal);
            std::signal(SIGPIPE, SIG_IGN);
            return server::serve(cfg, g_stop, [](std::uint16_t port) {
                std::cout << "listening on port " << port << std::endl;
            });
        }
        if (purge->parsed()) {
            server::ServerConfig cfg;
            try {
                cfg = server::load_config(config_path);
            } catch (const ConfigError& e) {
                std::cerr << "config error: " << e.what() << "\n";
                return server::kExitConfig;
            }
            const Date today = purge_today.empty() ? today_utc() : parse_date(purge_today);
            try {
                const auto removed = server::purge(cfg, today);
                std::cout << "purged " << removed << " expired secrets\n";
            } catch (const ConfigError& e) {
                std::cerr << e.what() << "\n";
                return server::kExitConfig;
            } catch (const CorruptStore& e) {
                std::cerr << "db corrupt: " << e.what() << "\n";
                return server::kExitDbCorrupt;
            }
            return 0;
        }

        if (wallet_cmd->parsed()) {
            setup_logging("warn");
            auto wallet = open_wallet(wa);
            if (new_card->parsed()) {
                const auto scheme = parse_scheme(scheme_name);
                if (!wallet.public_key(scheme)) {
                    auto t = connect(wa.server);
                    wallet.fetch_public_key(scheme, *t);
                }
                client::NewCardOptions opts;
                opts.redemption_proof = with_rs;
                opts.policy = ExpiryPolicy{parse_granularity(granularity), horizon};
                if (!expiry_date.empty()) opts.expiry = parse_date(expiry_date);
                std::cout << wallet.new_card(scheme, opts) << "\n";
                return 0;
            }
            if (punch->parsed()) {
                auto t = connect(wa.server);
                std::cout << wallet.punch(card_id, *t, count) << "\n";
                return 0;
            }
            if (redeem->parsed()) {
                auto t = connect(wa.server);
                return report_outcome(wallet.redeem(card_id, *t, n, force));
            }
            if (merge->parsed()) {
                auto t = connect(wa.server);
                return report_outcome(wallet.merge_redeem(merge_ids[0], merge_ids[1], *t, n, force));
            }
            if (list->parsed()) {
                const auto cards = wallet.list();
                if (as_json) {
                    auto arr = nlohmann::json::array();
                    for (const auto& c : cards) {
                        nlohmann::json j{{"id", c.id},
                                         {"scheme", to_string(c.scheme)},
                                         {"punches", c.punches},
                                         {"spent", c.spent},
                                         {"redemption_proof", c.redemption_proof}};
                        if (c.expiry) j["expiry"] = format_date(*c.expiry);
                        arr.push_back(std::move(j));
                    }
                    std::cout << arr.dump(2) << "\n";
                } else {
                    std::printf("%-6s %-10s %-8s %-6s %-11s %s\n", "id", "scheme", "punches", "spent", "expiry",
                                "rs");
                    for (const auto& c : cards)
                        std::printf("%-6u %-10s %-8u %-6s %-11s %s\n", c.id, std::string(to_string(c.scheme)).c_str(),
                                    c.punches, c.spent ? "yes" : "no",
                                    c.expiry ? format_date(*c.expiry).c_str() : "-", c.redemption_proof ? "yes" : "-");
                }
                return 0;
            }
        }

        if (bench_main->parsed()) {
            const auto table = bench::bench_main(bo);
            std::cout << (csv ? table.to_csv() : table.to_text());
            if (!scaling.empty()) {
                const auto rows = bench::bench_verify_scaling(parse_sizes(scaling), bo.trials, bo.n, bo.seed);
                std::cout << (csv ? bench::scaling_to_csv(rows) : "\n" + bench::scaling_to_text(rows));
            }
            if (parallel > 0) {
                const auto r = bench::bench_parallel(parallel, std::max<std::size_t>(1, bo.trials / parallel), bo.n);
                std::cout << (csv ? "" : "\n") << r.to_text();
            }
            return 0;
        }
        if (bench_merge->parsed()) {
            const auto table = bench::bench_mergeable(bo);
            std::cout << (csv ? table.to_csv() : table.to_text());
            return 0;
        }
    } catch (const ProofRejected& e) {
        std::cerr << "punch rejected: " << e.what() << " (card unchanged)\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
