// Drives the real punchcard binary: daemon lifecycle, exit codes, wallet verbs.

#include <gtest/gtest.h>

#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <fstream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "punchcard/client/wallet.hpp"
#include "punchcard/server/key_store.hpp"
#include "temp_dir.hpp"

namespace punchcard {
namespace {

using testing::TempDir;
namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

struct Child {
    pid_t pid = -1;
    fs::path out, err;

    /// Starts the binary with stdout and stderr sent to files.
    static Child spawn(const std::vector<std::string>& args, const fs::path& dir, const std::string& tag) {
        Child c;
        c.out = dir / (tag + ".out");
        c.err = dir / (tag + ".err");
        c.pid = ::fork();
        if (c.pid == 0) {
            const int o = ::open(c.out.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0600);
            const int e = ::open(c.err.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0600);
            ::dup2(o, 1);
            ::dup2(e, 2);
            std::vector<char*> argv;
            std::string bin = PUNCHCARD_CLI_PATH;
            argv.push_back(bin.data());
            std::vector<std::string> copy = args;
            for (auto& a : copy) argv.push_back(a.data());
            argv.push_back(nullptr);
            ::execv(bin.c_str(), argv.data());
            ::_exit(127);
        }
        return c;
    }

    int wait() {
        int status = 0;
        ::waitpid(pid, &status, 0);
        pid = -1;
        return WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
    }

    /// Polls stdout for the bound port.
    std::uint16_t port() const {
        const std::string marker = "listening on port ";
        for (int i = 0; i < 500; ++i) {
            const auto text = slurp(out);
            const auto at = text.find(marker);
            if (at != std::string::npos && text.find('\n', at) != std::string::npos)
                return static_cast<std::uint16_t>(std::stoi(text.substr(at + marker.size())));
            int status = 0;
            if (::waitpid(pid, &status, WNOHANG) == pid) return 0;
            std::this_thread::sleep_for(std::chrono::milliseconds(20));
        }
        return 0;
    }

    ~Child() {
        if (pid > 0) {
            ::kill(pid, SIGKILL);
            ::waitpid(pid, nullptr, 0);
        }
    }
};

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(const std::vector<std::string>& args, const fs::path& dir) {
    static int counter = 0;
    auto c = Child::spawn(args, dir, "cmd" + std::to_string(counter++));
    const int code = c.wait();
    return {code, slurp(c.out), slurp(c.err)};
}

class DaemonTest : public ::testing::Test {
protected:
    TempDir dir{"punchcard-daemon"};
    fs::path conf = dir / "server.conf";

    void write_config(const std::string& extra = "") {
        std::ofstream(conf) << "scheme = main\naccepted_n = 3\nkey_store = server.key\ndb_path = db\n"
                               "log_level = debug\nstats_interval = 1\ndb_sync = true\n"
                            << extra;
    }

    Child start(const std::string& tag) {
        return Child::spawn({"server", "run", "-c", conf.string(), "--listen", "127.0.0.1:0"}, dir.path(), tag);
    }

    static void full_card(client::Wallet& w, client::CardId id, Transport& t) {
        for (int i = 0; i < 3; ++i) w.punch(id, t);
    }
};

TEST_F(DaemonTest, ServesSurvivesGarbageAndKill) {
    write_config();
    auto server = start("srv1");
    const auto port = server.port();
    ASSERT_NE(port, 0) << slurp(server.err);

    auto w = client::Wallet::in_memory();
    TcpTransport t("127.0.0.1", port);
    EXPECT_EQ(w.fetch_public_key(Scheme::Main, t).size(), 32u);
    const auto spent = w.new_card(Scheme::Main);
    const auto other = w.new_card(Scheme::Main);
    full_card(w, spent, t);
    EXPECT_EQ(w.redeem(spent, t, 3), VerifyOutcome::Accepted);

    // A malformed request gets an ERROR and the connection stays usable.
    const auto bad = t.roundtrip({wire::MsgType::PunchReq, Bytes(5, 0xff)});
    EXPECT_EQ(bad.type, wire::MsgType::Error);
    EXPECT_EQ(wire::parse_error(bad).first, wire::ErrorCode::Malformed);
    full_card(w, other, t);
    t.close();

    ::kill(server.pid, SIGKILL);
    EXPECT_EQ(server.wait(), 128 + SIGKILL);

    auto again = start("srv2");
    const auto port2 = again.port();
    ASSERT_NE(port2, 0) << slurp(again.err);
    TcpTransport t2("127.0.0.1", port2);
    EXPECT_EQ(*w.public_key(Scheme::Main), w.fetch_public_key(Scheme::Main, t2));
    EXPECT_EQ(w.redeem(spent, t2, 3, true), VerifyOutcome::DoubleSpend);
    EXPECT_EQ(w.redeem(other, t2, 3), VerifyOutcome::Accepted);
    t2.close();

    std::this_thread::sleep_for(std::chrono::milliseconds(1200));  // let a stats line through
    ::kill(again.pid, SIGTERM);
    EXPECT_EQ(again.wait(), 0);

    const auto log = slurp(server.err) + slurp(again.err);
    EXPECT_NE(log.find("stats"), std::string::npos);
    EXPECT_NE(log.find("malformed"), std::string::npos);
    for (auto id : {spent, other}) {
        const auto rec = w.card(id);
        EXPECT_EQ(log.find(to_hex(rec.secret_u())), std::string::npos);
        EXPECT_EQ(log.find(to_hex(ByteView(rec.secret_u()).first(6))), std::string::npos);
        EXPECT_EQ(log.find(to_hex(MainGroup::encode(rec.main_state().card.p))), std::string::npos);
    }
}

TEST_F(DaemonTest, ExitCodes) {
    std::ofstream(conf) << "scheme = main\nbogus = 1\n";
    EXPECT_EQ(start("badconf").wait(), 2);

    write_config();
    std::ofstream(dir / "server.key") << "not a key";
    EXPECT_EQ(start("badkey").wait(), 3);
    fs::remove(dir / "server.key");

    {
        auto s = start("first");
        ASSERT_NE(s.port(), 0) << slurp(s.err);
        ::kill(s.pid, SIGTERM);
        EXPECT_EQ(s.wait(), 0);
    }
    for (const auto& entry : fs::directory_iterator(dir / "db"))
        if (entry.path().filename() != "LOCK") {
            std::fstream f(entry.path(), std::ios::in | std::ios::out | std::ios::binary);
            f.seekp(0);
            f.write("XXXX", 4);
        }
    EXPECT_EQ(start("baddb").wait(), 4);
}

TEST_F(DaemonTest, WalletVerbs) {
    write_config();
    auto server = start("srv");
    const auto port = server.port();
    ASSERT_NE(port, 0) << slurp(server.err);
    const std::string wallet = (dir / "w.pcw").string();
    const std::string addr = "127.0.0.1:" + std::to_string(port);
    auto cli = [&](std::vector<std::string> verb) {
        std::vector<std::string> args{"wallet", "-w", wallet, "-s", addr};
        args.insert(args.end(), verb.begin(), verb.end());
        return run(args, dir.path());
    };

    auto r = cli({"new-card"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto id = r.out.substr(0, r.out.find('\n'));
    EXPECT_EQ(cli({"punch", "--card", id}).out, "1\n");
    EXPECT_EQ(cli({"punch", "--card", id, "-t", "2"}).out, "3\n");
    EXPECT_EQ(cli({"redeem", "--card", id, "-n", "4"}).code, 1);  // local guard
    r = cli({"redeem", "--card", id, "-n", "3"});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out, "accepted\n");
    r = cli({"redeem", "--card", id, "-n", "3", "--force"});
    EXPECT_EQ(r.code, 1);
    EXPECT_EQ(r.out.rfind("rejected: ", 0), 0u);

    r = cli({"new-card", "--expiry", "2099-01-01"});
    EXPECT_NE(r.code, 0);

    r = cli({"list", "--json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto cards = nlohmann::json::parse(r.out);
    ASSERT_EQ(cards.size(), 1u);
    EXPECT_EQ(cards[0]["punches"], 3);
    EXPECT_EQ(cards[0]["spent"], true);
    EXPECT_EQ(cards[0]["scheme"], "main");

    const auto u = client::Wallet::open(wallet).card(static_cast<client::CardId>(std::stoul(id))).secret_u();
    EXPECT_EQ(r.out.find(to_hex(u)), std::string::npos);
}

}  // namespace
}  // namespace punchcard
