#include <gtest/gtest.h>

#include <fstream>

#include "faults.hpp"
#include "punchcard/errors.hpp"
#include "punchcard/storage.hpp"
#include "temp_dir.hpp"

namespace punchcard {
namespace {

using testing::ScriptedFaults;
using testing::TempDir;

std::vector<Bytes> replay(const std::filesystem::path& p, AppendLog* keep = nullptr) {
    std::vector<Bytes> out;
    AppendLog log(p, "TEST", 1, [&](ByteView rec) { out.emplace_back(rec.begin(), rec.end()); }, {false, nullptr, "t"});
    if (keep) *keep = std::move(log);
    return out;
}

TEST(AtomicFile, ReplacesContents) {
    TempDir dir;
    const auto p = dir / "f";
    EXPECT_FALSE(read_file(p).has_value());
    write_file_atomic(p, as_bytes("one"), false);
    write_file_atomic(p, as_bytes("second"), false);
    const auto got = read_file(p);
    ASSERT_TRUE(got.has_value());
    EXPECT_EQ(std::string(got->begin(), got->end()), "second");
}

TEST(AtomicFile, CrashBeforeRenameKeepsOldFile) {
    TempDir dir;
    const auto p = dir / "f";
    write_file_atomic(p, as_bytes("old"), false);
    ScriptedFaults faults;
    faults.arm({std::nullopt, 0, "snap.before-rename"});
    EXPECT_THROW(write_file_atomic(p, as_bytes("new"), false, &faults, "snap"), SimulatedCrash);
    EXPECT_EQ(*read_file(p), Bytes({'o', 'l', 'd'}));
    faults.arm({0, 1, {}});
    EXPECT_THROW(write_file_atomic(p, as_bytes("new"), false, &faults, "snap"), SimulatedCrash);
    EXPECT_EQ(*read_file(p), Bytes({'o', 'l', 'd'}));
}

TEST(AppendLog, ReplaysRecordsInOrder) {
    TempDir dir;
    const auto p = dir / "log";
    {
        AppendLog log;
        replay(p, &log);
        log.append(as_bytes("a"));
        log.append(as_bytes("bc"));
        log.append(as_bytes(""));
        EXPECT_EQ(log.record_count(), 3u);
    }
    const auto recs = replay(p);
    ASSERT_EQ(recs.size(), 3u);
    EXPECT_EQ(recs[1], Bytes({'b', 'c'}));
    EXPECT_TRUE(recs[2].empty());
}

TEST(AppendLog, TornTailIsTruncatedAtEveryCut) {
    TempDir dir;
    for (std::size_t cut = 0; cut < 4 + 5 + 4; ++cut) {
        const auto p = dir / ("log" + std::to_string(cut));
        ScriptedFaults faults;
        {
            AppendLog log(p, "TEST", 1, [](ByteView) {}, {false, &faults, "t"});
            log.append(as_bytes("first"));
            faults.arm({0, cut, {}});
            EXPECT_THROW(log.append(as_bytes("torn!")), SimulatedCrash);
        }
        AppendLog reopened;
        const auto recs = replay(p, &reopened);
        ASSERT_EQ(recs.size(), 1u) << "cut " << cut;
        EXPECT_EQ(reopened.truncated_bytes(), cut);
        reopened.append(as_bytes("after"));
        reopened = AppendLog();
        EXPECT_EQ(replay(p).size(), 2u);
    }
}

TEST(AppendLog, CorruptionBeforeTheTailIsFatal) {
    TempDir dir;
    const auto p = dir / "log";
    {
        AppendLog log;
        replay(p, &log);
        log.append(as_bytes("first"));
        log.append(as_bytes("second"));
    }
    {
        std::fstream f(p, std::ios::binary | std::ios::in | std::ios::out);
        f.seekp(5 + 4 + 1);  // inside the first payload
        f.put('X');
    }
    EXPECT_THROW(replay(p), CorruptStore);
}

TEST(AppendLog, WrongMagicIsFatal) {
    TempDir dir;
    const auto p = dir / "log";
    {
        std::ofstream f(p, std::ios::binary);
        f << "NOPE\x01";
    }
    EXPECT_THROW(replay(p), CorruptStore);
}

TEST(AppendLog, ResetDropsRecords) {
    TempDir dir;
    const auto p = dir / "log";
    {
        AppendLog log;
        replay(p, &log);
        log.append(as_bytes("x"));
        log.reset();
        EXPECT_EQ(log.record_count(), 0u);
        log.append(as_bytes("y"));
    }
    const auto recs = replay(p);
    ASSERT_EQ(recs.size(), 1u);
    EXPECT_EQ(recs[0], Bytes({'y'}));
}

}  // namespace
}  // namespace punchcard
