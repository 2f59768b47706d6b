#pragma once

#include <cstdint>
#include <exception>
#include <filesystem>
#include <functional>
#include <optional>
#include <string_view>

#include "punchcard/bytes.hpp"

namespace punchcard {

/// Hook for crash testing. Stores consult it before every durable write; a
/// returned byte count makes the store write only that prefix and then throw
/// SimulatedCrash, leaving the on-disk state as a killed process would.
class FaultInjector {
public:
    virtual ~FaultInjector() = default;
    virtual std::optional<std::size_t> crash_after_bytes(std::string_view point, std::size_t write_len) {
        (void)point;
        (void)write_len;
        return std::nullopt;
    }
    /// Called at named points between writes; may throw SimulatedCrash.
    virtual void checkpoint(std::string_view point) { (void)point; }
};

struct SimulatedCrash : std::exception {
    const char* what() const noexcept override { return "simulated crash"; }
};

std::uint32_t crc32(ByteView data);

/// Writes `contents` to a temporary sibling, fsyncs it and renames it over
/// `path`, so readers observe either the old or the new file.
void write_file_atomic(const std::filesystem::path& path, ByteView contents, bool sync,
                       FaultInjector* faults = nullptr, std::string_view point = "file.write");

std::optional<Bytes> read_file(const std::filesystem::path& path);

/// Append-only record file: header (4-byte magic, version byte) followed by
/// records `len (u32 LE) || payload || crc32(payload) (u32 LE)`.
///
/// On open, records are replayed in order. A torn or checksum-failing record at
/// the very end is a crash artifact and is truncated away; damage anywhere
/// else throws CorruptStore.
class AppendLog {
public:
    struct Options {
        bool sync = true;
        FaultInjector* faults = nullptr;
        std::string_view fault_point = "log.append";
    };

    AppendLog() = default;
    AppendLog(const std::filesystem::path& path, std::string_view magic, std::uint8_t version,
              const std::function<void(ByteView)>& replay, Options options);
    ~AppendLog();

    AppendLog(AppendLog&& other) noexcept;
    AppendLog& operator=(AppendLog&& other) noexcept;
    AppendLog(const AppendLog&) = delete;
    AppendLog& operator=(const AppendLog&) = delete;

    void append(ByteView payload);
    /// Drops every record (after the caller has folded them into a snapshot).
    void reset();
    void sync();

    std::size_t record_count() const { return records_; }
    bool is_open() const { return fd_ >= 0; }
    /// Bytes discarded from a torn tail during the last open.
    std::size_t truncated_bytes() const { return truncated_; }

private:
    void close();

    int fd_ = -1;
    std::filesystem::path path_;
    Options options_;
    std::size_t header_len_ = 0;
    std::size_t records_ = 0;
    std::size_t truncated_ = 0;
};

void fsync_directory(const std::filesystem::path& dir);

}  // namespace punchcard
