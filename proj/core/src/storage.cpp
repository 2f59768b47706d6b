#include "punchcard/storage.hpp"

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>
#include <zlib.h>

#include <cerrno>
#include <cstring>
#include <string>

#include "punchcard/errors.hpp"

namespace punchcard {

namespace {

constexpr std::size_t kMaxRecord = 16 * 1024 * 1024;

[[noreturn]] void throw_io(const std::string& what, const std::filesystem::path& path) {
    throw StorageError(what + " " + path.string() + ": " + std::strerror(errno));
}

void write_all(int fd, const std::uint8_t* data, std::size_t len, const std::filesystem::path& path) {
    while (len > 0) {
        ssize_t n = ::write(fd, data, len);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw_io("write", path);
        }
        data += n;
        len -= static_cast<std::size_t>(n);
    }
}

/// Writes `buf`, honouring an injected crash by writing only a prefix first.
void write_with_faults(int fd, ByteView buf, const std::filesystem::path& path, FaultInjector* faults,
                       std::string_view point) {
    if (faults != nullptr) {
        if (auto limit = faults->crash_after_bytes(point, buf.size())) {
            write_all(fd, buf.data(), std::min(*limit, buf.size()), path);
            throw SimulatedCrash{};
        }
    }
    write_all(fd, buf.data(), buf.size(), path);
}

}  // namespace

std::uint32_t crc32(ByteView data) {
    return static_cast<std::uint32_t>(::crc32(0L, data.data(), static_cast<uInt>(data.size())));
}

void fsync_directory(const std::filesystem::path& dir) {
    int fd = ::open(dir.empty() ? "." : dir.c_str(), O_RDONLY | O_DIRECTORY);
    if (fd < 0) return;
    ::fsync(fd);
    ::close(fd);
}

void write_file_atomic(const std::filesystem::path& path, ByteView contents, bool sync, FaultInjector* faults,
                       std::string_view point) {
    auto tmp = path;
    tmp += ".tmp";
    int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0600);
    if (fd < 0) throw_io("open", tmp);
    try {
        write_with_faults(fd, contents, tmp, faults, point);
        if (sync && ::fsync(fd) != 0) throw_io("fsync", tmp);
    } catch (...) {
        ::close(fd);
        throw;
    }
    ::close(fd);
    if (faults != nullptr) faults->checkpoint(std::string(point) + ".before-rename");
    if (::rename(tmp.c_str(), path.c_str()) != 0) throw_io("rename", path);
    if (sync) fsync_directory(path.parent_path());
}

std::optional<Bytes> read_file(const std::filesystem::path& path) {
    int fd = ::open(path.c_str(), O_RDONLY | O_CLOEXEC);
    if (fd < 0) {
        if (errno == ENOENT) return std::nullopt;
        throw_io("open", path);
    }
    Bytes out;
    std::uint8_t buf[65536];
    for (;;) {
        ssize_t n = ::read(fd, buf, sizeof buf);
        if (n < 0) {
            if (errno == EINTR) continue;
            ::close(fd);
            throw_io("read", path);
        }
        if (n == 0) break;
        out.insert(out.end(), buf, buf + n);
    }
    ::close(fd);
    return out;
}

AppendLog::AppendLog(const std::filesystem::path& path, std::string_view magic, std::uint8_t version,
                     const std::function<void(ByteView)>& replay, Options options)
    : path_(path), options_(options) {
    Bytes header(magic.begin(), magic.end());
    header.push_back(version);
    header_len_ = header.size();

    auto existing = read_file(path).value_or(Bytes{});
    std::size_t valid_end = header_len_;
    if (existing.size() < header_len_) {
        // Missing, empty or torn during creation: start over.
        existing.clear();
    } else if (!std::equal(header.begin(), header.end(), existing.begin())) {
        throw CorruptStore("bad header in " + path.string());
    } else {
        std::size_t pos = header_len_;
        while (pos < existing.size()) {
            if (existing.size() - pos < 4) break;  // torn length field
            const std::uint32_t len = get_u32_le(existing.data() + pos);
            const std::size_t total = 4 + static_cast<std::size_t>(len) + 4;
            if (len > kMaxRecord || existing.size() - pos < total) {
                // Declares more bytes than exist: torn tail (or garbage we can't frame).
                if (len > kMaxRecord && existing.size() - pos >= 4 + kMaxRecord + 4)
                    throw CorruptStore("oversized record in " + path.string());
                break;
            }
            ByteView payload(existing.data() + pos + 4, len);
            const std::uint32_t stored = get_u32_le(existing.data() + pos + 4 + len);
            if (crc32(payload) != stored) {
                if (pos + total == existing.size()) break;  // last record torn mid-write
                throw CorruptStore("checksum mismatch in " + path.string());
            }
            replay(payload);
            ++records_;
            pos += total;
            valid_end = pos;
        }
    }

    fd_ = ::open(path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0600);
    if (fd_ < 0) throw_io("open", path);
    if (existing.empty()) {
        if (::ftruncate(fd_, 0) != 0) throw_io("truncate", path);
        write_all(fd_, header.data(), header.size(), path);
        valid_end = header_len_;
        if (options_.sync) {
            ::fsync(fd_);
            fsync_directory(path.parent_path());
        }
    } else if (valid_end < existing.size()) {
        truncated_ = existing.size() - valid_end;
        if (::ftruncate(fd_, static_cast<off_t>(valid_end)) != 0) throw_io("truncate", path);
        if (options_.sync) ::fsync(fd_);
    }
    if (::lseek(fd_, static_cast<off_t>(valid_end), SEEK_SET) < 0) throw_io("seek", path);
}

AppendLog::~AppendLog() { close(); }

AppendLog::AppendLog(AppendLog&& other) noexcept { *this = std::move(other); }

AppendLog& AppendLog::operator=(AppendLog&& other) noexcept {
    if (this != &other) {
        close();
        fd_ = std::exchange(other.fd_, -1);
        path_ = std::move(other.path_);
        options_ = other.options_;
        header_len_ = other.header_len_;
        records_ = other.records_;
        truncated_ = other.truncated_;
    }
    return *this;
}

void AppendLog::close() {
    if (fd_ >= 0) {
        ::close(fd_);
        fd_ = -1;
    }
}

void AppendLog::append(ByteView payload) {
    if (payload.size() > kMaxRecord) throw StorageError("record too large");
    Bytes rec;
    rec.reserve(payload.size() + 8);
    put_u32_le(rec, static_cast<std::uint32_t>(payload.size()));
    append_to(rec, payload);
    put_u32_le(rec, crc32(payload));
    write_with_faults(fd_, rec, path_, options_.faults, options_.fault_point);
    if (options_.sync && ::fdatasync(fd_) != 0) throw_io("fdatasync", path_);
    ++records_;
}

void AppendLog::reset() {
    if (::ftruncate(fd_, static_cast<off_t>(header_len_)) != 0) throw_io("truncate", path_);
    if (::lseek(fd_, static_cast<off_t>(header_len_), SEEK_SET) < 0) throw_io("seek", path_);
    if (options_.sync) ::fsync(fd_);
    records_ = 0;
}

void AppendLog::sync() {
    if (fd_ >= 0 && ::fsync(fd_) != 0) throw_io("fsync", path_);
}

}  // namespace punchcard
