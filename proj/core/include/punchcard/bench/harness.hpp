#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "punchcard/transport.hpp"

namespace punchcard::bench {

inline constexpr std::size_t kMinTrials = 100;

struct BenchOptions {
    std::size_t trials = kMinTrials;
    /// Spent secrets pre-loaded into the database before ServerVerify is timed.
    std::size_t db_size = 0;
    std::uint16_t n = 10;
    std::uint64_t seed = 0;  // 0: system randomness
};

struct Stats {
    double mean = 0;
    double stddev = 0;
    std::size_t count = 0;
};
Stats summarize(const std::vector<double>& samples);

struct BenchRow {
    std::string operation;
    Stats ms;
    /// Protocol bytes this operation sends, measured from an encoded frame.
    std::size_t bytes = 0;
};

struct BenchTable {
    std::string scheme;
    std::string group;
    std::size_t trials = 0;
    std::size_t db_size = 0;
    std::vector<BenchRow> rows;

    const BenchRow& row(std::string_view operation) const;
    std::string to_text() const;
    std::string to_csv(bool header = true) const;
};

/// Throws std::invalid_argument when trials < kMinTrials.
BenchTable bench_main(const BenchOptions& options);
BenchTable bench_mergeable(const BenchOptions& options);

struct ScalingRow {
    std::size_t db_size = 0;
    Stats us;
};

/// Times main-scheme server_verify against databases of each size. Trials
/// are interleaved across sizes so drift hits every size alike.
std::vector<ScalingRow> bench_verify_scaling(const std::vector<std::size_t>& sizes, std::size_t trials,
                                             std::uint16_t n = 10, std::uint64_t seed = 0);
std::string scaling_to_text(const std::vector<ScalingRow>& rows);
std::string scaling_to_csv(const std::vector<ScalingRow>& rows);

struct ParallelResult {
    unsigned threads = 0;
    std::size_t cycles = 0;
    std::size_t accepted = 0;
    std::size_t contended_attempts = 0;
    std::size_t contended_accepts = 0;
    double seconds = 0;

    std::string to_text() const;
};

/// Full punch/redeem cycles from many threads against one service, then every
/// thread redeems the same request at once; exactly one may be accepted.
ParallelResult bench_parallel(unsigned threads, std::size_t cycles_per_thread, std::uint16_t n = 10);

/// Forwards to another transport and remembers the last exchange.
class RecordingTransport : public Transport {
public:
    explicit RecordingTransport(Transport& inner) : inner_(inner) {}
    wire::Frame roundtrip(const wire::Frame& request) override {
        last_request = request;
        last_response = inner_.roundtrip(request);
        return last_response;
    }
    wire::Frame last_request;
    wire::Frame last_response;

private:
    Transport& inner_;
};

}  // namespace punchcard::bench
