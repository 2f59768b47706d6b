#pragma once

#include <optional>
#include <string>
#include <vector>

#include "punchcard/storage.hpp"

namespace punchcard::testing {

/// Records every durable write and checkpoint; once armed, crashes at exactly
/// one of them.
class ScriptedFaults : public FaultInjector {
public:
    struct Write {
        std::string point;
        std::size_t len;
    };
    struct Plan {
        // Crash during the write with this index (counted from arming), after `bytes` bytes...
        std::optional<std::size_t> write_index;
        std::size_t bytes = 0;
        // ...or at the first checkpoint with this name.
        std::string checkpoint;

        std::string describe() const {
            if (write_index) return "write #" + std::to_string(*write_index) + " after " + std::to_string(bytes) + " bytes";
            return "checkpoint " + checkpoint;
        }
    };

    void arm(Plan plan) {
        plan_ = std::move(plan);
        armed_ = true;
        writes.clear();
        checkpoints.clear();
    }
    void record_only() {
        armed_ = false;
        writes.clear();
        checkpoints.clear();
    }

    std::optional<std::size_t> crash_after_bytes(std::string_view point, std::size_t len) override {
        writes.push_back({std::string(point), len});
        if (armed_ && plan_.write_index && writes.size() - 1 == *plan_.write_index) {
            armed_ = false;
            fired = true;
            return std::min(plan_.bytes, len);
        }
        return std::nullopt;
    }

    void checkpoint(std::string_view point) override {
        checkpoints.emplace_back(point);
        if (armed_ && !plan_.write_index && plan_.checkpoint == point) {
            armed_ = false;
            fired = true;
            throw SimulatedCrash();
        }
    }

    std::vector<Write> writes;
    std::vector<std::string> checkpoints;
    bool fired = false;

private:
    bool armed_ = false;
    Plan plan_;
};

}  // namespace punchcard::testing
