#pragma once

#include <functional>

#include "punchcard/errors.hpp"
#include "punchcard/transport.hpp"

namespace punchcard::testing {

/// Delivers the request, then loses the response.
class DroppingTransport : public Transport {
public:
    explicit DroppingTransport(Transport& inner) : inner_(inner) {}
    wire::Frame roundtrip(const wire::Frame& request) override {
        inner_.roundtrip(request);
        ++delivered;
        throw TransportError("connection dropped before the response");
    }
    std::size_t delivered = 0;

private:
    Transport& inner_;
};

/// Applies `tamper` to every response body.
class TamperingTransport : public Transport {
public:
    TamperingTransport(Transport& inner, std::function<void(wire::Frame&)> tamper)
        : inner_(inner), tamper_(std::move(tamper)) {}
    wire::Frame roundtrip(const wire::Frame& request) override {
        auto reply = inner_.roundtrip(request);
        tamper_(reply);
        return reply;
    }

private:
    Transport& inner_;
    std::function<void(wire::Frame&)> tamper_;
};

/// Records every exchange, as an eavesdropper on the channel would.
class TappedTransport : public Transport {
public:
    explicit TappedTransport(Transport& inner) : inner_(inner) {}
    wire::Frame roundtrip(const wire::Frame& request) override {
        auto reply = inner_.roundtrip(request);
        transcript.emplace_back(request, reply);
        return reply;
    }
    std::vector<std::pair<wire::Frame, wire::Frame>> transcript;

private:
    Transport& inner_;
};

}  // namespace punchcard::testing
