#pragma once

#include <atomic>
#include <cstdint>

namespace poh {

// Microseconds since the UNIX epoch.
using Micros = std::uint64_t;
// Seconds since the UNIX epoch (token / attestation granularity).
using Seconds = std::uint64_t;

constexpr Micros kMicrosPerSecond = 1'000'000;

inline Seconds to_seconds(Micros t) { return t / kMicrosPerSecond; }

class Clock {
public:
    virtual ~Clock() = default;
    virtual Micros now() const = 0;
};

// Harness-advanced clock; simulations never read the wall clock.
class VirtualClock : public Clock {
public:
    explicit VirtualClock(Micros start = 0) : now_(start) {}

    Micros now() const override { return now_.load(std::memory_order_relaxed); }
    void advance(Micros delta) { now_.fetch_add(delta, std::memory_order_relaxed); }
    void set(Micros t) { now_.store(t, std::memory_order_relaxed); }

private:
    std::atomic<Micros> now_;
};

class WallClock : public Clock {
public:
    Micros now() const override;
};

}  // namespace poh
