#pragma once

#include <chrono>
#include <thread>

namespace vlmpipe {

/// Run clock abstraction. The scheduler, the registry, and the simulator all
/// take a Clock& parameter instead of reading an ambient time source, so the
/// same code path runs against wall time or simulated time.
class Clock {
public:
    virtual ~Clock() = default;

    /// Seconds elapsed on this run clock (starts at 0).
    virtual double now_s() const = 0;

    /// Advance the clock by `seconds`: a wall clock sleeps, a virtual clock jumps.
    virtual void advance_s(double seconds) = 0;

    virtual bool is_virtual() const = 0;
};

/// Wall-clock time relative to construction, monotonic.
class MonotonicClock final : public Clock {
public:
    MonotonicClock() : origin_(std::chrono::steady_clock::now()) {}

    double now_s() const override {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - origin_).count();
    }

    void advance_s(double seconds) override {
        if (seconds > 0.0) {
            std::this_thread::sleep_for(std::chrono::duration<double>(seconds));
        }
    }

    bool is_virtual() const override { return false; }

private:
    std::chrono::steady_clock::time_point origin_;
};

/// Simulated time. Only moves when told to; jump_to_s lets an event loop set
/// absolute event times so no drift accumulates.
class VirtualClock final : public Clock {
public:
    double now_s() const override { return t_; }

    void advance_s(double seconds) override { t_ += seconds; }

    void jump_to_s(double t) {
        if (t > t_) t_ = t;
    }

    bool is_virtual() const override { return true; }

private:
    double t_ = 0.0;
};

} // namespace vlmpipe
