#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <queue>
#include <string>
#include <unordered_set>
#include <vector>

#include "actsim/time.hpp"

namespace actsim {

/// One timing event flowing through the simulation: delivery instant, 8-bit
/// event code and an optional small payload. `source` names the module that
/// scheduled it and ends up in the event log.
struct TimedEvent {
    SimTime at;
    std::uint8_t code{0};
    std::optional<std::int64_t> payload;
    std::string source;
};

struct EventHandle {
    std::uint64_t id{0};
};

struct LogRecord {
    SimTime at;
    std::uint8_t code;
    std::optional<std::int64_t> payload;
    std::string source;
};

/// Deterministic discrete-event engine. Single logical clock, integer
/// picosecond time, delivery order total: (timestamp, insertion sequence).
/// One instance per simulation; instances share nothing.
class Engine {
public:
    using Action = std::function<void(const TimedEvent&)>;
    using Listener = std::function<void(const TimedEvent&)>;

    Engine() = default;
    Engine(const Engine&) = delete;
    Engine& operator=(const Engine&) = delete;
    ~Engine();

    SimTime now() const { return now_; }

    /// Schedules `ev` for delivery at ev.at. Throws SchedulingError if ev.at
    /// is before the current time. The returned handle can cancel the event
    /// until it is delivered.
    EventHandle schedule(TimedEvent ev, Action action = {});

    /// Returns true if the event was still pending.
    bool cancel(EventHandle h);

    /// Listener invoked for every delivered event (after its own action).
    void subscribe(Listener l) { listeners_.push_back(std::move(l)); }

    /// Delivers every pending event with at <= t in order, advances the clock
    /// to exactly t, and returns the number of events delivered. Handlers may
    /// schedule further events, including at the current instant.
    std::size_t run_until(SimTime t);

    const std::vector<LogRecord>& log() const { return log_; }

    /// Line-oriented event log: "ps<TAB>code-hex<TAB>payload<TAB>source",
    /// payload column "-" when absent.
    std::string format_log() const;

private:
    struct Pending {
        SimTime at;
        std::uint64_t seq;
        TimedEvent ev;
        Action action;
    };
    struct Later {
        bool operator()(const Pending* a, const Pending* b) const {
            if (a->at != b->at) return b->at < a->at;
            return b->seq < a->seq;
        }
    };

    SimTime now_{0};
    std::uint64_t next_seq_{0};
    std::priority_queue<Pending*, std::vector<Pending*>, Later> queue_;
    std::unordered_set<std::uint64_t> cancelled_;
    std::vector<Listener> listeners_;
    std::vector<LogRecord> log_;
};

}  // namespace actsim
