#pragma once

#include "twostep/scenario.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace twostep {

enum class EventKind { crashed, sent, delivered, timer_fired, decision, omega_changed, fault };

struct TraceEvent {
    Time t = 0;
    EventKind kind = EventKind::sent;
    ProcessId from = 0;   // sender, or the subject process
    ProcessId to = 0;     // receiver (sent/delivered), or the leader (omega_changed)
    std::optional<Message> msg;
    std::optional<Value> value; // decision
    std::string note;           // fault description

    std::string to_string() const;
    bool operator==(const TraceEvent&) const = default;
};

// Timestamped event log of one run. Replayable: the header carries the full
// scenario, and re-running it reproduces the event list bit-for-bit.
struct Trace {
    Scenario scenario;
    std::vector<TraceEvent> events;
    std::int64_t undelivered_at_horizon = 0; // deliveries to live processes past the horizon

    std::string to_text() const;

    std::map<ProcessId, std::pair<Time, Value>> first_decisions() const;
    std::map<ProcessId, Time> crash_times() const;
    std::set<ProcessId> correct_processes() const; // never crashed in this run
    Time max_decision_time() const;                // -1 when no decisions
    int fault_count() const;
};

// Executes the scenario's event loop to the horizon and returns the trace.
Trace run(const Scenario& scenario);

// Asserts the structural trace invariants (delivery causality, crash
// permanence, the post-GST delay bound, lockstep rounds for synchronous
// runs, write-once decisions). Throws std::runtime_error with a description
// of the first violation.
void validate_trace(const Trace& trace);

struct ReplayResult {
    bool ok = false;
    std::string message;    // first divergence or parse error
    std::size_t line = 0;   // 1-based line of the divergence
};

ReplayResult replay_text(const std::string& text);
ReplayResult replay_file(const std::string& path);

} // namespace twostep
