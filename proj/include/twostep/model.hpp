#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace twostep {

// basic identifiers
using ProcessId = int;       // 1-based, 1..Config::n
using Ballot = std::int64_t; // ballot 0 is the fast ballot, every ballot > 0 is slow
using Time = std::int64_t;   // integer ticks; Config::delta ticks per message-delay unit

// Proposal values come from a small totally ordered domain, plus a
// distinguished Bottom element that sorts below every proper value.
// Bottom is representable everywhere but is a legal initial value only in
// the object variant.
class Value {
public:
    constexpr Value() = default; // Bottom
    static constexpr Value bottom() { return Value{}; }
    static constexpr Value of(int payload) { return Value(payload); }

    constexpr bool is_bottom() const { return rep_ == kBottomRep; }
    constexpr int payload() const { return rep_; }

    auto operator<=>(const Value&) const = default;

private:
    static constexpr int kBottomRep = std::numeric_limits<int>::min();
    explicit constexpr Value(int rep) : rep_(rep) {}
    int rep_ = kBottomRep;
};

enum class Variant { task, object };

// Minimal process count for an e-two-step, f-resilient protocol.
// Throws std::invalid_argument unless 1 <= e <= f.
int required_n(int e, int f, Variant variant);

// Owner of slow ballot b in a system of n processes: the process i with
// i == b (mod n).
ProcessId ballot_owner(Ballot b, int n);

struct Config {
    int n = 3;
    int e = 1;
    int f = 1;
    Variant variant = Variant::task;
    Time delta = 10; // message-delay unit, in ticks
    Time gst = 0;    // global stabilization time, in ticks
    std::vector<Value> value_domain = {Value::of(0), Value::of(1), Value::of(2)};

    // Throws std::invalid_argument on inconsistent parameters. The n-vs-bound
    // check is skipped when allow_below_bound is set (below-bound experiments).
    void validate(bool allow_below_bound = false) const;

    bool operator==(const Config&) const = default;
};

// The six protocol message kinds.

struct ProposeMsg {
    Value value;
    ProcessId proposer = 0;
    bool operator==(const ProposeMsg&) const = default;
};

struct OneA {
    Ballot ballot = 0;
    bool operator==(const OneA&) const = default;
};

struct OneB {
    Ballot ballot = 0;
    Ballot vbal = 0;                        // last ballot voted in; 0 and val empty if never voted
    std::optional<Value> val;               // empty iff the sender has never voted
    std::optional<ProcessId> val_proposer;  // empty iff val is empty
    std::optional<Value> decided;
    Value initial;                          // sender's initial value (Bottom if none yet)
    bool operator==(const OneB&) const = default;
};

struct TwoA {
    Ballot ballot = 0; // always > 0; ballot-0 voting travels in Propose/2B
    Value value;
    bool operator==(const TwoA&) const = default;
};

struct TwoB {
    Ballot ballot = 0;
    Value value;
    bool operator==(const TwoB&) const = default;
};

struct DecideMsg {
    Value value;
    bool operator==(const DecideMsg&) const = default;
};

using Message = std::variant<ProposeMsg, OneA, OneB, TwoA, TwoB, DecideMsg>;

// Effects returned by protocol handlers. The state machine never performs
// I/O itself; the simulator interprets these.

struct Send {
    ProcessId to = 0;
    Message msg;
    bool operator==(const Send&) const = default;
};

struct Broadcast { // delivered to every process except the sender
    Message msg;
    bool operator==(const Broadcast&) const = default;
};

struct Decided {
    Value value;
    bool operator==(const Decided&) const = default;
};

struct SetTimer {
    Time duration = 0;
    bool operator==(const SetTimer&) const = default;
};

struct StopTimer {
    bool operator==(const StopTimer&) const = default;
};

using Effect = std::variant<Send, Broadcast, Decided, SetTimer, StopTimer>;

// Canonical textual encodings, stable across runs (used in trace files).
std::string to_string(Value v);
std::string to_string(const Message& m);
std::string to_string(const Effect& e);
std::string to_string(Variant v);

Variant variant_from_string(const std::string& s);
Value value_from_string(const std::string& s);

} // namespace twostep
