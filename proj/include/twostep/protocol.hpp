#pragma once

#include "twostep/model.hpp"

#include <map>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

namespace twostep {

// Fault-injection switches for the checker's mutation-sensitivity runs.
// DropFastOwnSupportGuard removes the "own vote still intact" condition from
// the fast-path decision, which makes two conflicting fast decisions
// reachable at n=3, e=f=1.
enum class Mutation { none, drop_fast_own_support_guard };

// Thrown by handlers on conditions that indicate a broken run (e.g. two
// different decided values reaching the same process). The simulator records
// these as fault events instead of crashing.
struct ProtocolFault : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Per-ballot state of the slow-path recovery at the coordinator.
enum class RecoveryState {
    collecting, // fewer than n-f replies so far
    abstained,  // quorum reached but nothing proposable yet (object variant)
    closed      // 2A sent; later replies are discarded
};

struct ProcessState {
    ProcessId pid = 0;
    Ballot bal = 0;
    Ballot vbal = 0;
    std::optional<Value> val;
    std::optional<ProcessId> val_proposer;
    Value initial_val;                      // Bottom until propose() in the object variant
    std::optional<Value> decided;
    bool voted_ballot0 = false;             // explicit ballot-0 vote spent (single-shot)
    bool proposed = false;                  // object: propose() already invoked
    bool started = false;

    // vote-collection bookkeeping
    std::map<Value, std::set<ProcessId>> fast_votes;                    // 2B(0,v) senders
    std::map<std::pair<Ballot, Value>, std::set<ProcessId>> slow_votes; // 2B(b,v) senders, b > 0
    std::map<Ballot, std::vector<std::pair<ProcessId, OneB>>> oneb_replies;
    std::map<Ballot, RecoveryState> recovery;
    std::optional<Value> pending_2a;

    bool operator==(const ProcessState&) const = default;
};

// Chooses the coordinator's proposal from the 1B replies of a quorum, in
// priority order: an already-decided value; the value voted at the highest
// slow ballot; a ballot-0 candidate whose recorded proposer is outside the
// quorum, by vote count (strict majority-of-threshold first, then exact
// threshold resolved toward the greatest value); the coordinator's own
// initial value; and finally the greatest value reported anywhere in the
// replies. Returns nullopt only when the replies carry no value at all
// (object variant with nothing proposed).
//
// The quorum must contain at least n-f distinct senders matching the replies
// one-to-one; throws std::invalid_argument otherwise.
std::optional<Value> compute_proposal(const std::vector<std::pair<ProcessId, OneB>>& replies,
                                      const std::set<ProcessId>& quorum, const Config& cfg,
                                      Value own_initial);

// One consensus instance at one process. Handlers are invoked sequentially,
// mutate the state, and return the effects to perform; they never block and
// never perform I/O. Distinct Process instances are independent.
class Process {
public:
    Process(const Config& cfg, ProcessId pid, Mutation mutation = Mutation::none);

    // Task variant: records the initial proposal (with the implicit
    // self-vote) and broadcasts it. Object variant: initial must be empty;
    // the process starts idle. Both arm the 2-delta timer.
    std::vector<Effect> start(std::optional<Value> initial);

    // Object variant only; at most once per process.
    std::vector<Effect> propose(Value v);

    std::vector<Effect> on_propose(ProcessId from, Value v);
    std::vector<Effect> on_one_a(ProcessId from, Ballot b);
    std::vector<Effect> on_one_b(ProcessId from, const OneB& payload);
    std::vector<Effect> on_two_a(ProcessId from, Ballot b, Value v);
    std::vector<Effect> on_two_b(ProcessId from, Ballot b, Value v);
    std::vector<Effect> on_decide(Value v);

    // Timer expiry: always re-arms with 5-delta; initiates the next owned
    // ballot when this process is the current leader and undecided.
    std::vector<Effect> on_timer(ProcessId leader);

    // Dispatch by message kind.
    std::vector<Effect> on_message(ProcessId from, const Message& m);

    const ProcessState& state() const { return st_; }
    const Config& config() const { return cfg_; }

private:
    std::vector<Effect> decide_effects(Value v);
    void apply_one_a(ProcessId from, Ballot b, std::vector<Effect>& out);
    void apply_two_a(ProcessId from, Ballot b, Value v, std::vector<Effect>& out);
    void try_recover(Ballot b, std::vector<Effect>& out);

    Config cfg_;
    Mutation mutation_;
    ProcessState st_;
};

} // namespace twostep
