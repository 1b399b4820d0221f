#pragma once

#include "twostep/model.hpp"
#include "twostep/omega.hpp"
#include "twostep/protocol.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace twostep {

enum class ScheduleKind {
    synchronous, // round-lockstep delivery, crashes only at time 0, GST = 0
    random_walk, // seeded random delays: up to 10*delta before GST, up to delta after
    spliced      // group-local synchronous rounds, then crashes, then seeded random
};

std::string to_string(ScheduleKind k);
std::string to_string(OmegaMode m);

struct ProposeCall {
    Time t = 0;
    ProcessId pid = 0;
    Value value;
    bool operator==(const ProposeCall&) const = default;
};

// A complete, deterministic description of one run: configuration, fault
// plan, proposals, delivery discipline and seed. Equal scenarios produce
// bit-identical traces.
struct Scenario {
    Config cfg;
    ScheduleKind kind = ScheduleKind::synchronous;
    std::uint64_t seed = 0;

    std::map<ProcessId, Value> task_proposals; // task variant; crashed-at-0 processes may be absent
    std::vector<ProposeCall> object_calls;     // object variant

    std::vector<std::pair<Time, ProcessId>> crash_plan;

    // Same-instant deliveries are ordered by this sender priority list first
    // (missing senders follow in id order), then by send sequence.
    std::vector<ProcessId> delivery_priority;

    Time horizon = 0; // 0 = pick a default from gst and delta

    OmegaMode omega = OmegaMode::oracle;
    Time omega_timeout = 0;                  // heartbeat suspicion timeout; 0 = 2*delta
    std::optional<ProcessId> pregst_leader;  // oracle mode, before GST

    Mutation mutation = Mutation::none;
    bool allow_below_bound = false;

    // spliced kind only
    std::vector<std::vector<ProcessId>> splice_groups;
    std::vector<int> splice_rounds;
    std::uint64_t continuation_seed = 0;

    void validate() const; // throws std::invalid_argument
    Time effective_horizon() const;
    std::set<ProcessId> crashed_at_start() const;
    std::set<ProcessId> eventual_crashes() const;

    bool operator==(const Scenario&) const = default;
};

// Canonical one-line encoding (also the trace-header payload) and the
// key=value scenario-file format; see README for the grammar.
std::string to_line(const Scenario& s);
Scenario scenario_from_line(const std::string& line);
Scenario scenario_from_file(const std::string& path);

// The E-faulty synchronous scenario in which the favored process's proposal
// is ordered first in every delivery batch. Proposals are left for the
// caller to fill in.
Scenario make_sync_schedule(const Config& cfg, const std::set<ProcessId>& faulty,
                            ProcessId favored);

// Adversarial splice: each group runs the given number of lockstep rounds
// seeing only intra-group traffic plus messages from the to-be-crashed set,
// then crash_set crashes and the run continues under a seeded random
// schedule. GST is the end of the splice phase.
Scenario make_splice_schedule(const Config& cfg,
                              const std::vector<std::vector<ProcessId>>& groups,
                              const std::vector<int>& rounds,
                              const std::set<ProcessId>& crash_set,
                              std::uint64_t continuation_seed);

} // namespace twostep
