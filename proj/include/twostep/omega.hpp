#pragma once

#include "twostep/model.hpp"

#include <map>
#include <optional>
#include <set>
#include <vector>

namespace twostep {

enum class OmegaMode { oracle, heartbeat };

// Leader election service. Two interchangeable implementations share the
// contract that all correct processes eventually and permanently agree on
// the same correct leader:
//
//  - oracle: consults the scenario's crash plan directly. From GST on it
//    returns the lowest-id process that never crashes; before GST it returns
//    a scenario-controlled estimate (default: the same survivor).
//  - heartbeat: every process broadcasts a liveness beacon each delta and
//    suspects any process unheard for more than 2*delta + timeout. The
//    estimate is the lowest unsuspected id. Before GST beacons travel under
//    the scenario's arbitrary delays, so transient wrong estimates are
//    expected; after GST estimates converge.
//
// The view only tracks estimates; beacon fan-out and delivery delays belong
// to the simulator, which calls on_tick/on_beacon/on_crash as events occur.
class OmegaView {
public:
    OmegaView(const Config& cfg, OmegaMode mode,
              const std::set<ProcessId>& eventual_crashes, Time suspicion_timeout = 0,
              std::optional<ProcessId> pregst_leader = std::nullopt);

    OmegaMode mode() const { return mode_; }

    // Current estimate at pid. Throws std::invalid_argument if pid is known
    // to have crashed already.
    ProcessId leader(ProcessId pid, Time now) const;

    // Heartbeat-mode bookkeeping. on_tick marks pid's own beacon round and
    // refreshes its suspicions; on_beacon records a delivered beacon. Both
    // return pid's (receiver's) new estimate.
    ProcessId on_tick(ProcessId pid, Time now);
    ProcessId on_beacon(ProcessId from, ProcessId to, Time now);

    void on_crash(ProcessId pid, Time now);

    Time suspicion_timeout() const { return timeout_; }

private:
    ProcessId heartbeat_estimate(ProcessId pid, Time now) const;
    ProcessId oracle_estimate(Time now) const;

    Config cfg_;
    OmegaMode mode_;
    Time timeout_;
    std::optional<ProcessId> pregst_leader_;
    std::set<ProcessId> eventual_crashes_;
    std::set<ProcessId> crashed_;
    // heartbeat state: last_heard_[p][q] = latest beacon delivery time from q
    // at p; processes start with a t=0 baseline for everyone.
    std::vector<std::vector<Time>> last_heard_;
};

} // namespace twostep
