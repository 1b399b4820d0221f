#include "twostep/omega.hpp"

#include <stdexcept>

namespace twostep {

OmegaView::OmegaView(const Config& cfg, OmegaMode mode,
                     const std::set<ProcessId>& eventual_crashes, Time suspicion_timeout,
                     std::optional<ProcessId> pregst_leader)
    : cfg_(cfg),
      mode_(mode),
      timeout_(suspicion_timeout > 0 ? suspicion_timeout : 2 * cfg.delta),
      pregst_leader_(pregst_leader),
      eventual_crashes_(eventual_crashes) {
    last_heard_.assign(cfg.n + 1, std::vector<Time>(cfg.n + 1, 0));
}

ProcessId OmegaView::oracle_estimate(Time now) const {
    if (now < cfg_.gst && pregst_leader_)
        return *pregst_leader_;
    for (ProcessId p = 1; p <= cfg_.n; ++p)
        if (!eventual_crashes_.count(p))
            return p;
    return 1; // everyone crashes; the estimate is meaningless but defined
}

ProcessId OmegaView::heartbeat_estimate(ProcessId pid, Time now) const {
    for (ProcessId q = 1; q <= cfg_.n; ++q) {
        if (q == pid)
            return q;
        if (now - last_heard_[pid][q] <= 2 * cfg_.delta + timeout_)
            return q;
    }
    return pid;
}

ProcessId OmegaView::leader(ProcessId pid, Time now) const {
    if (pid < 1 || pid > cfg_.n)
        throw std::invalid_argument("omega: process id out of range");
    if (crashed_.count(pid))
        throw std::invalid_argument("omega: queried a crashed process");
    if (mode_ == OmegaMode::oracle)
        return oracle_estimate(now);
    return heartbeat_estimate(pid, now);
}

ProcessId OmegaView::on_tick(ProcessId pid, Time now) {
    last_heard_[pid][pid] = now;
    return heartbeat_estimate(pid, now);
}

ProcessId OmegaView::on_beacon(ProcessId from, ProcessId to, Time now) {
    if (last_heard_[to][from] < now)
        last_heard_[to][from] = now;
    return heartbeat_estimate(to, now);
}

void OmegaView::on_crash(ProcessId pid, Time) {
    crashed_.insert(pid);
}

} // namespace twostep
