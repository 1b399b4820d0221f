#include "twostep/simnet.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <queue>
#include <random>
#include <sstream>
#include <stdexcept>

namespace twostep {

namespace {

constexpr const char* kTraceHeader = "# twostep trace v1";

const char* kind_name(EventKind k) {
    switch (k) {
    case EventKind::crashed: return "crashed";
    case EventKind::sent: return "sent";
    case EventKind::delivered: return "delivered";
    case EventKind::timer_fired: return "timer";
    case EventKind::decision: return "decision";
    case EventKind::omega_changed: return "omega";
    case EventKind::fault: return "fault";
    }
    return "?";
}

} // namespace

std::string TraceEvent::to_string() const {
    std::ostringstream os;
    os << t << ' ' << kind_name(kind);
    switch (kind) {
    case EventKind::crashed:
        os << " p" << from;
        break;
    case EventKind::sent:
    case EventKind::delivered:
        os << " p" << from << " p" << to << ' ' << twostep::to_string(*msg);
        break;
    case EventKind::timer_fired:
        os << " p" << from;
        break;
    case EventKind::decision:
        os << " p" << from << ' ' << twostep::to_string(*value);
        break;
    case EventKind::omega_changed:
        os << " p" << from << " p" << to;
        break;
    case EventKind::fault:
        os << " p" << from << ' ' << note;
        break;
    }
    return os.str();
}

std::string Trace::to_text() const {
    std::ostringstream os;
    os << kTraceHeader << '\n';
    os << "# scenario " << to_line(scenario) << '\n';
    os << "# undelivered " << undelivered_at_horizon << '\n';
    for (const auto& e : events)
        os << e.to_string() << '\n';
    return os.str();
}

std::map<ProcessId, std::pair<Time, Value>> Trace::first_decisions() const {
    std::map<ProcessId, std::pair<Time, Value>> out;
    for (const auto& e : events)
        if (e.kind == EventKind::decision && !out.count(e.from))
            out[e.from] = {e.t, *e.value};
    return out;
}

std::map<ProcessId, Time> Trace::crash_times() const {
    std::map<ProcessId, Time> out;
    for (const auto& e : events)
        if (e.kind == EventKind::crashed && !out.count(e.from))
            out[e.from] = e.t;
    return out;
}

std::set<ProcessId> Trace::correct_processes() const {
    std::set<ProcessId> out;
    const auto crashed = crash_times();
    for (ProcessId p = 1; p <= scenario.cfg.n; ++p)
        if (!crashed.count(p))
            out.insert(p);
    return out;
}

Time Trace::max_decision_time() const {
    Time mx = -1;
    for (const auto& e : events)
        if (e.kind == EventKind::decision)
            mx = std::max(mx, e.t);
    return mx;
}

int Trace::fault_count() const {
    int c = 0;
    for (const auto& e : events)
        c += e.kind == EventKind::fault;
    return c;
}

namespace {

// Simulator queue entries. Phases order same-instant work: crashes happen
// first, then propose() calls, protocol deliveries, omega bookkeeping, and
// timer expirations last.
enum SimPhase : int {
    phase_crash = 0,
    phase_propose = 1,
    phase_delivery = 2,
    phase_omega = 3,
    phase_timer = 4,
};

struct SimEvent {
    Time t = 0;
    int phase = 0;
    int order = 0; // delivery priority rank of the sender
    std::uint64_t seq = 0;

    ProcessId a = 0; // subject / sender
    ProcessId b = 0; // receiver
    Message msg;
    Value value;
    std::uint64_t timer_gen = 0;
    bool is_beacon = false;
    bool is_tick = false;
};

struct SimEventAfter {
    bool operator()(const SimEvent& x, const SimEvent& y) const {
        if (x.t != y.t)
            return x.t > y.t;
        if (x.phase != y.phase)
            return x.phase > y.phase;
        if (x.order != y.order)
            return x.order > y.order;
        return x.seq > y.seq;
    }
};

class Simulator {
public:
    explicit Simulator(const Scenario& scenario)
        : sc_(scenario),
          cfg_(scenario.cfg),
          horizon_(scenario.effective_horizon()),
          net_rng_(scenario.seed * 0x9e3779b97f4a7c15ULL + 0x517cc1b727220a95ULL),
          beacon_rng_(scenario.seed * 0xbf58476d1ce4e5b9ULL + 0x94d049bb133111ebULL),
          cont_rng_(scenario.continuation_seed * 0x9e3779b97f4a7c15ULL + 0xd1b54a32d192ed03ULL),
          omega_(scenario.cfg, scenario.omega, scenario.eventual_crashes(),
                 scenario.omega_timeout, scenario.pregst_leader) {
        sc_.validate();
        trace_.scenario = sc_;
        crashed_.assign(cfg_.n + 1, false);
        timer_gen_.assign(cfg_.n + 1, 0);
        logged_leader_.assign(cfg_.n + 1, 0);
        if (sc_.kind == ScheduleKind::spliced) {
            group_of_.assign(cfg_.n + 1, 0);
            group_end_.assign(sc_.splice_groups.size(), 0);
            Time phase_end = 0;
            for (std::size_t g = 0; g < sc_.splice_groups.size(); ++g) {
                group_end_[g] = static_cast<Time>(sc_.splice_rounds[g]) * cfg_.delta;
                phase_end = std::max(phase_end, group_end_[g]);
                for (ProcessId p : sc_.splice_groups[g])
                    group_of_[p] = static_cast<int>(g);
            }
            splice_end_ = phase_end;
            splice_crashers_ = sc_.eventual_crashes();
        }
    }

    Trace take() && { return std::move(trace_); }

    void run() {
        setup();
        while (!queue_.empty()) {
            SimEvent ev = queue_.top();
            if (ev.t > horizon_)
                break;
            queue_.pop();
            dispatch(ev);
        }
        // Count protocol messages still in flight toward live processes.
        while (!queue_.empty()) {
            SimEvent ev = queue_.top();
            queue_.pop();
            if (ev.phase == phase_delivery && !ev.is_beacon && !crashed_[ev.b])
                ++trace_.undelivered_at_horizon;
        }
    }

private:
    void log(TraceEvent e) { trace_.events.push_back(std::move(e)); }

    void enqueue(SimEvent ev) {
        ev.seq = next_seq_++;
        queue_.push(std::move(ev));
    }

    int sender_rank(ProcessId p) const {
        for (std::size_t i = 0; i < sc_.delivery_priority.size(); ++i)
            if (sc_.delivery_priority[i] == p)
                return static_cast<int>(i);
        return static_cast<int>(sc_.delivery_priority.size()) + p;
    }

    Time round_up(Time t) const { return (t / cfg_.delta + 1) * cfg_.delta; }

    Time draw(std::mt19937_64& rng, Time lo, Time hi) {
        return lo + static_cast<Time>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
    }

    Time delivery_time(Time now, ProcessId from, ProcessId to, bool beacon) {
        auto& rng = beacon ? beacon_rng_ : net_rng_;
        switch (sc_.kind) {
        case ScheduleKind::synchronous:
            return round_up(now);
        case ScheduleKind::random_walk:
            if (now >= cfg_.gst)
                return now + draw(rng, 1, cfg_.delta);
            return now + draw(rng, 1, 10 * cfg_.delta);
        case ScheduleKind::spliced:
            if (now < splice_end_) {
                const bool visible =
                    group_of_[from] == group_of_[to] || splice_crashers_.count(from);
                const Time sync_t = round_up(now);
                if (visible && sync_t <= group_end_[group_of_[to]])
                    return sync_t;
                return splice_end_ + draw(beacon ? beacon_rng_ : cont_rng_, 1, cfg_.delta);
            }
            return now + draw(beacon ? beacon_rng_ : cont_rng_, 1, cfg_.delta);
        }
        return round_up(now);
    }

    void note_omega(ProcessId p, Time now, ProcessId estimate) {
        if (estimate != 0 && logged_leader_[p] != estimate) {
            logged_leader_[p] = estimate;
            log({now, EventKind::omega_changed, p, estimate, {}, {}, {}});
        }
    }

    void process_effects(ProcessId p, Time now, const std::vector<Effect>& effects) {
        for (const auto& eff : effects) {
            std::visit(
                [&](const auto& e) {
                    using T = std::decay_t<decltype(e)>;
                    if constexpr (std::is_same_v<T, Send>) {
                        send_message(p, e.to, now, e.msg);
                    } else if constexpr (std::is_same_v<T, Broadcast>) {
                        for (ProcessId to = 1; to <= cfg_.n; ++to)
                            if (to != p)
                                send_message(p, to, now, e.msg);
                    } else if constexpr (std::is_same_v<T, Decided>) {
                        log({now, EventKind::decision, p, 0, {}, e.value, {}});
                    } else if constexpr (std::is_same_v<T, SetTimer>) {
                        ++timer_gen_[p];
                        SimEvent ev;
                        ev.t = now + e.duration;
                        ev.phase = phase_timer;
                        ev.a = p;
                        ev.timer_gen = timer_gen_[p];
                        enqueue(ev);
                    } else {
                        ++timer_gen_[p]; // StopTimer invalidates the pending expiry
                    }
                },
                eff);
        }
    }

    void send_message(ProcessId from, ProcessId to, Time now, const Message& msg) {
        log({now, EventKind::sent, from, to, msg, {}, {}});
        if (crashed_[to])
            return;
        if (to == from) {
            // Self-addressed sends are local computation: instantaneous.
            log({now, EventKind::delivered, from, to, msg, {}, {}});
            handle_message(from, to, now, msg);
            return;
        }
        SimEvent ev;
        ev.t = delivery_time(now, from, to, false);
        ev.phase = phase_delivery;
        ev.order = sender_rank(from);
        ev.a = from;
        ev.b = to;
        ev.msg = msg;
        enqueue(ev);
    }

    void handle_message(ProcessId from, ProcessId to, Time now, const Message& msg) {
        try {
            auto effects = procs_[to - 1].on_message(from, msg);
            process_effects(to, now, effects);
        } catch (const ProtocolFault& fault) {
            log({now, EventKind::fault, to, 0, {}, {}, fault.what()});
        }
    }

    void setup() {
        for (ProcessId p = 1; p <= cfg_.n; ++p)
            procs_.emplace_back(cfg_, p, sc_.mutation);

        std::vector<std::pair<Time, ProcessId>> plan = sc_.crash_plan;
        std::sort(plan.begin(), plan.end());
        for (const auto& [t, p] : plan) {
            if (t == 0) {
                crashed_[p] = true;
                omega_.on_crash(p, 0);
                log({0, EventKind::crashed, p, 0, {}, {}, {}});
            } else {
                SimEvent ev;
                ev.t = t;
                ev.phase = phase_crash;
                ev.a = p;
                enqueue(ev);
            }
        }

        for (ProcessId p = 1; p <= cfg_.n; ++p) {
            if (crashed_[p])
                continue;
            std::optional<Value> initial;
            if (cfg_.variant == Variant::task)
                initial = sc_.task_proposals.at(p);
            process_effects(p, 0, procs_[p - 1].start(initial));
        }

        for (const auto& call : sc_.object_calls) {
            SimEvent ev;
            ev.t = call.t;
            ev.phase = phase_propose;
            ev.a = call.pid;
            ev.value = call.value;
            enqueue(ev);
        }

        if (sc_.omega == OmegaMode::heartbeat) {
            for (ProcessId p = 1; p <= cfg_.n; ++p) {
                if (crashed_[p])
                    continue;
                SimEvent ev;
                ev.t = 0;
                ev.phase = phase_omega;
                ev.a = p;
                ev.is_tick = true;
                enqueue(ev);
            }
        }
    }

    void dispatch(const SimEvent& ev) {
        switch (ev.phase) {
        case phase_crash:
            if (!crashed_[ev.a]) {
                crashed_[ev.a] = true;
                omega_.on_crash(ev.a, ev.t);
                log({ev.t, EventKind::crashed, ev.a, 0, {}, {}, {}});
            }
            return;
        case phase_propose: {
            if (crashed_[ev.a])
                return;
            try {
                process_effects(ev.a, ev.t, procs_[ev.a - 1].propose(ev.value));
            } catch (const ProtocolFault& fault) {
                log({ev.t, EventKind::fault, ev.a, 0, {}, {}, fault.what()});
            }
            return;
        }
        case phase_delivery:
            if (crashed_[ev.b])
                return;
            log({ev.t, EventKind::delivered, ev.a, ev.b, ev.msg, {}, {}});
            handle_message(ev.a, ev.b, ev.t, ev.msg);
            return;
        case phase_omega: {
            if (ev.is_tick) {
                if (crashed_[ev.a])
                    return;
                note_omega(ev.a, ev.t, omega_.on_tick(ev.a, ev.t));
                for (ProcessId to = 1; to <= cfg_.n; ++to) {
                    if (to == ev.a || crashed_[to])
                        continue;
                    SimEvent b;
                    b.t = delivery_time(ev.t, ev.a, to, true);
                    b.phase = phase_omega;
                    b.a = ev.a;
                    b.b = to;
                    b.is_beacon = true;
                    enqueue(b);
                }
                SimEvent next;
                next.t = ev.t + cfg_.delta;
                next.phase = phase_omega;
                next.a = ev.a;
                next.is_tick = true;
                enqueue(next);
            } else {
                if (crashed_[ev.b])
                    return;
                note_omega(ev.b, ev.t, omega_.on_beacon(ev.a, ev.b, ev.t));
            }
            return;
        }
        case phase_timer: {
            if (crashed_[ev.a] || ev.timer_gen != timer_gen_[ev.a])
                return;
            log({ev.t, EventKind::timer_fired, ev.a, 0, {}, {}, {}});
            const ProcessId leader = omega_.leader(ev.a, ev.t);
            note_omega(ev.a, ev.t, leader);
            try {
                process_effects(ev.a, ev.t, procs_[ev.a - 1].on_timer(leader));
            } catch (const ProtocolFault& fault) {
                log({ev.t, EventKind::fault, ev.a, 0, {}, {}, fault.what()});
            }
            return;
        }
        }
    }

    Scenario sc_;
    Config cfg_;
    Time horizon_;
    std::mt19937_64 net_rng_;
    std::mt19937_64 beacon_rng_;
    std::mt19937_64 cont_rng_;
    OmegaView omega_;
    Trace trace_;

    std::vector<Process> procs_; // index pid-1
    std::vector<bool> crashed_;
    std::vector<std::uint64_t> timer_gen_;
    std::vector<ProcessId> logged_leader_;
    std::priority_queue<SimEvent, std::vector<SimEvent>, SimEventAfter> queue_;
    std::uint64_t next_seq_ = 0;

    std::vector<int> group_of_;
    std::vector<Time> group_end_;
    Time splice_end_ = 0;
    std::set<ProcessId> splice_crashers_;
};

} // namespace

Trace run(const Scenario& scenario) {
    Simulator sim(scenario);
    sim.run();
    return std::move(sim).take();
}

void validate_trace(const Trace& trace) {
    const auto& sc = trace.scenario;
    const auto crash_at = trace.crash_times();
    auto fail = [](const std::string& what, const TraceEvent& e) {
        throw std::runtime_error("trace invariant violated: " + what + " at [" +
                                 e.to_string() + "]");
    };

    // FIFO-match deliveries against sends per (from,to,message).
    std::map<std::string, std::deque<Time>> open_sends;
    std::map<std::string, ProcessId> send_receiver;
    auto key = [](const TraceEvent& e) {
        return "p" + std::to_string(e.from) + ">p" + std::to_string(e.to) + ":" +
               to_string(*e.msg);
    };
    std::map<ProcessId, Value> decided;
    std::int64_t unmatched_to_correct = 0;

    for (const auto& e : trace.events) {
        auto it = crash_at.find(e.from);
        const bool from_crashed_before = it != crash_at.end() && e.t >= it->second;
        switch (e.kind) {
        case EventKind::sent:
            if (from_crashed_before)
                fail("a crashed process sent a message", e);
            open_sends[key(e)].push_back(e.t);
            send_receiver[key(e)] = e.to;
            break;
        case EventKind::delivered: {
            auto& q = open_sends[key(e)];
            if (q.empty() || q.front() > e.t)
                fail("delivery without a matching earlier send", e);
            const Time sent_t = q.front();
            q.pop_front();
            auto itc = crash_at.find(e.to);
            if (itc != crash_at.end() && e.t >= itc->second)
                fail("delivery to a crashed process", e);
            if (sent_t >= sc.cfg.gst && e.t - sent_t > sc.cfg.delta)
                fail("post-GST delivery later than delta", e);
            if (sc.kind == ScheduleKind::synchronous && e.from != e.to &&
                e.t != (sent_t / sc.cfg.delta + 1) * sc.cfg.delta)
                fail("synchronous delivery off the round boundary", e);
            break;
        }
        case EventKind::timer_fired:
        case EventKind::decision:
            if (from_crashed_before)
                fail("a crashed process took a step", e);
            if (e.kind == EventKind::decision) {
                auto [itd, inserted] = decided.emplace(e.from, *e.value);
                if (!inserted)
                    fail("a process decided twice", e);
            }
            break;
        default:
            break;
        }
    }

    // Reliable links: a message sent to a never-crashed receiver is either
    // delivered or still in flight when the horizon cuts the run short.
    for (const auto& [k, q] : open_sends)
        if (!crash_at.count(send_receiver[k]))
            unmatched_to_correct += static_cast<std::int64_t>(q.size());
    if (unmatched_to_correct > trace.undelivered_at_horizon)
        throw std::runtime_error(
            "trace invariant violated: a message to a correct process was dropped");
}

ReplayResult replay_text(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line) || line != kTraceHeader)
        return {false, "missing or unsupported trace header", 1};
    if (!std::getline(is, line) || line.rfind("# scenario ", 0) != 0)
        return {false, "missing scenario header", 2};
    Scenario sc;
    try {
        sc = scenario_from_line(line.substr(std::string("# scenario ").size()));
    } catch (const std::exception& ex) {
        return {false, std::string("bad scenario header: ") + ex.what(), 2};
    }
    Trace fresh;
    try {
        fresh = run(sc);
    } catch (const std::exception& ex) {
        return {false, std::string("re-run failed: ") + ex.what(), 2};
    }
    std::istringstream want(fresh.to_text());
    std::string expect;
    std::getline(want, expect); // header
    std::getline(want, expect); // scenario
    std::size_t lineno = 2;
    bool have_got = static_cast<bool>(std::getline(is, line));
    bool have_want = static_cast<bool>(std::getline(want, expect));
    while (have_got || have_want) {
        ++lineno;
        if (!have_got || !have_want || line != expect) {
            std::ostringstream os;
            os << "divergence at line " << lineno << ": recorded ["
               << (have_got ? line : std::string("<eof>")) << "] replayed ["
               << (have_want ? expect : std::string("<eof>")) << "]";
            return {false, os.str(), lineno};
        }
        have_got = static_cast<bool>(std::getline(is, line));
        have_want = static_cast<bool>(std::getline(want, expect));
    }
    return {true, "", 0};
}

ReplayResult replay_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        return {false, "cannot open trace file: " + path, 0};
    std::ostringstream buf;
    buf << in.rdbuf();
    if (buf.str().empty())
        return {false, "empty trace file: " + path, 0};
    return replay_text(buf.str());
}

} // namespace twostep
