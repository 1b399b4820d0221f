#include "twostep/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace twostep {

std::string to_string(ScheduleKind k) {
    switch (k) {
    case ScheduleKind::synchronous: return "sync";
    case ScheduleKind::random_walk: return "random";
    case ScheduleKind::spliced: return "splice";
    }
    return "?";
}

std::string to_string(OmegaMode m) {
    return m == OmegaMode::oracle ? "oracle" : "heartbeat";
}

namespace {

ScheduleKind kind_from_string(const std::string& s) {
    if (s == "sync")
        return ScheduleKind::synchronous;
    if (s == "random")
        return ScheduleKind::random_walk;
    if (s == "splice")
        return ScheduleKind::spliced;
    throw std::invalid_argument("unknown schedule kind: " + s);
}

OmegaMode omega_from_string(const std::string& s) {
    if (s == "oracle")
        return OmegaMode::oracle;
    if (s == "heartbeat")
        return OmegaMode::heartbeat;
    throw std::invalid_argument("unknown omega mode: " + s);
}

std::string mutation_to_string(Mutation m) {
    return m == Mutation::none ? "none" : "drop-fast-guard";
}

Mutation mutation_from_string(const std::string& s) {
    if (s == "none")
        return Mutation::none;
    if (s == "drop-fast-guard")
        return Mutation::drop_fast_own_support_guard;
    throw std::invalid_argument("unknown mutation: " + s);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

ProcessId pid_from_string(std::string s) {
    if (!s.empty() && (s[0] == 'p' || s[0] == 'P'))
        s = s.substr(1);
    return std::stoi(s);
}

} // namespace

void Scenario::validate() const {
    cfg.validate(allow_below_bound);
    std::set<ProcessId> crashed;
    for (const auto& [t, p] : crash_plan) {
        if (t < 0 || p < 1 || p > cfg.n)
            throw std::invalid_argument("scenario: bad crash plan entry");
        if (!crashed.insert(p).second)
            throw std::invalid_argument("scenario: process crashes twice");
    }
    if (static_cast<int>(crashed.size()) > cfg.f)
        throw std::invalid_argument("scenario: more than f crashes");
    if (kind == ScheduleKind::synchronous) {
        if (cfg.gst != 0)
            throw std::invalid_argument("scenario: synchronous runs have gst = 0");
        for (const auto& [t, p] : crash_plan)
            if (t != 0)
                throw std::invalid_argument("scenario: synchronous crashes happen at time 0");
    }
    const auto at0 = crashed_at_start();
    if (cfg.variant == Variant::task) {
        if (!object_calls.empty())
            throw std::invalid_argument("scenario: task runs take no propose() calls");
        for (ProcessId p = 1; p <= cfg.n; ++p) {
            if (at0.count(p))
                continue;
            auto it = task_proposals.find(p);
            if (it == task_proposals.end())
                throw std::invalid_argument("scenario: missing proposal for p" +
                                            std::to_string(p));
            if (it->second.is_bottom())
                throw std::invalid_argument("scenario: Bottom proposal in task variant");
            if (!std::count(cfg.value_domain.begin(), cfg.value_domain.end(), it->second))
                throw std::invalid_argument("scenario: proposal outside the value domain");
        }
    } else {
        if (!task_proposals.empty())
            throw std::invalid_argument("scenario: object runs take propose() calls only");
        std::set<ProcessId> seen;
        for (const auto& c : object_calls) {
            if (c.pid < 1 || c.pid > cfg.n || c.t < 0)
                throw std::invalid_argument("scenario: bad propose() call");
            if (c.value.is_bottom() ||
                !std::count(cfg.value_domain.begin(), cfg.value_domain.end(), c.value))
                throw std::invalid_argument("scenario: propose() value outside the domain");
            if (!seen.insert(c.pid).second)
                throw std::invalid_argument("scenario: a process proposes at most once");
        }
    }
    for (ProcessId p : delivery_priority)
        if (p < 1 || p > cfg.n)
            throw std::invalid_argument("scenario: delivery priority id out of range");
    if (kind == ScheduleKind::spliced) {
        if (splice_groups.empty() || splice_groups.size() != splice_rounds.size())
            throw std::invalid_argument("scenario: splice needs one round count per group");
        std::set<ProcessId> all;
        for (const auto& g : splice_groups)
            for (ProcessId p : g) {
                if (p < 1 || p > cfg.n || !all.insert(p).second)
                    throw std::invalid_argument("scenario: splice groups must partition the system");
            }
        if (static_cast<int>(all.size()) != cfg.n)
            throw std::invalid_argument("scenario: splice groups must partition the system");
        for (int r : splice_rounds)
            if (r < 1)
                throw std::invalid_argument("scenario: splice rounds must be positive");
    }
}

Time Scenario::effective_horizon() const {
    if (horizon > 0)
        return horizon;
    return cfg.gst + 25 * cfg.delta;
}

std::set<ProcessId> Scenario::crashed_at_start() const {
    std::set<ProcessId> out;
    for (const auto& [t, p] : crash_plan)
        if (t == 0)
            out.insert(p);
    return out;
}

std::set<ProcessId> Scenario::eventual_crashes() const {
    std::set<ProcessId> out;
    for (const auto& [t, p] : crash_plan)
        out.insert(p);
    return out;
}

namespace {

void put(std::ostringstream& os, const std::string& key, const std::string& value) {
    os << ' ' << key << '=' << (value.empty() ? "-" : value);
}

std::string join_pids(const std::vector<ProcessId>& v) {
    std::ostringstream os;
    for (std::size_t i = 0; i < v.size(); ++i)
        os << (i ? "," : "") << 'p' << v[i];
    return os.str();
}

} // namespace

std::string to_line(const Scenario& s) {
    std::ostringstream os;
    os << "variant=" << to_string(s.cfg.variant);
    put(os, "n", std::to_string(s.cfg.n));
    put(os, "e", std::to_string(s.cfg.e));
    put(os, "f", std::to_string(s.cfg.f));
    put(os, "delta", std::to_string(s.cfg.delta));
    put(os, "gst", std::to_string(s.cfg.gst));
    {
        std::ostringstream d;
        for (std::size_t i = 0; i < s.cfg.value_domain.size(); ++i)
            d << (i ? "," : "") << to_string(s.cfg.value_domain[i]);
        put(os, "domain", d.str());
    }
    put(os, "kind", to_string(s.kind));
    put(os, "seed", std::to_string(s.seed));
    put(os, "horizon", std::to_string(s.horizon));
    {
        std::ostringstream d;
        bool first = true;
        for (const auto& [p, v] : s.task_proposals) {
            d << (first ? "" : ",") << 'p' << p << ':' << to_string(v);
            first = false;
        }
        put(os, "props", d.str());
    }
    {
        std::ostringstream d;
        for (std::size_t i = 0; i < s.object_calls.size(); ++i)
            d << (i ? "," : "") << 'p' << s.object_calls[i].pid << ':'
              << to_string(s.object_calls[i].value) << '@' << s.object_calls[i].t;
        put(os, "calls", d.str());
    }
    {
        std::ostringstream d;
        for (std::size_t i = 0; i < s.crash_plan.size(); ++i)
            d << (i ? "," : "") << 'p' << s.crash_plan[i].second << '@' << s.crash_plan[i].first;
        put(os, "crashes", d.str());
    }
    put(os, "order", join_pids(s.delivery_priority));
    put(os, "omega", to_string(s.omega));
    put(os, "otimeout", std::to_string(s.omega_timeout));
    put(os, "pregst", s.pregst_leader ? "p" + std::to_string(*s.pregst_leader) : "");
    put(os, "mutation", mutation_to_string(s.mutation));
    put(os, "below", s.allow_below_bound ? "1" : "0");
    {
        std::ostringstream d;
        for (std::size_t i = 0; i < s.splice_groups.size(); ++i) {
            d << (i ? "|" : "");
            for (std::size_t j = 0; j < s.splice_groups[i].size(); ++j)
                d << (j ? "," : "") << 'p' << s.splice_groups[i][j];
        }
        put(os, "groups", d.str());
    }
    {
        std::ostringstream d;
        for (std::size_t i = 0; i < s.splice_rounds.size(); ++i)
            d << (i ? "," : "") << s.splice_rounds[i];
        put(os, "rounds", d.str());
    }
    put(os, "cseed", std::to_string(s.continuation_seed));
    return os.str();
}

namespace {

// Applies one key=value pair onto a scenario under construction.
void apply_kv(Scenario& s, const std::string& key, const std::string& value) {
    if (value == "-" || value.empty()) {
        if (key == "props")
            s.task_proposals.clear();
        else if (key == "calls")
            s.object_calls.clear();
        else if (key == "crashes")
            s.crash_plan.clear();
        else if (key == "order")
            s.delivery_priority.clear();
        else if (key == "groups")
            s.splice_groups.clear();
        else if (key == "rounds")
            s.splice_rounds.clear();
        else if (key == "pregst")
            s.pregst_leader.reset();
        return;
    }
    if (key == "variant")
        s.cfg.variant = variant_from_string(value);
    else if (key == "n")
        s.cfg.n = std::stoi(value);
    else if (key == "e")
        s.cfg.e = std::stoi(value);
    else if (key == "f")
        s.cfg.f = std::stoi(value);
    else if (key == "delta")
        s.cfg.delta = std::stoll(value);
    else if (key == "gst")
        s.cfg.gst = std::stoll(value);
    else if (key == "domain") {
        s.cfg.value_domain.clear();
        for (const auto& part : split(value, ','))
            s.cfg.value_domain.push_back(value_from_string(part));
    } else if (key == "kind")
        s.kind = kind_from_string(value);
    else if (key == "seed")
        s.seed = std::stoull(value);
    else if (key == "horizon")
        s.horizon = std::stoll(value);
    else if (key == "props") {
        s.task_proposals.clear();
        for (const auto& part : split(value, ',')) {
            auto kv = split(part, ':');
            if (kv.size() != 2)
                throw std::invalid_argument("bad proposal entry: " + part);
            if (kv[1] == "_")
                continue; // crashed-at-0 placeholder
            s.task_proposals[pid_from_string(kv[0])] = value_from_string(kv[1]);
        }
    } else if (key == "calls") {
        s.object_calls.clear();
        for (const auto& part : split(value, ',')) {
            auto kv = split(part, ':');
            if (kv.size() != 2)
                throw std::invalid_argument("bad propose() entry: " + part);
            auto vt = split(kv[1], '@');
            if (vt.size() != 2)
                throw std::invalid_argument("bad propose() entry: " + part);
            s.object_calls.push_back(
                {std::stoll(vt[1]), pid_from_string(kv[0]), value_from_string(vt[0])});
        }
    } else if (key == "crashes") {
        s.crash_plan.clear();
        for (const auto& part : split(value, ',')) {
            auto pt = split(part, '@');
            Time t = pt.size() == 2 ? std::stoll(pt[1]) : 0;
            s.crash_plan.emplace_back(t, pid_from_string(pt[0]));
        }
    } else if (key == "order") {
        s.delivery_priority.clear();
        for (const auto& part : split(value, ','))
            s.delivery_priority.push_back(pid_from_string(part));
    } else if (key == "omega")
        s.omega = omega_from_string(value);
    else if (key == "otimeout")
        s.omega_timeout = std::stoll(value);
    else if (key == "pregst")
        s.pregst_leader = pid_from_string(value);
    else if (key == "mutation")
        s.mutation = mutation_from_string(value);
    else if (key == "below")
        s.allow_below_bound = value == "1" || value == "true";
    else if (key == "groups") {
        s.splice_groups.clear();
        for (const auto& grp : split(value, '|')) {
            std::vector<ProcessId> g;
            for (const auto& part : split(grp, ','))
                g.push_back(pid_from_string(part));
            s.splice_groups.push_back(std::move(g));
        }
    } else if (key == "rounds") {
        s.splice_rounds.clear();
        for (const auto& part : split(value, ','))
            s.splice_rounds.push_back(std::stoi(part));
    } else if (key == "cseed")
        s.continuation_seed = std::stoull(value);
    else
        throw std::invalid_argument("unknown scenario key: " + key);
}

} // namespace

Scenario scenario_from_line(const std::string& line) {
    Scenario s;
    std::istringstream is(line);
    std::string tok;
    while (is >> tok) {
        auto eq = tok.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("bad scenario token: " + tok);
        apply_kv(s, tok.substr(0, eq), tok.substr(eq + 1));
    }
    return s;
}

Scenario scenario_from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("cannot open scenario file: " + path);
    Scenario s;
    std::string line;
    auto trim = [](std::string v) {
        const char* ws = " \t\r";
        auto b = v.find_first_not_of(ws);
        auto e = v.find_last_not_of(ws);
        return b == std::string::npos ? std::string() : v.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos)
            line = line.substr(0, hash);
        if (line.find('=') == std::string::npos)
            continue;
        // Witness files and trace headers carry the whole scenario as one
        // space-separated line of key=value tokens; accept both forms.
        std::istringstream toks(line);
        std::vector<std::string> parts;
        std::string tok;
        while (toks >> tok)
            parts.push_back(tok);
        const bool one_liner =
            parts.size() > 1 && std::all_of(parts.begin(), parts.end(), [](const auto& t) {
                return t.find('=') != std::string::npos;
            });
        if (one_liner) {
            for (const auto& t : parts) {
                auto eq = t.find('=');
                apply_kv(s, t.substr(0, eq), t.substr(eq + 1));
            }
        } else {
            auto eq = line.find('=');
            apply_kv(s, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        }
    }
    return s;
}

Scenario make_sync_schedule(const Config& cfg, const std::set<ProcessId>& faulty,
                            ProcessId favored) {
    if (static_cast<int>(faulty.size()) != cfg.e)
        throw std::invalid_argument("make_sync_schedule: |faulty| must equal e");
    if (faulty.count(favored))
        throw std::invalid_argument("make_sync_schedule: the favored process must be correct");
    if (favored < 1 || favored > cfg.n)
        throw std::invalid_argument("make_sync_schedule: favored id out of range");
    Scenario s;
    s.cfg = cfg;
    s.cfg.gst = 0;
    s.kind = ScheduleKind::synchronous;
    for (ProcessId p : faulty)
        s.crash_plan.emplace_back(0, p);
    s.delivery_priority.push_back(favored);
    s.horizon = 6 * cfg.delta;
    return s;
}

Scenario make_splice_schedule(const Config& cfg,
                              const std::vector<std::vector<ProcessId>>& groups,
                              const std::vector<int>& rounds,
                              const std::set<ProcessId>& crash_set,
                              std::uint64_t continuation_seed) {
    if (static_cast<int>(crash_set.size()) > cfg.f)
        throw std::invalid_argument("make_splice_schedule: crash set larger than f");
    Scenario s;
    s.cfg = cfg;
    s.kind = ScheduleKind::spliced;
    s.splice_groups = groups;
    s.splice_rounds = rounds;
    s.continuation_seed = continuation_seed;
    s.seed = continuation_seed;
    int max_rounds = 1;
    for (int r : rounds)
        max_rounds = std::max(max_rounds, r);
    const Time phase_end = static_cast<Time>(max_rounds) * cfg.delta;
    for (ProcessId p : crash_set)
        s.crash_plan.emplace_back(phase_end, p);
    s.cfg.gst = phase_end;
    s.horizon = phase_end + 25 * cfg.delta;
    if (groups.empty() || groups.size() != rounds.size())
        throw std::invalid_argument("make_splice_schedule: one round count per group");
    std::set<ProcessId> all;
    for (const auto& g : groups)
        for (ProcessId p : g)
            if (p < 1 || p > cfg.n || !all.insert(p).second)
                throw std::invalid_argument("make_splice_schedule: groups must partition the system");
    if (static_cast<int>(all.size()) != cfg.n)
        throw std::invalid_argument("make_splice_schedule: groups must partition the system");
    for (int r : rounds)
        if (r < 1)
            throw std::invalid_argument("make_splice_schedule: rounds must be positive");
    return s;
}

} // namespace twostep
