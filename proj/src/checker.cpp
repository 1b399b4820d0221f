#include "twostep/checker.hpp"

#include <algorithm>
#include <functional>
#include <random>
#include <sstream>
#include <stdexcept>

namespace twostep {

std::string Verdict::to_string() const {
    std::ostringstream os;
    os << "verdict property=" << property << " pass=" << (pass ? 1 : 0);
    for (const auto& [k, v] : stats)
        os << ' ' << k << '=' << v;
    if (!detail.empty())
        os << " detail=\"" << detail << '"';
    if (!witness.empty())
        os << " witness=\"" << witness << '"';
    return os.str();
}

std::string summarize(const std::vector<Verdict>& verdicts) {
    std::ostringstream os;
    for (const auto& v : verdicts) {
        os << (v.pass ? "[PASS] " : "[FAIL] ") << v.property;
        if (!v.detail.empty())
            os << " - " << v.detail;
        os << '\n';
        if (!v.pass && !v.witness.empty())
            os << "       witness: " << v.witness << '\n';
    }
    return os.str();
}

Verdict check_agreement(const Trace& trace) {
    Verdict v;
    v.property = "agreement";
    std::optional<Value> first;
    std::int64_t decisions = 0;
    for (const auto& e : trace.events) {
        if (e.kind == EventKind::fault) {
            v.pass = false;
            v.detail = e.note;
            v.witness = to_line(trace.scenario);
            return v;
        }
        if (e.kind != EventKind::decision)
            continue;
        ++decisions;
        if (!first) {
            first = e.value;
        } else if (*first != *e.value) {
            v.pass = false;
            v.detail = "decisions " + to_string(*first) + " and " + to_string(*e.value);
            v.witness = to_line(trace.scenario);
            return v;
        }
    }
    v.stats["decisions"] = decisions;
    return v;
}

Verdict check_validity(const Trace& trace, const Scenario& scenario) {
    Verdict v;
    v.property = "validity";
    std::set<Value> allowed;
    const auto crash_at = trace.crash_times();
    if (scenario.cfg.variant == Variant::task) {
        for (const auto& [p, val] : scenario.task_proposals) {
            auto it = crash_at.find(p);
            if (it != crash_at.end() && it->second == 0)
                continue; // crashed at time 0: the proposal never entered the system
            allowed.insert(val);
        }
    } else {
        for (const auto& call : scenario.object_calls) {
            auto it = crash_at.find(call.pid);
            if (it != crash_at.end() && it->second <= call.t)
                continue;
            allowed.insert(call.value);
        }
    }
    for (const auto& e : trace.events) {
        if (e.kind != EventKind::decision)
            continue;
        if (!allowed.count(*e.value)) {
            v.pass = false;
            v.detail = "decided " + to_string(*e.value) + ", never proposed";
            v.witness = to_line(trace.scenario);
            return v;
        }
    }
    v.stats["proposed_values"] = static_cast<std::int64_t>(allowed.size());
    return v;
}

Verdict check_termination(const Trace& trace, const Config& cfg, Time bound) {
    if (trace.scenario.effective_horizon() < bound)
        throw std::invalid_argument("check_termination: trace horizon shorter than the bound");
    Verdict v;
    v.property = "termination";
    const auto decided = trace.first_decisions();
    Time max_t = -1;
    for (ProcessId p : trace.correct_processes()) {
        auto it = decided.find(p);
        if (it == decided.end() || it->second.first > bound) {
            v.pass = false;
            std::ostringstream os;
            os << "p" << p
               << (it == decided.end() ? " never decided"
                                       : " decided at " + std::to_string(it->second.first))
               << ", bound " << bound;
            v.detail = os.str();
            v.witness = to_line(trace.scenario);
            return v;
        }
        max_t = std::max(max_t, it->second.first);
    }
    v.stats["max_decision_time"] = max_t;
    return v;
}

Verdict check_slow_path_safety(const Trace& trace) {
    Verdict v;
    v.property = "slow-path-safety";
    const int need = trace.scenario.cfg.n - trace.scenario.cfg.f;
    std::map<std::pair<Ballot, Value>, std::set<ProcessId>> votes;
    std::vector<std::pair<Ballot, Value>> twoas;
    for (const auto& e : trace.events) {
        if (e.kind != EventKind::sent)
            continue;
        if (const auto* tb = std::get_if<TwoB>(&*e.msg); tb && tb->ballot > 0)
            votes[{tb->ballot, tb->value}].insert(e.from);
        else if (const auto* ta = std::get_if<TwoA>(&*e.msg))
            twoas.emplace_back(ta->ballot, ta->value);
    }
    std::int64_t quorums = 0;
    for (const auto& [bv, senders] : votes) {
        if (static_cast<int>(senders.size()) < need)
            continue;
        ++quorums;
        for (const auto& [b2, v2] : twoas) {
            if (b2 >= bv.first && v2 != bv.second) {
                v.pass = false;
                std::ostringstream os;
                os << "quorum voted (" << bv.first << "," << to_string(bv.second)
                   << ") but 2A(" << b2 << "," << to_string(v2) << ") was sent";
                v.detail = os.str();
                v.witness = to_line(trace.scenario);
                return v;
            }
        }
    }
    v.stats["slow_quorums"] = quorums;
    return v;
}

namespace {

// Enumerates all e-subsets of 1..n.
void for_each_subset(int n, int k, const std::function<void(const std::set<ProcessId>&)>& fn) {
    std::vector<int> idx(k);
    std::function<void(int, int)> rec = [&](int start, int depth) {
        if (depth == k) {
            std::set<ProcessId> s(idx.begin(), idx.begin() + k);
            fn(s);
            return;
        }
        for (int p = start; p <= n; ++p) {
            idx[depth] = p;
            rec(p + 1, depth + 1);
        }
    };
    if (k == 0) {
        fn({});
        return;
    }
    rec(1, 0);
}

Config with_domain(const Config& base, const std::vector<Value>& domain) {
    Config c = base;
    if (!domain.empty())
        c.value_domain = domain;
    return c;
}

struct TwoStepRun {
    bool decided_in_two = false;
    std::optional<ProcessId> decider;
    Time when = -1;
};

TwoStepRun two_step_result(const Trace& trace, std::optional<ProcessId> at) {
    TwoStepRun r;
    const Time limit = 2 * trace.scenario.cfg.delta;
    for (const auto& [p, tv] : trace.first_decisions()) {
        if (tv.first > limit)
            continue;
        if (at && p != *at)
            continue;
        if (!r.decided_in_two || tv.first < r.when) {
            r.decided_in_two = true;
            r.decider = p;
            r.when = tv.first;
        }
    }
    return r;
}

std::vector<std::vector<ProcessId>> all_permutations(const std::set<ProcessId>& correct) {
    std::vector<ProcessId> base(correct.begin(), correct.end());
    std::vector<std::vector<ProcessId>> out;
    std::sort(base.begin(), base.end());
    do {
        out.push_back(base);
    } while (std::next_permutation(base.begin(), base.end()));
    return out;
}

} // namespace

Verdict check_two_step_task(const Config& base, const TwoStepOptions& opts) {
    if (base.variant != Variant::task)
        throw std::invalid_argument("check_two_step_task: task variant expected");
    const Config cfg = with_domain(base, opts.domain);
    cfg.validate();
    const auto& domain = cfg.value_domain;
    const int correct_count = cfg.n - cfg.e;

    Verdict verdict;
    verdict.property = "two-step-task";
    std::int64_t item1 = 0, item2 = 0, subsets = 0;

    double expect = 1;
    for (int i = 0; i < correct_count; ++i)
        expect *= static_cast<double>(domain.size());
    if (expect > static_cast<double>(opts.max_cases))
        throw std::invalid_argument("check_two_step_task: domain too large to enumerate");

    bool failed = false;
    for_each_subset(cfg.n, cfg.e, [&](const std::set<ProcessId>& faulty) {
        if (failed)
            return;
        ++subsets;
        std::vector<ProcessId> correct;
        for (ProcessId p = 1; p <= cfg.n; ++p)
            if (!faulty.count(p))
                correct.push_back(p);

        // Item 1: every initial configuration decides fast somewhere.
        std::vector<std::size_t> assign(correct.size(), 0);
        while (true) {
            // favored: the correct process holding the greatest proposal
            ProcessId favored = correct[0];
            Value best = domain[assign[0]];
            for (std::size_t i = 1; i < correct.size(); ++i) {
                if (best < domain[assign[i]]) {
                    best = domain[assign[i]];
                    favored = correct[i];
                }
            }
            auto run_case = [&](ProcessId fav) {
                Scenario sc = make_sync_schedule(cfg, faulty, fav);
                for (std::size_t i = 0; i < correct.size(); ++i)
                    sc.task_proposals[correct[i]] = domain[assign[i]];
                return sc;
            };
            ++item1;
            bool ok = false;
            Scenario witness_sc;
            if (opts.exhaustive_orders) {
                for (const auto& perm : all_permutations(
                         std::set<ProcessId>(correct.begin(), correct.end()))) {
                    Scenario sc = run_case(perm.front());
                    sc.delivery_priority = perm;
                    witness_sc = sc;
                    if (two_step_result(run(sc), std::nullopt).decided_in_two) {
                        ok = true;
                        break;
                    }
                }
            } else {
                Scenario sc = run_case(favored);
                witness_sc = sc;
                ok = two_step_result(run(sc), std::nullopt).decided_in_two;
            }
            if (!ok) {
                verdict.pass = false;
                verdict.detail = "no process decided within two delays";
                verdict.witness = to_line(witness_sc);
                failed = true;
                return;
            }
            // next assignment
            std::size_t i = 0;
            while (i < assign.size() && ++assign[i] == domain.size()) {
                assign[i] = 0;
                ++i;
            }
            if (i == assign.size())
                break;
        }

        // Item 2: identical proposals decide fast at every correct process.
        for (Value v : domain) {
            for (ProcessId p : correct) {
                ++item2;
                Scenario sc = make_sync_schedule(cfg, faulty, p);
                for (ProcessId q : correct)
                    sc.task_proposals[q] = v;
                Trace t = run(sc);
                auto r = two_step_result(t, p);
                if (!r.decided_in_two || r.when != 2 * cfg.delta) {
                    verdict.pass = false;
                    std::ostringstream os;
                    os << "p" << p << " did not decide at exactly 2*delta";
                    verdict.detail = os.str();
                    verdict.witness = to_line(sc);
                    failed = true;
                    return;
                }
            }
        }
    });

    verdict.stats["item1_cases"] = item1;
    verdict.stats["item2_cases"] = item2;
    verdict.stats["failure_sets"] = subsets;
    if (verdict.pass) {
        // The enumeration must have covered exactly |domain|^(n-e) initial
        // configurations per failure set.
        std::int64_t want = subsets;
        for (int i = 0; i < correct_count; ++i)
            want *= static_cast<std::int64_t>(domain.size());
        if (item1 != want) {
            verdict.pass = false;
            verdict.detail = "case count mismatch: explored " + std::to_string(item1) +
                             ", expected " + std::to_string(want);
        }
    }
    return verdict;
}

Verdict check_two_step_object(const Config& base, const TwoStepOptions& opts) {
    if (base.variant != Variant::object)
        throw std::invalid_argument("check_two_step_object: object variant expected");
    const Config cfg = with_domain(base, opts.domain);
    cfg.validate();
    const auto& domain = cfg.value_domain;

    Verdict verdict;
    verdict.property = "two-step-object";
    std::int64_t item1 = 0, item2 = 0, subsets = 0;
    bool failed = false;

    for_each_subset(cfg.n, cfg.e, [&](const std::set<ProcessId>& faulty) {
        if (failed)
            return;
        ++subsets;
        std::vector<ProcessId> correct;
        for (ProcessId p = 1; p <= cfg.n; ++p)
            if (!faulty.count(p))
                correct.push_back(p);
        for (Value v : domain) {
            for (ProcessId p : correct) {
                // Item 1: only p proposes; p decides at exactly 2*delta.
                ++item1;
                Scenario solo = make_sync_schedule(cfg, faulty, p);
                solo.object_calls.push_back({0, p, v});
                Trace t1 = run(solo);
                auto r1 = two_step_result(t1, p);
                if (!r1.decided_in_two || r1.when != 2 * cfg.delta) {
                    verdict.pass = false;
                    verdict.detail = "sole proposer did not decide at exactly 2*delta";
                    verdict.witness = to_line(solo);
                    failed = true;
                    return;
                }
                // Item 2: everyone proposes v, p's message ordered first.
                ++item2;
                Scenario all = make_sync_schedule(cfg, faulty, p);
                for (ProcessId q : correct)
                    all.object_calls.push_back({0, q, v});
                Trace t2 = run(all);
                auto r2 = two_step_result(t2, p);
                if (!r2.decided_in_two) {
                    verdict.pass = false;
                    verdict.detail = "proposer was not two-step when all propose the same value";
                    verdict.witness = to_line(all);
                    failed = true;
                    return;
                }
            }
        }
    });

    verdict.stats["item1_cases"] = item1;
    verdict.stats["item2_cases"] = item2;
    verdict.stats["failure_sets"] = subsets;
    if (verdict.pass) {
        const std::int64_t want =
            subsets * static_cast<std::int64_t>(domain.size()) * (cfg.n - cfg.e);
        if (item1 != want) {
            verdict.pass = false;
            verdict.detail = "case count mismatch: explored " + std::to_string(item1) +
                             ", expected " + std::to_string(want);
        }
    }
    return verdict;
}

namespace {

// One enumerated ballot-0 outcome per process: a vote (value, recorded
// proposer) or no vote at all (object variant only).
struct VoteConfig {
    int n = 0;
    std::vector<int> value;    // -1 = unvoted, else index into the domain
    std::vector<ProcessId> proposer;
};

struct OracleContext {
    Config cfg;
    std::vector<Value> domain;
    std::int64_t configs = 0;
    std::int64_t fast_configs = 0;
    std::int64_t checks = 0;
    std::optional<std::string> counterexample;
};

// Derived per-config facts: pinned initial values and reachability.
struct Derived {
    bool reachable = false;
    std::vector<int> initial; // index into domain, or -1 for Bottom/free-minimum
};

Derived derive(const OracleContext& ctx, const VoteConfig& vc) {
    Derived d;
    const int n = vc.n;
    std::vector<int> prop_value(n + 1, -2); // -2 = unpinned
    for (int p = 1; p <= n; ++p) {
        if (vc.value[p] < 0)
            continue;
        ProcessId q = vc.proposer[p];
        if (prop_value[q] == -2)
            prop_value[q] = vc.value[p];
        else if (prop_value[q] != vc.value[p])
            return d; // one process cannot have proposed two values
    }
    const bool object = ctx.cfg.variant == Variant::object;
    for (int p = 1; p <= n; ++p) {
        const int pinned = prop_value[p];
        if (vc.value[p] < 0) {
            // unvoted: impossible in the task variant, and in the object
            // variant a successful proposer always holds its own vote
            if (!object || pinned != -2)
                return d;
            continue;
        }
        if (vc.proposer[p] == p) {
            // own record: val equals the own proposal by construction
            continue;
        }
        // explicit vote for someone else's proposal
        if (object) {
            if (pinned != -2 && pinned != vc.value[p])
                return d; // object: may only vote for the own value or when unproposed
        } else {
            if (pinned != -2 && vc.value[p] < pinned)
                return d; // task: only values >= the own proposal are accepted
        }
    }
    if (object) {
        // a process recorded as proposer must still hold its own value
        for (int q = 1; q <= n; ++q)
            if (prop_value[q] != -2 && vc.value[q] != prop_value[q])
                return d;
    }
    d.reachable = true;
    d.initial.assign(n + 1, -1);
    for (int p = 1; p <= n; ++p) {
        if (prop_value[p] != -2)
            d.initial[p] = prop_value[p];
        else if (!object)
            d.initial[p] = 0; // free initials realized as the least domain value
    }
    return d;
}

void check_config(OracleContext& ctx, const VoteConfig& vc) {
    Derived d = derive(ctx, vc);
    if (!d.reachable)
        return;
    ++ctx.configs;
    const int n = vc.n;
    const int need_others = n - ctx.cfg.e - 1;

    // fast pairs: value v proposed by q with n-e-1 other supporters
    std::vector<std::pair<int, ProcessId>> fast;
    for (int q = 1; q <= n; ++q) {
        if (d.initial[q] < 0)
            continue;
        int cnt = 0;
        for (int p = 1; p <= n; ++p)
            if (p != q && vc.value[p] == d.initial[q] && vc.proposer[p] == q)
                ++cnt;
        if (cnt >= need_others)
            fast.emplace_back(d.initial[q], q);
    }
    if (fast.empty())
        return;
    ++ctx.fast_configs;

    std::vector<ProcessId> members(n);
    for (int i = 0; i < n; ++i)
        members[i] = i + 1;

    for (const auto& [vidx, q] : fast) {
        const Value decided_value = ctx.domain[vidx];
        for_each_subset(n, n - ctx.cfg.f, [&](const std::set<ProcessId>& quorum) {
            if (ctx.counterexample)
                return;
            std::vector<std::pair<ProcessId, OneB>> replies;
            for (ProcessId s : quorum) {
                OneB r;
                r.ballot = 1;
                r.vbal = 0;
                if (vc.value[s] >= 0) {
                    r.val = ctx.domain[vc.value[s]];
                    r.val_proposer = vc.proposer[s];
                }
                if (s == q)
                    r.decided = decided_value;
                r.initial = d.initial[s] >= 0 ? ctx.domain[d.initial[s]] : Value::bottom();
                replies.emplace_back(s, r);
            }
            for (ProcessId coord : quorum) {
                ++ctx.checks;
                Value own =
                    d.initial[coord] >= 0 ? ctx.domain[d.initial[coord]] : Value::bottom();
                auto got = compute_proposal(replies, quorum, ctx.cfg, own);
                if (!got || *got != decided_value) {
                    std::ostringstream os;
                    os << "fast value " << to_string(decided_value) << " via p" << q
                       << " but recovery returned " << (got ? to_string(*got) : "nothing")
                       << "; votes:";
                    for (int p = 1; p <= n; ++p) {
                        if (vc.value[p] < 0)
                            continue;
                        os << " p" << p << "->(" << to_string(ctx.domain[vc.value[p]]) << ",p"
                           << vc.proposer[p] << ")";
                    }
                    os << "; quorum={";
                    bool first = true;
                    for (ProcessId s : quorum) {
                        os << (first ? "" : ",") << 'p' << s;
                        first = false;
                    }
                    os << "} coordinator p" << coord;
                    ctx.counterexample = os.str();
                    return;
                }
            }
        });
        if (ctx.counterexample)
            return;
    }
}

void enumerate_votes(OracleContext& ctx, VoteConfig& vc, int depth,
                     std::vector<std::vector<int>>& support) {
    if (ctx.counterexample)
        return;
    const int n = vc.n;
    // prune: some (value, proposer) pair must still be able to reach a fast
    // quorum of supporters among the other processes
    const int remaining = n - depth + 1;
    const int need_others = n - ctx.cfg.e - 1;
    bool feasible = need_others <= remaining; // everyone left could support one pair
    if (!feasible) {
        for (int v = 0; !feasible && v < static_cast<int>(ctx.domain.size()); ++v)
            for (int q = 1; !feasible && q <= n; ++q)
                if (support[v][q] + remaining >= need_others)
                    feasible = true;
    }
    if (!feasible)
        return;
    if (depth > n) {
        check_config(ctx, vc);
        return;
    }
    const bool object = ctx.cfg.variant == Variant::object;
    if (object) {
        vc.value[depth] = -1;
        vc.proposer[depth] = 0;
        enumerate_votes(ctx, vc, depth + 1, support);
    }
    for (int v = 0; v < static_cast<int>(ctx.domain.size()); ++v) {
        for (ProcessId q = 1; q <= n; ++q) {
            vc.value[depth] = v;
            vc.proposer[depth] = q;
            if (q != depth)
                ++support[v][q];
            enumerate_votes(ctx, vc, depth + 1, support);
            if (q != depth)
                --support[v][q];
            if (ctx.counterexample)
                return;
        }
    }
    vc.value[depth] = -1;
    vc.proposer[depth] = 0;
}

} // namespace

Verdict recovery_oracle(const Config& cfg) {
    if (cfg.n > 8)
        throw std::invalid_argument("recovery_oracle: enumeration is limited to n <= 8");
    if (cfg.value_domain.size() < 2)
        throw std::invalid_argument("recovery_oracle: need at least two values");
    OracleContext ctx;
    ctx.cfg = cfg;
    ctx.domain = cfg.value_domain;
    VoteConfig vc;
    vc.n = cfg.n;
    vc.value.assign(cfg.n + 1, -1);
    vc.proposer.assign(cfg.n + 1, 0);
    std::vector<std::vector<int>> support(ctx.domain.size(),
                                          std::vector<int>(cfg.n + 1, 0));
    enumerate_votes(ctx, vc, 1, support);

    Verdict v;
    v.property = "fast-recovery";
    v.stats["configs"] = ctx.configs;
    v.stats["fast_configs"] = ctx.fast_configs;
    v.stats["recovery_checks"] = ctx.checks;
    if (ctx.counterexample) {
        v.pass = false;
        v.detail = "recovery can contradict a fast decision";
        v.witness = *ctx.counterexample;
    }
    return v;
}

Scenario fuzz_scenario(const Config& base, std::uint64_t seed, int crash_budget,
                       Mutation mutation) {
    Config cfg = base;
    std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ULL + 0x2545f4914f6cdd1dULL);
    auto pick = [&](std::uint64_t m) { return m == 0 ? 0 : rng() % m; };
    const int budget = crash_budget < 0 ? cfg.f : crash_budget;

    Scenario sc;
    const bool spliced = seed % 4 == 3 && cfg.n >= 2;
    if (spliced) {
        std::vector<std::vector<ProcessId>> groups(2);
        for (ProcessId p = 1; p <= cfg.n; ++p)
            groups[pick(2)].push_back(p);
        for (int g = 0; g < 2; ++g) {
            if (groups[g].empty()) {
                groups[g].push_back(groups[1 - g].back());
                groups[1 - g].pop_back();
            }
        }
        std::vector<int> rounds = {1 + static_cast<int>(pick(3)),
                                   1 + static_cast<int>(pick(3))};
        std::set<ProcessId> crash_set;
        const int k = static_cast<int>(pick(budget + 1));
        while (static_cast<int>(crash_set.size()) < k)
            crash_set.insert(1 + static_cast<int>(pick(cfg.n)));
        sc = make_splice_schedule(cfg, groups, rounds, crash_set, seed);
    } else {
        sc.cfg = cfg;
        sc.cfg.gst = cfg.delta * static_cast<Time>(pick(21)); // GST <= 20 delta
        sc.kind = ScheduleKind::random_walk;
        sc.seed = seed;
        const int k = static_cast<int>(pick(budget + 1));
        std::set<ProcessId> victims;
        while (static_cast<int>(victims.size()) < k)
            victims.insert(1 + static_cast<int>(pick(cfg.n)));
        for (ProcessId p : victims)
            sc.crash_plan.emplace_back(static_cast<Time>(pick(sc.cfg.gst + 5 * cfg.delta + 1)),
                                       p);
        sc.horizon = sc.cfg.gst + 25 * cfg.delta;
    }

    const auto doomed = sc.eventual_crashes();
    if (cfg.variant == Variant::task) {
        for (ProcessId p = 1; p <= cfg.n; ++p)
            sc.task_proposals[p] =
                cfg.value_domain[pick(cfg.value_domain.size())];
    } else {
        // At least one never-crashing process proposes before GST so that a
        // decision is always reachable.
        std::vector<ProcessId> survivors;
        for (ProcessId p = 1; p <= cfg.n; ++p)
            if (!doomed.count(p))
                survivors.push_back(p);
        const ProcessId anchor = survivors[pick(survivors.size())];
        const Time anchor_t = sc.cfg.gst > 0 ? static_cast<Time>(pick(sc.cfg.gst)) : 0;
        sc.object_calls.push_back(
            {anchor_t, anchor, cfg.value_domain[pick(cfg.value_domain.size())]});
        std::set<ProcessId> used = {anchor};
        const int extra = static_cast<int>(pick(cfg.n));
        for (int i = 0; i < extra; ++i) {
            ProcessId p = 1 + static_cast<int>(pick(cfg.n));
            if (!used.insert(p).second)
                continue;
            sc.object_calls.push_back(
                {static_cast<Time>(pick(sc.cfg.gst + 5 * cfg.delta + 1)), p,
                 cfg.value_domain[pick(cfg.value_domain.size())]});
        }
        std::sort(sc.object_calls.begin(), sc.object_calls.end(),
                  [](const ProposeCall& a, const ProposeCall& b) {
                      return std::tie(a.t, a.pid) < std::tie(b.t, b.pid);
                  });
    }
    sc.mutation = mutation;
    return sc;
}

Verdict fuzz(const Config& cfg, const FuzzOptions& opts) {
    Verdict verdict;
    verdict.property = "fuzz";
    Time max_after_gst = -1;
    std::int64_t runs = 0;
    for (std::uint64_t seed = opts.first_seed; seed < opts.first_seed + opts.num_seeds;
         ++seed) {
        Scenario sc = fuzz_scenario(cfg, seed, opts.crash_budget, opts.mutation);
        Trace trace = run(sc);
        ++runs;
        validate_trace(trace);
        std::vector<Verdict> checks;
        checks.push_back(check_agreement(trace));
        checks.push_back(check_validity(trace, sc));
        checks.push_back(check_slow_path_safety(trace));
        if (opts.require_termination) {
            const Time slack =
                opts.termination_slack > 0 ? opts.termination_slack : 15 * cfg.delta;
            checks.push_back(check_termination(trace, cfg, sc.cfg.gst + slack));
        }
        for (const auto& c : checks) {
            if (!c.pass) {
                verdict.pass = false;
                verdict.detail = c.property + " failed at seed " + std::to_string(seed) +
                                 (c.detail.empty() ? "" : ": " + c.detail);
                verdict.witness = to_line(sc);
                verdict.stats["first_failing_seed"] = static_cast<std::int64_t>(seed);
                verdict.stats["runs"] = runs;
                return verdict;
            }
        }
        for (const auto& [p, tv] : trace.first_decisions())
            if (tv.first >= sc.cfg.gst)
                max_after_gst = std::max(max_after_gst, tv.first - sc.cfg.gst);
    }
    verdict.stats["runs"] = runs;
    verdict.stats["max_decision_after_gst"] = max_after_gst;
    return verdict;
}

} // namespace twostep
