#include "twostep/simnet.hpp"
#include "twostep/checker.hpp"

#include <doctest.h>

#include <fstream>

using namespace twostep;

namespace {

Config cfg_of(int n, int e, int f, Variant variant, std::vector<Value> domain = {}) {
    Config c;
    c.n = n;
    c.e = e;
    c.f = f;
    c.variant = variant;
    if (!domain.empty())
        c.value_domain = domain;
    return c;
}

} // namespace

TEST_CASE("synchronous run: the max proposer decides in two message delays") {
    Config cfg = cfg_of(3, 1, 1, Variant::task);
    Scenario sc = make_sync_schedule(cfg, {3}, 2);
    sc.task_proposals = {{1, Value::of(1)}, {2, Value::of(2)}};
    Trace t = run(sc);
    const auto decisions = t.first_decisions();
    REQUIRE(decisions.count(2));
    CHECK(decisions.at(2).first == 2 * cfg.delta);
    CHECK(decisions.at(2).second == Value::of(2));
    validate_trace(t);
    CHECK(check_agreement(t).pass);
    CHECK(check_validity(t, sc).pass);
}

TEST_CASE("synchronous run: identical proposals let any favored process decide at 2*delta") {
    Config cfg = cfg_of(3, 1, 1, Variant::task);
    for (ProcessId favored : {1, 2}) {
        Scenario sc = make_sync_schedule(cfg, {3}, favored);
        sc.task_proposals = {{1, Value::of(2)}, {2, Value::of(2)}};
        Trace t = run(sc);
        const auto decisions = t.first_decisions();
        REQUIRE(decisions.count(favored));
        CHECK(decisions.at(favored).first == 2 * cfg.delta);
        CHECK(decisions.at(favored).second == Value::of(2));
    }
}

TEST_CASE("random schedules are deterministic by construction") {
    Config cfg = cfg_of(3, 1, 1, Variant::task);
    Scenario sc;
    sc.cfg = cfg;
    sc.cfg.gst = 40;
    sc.kind = ScheduleKind::random_walk;
    sc.seed = 42;
    sc.task_proposals = {{1, Value::of(0)}, {2, Value::of(2)}, {3, Value::of(1)}};
    sc.crash_plan = {{35, 3}};
    Trace a = run(sc);
    Trace b = run(sc);
    CHECK(a.to_text() == b.to_text());
    CHECK(!a.events.empty());
    validate_trace(a);
}

TEST_CASE("trace invariants hold across seeds and both variants") {
    for (Variant variant : {Variant::task, Variant::object}) {
        Config cfg = variant == Variant::task ? cfg_of(6, 2, 2, Variant::task)
                                              : cfg_of(5, 2, 2, Variant::object);
        cfg.value_domain = {Value::of(0), Value::of(1)};
        for (std::uint64_t seed = 0; seed < 25; ++seed) {
            Scenario sc = fuzz_scenario(cfg, seed, cfg.f);
            Trace t = run(sc);
            CHECK_NOTHROW(validate_trace(t));
        }
    }
}

TEST_CASE("timers fire every 5*delta after the initial 2*delta") {
    Config cfg = cfg_of(3, 1, 1, Variant::task);
    Scenario sc = make_sync_schedule(cfg, {3}, 2);
    // equal proposals, but the favored process is crashed? no - keep p2
    // favored and let p1 stay undecided until the Decide arrives at 3*delta
    sc.task_proposals = {{1, Value::of(1)}, {2, Value::of(2)}};
    sc.horizon = 8 * cfg.delta;
    Trace t = run(sc);
    std::vector<Time> p1_timers;
    for (const auto& e : t.events)
        if (e.kind == EventKind::timer_fired && e.from == 1)
            p1_timers.push_back(e.t);
    // p1 decides at 3*delta via the Decide message, so only the 2*delta
    // timer fires before StopTimer
    REQUIRE(p1_timers.size() == 1);
    CHECK(p1_timers[0] == 2 * cfg.delta);
}

TEST_CASE("replay: own output is byte-identical, tampering is detected") {
    Config cfg = cfg_of(3, 1, 1, Variant::task);
    Scenario sc;
    sc.cfg = cfg;
    sc.cfg.gst = 30;
    sc.kind = ScheduleKind::random_walk;
    sc.seed = 7;
    sc.task_proposals = {{1, Value::of(1)}, {2, Value::of(0)}, {3, Value::of(2)}};
    Trace t = run(sc);
    const std::string text = t.to_text();

    ReplayResult ok = replay_text(text);
    CHECK(ok.ok);

    // flip one decision value in the recorded events
    std::string tampered = text;
    auto pos = tampered.find("decision");
    REQUIRE(pos != std::string::npos);
    auto line_end = tampered.find('\n', pos);
    tampered.replace(pos, line_end - pos, "decision p1 9");
    ReplayResult bad = replay_text(tampered);
    CHECK(!bad.ok);
    CHECK(bad.message.find("divergence") != std::string::npos);

    ReplayResult empty = replay_text("");
    CHECK(!empty.ok);
}

TEST_CASE("replay round-trips through a file") {
    Config cfg = cfg_of(3, 1, 1, Variant::task);
    Scenario sc = make_sync_schedule(cfg, {2}, 1);
    sc.task_proposals = {{1, Value::of(1)}, {3, Value::of(1)}};
    Trace t = run(sc);
    const std::string path = "/tmp/twostep_replay_test.trace";
    {
        std::ofstream out(path, std::ios::binary);
        out << t.to_text();
    }
    ReplayResult r = replay_file(path);
    CHECK(r.ok);
    CHECK(!replay_file("/tmp/twostep_no_such_file.trace").ok);
}

TEST_CASE("scenario text round-trips") {
    Config cfg = cfg_of(5, 2, 2, Variant::object, {Value::of(0), Value::of(1)});
    Scenario sc = make_splice_schedule(cfg, {{1, 2}, {3, 4, 5}}, {2, 2}, {4, 5}, 99);
    sc.object_calls = {{0, 1, Value::of(1)}, {15, 3, Value::of(0)}};
    sc.pregst_leader = 4;
    Scenario back = scenario_from_line(to_line(sc));
    CHECK(back == sc);
}

TEST_CASE("scenario files accept comments and key = value lines") {
    const std::string path = "/tmp/twostep_scenario_test.conf";
    {
        std::ofstream out(path);
        out << "# demo scenario\n";
        out << "variant = task\n";
        out << "n = 3\ne = 1\nf = 1\n";
        out << "kind = sync\n";
        out << "crashes = p3@0\n";
        out << "props = p1:1,p2:2\n";
        out << "order = p2\n";
        out << "horizon = 60\n";
    }
    Scenario sc = scenario_from_file(path);
    sc.validate();
    Trace t = run(sc);
    CHECK(t.first_decisions().count(2));
}

TEST_CASE("make_sync_schedule rejects a favored faulty process, allows E to be empty") {
    Config cfg = cfg_of(3, 1, 1, Variant::task);
    CHECK_THROWS_AS(make_sync_schedule(cfg, {3}, 3), std::invalid_argument);
    CHECK_THROWS_AS(make_sync_schedule(cfg, {2, 3}, 1), std::invalid_argument); // |E| != e

    Config free = cfg_of(3, 0, 0, Variant::task);
    Scenario sc = make_sync_schedule(free, {}, 1);
    sc.task_proposals = {{1, Value::of(2)}, {2, Value::of(2)}, {3, Value::of(2)}};
    Trace t = run(sc);
    REQUIRE(t.first_decisions().count(1));
    CHECK(t.first_decisions().at(1).first == 2 * free.delta);
}

TEST_CASE("splice schedules: validation and safety at the object bound") {
    Config cfg = cfg_of(5, 2, 2, Variant::object, {Value::of(0), Value::of(1)});
    CHECK_THROWS_AS(make_splice_schedule(cfg, {{1, 2}, {3, 4, 5}}, {2, 2}, {1, 2, 3}, 0),
                    std::invalid_argument); // crash set larger than f
    CHECK_THROWS_AS(make_splice_schedule(cfg, {{1, 2}, {2, 3, 4, 5}}, {2, 2}, {}, 0),
                    std::invalid_argument); // not a partition

    // two-group splice at the object bound: agreement and the slow-path
    // property must hold on the continuation
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Scenario sc = make_splice_schedule(cfg, {{1, 2}, {3, 4, 5}}, {2, 2}, {4, 5}, seed);
        sc.object_calls = {{0, 1, Value::of(1)}, {0, 3, Value::of(0)}};
        Trace t = run(sc);
        validate_trace(t);
        CHECK(check_agreement(t).pass);
        CHECK(check_validity(t, sc).pass);
        CHECK(check_slow_path_safety(t).pass);
    }

    // single group, zero crashes: a plain scripted run
    Scenario plain = make_splice_schedule(cfg, {{1, 2, 3, 4, 5}}, {2}, {}, 1);
    plain.object_calls = {{0, 2, Value::of(1)}};
    Trace t = run(plain);
    CHECK(check_agreement(t).pass);
}

TEST_CASE("a short horizon leaves undelivered messages accounted for") {
    Config cfg = cfg_of(3, 1, 1, Variant::task);
    Scenario sc = make_sync_schedule(cfg, {3}, 2);
    sc.task_proposals = {{1, Value::of(1)}, {2, Value::of(2)}};
    sc.horizon = cfg.delta; // cuts the run before the 2B round lands
    Trace t = run(sc);
    CHECK(t.undelivered_at_horizon > 0);
    CHECK_NOTHROW(validate_trace(t));
}
