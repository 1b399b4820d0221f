#include "twostep/checker.hpp"

#include <doctest.h>

using namespace twostep;

namespace {

Config cfg_of(int n, int e, int f, Variant variant) {
    Config c;
    c.n = n;
    c.e = e;
    c.f = f;
    c.variant = variant;
    c.value_domain = {Value::of(0), Value::of(1)};
    return c;
}

TraceEvent decision(Time t, ProcessId p, Value v) {
    TraceEvent e;
    e.t = t;
    e.kind = EventKind::decision;
    e.from = p;
    e.value = v;
    return e;
}

Trace fabricated(const Scenario& sc, std::vector<TraceEvent> events) {
    Trace t;
    t.scenario = sc;
    t.events = std::move(events);
    return t;
}

Scenario tiny_scenario() {
    Scenario sc;
    sc.cfg = cfg_of(3, 1, 1, Variant::task);
    sc.kind = ScheduleKind::synchronous;
    sc.task_proposals = {{1, Value::of(1)}, {2, Value::of(0)}, {3, Value::of(1)}};
    return sc;
}

} // namespace

TEST_CASE("agreement: equal decisions pass, differing ones fail, none is vacuous") {
    Scenario sc = tiny_scenario();
    CHECK(check_agreement(fabricated(sc, {decision(10, 1, Value::of(0)),
                                          decision(20, 2, Value::of(0))}))
              .pass);
    Verdict bad = check_agreement(
        fabricated(sc, {decision(10, 1, Value::of(0)), decision(20, 2, Value::of(1))}));
    CHECK(!bad.pass);
    CHECK(!bad.witness.empty());
    CHECK(check_agreement(fabricated(sc, {})).pass);
}

TEST_CASE("validity: decisions must be proposals that entered the system") {
    Scenario sc = tiny_scenario();
    CHECK(check_validity(fabricated(sc, {decision(10, 1, Value::of(1))}), sc).pass);
    CHECK(!check_validity(fabricated(sc, {decision(10, 1, Value::of(9))}), sc).pass);
    // a proposal behind a time-0 crash never entered the system
    Scenario crashed = sc;
    crashed.crash_plan = {{0, 2}};
    TraceEvent crash_ev;
    crash_ev.kind = EventKind::crashed;
    crash_ev.from = 2;
    Trace t = fabricated(crashed, {crash_ev, decision(10, 1, Value::of(0))});
    CHECK(!check_validity(t, crashed).pass);

    Scenario object;
    object.cfg = cfg_of(3, 1, 1, Variant::object);
    CHECK(check_validity(fabricated(object, {}), object).pass); // nothing proposed, nothing decided
}

TEST_CASE("termination: all correct processes decide by the bound") {
    Config cfg = cfg_of(3, 1, 1, Variant::task);
    Scenario sc = make_sync_schedule(cfg, {3}, 2);
    sc.task_proposals = {{1, Value::of(0)}, {2, Value::of(1)}};
    Trace t = run(sc);
    CHECK(!check_termination(t, cfg, 2 * cfg.delta).pass); // p1 only learns at 3*delta
    CHECK(check_termination(t, cfg, 3 * cfg.delta).pass);  // decision plus one Decide delay
    CHECK_THROWS_AS(check_termination(t, cfg, 100 * cfg.delta), std::invalid_argument);
}

TEST_CASE("slow-path safety scan flags contradicting 2As") {
    Scenario sc = tiny_scenario();
    auto sent = [](Time t, ProcessId from, ProcessId to, Message m) {
        TraceEvent e;
        e.t = t;
        e.kind = EventKind::sent;
        e.from = from;
        e.to = to;
        e.msg = m;
        return e;
    };
    // two processes vote (1, v=0); n-f = 2 reached; a later 2A(2, v=1) contradicts
    Trace bad = fabricated(sc, {sent(10, 1, 2, TwoB{1, Value::of(0)}),
                                sent(10, 3, 2, TwoB{1, Value::of(0)}),
                                sent(20, 2, 1, TwoA{2, Value::of(1)})});
    CHECK(!check_slow_path_safety(bad).pass);
    Trace good = fabricated(sc, {sent(10, 1, 2, TwoB{1, Value::of(0)}),
                                 sent(10, 3, 2, TwoB{1, Value::of(0)}),
                                 sent(20, 2, 1, TwoA{2, Value::of(0)})});
    CHECK(check_slow_path_safety(good).pass);
}

TEST_CASE("two-step checker: task at the smallest bound") {
    Verdict v = check_two_step_task(cfg_of(3, 1, 1, Variant::task));
    CHECK(v.pass);
    CHECK(v.stats["failure_sets"] == 3);
    CHECK(v.stats["item1_cases"] == 12); // C(3,1) * 2^2
    CHECK(v.stats["item2_cases"] == 12); // 3 subsets * 2 values * 2 correct
}

TEST_CASE("two-step checker: the favored-first construction agrees with the exhaustive "
          "order search") {
    TwoStepOptions exhaustive;
    exhaustive.exhaustive_orders = true;
    Verdict a = check_two_step_task(cfg_of(3, 1, 1, Variant::task));
    Verdict b = check_two_step_task(cfg_of(3, 1, 1, Variant::task), exhaustive);
    CHECK(a.pass == b.pass);
}

TEST_CASE("two-step checker: object at the smallest bound") {
    Verdict v = check_two_step_object(cfg_of(3, 1, 1, Variant::object));
    CHECK(v.pass);
    CHECK(v.stats["item1_cases"] == 3 * 2 * 2);
}

TEST_CASE("recovery oracle passes at the bounds and finds tightness counterexamples") {
    CHECK(recovery_oracle(cfg_of(3, 1, 1, Variant::task)).pass);
    CHECK(recovery_oracle(cfg_of(3, 1, 1, Variant::object)).pass);

    Verdict below_task = recovery_oracle(cfg_of(5, 2, 2, Variant::task));
    CHECK(!below_task.pass);
    CHECK(!below_task.witness.empty());

    Verdict below_object = recovery_oracle(cfg_of(4, 2, 2, Variant::object));
    CHECK(!below_object.pass);

    CHECK(recovery_oracle(cfg_of(6, 2, 2, Variant::task)).pass);
    CHECK(recovery_oracle(cfg_of(5, 2, 2, Variant::object)).pass);
}

TEST_CASE("fuzz: clean configurations stay clean over a few hundred seeds") {
    FuzzOptions opts;
    opts.num_seeds = 300;
    Verdict task = fuzz(cfg_of(6, 2, 2, Variant::task), opts);
    CHECK(task.pass);
    CHECK(task.stats["runs"] == 300);
    Verdict object = fuzz(cfg_of(5, 2, 2, Variant::object), opts);
    CHECK(object.pass);
}

TEST_CASE("fuzz: the dropped guard is caught and the witness replays to a violation") {
    FuzzOptions opts;
    opts.num_seeds = 1000;
    opts.mutation = Mutation::drop_fast_own_support_guard;
    opts.require_termination = false;
    Verdict v = fuzz(cfg_of(3, 1, 1, Variant::task), opts);
    REQUIRE(!v.pass);
    CHECK(v.stats.count("first_failing_seed"));
    // witness soundness: replaying the scenario reproduces the failure
    Scenario witness = scenario_from_line(v.witness);
    Trace t = run(witness);
    bool reproduced = !check_agreement(t).pass || !check_validity(t, witness).pass ||
                      !check_slow_path_safety(t).pass;
    CHECK(reproduced);
}

TEST_CASE("verdict records are one line per property") {
    Verdict v;
    v.property = "agreement";
    v.stats["runs"] = 3;
    CHECK(v.to_string() == "verdict property=agreement pass=1 runs=3");
    v.pass = false;
    v.witness = "variant=task n=3";
    CHECK(v.to_string().find("witness=\"variant=task n=3\"") != std::string::npos);
    CHECK(summarize({v}).find("[FAIL] agreement") != std::string::npos);
}
