#include "twostep/model.hpp"

#include <doctest.h>

#include <stdexcept>

using namespace twostep;

TEST_CASE("process bounds match the task and object formulas") {
    CHECK(required_n(2, 2, Variant::task) == 6);
    CHECK(required_n(2, 2, Variant::object) == 5);
    CHECK(required_n(1, 1, Variant::task) == 3);
    CHECK(required_n(1, 3, Variant::object) == 7); // 2f+1 dominates
    CHECK_THROWS_AS(required_n(3, 2, Variant::task), std::invalid_argument);
    CHECK_THROWS_AS(required_n(0, 1, Variant::task), std::invalid_argument);
}

TEST_CASE("task bound exceeds object bound exactly when the fast term dominates") {
    for (int e = 1; e <= 4; ++e) {
        for (int f = e; f <= 4; ++f) {
            const int task = required_n(e, f, Variant::task);
            const int object = required_n(e, f, Variant::object);
            if (2 * e + f >= 2 * f + 2)
                CHECK(task == object + 1);
            else {
                CHECK(task == 2 * f + 1);
                CHECK(object == 2 * f + 1);
            }
        }
    }
}

TEST_CASE("value order is total and Bottom sorts below everything") {
    std::vector<Value> domain = {Value::bottom(), Value::of(0), Value::of(1), Value::of(2)};
    for (Value a : domain) {
        for (Value b : domain) {
            const int rels = (a < b) + (a == b) + (b < a);
            CHECK(rels == 1);
        }
        if (!a.is_bottom())
            CHECK(Value::bottom() < a);
    }
    // antisymmetry and transitivity on the sorted domain
    for (std::size_t i = 0; i < domain.size(); ++i)
        for (std::size_t j = i + 1; j < domain.size(); ++j) {
            CHECK(domain[i] < domain[j]);
            CHECK(!(domain[j] < domain[i]));
        }
}

TEST_CASE("slow ballots are owned round-robin") {
    CHECK(ballot_owner(1, 3) == 1);
    CHECK(ballot_owner(2, 3) == 2);
    CHECK(ballot_owner(3, 3) == 3);
    CHECK(ballot_owner(4, 3) == 1);
    for (int n = 1; n <= 8; ++n)
        for (Ballot b = 1; b <= 3 * n; ++b)
            CHECK((ballot_owner(b, n) - b) % n == 0);
    CHECK_THROWS_AS(ballot_owner(0, 3), std::invalid_argument);
}

TEST_CASE("config validation enforces the bound unless overridden") {
    Config cfg;
    cfg.n = 5;
    cfg.e = 2;
    cfg.f = 2;
    cfg.variant = Variant::task;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    CHECK_NOTHROW(cfg.validate(true));
    cfg.variant = Variant::object;
    CHECK_NOTHROW(cfg.validate()); // 5 meets the object bound

    Config bad;
    bad.value_domain = {Value::of(1), Value::of(1)};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad.value_domain = {Value::bottom()};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("message encoding is canonical and stable") {
    CHECK(to_string(Message{ProposeMsg{Value::of(1), 1}}) == "Propose(v=1,from=p1)");
    CHECK(to_string(Message{OneA{2}}) == "1A(b=2)");
    OneB b;
    b.ballot = 2;
    b.vbal = 0;
    b.val = Value::of(5);
    b.val_proposer = 3;
    b.initial = Value::of(2);
    CHECK(to_string(Message{b}) == "1B(b=2,vbal=0,val=5,prop=p3,dec=-,init=2)");
    OneB empty;
    empty.ballot = 7;
    CHECK(to_string(Message{empty}) == "1B(b=7,vbal=0,val=-,prop=-,dec=-,init=bot)");
    CHECK(to_string(Message{TwoA{1, Value::of(6)}}) == "2A(b=1,v=6)");
    CHECK(to_string(Message{TwoB{0, Value::of(2)}}) == "2B(b=0,v=2)");
    CHECK(to_string(Message{DecideMsg{Value::of(4)}}) == "Decide(v=4)");
    CHECK(to_string(Value::bottom()) == "bot");
    CHECK(value_from_string("bot").is_bottom());
    CHECK(value_from_string("17") == Value::of(17));
}
