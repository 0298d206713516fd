#include <algorithm>
#include <random>

#include "doctest.h"
#include "nets.hpp"
#include "wfs/core.hpp"

using namespace wfs;

TEST_CASE("parse middle net") {
    PetriNet n = parse_net(testnets::middle);
    CHECK(n.num_places() == 4);
    CHECK(n.num_transitions() == 4);
    std::size_t t4 = n.transition("t4");
    CHECK(n.pre[t4] == Bag{{n.place("q1"), 1}, {n.place("q2"), 1}});
    CHECK(n.post[t4] == Bag{{n.place("o"), 2}});
    CHECK(n.initial == n.place("i"));
    CHECK(n.final == n.place("o"));
}

TEST_CASE("parse empty and comments") {
    PetriNet n = parse_net("");
    CHECK(n.num_places() == 0);
    CHECK(n.num_transitions() == 0);
    PetriNet c = parse_net("# nothing\n\n  place a # trailing\ntrans t : a ->\n");
    CHECK(c.num_places() == 1);
    CHECK(c.post[0].empty());
}

TEST_CASE("parse errors") {
    CHECK_THROWS_AS(parse_net("trans t : a -> b\n"), ParseError);
    CHECK_THROWS_AS(parse_net("place a\nplace a\n"), ParseError);
    CHECK_THROWS_AS(parse_net("place a\ntrans a : a -> a\n"), ParseError);
    CHECK_THROWS_AS(parse_net("place a\nplace b\ntrans t : 0*a -> b\n"), ParseError);
    CHECK_THROWS_AS(parse_net("place a\nplace b\ntrans t : x*a -> b\n"), ParseError);
    CHECK_THROWS_AS(parse_net("place a initial\nplace b initial\n"), ParseError);
    CHECK_THROWS_AS(parse_net("place a final\nplace b final\n"), ParseError);
    CHECK_THROWS_AS(parse_net("place a\ntrans t a -> a\n"), ParseError);
    try {
        parse_net("place a\n\ntrans t : a -> zz\n");
        FAIL("expected error");
    } catch (const ParseError& e) {
        CHECK(e.line == 3);
        CHECK(e.col == 16);
    }
}

TEST_CASE("serialize round trip") {
    for (const char* text : {testnets::left, testnets::middle, testnets::right}) {
        PetriNet n = parse_net(text);
        std::string s = serialize_net(n);
        if (text != testnets::right) CHECK(s == text);
        CHECK(parse_net(s) == n);
    }
    CHECK(serialize_net(PetriNet{}).empty());
    PetriNet n = parse_net("place a\nplace b\ntrans t : -> \ntrans u : a -> 2*b\n");
    CHECK(serialize_net(n) == "place a\nplace b\ntrans t : ->\ntrans u : a -> 2*b\n");
    CHECK(parse_net(serialize_net(n)) == n);
}

TEST_CASE("validate workflow on the three example nets") {
    for (const char* text : {testnets::left, testnets::middle, testnets::right})
        CHECK_NOTHROW(parse_workflow(text));
}

TEST_CASE("validate workflow rejects single mutations") {
    auto fault_of = [](const std::string& text) {
        try {
            parse_workflow(text);
        } catch (const WorkflowError& e) {
            return std::make_pair(e.fault, e.element);
        }
        return std::make_pair(WorkflowFault::BadEndpoints, std::string("none"));
    };
    std::string mid = testnets::middle;
    CHECK(fault_of(mid + "place x\n") == std::make_pair(WorkflowFault::NotOnPath, std::string("x")));
    CHECK(fault_of(mid + "trans back : q1 -> i\n") ==
          std::make_pair(WorkflowFault::ProducesIntoInitial, std::string("back")));
    CHECK(fault_of(mid + "trans eat : o -> q1\n") ==
          std::make_pair(WorkflowFault::ConsumesFromFinal, std::string("eat")));
    CHECK(fault_of(mid + "place x\ntrans dead : x -> o\n").second == "x");
    CHECK(fault_of(mid + "trans sink : q1 ->\n") == std::make_pair(WorkflowFault::NotOnPath, std::string("sink")));
}

TEST_CASE("fire and z_fire on the middle net") {
    PetriNet n = parse_net(testnets::middle);
    Marking i1 = make_marking(n, {{"i", 1}});
    CHECK(fire(n, i1, n.transition("t1")) == make_marking(n, {{"q1", 1}}));
    try {
        fire(n, make_marking(n, {{"q1", 1}}), n.transition("t4"));
        FAIL("expected NotEnabled");
    } catch (const NotEnabled& e) {
        CHECK(e.transition == n.transition("t4"));
        CHECK(e.place == n.place("q2"));
    }
    CHECK(fire(n, make_marking(n, {{"q1", 1}, {"q2", 1}}), n.transition("t4")) == make_marking(n, {{"o", 2}}));
    CHECK(z_fire(n, make_marking(n, {{"q1", 1}}), n.transition("t4")) ==
          ZMarking{0, 0, -1, 2});
    CHECK(z_fire(n, i1, n.transition("t1")) == make_marking(n, {{"q1", 1}}));
    PetriNet loop = parse_net("place a\ntrans t : a -> a\n");
    CHECK(z_fire(loop, ZMarking{5}, 0) == ZMarking{5});
}

TEST_CASE("overflow is detected") {
    PetriNet n = parse_net("place a\ntrans t : -> a\n");
    CHECK_THROWS_AS(fire(n, Marking{INT64_MAX}, 0), OverflowError);
}

TEST_CASE("apply_run") {
    PetriNet r = parse_net(testnets::right);
    auto res = apply_run(r, make_marking(r, {{"i", 2}}), parse_run(r, {"u1", "u2", "u4"}), Semantics::N);
    CHECK(res.final == make_marking(r, {{"r2", 2}, {"o", 1}}));
    CHECK(res.trace.size() == 4);
    Marking m = make_marking(r, {{"r1", 3}});
    CHECK(apply_run(r, m, {}, Semantics::N).final == m);

    PetriNet n = parse_net(testnets::middle);
    Run bad = parse_run(n, {"t1", "t4"});
    try {
        apply_run(n, make_marking(n, {{"i", 1}}), bad, Semantics::N);
        FAIL("expected NotEnabledAt");
    } catch (const NotEnabledAt& e) {
        CHECK(e.index == 1);
        CHECK(e.transition == n.transition("t4"));
    }
    CHECK(apply_run(n, make_marking(n, {{"i", 1}}), bad, Semantics::Z).final == ZMarking{0, 0, -1, 2});
}

TEST_CASE("fire agrees with z_fire and Z runs commute") {
    std::mt19937_64 rng(7);
    PetriNet r = parse_net(testnets::right);
    std::uniform_int_distribution<int> tok(0, 2), tr(0, 5);
    for (int it = 0; it < 500; ++it) {
        Marking m(r.num_places());
        for (auto& v : m) v = tok(rng);
        std::size_t t = tr(rng);
        if (enabled(r, m, t)) {
            Marking a = fire(r, m, t);
            CHECK(a == z_fire(r, m, t));
            CHECK(std::all_of(a.begin(), a.end(), [](auto v) { return v >= 0; }));
        }
        Run run(4);
        for (auto& x : run) x = tr(rng);
        auto z1 = apply_run(r, m, run, Semantics::Z).final;
        std::shuffle(run.begin(), run.end(), rng);
        CHECK(apply_run(r, m, run, Semantics::Z).final == z1);
    }
}

TEST_CASE("net metrics") {
    auto m = net_metrics(parse_net(testnets::middle));
    CHECK(m.abs_value == 8);
    CHECK(m.norm == 3);
    CHECK(m.size == 8 * 3);
}
