#include <doctest.h>

#include <algorithm>

#include "support.hpp"
#include "tasksyn/error.hpp"

using namespace testsupport;

namespace {

std::set<std::string> keys(const std::vector<Code>& codes) {
    std::set<std::string> out;
    for (const auto& c : codes) out.insert(code_key(c));
    return out;
}

bool contains(const std::vector<Code>& codes, const Code& c) {
    return std::any_of(codes.begin(), codes.end(), [&](const Code& m) { return m == c; });
}

}  // namespace

TEST_CASE("sketch layout") {
    Sketch one = build_sketch(code_of("def Run(){ move }"), 2);
    REQUIRE(one.seqs.size() == 1);
    CHECK(one.seqs[0].slots.size() == 5);
    CHECK(one.seqs[0].originals() == 1);
    CHECK(one.seqs[0].site_capacity(0) == 2);
    CHECK(one.seqs[0].site_capacity(1) == 2);

    Sketch h5 = build_sketch(ref_code("H5"), 2);
    REQUIRE(h5.seqs.size() == 3);
    CHECK(h5.seqs[0].originals() == 0);
    CHECK(h5.seqs[0].slots.size() == 2);
    CHECK(h5.seqs[1].ref_actions() == std::vector<Action>{Action::Move});
    CHECK(h5.seqs[2].ref_actions() == std::vector<Action>{Action::TurnLeft});
    CHECK(h5.conds.size() == 1);
    CHECK(h5.iters.empty());

    Sketch k10 = build_sketch(ref_code("K10"), 2);
    REQUIRE(k10.seqs.size() == 3);
    CHECK(k10.seqs[1].originals() == 5);
    CHECK(k10.seqs[1].slots.size() == 2 + 5 + 4 + 2);
    CHECK(k10.seqs[2].originals() == 0);

    Sketch gap = build_sketch(code_of("def Run(){ move turnLeft move }"), 2);
    CHECK(gap.seqs[0].site_count() == 4);
    CHECK(gap.seqs[0].site_capacity(1) == 1);
    CHECK(gap.seqs[0].site_capacity(3) == 2);
}

TEST_CASE("condition groups and iteration domains") {
    auto g = condition_group(Condition::PathLeft, Dialect::Hoc);
    CHECK(std::find(g.begin(), g.end(), Condition::PathRight) != g.end());
    CHECK(std::find(g.begin(), g.end(), Condition::PathLeft) != g.end());
    CHECK(std::find(g.begin(), g.end(), Condition::PathAhead) == g.end());
    auto m = condition_group(Condition::NoMarker, Dialect::Karel);
    CHECK(std::find(m.begin(), m.end(), Condition::Marker) != m.end());
    CHECK(iter_domain(5, 1) == std::vector<int>{4, 5, 6});
    CHECK(iter_domain(2, 1) == std::vector<int>{2, 3});
    CHECK(iter_domain(10, 2) == std::vector<int>{8, 9, 10});
    CHECK(iter_domain(4, 0) == std::vector<int>{4});
}

TEST_CASE("elimination sequences") {
    using A = Action;
    CHECK(contains_elimination({A::TurnLeft, A::TurnRight}, Dialect::Hoc));
    CHECK(contains_elimination({A::Move, A::TurnRight, A::TurnLeft}, Dialect::Hoc));
    CHECK(contains_elimination({A::TurnLeft, A::TurnLeft, A::TurnLeft}, Dialect::Hoc));
    CHECK_FALSE(contains_elimination({A::Move, A::TurnLeft, A::Move, A::TurnRight}, Dialect::Hoc));
    CHECK(contains_elimination({A::PutMarker, A::PickMarker}, Dialect::Karel));
    CHECK(contains_elimination({A::PickMarker, A::PutMarker}, Dialect::Karel));
    CHECK_FALSE(contains_elimination({A::PickMarker, A::Move, A::PutMarker}, Dialect::Karel));
}

TEST_CASE("body rules") {
    using A = Action;
    CHECK(body_rule_holds(Condition::PathLeft, {A::TurnLeft, A::Move}));
    CHECK_FALSE(body_rule_holds(Condition::PathLeft, {A::Move, A::TurnLeft}));
    CHECK_FALSE(body_rule_holds(Condition::PathLeft, {A::TurnRight}));
    CHECK(body_rule_holds(Condition::PathAhead, {A::Move, A::TurnLeft}));
    CHECK_FALSE(body_rule_holds(Condition::PathAhead, {A::TurnLeft, A::Move}));
    CHECK(body_rule_holds(Condition::NoMarker, {A::PutMarker}));
    CHECK_FALSE(body_rule_holds(Condition::NoMarker, {A::PickMarker}));
    CHECK(body_rule_holds(Condition::Marker, {A::Move, A::PickMarker}));
}

TEST_CASE("stage counts: pinned values") {
    SynthesisParams p;
    struct Row {
        const char* id;
        std::uint64_t d0, d01, all;
    };
    // 0 leaves a column unpinned.
    const Row rows[] = {{"H1", 3159, 112, 64}, {"H5", 0, 294, 66},  {"H6", 1728, 294, 54}, {"K7", 96875, 150, 122},
                        {"H3", 0, 13122, 0},   {"H4", 0, 152, 108}, {"K9", 0, 60768, 0},  {"K10", 0, 19328, 0}};
    for (const auto& r : rows) {
        auto k = stage_counts(build_sketch(ref_code(r.id), p.deltaSize), p);
        if (r.d0) CHECK_MESSAGE(k.d0 == r.d0, r.id);
        CHECK_MESSAGE(k.d01 == r.d01, r.id);
        if (r.all) CHECK_MESSAGE(k.all == r.all, r.id);
    }
}

TEST_CASE("stage counts shrink monotonically") {
    SynthesisParams p;
    for (const auto& id : kRefIds) {
        auto k = stage_counts(build_sketch(ref_code(id), p.deltaSize), p);
        CHECK_MESSAGE(k.d0 >= k.d01, id);
        CHECK_MESSAGE(k.d01 >= k.all, id);
        CHECK_MESSAGE(k.all > 0, id);
    }
}

TEST_CASE("counts agree with materialized enumeration") {
    SynthesisParams p;
    for (const char* id : {"H1", "H2", "H5", "H6", "K7"}) {
        Sketch sk = build_sketch(ref_code(id), p.deltaSize);
        auto k = stage_counts(sk, p);
        CHECK_MESSAGE(enumerate_mutations(sk, p, Stage::All).size() == k.all, id);
        CHECK_MESSAGE(enumerate_mutations(sk, p, Stage::D01).size() == k.d01, id);
        if (k.d0 < 200000) CHECK_MESSAGE(enumerate_mutations(sk, p, Stage::D0).size() == k.d0, id);
    }
}

TEST_CASE("degenerate empty sketch") {
    SynthesisParams p;
    p.deltaSize = 0;
    Sketch sk = build_sketch(make_code(Dialect::Hoc, {}), 0);
    auto k = stage_counts(sk, p);
    CHECK(k.d0 == 1);
    CHECK(k.d01 == 1);
    CHECK(k.all == 1);
}

TEST_CASE("a lone turn with no size budget") {
    SynthesisParams p;
    p.deltaSize = 0;
    auto muts = enumerate_mutations(build_sketch(code_of("def Run(){ turnLeft }"), 0), p);
    CHECK(keys(muts) == std::set<std::string>{code_key(code_of("def Run(){ turnLeft }")),
                                              code_key(code_of("def Run(){ turnRight }"))});
}

TEST_CASE("exemplar outputs and the identity are members of the final set") {
    SynthesisParams p;
    for (const auto& id : kRefIds) {
        Code cin = ref_code(id);
        auto muts = enumerate_mutations(build_sketch(cin, p.deltaSize), p);
        CHECK_MESSAGE(contains(muts, cin), id);
        if (id != "H4") CHECK_MESSAGE(contains(muts, exemplar(id)), id);
    }
}

TEST_CASE("every emitted mutation satisfies the invariants") {
    SynthesisParams p;
    for (const auto& id : kRefIds) {
        Code cin = ref_code(id);
        Sketch sk = build_sketch(cin, p.deltaSize);
        auto muts = enumerate_mutations(sk, p);
        for (const auto& m : muts) {
            validate_code(m);
            REQUIRE(struct_equal(m, cin));
            CHECK(code_size(m) >= code_size(cin));
            CHECK(code_size(m) <= code_size(cin) + p.deltaSize);
            CHECK(check_constraints(m, sk, p).all());
        }
        auto again = enumerate_mutations(sk, p);
        CHECK(again.size() == muts.size());
        CHECK(std::equal(again.begin(), again.end(), muts.begin()));
    }
}

TEST_CASE("check_constraints names the failing family") {
    SynthesisParams p;
    Code cin = ref_code("H5");
    Sketch sk = build_sketch(cin, p.deltaSize);
    auto r = check_constraints(code_of("def Run(){ RepeatUntil(goal){ move turnLeft turnRight If(pathLeft){ turnLeft } } }"),
                               sk, p);
    CHECK_FALSE(r.d6);
    CHECK(r.first_failure() == "d6");
    r = check_constraints(code_of("def Run(){ RepeatUntil(goal){ move If(pathAhead){ turnLeft } } }"), sk, p);
    CHECK_FALSE(r.d4);
    r = check_constraints(code_of("def Run(){ RepeatUntil(goal){ move If(pathLeft){ turnLeft } } }"), sk, p);
    CHECK(r.all());
    CHECK(r.first_failure().empty());
    r = check_constraints(code_of("def Run(){ RepeatUntil(goal){ move move move move If(pathLeft){ turnLeft } } }"),
                          sk, p);
    CHECK_FALSE(r.d0);
    CHECK_THROWS_AS(check_constraints(code_of("def Run(){ RepeatUntil(goal){ move } }"), sk, p), ValidationError);

    Code h2 = ref_code("H2");
    Sketch s2 = build_sketch(h2, p.deltaSize);
    CHECK_FALSE(check_constraints(code_of("def Run(){ turnRight Repeat(7){ move } }"), s2, p).d2);
    CHECK(check_constraints(code_of("def Run(){ turnRight Repeat(6){ move } }"), s2, p).all());
}

TEST_CASE("enumerator matches the brute-force oracle on small codes") {
    std::mt19937_64 rng(2024);
    SynthesisParams p;
    int checked = 0;
    for (int i = 0; checked < 12 && i < 200; ++i) {
        Dialect d = i % 3 == 2 ? Dialect::Karel : Dialect::Hoc;
        Code c = CodeGen(rng, d, 3).make(1 + int(rng() % 3));
        if (code_size(c) > 3) continue;
        Sketch sk = build_sketch(c, p.deltaSize);
        auto fast = keys(enumerate_mutations(sk, p));
        auto slow = brute_mutations(sk, p);
        CHECK_MESSAGE(fast == slow, code_key(c));
        ++checked;
    }
    CHECK(checked == 12);
}

TEST_CASE("trailing turn rule is switchable") {
    SynthesisParams p;
    Sketch sk = build_sketch(ref_code("H1"), p.deltaSize);
    auto with = enumerate_mutations(sk, p);
    p.trimTrailingTurns = false;
    auto without = enumerate_mutations(sk, p);
    CHECK(with.size() == 64);
    CHECK(without.size() == 88);
    for (const auto& c : with) CHECK(contains(without, c));
}
