#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>

#include "iwk1/groupmodel.hpp"

using namespace iwk1;

static GroupModel e1(int level = 1) {
    auto s = load_group_spec(IWK1_DATA_DIR "/E1.grp");
    s.level = level;
    return GroupModel(s);
}

TEST_CASE("spec text round trip") {
    auto s = load_group_spec(IWK1_DATA_DIR "/E1.grp");
    CHECK(s.p == 3);
    CHECK(s.orders == std::vector<u64>{9});
    auto text = serialize_group_spec(s);
    CHECK(parse_group_spec(text) == s);
    CHECK(serialize_group_spec(parse_group_spec(text)) == text);
    CHECK_THROWS_AS(parse_group_spec("p=3\ne=1\norders=9\naction=4\nlevel=1\nprecision=2\ncolour=red\n"), ParseError);
    CHECK_THROWS_AS(parse_group_spec("p=3\ne=1\n"), ParseError);
}

TEST_CASE("validation rejects bad actions") {
    GroupSpec s = load_group_spec(IWK1_DATA_DIR "/E1.grp");
    s.action = {3};  // not invertible
    CHECK_THROWS_AS(GroupModel{s}, InvalidAction);
    s.action = {2};  // order 6
    CHECK_THROWS_AS(GroupModel{s}, InvalidAction);
    s.action = {4};
    s.e = 2;  // order of 4 mod 9 is 3
    CHECK_THROWS_AS(GroupModel{s}, InvalidAction);
    s.e = 1;
    s.level = 0;
    CHECK_THROWS_AS(GroupModel{s}, LevelTooSmall);
    s.level = 1;
    s.orders = {6};
    CHECK_THROWS_AS(GroupModel{s}, InvalidAction);
}

TEST_CASE("E1 at level 1: class sizes") {
    auto G = e1(1);
    CHECK(G.group().order() == 27);
    auto cl = G.conjugacy_classes();
    CHECK(cl.size() == 11);
    int ones = 0, threes = 0;
    for (const auto& c : cl) {
        if (c.members.size() == 1) ++ones;
        if (c.members.size() == 3) ++threes;
    }
    CHECK(ones == 3);
    CHECK(threes == 8);
}

TEST_CASE("orbit classes agree with the coset criterion") {
    for (int level : {1, 2}) {
        auto G = e1(level);
        auto a = G.conjugacy_classes(), b = G.conjugacy_classes_by_criterion();
        std::set<std::vector<GroupElement>> sa, sb;
        for (auto& c : a) sa.insert(c.members);
        for (auto& c : b) sb.insert(c.members);
        CHECK(sa == sb);
    }
    GroupModel E2(load_group_spec(IWK1_DATA_DIR "/E2.grp"));
    auto a = E2.conjugacy_classes(), b = E2.conjugacy_classes_by_criterion();
    std::set<std::vector<GroupElement>> sa, sb;
    for (auto& c : a) sa.insert(c.members);
    for (auto& c : b) sb.insert(c.members);
    CHECK(sa == sb);
}

TEST_CASE("abelian layers") {
    auto G = e1(2);
    auto L0 = G.layer(0, 0), L1 = G.layer(1, 1);
    CHECK(L0->orders() == std::vector<u64>{3});
    CHECK(L1->orders() == std::vector<u64>{9});
    CHECK(L0->group().order() == 27);
    CHECK(L1->group().order() == 27);
    CHECK(L0->group().is_abelian());
    GroupModel E2(load_group_spec(IWK1_DATA_DIR "/E2.grp"));
    CHECK(E2.layer(0, 0)->h_size() == 3);
    // projection is a homomorphism killing the commutator subgroup
    for (u64 k : G.commutator_subgroup(0)) {
        auto img = L0->project(G.h_at(k));
        CHECK(img == IntVec{0});
    }
}

TEST_CASE("transfer is well defined and a homomorphism") {
    auto G = e1(2);
    G.check_transfer_well_defined(1);
    auto L0 = G.layer(0, 0);
    const auto& g0 = L0->group();
    const auto& g1 = G.layer(1, 1)->group();
    for (int x = 0; x < g0.order(); ++x)
        for (int y = 0; y < g0.order(); ++y)
            CHECK(G.transfer_ver(1, g0.mul(x, y)) == g1.mul(G.transfer_ver(1, x), G.transfer_ver(1, y)));
}

TEST_CASE("special type") {
    CHECK(e1(1).is_special_type().special);
    GroupModel E2(load_group_spec(IWK1_DATA_DIR "/E2.grp"));
    auto r = E2.is_special_type();
    CHECK_FALSE(r.special);
    REQUIRE(r.witness.has_value());
    CHECK(r.witness->first == 2);
    CHECK(r.witness->second == 0);
}

TEST_CASE("radical nilpotency of a cyclic p-group") {
    // F_3[Z/9] has radical (x-1) with nilpotency 9
    GroupSpec s;
    s.p = 3; s.e = 0; s.orders = {}; s.action = {}; s.level = 2; s.precision = 2;
    GroupModel G(s);
    CHECK(G.group().radical_nilpotency() == 9);
    // (Z/3)^2: (x-1)^2 (y-1)^2 is the last nonzero power, m = 5
    GroupSpec t;
    t.p = 3; t.e = 0; t.orders = {3}; t.action = {1}; t.level = 1; t.precision = 2;
    CHECK(GroupModel(t).group().radical_nilpotency() == 5);
}
