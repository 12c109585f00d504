#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "iwk1/logk1.hpp"

using namespace iwk1;

namespace {

GroupModel load(const char* name, int level, int N) {
    auto s = load_group_spec(std::string(IWK1_DATA_DIR) + "/" + name);
    s.level = level;
    s.precision = N;
    return GroupModel(s);
}

RingElement random_unit(const std::shared_ptr<const FiniteGroup>& g, const Zmod& ctx, std::mt19937_64& rng) {
    std::uniform_int_distribution<u64> d(0, ctx.modulus() - 1);
    for (;;) {
        RingElement x(g, ctx);
        for (int i = 0; i < x.size(); ++i) x.set(i, d(rng));
        if (x.is_unit()) return x;
    }
}

RingElement random_p_multiple(const std::shared_ptr<const FiniteGroup>& g, const Zmod& ctx, std::mt19937_64& rng) {
    std::uniform_int_distribution<u64> d(0, ctx.modulus() / ctx.p() - 1);
    RingElement x(g, ctx);
    for (int i = 0; i < x.size(); ++i) x.set(i, d(rng) * ctx.p());
    return x;
}

}  // namespace

TEST_CASE("scalar log and exp") {
    auto G = load("E1.grp", 1, 3);
    Zmod ctx(3, 3);
    auto el = [&](const std::string& s) { return parse_element(s, G, ctx); };
    QRing l4 = log_ring(el("4"));
    CHECK(l4.value() == el("21"));

    Zmod c2(3, 2);
    auto e2 = [&](const std::string& s) { return parse_element(s, G, c2); };
    CHECK(log_ring(e2("1 + 3*h@g^0")).value() == e2("3*h@g^0"));
    CHECK(exp_ring(e2("3*h@g^0")) == e2("1 + 3*h@g^0"));
    CHECK_THROWS_AS(exp_ring(e2("h@g^0")), NotInIdeal);
    CHECK_THROWS_AS(log_ring(e2("2")), NotAUnit);
    CHECK(teichmuller(2, Zmod(3, 4)) == 80);
    CHECK(teichmuller(1, Zmod(5, 3)) == 1);
}

TEST_CASE("log of a group element is p-power torsion") {
    auto G = load("E1.grp", 1, 3);
    Zmod ctx(3, 3);
    // h has order 9, so 9 log(h) = log(1)
    QRing lh = log_ring(parse_element("h@g^0", G, ctx), 3);
    QRing nine{lh.num.scaled(9), lh.d};
    CHECK(equal_mod(nine, as_q(RingElement(G.group_ptr(), ctx)), 3));
}

TEST_CASE("exp and log are inverse on p times a commutative ring") {
    auto G = load("E1.grp", 2, 4);
    Zmod ctx(3, 4);
    auto L = G.layer(1, 1);
    std::mt19937_64 rng(11);
    for (int t = 0; t < 15; ++t) {
        RingElement z = random_p_multiple(L->group_ptr(), ctx, rng);
        RingElement ez = exp_ring(z);
        CHECK(log_ring(ez).value() == z);
    }
}

TEST_CASE("integral logarithm examples") {
    auto G = load("E1.grp", 1, 2);
    Zmod ctx(3, 2);
    auto el = [&](const std::string& s) { return parse_element(s, G, ctx); };
    CHECK(integral_log_L(G, el("4")) == to_trace(el("5")));
    CHECK(integral_log_L(G, el("h@g^0")).is_zero());
    CHECK(integral_log_L(G, el("1@g^1")).is_zero());
    // Teichmuller units have trivial L
    // 8 = -1 mod 9, so L(8) is only pinned down mod 3
    CHECK(integral_log_L(G, el("8")).truncate(1).is_zero());
    CHECK(scalar_L(G, teichmuller(2, Zmod(3, 3)), ctx).is_zero());
    CHECK(scalar_L(G, 2, ctx) == to_trace(el("7")));
    CHECK(scalar_L(G, 4, ctx) == to_trace(el("5")).scaled(1));
}

TEST_CASE("integral logarithm is a homomorphism") {
    std::mt19937_64 rng(5);
    for (const char* name : {"E1.grp", "E2.grp"}) {
        auto G = load(name, 1, 3);
        Zmod ctx(3, 3);
        for (int t = 0; t < 6; ++t) {
            RingElement x = random_unit(G.group_ptr(), ctx, rng);
            RingElement y = random_unit(G.group_ptr(), ctx, rng);
            TraceElement lhs = integral_log_L(G, x * y);
            TraceElement rhs = integral_log_L(G, x) + integral_log_L(G, y);
            CHECK(lhs.truncate(2) == rhs.truncate(2));
            // conjugation invariance
            TraceElement lc = integral_log_L(G, x.conjugate(G.index({G.generator(0), 1})));
            CHECK(lc.truncate(2) == integral_log_L(G, x).truncate(2));
        }
    }
}

TEST_CASE("Frobenius integrality") {
    std::mt19937_64 rng(9);
    for (const char* name : {"E1.grp", "E2.grp"}) {
        auto G = load(name, 1, 3);
        Zmod ctx(3, 3);
        for (int t = 0; t < 8; ++t) {
            RingElement x = random_unit(G.group_ptr(), ctx, rng);
            for (int n = 1; n <= 3; ++n) CHECK(frobenius_integrality_check(x, n));
        }
    }
    auto G = load("E1.grp", 1, 2);
    CHECK(frobenius_integrality_check(parse_element("1 + h@g^0 + 1@g^1", G, Zmod(3, 2)), 2));
}

TEST_CASE("layer compatibility of the integral logarithm") {
    std::mt19937_64 rng(21);
    {
        auto G = load("E1.grp", 1, 3);
        Zmod ctx(3, 3);
        REQUIRE(G.is_special_type().special);
        for (int t = 0; t < 5; ++t) {
            RingElement x = random_unit(G.group_ptr(), ctx, rng);
            CHECK(layer_L_compat(G, 1, x, CompatForm::general));
            CHECK(layer_L_compat(G, 1, x, CompatForm::special));
        }
    }
    {
        auto G = load("E2.grp", 1, 3);
        Zmod ctx(3, 3);
        for (int t = 0; t < 3; ++t) {
            RingElement x = random_unit(G.group_ptr(), ctx, rng);
            CHECK(layer_L_compat(G, 1, x, CompatForm::general));
        }
    }
}

TEST_CASE("beta of log(1+y) against log of theta") {
    std::mt19937_64 rng(4);
    auto G = load("E1.grp", 1, 3);
    Zmod ctx(3, 3);
    for (int t = 0; t < 5; ++t) {
        RingElement y = random_p_multiple(G.group_ptr(), ctx, rng);
        RingElement x = RingElement::one(G.group_ptr(), ctx) + y;
        QTrace lg = log_to_trace(x);
        for (int i = 0; i <= G.e(); ++i) {
            QRing lhs{beta(G, i, lg.num), lg.d};
            QRing rhs = log_ring(theta(G, i, x));
            CHECK(equal_mod(lhs, rhs, 2));
        }
    }
}
