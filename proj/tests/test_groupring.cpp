#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "iwk1/groupring.hpp"

using namespace iwk1;

namespace {

GroupModel e1(int level, int N) {
    auto s = load_group_spec(IWK1_DATA_DIR "/E1.grp");
    s.level = level;
    s.precision = N;
    return GroupModel(s);
}

RingElement random_element(const std::shared_ptr<const FiniteGroup>& g, const Zmod& ctx, std::mt19937_64& rng) {
    RingElement x(g, ctx);
    std::uniform_int_distribution<u64> d(0, ctx.modulus() - 1);
    for (int i = 0; i < x.size(); ++i) x.set(i, d(rng));
    return x;
}

}  // namespace

TEST_CASE("ring arithmetic examples") {
    auto G = e1(1, 2);
    Zmod ctx(3, 2);
    auto g = parse_element("1@g^1", G, ctx);
    auto h = parse_element("h^1@g^0", G, ctx);
    CHECK(g * h == parse_element("h^4@g^1", G, ctx));
    auto lhs = (RingElement::one(G.group_ptr(), ctx) + h) * (RingElement::one(G.group_ptr(), ctx) + g);
    CHECK(lhs == parse_element("1 + 1@g^1 + h + h@g^1", G, ctx));
    CHECK(h * RingElement::one(G.group_ptr(), ctx) == h);
}

TEST_CASE("parse and format") {
    auto G = e1(2, 3);
    Zmod ctx(3, 3);
    auto x = parse_element("2*h^13@g^10 - h^-1 + 5", G, ctx);
    CHECK(format_element(x, G) == "5@g^0 + 26*h^8@g^0 + 2*h^4@g^1");
    CHECK(parse_element(format_element(x, G), G, ctx) == x);
    CHECK(format_element(RingElement(G.group_ptr(), ctx), G) == "0");
    CHECK_THROWS_AS(parse_element("2*k^1@g^0", G, ctx), ParseError);
    CHECK_THROWS_AS(parse_element("2*h^1@q^0", G, ctx), ParseError);
    GroupModel E2(load_group_spec(IWK1_DATA_DIR "/E2.grp"));
    auto y = parse_element("h1^1.h3^2@g^0 + 2", E2, Zmod(3, 3));
    CHECK(format_element(y, E2) == "2@g^0 + h1^1.h3^2@g^0");
}

TEST_CASE("inversion") {
    auto G = e1(1, 2);
    Zmod ctx(3, 2);
    CHECK(RingElement::scalar(G.group_ptr(), ctx, 2).inverse() == RingElement::scalar(G.group_ptr(), ctx, 5));
    auto x = parse_element("1 + 3*h", G, ctx);
    CHECK(x.inverse() == parse_element("1 - 3*h", G, ctx));
    CHECK_THROWS_AS(parse_element("1 - h", G, ctx).inverse(), NotAUnit);

    std::mt19937_64 rng(7);
    auto G2 = e1(2, 4);
    Zmod c4(3, 4);
    int done = 0;
    while (done < 30) {
        auto u = random_element(G2.group_ptr(), c4, rng);
        if (!u.is_unit()) continue;
        auto v = u.inverse();
        CHECK(u * v == RingElement::one(G2.group_ptr(), c4));
        CHECK(v * u == RingElement::one(G2.group_ptr(), c4));
        CHECK(v.inverse() == u);
        ++done;
    }
}

TEST_CASE("mixed precision truncates and records it") {
    auto G = e1(1, 3);
    auto a = parse_element("10*h", G, Zmod(3, 3));
    auto b = parse_element("1", G, Zmod(3, 2));
    auto c = a + b;
    CHECK(c.precision() == 2);
    CHECK(c.ledger().size() == 1);
    CHECK(c == parse_element("1 + h", G, Zmod(3, 2)));
}

TEST_CASE("model mismatch") {
    auto G = e1(1, 2);
    GroupModel E2(load_group_spec(IWK1_DATA_DIR "/E2.grp"));
    Zmod ctx(3, 2);
    CHECK_THROWS_AS(RingElement::one(G.group_ptr(), ctx) + RingElement::one(E2.group_ptr(), ctx), ModelMismatch);
}

TEST_CASE("trace quotient") {
    auto G = e1(1, 2);
    Zmod ctx(3, 2);
    auto h4 = to_trace(parse_element("h^4", G, ctx));
    auto h1 = to_trace(parse_element("h", G, ctx));
    CHECK(h4 == h1);
    CHECK(to_trace(parse_element("h@g^1", G, ctx) - parse_element("1@g^1", G, ctx) * parse_element("h", G, ctx)).is_zero());
    auto one = to_trace(RingElement::one(G.group_ptr(), ctx));
    CHECK(one.coeff(G.group().class_of(G.group().identity())) == 1);

    std::mt19937_64 rng(11);
    for (int t = 0; t < 20; ++t) {
        auto x = random_element(G.group_ptr(), ctx, rng), y = random_element(G.group_ptr(), ctx, rng);
        CHECK(to_trace(x * y) == to_trace(y * x));
    }
}

TEST_CASE("crossed product agrees with plain group multiplication") {
    // exhaustive on basis pairs of the order-27 quotient at N = 1
    auto G = e1(1, 1);
    Zmod ctx(3, 1);
    for (int a = 0; a < G.group().order(); ++a)
        for (int b = 0; b < G.group().order(); ++b) {
            auto prod = RingElement::basis(G.group_ptr(), ctx, a) * RingElement::basis(G.group_ptr(), ctx, b);
            auto expect = G.index(G.multiply(G.element(a), G.element(b)));
            CHECK(prod == RingElement::basis(G.group_ptr(), ctx, expect));
        }
}

TEST_CASE("trace ideal membership") {
    auto G = e1(2, 3);
    Zmod ctx(3, 3);
    auto L1 = G.layer(1, 1);
    auto x = parse_layer_element("h + h^4 + h^7", G, *L1, ctx);
    auto m = layer_ideal_membership(G, 1, x, LayerIdeal::trace);
    CHECK(m.member);
    REQUIRE(m.witness.has_value());
    CHECK(trace_orbit_sum(G, 1, *m.witness) == x);
    CHECK_FALSE(in_layer_ideal(G, 1, parse_layer_element("h^3 - 1", G, *L1, ctx), LayerIdeal::trace));
    CHECK(in_layer_ideal(G, 1, RingElement(L1->group_ptr(), ctx), LayerIdeal::trace));
    CHECK_FALSE(in_layer_ideal(G, 1, parse_layer_element("h", G, *L1, ctx), LayerIdeal::trace));
    // h^3 is gamma-fixed: its orbit sum is 3 h^3
    CHECK(in_layer_ideal(G, 1, parse_layer_element("3*h^3", G, *L1, ctx), LayerIdeal::trace));
    CHECK(in_layer_ideal(G, 1, parse_layer_element("3*h^3", G, *L1, ctx), LayerIdeal::d_plus_p));
    CHECK(in_layer_ideal(G, 1, parse_layer_element("3*h + 3*h^4 + 3*h^7", G, *L1, ctx), LayerIdeal::p_trace));
    CHECK_FALSE(in_layer_ideal(G, 1, x, LayerIdeal::p_trace));

    // witnesses produce gamma-invariant members
    std::mt19937_64 rng(5);
    for (int t = 0; t < 20; ++t) {
        auto z = random_element(L1->group_ptr(), ctx, rng);
        auto s = trace_orbit_sum(G, 1, z);
        CHECK(layer_gamma_conjugate(*L1, s, 1) == s);
        auto w = layer_ideal_membership(G, 1, s, LayerIdeal::trace);
        REQUIRE(w.member);
        CHECK(trace_orbit_sum(G, 1, *w.witness) == s);
    }
}

TEST_CASE("fractions") {
    auto G = e1(2, 3);
    Zmod ctx(3, 3);
    auto h = parse_element("h", G, ctx);
    auto t = parse_element("1 - 1@g^3", G, ctx);
    auto t_unit = parse_element("2 - 1@g^3", G, ctx);
    CHECK(FractionElement::whole(G, h) == FractionElement::whole(G, h));
    CHECK(FractionElement(G, t_unit * h, t_unit) == FractionElement::whole(G, h));
    CHECK(FractionElement(G, t * h, t_unit) == FractionElement(G, t * h, t_unit));
    CHECK_THROWS_AS(FractionElement(G, h, RingElement::scalar(G.group_ptr(), ctx, 3)), BadDenominator);
    CHECK_THROWS_AS(FractionElement(G, h, parse_element("1@g^1", G, ctx)), BadDenominator);
    auto sum = FractionElement::whole(G, h) + FractionElement(G, h, t_unit);
    CHECK(sum == FractionElement(G, h * t_unit + h, t_unit));
}
