#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "iwk1/k1maps.hpp"

using namespace iwk1;

namespace {

GroupModel e1(int level, int N) {
    auto s = load_group_spec(IWK1_DATA_DIR "/E1.grp");
    s.level = level;
    s.precision = N;
    return GroupModel(s);
}

GroupModel e2(int level, int N) {
    auto s = load_group_spec(IWK1_DATA_DIR "/E2.grp");
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

RingElement random_unit(const std::shared_ptr<const FiniteGroup>& g, const Zmod& ctx, std::mt19937_64& rng) {
    for (;;) {
        auto x = random_element(g, ctx, rng);
        if (x.is_unit()) return x;
    }
}

TraceElement random_trace(const GroupModel& G, const Zmod& ctx, std::mt19937_64& rng) {
    TraceElement t(G.group_ptr(), ctx);
    std::uniform_int_distribution<u64> d(0, ctx.modulus() - 1);
    for (int c = 0; c < G.group().class_count(); ++c) t.set(c, d(rng));
    return t;
}

TraceElement class_of_text(const GroupModel& G, const std::string& s, const Zmod& ctx) {
    return to_trace(parse_element(s, G, ctx));
}

}  // namespace

TEST_CASE("determinant") {
    auto G = e1(1, 3);
    Zmod ctx(3, 3);
    auto L = G.layer(1, 1);
    auto el = [&](const std::string& s) { return parse_layer_element(s, G, *L, ctx); };
    RingMatrix M{{el("2"), el("1")}, {el("h"), el("3")}};
    CHECK(determinant(M) == el("6 - h"));
    RingMatrix P{{el("0"), el("1"), el("0")}, {el("0"), el("0"), el("1")}, {el("1@g^3"), el("0"), el("0")}};
    CHECK(determinant(P) == el("1@g^3"));
}

TEST_CASE("theta examples") {
    auto G = e1(2, 3);
    Zmod ctx(3, 3);
    auto L0 = G.layer(0, 0), L1 = G.layer(1, 1);
    auto h = parse_element("h", G, ctx), g = parse_element("1@g^1", G, ctx);
    CHECK(theta(G, 0, h) == parse_layer_element("h", G, *L0, ctx));
    CHECK(theta(G, 1, h) == parse_layer_element("h^3", G, *L1, ctx));
    CHECK(theta(G, 1, g) == parse_layer_element("1@g^3", G, *L1, ctx));
    CHECK_THROWS_AS(theta(G, 1, parse_element("1 - h", G, ctx)), NotAUnit);
}

TEST_CASE("beta and tau examples") {
    auto G = e1(2, 4);
    Zmod ctx(3, 4);
    auto L0 = G.layer(0, 0), L1 = G.layer(1, 1);
    CHECK(beta(G, 1, class_of_text(G, "h@g^1", ctx)).is_zero());
    CHECK(beta(G, 1, class_of_text(G, "h", ctx)) == parse_layer_element("h + h^4 + h^7", G, *L1, ctx));
    CHECK(beta(G, 0, class_of_text(G, "h", ctx)) == parse_layer_element("h", G, *L0, ctx));
    auto t = class_of_text(G, "h", ctx);
    CHECK(tau(G, beta_tuple(G, t)) == t.truncate(3));
    LayerTuple bad{LayerTuple::Flavor::additive, {parse_layer_element("h", G, *L0, ctx), parse_layer_element("h", G, *L1, ctx)}};
    CHECK_THROWS_AS(tau(G, bad), NotInPsi);
    LayerTuple zero{LayerTuple::Flavor::additive, {RingElement(L0->group_ptr(), ctx), RingElement(L1->group_ptr(), ctx)}};
    CHECK(tau(G, zero).is_zero());
}

TEST_CASE("tau inverts beta") {
    std::mt19937_64 rng(1);
    for (auto G : {e1(2, 4), e2(2, 3)}) {
        Zmod ctx(3, G.precision());
        for (int n = 0; n < 25; ++n) {
            auto t = random_trace(G, ctx, rng);
            CHECK(tau(G, beta_tuple(G, t)) == t.truncate(G.precision() - G.e()));
        }
    }
}

TEST_CASE("tr, pi and Nr") {
    auto G = e1(2, 3);
    Zmod ctx(3, 3);
    auto L0 = G.layer(0, 0), L1 = G.layer(1, 1), L01 = G.layer(0, 1);
    auto hb = parse_layer_element("h", G, *L0, ctx);
    CHECK(tr_map(G, 0, 1, hb) == parse_layer_element("3*h", G, *L01, ctx));
    CHECK(pi_map(G, 1, 0, parse_layer_element("h + h^4 + h^7", G, *L1, ctx)) == parse_layer_element("3*h", G, *L01, ctx));
    CHECK(tr_map(G, 0, 0, hb) == hb);
    CHECK(tr_map(G, 0, 1, RingElement::one(L0->group_ptr(), ctx)) == parse_layer_element("3", G, *L01, ctx));
    CHECK(tr_map(G, 0, 1, parse_layer_element("1@g^1", G, *L0, ctx)).is_zero());
    CHECK(norm_Nr(G, 0, 1, RingElement::one(L0->group_ptr(), ctx)) == RingElement::one(L01->group_ptr(), ctx));
    CHECK(norm_Nr(G, 0, 1, hb) == RingElement::one(L01->group_ptr(), ctx));
    CHECK(norm_Nr(G, 0, 1, parse_layer_element("1@g^1", G, *L0, ctx)) == parse_layer_element("1@g^3", G, *L01, ctx));
}

TEST_CASE("omega twist, ver and phi") {
    auto G = e1(2, 3);
    Zmod ctx(3, 3);
    auto L0 = G.layer(0, 0), L1 = G.layer(1, 1);
    auto one0 = RingElement::one(L0->group_ptr(), ctx);
    CHECK(omega_twist_product(G, 1, one0) == one0);
    CHECK(omega_twist_product(G, 1, parse_layer_element("h", G, *L0, ctx)) == parse_layer_element("h^3", G, *L0, ctx));
    CHECK(omega_twist_product(G, 1, parse_layer_element("1@g^1", G, *L0, ctx)) == parse_layer_element("1@g^3", G, *L0, ctx));
    CHECK(ver_ring(G, 1, parse_layer_element("h + 1@g^1", G, *L0, ctx)) == parse_layer_element("h^3 + 1@g^3", G, *L1, ctx));
    CHECK(ver_ring(G, 1, one0) == RingElement::one(L1->group_ptr(), ctx));
    CHECK(phi_ring(parse_element("h + 1@g^1", G, ctx)) == parse_element("h^3 + 1@g^3", G, ctx));

    // the product does not depend on the chosen character
    std::mt19937_64 rng(3);
    for (int n = 0; n < 10; ++n) {
        auto x = random_element(L0->group_ptr(), ctx, rng);
        CHECK(omega_twist_product(G, 1, x, 1) == omega_twist_product(G, 1, x, 2));
    }
}

TEST_CASE("theta is multiplicative") {
    std::mt19937_64 rng(9);
    for (auto G : {e1(2, 3), e2(1, 2)}) {
        Zmod ctx(3, G.precision());
        for (int n = 0; n < 10; ++n) {
            auto x = random_unit(G.group_ptr(), ctx, rng), y = random_unit(G.group_ptr(), ctx, rng);
            for (int i = 0; i <= G.e(); ++i) CHECK(theta(G, i, x * y) == theta(G, i, x) * theta(G, i, y));
        }
    }
}

TEST_CASE("beta compatibilities on class generators") {
    for (auto G : {e1(2, 3), e2(2, 2)}) {
        Zmod ctx(3, G.precision());
        const bool special = G.is_special_type().special;
        for (int c = 0; c < G.group().class_count(); ++c) {
            TraceElement t(G.group_ptr(), ctx);
            t.set(c, 1);
            // tr o beta_j = pi o beta_i
            for (int i = 0; i <= G.e(); ++i)
                for (int j = 0; j <= i; ++j)
                    CHECK(tr_map(G, j, i, beta(G, j, t)) == pi_map(G, i, j, beta(G, i, t)));
            for (int i = 1; i <= G.e(); ++i) {
                auto L = G.layer(i - 1, i - 1);
                auto b_prev = beta(G, i - 1, t);
                // sum_k omega^k-twist of b_prev keeps p times the omega-trivial part
                RingElement twisted_sum(L->group_ptr(), ctx);
                for (int g = 0; g < b_prev.size(); ++g)
                    if (omega_exponent(G, i, g) == 0) twisted_sum.add_to(g, ctx.mul(3, b_prev.coeff(g)));
                auto lhs = beta(G, i, phi_trace(t)) - phi_ring(beta(G, i, t));
                auto rhs = ver_ring(G, i, b_prev.scaled(3) - twisted_sum);
                CHECK(lhs == rhs);
                if (special) CHECK(beta(G, i, phi_trace(t)) == ver_ring(G, i, b_prev).scaled(3));
            }
        }
    }
}

TEST_CASE("theta and beta commute with lowering the level") {
    std::mt19937_64 rng(31);
    for (int j = 1; j <= 2; ++j)
        for (auto make : {e1, e2}) {
            auto hi = make(j + 1, 2);
            auto lo = make(j, 2);
            Zmod ctx(3, 2);
            for (int t = 0; t < 3; ++t) {
                auto x = random_unit(hi.group_ptr(), ctx, rng);
                auto xl = project_level(lo, hi, x);
                auto tr = random_trace(hi, ctx, rng);
                auto trl = project_trace_level(lo, hi, tr);
                for (int i = 0; i <= hi.e(); ++i) {
                    CHECK(project_layer_level(lo, hi, i, theta(hi, i, x)) == theta(lo, i, xl));
                    CHECK(project_layer_level(lo, hi, i, beta(hi, i, tr)) == beta(lo, i, trl));
                }
            }
        }
    CHECK_THROWS_AS(project_level(e1(2, 2), e1(1, 2), RingElement::one(e1(1, 2).group_ptr(), Zmod(3, 2))), ModelMismatch);
}
