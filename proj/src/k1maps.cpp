#include "iwk1/k1maps.hpp"

#include <set>

namespace iwk1 {

namespace {

i64 mod_pos(i64 a, i64 m) {
    i64 r = a % m;
    return r < 0 ? r + m : r;
}

void require_layer(const RingElement& x, const AbelianLayer& L, const char* what) {
    if (x.group().signature() != L.group().signature())
        throw ModelMismatch(std::string(what) + ": element is not on " + L.group().signature());
}

RingMatrix zero_matrix(std::size_t n, const std::shared_ptr<const FiniteGroup>& g, const Zmod& ctx) {
    return RingMatrix(n, std::vector<RingElement>(n, RingElement(g, ctx)));
}

// Right multiplication by x (on layer (j,j)) over the subring H_j x Gamma^(i),
// basis g^(p^j k) for k < p^(i-j).
RingMatrix layer_norm_matrix(const GroupModel& model, int j, int i, const RingElement& x) {
    auto src = model.layer(j, j);
    auto dst = model.layer(j, i);
    require_layer(x, *src, "norm");
    const u64 p = model.p();
    const std::size_t n = ipow(p, i - j);
    const i64 full = static_cast<i64>(model.gamma_size());
    const i64 pj = static_cast<i64>(ipow(p, j)), pi = static_cast<i64>(ipow(p, i));
    RingMatrix M = zero_matrix(n, dst->group_ptr(), x.ctx());
    for (int g = 0; g < x.size(); ++g) {
        const u64 c = x.coeff(g);
        if (!c) continue;
        auto [hq, a] = src->decode(g);
        for (std::size_t k = 0; k < n; ++k) {
            const i64 s = mod_pos(a + pj * static_cast<i64>(k), full);
            const i64 l = s % pi;
            M[k][static_cast<std::size_t>(l / pj)].add_to(dst->index(hq, s - l), c);
        }
    }
    return M;
}

}  // namespace

RingElement determinant(const RingMatrix& M) {
    const std::size_t n = M.size();
    if (n == 0) throw std::invalid_argument("empty matrix");
    const RingElement& proto = M[0][0];
    const RingElement one = RingElement::one(proto.group_ptr(), proto.ctx());
    const RingElement zero(proto.group_ptr(), proto.ctx());
    // coefficients of det(tI - A_r), highest degree first
    std::vector<RingElement> C{one, -M[0][0]};
    for (std::size_t r = 1; r < n; ++r) {
        std::vector<RingElement> T;
        T.reserve(r + 2);
        T.push_back(one);
        T.push_back(-M[r][r]);
        std::vector<RingElement> v(r, zero);
        for (std::size_t a = 0; a < r; ++a) v[a] = M[a][r];
        for (std::size_t step = 0; step < r; ++step) {
            RingElement dot = zero;
            for (std::size_t a = 0; a < r; ++a) dot = dot + M[r][a] * v[a];
            T.push_back(-dot);
            if (step + 1 < r) {
                std::vector<RingElement> w(r, zero);
                for (std::size_t a = 0; a < r; ++a)
                    for (std::size_t b = 0; b < r; ++b) w[a] = w[a] + M[a][b] * v[b];
                v = std::move(w);
            }
        }
        std::vector<RingElement> next(r + 2, zero);
        for (std::size_t k = 0; k < r + 2; ++k)
            for (std::size_t m = 0; m <= std::min(k, r); ++m) next[k] = next[k] + T[k - m] * C[m];
        C = std::move(next);
    }
    return (n % 2 == 0) ? C[n] : -C[n];
}

RingMatrix theta_matrix(const GroupModel& model, int i, const RingElement& x) {
    if (x.group().signature() != model.group().signature()) throw ModelMismatch("theta expects an element of G");
    auto L = model.layer(i, i);
    const std::size_t n = ipow(model.p(), i);
    const i64 full = static_cast<i64>(model.gamma_size());
    const i64 pi = static_cast<i64>(n);
    RingMatrix M = zero_matrix(n, L->group_ptr(), x.ctx());
    for (int g = 0; g < x.size(); ++g) {
        const u64 c = x.coeff(g);
        if (!c) continue;
        GroupElement el = model.element(g);
        for (std::size_t k = 0; k < n; ++k) {
            // g^k (h g^a) = (A^k h) g^(k+a) = [(A^k h) g^(s-l)] g^l
            const i64 s = mod_pos(static_cast<i64>(k) + el.a, full);
            const i64 l = s % pi;
            M[k][static_cast<std::size_t>(l)].add_to(L->index_from_h(model.act(el.h, static_cast<i64>(k)), s - l), c);
        }
    }
    return M;
}

RingElement theta_determinant(const GroupModel& model, int i, const RingElement& x) {
    return determinant(theta_matrix(model, i, x));
}

RingElement theta(const GroupModel& model, int i, const RingElement& x) {
    if (!x.is_unit()) throw NotAUnit("theta needs a unit");
    return theta_determinant(model, i, x);
}

LayerTuple theta_tuple(const GroupModel& model, const RingElement& x) {
    LayerTuple t;
    t.flavor = LayerTuple::Flavor::multiplicative;
    for (int i = 0; i <= model.e(); ++i) t.x.push_back(theta(model, i, x));
    return t;
}

RingElement abelianize(const GroupModel& model, const RingElement& x) {
    auto L = model.layer(0, 0);
    RingElement r(L->group_ptr(), x.ctx());
    for (int g = 0; g < x.size(); ++g) {
        if (!x.coeff(g)) continue;
        GroupElement el = model.element(g);
        r.add_to(L->index_from_h(el.h, el.a), x.coeff(g));
    }
    return r;
}

RingElement beta(const GroupModel& model, int i, const TraceElement& t) {
    if (t.group().signature() != model.group().signature()) throw ModelMismatch("beta expects a trace element of G");
    auto L = model.layer(i, i);
    RingElement r(L->group_ptr(), t.ctx());
    const i64 pi = static_cast<i64>(ipow(model.p(), i));
    const auto& cls = model.group().classes();
    for (std::size_t c = 0; c < cls.size(); ++c) {
        const u64 coeff = t.coeff(static_cast<int>(c));
        if (!coeff) continue;
        GroupElement rep = model.element(cls[c].front());
        if (rep.a % pi != 0) continue;
        for (i64 k = 0; k < pi; ++k) r.add_to(L->index_from_h(model.act(rep.h, k), rep.a), coeff);
    }
    return r;
}

LayerTuple beta_tuple(const GroupModel& model, const TraceElement& t) {
    LayerTuple out;
    out.flavor = LayerTuple::Flavor::additive;
    for (int i = 0; i <= model.e(); ++i) out.x.push_back(beta(model, i, t));
    return out;
}

TraceElement tau(const GroupModel& model, const LayerTuple& tuple) {
    const int e = model.e();
    if (static_cast<int>(tuple.x.size()) != e + 1) throw std::invalid_argument("tuple must have e+1 entries");
    for (int i = 0; i <= e; ++i) {
        require_layer(tuple.x[static_cast<std::size_t>(i)], *model.layer(i, i), "tau");
        if (!in_layer_ideal(model, i, tuple.x[static_cast<std::size_t>(i)], LayerIdeal::trace))
            throw NotInPsi("entry " + std::to_string(i) + " is not in the trace ideal T_" + std::to_string(i));
    }
    const Zmod in_ctx = tuple.x[0].ctx();
    const int N = in_ctx.N();
    if (N <= e) throw PrecisionExhausted("tau needs precision above e");
    Zmod out_ctx(model.p(), N - e);
    TraceElement out(model.group_ptr(), out_ctx);
    const auto& cls = model.group().classes();
    for (std::size_t c = 0; c < cls.size(); ++c) {
        GroupElement rep = model.element(cls[c].front());
        const int i = model.stratum(rep.a);
        const auto& x = tuple.x[static_cast<std::size_t>(i)];
        auto L = model.layer(i, i);
        std::set<int> orbit;
        for (i64 k = 0; k < static_cast<i64>(ipow(model.p(), i)); ++k)
            orbit.insert(L->index_from_h(model.act(rep.h, k), rep.a));
        u64 sum = 0;
        for (int b : orbit) sum = x.ctx().add(sum, x.coeff(b));
        if (sum != 0 && x.ctx().val(sum) < i)
            throw InexactDivision("class sum on stratum " + std::to_string(i) + " is not divisible by p^" +
                                  std::to_string(i));
        out.set(static_cast<int>(c), (sum / ipow(model.p(), i)) % out_ctx.modulus());
    }
    return out;
}

RingElement tr_map(const GroupModel& model, int j, int i, const RingElement& x) {
    if (j > i) throw std::invalid_argument("tr_map needs j <= i");
    RingMatrix M = layer_norm_matrix(model, j, i, x);
    RingElement s = M[0][0];
    for (std::size_t k = 1; k < M.size(); ++k) s = s + M[k][k];
    return s;
}

RingElement pi_map(const GroupModel& model, int i, int j, const RingElement& x) {
    if (j > i) throw std::invalid_argument("pi_map needs j <= i");
    auto src = model.layer(i, i);
    auto dst = model.layer(j, i);
    require_layer(x, *src, "pi");
    RingElement r(dst->group_ptr(), x.ctx());
    for (int g = 0; g < x.size(); ++g) {
        if (!x.coeff(g)) continue;
        auto [hq, a] = src->decode(g);
        r.add_to(dst->index_from_h(src->lift(hq), a), x.coeff(g));
    }
    return r;
}

RingElement norm_determinant(const GroupModel& model, int j, int i, const RingElement& x) {
    if (j > i) throw std::invalid_argument("norm needs j <= i");
    return determinant(layer_norm_matrix(model, j, i, x));
}

RingElement norm_Nr(const GroupModel& model, int j, int i, const RingElement& x) {
    if (!x.is_unit()) throw NotAUnit("norm needs a unit");
    return norm_determinant(model, j, i, x);
}

int omega_exponent(const GroupModel& model, int i, int layer_index) {
    auto L = model.layer(i - 1, i - 1);
    const i64 a = L->decode(layer_index).second;
    const i64 step = static_cast<i64>(ipow(model.p(), i - 1));
    return static_cast<int>((a / step) % static_cast<i64>(model.p()));
}

namespace {

// Elements of R[zeta_p] on the basis 1, zeta, ..., zeta^(p-2).
struct CycloRingElement {
    std::vector<RingElement> c;
};

CycloRingElement cyclo_mul(const CycloRingElement& x, const CycloRingElement& y, u64 p) {
    const std::size_t d = p - 1;
    const RingElement zero(x.c[0].group_ptr(), x.c[0].ctx());
    std::vector<RingElement> full(2 * d - 1, zero);
    for (std::size_t a = 0; a < d; ++a) {
        if (x.c[a].is_zero()) continue;
        for (std::size_t b = 0; b < d; ++b)
            if (!y.c[b].is_zero()) full[a + b] = full[a + b] + x.c[a] * y.c[b];
    }
    // zeta^e for e >= p-1: zeta^(p-1) = -(1 + ... + zeta^(p-2)), zeta^p = 1
    CycloRingElement out{std::vector<RingElement>(d, zero)};
    for (std::size_t e = 0; e < full.size(); ++e) {
        if (full[e].is_zero()) continue;
        const std::size_t r = e % p;
        if (r < d) {
            out.c[r] = out.c[r] + full[e];
        } else {
            for (std::size_t t = 0; t < d; ++t) out.c[t] = out.c[t] - full[e];
        }
    }
    return out;
}

}  // namespace

RingElement omega_twist_product(const GroupModel& model, int i, const RingElement& x, int which) {
    if (i < 1) throw std::invalid_argument("omega twist needs i >= 1");
    if (which % static_cast<int>(model.p()) == 0) throw std::invalid_argument("omega power must be prime to p");
    auto L = model.layer(i - 1, i - 1);
    require_layer(x, *L, "omega twist");
    const u64 p = model.p();
    const std::size_t d = p - 1;
    const RingElement zero(x.group_ptr(), x.ctx());
    CycloRingElement acc{std::vector<RingElement>(d, zero)};
    acc.c[0] = RingElement::one(x.group_ptr(), x.ctx());
    for (u64 k = 0; k < p; ++k) {
        CycloRingElement tw{std::vector<RingElement>(d, zero)};
        for (int g = 0; g < x.size(); ++g) {
            const u64 c = x.coeff(g);
            if (!c) continue;
            const std::size_t e = (k * static_cast<u64>(mod_pos(which, static_cast<i64>(p))) *
                                   static_cast<u64>(omega_exponent(model, i, g))) % p;
            if (e < d) {
                tw.c[e].add_to(g, c);
            } else {
                for (std::size_t t = 0; t < d; ++t) tw.c[t].add_to(g, x.ctx().neg(c));
            }
        }
        acc = cyclo_mul(acc, tw, p);
    }
    for (std::size_t t = 1; t < d; ++t)
        if (!acc.c[t].is_zero()) throw DescentFailure("twisted product keeps a zeta^" + std::to_string(t) + " coordinate");
    return acc.c[0];
}

RingElement ver_ring(const GroupModel& model, int i, const RingElement& x) {
    auto src = model.layer(i - 1, i - 1);
    auto dst = model.layer(i, i);
    require_layer(x, *src, "ver");
    RingElement r(dst->group_ptr(), x.ctx());
    for (int g = 0; g < x.size(); ++g)
        if (x.coeff(g)) r.add_to(model.transfer_ver(i, g), x.coeff(g));
    return r;
}

RingElement phi_ring(const RingElement& x) {
    RingElement r(x.group_ptr(), x.ctx());
    const u64 p = x.ctx().p();
    for (int g = 0; g < x.size(); ++g)
        if (x.coeff(g)) r.add_to(x.group().pow(g, p), x.coeff(g));
    return r;
}

TraceElement phi_trace(const TraceElement& t) {
    TraceElement r(t.group_ptr(), t.ctx());
    const u64 p = t.ctx().p();
    const auto& cls = t.group().classes();
    std::vector<u64> acc(cls.size(), 0);
    for (std::size_t c = 0; c < cls.size(); ++c) {
        const u64 v = t.coeff(static_cast<int>(c));
        if (!v) continue;
        auto& slot = acc[static_cast<std::size_t>(t.group().class_of(t.group().pow(cls[c].front(), p)))];
        slot = t.ctx().add(slot, v);
    }
    for (std::size_t c = 0; c < acc.size(); ++c) r.set(static_cast<int>(c), acc[c]);
    return r;
}

namespace {

void check_levels(const GroupModel& lower, const GroupModel& upper) {
    if (lower.p() != upper.p() || lower.orders() != upper.orders() || lower.spec().action != upper.spec().action)
        throw ModelMismatch("projection between different groups");
    if (lower.level() > upper.level()) throw ModelMismatch("projection must go to a lower level");
}

}  // namespace

RingElement project_level(const GroupModel& lower, const GroupModel& upper, const RingElement& x) {
    check_levels(lower, upper);
    if (x.group().signature() != upper.group().signature()) throw ModelMismatch("element is not on the upper quotient");
    RingElement r(lower.group_ptr(), x.ctx());
    for (int g = 0; g < x.size(); ++g)
        if (x.coeff(g)) r.add_to(lower.index(lower.normalize(upper.element(g))), x.coeff(g));
    return r;
}

RingElement project_layer_level(const GroupModel& lower, const GroupModel& upper, int i, const RingElement& x) {
    check_levels(lower, upper);
    const auto up = upper.layer(i, i);
    const auto lo = lower.layer(i, i);
    if (x.group().signature() != up->group().signature()) throw ModelMismatch("element is not on the upper layer");
    RingElement r(lo->group_ptr(), x.ctx());
    for (int g = 0; g < x.size(); ++g) {
        if (!x.coeff(g)) continue;
        const auto [hq, a] = up->decode(g);
        r.add_to(lo->index_from_h(up->lift(hq), a), x.coeff(g));
    }
    return r;
}

TraceElement project_trace_level(const GroupModel& lower, const GroupModel& upper, const TraceElement& t) {
    check_levels(lower, upper);
    if (t.group().signature() != upper.group().signature()) throw ModelMismatch("element is not on the upper quotient");
    const auto& cls = t.group().classes();
    std::vector<u64> acc(static_cast<std::size_t>(lower.group().class_count()), 0);
    for (std::size_t c = 0; c < cls.size(); ++c) {
        const u64 v = t.coeff(static_cast<int>(c));
        if (!v) continue;
        const int img = lower.index(lower.normalize(upper.element(cls[c].front())));
        auto& slot = acc[static_cast<std::size_t>(lower.group().class_of(img))];
        slot = t.ctx().add(slot, v);
    }
    TraceElement r(lower.group_ptr(), t.ctx());
    for (std::size_t c = 0; c < acc.size(); ++c) r.set(static_cast<int>(c), acc[c]);
    return r;
}

}  // namespace iwk1
