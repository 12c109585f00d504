#include "iwk1/phipsi.hpp"

#include <algorithm>
#include <fstream>
#include <optional>
#include <sstream>

#include "iwk1/linalg.hpp"

namespace iwk1 {

namespace {

std::string pair_key(const char* name, int j, int i) {
    return std::string(name) + "[" + std::to_string(j) + "," + std::to_string(i) + "]";
}

std::string layer_key(const char* name, int i) { return std::string(name) + "[" + std::to_string(i) + "]"; }

void require_shape(const GroupModel& model, const std::vector<RingElement>& x, const char* what) {
    if (static_cast<int>(x.size()) != model.e() + 1)
        throw ModelMismatch(std::string(what) + " needs " + std::to_string(model.e() + 1) + " layers");
    for (int i = 0; i <= model.e(); ++i)
        if (x[static_cast<std::size_t>(i)].group().signature() != model.abelianization(i)->group().signature())
            throw ModelMismatch(std::string(what) + ": entry " + std::to_string(i) + " is not on layer " +
                                std::to_string(i));
}

int min_precision(const std::vector<RingElement>& x) {
    int N = x.front().precision();
    for (const auto& v : x) N = std::min(N, v.precision());
    return N;
}

RingElement gamma_conj(const GroupModel& model, int i, const RingElement& x) {
    return layer_gamma_conjugate(*model.abelianization(i), x, 1);
}

}  // namespace

// ------------------------------------------------------------ reports

bool CheckReport::pass() const {
    for (const auto& l : lines)
        if (!l.pass) return false;
    return true;
}

int CheckReport::first_failing_layer() const {
    int best = -1;
    for (const auto& l : lines)
        if (!l.pass && (best < 0 || l.layer < best)) best = l.layer;
    return best;
}

std::string CheckReport::text() const {
    std::ostringstream os;
    for (const auto& l : lines) os << l.key << "=" << (l.pass ? "PASS" : "FAIL") << "\n";
    return os.str();
}

void CheckReport::add(std::string key, int layer, bool ok, std::string detail) {
    lines.push_back(CheckLine{std::move(key), ok, layer, std::move(detail)});
}

// ------------------------------------------------------------ Psi

CheckReport check_psi(const GroupModel& model, const LayerTuple& tuple) {
    require_shape(model, tuple.x, "check_psi");
    const int e = model.e();
    CheckReport rep;
    rep.N = min_precision(tuple.x);
    rep.level = model.level();
    for (int i = 0; i <= e; ++i)
        for (int j = 0; j <= i; ++j) {
            const RingElement lhs = tr_map(model, j, i, tuple.x[static_cast<std::size_t>(j)]);
            const RingElement rhs = pi_map(model, i, j, tuple.x[static_cast<std::size_t>(i)]);
            rep.add(pair_key("A1", j, i), i, lhs == rhs);
        }
    for (int i = 0; i <= e; ++i)
        rep.add(layer_key("A2", i), i, in_layer_ideal(model, i, tuple.x[static_cast<std::size_t>(i)], LayerIdeal::trace));
    return rep;
}

// ------------------------------------------------------------ Phi

CheckReport check_phi(const GroupModel& model, const LayerTuple& tuple, bool use_special) {
    require_shape(model, tuple.x, "check_phi");
    if (use_special && !model.is_special_type().special)
        throw std::invalid_argument("special-type conditions requested for a model that is not of special type");
    const auto& x = tuple.x;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (!x[i].is_unit()) throw NotAUnit("layer " + std::to_string(i) + " entry is not a unit");
    const int e = model.e();
    CheckReport rep;
    rep.N = min_precision(x);
    rep.level = model.level();
    const char* c1 = use_special ? "MS1" : "M1";
    const char* c2 = use_special ? "MS2" : "M2";
    const char* c3 = use_special ? "MS3" : "M3";
    for (int i = 0; i <= e; ++i)
        for (int j = 0; j <= i; ++j) {
            const RingElement lhs = norm_Nr(model, j, i, x[static_cast<std::size_t>(j)]);
            const RingElement rhs = pi_map(model, i, j, x[static_cast<std::size_t>(i)]);
            rep.add(pair_key(c1, j, i), i, lhs == rhs);
        }
    for (int i = 0; i <= e; ++i) {
        const auto& xi = x[static_cast<std::size_t>(i)];
        rep.add(layer_key(c2, i), i, gamma_conj(model, i, xi) == xi);
    }
    for (int i = 1; i <= e; ++i) {
        const auto& xi = x[static_cast<std::size_t>(i)];
        const RingElement diff = xi - ver_ring(model, i, x[static_cast<std::size_t>(i - 1)]);
        rep.add(layer_key(c3, i), i,
                in_layer_ideal(model, i, diff, use_special ? LayerIdeal::trace : LayerIdeal::d_plus_p));
    }
    if (!use_special) {
        for (int i = 1; i <= e; ++i) {
            const auto& xi = x[static_cast<std::size_t>(i)];
            const RingElement E = m4_expression(model, i, xi, x[static_cast<std::size_t>(i - 1)]);
            const RingElement d = E - RingElement::one(E.group_ptr(), E.ctx());
            rep.add(layer_key("M4", i), i, in_layer_ideal(model, i, d, LayerIdeal::p_trace));
        }
    }
    return rep;
}

FractionTuple theta_fraction_tuple(const GroupModel& model, const FractionElement& x) {
    FractionTuple t;
    for (int i = 0; i <= model.e(); ++i) {
        t.num.push_back(theta_determinant(model, i, x.numerator()));
        t.den.push_back(theta_determinant(model, i, x.denominator()));
    }
    return t;
}

CheckReport check_phi_fraction(const GroupModel& model, const FractionTuple& tuple, bool use_special) {
    require_shape(model, tuple.num, "check_phi_fraction");
    require_shape(model, tuple.den, "check_phi_fraction");
    if (use_special && !model.is_special_type().special)
        throw std::invalid_argument("special-type conditions requested for a model that is not of special type");
    const auto& n = tuple.num;
    const auto& d = tuple.den;
    const int e = model.e();
    const u64 p = model.p();
    CheckReport rep;
    rep.N = std::min(min_precision(n), min_precision(d));
    rep.level = model.level();
    const char* c1 = use_special ? "MS1" : "M1";
    const char* c2 = use_special ? "MS2" : "M2";
    const char* c3 = use_special ? "MS3" : "M3";
    auto at = [](const std::vector<RingElement>& v, int i) -> const RingElement& { return v[static_cast<std::size_t>(i)]; };
    for (int i = 0; i <= e; ++i)
        for (int j = 0; j <= i; ++j) {
            const RingElement lhs = norm_determinant(model, j, i, at(n, j)) * pi_map(model, i, j, at(d, i));
            const RingElement rhs = pi_map(model, i, j, at(n, i)) * norm_determinant(model, j, i, at(d, j));
            rep.add(pair_key(c1, j, i), i, lhs == rhs);
        }
    for (int i = 0; i <= e; ++i) {
        const RingElement lhs = gamma_conj(model, i, at(n, i)) * at(d, i);
        const RingElement rhs = at(n, i) * gamma_conj(model, i, at(d, i));
        rep.add(layer_key(c2, i), i, lhs == rhs);
    }
    for (int i = 1; i <= e; ++i) {
        const RingElement diff = at(n, i) * ver_ring(model, i, at(d, i - 1)) - ver_ring(model, i, at(n, i - 1)) * at(d, i);
        rep.add(layer_key(c3, i), i,
                in_layer_ideal(model, i, diff, use_special ? LayerIdeal::trace : LayerIdeal::d_plus_p));
    }
    if (!use_special) {
        for (int i = 1; i <= e; ++i) {
            const RingElement vn = ver_ring(model, i, at(n, i - 1));
            const RingElement vd = ver_ring(model, i, at(d, i - 1));
            const RingElement P = at(n, i).pow(p) * ver_ring(model, i, omega_twist_product(model, i, at(n, i - 1))) *
                                  phi_ring(at(d, i)) * vd.pow(p);
            const RingElement Q = vn.pow(p) * phi_ring(at(n, i)) * at(d, i).pow(p) *
                                  ver_ring(model, i, omega_twist_product(model, i, at(d, i - 1)));
            rep.add(layer_key("M4", i), i, in_layer_ideal(model, i, P - Q, LayerIdeal::p_trace));
        }
    }
    return rep;
}

// ------------------------------------------------------ additive theorem

namespace {

// Wide enough that every coefficient below is an honest small integer.
int exact_digits(u64 p) {
    int w = 1;
    while (ipow(p, w) < (u64{1} << 40)) ++w;
    return w;
}

std::vector<BigInt> to_signed(const Zmod& wide, const ModVec& v) {
    std::vector<BigInt> out;
    out.reserve(v.size());
    const u64 m = wide.modulus();
    for (u64 x : v) out.push_back(x > m / 2 ? BigInt(0) - BigInt(static_cast<unsigned long>(m - x)) : BigInt(static_cast<unsigned long>(x)));
    return out;
}

ModMat reduce_rows(const Zmod& ctx, const IntMat& rows) {
    ModMat out;
    for (const auto& r : rows) {
        ModVec v;
        for (const auto& x : r) v.push_back(ctx.from_big(x));
        out.push_back(std::move(v));
    }
    return out;
}

// Rank and p-adic valuation of the product of elementary divisors of the
// lattice spanned by `rows`.
std::pair<int, int> lattice_invariants(const IntMat& rows, u64 p) {
    if (rows.empty()) return {0, 0};
    const IntSmith s = smith_integer(rows);
    int rank = 0, val = 0;
    for (const auto& d : s.diag) {
        if (d == 0) continue;
        ++rank;
        BigInt q = abs(d);
        while (q % static_cast<unsigned long>(p) == 0) {
            q /= static_cast<unsigned long>(p);
            ++val;
        }
    }
    return {rank, val};
}

// Integer kernel {w : X w = 0} of an r x c matrix, as rows.
IntMat integer_kernel(const IntMat& X, std::size_t cols) {
    IntMat Xt(cols, std::vector<BigInt>(X.size(), BigInt(0)));
    for (std::size_t r = 0; r < X.size(); ++r)
        for (std::size_t c = 0; c < cols; ++c) Xt[c][r] = X[r][c];
    const IntSmith s = smith_integer(Xt);
    IntMat K;
    for (std::size_t t = 0; t < cols; ++t)
        if (s.diag[t] == 0) K.push_back(s.U[t]);
    return K;
}

int nonzero_rows(const ModMat& H) {
    int r = 0;
    for (const auto& row : H)
        if (std::any_of(row.begin(), row.end(), [](u64 v) { return v != 0; })) ++r;
    return r;
}

}  // namespace

AdditiveReport additive_theorem_verify(const GroupModel& model, int max_dim) {
    const int e = model.e();
    const int N = model.precision();
    const u64 p = model.p();
    const Zmod ctx(p, N);
    const Zmod wide(p, exact_digits(p));
    const int classes = model.group().class_count();
    std::vector<int> offset(static_cast<std::size_t>(e + 2), 0);
    for (int i = 0; i <= e; ++i)
        offset[static_cast<std::size_t>(i + 1)] = offset[static_cast<std::size_t>(i)] + model.abelianization(i)->group().order();
    const int total = offset.back();
    if (total > max_dim || classes > max_dim)
        throw TooLarge("additive verification needs " + std::to_string(total) + " x " + std::to_string(classes) +
                       " matrices");

    AdditiveReport rep;

    // tau(beta(t)) = t on the class basis, computed e digits higher so that
    // tau lands back at precision N
    {
        const GroupModel hi = model.at(model.level(), N + e);
        const Zmod hctx(p, N + e);
        bool ok = true;
        for (int c = 0; c < classes && ok; ++c) {
            TraceElement t(hi.group_ptr(), hctx);
            t.set(c, 1);
            ok = tau(hi, beta_tuple(hi, t)) == t.truncate(N);
        }
        rep.tau_beta_identity = ok;
    }

    // beta of each class, as an integer vector
    IntMat beta_rows;
    for (int c = 0; c < classes; ++c) {
        TraceElement t(model.group_ptr(), wide);
        t.set(c, 1);
        ModVec row(static_cast<std::size_t>(total), 0);
        for (int i = 0; i <= e; ++i) {
            const RingElement b = beta(model, i, t);
            std::copy(b.coeffs().begin(), b.coeffs().end(), row.begin() + offset[static_cast<std::size_t>(i)]);
        }
        beta_rows.push_back(to_signed(wide, row));
    }

    // A2 parametrizes a_i = trace(w_i); A1 then becomes linear in w
    IntMat traced;  // one full tuple vector per (i, g)
    std::vector<RingElement> traced_elems;
    std::vector<int> traced_layer;
    for (int i = 0; i <= e; ++i) {
        auto L = model.abelianization(i);
        for (int g = 0; g < L->group().order(); ++g) {
            RingElement z = trace_orbit_sum(model, i, RingElement::basis(L->group_ptr(), wide, g));
            ModVec col(static_cast<std::size_t>(total), 0);
            std::copy(z.coeffs().begin(), z.coeffs().end(), col.begin() + offset[static_cast<std::size_t>(i)]);
            traced.push_back(to_signed(wide, col));
            traced_elems.push_back(std::move(z));
            traced_layer.push_back(i);
        }
    }
    const std::size_t nparams = traced.size();

    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i <= e; ++i)
        for (int j = 0; j < i; ++j) pairs.emplace_back(j, i);
    IntMat C;  // constraint rows in the w coordinates
    for (auto [j, i] : pairs) {
        const int size = model.layer(j, i)->group().order();
        ModMat block(static_cast<std::size_t>(size), ModVec(nparams, 0));
        for (std::size_t col = 0; col < nparams; ++col) {
            const int l = traced_layer[col];
            RingElement v(model.layer(j, i)->group_ptr(), wide);
            if (l == j) v = v + tr_map(model, j, i, traced_elems[col]);
            if (l == i) v = v - pi_map(model, i, j, traced_elems[col]);
            for (int r = 0; r < size; ++r) block[static_cast<std::size_t>(r)][col] = v.coeff(r);
        }
        for (const auto& row : block) C.push_back(to_signed(wide, row));
    }

    auto combine = [&](const std::vector<BigInt>& w) {
        std::vector<BigInt> v(static_cast<std::size_t>(total), BigInt(0));
        for (std::size_t k = 0; k < nparams; ++k)
            if (w[k] != 0)
                for (std::size_t r = 0; r < v.size(); ++r) v[r] += w[k] * traced[k][r];
        return v;
    };

    // Z_p-lattice of solutions, generated by trace(integer kernel)
    IntMat sol_rows;
    if (C.empty()) {
        sol_rows = traced;
    } else {
        for (const auto& w : integer_kernel(C, nparams)) sol_rows.push_back(combine(w));
    }

    IntMat both = beta_rows;
    both.insert(both.end(), sol_rows.begin(), sol_rows.end());
    const auto [rb, vb] = lattice_invariants(beta_rows, p);
    const auto [rs, vs] = lattice_invariants(sol_rows, p);
    const auto [rbs, vbs] = lattice_invariants(both, p);
    rep.beta_rank = rb;
    rep.constraint_rank = rs;
    rep.lattices_equal = rb == rs && rb == rbs && vb == vbs && vs == vbs;

    const ModMat hb = howell_form(ctx, reduce_rows(ctx, beta_rows));
    rep.spaces_equal = hb == howell_form(ctx, reduce_rows(ctx, sol_rows));
    rep.beta_howell_rows = nonzero_rows(hb);

    // every solution of the congruences mod p^N, lifted or not
    if (C.empty()) {
        rep.naive_howell_rows = nonzero_rows(howell_form(ctx, reduce_rows(ctx, traced)));
    } else {
        const SpanSolver solver(ctx, reduce_rows(ctx, C));
        const ModMat tcols = transpose(reduce_rows(ctx, traced));
        ModMat naive;
        for (const auto& w : solver.kernel()) naive.push_back(mat_vec(ctx, tcols, w));
        rep.naive_howell_rows = nonzero_rows(howell_form(ctx, naive));
    }
    return rep;
}

// ------------------------------------------------------------ L : Phi -> Psi

LayerTuple L_phi_to_psi(const GroupModel& model, const LayerTuple& tuple) {
    const CheckReport rep = check_phi(model, tuple, false);
    if (!rep.pass()) throw NotInPhi("tuple fails " + rep.lines[0].key + " or a later condition; first failing layer " +
                                    std::to_string(rep.first_failing_layer()));
    const u64 p = model.p();
    const int N = rep.N;
    LayerTuple out;
    out.flavor = LayerTuple::Flavor::additive;
    auto reduce = [&](const RingElement& E, int i) {
        QRing lg = log_ring(E.truncate(N), N);
        QRing q{lg.num, lg.d + 1};
        q = q.normalized();
        if (q.d > 0) throw IntegralityFailure("log of the layer " + std::to_string(i) + " expression is not divisible by p");
        return q.num.truncate(N - 1);
    };
    const auto& x = tuple.x;
    out.x.push_back(reduce(x[0].pow(p) * phi_ring(x[0]).inverse(), 0));
    for (int i = 1; i <= model.e(); ++i)
        out.x.push_back(reduce(m4_expression(model, i, x[static_cast<std::size_t>(i)], x[static_cast<std::size_t>(i - 1)]), i));
    if (!check_psi(model, out).pass()) throw NotInPsi("image of L fails the additive conditions");
    return out;
}

std::pair<LayerTuple, CheckReport> theta_tuple_and_check(const GroupModel& model, const RingElement& x) {
    if (!x.is_unit()) throw NotAUnit("theta needs a unit");
    LayerTuple t = theta_tuple(model, x);
    CheckReport r = check_phi(model, t, model.is_special_type().special);
    return {std::move(t), std::move(r)};
}

std::pair<FractionTuple, CheckReport> theta_tuple_and_check(const GroupModel& model, const FractionElement& x) {
    FractionTuple t = theta_fraction_tuple(model, x);
    CheckReport r = check_phi_fraction(model, t, model.is_special_type().special);
    return {std::move(t), std::move(r)};
}

// ------------------------------------------------------------ tuple files

LayerTuple parse_tuple(const std::string& text, const GroupModel& model, const Zmod& ctx, LayerTuple::Flavor flavor) {
    const int e = model.e();
    std::vector<std::optional<RingElement>> slots(static_cast<std::size_t>(e + 1));
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        const auto colon = line.find(':');
        std::istringstream head(line.substr(first, colon == std::string::npos ? std::string::npos : colon - first));
        std::string word;
        int i = -1;
        if (colon == std::string::npos || !(head >> word >> i) || word != "layer" || !(head >> std::ws).eof())
            throw ParseError("line " + std::to_string(lineno) + ": expected `layer i: <element>`");
        if (i < 0 || i > e) throw ParseError("line " + std::to_string(lineno) + ": layer index out of range");
        auto& slot = slots[static_cast<std::size_t>(i)];
        if (slot) throw ParseError("line " + std::to_string(lineno) + ": duplicate layer " + std::to_string(i));
        slot = parse_layer_element(line.substr(colon + 1), model, *model.abelianization(i), ctx);
    }
    LayerTuple t;
    t.flavor = flavor;
    for (int i = 0; i <= e; ++i) {
        if (!slots[static_cast<std::size_t>(i)]) throw ParseError("missing layer " + std::to_string(i));
        t.x.push_back(*slots[static_cast<std::size_t>(i)]);
    }
    return t;
}

LayerTuple load_tuple(const std::string& path, const GroupModel& model, const Zmod& ctx, LayerTuple::Flavor flavor) {
    std::ifstream f(path);
    if (!f) throw ParseError("cannot open tuple file " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_tuple(ss.str(), model, ctx, flavor);
}

std::string format_tuple(const LayerTuple& tuple, const GroupModel& model) {
    std::ostringstream os;
    for (std::size_t i = 0; i < tuple.x.size(); ++i)
        os << "layer " << i << ": "
           << format_layer_element(tuple.x[i], model, *model.abelianization(static_cast<int>(i))) << "\n";
    return os.str();
}

}  // namespace iwk1
