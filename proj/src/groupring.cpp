#include "iwk1/groupring.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <mutex>
#include <sstream>

namespace iwk1 {

namespace {

bool same_group(const FiniteGroup& a, const FiniteGroup& b) {
    return &a == &b || a.signature() == b.signature();
}

std::string precision_note(int from, int to) {
    return "truncated p^" + std::to_string(from) + " -> p^" + std::to_string(to);
}

}  // namespace

// ------------------------------------------------------------ RingElement

RingElement::RingElement(std::shared_ptr<const FiniteGroup> group, const Zmod& ctx)
    : group_(std::move(group)), ctx_(ctx), c_(static_cast<std::size_t>(group_->order()), 0) {}

RingElement RingElement::one(std::shared_ptr<const FiniteGroup> group, const Zmod& ctx) {
    const int id = group->identity();
    return basis(std::move(group), ctx, id, 1);
}

RingElement RingElement::basis(std::shared_ptr<const FiniteGroup> group, const Zmod& ctx, int g, u64 coeff) {
    RingElement x(std::move(group), ctx);
    x.set(g, coeff);
    return x;
}

RingElement RingElement::scalar(std::shared_ptr<const FiniteGroup> group, const Zmod& ctx, u64 c) {
    const int id = group->identity();
    return basis(std::move(group), ctx, id, c);
}

void RingElement::check_same_group(const RingElement& o) const {
    if (!same_group(*group_, *o.group_))
        throw ModelMismatch("ring elements over " + group_->signature() + " and " + o.group_->signature());
    if (ctx_.p() != o.ctx_.p()) throw ModelMismatch("coefficient primes differ");
}

std::pair<Zmod, std::vector<std::string>> RingElement::common(const RingElement& o) const {
    check_same_group(o);
    std::vector<std::string> led = ledger_;
    led.insert(led.end(), o.ledger_.begin(), o.ledger_.end());
    if (ctx_.N() == o.ctx_.N()) return {ctx_, led};
    const int lo = std::min(ctx_.N(), o.ctx_.N()), hi = std::max(ctx_.N(), o.ctx_.N());
    led.push_back(precision_note(hi, lo));
    return {Zmod(ctx_.p(), lo), led};
}

bool RingElement::is_zero() const {
    return std::all_of(c_.begin(), c_.end(), [](u64 x) { return x == 0; });
}

u64 RingElement::augmentation() const {
    u64 s = 0;
    for (u64 x : c_) s = ctx_.add(s, x);
    return s;
}

bool RingElement::is_unit() const { return augmentation() % ctx_.p() != 0; }

RingElement RingElement::scaled(u64 c) const {
    RingElement r = *this;
    c %= ctx_.modulus();
    for (auto& x : r.c_) x = ctx_.mul(x, c);
    return r;
}

RingElement RingElement::operator+(const RingElement& o) const {
    auto [ctx, led] = common(o);
    RingElement r(group_, ctx);
    r.ledger_ = std::move(led);
    for (std::size_t i = 0; i < c_.size(); ++i) r.c_[i] = ctx.add(c_[i] % ctx.modulus(), o.c_[i] % ctx.modulus());
    return r;
}

RingElement RingElement::operator-(const RingElement& o) const {
    auto [ctx, led] = common(o);
    RingElement r(group_, ctx);
    r.ledger_ = std::move(led);
    for (std::size_t i = 0; i < c_.size(); ++i) r.c_[i] = ctx.sub(c_[i] % ctx.modulus(), o.c_[i] % ctx.modulus());
    return r;
}

RingElement RingElement::operator-() const {
    RingElement r = *this;
    for (auto& x : r.c_) x = ctx_.neg(x);
    return r;
}

RingElement RingElement::operator*(const RingElement& o) const {
    auto [ctx, led] = common(o);
    RingElement r(group_, ctx);
    r.ledger_ = std::move(led);
    const u64 m = ctx.modulus();
    std::vector<int> lhs, rhs;
    for (int i = 0; i < size(); ++i) {
        if (c_[static_cast<std::size_t>(i)] % m) lhs.push_back(i);
        if (o.c_[static_cast<std::size_t>(i)] % m) rhs.push_back(i);
    }
    std::vector<unsigned __int128> acc(c_.size(), 0);
    for (int a : lhs) {
        const u64 ca = c_[static_cast<std::size_t>(a)] % m;
        for (int b : rhs) {
            auto& slot = acc[static_cast<std::size_t>(group_->mul(a, b))];
            slot += static_cast<unsigned __int128>(ca) * (o.c_[static_cast<std::size_t>(b)] % m);
            if (slot >> 124) slot %= m;
        }
    }
    for (std::size_t i = 0; i < acc.size(); ++i) r.c_[i] = static_cast<u64>(acc[i] % m);
    return r;
}

bool RingElement::operator==(const RingElement& o) const {
    if (!same_group(*group_, *o.group_) || ctx_.p() != o.ctx_.p()) return false;
    const u64 m = std::min(ctx_.modulus(), o.ctx_.modulus());
    for (std::size_t i = 0; i < c_.size(); ++i)
        if (c_[i] % m != o.c_[i] % m) return false;
    return true;
}

RingElement RingElement::pow(u64 e) const {
    RingElement r = one(group_, ctx_), b = *this;
    while (e) {
        if (e & 1) r = r * b;
        e >>= 1;
        if (e) b = b * b;
    }
    return r;
}

RingElement RingElement::inverse() const {
    if (!is_unit()) throw NotAUnit("augmentation is divisible by p");
    const u64 cinv = ctx_.inv(augmentation());
    // x = c (1 - y) with y in the augmentation ideal; 1/(1-y) = prod (1 + y^(2^k))
    const RingElement unit = one(group_, ctx_);
    RingElement y = unit - scaled(cinv);
    RingElement inv = unit;
    for (int round = 0; round < 64 && !y.is_zero(); ++round) {
        inv = inv * (unit + y);
        y = y * y;
    }
    inv = inv.scaled(cinv);
    if (*this * inv != unit) throw NotAUnit("geometric series did not terminate");
    return inv;
}

RingElement RingElement::conjugate(int g) const {
    RingElement r(group_, ctx_);
    r.ledger_ = ledger_;
    const int gi = group_->inv(g);
    for (int x = 0; x < size(); ++x) {
        const u64 c = c_[static_cast<std::size_t>(x)];
        if (c) r.c_[static_cast<std::size_t>(group_->mul(group_->mul(g, x), gi))] = c;
    }
    return r;
}

RingElement RingElement::truncate(int N) const {
    if (N > ctx_.N()) throw std::invalid_argument("truncate cannot raise precision");
    RingElement r(group_, Zmod(ctx_.p(), N));
    r.ledger_ = ledger_;
    if (N < ctx_.N()) r.ledger_.push_back(precision_note(ctx_.N(), N));
    for (std::size_t i = 0; i < c_.size(); ++i) r.c_[i] = c_[i] % r.ctx_.modulus();
    return r;
}

RingElement RingElement::lift(int N) const {
    if (N < ctx_.N()) return truncate(N);
    RingElement r(group_, Zmod(ctx_.p(), N));
    r.ledger_ = ledger_;
    r.c_ = c_;
    return r;
}

int RingElement::valuation() const {
    int v = ctx_.N();
    for (u64 x : c_)
        if (x) v = std::min(v, ctx_.val(x));
    return v;
}

RingElement RingElement::divide_ppow(int k) const {
    if (k == 0) return *this;
    if (valuation() < k) throw InexactDivision("coefficients are not divisible by p^" + std::to_string(k));
    if (k > ctx_.N()) throw InexactDivision("division exceeds the precision");
    RingElement r(group_, Zmod(ctx_.p(), std::max(1, ctx_.N() - k)));
    r.ledger_ = ledger_;
    r.ledger_.push_back("divided by p^" + std::to_string(k));
    for (std::size_t i = 0; i < c_.size(); ++i) r.c_[i] = (c_[i] / ipow(ctx_.p(), k)) % r.ctx_.modulus();
    if (k == ctx_.N()) std::fill(r.c_.begin(), r.c_.end(), 0);
    return r;
}

// ----------------------------------------------------------- TraceElement

TraceElement::TraceElement(std::shared_ptr<const FiniteGroup> group, const Zmod& ctx)
    : group_(std::move(group)), ctx_(ctx), c_(static_cast<std::size_t>(group_->class_count()), 0) {}

bool TraceElement::is_zero() const {
    return std::all_of(c_.begin(), c_.end(), [](u64 x) { return x == 0; });
}

int TraceElement::valuation() const {
    int v = ctx_.N();
    for (u64 x : c_)
        if (x) v = std::min(v, ctx_.val(x));
    return v;
}

TraceElement TraceElement::truncate(int N) const {
    TraceElement r(group_, Zmod(ctx_.p(), N));
    for (std::size_t i = 0; i < c_.size(); ++i) r.c_[i] = c_[i] % r.ctx_.modulus();
    return r;
}

TraceElement TraceElement::lift(int N) const {
    if (N < ctx_.N()) return truncate(N);
    TraceElement r(group_, Zmod(ctx_.p(), N));
    r.c_ = c_;
    return r;
}

TraceElement TraceElement::scaled(u64 c) const {
    TraceElement r = *this;
    c %= ctx_.modulus();
    for (auto& x : r.c_) x = ctx_.mul(x, c);
    return r;
}

TraceElement TraceElement::divide_ppow(int k) const {
    if (k == 0) return *this;
    if (valuation() < k) throw InexactDivision("trace coefficients are not divisible by p^" + std::to_string(k));
    TraceElement r(group_, Zmod(ctx_.p(), std::max(1, ctx_.N() - k)));
    for (std::size_t i = 0; i < c_.size(); ++i) r.c_[i] = (c_[i] / ipow(ctx_.p(), k)) % r.ctx_.modulus();
    if (k >= ctx_.N()) std::fill(r.c_.begin(), r.c_.end(), 0);
    return r;
}

TraceElement TraceElement::operator+(const TraceElement& o) const {
    if (!same_group(*group_, *o.group_)) throw ModelMismatch("trace elements over different groups");
    Zmod ctx(ctx_.p(), std::min(ctx_.N(), o.ctx_.N()));
    TraceElement r(group_, ctx);
    for (std::size_t i = 0; i < c_.size(); ++i) r.c_[i] = ctx.add(c_[i] % ctx.modulus(), o.c_[i] % ctx.modulus());
    return r;
}

TraceElement TraceElement::operator-(const TraceElement& o) const {
    if (!same_group(*group_, *o.group_)) throw ModelMismatch("trace elements over different groups");
    Zmod ctx(ctx_.p(), std::min(ctx_.N(), o.ctx_.N()));
    TraceElement r(group_, ctx);
    for (std::size_t i = 0; i < c_.size(); ++i) r.c_[i] = ctx.sub(c_[i] % ctx.modulus(), o.c_[i] % ctx.modulus());
    return r;
}

bool TraceElement::operator==(const TraceElement& o) const {
    if (!same_group(*group_, *o.group_)) return false;
    const u64 m = std::min(ctx_.modulus(), o.ctx_.modulus());
    for (std::size_t i = 0; i < c_.size(); ++i)
        if (c_[i] % m != o.c_[i] % m) return false;
    return true;
}

TraceElement to_trace(const RingElement& x) {
    TraceElement t(x.group_ptr(), x.ctx());
    std::vector<u64> acc(static_cast<std::size_t>(x.group().class_count()), 0);
    for (int g = 0; g < x.size(); ++g) {
        auto& slot = acc[static_cast<std::size_t>(x.group().class_of(g))];
        slot = x.ctx().add(slot, x.coeff(g));
    }
    for (std::size_t c = 0; c < acc.size(); ++c) t.set(static_cast<int>(c), acc[c]);
    return t;
}

RingElement class_sum(const TraceElement& t) {
    RingElement x(t.group_ptr(), t.ctx());
    const auto& cls = t.group().classes();
    for (std::size_t c = 0; c < cls.size(); ++c)
        x.set(cls[c].front(), t.coeff(static_cast<int>(c)));
    return x;
}

// ------------------------------------------------------ trace ideals

RingElement layer_gamma_conjugate(const AbelianLayer& layer, const RingElement& x, i64 k) {
    RingElement r(x.group_ptr(), x.ctx());
    for (int g = 0; g < x.size(); ++g) {
        const u64 c = x.coeff(g);
        if (c) r.add_to(layer.conjugate_by_gamma(g, k), c);
    }
    return r;
}

namespace {

// columns: orbit-sum images of the basis elements
ModMat orbit_matrix(const AbelianLayer& L, const Zmod& ctx, i64 step, u64 count) {
    const int n = L.group().order();
    ModMat M(static_cast<std::size_t>(n), ModVec(static_cast<std::size_t>(n), 0));
    for (int b = 0; b < n; ++b)
        for (u64 k = 0; k < count; ++k) {
            const int img = L.conjugate_by_gamma(b, step * static_cast<i64>(k));
            auto& slot = M[static_cast<std::size_t>(img)][static_cast<std::size_t>(b)];
            slot = ctx.add(slot, 1 % ctx.modulus());
        }
    return M;
}

std::shared_ptr<const SpanSolver> ideal_solver(const GroupModel& model, int i, const Zmod& ctx, LayerIdeal ideal) {
    static std::mutex mu;
    static std::map<std::string, std::shared_ptr<const SpanSolver>> cache;
    auto L = model.layer(i, i);
    std::ostringstream key;
    key << L->group().signature() << "|N=" << ctx.N() << "|p=" << ctx.p() << "|kind=" << static_cast<int>(ideal);
    {
        std::lock_guard<std::mutex> lk(mu);
        auto it = cache.find(key.str());
        if (it != cache.end()) return it->second;
    }
    ModMat M;
    const u64 p = model.p();
    switch (ideal) {
        case LayerIdeal::trace:
            M = orbit_matrix(*L, ctx, 1, ipow(p, i));
            break;
        case LayerIdeal::p_trace: {
            M = orbit_matrix(*L, ctx, 1, ipow(p, i));
            for (auto& row : M)
                for (auto& v : row) v = ctx.mul(v, p % ctx.modulus());
            break;
        }
        case LayerIdeal::d_plus_p: {
            if (i < 1) throw std::invalid_argument("D_i needs i >= 1");
            M = orbit_matrix(*L, ctx, static_cast<i64>(ipow(p, i - 1)), p);
            const std::size_t n = M.size();
            for (std::size_t r = 0; r < n; ++r) {
                M[r].resize(2 * n, 0);
                M[r][n + r] = p % ctx.modulus();
            }
            break;
        }
    }
    auto solver = std::make_shared<const SpanSolver>(ctx, M);
    std::lock_guard<std::mutex> lk(mu);
    return cache.emplace(key.str(), solver).first->second;
}

}  // namespace

RingElement trace_orbit_sum(const GroupModel& model, int i, const RingElement& z) {
    auto L = model.layer(i, i);
    RingElement r(z.group_ptr(), z.ctx());
    const u64 count = ipow(model.p(), i);
    for (u64 k = 0; k < count; ++k) r = r + layer_gamma_conjugate(*L, z, static_cast<i64>(k));
    return r;
}

Membership layer_ideal_membership(const GroupModel& model, int i, const RingElement& x, LayerIdeal ideal) {
    auto L = model.layer(i, i);
    if (!same_group(x.group(), L->group())) throw ModelMismatch("element does not live on layer " + std::to_string(i));
    auto solver = ideal_solver(model, i, x.ctx(), ideal);
    auto w = solver->solve(x.coeffs());
    Membership res;
    res.member = w.has_value();
    if (w && ideal != LayerIdeal::d_plus_p) {
        RingElement z(x.group_ptr(), x.ctx());
        for (int g = 0; g < z.size(); ++g) z.set(g, (*w)[static_cast<std::size_t>(g)]);
        res.witness = z;
    }
    return res;
}

bool in_layer_ideal(const GroupModel& model, int i, const RingElement& x, LayerIdeal ideal) {
    return layer_ideal_membership(model, i, x, ideal).member;
}

// -------------------------------------------------------- fractions

bool is_central_denominator(const GroupModel& model, const RingElement& t) {
    if (!same_group(t.group(), model.group())) return false;
    const i64 step = static_cast<i64>(ipow(model.p(), model.e()));
    for (int g = 0; g < t.size(); ++g) {
        if (!t.coeff(g)) continue;
        GroupElement el = model.element(g);
        if (std::any_of(el.h.begin(), el.h.end(), [](i64 v) { return v != 0; }) || el.a % step != 0) return false;
    }
    return true;
}

FractionElement::FractionElement(const GroupModel& model, RingElement numerator, RingElement denominator)
    : a_(std::move(numerator)), t_(std::move(denominator)) {
    if (!is_central_denominator(model, t_)) throw BadDenominator("denominator is not supported on Gamma^(e)");
    if (t_.valuation() > 0) throw BadDenominator("denominator vanishes modulo p");
    if (!same_group(a_.group(), model.group())) throw ModelMismatch("numerator is not on the model group");
}

FractionElement FractionElement::whole(const GroupModel& model, const RingElement& a) {
    return FractionElement(model, a, RingElement::one(a.group_ptr(), a.ctx()));
}

FractionElement FractionElement::operator+(const FractionElement& o) const {
    return FractionElement(a_ * o.t_ + o.a_ * t_, t_ * o.t_);
}

FractionElement FractionElement::operator*(const FractionElement& o) const {
    return FractionElement(a_ * o.a_, t_ * o.t_);
}

bool FractionElement::operator==(const FractionElement& o) const { return a_ * o.t_ == o.a_ * t_; }

// ---------------------------------------------------------- text format

namespace {

struct Term {
    i64 coeff = 1;
    IntVec h;
    i64 a = 0;
};

std::string strip(const std::string& s) {
    std::string out;
    for (char c : s)
        if (!std::isspace(static_cast<unsigned char>(c))) out += c;
    return out;
}

i64 parse_int(const std::string& s, const std::string& ctx) {
    if (s.empty()) throw ParseError("missing integer in '" + ctx + "'");
    std::size_t pos = 0;
    long long v = 0;
    try {
        v = std::stoll(s, &pos);
    } catch (const std::exception&) {
        throw ParseError("bad integer '" + s + "' in '" + ctx + "'");
    }
    if (pos != s.size()) throw ParseError("bad integer '" + s + "' in '" + ctx + "'");
    return v;
}

IntVec parse_hpart(const std::string& s, int rank, const std::string& term) {
    IntVec h(static_cast<std::size_t>(rank), 0);
    if (s.empty() || s == "1") return h;
    std::stringstream ss(s);
    std::string factor;
    while (std::getline(ss, factor, '.')) {
        if (factor.empty() || factor[0] != 'h') throw ParseError("bad H factor '" + factor + "' in '" + term + "'");
        std::string body = factor.substr(1), idx, expo = "1";
        auto caret = body.find('^');
        if (caret == std::string::npos) {
            idx = body;
        } else {
            idx = body.substr(0, caret);
            expo = body.substr(caret + 1);
        }
        int t = 0;
        if (idx.empty()) {
            if (rank != 1) throw ParseError("factor '" + factor + "' needs an index when H has rank " + std::to_string(rank));
        } else {
            t = static_cast<int>(parse_int(idx, term)) - 1;
            if (t < 0 || t >= rank) throw ParseError("H index out of range in '" + term + "'");
        }
        h[static_cast<std::size_t>(t)] += parse_int(expo, term);
    }
    return h;
}

std::vector<Term> parse_terms(const std::string& text, int rank) {
    const std::string s = strip(text);
    std::vector<Term> out;
    if (s.empty()) throw ParseError("empty element");
    if (s == "0") return out;
    std::size_t pos = 0;
    while (pos < s.size()) {
        int sign = 1;
        while (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) {
            if (s[pos] == '-') sign = -sign;
            ++pos;
        }
        std::size_t end = pos;
        // a term ends at the next +/- that is not an exponent sign
        while (end < s.size()) {
            if ((s[end] == '+' || s[end] == '-') && end > pos && s[end - 1] != '^') break;
            ++end;
        }
        const std::string term = s.substr(pos, end - pos);
        if (term.empty()) throw ParseError("dangling sign in '" + text + "'");
        Term t;
        std::string left = term, gpart;
        auto at = term.find('@');
        if (at != std::string::npos) {
            left = term.substr(0, at);
            gpart = term.substr(at + 1);
            if (gpart.rfind("g^", 0) == 0) {
                t.a = parse_int(gpart.substr(2), term);
            } else if (gpart == "g") {
                t.a = 1;
            } else {
                throw ParseError("bad gamma part '" + gpart + "' in '" + term + "'");
            }
        }
        auto star = left.find('*');
        std::string hpart;
        if (star != std::string::npos) {
            t.coeff = parse_int(left.substr(0, star), term);
            hpart = left.substr(star + 1);
        } else if (!left.empty() && (std::isdigit(static_cast<unsigned char>(left[0])))) {
            t.coeff = parse_int(left, term);
        } else {
            hpart = left;
        }
        if (left.empty() && at == std::string::npos) throw ParseError("empty term in '" + text + "'");
        t.h = parse_hpart(hpart, rank, term);
        t.coeff *= sign;
        out.push_back(std::move(t));
        pos = end;
    }
    return out;
}

std::string format_term(u64 c, const IntVec& h, i64 a) {
    std::ostringstream os;
    const bool trivial_h = std::all_of(h.begin(), h.end(), [](i64 v) { return v == 0; });
    if (trivial_h) {
        os << c;
    } else {
        if (c != 1) os << c << "*";
        for (std::size_t t = 0, first = 1; t < h.size(); ++t) {
            if (h[t] == 0) continue;
            if (!first) os << ".";
            first = 0;
            os << "h";
            if (h.size() > 1) os << (t + 1);
            os << "^" << h[t];
        }
    }
    os << "@g^" << a;
    return os.str();
}

}  // namespace

RingElement parse_element(const std::string& text, const GroupModel& model, const Zmod& ctx) {
    RingElement x(model.group_ptr(), ctx);
    for (const auto& t : parse_terms(text, model.rank()))
        x.add_to(model.index(GroupElement{t.h, t.a}), ctx.from_int(t.coeff));
    return x;
}

RingElement parse_layer_element(const std::string& text, const GroupModel& model, const AbelianLayer& layer,
                                const Zmod& ctx) {
    RingElement x(layer.group_ptr(), ctx);
    for (const auto& t : parse_terms(text, model.rank()))
        x.add_to(layer.index_from_h(t.h, t.a), ctx.from_int(t.coeff));
    return x;
}

std::string format_element(const RingElement& x, const GroupModel& model) {
    std::vector<std::pair<GroupElement, u64>> terms;
    for (int g = 0; g < x.size(); ++g)
        if (x.coeff(g)) terms.emplace_back(model.element(g), x.coeff(g));
    if (terms.empty()) return "0";
    std::sort(terms.begin(), terms.end(), [](const auto& l, const auto& r) { return l.first < r.first; });
    std::string out;
    for (std::size_t k = 0; k < terms.size(); ++k) {
        if (k) out += " + ";
        out += format_term(terms[k].second, terms[k].first.h, terms[k].first.a);
    }
    return out;
}

std::string format_layer_element(const RingElement& x, const GroupModel&, const AbelianLayer& layer) {
    std::vector<std::pair<GroupElement, u64>> terms;
    for (int g = 0; g < x.size(); ++g) {
        if (!x.coeff(g)) continue;
        auto [hq, a] = layer.decode(g);
        terms.emplace_back(GroupElement{layer.lift(hq), a}, x.coeff(g));
    }
    if (terms.empty()) return "0";
    std::sort(terms.begin(), terms.end(), [](const auto& l, const auto& r) { return l.first < r.first; });
    std::string out;
    for (std::size_t k = 0; k < terms.size(); ++k) {
        if (k) out += " + ";
        out += format_term(terms[k].second, terms[k].first.h, terms[k].first.a);
    }
    return out;
}

}  // namespace iwk1
