#include "iwk1/groupmodel.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

namespace iwk1 {

namespace {

i64 mod_pos(i64 a, i64 m) {
    i64 r = a % m;
    return r < 0 ? r + m : r;
}

int vp(u64 a, u64 p) {
    int v = 0;
    while (a != 0 && a % p == 0) { a /= p; ++v; }
    return v;
}

constexpr int kMaxGroupOrder = 4096;

}  // namespace

// ------------------------------------------------------------ FiniteGroup

FiniteGroup::FiniteGroup(u64 p, std::vector<int> table, int order, int identity, std::vector<int> generators,
                         std::string signature)
    : p_(p), n_(order), id_(identity), table_(std::move(table)), gens_(std::move(generators)),
      sig_(std::move(signature)) {
    inv_.assign(static_cast<std::size_t>(n_), -1);
    for (int a = 0; a < n_; ++a)
        for (int b = 0; b < n_; ++b)
            if (mul(a, b) == id_) { inv_[static_cast<std::size_t>(a)] = b; break; }
    for (int a : gens_)
        for (int b : gens_)
            if (mul(a, b) != mul(b, a)) abelian_ = false;
    class_of_.assign(static_cast<std::size_t>(n_), -1);
    for (int x = 0; x < n_; ++x) {
        if (class_of_[static_cast<std::size_t>(x)] >= 0) continue;
        const int c = static_cast<int>(classes_.size());
        std::vector<int> members{x};
        class_of_[static_cast<std::size_t>(x)] = c;
        for (std::size_t k = 0; k < members.size(); ++k) {
            for (int g : gens_) {
                int y = mul(mul(g, members[k]), inv(g));
                if (class_of_[static_cast<std::size_t>(y)] < 0) {
                    class_of_[static_cast<std::size_t>(y)] = c;
                    members.push_back(y);
                }
            }
        }
        std::sort(members.begin(), members.end());
        classes_.push_back(std::move(members));
    }
}

int FiniteGroup::pow(int g, u64 e) const {
    int r = id_, b = g;
    while (e) {
        if (e & 1) r = mul(r, b);
        b = mul(b, b);
        e >>= 1;
    }
    return r;
}

int FiniteGroup::radical_nilpotency() const {
    std::call_once(nil_once_, [this] {
        const int n = n_;
        const u64 p = p_;
        // echelon basis over F_p, rows keyed by pivot
        auto reduce_into = [&](std::vector<std::vector<u64>>& basis, std::vector<int>& pivots,
                               std::vector<u64> v) {
            for (std::size_t b = 0; b < basis.size(); ++b) {
                u64 c = v[static_cast<std::size_t>(pivots[b])];
                if (c == 0) continue;
                for (int j = 0; j < n; ++j)
                    v[static_cast<std::size_t>(j)] =
                        (v[static_cast<std::size_t>(j)] + (p - c) * basis[b][static_cast<std::size_t>(j)]) % p;
            }
            int piv = -1;
            for (int j = 0; j < n; ++j)
                if (v[static_cast<std::size_t>(j)] != 0) { piv = j; break; }
            if (piv < 0) return;
            // normalise pivot to 1
            u64 c = v[static_cast<std::size_t>(piv)], ci = 1;
            while ((c * ci) % p != 1) ++ci;
            for (auto& x : v) x = (x * ci) % p;
            // keep basis fully reduced in the new pivot column
            for (auto& row : basis) {
                u64 d = row[static_cast<std::size_t>(piv)];
                if (d == 0) continue;
                for (int j = 0; j < n; ++j)
                    row[static_cast<std::size_t>(j)] =
                        (row[static_cast<std::size_t>(j)] + (p - d) * v[static_cast<std::size_t>(j)]) % p;
            }
            basis.push_back(std::move(v));
            pivots.push_back(piv);
        };
        std::vector<std::vector<u64>> cur;
        std::vector<int> piv;
        for (int g = 0; g < n; ++g) {
            if (g == id_) continue;
            std::vector<u64> v(static_cast<std::size_t>(n), 0);
            v[static_cast<std::size_t>(g)] = 1;
            v[static_cast<std::size_t>(id_)] = p - 1;
            reduce_into(cur, piv, std::move(v));
        }
        int m = 1;
        while (!cur.empty()) {
            std::vector<std::vector<u64>> next;
            std::vector<int> npiv;
            for (const auto& b : cur)
                for (int g : gens_) {
                    std::vector<u64> v(static_cast<std::size_t>(n), 0);
                    for (int x = 0; x < n; ++x) {
                        u64 c = b[static_cast<std::size_t>(x)];
                        if (!c) continue;
                        auto& slot = v[static_cast<std::size_t>(mul(x, g))];
                        slot = (slot + c) % p;
                        auto& self = v[static_cast<std::size_t>(x)];
                        self = (self + p - c) % p;
                    }
                    reduce_into(next, npiv, std::move(v));
                }
            cur = std::move(next);
            ++m;
        }
        nil_ = m;
    });
    return nil_;
}

// --------------------------------------------------------- GroupSpec I/O

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<i64> parse_int_list(const std::string& v, const std::string& key) {
    std::vector<i64> out;
    std::string t = trim(v);
    if (t.empty()) return out;
    std::stringstream ss(t);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        try {
            std::size_t pos = 0;
            long long x = std::stoll(item, &pos);
            if (pos != item.size()) throw std::invalid_argument("trailing");
            out.push_back(x);
        } catch (const std::exception&) {
            throw ParseError("bad integer '" + item + "' in key " + key);
        }
    }
    return out;
}

i64 parse_one(const std::string& v, const std::string& key) {
    auto xs = parse_int_list(v, key);
    if (xs.size() != 1) throw ParseError("key " + key + " expects one integer");
    return xs[0];
}

template <class T>
std::string join(const std::vector<T>& xs) {
    std::ostringstream os;
    for (std::size_t i = 0; i < xs.size(); ++i) os << (i ? "," : "") << xs[i];
    return os.str();
}

}  // namespace

GroupSpec parse_group_spec(const std::string& text) {
    GroupSpec s;
    std::set<std::string> seen;
    std::istringstream in(text);
    std::string line;
    bool in_header = true;
    while (std::getline(in, line)) {
        std::string t = trim(line);
        if (t.empty()) { in_header = false; continue; }
        if (t[0] == '#') {
            if (in_header) s.header.push_back(t);
            continue;
        }
        in_header = false;
        auto eq = t.find('=');
        if (eq == std::string::npos) throw ParseError("expected key=value, got '" + t + "'");
        std::string key = trim(t.substr(0, eq)), val = t.substr(eq + 1);
        auto hash = val.find('#');
        if (hash != std::string::npos) val = val.substr(0, hash);
        if (!seen.insert(key).second) throw ParseError("duplicate key " + key);
        if (key == "p") {
            i64 p = parse_one(val, key);
            if (p < 3) throw ParseError("p must be an odd prime");
            s.p = static_cast<u64>(p);
        } else if (key == "e") {
            s.e = static_cast<int>(parse_one(val, key));
        } else if (key == "orders") {
            for (i64 d : parse_int_list(val, key)) {
                if (d < 1) throw ParseError("orders must be positive");
                s.orders.push_back(static_cast<u64>(d));
            }
        } else if (key == "action") {
            s.action = parse_int_list(val, key);
        } else if (key == "level") {
            s.level = static_cast<int>(parse_one(val, key));
        } else if (key == "precision") {
            s.precision = static_cast<int>(parse_one(val, key));
        } else {
            throw ParseError("unknown key " + key);
        }
    }
    for (const char* k : {"p", "e", "orders", "action", "level", "precision"})
        if (!seen.count(k)) throw ParseError(std::string("missing key ") + k);
    return s;
}

std::string serialize_group_spec(const GroupSpec& s) {
    std::ostringstream os;
    for (const auto& h : s.header) os << h << "\n";
    os << "p=" << s.p << "\n";
    os << "e=" << s.e << "\n";
    os << "orders=" << join(s.orders) << "\n";
    os << "action=" << join(s.action) << "\n";
    os << "level=" << s.level << "\n";
    os << "precision=" << s.precision << "\n";
    return os.str();
}

GroupSpec load_group_spec(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open group file " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_group_spec(ss.str());
}

std::string format_h(const IntVec& h) {
    std::ostringstream os;
    os << "(";
    for (std::size_t i = 0; i < h.size(); ++i) os << (i ? "," : "") << h[i];
    os << ")";
    return os.str();
}

// ------------------------------------------------------------ GroupModel

GroupModel::GroupModel(GroupSpec spec, Validation mode) : spec_(std::move(spec)), mode_(mode) {
    validate();
    const int r = rank();
    gsize_ = ipow(spec_.p, spec_.level);
    pows_.reserve(gsize_);
    SmallMat cur(static_cast<std::size_t>(r), std::vector<i64>(static_cast<std::size_t>(r), 0));
    for (int i = 0; i < r; ++i) cur[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 1 % static_cast<i64>(spec_.orders[static_cast<std::size_t>(i)]);
    for (u64 k = 0; k < gsize_; ++k) {
        pows_.push_back(cur);
        cur = mat_mul(A_, cur);
    }
    const u64 n = hsize_ * gsize_;
    if (n > static_cast<u64>(kMaxGroupOrder))
        throw TooLarge("quotient of order " + std::to_string(n) + " exceeds the supported size");
    const int N = static_cast<int>(n);
    std::vector<int> table(static_cast<std::size_t>(N) * N);
    std::vector<GroupElement> elems;
    elems.reserve(n);
    for (int x = 0; x < N; ++x) elems.push_back(element(x));
    for (int x = 0; x < N; ++x)
        for (int y = 0; y < N; ++y)
            table[static_cast<std::size_t>(x) * N + y] = index(multiply(elems[static_cast<std::size_t>(x)], elems[static_cast<std::size_t>(y)]));
    std::vector<int> gens;
    for (int t = 0; t < r; ++t)
        if (spec_.orders[static_cast<std::size_t>(t)] > 1) gens.push_back(index(GroupElement{generator(t), 0}));
    if (gsize_ > 1) gens.push_back(index(GroupElement{IntVec(static_cast<std::size_t>(r), 0), 1}));
    std::ostringstream sig;
    sig << "G[p=" << spec_.p << ";orders=" << join(spec_.orders) << ";A=" << join(spec_.action)
        << ";level=" << spec_.level << "]";
    group_ = std::make_shared<const FiniteGroup>(spec_.p, std::move(table), N, index(identity()), gens, sig.str());
}

GroupModel GroupModel::at(int level, int precision) const {
    GroupSpec s = spec_;
    s.level = level;
    s.precision = precision;
    return GroupModel(s, mode_);
}

SmallMat GroupModel::mat_mul(const SmallMat& X, const SmallMat& Y) const {
    const std::size_t r = X.size();
    SmallMat Z(r, std::vector<i64>(r, 0));
    for (std::size_t s = 0; s < r; ++s) {
        const i64 d = static_cast<i64>(spec_.orders[s]);
        for (std::size_t t = 0; t < r; ++t) {
            __int128 acc = 0;
            for (std::size_t k = 0; k < r; ++k) acc += static_cast<__int128>(X[s][k]) * Y[k][t];
            Z[s][t] = mod_pos(static_cast<i64>(acc % d), d);
        }
    }
    return Z;
}

SmallMat GroupModel::mat_pow(const SmallMat& X, u64 e) const {
    const std::size_t r = X.size();
    SmallMat R(r, std::vector<i64>(r, 0));
    for (std::size_t i = 0; i < r; ++i) R[i][i] = 1 % static_cast<i64>(spec_.orders[i]);
    SmallMat B = X;
    while (e) {
        if (e & 1) R = mat_mul(B, R);
        B = mat_mul(B, B);
        e >>= 1;
    }
    return R;
}

bool GroupModel::is_identity_action(const SmallMat& X) const {
    for (std::size_t s = 0; s < X.size(); ++s)
        for (std::size_t t = 0; t < X.size(); ++t) {
            const i64 want = (s == t) ? 1 % static_cast<i64>(spec_.orders[s]) : 0;
            if (mod_pos(X[s][t], static_cast<i64>(spec_.orders[s])) != want) return false;
        }
    return true;
}

void GroupModel::validate() {
    const u64 p = spec_.p;
    if (p < 3 || !is_prime(p)) throw InvalidAction("p must be an odd prime");
    if (spec_.precision < 1) throw std::invalid_argument("precision must be >= 1");
    if (spec_.e < 0) throw InvalidAction("e must be non-negative");
    const std::size_t r = spec_.orders.size();
    hsize_ = 1;
    for (u64 d : spec_.orders) {
        if (d < 1) throw InvalidAction("cyclic orders must be positive");
        if (mode_ == Validation::strict && ipow(p, vp(d, p)) != d)
            throw InvalidAction("order " + std::to_string(d) + " is not a power of p");
        hsize_ *= d;
        if (hsize_ > static_cast<u64>(kMaxGroupOrder)) throw TooLarge("H too large");
    }
    if (spec_.action.empty() && r > 0) throw InvalidAction("missing action matrix");
    if (spec_.action.size() != r * r) throw InvalidAction("action matrix must be r x r");
    A_.assign(r, std::vector<i64>(r, 0));
    for (std::size_t s = 0; s < r; ++s)
        for (std::size_t t = 0; t < r; ++t) {
            const i64 ds = static_cast<i64>(spec_.orders[s]), dt = static_cast<i64>(spec_.orders[t]);
            const i64 a = spec_.action[s * r + t];
            // the map must send d_t e_t to zero in Z/d_s
            if (mod_pos(static_cast<i64>((static_cast<__int128>(a) * dt) % ds), ds) != 0)
                throw InvalidAction("entry (" + std::to_string(s) + "," + std::to_string(t) +
                                    ") is incompatible with the cyclic orders");
            A_[s][t] = mod_pos(a, ds);
        }
    if (mode_ == Validation::abelian_tower) {
        if (!is_identity_action(A_)) throw InvalidAction("abelian tower requires the identity action");
    } else {
        // automorphism test on the Frattini quotient H/pH
        std::vector<std::size_t> live;
        for (std::size_t t = 0; t < r; ++t)
            if (spec_.orders[t] > 1) live.push_back(t);
        std::vector<std::vector<i64>> M(live.size(), std::vector<i64>(live.size()));
        for (std::size_t a = 0; a < live.size(); ++a)
            for (std::size_t b = 0; b < live.size(); ++b) {
                // the induced map on H/pH only sees entries between factors of
                // equal order; others are multiples of p there
                i64 x = A_[live[a]][live[b]];
                if (spec_.orders[live[a]] > spec_.orders[live[b]]) x = 0;
                M[a][b] = mod_pos(x, static_cast<i64>(p));
            }
        const i64 P = static_cast<i64>(p);
        std::size_t rk = 0;
        for (std::size_t c = 0; c < M.size() && rk < M.size(); ++c) {
            std::size_t piv = rk;
            while (piv < M.size() && M[piv][c] == 0) ++piv;
            if (piv == M.size()) continue;
            std::swap(M[piv], M[rk]);
            i64 inv = 1;
            while ((M[rk][c] * inv) % P != 1) ++inv;
            for (auto& x : M[rk]) x = (x * inv) % P;
            for (std::size_t i = 0; i < M.size(); ++i) {
                if (i == rk || M[i][c] == 0) continue;
                i64 f = M[i][c];
                for (std::size_t j = 0; j < M.size(); ++j) M[i][j] = mod_pos(M[i][j] - f * M[rk][j], P);
            }
            ++rk;
        }
        if (rk != live.size()) throw InvalidAction("action matrix is not invertible on H");
        // order of A must be exactly p^e
        SmallMat cur = A_;
        u64 order = 1;
        while (!is_identity_action(cur)) {
            cur = mat_mul(A_, cur);
            if (++order > 1000000) throw InvalidAction("action order too large");
        }
        const int e_true = vp(order, p);
        if (ipow(p, e_true) != order)
            throw InvalidAction("action has order " + std::to_string(order) + ", not a power of p");
        if (e_true != spec_.e)
            throw InvalidAction("action has order p^" + std::to_string(e_true) + " but e=" + std::to_string(spec_.e));
    }
    if (spec_.level < spec_.e) throw LevelTooSmall("level " + std::to_string(spec_.level) + " < e=" + std::to_string(spec_.e));
}

IntVec GroupModel::reduce_h(IntVec h) const {
    for (std::size_t t = 0; t < h.size(); ++t) h[t] = mod_pos(h[t], static_cast<i64>(spec_.orders[t]));
    return h;
}

IntVec GroupModel::apply(const SmallMat& X, const IntVec& h) const {
    const std::size_t r = h.size();
    IntVec out(r, 0);
    for (std::size_t s = 0; s < r; ++s) {
        __int128 acc = 0;
        for (std::size_t t = 0; t < r; ++t) acc += static_cast<__int128>(X[s][t]) * h[t];
        out[s] = mod_pos(static_cast<i64>(acc % static_cast<__int128>(spec_.orders[s])), static_cast<i64>(spec_.orders[s]));
    }
    return out;
}

const SmallMat& GroupModel::action_power(i64 k) const {
    return pows_[static_cast<std::size_t>(mod_pos(k, static_cast<i64>(gsize_)))];
}

IntVec GroupModel::act(const IntVec& h, i64 k) const { return apply(action_power(k), h); }

IntVec GroupModel::add_h(const IntVec& a, const IntVec& b) const {
    IntVec c(a.size());
    for (std::size_t t = 0; t < a.size(); ++t) c[t] = mod_pos(a[t] + b[t], static_cast<i64>(spec_.orders[t]));
    return c;
}

IntVec GroupModel::scale_h(const IntVec& a, i64 c) const {
    IntVec out(a.size());
    for (std::size_t t = 0; t < a.size(); ++t) {
        const i64 d = static_cast<i64>(spec_.orders[t]);
        out[t] = mod_pos(static_cast<i64>((static_cast<__int128>(a[t]) * mod_pos(c, d)) % d), d);
    }
    return out;
}

u64 GroupModel::h_index(const IntVec& h) const {
    u64 idx = 0, mult = 1;
    for (std::size_t t = 0; t < h.size(); ++t) {
        const i64 d = static_cast<i64>(spec_.orders[t]);
        idx += static_cast<u64>(mod_pos(h[t], d)) * mult;
        mult *= static_cast<u64>(d);
    }
    return idx;
}

IntVec GroupModel::h_at(u64 idx) const {
    IntVec h(spec_.orders.size());
    for (std::size_t t = 0; t < h.size(); ++t) {
        h[t] = static_cast<i64>(idx % spec_.orders[t]);
        idx /= spec_.orders[t];
    }
    return h;
}

IntVec GroupModel::generator(int t) const {
    IntVec h(spec_.orders.size(), 0);
    h[static_cast<std::size_t>(t)] = 1;
    return reduce_h(h);
}

int GroupModel::index(const GroupElement& g) const {
    if (g.h.size() != spec_.orders.size()) throw std::invalid_argument("element has wrong H rank");
    const u64 a = static_cast<u64>(mod_pos(g.a, static_cast<i64>(gsize_)));
    return static_cast<int>(h_index(g.h) + hsize_ * a);
}

GroupElement GroupModel::element(int idx) const {
    const u64 u = static_cast<u64>(idx);
    return GroupElement{h_at(u % hsize_), static_cast<i64>(u / hsize_)};
}

GroupElement GroupModel::normalize(GroupElement g) const {
    g.h = reduce_h(std::move(g.h));
    g.a = mod_pos(g.a, static_cast<i64>(gsize_));
    return g;
}

GroupElement GroupModel::multiply(const GroupElement& x, const GroupElement& y) const {
    return GroupElement{add_h(x.h, act(y.h, x.a)), mod_pos(x.a + y.a, static_cast<i64>(gsize_))};
}

GroupElement GroupModel::inverse(const GroupElement& g) const {
    // (h, a)^-1 = (-A^{-a} h, -a)
    IntVec h = act(g.h, -g.a);
    return GroupElement{scale_h(h, -1), mod_pos(-g.a, static_cast<i64>(gsize_))};
}

GroupElement GroupModel::identity() const {
    return GroupElement{IntVec(spec_.orders.size(), 0), 0};
}

GroupElement GroupModel::phi(const GroupElement& g) const {
    GroupElement r = identity();
    for (u64 k = 0; k < spec_.p; ++k) r = multiply(r, g);
    return r;
}

int GroupModel::stratum(i64 a) const {
    u64 x = static_cast<u64>(mod_pos(a, static_cast<i64>(gsize_)));
    if (x == 0) return spec_.e;
    return std::min(vp(x, spec_.p), spec_.e);
}

std::vector<ConjClass> GroupModel::conjugacy_classes() const {
    std::vector<ConjClass> out;
    for (const auto& members : group_->classes()) {
        ConjClass c;
        for (int m : members) c.members.push_back(element(m));
        c.representative = c.members.front();
        c.stratum = stratum(c.representative.a);
        out.push_back(std::move(c));
    }
    return out;
}

std::vector<u64> GroupModel::commutator_subgroup(int i) const {
    const SmallMat Ai = mat_pow(A_, ipow(spec_.p, i));
    std::set<u64> K;
    for (u64 x = 0; x < hsize_; ++x) {
        IntVec h = h_at(x);
        IntVec y = apply(Ai, h);
        K.insert(h_index(add_h(y, scale_h(h, -1))));
    }
    return {K.begin(), K.end()};
}

std::vector<ConjClass> GroupModel::conjugacy_classes_by_criterion() const {
    const int n = group_->order();
    std::vector<int> cls(static_cast<std::size_t>(n), -1);
    std::vector<std::vector<u64>> K(static_cast<std::size_t>(spec_.e) + 1);
    for (int i = 0; i <= spec_.e; ++i) K[static_cast<std::size_t>(i)] = commutator_subgroup(i);
    std::vector<ConjClass> out;
    for (int x = 0; x < n; ++x) {
        if (cls[static_cast<std::size_t>(x)] >= 0) continue;
        GroupElement g = element(x);
        const int i = stratum(g.a);
        const u64 twists = ipow(spec_.p, i);
        std::set<int> members;
        for (u64 k = 0; k < twists; ++k) {
            IntVec base = act(g.h, static_cast<i64>(k));
            for (u64 kk : K[static_cast<std::size_t>(i)])
                members.insert(index(GroupElement{add_h(base, h_at(kk)), g.a}));
        }
        ConjClass c;
        c.stratum = i;
        for (int m : members) {
            cls[static_cast<std::size_t>(m)] = static_cast<int>(out.size());
            c.members.push_back(element(m));
        }
        c.representative = c.members.front();
        out.push_back(std::move(c));
    }
    return out;
}

// --------------------------------------------------------- AbelianLayer

std::shared_ptr<const AbelianLayer> GroupModel::layer(int q, int s) const {
    if (q < 0 || s < q || s > spec_.level)
        throw std::invalid_argument("layer indices must satisfy 0 <= q <= s <= level");
    {
        std::lock_guard<std::mutex> lk(*layer_mu_);
        auto it = layers_.find({q, s});
        if (it != layers_.end()) return it->second;
    }
    auto L = std::make_shared<AbelianLayer>();
    L->q_ = q;
    L->s_ = s;
    L->level_ = spec_.level;
    L->p_ = spec_.p;
    L->h_orders_ = spec_.orders;
    const std::size_t r = spec_.orders.size();
    const SmallMat Aq = mat_pow(A_, ipow(spec_.p, q));
    IntMat rel(r, std::vector<BigInt>(2 * r, BigInt(0)));
    for (std::size_t a = 0; a < r; ++a) {
        for (std::size_t b = 0; b < r; ++b) rel[a][b] = static_cast<long>(Aq[a][b] - (a == b ? 1 : 0));
        rel[a][r + a] = static_cast<long>(spec_.orders[a]);
    }
    IntSmith sm = smith_integer(rel);
    std::vector<std::size_t> kept;
    for (std::size_t t = 0; t < r; ++t) {
        BigInt d = sm.diag[t];
        if (d < 0) d = -d;
        if (d != 1) {
            kept.push_back(t);
            L->orders_.push_back(d.get_ui());
        }
    }
    L->proj_.assign(kept.size(), std::vector<i64>(r, 0));
    L->lift_.assign(r, std::vector<i64>(kept.size(), 0));
    for (std::size_t k = 0; k < kept.size(); ++k) {
        const BigInt d(static_cast<unsigned long>(L->orders_[k]));
        for (std::size_t c = 0; c < r; ++c) {
            BigInt v;
            mpz_fdiv_r(v.get_mpz_t(), sm.U[kept[k]][c].get_mpz_t(), d.get_mpz_t());
            L->proj_[k][c] = v.get_si();
            BigInt w;
            const BigInt dc(static_cast<unsigned long>(spec_.orders[c]));
            mpz_fdiv_r(w.get_mpz_t(), sm.Uinv[c][kept[k]].get_mpz_t(), dc.get_mpz_t());
            L->lift_[c][k] = w.get_si();
        }
    }
    L->hsize_ = 1;
    for (u64 d : L->orders_) L->hsize_ *= d;
    L->gsize_ = ipow(spec_.p, spec_.level - s);
    // gamma^k on H_q coordinates
    const u64 period = ipow(spec_.p, q);
    for (u64 k = 0; k < period; ++k) {
        SmallMat B(kept.size(), std::vector<i64>(kept.size(), 0));
        for (std::size_t col = 0; col < kept.size(); ++col) {
            IntVec e(kept.size(), 0);
            e[col] = 1;
            IntVec img = L->project(act(L->lift(e), static_cast<i64>(k)));
            for (std::size_t row = 0; row < kept.size(); ++row) B[row][col] = img[row];
        }
        L->act_pows_.push_back(std::move(B));
    }
    // group table
    const u64 n64 = L->hsize_ * L->gsize_;
    if (n64 > static_cast<u64>(kMaxGroupOrder)) throw TooLarge("layer too large");
    const int n = static_cast<int>(n64);
    std::vector<int> table(static_cast<std::size_t>(n) * n);
    const i64 step = static_cast<i64>(ipow(spec_.p, s));
    for (int x = 0; x < n; ++x) {
        auto [hx, ax] = L->decode(x);
        for (int y = 0; y < n; ++y) {
            auto [hy, ay] = L->decode(y);
            IntVec hz(hx.size());
            for (std::size_t t = 0; t < hz.size(); ++t) hz[t] = hx[t] + hy[t];
            table[static_cast<std::size_t>(x) * n + y] = L->index(hz, ax + ay);
        }
    }
    std::vector<int> gens;
    for (std::size_t k = 0; k < kept.size(); ++k) {
        IntVec e(kept.size(), 0);
        e[k] = 1;
        gens.push_back(L->index(e, 0));
    }
    if (L->gsize_ > 1) gens.push_back(L->index(IntVec(kept.size(), 0), step));
    std::ostringstream sig;
    sig << group_->signature() << "/layer(" << q << "," << s << ")";
    L->group_ = std::make_shared<const FiniteGroup>(spec_.p, std::move(table), n, L->index(IntVec(kept.size(), 0), 0),
                                                    gens, sig.str());
    std::lock_guard<std::mutex> lk(*layer_mu_);
    auto [it, inserted] = layers_.emplace(std::make_pair(q, s), L);
    return it->second;
}

int AbelianLayer::h_index(const IntVec& hq) const {
    u64 idx = 0, mult = 1;
    for (std::size_t t = 0; t < orders_.size(); ++t) {
        const i64 d = static_cast<i64>(orders_[t]);
        idx += static_cast<u64>(mod_pos(hq[t], d)) * mult;
        mult *= orders_[t];
    }
    return static_cast<int>(idx);
}

int AbelianLayer::index(const IntVec& hq, i64 a) const {
    const i64 full = static_cast<i64>(ipow(p_, level_));
    const i64 step = static_cast<i64>(ipow(p_, s_));
    const i64 am = mod_pos(a, full);
    if (am % step != 0) throw std::invalid_argument("gamma exponent not in the layer subgroup");
    return static_cast<int>(static_cast<u64>(h_index(hq)) + hsize_ * static_cast<u64>(am / step));
}

std::pair<IntVec, i64> AbelianLayer::decode(int idx) const {
    u64 u = static_cast<u64>(idx);
    IntVec hq(orders_.size());
    u64 hpart = u % hsize_;
    for (std::size_t t = 0; t < orders_.size(); ++t) {
        hq[t] = static_cast<i64>(hpart % orders_[t]);
        hpart /= orders_[t];
    }
    const i64 step = static_cast<i64>(ipow(p_, s_));
    return {hq, static_cast<i64>(u / hsize_) * step};
}

IntVec AbelianLayer::project(const IntVec& h) const {
    IntVec out(orders_.size(), 0);
    for (std::size_t k = 0; k < orders_.size(); ++k) {
        __int128 acc = 0;
        for (std::size_t c = 0; c < h.size(); ++c) acc += static_cast<__int128>(proj_[k][c]) * h[c];
        out[k] = mod_pos(static_cast<i64>(acc % static_cast<__int128>(orders_[k])), static_cast<i64>(orders_[k]));
    }
    return out;
}

IntVec AbelianLayer::lift(const IntVec& hq) const {
    IntVec out(lift_.size(), 0);
    for (std::size_t c = 0; c < lift_.size(); ++c) {
        __int128 acc = 0;
        for (std::size_t k = 0; k < hq.size(); ++k) acc += static_cast<__int128>(lift_[c][k]) * hq[k];
        const i64 d = static_cast<i64>(h_orders_[c]);
        out[c] = mod_pos(static_cast<i64>(acc % d), d);
    }
    return out;
}

IntVec AbelianLayer::act(const IntVec& hq, i64 k) const {
    const auto& B = act_pows_[static_cast<std::size_t>(mod_pos(k, static_cast<i64>(act_pows_.size())))];
    IntVec out(hq.size(), 0);
    for (std::size_t r = 0; r < hq.size(); ++r) {
        __int128 acc = 0;
        for (std::size_t c = 0; c < hq.size(); ++c) acc += static_cast<__int128>(B[r][c]) * hq[c];
        out[r] = mod_pos(static_cast<i64>(acc % static_cast<__int128>(orders_[r])), static_cast<i64>(orders_[r]));
    }
    return out;
}

int AbelianLayer::conjugate_by_gamma(int idx, i64 k) const {
    auto [hq, a] = decode(idx);
    return index(act(hq, k), a);
}

// --------------------------------------------------------- transfer etc.

int GroupModel::transfer_ver(int i, int idx) const {
    if (i < 1 || i > spec_.level) throw std::invalid_argument("transfer index out of range");
    auto src = layer(i - 1, i - 1);
    auto dst = layer(i, i);
    auto [hq, a] = src->decode(idx);
    const IntVec h = src->lift(hq);
    const u64 p = spec_.p;
    const i64 full = static_cast<i64>(gsize_);
    const u64 am = static_cast<u64>(mod_pos(a, full));
    const bool exact_stratum = am != 0 && vp(am, p) == i - 1;
    const i64 twist = exact_stratum ? a : static_cast<i64>(ipow(p, i - 1));
    IntVec acc(h.size(), 0);
    for (u64 k = 0; k < p; ++k) acc = add_h(acc, act(h, twist * static_cast<i64>(k)));
    return dst->index_from_h(acc, a * static_cast<i64>(p));
}

void GroupModel::check_transfer_well_defined(int i) const {
    auto src = layer(i - 1, i - 1);
    auto dst = layer(i, i);
    const u64 p = spec_.p;
    const std::vector<u64> K = commutator_subgroup(i - 1);
    const i64 step = static_cast<i64>(ipow(p, i - 1));
    for (i64 a = 0; a < static_cast<i64>(gsize_); a += step) {
        const u64 am = static_cast<u64>(a);
        const bool exact_stratum = am != 0 && vp(am, p) == i - 1;
        const i64 twist = exact_stratum ? a : step;
        for (u64 kk : K) {
            IntVec h = h_at(kk), acc(h.size(), 0);
            for (u64 k = 0; k < p; ++k) acc = add_h(acc, act(h, twist * static_cast<i64>(k)));
            IntVec img = dst->project(acc);
            if (std::any_of(img.begin(), img.end(), [](i64 x) { return x != 0; }))
                throw IllDefined("transfer formula does not kill " + format_h(h) + " at gamma^" + std::to_string(a));
        }
    }
}

SpecialTypeResult GroupModel::is_special_type() const {
    SpecialTypeResult res;
    const u64 p = spec_.p;
    for (int t = 0; t < rank(); ++t) {
        if (spec_.orders[static_cast<std::size_t>(t)] == 1) continue;
        const IntVec h = generator(t);
        for (int i = 0; i < spec_.e; ++i) {
            auto L = layer(i + 1, i + 1);
            IntVec twisted(h.size(), 0);
            for (u64 k = 0; k < p; ++k) twisted = add_h(twisted, act(h, static_cast<i64>(k * ipow(p, i))));
            if (L->project(scale_h(h, static_cast<i64>(p))) != L->project(twisted)) {
                res.special = false;
                res.witness = std::make_pair(t, i);
                return res;
            }
        }
    }
    return res;
}

}  // namespace iwk1
