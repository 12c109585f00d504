#include "iwk1/zeta.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "iwk1/k1maps.hpp"

namespace iwk1 {

namespace {

std::vector<u64> prime_factors(u64 n) {
    std::vector<u64> out;
    for (u64 q = 2; q * q <= n; ++q)
        if (n % q == 0) {
            out.push_back(q);
            while (n % q == 0) n /= q;
        }
    if (n > 1) out.push_back(n);
    return out;
}

u64 umod(i64 a, u64 m) {
    const i64 r = a % static_cast<i64>(m);
    return static_cast<u64>(r < 0 ? r + static_cast<i64>(m) : r);
}

u64 inverse_mod(u64 a, u64 m) {
    // extended Euclid; caller guarantees gcd(a, m) = 1
    i64 t = 0, nt = 1, r = static_cast<i64>(m), nr = static_cast<i64>(a % m);
    while (nr != 0) {
        const i64 q = r / nr;
        std::tie(t, nt) = std::make_pair(nt, t - q * nt);
        std::tie(r, nr) = std::make_pair(nr, r - q * nr);
    }
    return umod(t, m);
}

BigInt binom(int n, int k) {
    BigInt out;
    mpz_bin_uiui(out.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
    return out;
}

BigInt zpow(i64 base, u64 e) {
    BigInt out, b(static_cast<long>(base));
    mpz_pow_ui(out.get_mpz_t(), b.get_mpz_t(), static_cast<unsigned long>(e));
    return out;
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<i64> int_list(const std::string& v, const std::string& key) {
    std::vector<i64> out;
    std::stringstream ss(trim(v));
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        try {
            std::size_t pos = 0;
            const long long x = std::stoll(item, &pos);
            if (pos != item.size()) throw std::invalid_argument("trailing");
            out.push_back(x);
        } catch (const std::exception&) {
            throw ParseError("bad integer '" + item + "' in key " + key);
        }
    }
    return out;
}

u64 positive(i64 v, const std::string& key) {
    if (v < 1) throw ParseError("key " + key + " must be positive");
    return static_cast<u64>(v);
}

}  // namespace

// ------------------------------------------------------------ Bernoulli

ExactRational bernoulli(int k) {
    if (k < 0) throw std::invalid_argument("bernoulli index must be >= 0");
    static std::mutex mu;
    static std::vector<ExactRational> cache{ExactRational(1)};
    std::lock_guard<std::mutex> lock(mu);
    while (static_cast<int>(cache.size()) <= k) {
        const int n = static_cast<int>(cache.size());
        // sum_{i<=n} C(n+1, i) B_i = 0
        ExactRational acc = 0;
        for (int i = 0; i < n; ++i) acc += ExactRational(binom(n + 1, i)) * cache[static_cast<std::size_t>(i)];
        ExactRational b = -acc / ExactRational(binom(n + 1, n));
        b.canonicalize();
        cache.push_back(b);
    }
    return cache[static_cast<std::size_t>(k)];
}

ExactRational bernoulli_poly(int k, const ExactRational& x) {
    // Horner in x over the coefficients C(k, i) B_i of x^(k-i)
    ExactRational acc = 0;
    for (int i = 0; i <= k; ++i) acc = acc * x + ExactRational(binom(k, i)) * bernoulli(i);
    acc.canonicalize();
    return acc;
}

ExactRational partial_zeta_Q(u64 f, i64 a, int k, const std::vector<u64>& sigma) {
    if (f == 0) throw std::invalid_argument("modulus must be positive");
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    for (u64 l : sigma)
        if (f % l == 0 && umod(a, l) == 0) return 0;
    auto base = [&](u64 r) {
        const u64 rep = r == 0 ? f : r;
        ExactRational x(static_cast<unsigned long>(rep), static_cast<unsigned long>(f));
        x.canonicalize();
        ExactRational out = -ExactRational(zpow(static_cast<i64>(f), static_cast<u64>(k - 1))) * bernoulli_poly(k, x) / k;
        out.canonicalize();
        return out;
    };
    std::vector<u64> extra;
    for (u64 l : sigma)
        if (f % l != 0) extra.push_back(l);
    ExactRational total = 0;
    const std::size_t subsets = std::size_t{1} << extra.size();
    for (std::size_t mask = 0; mask < subsets; ++mask) {
        u64 d = 1;
        int bits = 0;
        for (std::size_t t = 0; t < extra.size(); ++t)
            if (mask >> t & 1U) {
                d *= extra[t];
                ++bits;
            }
        const u64 r = static_cast<u64>((static_cast<unsigned __int128>(umod(a, f)) * inverse_mod(d % f, f)) % f);
        ExactRational term = ExactRational(zpow(static_cast<i64>(d), static_cast<u64>(k - 1))) * base(f == 1 ? 0 : r);
        total += bits % 2 ? -term : term;
    }
    total.canonicalize();
    return total;
}

// ------------------------------------------------------------ characters

DirichletCharacter::DirichletCharacter(u64 modulus, int order, std::vector<int> exps)
    : mod_(modulus), m_(order), exps_(std::move(exps)) {
    if (mod_ == 0 || m_ < 1) throw std::invalid_argument("bad character modulus or order");
    if (exps_.size() != mod_) throw std::invalid_argument("character table has the wrong size");
    for (u64 n = 0; n < mod_; ++n) {
        const bool unit = std::gcd(n, mod_) == 1;
        int& e = exps_[static_cast<std::size_t>(n)];
        if (!unit) {
            e = -1;
            continue;
        }
        if (e < 0) throw IllDefined("character undefined at a unit");
        e %= m_;
    }
    std::vector<u64> units;
    for (u64 n = 1; n < mod_ || (mod_ == 1 && n == 1); ++n)
        if (std::gcd(n, mod_) == 1) units.push_back(n % mod_);
    for (u64 a : units)
        for (u64 b : units) {
            const u64 c = static_cast<u64>((static_cast<unsigned __int128>(a) * b) % mod_);
            if ((exponent(a) + exponent(b)) % m_ != exponent(c)) throw IllDefined("character is not multiplicative");
        }
    // conductor: smallest d | mod with the character trivial on 1 + dZ
    for (u64 d = 1; d <= mod_; ++d) {
        if (mod_ % d != 0) continue;
        bool trivial = true;
        for (u64 a : units)
            if (a % d == 1 % d && exponent(a) != 0) {
                trivial = false;
                break;
            }
        if (trivial) {
            cond_ = d;
            break;
        }
    }
}

DirichletCharacter DirichletCharacter::trivial(u64 modulus) {
    return DirichletCharacter(modulus, 1, std::vector<int>(modulus, 0));
}

bool DirichletCharacter::is_even() const {
    if (mod_ <= 2) return true;
    return exponent(mod_ - 1) == 0;
}

int DirichletCharacter::primitive_exponent(u64 n) const {
    const u64 r = n % cond_;
    if (std::gcd(r, cond_) != 1) return -1;
    for (u64 lift = r; lift < mod_ + cond_; lift += cond_)
        if (std::gcd(lift, mod_) == 1) return exponent(lift);
    throw IllDefined("no unit lift for a primitive character value");
}

CycloRational DirichletCharacter::value(u64 n) const {
    const int e = exponent(n);
    if (e < 0) return CycloRational(m_);
    return CycloRational::root(m_, e);
}

CycloRational generalized_bernoulli(const DirichletCharacter& chi, int k) {
    const u64 d = chi.conductor();
    const int m = chi.order();
    std::vector<ExactRational> bucket(static_cast<std::size_t>(m), ExactRational(0));
    for (u64 a = 1; a <= d; ++a) {
        const int e = chi.primitive_exponent(a);
        if (e < 0) continue;
        ExactRational x(static_cast<unsigned long>(a), static_cast<unsigned long>(d));
        x.canonicalize();
        bucket[static_cast<std::size_t>(e)] += bernoulli_poly(k, x);
    }
    CycloRational out(m);
    for (int e = 0; e < m; ++e) {
        auto& b = bucket[static_cast<std::size_t>(e)];
        if (b == 0) continue;
        b.canonicalize();
        out = out + CycloRational::root(m, e).scaled(b);
    }
    return out.scaled(ExactRational(zpow(static_cast<i64>(d), static_cast<u64>(k - 1))));
}

CycloRational dirichlet_L_value(const DirichletCharacter& chi, int k, const std::vector<u64>& sigma) {
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    ExactRational scale(-1, k);
    scale.canonicalize();
    CycloRational out = generalized_bernoulli(chi, k).scaled(scale);
    for (u64 l : sigma) {
        if (chi.conductor() % l == 0) continue;
        const int e = chi.primitive_exponent(l);
        CycloRational euler = CycloRational(chi.order(), 1) -
                              CycloRational::root(chi.order(), e).scaled(ExactRational(zpow(static_cast<i64>(l), static_cast<u64>(k - 1))));
        out = out * euler;
    }
    return out;
}

// ------------------------------------------------------------ datum

ZetaDatumSpec parse_zeta_datum_spec(const std::string& text) {
    ZetaDatumSpec s;
    std::set<std::string> seen;
    std::istringstream in(text);
    std::string line;
    bool in_header = true;
    bool identity_action = true;
    std::vector<i64> action;
    while (std::getline(in, line)) {
        const std::string t = trim(line);
        if (t.empty()) {
            in_header = false;
            continue;
        }
        if (t[0] == '#') {
            if (in_header) s.header.push_back(t);
            continue;
        }
        in_header = false;
        if (t.rfind("artin", 0) == 0 && t.size() > 5 && (t[5] == ' ' || t[5] == '\t')) {
            const auto arrow = t.find("->");
            if (arrow == std::string::npos) throw ParseError("artin line needs '->': " + t);
            const auto lhs = int_list(t.substr(5, arrow - 5), "artin");
            if (lhs.size() != 1) throw ParseError("artin line needs one residue: " + t);
            ArtinLine a;
            a.a = positive(lhs[0], "artin");
            a.image = trim(t.substr(arrow + 2));
            if (a.image.empty()) throw ParseError("artin line has no image: " + t);
            s.artin.push_back(a);
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw ParseError("expected key=value or an artin line, got '" + t + "'");
        const std::string key = trim(t.substr(0, eq)), val = t.substr(eq + 1);
        if (!seen.insert(key).second) throw ParseError("duplicate key " + key);
        auto one = [&] {
            auto xs = int_list(val, key);
            if (xs.size() != 1) throw ParseError("key " + key + " expects one integer");
            return xs[0];
        };
        if (key == "p") s.p = positive(one(), key);
        else if (key == "f0") s.f0 = positive(one(), key);
        else if (key == "sigma") {
            for (i64 v : int_list(val, key)) s.sigma.push_back(positive(v, key));
        } else if (key == "depth") s.depth = static_cast<int>(one());
        else if (key == "level") s.level = static_cast<int>(one());
        else if (key == "kappa_gamma") s.kappa_gamma = one();
        else if (key == "orders") {
            for (i64 v : int_list(val, key)) s.orders.push_back(positive(v, key));
        } else if (key == "action") action = int_list(val, key);
        else throw ParseError("unknown key " + key);
    }
    for (const char* k : {"p", "f0", "sigma", "depth", "level", "kappa_gamma"})
        if (!seen.count(k)) throw ParseError(std::string("missing key ") + k);
    if (seen.count("action")) {
        const std::size_t r = s.orders.size();
        if (action.size() != r * r) throw ParseError("action must be an r x r matrix");
        for (std::size_t a = 0; a < r; ++a)
            for (std::size_t b = 0; b < r; ++b) {
                const i64 want = a == b ? 1 : 0;
                if (umod(action[a * r + b] - want, s.orders[a]) != 0) identity_action = false;
            }
    }
    if (!identity_action) throw NonAbelianTower("only towers with trivial action decompose into Dirichlet characters");
    return s;
}

ZetaDatum::ZetaDatum(ZetaDatumSpec spec) : spec_(std::move(spec)) {
    const u64 p = spec_.p;
    if (p == 2 || !is_prime(p)) throw ParseError("p must be an odd prime");
    if (spec_.f0 % p == 0) throw ParseError("f0 must be prime to p");
    for (u64 l : spec_.sigma)
        if (!is_prime(l)) throw ParseError("sigma entry " + std::to_string(l) + " is not prime");
    auto in_sigma = [&](u64 l) { return std::find(spec_.sigma.begin(), spec_.sigma.end(), l) != spec_.sigma.end(); };
    if (!in_sigma(p)) throw ParseError("sigma must contain p");
    for (u64 l : prime_factors(spec_.f0))
        if (!in_sigma(l)) throw ParseError("sigma must contain the prime " + std::to_string(l) + " dividing f0");
    std::sort(spec_.sigma.begin(), spec_.sigma.end());
    spec_.sigma.erase(std::unique(spec_.sigma.begin(), spec_.sigma.end()), spec_.sigma.end());
    if (spec_.depth < 0) throw ParseError("depth must be >= 0");
    if (spec_.level < spec_.depth) throw LevelTooSmall("level must be at least the depth");
    const i64 km1 = spec_.kappa_gamma - 1;
    if (km1 == 0 || umod(km1, p) != 0) throw ParseError("kappa_gamma must be 1 mod p and not 1");
    f_ = 0;
    for (i64 v = km1; v % static_cast<i64>(p) == 0; v /= static_cast<i64>(p)) ++f_;
    build_artin();
}

u64 ZetaDatum::modulus(int j) const { return spec_.f0 * ipow(spec_.p, j + 1); }

const GroupModel& ZetaDatum::model(int j) const {
    if (j < spec_.depth || j > spec_.level)
        throw LevelMismatch("level " + std::to_string(j) + " outside [depth, datum level]");
    std::lock_guard<std::recursive_mutex> lock(*mu_);
    auto it = models_.find(j);
    if (it != models_.end()) return *it->second;
    GroupSpec g;
    g.p = spec_.p;
    g.e = spec_.depth;
    g.orders = spec_.orders;
    const std::size_t r = g.orders.size();
    g.action.assign(r * r, 0);
    for (std::size_t t = 0; t < r; ++t) g.action[t * r + t] = 1;
    g.level = j;
    g.precision = f_ + j;
    auto m = std::make_unique<GroupModel>(g, Validation::abelian_tower);
    return *models_.emplace(j, std::move(m)).first->second;
}

void ZetaDatum::build_artin() {
    const GroupModel& top = model(spec_.level);
    const u64 M = modulus(spec_.level);
    const FiniteGroup& G = top.group();
    Zmod unit_ctx(spec_.p, 1);
    std::vector<std::pair<u64, int>> gens;
    for (const auto& line : spec_.artin) {
        if (std::gcd(line.a, M) != 1) throw ParseError("artin residue " + std::to_string(line.a) + " is not a unit");
        RingElement img = parse_element(line.image, top, unit_ctx);
        int idx = -1;
        for (int g = 0; g < img.size(); ++g) {
            if (img.coeff(g) == 0) continue;
            if (idx >= 0 || img.coeff(g) != 1) throw ParseError("artin image must be a single group element: " + line.image);
            idx = g;
        }
        if (idx < 0) throw ParseError("artin image must be a single group element: " + line.image);
        gens.emplace_back(line.a % M, idx);
    }
    artin_top_.assign(M, -1);
    artin_top_[1 % M] = G.identity();
    std::deque<u64> queue{1 % M};
    while (!queue.empty()) {
        const u64 n = queue.front();
        queue.pop_front();
        for (const auto& [a, g] : gens) {
            const u64 m = static_cast<u64>((static_cast<unsigned __int128>(n) * a) % M);
            const int img = G.mul(artin_top_[n], g);
            int& slot = artin_top_[m];
            if (slot < 0) {
                slot = img;
                queue.push_back(m);
            } else if (slot != img) {
                throw IllDefined("artin assignment is not a homomorphism (conflict at " + std::to_string(m) + ")");
            }
        }
    }
    std::set<int> image;
    for (u64 n = 0; n < M; ++n) {
        if (std::gcd(n, M) != 1) continue;
        if (artin_top_[n] < 0) throw ParseError("artin generators do not generate the units mod " + std::to_string(M));
        image.insert(artin_top_[n]);
    }
    if (static_cast<int>(image.size()) != G.order()) throw IllDefined("artin assignment is not surjective");

    // n^(p-1) = kappa^((p-1) b) mod p^(level+1)
    const Zmod chk(spec_.p, spec_.level + 1);
    const u64 kap = chk.from_int(spec_.kappa_gamma);
    for (u64 n = 0; n < M; ++n) {
        if (artin_top_[n] < 0) continue;
        const i64 b = top.element(artin_top_[n]).a;
        if (chk.pow(n % chk.modulus(), spec_.p - 1) != chk.pow(kap, (spec_.p - 1) * static_cast<u64>(b)))
            throw IllDefined("artin assignment is incompatible with kappa_gamma at " + std::to_string(n));
    }
    // lower levels must only see n mod f0 p^(j+1)
    for (int j = spec_.depth; j < spec_.level; ++j) {
        const u64 Mj = modulus(j);
        std::vector<int> seen(Mj, -1);
        for (u64 n = 0; n < M; ++n) {
            if (artin_top_[n] < 0) continue;
            const int v = artin(n, j);
            int& s = seen[n % Mj];
            if (s >= 0 && s != v) throw IllDefined("artin assignment does not descend to level " + std::to_string(j));
            s = v;
        }
    }
}

int ZetaDatum::artin(u64 n, int j) const {
    const u64 Mj = modulus(j);
    const u64 r = n % Mj;
    if (std::gcd(r, Mj) != 1) throw std::invalid_argument("artin class of a non-unit");
    const int top = artin_top_[r];
    if (j == spec_.level) return top;
    const GroupModel& hi = model(spec_.level);
    const GroupModel& lo = model(j);
    return lo.index(lo.normalize(hi.element(top)));
}

u64 ZetaDatum::norm_power(i64 b, int k, int j) const {
    const Zmod ctx(spec_.p, f_ + j);
    const u64 kinv = ctx.inv(ctx.from_int(spec_.kappa_gamma));
    const u64 e = umod(b, ipow(spec_.p, j)) * static_cast<u64>(k);
    return ctx.pow(kinv, e);
}

const std::vector<CycloRational>& ZetaDatum::character_L_values(int j, int k) const {
    std::lock_guard<std::recursive_mutex> lock(*mu_);
    auto it = lvalues_.find({j, k});
    if (it != lvalues_.end()) return it->second;
    const GroupModel& G = model(j);
    const u64 pj = ipow(spec_.p, j);
    const auto& ord = spec_.orders;
    u64 m = std::lcm(pj, u64{2});
    for (u64 d : ord) m = std::lcm(m, d);
    const u64 Mj = modulus(j);
    // Artin image coordinates of each unit
    std::vector<std::pair<IntVec, i64>> img(Mj);
    std::vector<bool> unit(Mj, false);
    for (u64 n = 0; n < Mj; ++n) {
        if (std::gcd(n, Mj) != 1) continue;
        unit[n] = true;
        const GroupElement g = G.element(artin(n, j));
        img[n] = {g.h, g.a};
    }
    const u64 count = G.h_size() * pj;
    std::vector<CycloRational> out;
    out.reserve(count);
    for (u64 id = 0; id < count; ++id) {
        // id = t_0 + d_0 (t_1 + d_1 (... + s))
        u64 rest = id;
        std::vector<u64> t(ord.size());
        for (std::size_t r = 0; r < ord.size(); ++r) {
            t[r] = rest % ord[r];
            rest /= ord[r];
        }
        const u64 s = rest;
        std::vector<int> exps(Mj, -1);
        for (u64 n = 0; n < Mj; ++n) {
            if (!unit[n]) continue;
            unsigned __int128 e = 0;
            for (std::size_t r = 0; r < ord.size(); ++r)
                e += static_cast<unsigned __int128>(t[r]) * umod(img[n].first[r], ord[r]) * (m / ord[r]);
            e += static_cast<unsigned __int128>(s) * umod(img[n].second, pj) * (m / pj);
            exps[n] = static_cast<int>(e % m);
        }
        DirichletCharacter chi(Mj, static_cast<int>(m), std::move(exps));
        out.push_back(dirichlet_L_value(chi, k, spec_.sigma));
    }
    return lvalues_.emplace(std::make_pair(j, k), std::move(out)).first->second;
}

const std::vector<ExactRational>& ZetaDatum::layer_partial_zetas(int i, int j, int k) const {
    if (i < 0 || i > spec_.depth) throw std::invalid_argument("layer index out of range");
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    std::lock_guard<std::recursive_mutex> lock(*mu_);
    auto it = partial_.find({i, j, k});
    if (it != partial_.end()) return it->second;
    const GroupModel& G = model(j);
    const auto& Lv = character_L_values(j, k);
    const auto layer = G.layer(i, i);
    const int q = layer->group().order();
    const u64 pj = ipow(spec_.p, j);
    const u64 pji = ipow(spec_.p, j - i);
    const auto& ord = spec_.orders;
    u64 m = std::lcm(pj, u64{2});
    for (u64 d : ord) m = std::lcm(m, d);

    // group characters of G/Gamma^(j) by their restriction to the layer
    const u64 hs = G.h_size();
    std::map<u64, CycloRational> products;
    std::map<u64, u64> representative;
    for (u64 id = 0; id < Lv.size(); ++id) {
        const u64 tid = id % hs, s = id / hs;
        const u64 key = tid * pji + s % pji;
        auto [pos, fresh] = products.try_emplace(key, CycloRational(static_cast<int>(m), 1));
        pos->second = pos->second * Lv[id];
        if (fresh) representative[key] = id;
    }
    std::vector<ExactRational> out(static_cast<std::size_t>(q));
    for (int x = 0; x < q; ++x) {
        const auto [hq, a] = layer->decode(x);
        const IntVec h = layer->lift(hq);
        CycloRational acc(static_cast<int>(m));
        for (const auto& [key, prod] : products) {
            const u64 id = representative[key];
            u64 rest = id;
            unsigned __int128 e = 0;
            for (std::size_t r = 0; r < ord.size(); ++r) {
                e += static_cast<unsigned __int128>(rest % ord[r]) * umod(h[r], ord[r]) * (m / ord[r]);
                rest /= ord[r];
            }
            e += static_cast<unsigned __int128>(rest) * umod(a, pj) * (m / pj);
            acc = acc + prod.times_root(-static_cast<i64>(e % m));
        }
        if (!acc.is_rational()) throw IllDefined("partial zeta value did not come out rational");
        ExactRational v = acc.rational_part() / q;
        v.canonicalize();
        out[static_cast<std::size_t>(x)] = v;
    }
    return partial_.emplace(std::make_tuple(i, j, k), std::move(out)).first->second;
}

ZetaDatum parse_zeta_datum(const std::string& text) { return ZetaDatum(parse_zeta_datum_spec(text)); }

ZetaDatum load_zeta_datum(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open datum file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_zeta_datum(ss.str());
}

// ------------------------------------------------------------ Delta

LocallyConstantFn LocallyConstantFn::constant(const ZetaDatum& datum, int i, int level, const ExactRational& c) {
    const int q = datum.model(level).layer(i, i)->group().order();
    return LocallyConstantFn{i, level, std::vector<ExactRational>(static_cast<std::size_t>(q), c)};
}

LocallyConstantFn LocallyConstantFn::delta(const ZetaDatum& datum, int i, int level, int class_index) {
    auto f = constant(datum, i, level, 0);
    if (class_index < 0 || class_index >= static_cast<int>(f.values.size()))
        throw std::invalid_argument("class index out of range");
    f.values[static_cast<std::size_t>(class_index)] = 1;
    return f;
}

ExactRational partial_zeta_layer(const ZetaDatum& datum, int i, int level, int class_index, int k) {
    const auto& z = datum.layer_partial_zetas(i, level, k);
    if (class_index < 0 || class_index >= static_cast<int>(z.size())) throw std::invalid_argument("class index out of range");
    return z[static_cast<std::size_t>(class_index)];
}

namespace {

void check_fn(const ZetaDatum& datum, const LocallyConstantFn& eps) {
    const int q = datum.model(eps.level).layer(eps.layer, eps.layer)->group().order();
    if (static_cast<int>(eps.values.size()) != q) throw LevelMismatch("function does not live on the layer quotient");
}

// Delta_i(delta^(x), 1-k) for every class x
std::vector<ExactRational> class_deltas(const ZetaDatum& datum, int i, int level, int k) {
    const auto& z = datum.layer_partial_zetas(i, level, k);
    const auto layer = datum.model(level).layer(i, i);
    const i64 shift = static_cast<i64>(ipow(datum.p(), i));
    const ExactRational twist(zpow(datum.spec().kappa_gamma, static_cast<u64>(shift) * static_cast<u64>(k)));
    std::vector<ExactRational> out(z.size());
    for (std::size_t x = 0; x < z.size(); ++x) {
        const auto [hq, a] = layer->decode(static_cast<int>(x));
        const int y = layer->index(hq, a - shift);
        out[x] = z[x] - twist * z[static_cast<std::size_t>(y)];
        out[x].canonicalize();
    }
    return out;
}

}  // namespace

ExactRational layer_L_value(const ZetaDatum& datum, const LocallyConstantFn& eps, int k) {
    check_fn(datum, eps);
    const auto& z = datum.layer_partial_zetas(eps.layer, eps.level, k);
    ExactRational acc = 0;
    for (std::size_t x = 0; x < z.size(); ++x) acc += eps.values[x] * z[x];
    acc.canonicalize();
    return acc;
}

ExactRational delta_value(const ZetaDatum& datum, const LocallyConstantFn& eps, int k) {
    check_fn(datum, eps);
    const auto d = class_deltas(datum, eps.layer, eps.level, k);
    ExactRational acc = 0;
    for (std::size_t x = 0; x < d.size(); ++x) acc += eps.values[x] * d[x];
    acc.canonicalize();
    return acc;
}

RingElement zeta_approx(const ZetaDatum& datum, int i, int j, int k) {
    const u64 p = datum.p();
    if (k < 1 || static_cast<u64>(k) % (p - 1) != 0) throw std::invalid_argument("zeta_approx needs p-1 | k");
    const GroupModel& G = datum.model(j);
    const auto layer = G.layer(i, i);
    const Zmod ctx(p, datum.f() + j);
    const auto d = class_deltas(datum, i, j, k);
    RingElement out(layer->group_ptr(), ctx);
    for (std::size_t x = 0; x < d.size(); ++x) {
        if (d[x] != 0 && rational_valuation(d[x], p) < 0)
            throw NonIntegralDelta("Delta value " + to_string(d[x]) + " is not p-integral");
        const i64 b = layer->decode(static_cast<int>(x)).second;
        out.set(static_cast<int>(x), ctx.mul(reduce_rational(d[x], ctx), datum.norm_power(b, k, j)));
    }
    return out;
}

std::vector<RingElement> zeta_approx_tuple(const ZetaDatum& datum, int j, int k) {
    std::vector<RingElement> out;
    const int e = datum.depth();
    for (int i = 0; i <= e; ++i) out.push_back(zeta_approx(datum, i, j, k * static_cast<int>(ipow(datum.p(), e - i))));
    return out;
}

CongruenceResult dr_congruence_check(const ZetaDatum& datum, int i, int j_inv, const LocallyConstantFn& eps, int k) {
    if (i < 1 || i > datum.depth()) throw std::invalid_argument("dr congruence needs 1 <= i <= depth");
    if (eps.layer != i) throw LevelMismatch("function is not on layer i");
    if (j_inv < 0) throw std::invalid_argument("j_inv must be >= 0");
    check_fn(datum, eps);
    const GroupModel& G = datum.model(eps.level);
    const auto layer = G.layer(i, i);
    const i64 step = static_cast<i64>(ipow(datum.p(), j_inv));
    for (int x = 0; x < layer->group().order(); ++x)
        if (eps.values[static_cast<std::size_t>(x)] != eps.values[static_cast<std::size_t>(layer->conjugate_by_gamma(x, step))])
            throw std::invalid_argument("function is not fixed by the required power of gamma");

    LocallyConstantFn pulled = LocallyConstantFn::constant(datum, i - 1, eps.level, 0);
    for (std::size_t y = 0; y < pulled.values.size(); ++y)
        pulled.values[y] = eps.values[static_cast<std::size_t>(G.transfer_ver(i, static_cast<int>(y)))];

    CongruenceResult r;
    r.modulus_exponent = i - j_inv;
    r.lhs = delta_value(datum, eps, k);
    r.rhs = delta_value(datum, pulled, static_cast<int>(datum.p()) * k);
    const ExactRational diff = r.lhs - r.rhs;
    r.pass = r.modulus_exponent <= 0 || diff == 0 || rational_valuation(diff, datum.p()) >= r.modulus_exponent;
    return r;
}

bool ver_congruence_check(const GroupModel& model, const std::vector<RingElement>& z, int i) {
    if (i < 1 || i > model.e()) throw std::invalid_argument("ver congruence needs 1 <= i <= e");
    if (static_cast<int>(z.size()) != model.e() + 1) throw LevelMismatch("tuple length does not match the depth");
    for (int t = i - 1; t <= i; ++t) {
        const auto& zt = z[static_cast<std::size_t>(t)];
        if (zt.group().signature() != model.layer(t, t)->group().signature())
            throw LevelMismatch("entry " + std::to_string(t) + " is not on the layer quotient of this level");
    }
    if (z[static_cast<std::size_t>(i)].ctx() != z[static_cast<std::size_t>(i - 1)].ctx())
        throw LevelMismatch("entries have different precisions");
    const RingElement diff = z[static_cast<std::size_t>(i)] - ver_ring(model, i, z[static_cast<std::size_t>(i - 1)]);
    return in_layer_ideal(model, i, diff, LayerIdeal::trace);
}

u64 kummer_value(u64 p, int k) {
    ExactRational v = (ExactRational(1) - ExactRational(zpow(static_cast<i64>(p), static_cast<u64>(k - 1)))) * bernoulli(k) / k;
    v.canonicalize();
    return reduce_rational(v, Zmod(p, 1));
}

}  // namespace iwk1
