#include "iwk1/exactnum.hpp"

#include <map>
#include <mutex>
#include <sstream>

namespace iwk1 {

bool is_prime(u64 n) {
    if (n < 2) return false;
    for (u64 d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

u64 ipow(u64 base, int e) {
    u64 r = 1;
    for (int i = 0; i < e; ++i) r *= base;
    return r;
}

Zmod::Zmod(u64 p, int N) : p_(p), N_(N) {
    if (p < 3 || !is_prime(p)) throw std::invalid_argument("modulus prime must be an odd prime");
    if (N < 0) throw std::invalid_argument("precision must be non-negative");
    unsigned __int128 m = 1;
    for (int i = 0; i < N; ++i) {
        m *= p;
        if (m >= (static_cast<unsigned __int128>(1) << 62))
            throw std::invalid_argument("p^N does not fit the 62-bit residue kernel");
    }
    m_ = static_cast<u64>(m);
}

u64 Zmod::pow(u64 a, u64 e) const {
    u64 r = 1 % m_, b = a % m_;
    while (e) {
        if (e & 1) r = mul(r, b);
        b = mul(b, b);
        e >>= 1;
    }
    return r;
}

u64 Zmod::pow_big(u64 a, const BigInt& e) const {
    BigInt r = 0;
    mpz_powm(r.get_mpz_t(), BigInt(static_cast<unsigned long>(a)).get_mpz_t(), e.get_mpz_t(),
             BigInt(static_cast<unsigned long>(m_)).get_mpz_t());
    return r.get_ui();
}

u64 Zmod::inv(u64 a) const {
    if (m_ == 1) return 0;
    if (a % p_ == 0) throw DivisionByZero("residue " + std::to_string(a) + " is not a unit mod " + std::to_string(m_));
    // extended gcd on signed 128-bit
    __int128 t = 0, nt = 1, r = m_, nr = a % m_;
    while (nr != 0) {
        __int128 q = r / nr;
        __int128 tmp = t - q * nt; t = nt; nt = tmp;
        tmp = r - q * nr; r = nr; nr = tmp;
    }
    if (t < 0) t += m_;
    return static_cast<u64>(t);
}

u64 Zmod::from_int(i64 v) const {
    i64 r = v % static_cast<i64>(m_);
    if (r < 0) r += static_cast<i64>(m_);
    return static_cast<u64>(r);
}

u64 Zmod::from_big(const BigInt& v) const {
    BigInt r;
    mpz_fdiv_r(r.get_mpz_t(), v.get_mpz_t(), BigInt(static_cast<unsigned long>(m_)).get_mpz_t());
    return r.get_ui();
}

int Zmod::val(u64 a) const {
    if (a == 0) return N_;
    int v = 0;
    while (a % p_ == 0) { a /= p_; ++v; }
    return v;
}

u64 Zmod::ppow(int k) const {
    if (k >= N_) return 0;
    return ipow(p_, k);
}

u64 Zmod::div_ppow(u64 a, int k) const {
    u64 d = ipow(p_, k);
    return (a / d) % m_;
}

// ---------------------------------------------------------------- Residue

Residue::Residue(u64 p, int N, i64 value) : ctx_(p, N), value_(ctx_.from_int(value)) {
    if (N < 1) throw std::invalid_argument("residue precision must be >= 1");
}

Residue::Residue(const Zmod& ctx, u64 value, std::vector<std::string> ledger)
    : ctx_(ctx), value_(value % ctx.modulus()), ledger_(std::move(ledger)) {}

Residue Residue::from_raw(const Zmod& ctx, u64 value) { return Residue(ctx, value, {}); }

std::pair<Zmod, std::vector<std::string>> Residue::common(const Residue& a, const Residue& b) {
    if (a.p() != b.p()) throw ModulusMismatch("residues over different primes");
    std::vector<std::string> led = a.ledger_;
    led.insert(led.end(), b.ledger_.begin(), b.ledger_.end());
    if (a.precision() != b.precision()) {
        int n = std::min(a.precision(), b.precision());
        led.push_back("truncated from " + std::to_string(std::max(a.precision(), b.precision())) +
                      " to " + std::to_string(n) + " digits");
        return {Zmod(a.p(), n), led};
    }
    return {a.ctx_, led};
}

Residue Residue::operator+(const Residue& o) const {
    auto [c, led] = common(*this, o);
    return Residue(c, c.add(value_ % c.modulus(), o.value_ % c.modulus()), led);
}
Residue Residue::operator-(const Residue& o) const {
    auto [c, led] = common(*this, o);
    return Residue(c, c.sub(value_ % c.modulus(), o.value_ % c.modulus()), led);
}
Residue Residue::operator*(const Residue& o) const {
    auto [c, led] = common(*this, o);
    return Residue(c, c.mul(value_ % c.modulus(), o.value_ % c.modulus()), led);
}
Residue Residue::operator-() const { return Residue(ctx_, ctx_.neg(value_), ledger_); }

Residue Residue::truncate(int N) const {
    if (N >= precision()) return *this;
    auto led = ledger_;
    led.push_back("truncated from " + std::to_string(precision()) + " to " + std::to_string(N) + " digits");
    Zmod c(p(), N);
    return Residue(c, value_ % c.modulus(), led);
}

bool Residue::operator==(const Residue& o) const {
    return p() == o.p() && precision() == o.precision() && value_ == o.value_;
}

std::optional<int> valuation(const Residue& x) {
    if (x.value() == 0) return std::nullopt;
    return x.ctx().val(x.value());
}

u64 reduce_rational(const ExactRational& q, const Zmod& ctx) {
    BigInt den = q.get_den();
    BigInt pp(static_cast<unsigned long>(ctx.p()));
    if (den % pp == 0)
        throw DenominatorDivisible("denominator of " + q.get_str() + " is divisible by " + std::to_string(ctx.p()));
    u64 n = ctx.from_big(q.get_num());
    u64 d = ctx.from_big(den);
    return ctx.mul(n, ctx.inv(d));
}

Residue reduce_mod_pN(const ExactRational& q, u64 p, int N) {
    Zmod ctx(p, N);
    return Residue::from_raw(ctx, reduce_rational(q, ctx));
}

int rational_valuation(const ExactRational& q, u64 p) {
    if (q == 0) throw std::invalid_argument("valuation of zero rational");
    BigInt pp(static_cast<unsigned long>(p));
    int v = 0;
    BigInt n = q.get_num(), d = q.get_den();
    while (n % pp == 0) { n /= pp; ++v; }
    while (d % pp == 0) { d /= pp; --v; }
    return v;
}

std::string to_string(const ExactRational& q) { return q.get_str(); }

// ------------------------------------------------------------- cyclotomic

int euler_phi(int m) {
    int r = m, n = m;
    for (int d = 2; d * d <= n; ++d) {
        if (n % d == 0) {
            while (n % d == 0) n /= d;
            r -= r / d;
        }
    }
    if (n > 1) r -= r / n;
    return r;
}

namespace {

using IPoly = std::vector<BigInt>;

// exact division of a by a monic b over Z
IPoly poly_div_exact(IPoly a, const IPoly& b) {
    std::size_t db = b.size() - 1;
    if (a.size() < b.size()) return {BigInt(0)};
    IPoly q(a.size() - db, BigInt(0));
    for (std::size_t k = a.size(); k-- > db;) {
        BigInt c = a[k];
        q[k - db] = c;
        if (c != 0)
            for (std::size_t i = 0; i <= db; ++i) a[k - db + i] -= c * b[i];
    }
    return q;
}

IPoly cyclotomic_poly(int m) {
    static std::map<int, IPoly> cache;
    static std::mutex mu;
    {
        std::lock_guard<std::mutex> lk(mu);
        auto it = cache.find(m);
        if (it != cache.end()) return it->second;
    }
    IPoly num(static_cast<std::size_t>(m) + 1, BigInt(0));
    num[0] = -1;
    num[static_cast<std::size_t>(m)] = 1;
    for (int d = 1; d < m; ++d)
        if (m % d == 0) num = poly_div_exact(num, cyclotomic_poly(d));
    std::lock_guard<std::mutex> lk(mu);
    cache[m] = num;
    return num;
}

}  // namespace

CycloField::CycloField(int m) : m_(m) {
    if (m < 1) throw std::invalid_argument("cyclotomic modulus must be >= 1");
    phi_ = cyclotomic_poly(m);
    deg_ = static_cast<int>(phi_.size()) - 1;
    powers_.resize(static_cast<std::size_t>(m));
    std::vector<BigInt> cur(static_cast<std::size_t>(deg_), BigInt(0));
    cur[0] = 1;
    for (int e = 0; e < m; ++e) {
        powers_[static_cast<std::size_t>(e)] = cur;
        // multiply by x and reduce with the monic relation
        BigInt top = cur[static_cast<std::size_t>(deg_ - 1)];
        for (int i = deg_ - 1; i > 0; --i) cur[static_cast<std::size_t>(i)] = cur[static_cast<std::size_t>(i - 1)];
        cur[0] = 0;
        if (top != 0)
            for (int i = 0; i < deg_; ++i) cur[static_cast<std::size_t>(i)] -= top * phi_[static_cast<std::size_t>(i)];
    }
}

std::shared_ptr<const CycloField> cyclo_field(int m) {
    static std::map<int, std::shared_ptr<const CycloField>> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lk(mu);
    auto it = cache.find(m);
    if (it != cache.end()) return it->second;
    auto f = std::make_shared<const CycloField>(m);
    cache[m] = f;
    return f;
}

CycloRational::CycloRational(int m) : field_(cyclo_field(m)), c_(static_cast<std::size_t>(field_->degree())) {}

CycloRational::CycloRational(int m, const ExactRational& c) : CycloRational(m) { c_[0] = c; }

CycloRational CycloRational::root(int m, i64 e) {
    CycloRational r(m);
    i64 k = ((e % m) + m) % m;
    const auto& pw = r.field_->power(static_cast<int>(k));
    for (std::size_t i = 0; i < pw.size(); ++i) r.c_[i] = pw[i];
    return r;
}

void CycloRational::check_same(const CycloRational& o) const {
    if (modulus() != o.modulus())
        throw ModulusMismatch("cyclotomic moduli " + std::to_string(modulus()) + " and " + std::to_string(o.modulus()));
}

bool CycloRational::is_zero() const {
    for (const auto& x : c_)
        if (x != 0) return false;
    return true;
}

bool CycloRational::is_rational() const {
    for (std::size_t i = 1; i < c_.size(); ++i)
        if (c_[i] != 0) return false;
    return true;
}

CycloRational CycloRational::operator+(const CycloRational& o) const {
    check_same(o);
    CycloRational r = *this;
    for (std::size_t i = 0; i < c_.size(); ++i) r.c_[i] += o.c_[i];
    return r;
}

CycloRational CycloRational::operator-(const CycloRational& o) const {
    check_same(o);
    CycloRational r = *this;
    for (std::size_t i = 0; i < c_.size(); ++i) r.c_[i] -= o.c_[i];
    return r;
}

CycloRational CycloRational::operator-() const {
    CycloRational r = *this;
    for (auto& x : r.c_) x = -x;
    return r;
}

CycloRational CycloRational::scaled(const ExactRational& s) const {
    CycloRational r = *this;
    for (auto& x : r.c_) x *= s;
    return r;
}

CycloRational CycloRational::operator*(const CycloRational& o) const {
    check_same(o);
    const int d = field_->degree();
    std::vector<ExactRational> prod(static_cast<std::size_t>(2 * d - 1));
    for (int i = 0; i < d; ++i) {
        if (c_[static_cast<std::size_t>(i)] == 0) continue;
        for (int j = 0; j < d; ++j)
            if (o.c_[static_cast<std::size_t>(j)] != 0)
                prod[static_cast<std::size_t>(i + j)] += c_[static_cast<std::size_t>(i)] * o.c_[static_cast<std::size_t>(j)];
    }
    const auto& phi = field_->poly();
    for (int k = 2 * d - 2; k >= d; --k) {
        ExactRational c = prod[static_cast<std::size_t>(k)];
        if (c == 0) continue;
        for (int i = 0; i < d; ++i)
            prod[static_cast<std::size_t>(k - d + i)] -= c * ExactRational(phi[static_cast<std::size_t>(i)]);
        prod[static_cast<std::size_t>(k)] = 0;
    }
    CycloRational r(modulus());
    for (int i = 0; i < d; ++i) r.c_[static_cast<std::size_t>(i)] = prod[static_cast<std::size_t>(i)];
    return r;
}

CycloRational CycloRational::times_root(i64 e) const {
    const int m = modulus();
    CycloRational r(m);
    for (std::size_t i = 0; i < c_.size(); ++i) {
        if (c_[i] == 0) continue;
        i64 k = ((static_cast<i64>(i) + e) % m + m) % m;
        const auto& pw = field_->power(static_cast<int>(k));
        for (std::size_t t = 0; t < pw.size(); ++t)
            if (pw[t] != 0) r.c_[t] += c_[i] * ExactRational(pw[t]);
    }
    return r;
}

namespace {

using QPoly = std::vector<ExactRational>;

void trim(QPoly& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

// a = q*b + r
void divmod(const QPoly& a, const QPoly& b, QPoly& q, QPoly& r) {
    r = a;
    trim(r);
    q.assign(r.size() >= b.size() ? r.size() - b.size() + 1 : 1, ExactRational(0));
    const ExactRational lead = b.back();
    while (r.size() >= b.size() && !r.empty()) {
        std::size_t shift = r.size() - b.size();
        ExactRational c = r.back() / lead;
        q[shift] = c;
        for (std::size_t i = 0; i < b.size(); ++i) r[shift + i] -= c * b[i];
        trim(r);
    }
}

QPoly sub_mul(const QPoly& a, const QPoly& q, const QPoly& b) {
    QPoly prod(q.size() + b.size(), ExactRational(0));
    for (std::size_t i = 0; i < q.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) prod[i + j] += q[i] * b[j];
    QPoly r(std::max(a.size(), prod.size()), ExactRational(0));
    for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (std::size_t i = 0; i < prod.size(); ++i) r[i] -= prod[i];
    trim(r);
    return r;
}

}  // namespace

CycloRational CycloRational::inv() const {
    if (is_zero()) throw DivisionByZero("inverse of zero in Q(zeta_" + std::to_string(modulus()) + ")");
    // extended Euclid: s*a + t*phi = g
    QPoly a(c_.begin(), c_.end());
    trim(a);
    QPoly phi;
    for (const auto& x : field_->poly()) phi.emplace_back(x);
    QPoly r0 = phi, r1 = a, s0 = {ExactRational(0)}, s1 = {ExactRational(1)};
    while (!r1.empty()) {
        QPoly q, r;
        divmod(r0, r1, q, r);
        QPoly s2 = sub_mul(s0, q, s1);
        r0 = r1; r1 = r;
        s0 = s1; s1 = s2;
    }
    // r0 is a nonzero constant because phi is irreducible
    if (r0.size() != 1) throw DivisionByZero("element is not invertible");
    CycloRational res(modulus());
    ExactRational c = 1 / r0[0];
    // reduce s0 modulo phi
    QPoly q, rem;
    trim(s0);
    if (s0.empty()) s0 = {ExactRational(0)};
    divmod(s0, phi, q, rem);
    for (std::size_t i = 0; i < rem.size(); ++i) res.c_[i] = rem[i] * c;
    return res;
}

bool CycloRational::operator==(const CycloRational& o) const {
    check_same(o);
    return c_ == o.c_;
}

std::string CycloRational::str() const {
    std::ostringstream os;
    bool first = true;
    for (std::size_t i = 0; i < c_.size(); ++i) {
        if (c_[i] == 0) continue;
        if (!first) os << " + ";
        first = false;
        os << c_[i].get_str();
        if (i > 0) os << "*z^" << i;
    }
    if (first) os << "0";
    return os.str();
}

CycloRational cyclo_arith(const CycloRational& a, const CycloRational& b, CycloOp op) {
    switch (op) {
        case CycloOp::add: return a + b;
        case CycloOp::mul: return a * b;
        case CycloOp::inv: return a.inv();
    }
    return a;
}

}  // namespace iwk1
