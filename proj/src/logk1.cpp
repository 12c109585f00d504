#include "iwk1/logk1.hpp"

#include <algorithm>
#include <cmath>

namespace iwk1 {

namespace {

constexpr int kMaxTerms = 20000;

int vp(u64 n, u64 p) {
    int v = 0;
    while (n % p == 0) { n /= p; ++v; }
    return v;
}

int max_exponent(u64 p) {
    int k = 0;
    unsigned __int128 m = 1;
    while (m * p < (static_cast<unsigned __int128>(1) << 62)) { m *= p; ++k; }
    return k;
}

void check_precision(u64 p, int W) {
    if (W > max_exponent(p))
        throw PrecisionExhausted("working precision p^" + std::to_string(W) + " exceeds 62-bit residues");
}

// Largest n whose term can still be nonzero mod p^target; lower(n) bounds the
// valuation of the n-th term.
template <class Lower>
int series_cutoff(int target, Lower lower) {
    int last = 0, clean_run = 0;
    for (int n = 1; n <= kMaxTerms; ++n) {
        if (lower(n) < target) {
            last = n;
            clean_run = 0;
        } else if (++clean_run > 4 * (last + 8)) {
            return last;
        }
    }
    throw PrecisionExhausted("series cutoff exceeds " + std::to_string(kMaxTerms) + " terms");
}

}  // namespace

// ------------------------------------------------------------ QRing/QTrace

QRing QRing::normalized() const {
    QRing r = *this;
    while (r.d > 0 && (r.num.is_zero() || r.num.valuation() >= 1)) {
        r.num = r.num.divide_ppow(1);
        --r.d;
    }
    return r;
}

RingElement QRing::value() const {
    QRing r = normalized();
    if (r.d > 0) throw IntegralityFailure("value has a denominator p^" + std::to_string(r.d));
    return r.num;
}

QTrace QTrace::normalized() const {
    QTrace r = *this;
    while (r.d > 0 && (r.num.is_zero() || r.num.valuation() >= 1)) {
        r.num = r.num.divide_ppow(1);
        --r.d;
    }
    return r;
}

TraceElement QTrace::value() const {
    QTrace r = normalized();
    if (r.d > 0) throw IntegralityFailure("trace value has a denominator p^" + std::to_string(r.d));
    return r.num;
}

QRing as_q(const RingElement& x) { return QRing{x, 0}; }
QTrace as_q(const TraceElement& x) { return QTrace{x, 0}; }

bool equal_mod(const QRing& a, const QRing& b, int prec) {
    if (prec > a.target() || prec > b.target())
        throw PrecisionExhausted("comparison at p^" + std::to_string(prec) + " exceeds the known precision");
    const u64 p = a.num.ctx().p();
    const int P = prec + a.d + b.d;
    const RingElement lhs = a.num.truncate(std::min(P, a.num.precision())).lift(P).scaled(ipow(p, b.d));
    const RingElement rhs = b.num.truncate(std::min(P, b.num.precision())).lift(P).scaled(ipow(p, a.d));
    return lhs.truncate(P) == rhs.truncate(P);
}

bool equal_mod(const QTrace& a, const QTrace& b, int prec) {
    if (prec > a.target() || prec > b.target())
        throw PrecisionExhausted("comparison at p^" + std::to_string(prec) + " exceeds the known precision");
    const u64 p = a.num.ctx().p();
    const int P = prec + a.d + b.d;
    const TraceElement lhs = a.num.truncate(std::min(P, a.num.precision())).lift(P).scaled(ipow(p, b.d));
    const TraceElement rhs = b.num.truncate(std::min(P, b.num.precision())).lift(P).scaled(ipow(p, a.d));
    return lhs.truncate(P) == rhs.truncate(P);
}

// --------------------------------------------------------------- series

QRing log_ring(const RingElement& x, int target) {
    const u64 p = x.ctx().p();
    if (target < 0) target = x.precision();
    if (x.augmentation() % p != 1 % p) throw NotAUnit("log needs augmentation 1 mod p");
    const RingElement one = RingElement::one(x.group_ptr(), x.ctx());
    const RingElement y = x - one;
    if (y.is_zero()) return QRing{RingElement(x.group_ptr(), Zmod(p, target)), 0};
    const int m = x.group().radical_nilpotency();
    const int v = y.valuation();
    auto lower = [&](int n) { return std::max(n / m, n * v) - vp(static_cast<u64>(n), p); };
    const int n_max = series_cutoff(target, lower);
    int D = 0;
    while (ipow(p, D + 1) <= static_cast<u64>(n_max)) ++D;
    const int W = target + D;
    check_precision(p, W);
    const Zmod ctx(p, W);
    const RingElement Y = y.lift(W);
    RingElement S(x.group_ptr(), ctx), P = Y;
    for (int n = 1; n <= n_max; ++n) {
        const int vn = vp(static_cast<u64>(n), p);
        const u64 unit = static_cast<u64>(n) / ipow(p, vn);
        u64 c = ctx.mul(ctx.ppow(D - vn), ctx.inv(unit % ctx.modulus()));
        if (n % 2 == 0) c = ctx.neg(c);
        S = S + P.scaled(c);
        if (n < n_max) {
            P = P * Y;
            if (P.is_zero()) break;
        }
    }
    return QRing{S, D}.normalized();
}

QTrace log_to_trace(const RingElement& x, int target) {
    QRing r = log_ring(x, target);
    return QTrace{to_trace(r.num), r.d}.normalized();
}

RingElement exp_ring(const RingElement& z, int target) {
    const u64 p = z.ctx().p();
    if (target < 0) target = z.precision();
    if (!z.is_zero() && z.valuation() < 1) throw NotInIdeal("exp needs coefficients divisible by p");
    if (z.is_zero()) return RingElement::one(z.group_ptr(), Zmod(p, target));
    const int v = z.valuation();
    // v_p(n!) via Legendre
    auto vfact = [&](int n) {
        int s = 0;
        for (u64 q = p; q <= static_cast<u64>(n); q *= p) s += static_cast<int>(static_cast<u64>(n) / q);
        return s;
    };
    const int n_max = series_cutoff(target, [&](int n) { return n * v - vfact(n); });
    const int D = vfact(n_max);
    const int W = target + D;
    check_precision(p, W);
    const Zmod ctx(p, W);
    const RingElement Z = z.lift(W);
    RingElement S = RingElement::scalar(z.group_ptr(), ctx, ctx.ppow(D)), P = Z;
    u64 unit_fact = 1;
    for (int n = 1; n <= n_max; ++n) {
        u64 un = static_cast<u64>(n);
        while (un % p == 0) un /= p;
        unit_fact = ctx.mul(unit_fact, un % ctx.modulus());
        const u64 c = ctx.mul(ctx.ppow(D - vfact(n)), ctx.inv(unit_fact));
        S = S + P.scaled(c);
        if (n < n_max) P = P * Z;
    }
    return QRing{S, D}.value();
}

u64 teichmuller(u64 a, const Zmod& ctx) {
    u64 c = a % ctx.modulus();
    if (c % ctx.p() == 0) throw NotAUnit("Teichmuller lift of a non-unit");
    for (int k = 0; k < ctx.N(); ++k) c = ctx.pow(c, ctx.p());
    return c;
}

// ------------------------------------------------------- integral log

TraceElement scalar_L(const GroupModel& model, u64 s, const Zmod& ctx) {
    const u64 p = ctx.p();
    const int T = ctx.N() + 1;
    check_precision(p, T);
    const Zmod hi(p, T);
    const u64 u = hi.pow(s % hi.modulus(), p - 1);
    QTrace lg = log_to_trace(RingElement::scalar(model.group_ptr(), hi, u), T);
    // log(u) lies in p Z_p; (1/p) log(u) is known mod p^N
    QTrace r{lg.num, lg.d + 1};
    r = r.normalized();
    if (r.d > 0) throw IntegralityFailure("scalar L has a denominator");
    return r.num.truncate(ctx.N());
}

TraceElement integral_log_L(const GroupModel& model, const RingElement& x) {
    if (!x.is_unit()) throw NotAUnit("integral log needs a unit");
    if (x.group().signature() != model.group().signature()) throw ModelMismatch("integral log expects an element of G");
    const u64 p = x.ctx().p();
    const int N = x.precision();
    const int T = N + 1;
    check_precision(p, T);
    const Zmod hi(p, T);
    const u64 c = teichmuller(x.augmentation() % p, hi);
    const RingElement x1 = x.lift(T).scaled(hi.inv(c));
    QTrace lg = log_to_trace(x1, T);
    // p log - phi(log), then divide by p^(d+1)
    const TraceElement num = lg.num.scaled(p) - phi_trace(lg.num);
    const int k = lg.d + 1;
    if (!num.is_zero() && num.valuation() < k)
        throw IntegralityFailure("p log(x) - phi(log(x)) is not divisible by p^" + std::to_string(k));
    TraceElement out = num.divide_ppow(k).truncate(N);
    // c is a (p-1)-st root of unity; its L vanishes, but evaluate it anyway
    return out + scalar_L(model, c, x.ctx());
}

bool frobenius_integrality_check(const RingElement& x, int n) {
    if (n < 1 || n > x.precision()) throw std::invalid_argument("need 1 <= n <= N");
    const u64 p = x.ctx().p();
    const RingElement a = x.pow(ipow(p, n));
    const RingElement b = phi_ring(x.pow(ipow(p, n - 1)));
    const TraceElement diff = to_trace(a - b);
    return diff.is_zero() || diff.valuation() >= n;
}

RingElement m4_expression(const GroupModel& model, int i, const RingElement& xi, const RingElement& xprev) {
    const u64 p = model.p();
    const RingElement v = ver_ring(model, i, xprev);
    const RingElement ratio = xi * v.inverse();
    const RingElement twisted = ver_ring(model, i, omega_twist_product(model, i, xprev));
    return ratio.pow(p) * twisted * phi_ring(xi).inverse();
}

bool layer_L_compat(const GroupModel& model, int i, const RingElement& x, CompatForm form) {
    if (i < 1 || i > model.e()) throw std::invalid_argument("layer_L_compat needs 1 <= i <= e");
    const int N = x.precision();
    const TraceElement Lx = integral_log_L(model, x);
    const RingElement lhs = beta(model, i, Lx);
    const RingElement ti = theta(model, i, x);
    const RingElement tprev = theta(model, i - 1, x);
    if (form == CompatForm::general) {
        const RingElement E = m4_expression(model, i, ti, tprev);
        QRing lg = log_ring(E, N);
        QRing rhs{lg.num, lg.d + 1};
        return equal_mod(as_q(lhs), rhs.normalized(), N - 1);
    }
    const RingElement ratio = ti * ver_ring(model, i, tprev).inverse();
    return equal_mod(as_q(lhs), log_ring(ratio, N), N - 1);
}

}  // namespace iwk1
