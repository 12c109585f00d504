#pragma once

// p-adic logarithm and exponential on finite group rings, and the integral
// logarithm into the trace quotient.

#include "iwk1/groupmodel.hpp"
#include "iwk1/groupring.hpp"
#include "iwk1/k1maps.hpp"

namespace iwk1 {

// num / p^d, with num held at precision target + d so the value is known
// modulo p^target.
struct QRing {
    RingElement num;
    int d = 0;
    int target() const { return num.precision() - d; }
    bool integral() const { return d == 0; }
    // Removes common factors of p from num and d.
    QRing normalized() const;
    // The value as an integral element; throws IntegralityFailure if d > 0.
    RingElement value() const;
};

struct QTrace {
    TraceElement num;
    int d = 0;
    int target() const { return num.precision() - d; }
    QTrace normalized() const;
    TraceElement value() const;
};

// Equality of a/p^d1 and b/p^d2 modulo p^prec.
bool equal_mod(const QRing& a, const QRing& b, int prec);
bool equal_mod(const QTrace& a, const QTrace& b, int prec);
QRing as_q(const RingElement& x);
QTrace as_q(const TraceElement& x);

// log(x) = sum (-1)^(n-1) (x-1)^n / n for x with augmentation 1 mod p,
// evaluated on the canonical lift of x and certified modulo p^target
// (default: the precision of x).  The cutoff uses the nilpotency m of the
// augmentation ideal mod p and the valuation of x-1.
QRing log_ring(const RingElement& x, int target = -1);
QTrace log_to_trace(const RingElement& x, int target = -1);

// exp(z) for z in p*ring, modulo p^target (default: precision of z).
RingElement exp_ring(const RingElement& z, int target = -1);

// Teichmuller representative of a mod p in Z/p^N.
u64 teichmuller(u64 a, const Zmod& ctx);

// L(x) = L(c) + (1/p)(p log x1 - phi(log x1)) with x = c x1, c Teichmuller.
// The value is computed from the canonical lift at precision N; as a function
// of x mod p^N it is meaningful modulo p^(N-1).
TraceElement integral_log_L(const GroupModel& model, const RingElement& x);
// L on a scalar unit s: (1/p) log(s^(p-1)) on the identity class.
TraceElement scalar_L(const GroupModel& model, u64 s, const Zmod& ctx);

// x^(p^n) - phi(x^(p^(n-1))) is divisible by p^n in the trace quotient.
bool frobenius_integrality_check(const RingElement& x, int n);

enum class CompatForm { general, special };
// beta_i(L(x)) against (1/p) log of the M4 expression for theta(x) (general)
// or log(theta_i(x) / ver_i(theta_{i-1}(x))) (special type), mod p^(N-1).
bool layer_L_compat(const GroupModel& model, int i, const RingElement& x, CompatForm form);

// The M4 expression ((x_i/ver x_{i-1})^p) ver(prod_k omega^k x_{i-1}) / phi(x_i).
RingElement m4_expression(const GroupModel& model, int i, const RingElement& xi, const RingElement& xprev);

}  // namespace iwk1
