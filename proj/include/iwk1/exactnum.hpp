#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "iwk1/errors.hpp"

namespace iwk1 {

using u64 = std::uint64_t;
using i64 = std::int64_t;

using ExactRational = mpq_class;
using BigInt = mpz_class;

bool is_prime(u64 n);

// Arithmetic context for Z/p^N.  Values are kept in [0, p^N).
class Zmod {
public:
    Zmod() = default;
    Zmod(u64 p, int N);

    u64 p() const { return p_; }
    int N() const { return N_; }
    u64 modulus() const { return m_; }

    u64 add(u64 a, u64 b) const { u64 s = a + b; return s >= m_ ? s - m_ : s; }
    u64 sub(u64 a, u64 b) const { return a >= b ? a - b : a + m_ - b; }
    u64 neg(u64 a) const { return a == 0 ? 0 : m_ - a; }
    u64 mul(u64 a, u64 b) const {
        return static_cast<u64>((static_cast<unsigned __int128>(a) * b) % m_);
    }
    u64 pow(u64 a, u64 e) const;
    u64 pow_big(u64 a, const BigInt& e) const;
    // Inverse of a unit; throws DivisionByZero if p | a.
    u64 inv(u64 a) const;
    u64 from_int(i64 v) const;
    u64 from_big(const BigInt& v) const;
    // p-adic valuation, N when a == 0.
    int val(u64 a) const;
    // p^k as an element (0 when k >= N).
    u64 ppow(int k) const;
    // Exact division by p^k; caller guarantees divisibility.  Result is only
    // meaningful modulo p^(N-k).
    u64 div_ppow(u64 a, int k) const;
    bool operator==(const Zmod& o) const { return p_ == o.p_ && N_ == o.N_; }
    bool operator!=(const Zmod& o) const { return !(*this == o); }

private:
    u64 p_ = 3;
    int N_ = 1;
    u64 m_ = 3;
};

u64 ipow(u64 base, int e);

// A residue modulo p^N.  Mixed-precision arithmetic truncates to the smaller
// precision and appends a ledger note so the loss is visible afterwards.
class Residue {
public:
    Residue(u64 p, int N, i64 value);
    static Residue from_raw(const Zmod& ctx, u64 value);

    u64 value() const { return value_; }
    u64 p() const { return ctx_.p(); }
    int precision() const { return ctx_.N(); }
    const Zmod& ctx() const { return ctx_; }
    const std::vector<std::string>& ledger() const { return ledger_; }

    Residue operator+(const Residue& o) const;
    Residue operator-(const Residue& o) const;
    Residue operator*(const Residue& o) const;
    Residue operator-() const;
    Residue truncate(int N) const;
    bool operator==(const Residue& o) const;

private:
    Residue(const Zmod& ctx, u64 value, std::vector<std::string> ledger);
    static std::pair<Zmod, std::vector<std::string>> common(const Residue& a, const Residue& b);

    Zmod ctx_;
    u64 value_ = 0;
    std::vector<std::string> ledger_;
};

// nullopt stands for "at least N" (the residue is zero).
std::optional<int> valuation(const Residue& x);

Residue reduce_mod_pN(const ExactRational& q, u64 p, int N);
// Same as above but returns the raw value in a given context.
u64 reduce_rational(const ExactRational& q, const Zmod& ctx);
// v_p of a nonzero rational.
int rational_valuation(const ExactRational& q, u64 p);
std::string to_string(const ExactRational& q);

// The m-th cyclotomic field Q(zeta_m) on the power basis 1..zeta^(phi(m)-1).
class CycloField {
public:
    explicit CycloField(int m);
    int m() const { return m_; }
    int degree() const { return deg_; }
    // Integer coefficients of the m-th cyclotomic polynomial, low to high.
    const std::vector<BigInt>& poly() const { return phi_; }
    // zeta^e reduced to the power basis, for 0 <= e < m.
    const std::vector<BigInt>& power(int e) const { return powers_[static_cast<std::size_t>(e)]; }

private:
    int m_;
    int deg_;
    std::vector<BigInt> phi_;
    std::vector<std::vector<BigInt>> powers_;
};

std::shared_ptr<const CycloField> cyclo_field(int m);
int euler_phi(int m);

class CycloRational {
public:
    explicit CycloRational(int m);
    CycloRational(int m, const ExactRational& c);
    static CycloRational root(int m, i64 e);

    int modulus() const { return field_->m(); }
    const std::vector<ExactRational>& coords() const { return c_; }
    const std::shared_ptr<const CycloField>& field() const { return field_; }

    bool is_zero() const;
    bool is_rational() const;
    ExactRational rational_part() const { return c_[0]; }

    CycloRational operator+(const CycloRational& o) const;
    CycloRational operator-(const CycloRational& o) const;
    CycloRational operator*(const CycloRational& o) const;
    CycloRational operator-() const;
    CycloRational scaled(const ExactRational& s) const;
    CycloRational inv() const;
    // Multiply by zeta^e without a full product.
    CycloRational times_root(i64 e) const;
    bool operator==(const CycloRational& o) const;
    bool operator!=(const CycloRational& o) const { return !(*this == o); }
    std::string str() const;

private:
    void check_same(const CycloRational& o) const;
    std::shared_ptr<const CycloField> field_;
    std::vector<ExactRational> c_;
};

enum class CycloOp { add, mul, inv };
CycloRational cyclo_arith(const CycloRational& a, const CycloRational& b, CycloOp op);

}  // namespace iwk1
