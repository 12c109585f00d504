#pragma once

// Group rings Z/p^N[Q] of finite quotients, the trace quotient, trace ideals
// on abelianization layers and denominator-cleared fractions.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "iwk1/exactnum.hpp"
#include "iwk1/groupmodel.hpp"
#include "iwk1/linalg.hpp"

namespace iwk1 {

class RingElement {
public:
    RingElement(std::shared_ptr<const FiniteGroup> group, const Zmod& ctx);
    static RingElement one(std::shared_ptr<const FiniteGroup> group, const Zmod& ctx);
    static RingElement basis(std::shared_ptr<const FiniteGroup> group, const Zmod& ctx, int g, u64 coeff = 1);
    static RingElement scalar(std::shared_ptr<const FiniteGroup> group, const Zmod& ctx, u64 c);

    const FiniteGroup& group() const { return *group_; }
    const std::shared_ptr<const FiniteGroup>& group_ptr() const { return group_; }
    const Zmod& ctx() const { return ctx_; }
    int precision() const { return ctx_.N(); }
    int size() const { return static_cast<int>(c_.size()); }
    const std::vector<u64>& coeffs() const { return c_; }
    u64 coeff(int g) const { return c_[static_cast<std::size_t>(g)]; }
    void set(int g, u64 v) { c_[static_cast<std::size_t>(g)] = v % ctx_.modulus(); }
    void add_to(int g, u64 v) { c_[static_cast<std::size_t>(g)] = ctx_.add(c_[static_cast<std::size_t>(g)], v % ctx_.modulus()); }
    const std::vector<std::string>& ledger() const { return ledger_; }

    bool is_zero() const;
    u64 augmentation() const;
    // Units are exactly the elements with augmentation prime to p (the ring
    // is local for p-groups).
    bool is_unit() const;
    RingElement inverse() const;
    RingElement pow(u64 e) const;
    RingElement scaled(u64 c) const;
    // g x g^-1
    RingElement conjugate(int g) const;
    // Reduce to a smaller precision, or lift canonically to a larger one.
    RingElement truncate(int N) const;
    RingElement lift(int N) const;
    // Smallest v_p over the coefficients (N for zero).
    int valuation() const;
    // Every coefficient divisible by p^k; returns the quotient at precision N-k.
    RingElement divide_ppow(int k) const;

    RingElement operator+(const RingElement& o) const;
    RingElement operator-(const RingElement& o) const;
    RingElement operator*(const RingElement& o) const;
    RingElement operator-() const;
    bool operator==(const RingElement& o) const;
    bool operator!=(const RingElement& o) const { return !(*this == o); }

private:
    void check_same_group(const RingElement& o) const;
    std::pair<Zmod, std::vector<std::string>> common(const RingElement& o) const;

    std::shared_ptr<const FiniteGroup> group_;
    Zmod ctx_;
    std::vector<u64> c_;
    std::vector<std::string> ledger_;
};

// Coefficients on conjugacy classes.
class TraceElement {
public:
    TraceElement(std::shared_ptr<const FiniteGroup> group, const Zmod& ctx);

    const FiniteGroup& group() const { return *group_; }
    const std::shared_ptr<const FiniteGroup>& group_ptr() const { return group_; }
    const Zmod& ctx() const { return ctx_; }
    int precision() const { return ctx_.N(); }
    const std::vector<u64>& coeffs() const { return c_; }
    u64 coeff(int cls) const { return c_[static_cast<std::size_t>(cls)]; }
    void set(int cls, u64 v) { c_[static_cast<std::size_t>(cls)] = v % ctx_.modulus(); }

    bool is_zero() const;
    int valuation() const;
    TraceElement truncate(int N) const;
    TraceElement lift(int N) const;
    TraceElement scaled(u64 c) const;
    TraceElement divide_ppow(int k) const;
    TraceElement operator+(const TraceElement& o) const;
    TraceElement operator-(const TraceElement& o) const;
    bool operator==(const TraceElement& o) const;
    bool operator!=(const TraceElement& o) const { return !(*this == o); }

private:
    std::shared_ptr<const FiniteGroup> group_;
    Zmod ctx_;
    std::vector<u64> c_;
};

TraceElement to_trace(const RingElement& x);
// Sum of the class members with the trace coefficients (a section of to_trace
// only up to class sizes; used for building test inputs).
RingElement class_sum(const TraceElement& t);

// Ideals of the layer-i ring Z/p^N[G_i^ab] used by the membership checks.
enum class LayerIdeal {
    trace,       // T_i: image of x -> sum_{k<p^i} g^k x g^-k
    d_plus_p,    // D_i + (p), D_i from the p conjugates by g^{p^{i-1}}
    p_trace,     // p T_i
};

struct Membership {
    bool member = false;
    // z with (orbit map)(z) = x, for trace and p_trace (then p*map(z) = x)
    std::optional<RingElement> witness;
};

Membership layer_ideal_membership(const GroupModel& model, int i, const RingElement& x, LayerIdeal ideal);
bool in_layer_ideal(const GroupModel& model, int i, const RingElement& x, LayerIdeal ideal);
// The orbit-sum map defining T_i, applied to z.
RingElement trace_orbit_sum(const GroupModel& model, int i, const RingElement& z);
// Conjugation by gamma^k on the layer-(q,s) ring.
RingElement layer_gamma_conjugate(const AbelianLayer& layer, const RingElement& x, i64 k);

// a/t with t in the central Gamma^(e) part, a unit modulo p.
class FractionElement {
public:
    FractionElement(const GroupModel& model, RingElement numerator, RingElement denominator);
    static FractionElement whole(const GroupModel& model, const RingElement& a);

    const RingElement& numerator() const { return a_; }
    const RingElement& denominator() const { return t_; }

    FractionElement operator+(const FractionElement& o) const;
    FractionElement operator*(const FractionElement& o) const;
    // a s == b t at the current level
    bool operator==(const FractionElement& o) const;

private:
    FractionElement(RingElement a, RingElement t) : a_(std::move(a)), t_(std::move(t)) {}
    RingElement a_, t_;
};

bool is_central_denominator(const GroupModel& model, const RingElement& t);

// Element text: terms `[coeff*]<h-part>@g^b` joined by + or -, where the h-part is
// `1`, `h^x` (rank one) or `h1^x.h2^y...`.
RingElement parse_element(const std::string& text, const GroupModel& model, const Zmod& ctx);
RingElement parse_layer_element(const std::string& text, const GroupModel& model, const AbelianLayer& layer,
                                const Zmod& ctx);
std::string format_element(const RingElement& x, const GroupModel& model);
std::string format_layer_element(const RingElement& x, const GroupModel& model, const AbelianLayer& layer);

}  // namespace iwk1
