#pragma once

// Linear algebra over Z (Smith form, used for abelian quotients) and over the
// chain ring Z/p^N (Smith-based solving, kernels, Howell form).

#include <optional>
#include <vector>

#include "iwk1/exactnum.hpp"

namespace iwk1 {

using IntMat = std::vector<std::vector<BigInt>>;
using ModVec = std::vector<u64>;
using ModMat = std::vector<ModVec>;  // row-major

struct IntSmith {
    IntMat U;     // unimodular row transform, U * M * V = diag
    IntMat Uinv;  // its inverse
    std::vector<BigInt> diag;  // length = rows; trailing entries may be zero
};

IntSmith smith_integer(IntMat M);

// Column span of an n x m matrix over Z/p^N, pre-factored so membership
// queries cost one matrix-vector product.
class SpanSolver {
public:
    SpanSolver(const Zmod& ctx, const ModMat& M);

    const Zmod& ctx() const { return ctx_; }
    std::size_t rows() const { return n_; }
    std::size_t cols() const { return m_; }
    int rank() const { return static_cast<int>(vals_.size()); }
    const std::vector<int>& pivot_valuations() const { return vals_; }

    // Returns w with M*w = z, or nullopt if z is outside the span.
    std::optional<ModVec> solve(const ModVec& z) const;
    bool contains(const ModVec& z) const { return solve(z).has_value(); }

    // Generators of {w : M*w = 0}.
    std::vector<ModVec> kernel() const;

private:
    Zmod ctx_;
    std::size_t n_, m_;
    ModMat P_, Q_;
    std::vector<int> vals_;
};

ModVec mat_vec(const Zmod& ctx, const ModMat& M, const ModVec& v);
ModMat transpose(const ModMat& M);

// Canonical Howell form of the row space of R over Z/p^N.
ModMat howell_form(const Zmod& ctx, ModMat R);

}  // namespace iwk1
