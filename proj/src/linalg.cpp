#include "iwk1/linalg.hpp"

#include <algorithm>

namespace iwk1 {

// ----------------------------------------------------------- integer Smith

namespace {

BigInt absval(const BigInt& x) { return x < 0 ? BigInt(-x) : x; }

BigInt floordiv(const BigInt& a, const BigInt& b) {
    BigInt q;
    mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return q;
}

}  // namespace

IntSmith smith_integer(IntMat M) {
    const std::size_t n = M.size();
    const std::size_t m = n ? M[0].size() : 0;
    IntSmith out;
    out.U.assign(n, std::vector<BigInt>(n, BigInt(0)));
    out.Uinv.assign(n, std::vector<BigInt>(n, BigInt(0)));
    for (std::size_t i = 0; i < n; ++i) out.U[i][i] = out.Uinv[i][i] = 1;

    auto row_swap = [&](std::size_t a, std::size_t b) {
        if (a == b) return;
        std::swap(M[a], M[b]);
        std::swap(out.U[a], out.U[b]);
        for (std::size_t i = 0; i < n; ++i) std::swap(out.Uinv[i][a], out.Uinv[i][b]);
    };
    // row a += k * row b
    auto row_add = [&](std::size_t a, std::size_t b, const BigInt& k) {
        if (k == 0) return;
        for (std::size_t j = 0; j < m; ++j) M[a][j] += k * M[b][j];
        for (std::size_t j = 0; j < n; ++j) out.U[a][j] += k * out.U[b][j];
        for (std::size_t i = 0; i < n; ++i) out.Uinv[i][b] -= k * out.Uinv[i][a];
    };
    auto row_neg = [&](std::size_t a) {
        for (auto& x : M[a]) x = -x;
        for (auto& x : out.U[a]) x = -x;
        for (std::size_t i = 0; i < n; ++i) out.Uinv[i][a] = -out.Uinv[i][a];
    };
    auto col_swap = [&](std::size_t a, std::size_t b) {
        if (a == b) return;
        for (std::size_t i = 0; i < n; ++i) std::swap(M[i][a], M[i][b]);
    };
    auto col_add = [&](std::size_t a, std::size_t b, const BigInt& k) {
        if (k == 0) return;
        for (std::size_t i = 0; i < n; ++i) M[i][a] += k * M[i][b];
    };

    const std::size_t steps = std::min(n, m);
    for (std::size_t t = 0; t < steps; ++t) {
        for (;;) {
            // smallest nonzero entry in the trailing block
            std::size_t bi = n, bj = m;
            BigInt best = 0;
            for (std::size_t i = t; i < n; ++i)
                for (std::size_t j = t; j < m; ++j)
                    if (M[i][j] != 0 && (bi == n || absval(M[i][j]) < best)) {
                        best = absval(M[i][j]);
                        bi = i;
                        bj = j;
                    }
            if (bi == n) break;
            row_swap(t, bi);
            col_swap(t, bj);
            bool clean = true;
            for (std::size_t i = t + 1; i < n; ++i) {
                if (M[i][t] == 0) continue;
                row_add(i, t, -floordiv(M[i][t], M[t][t]));
                if (M[i][t] != 0) clean = false;
            }
            for (std::size_t j = t + 1; j < m; ++j) {
                if (M[t][j] == 0) continue;
                col_add(j, t, -floordiv(M[t][j], M[t][t]));
                if (M[t][j] != 0) clean = false;
            }
            if (!clean) continue;
            // divisibility of the rest by the pivot
            bool divides = true;
            for (std::size_t i = t + 1; i < n && divides; ++i)
                for (std::size_t j = t + 1; j < m; ++j)
                    if (M[i][j] % M[t][t] != 0) {
                        row_add(t, i, BigInt(1));
                        divides = false;
                        break;
                    }
            if (divides) break;
        }
        if (t < n && M[t][t] < 0) row_neg(t);
    }
    out.diag.assign(n, BigInt(0));
    for (std::size_t t = 0; t < steps; ++t) out.diag[t] = M[t][t];
    return out;
}

// -------------------------------------------------------------- mod p^N

ModVec mat_vec(const Zmod& ctx, const ModMat& M, const ModVec& v) {
    ModVec out(M.size(), 0);
    for (std::size_t i = 0; i < M.size(); ++i) {
        unsigned __int128 acc = 0;
        for (std::size_t j = 0; j < v.size(); ++j) {
            if (M[i][j] == 0 || v[j] == 0) continue;
            acc += static_cast<unsigned __int128>(M[i][j]) * v[j];
            if (acc >> 120) acc %= ctx.modulus();
        }
        out[i] = static_cast<u64>(acc % ctx.modulus());
    }
    return out;
}

ModMat transpose(const ModMat& M) {
    if (M.empty()) return {};
    ModMat T(M[0].size(), ModVec(M.size(), 0));
    for (std::size_t i = 0; i < M.size(); ++i)
        for (std::size_t j = 0; j < M[i].size(); ++j) T[j][i] = M[i][j];
    return T;
}

SpanSolver::SpanSolver(const Zmod& ctx, const ModMat& M)
    : ctx_(ctx), n_(M.size()), m_(M.empty() ? 0 : M[0].size()) {
    ModMat A = M;
    P_.assign(n_, ModVec(n_, 0));
    Q_.assign(m_, ModVec(m_, 0));
    for (std::size_t i = 0; i < n_; ++i) P_[i][i] = 1 % ctx.modulus();
    for (std::size_t i = 0; i < m_; ++i) Q_[i][i] = 1 % ctx.modulus();
    const std::size_t steps = std::min(n_, m_);
    for (std::size_t t = 0; t < steps; ++t) {
        std::size_t bi = n_, bj = m_;
        int bv = ctx.N();
        for (std::size_t i = t; i < n_ && bv > 0; ++i)
            for (std::size_t j = t; j < m_; ++j) {
                if (A[i][j] == 0) continue;
                int v = ctx.val(A[i][j]);
                if (v < bv) {
                    bv = v;
                    bi = i;
                    bj = j;
                    if (v == 0) break;
                }
            }
        if (bi == n_) break;
        std::swap(A[t], A[bi]);
        std::swap(P_[t], P_[bi]);
        if (bj != t) {
            for (auto& row : A) std::swap(row[t], row[bj]);
            for (auto& row : Q_) std::swap(row[t], row[bj]);
        }
        const u64 pv = ipow(ctx.p(), bv);
        const u64 unit_inv = ctx.inv(A[t][t] / pv);
        for (auto& x : A[t]) x = ctx.mul(x, unit_inv);
        for (auto& x : P_[t]) x = ctx.mul(x, unit_inv);
        for (std::size_t i = t + 1; i < n_; ++i) {
            if (A[i][t] == 0) continue;
            const u64 f = A[i][t] / pv;
            for (std::size_t j = t; j < m_; ++j) A[i][j] = ctx.sub(A[i][j], ctx.mul(f, A[t][j]));
            for (std::size_t j = 0; j < n_; ++j) P_[i][j] = ctx.sub(P_[i][j], ctx.mul(f, P_[t][j]));
        }
        for (std::size_t j = t + 1; j < m_; ++j) {
            if (A[t][j] == 0) continue;
            const u64 f = A[t][j] / pv;
            A[t][j] = 0;
            for (std::size_t i = 0; i < m_; ++i) Q_[i][j] = ctx.sub(Q_[i][j], ctx.mul(f, Q_[i][t]));
        }
        vals_.push_back(bv);
    }
}

std::optional<ModVec> SpanSolver::solve(const ModVec& z) const {
    if (z.size() != n_) throw std::invalid_argument("span solver: vector length mismatch");
    ModVec y = mat_vec(ctx_, P_, z);
    ModVec u(m_, 0);
    for (std::size_t t = 0; t < n_; ++t) {
        if (t < vals_.size()) {
            if (ctx_.val(y[t]) < vals_[t]) return std::nullopt;
            u[t] = ctx_.div_ppow(y[t], vals_[t]);
        } else if (y[t] != 0) {
            return std::nullopt;
        }
    }
    return mat_vec(ctx_, Q_, u);
}

std::vector<ModVec> SpanSolver::kernel() const {
    std::vector<ModVec> gens;
    for (std::size_t t = 0; t < m_; ++t) {
        ModVec e(m_, 0);
        if (t < vals_.size()) {
            if (vals_[t] == 0) continue;
            e[t] = ctx_.ppow(ctx_.N() - vals_[t]);
        } else {
            e[t] = 1 % ctx_.modulus();
        }
        gens.push_back(mat_vec(ctx_, Q_, e));
    }
    return gens;
}

ModMat howell_form(const Zmod& ctx, ModMat R) {
    const std::size_t n = R.empty() ? 0 : R[0].size();
    auto is_zero = [](const ModVec& v) {
        return std::all_of(v.begin(), v.end(), [](u64 x) { return x == 0; });
    };
    std::vector<ModVec> pool;
    for (auto& r : R)
        if (!is_zero(r)) pool.push_back(std::move(r));
    ModMat out;
    std::vector<std::pair<std::size_t, int>> piv;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t best = pool.size();
        int bv = ctx.N();
        for (std::size_t k = 0; k < pool.size(); ++k) {
            if (pool[k][c] == 0) continue;
            int v = ctx.val(pool[k][c]);
            if (v < bv) { bv = v; best = k; }
        }
        if (best == pool.size()) continue;
        ModVec r = pool[best];
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(best));
        const u64 pv = ipow(ctx.p(), bv);
        const u64 ui = ctx.inv(r[c] / pv);
        for (auto& x : r) x = ctx.mul(x, ui);
        for (auto& o : pool) {
            if (o[c] == 0) continue;
            const u64 f = o[c] / pv;
            for (std::size_t j = c; j < n; ++j) o[j] = ctx.sub(o[j], ctx.mul(f, r[j]));
        }
        if (bv > 0) {
            ModVec s = r;
            const u64 sc = ipow(ctx.p(), ctx.N() - bv);
            for (auto& x : s) x = ctx.mul(x, sc);
            if (!is_zero(s)) pool.push_back(std::move(s));
        }
        pool.erase(std::remove_if(pool.begin(), pool.end(), is_zero), pool.end());
        out.push_back(std::move(r));
        piv.emplace_back(c, bv);
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
        const auto [c, v] = piv[i];
        const u64 pv = ipow(ctx.p(), v);
        for (std::size_t k = 0; k < i; ++k) {
            const u64 q = out[k][c] / pv;
            if (q == 0) continue;
            for (std::size_t j = c; j < n; ++j) out[k][j] = ctx.sub(out[k][j], ctx.mul(q, out[i][j]));
        }
    }
    return out;
}

}  // namespace iwk1
