#pragma once

// Finite-level model of G = H x| Gamma with H a finite abelian p-group given by
// cyclic orders and an action matrix, truncated at Gamma^(level).

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "iwk1/exactnum.hpp"
#include "iwk1/linalg.hpp"

namespace iwk1 {

// A finite group given by its multiplication table.  Every group the library
// works with (the quotient G/Gamma^(j), abelian layers, their subgroups) is
// materialised this way so the ring code stays generic.
class FiniteGroup {
public:
    FiniteGroup(u64 p, std::vector<int> table, int order, int identity, std::vector<int> generators,
                std::string signature);

    int order() const { return n_; }
    int identity() const { return id_; }
    int mul(int a, int b) const { return table_[static_cast<std::size_t>(a) * n_ + b]; }
    int inv(int a) const { return inv_[static_cast<std::size_t>(a)]; }
    int pow(int g, u64 e) const;
    u64 p() const { return p_; }
    const std::vector<int>& generators() const { return gens_; }
    bool is_abelian() const { return abelian_; }
    const std::string& signature() const { return sig_; }

    // Conjugacy classes ordered by smallest member; class_of maps an element
    // to its class index.
    const std::vector<std::vector<int>>& classes() const { return classes_; }
    int class_of(int g) const { return class_of_[static_cast<std::size_t>(g)]; }
    int class_count() const { return static_cast<int>(classes_.size()); }

    // Smallest m with (augmentation ideal)^m = 0 in F_p[group]; computed once.
    int radical_nilpotency() const;

private:
    u64 p_;
    int n_;
    int id_;
    std::vector<int> table_;
    std::vector<int> inv_;
    std::vector<int> gens_;
    std::string sig_;
    bool abelian_ = true;
    std::vector<std::vector<int>> classes_;
    std::vector<int> class_of_;
    mutable std::once_flag nil_once_;
    mutable int nil_ = 0;
};

struct GroupSpec {
    u64 p = 3;
    int e = 0;
    std::vector<u64> orders;
    std::vector<i64> action;  // r x r, row-major; gamma.h = A h on column vectors
    int level = 0;
    int precision = 1;
    std::vector<std::string> header;  // leading comment lines, kept for round trips

    bool operator==(const GroupSpec& o) const {
        return p == o.p && e == o.e && orders == o.orders && action == o.action && level == o.level &&
               precision == o.precision && header == o.header;
    }
};

GroupSpec parse_group_spec(const std::string& text);
std::string serialize_group_spec(const GroupSpec& spec);
GroupSpec load_group_spec(const std::string& path);

struct GroupElement {
    std::vector<i64> h;
    i64 a = 0;
    bool operator==(const GroupElement& o) const { return h == o.h && a == o.a; }
    bool operator<(const GroupElement& o) const { return a != o.a ? a < o.a : h < o.h; }
};

using IntVec = std::vector<i64>;
using SmallMat = std::vector<std::vector<i64>>;

// H_q x Gamma^(s)/Gamma^(level) for q <= s.  q = s = i is the abelianization
// G_i^ab; q < s gives the subgroups H_q x Gamma^(s) used by traces and norms.
class AbelianLayer {
public:
    int q() const { return q_; }
    int s() const { return s_; }
    int level() const { return level_; }
    // cyclic decomposition of H_q
    const std::vector<u64>& orders() const { return orders_; }
    u64 h_size() const { return hsize_; }
    u64 gamma_size() const { return gsize_; }
    const FiniteGroup& group() const { return *group_; }
    std::shared_ptr<const FiniteGroup> group_ptr() const { return group_; }

    // element <-> (H_q coordinates, gamma exponent a with p^s | a)
    int index(const IntVec& hq, i64 a) const;
    std::pair<IntVec, i64> decode(int idx) const;
    IntVec project(const IntVec& h) const;  // H -> H_q
    IntVec lift(const IntVec& hq) const;    // canonical lift H_q -> H
    int index_from_h(const IntVec& h, i64 a) const { return index(project(h), a); }
    int h_index(const IntVec& hq) const;
    // action of gamma on H_q coordinates
    IntVec act(const IntVec& hq, i64 k) const;
    int conjugate_by_gamma(int idx, i64 k) const;

private:
    friend class GroupModel;
    int q_ = 0, s_ = 0, level_ = 0;
    u64 p_ = 3;
    std::vector<u64> orders_;
    u64 hsize_ = 1, gsize_ = 1;
    SmallMat proj_;  // rows: kept factors, cols: H coordinates
    SmallMat lift_;  // rows: H coordinates, cols: kept factors
    std::vector<SmallMat> act_pows_;  // gamma^k on H_q for k < p^q
    std::vector<u64> h_orders_;
    std::shared_ptr<const FiniteGroup> group_;
};

struct ConjClass {
    GroupElement representative;
    std::vector<GroupElement> members;
    int stratum = 0;
};

struct SpecialTypeResult {
    bool special = true;
    // first failing (generator index, i); generator index is 0-based
    std::optional<std::pair<int, int>> witness;
};

enum class Validation { strict, abelian_tower };

class GroupModel {
public:
    explicit GroupModel(GroupSpec spec, Validation mode = Validation::strict);

    const GroupSpec& spec() const { return spec_; }
    u64 p() const { return spec_.p; }
    int e() const { return spec_.e; }
    int level() const { return spec_.level; }
    int precision() const { return spec_.precision; }
    int rank() const { return static_cast<int>(spec_.orders.size()); }
    const std::vector<u64>& orders() const { return spec_.orders; }
    u64 h_size() const { return hsize_; }
    u64 gamma_size() const { return gsize_; }  // p^level

    // The same model at another level/precision (reuses validation).
    GroupModel at(int level, int precision) const;

    // H helpers
    IntVec reduce_h(IntVec h) const;
    IntVec act(const IntVec& h, i64 k) const;  // A^k h
    IntVec add_h(const IntVec& a, const IntVec& b) const;
    IntVec scale_h(const IntVec& a, i64 c) const;
    u64 h_index(const IntVec& h) const;
    IntVec h_at(u64 idx) const;
    IntVec generator(int t) const;

    // G/Gamma^(level)
    const FiniteGroup& group() const { return *group_; }
    std::shared_ptr<const FiniteGroup> group_ptr() const { return group_; }
    int index(const GroupElement& g) const;
    GroupElement element(int idx) const;
    GroupElement normalize(GroupElement g) const;
    GroupElement multiply(const GroupElement& a, const GroupElement& b) const;
    GroupElement inverse(const GroupElement& g) const;
    GroupElement identity() const;
    GroupElement phi(const GroupElement& g) const;  // g^p

    // stratum of a Gamma exponent: v_p(a) capped at e
    int stratum(i64 a) const;

    std::vector<ConjClass> conjugacy_classes() const;
    // Classes computed from the coset criterion instead of orbit enumeration.
    std::vector<ConjClass> conjugacy_classes_by_criterion() const;

    std::shared_ptr<const AbelianLayer> layer(int q, int s) const;
    std::shared_ptr<const AbelianLayer> abelianization(int i) const { return layer(i, i); }

    // ver_i : G_{i-1}^ab -> G_i^ab on layer indices.
    int transfer_ver(int i, int idx) const;
    // Throws IllDefined if the transfer formula does not respect the
    // relations of H_{i-1}.
    void check_transfer_well_defined(int i) const;
    const SmallMat& action_power(i64 k) const;
    SpecialTypeResult is_special_type() const;

    // Subgroup (A^{p^i} - I)H as a list of H indices.
    std::vector<u64> commutator_subgroup(int i) const;

private:
    GroupSpec spec_;
    Validation mode_;
    SmallMat A_;
    std::vector<SmallMat> pows_;  // A^k, k < p^level
    u64 hsize_ = 1, gsize_ = 1;
    std::shared_ptr<const FiniteGroup> group_;
    mutable std::map<std::pair<int, int>, std::shared_ptr<const AbelianLayer>> layers_;
    mutable std::shared_ptr<std::mutex> layer_mu_ = std::make_shared<std::mutex>();

    void validate();
    SmallMat mat_mul(const SmallMat& X, const SmallMat& Y) const;
    SmallMat mat_pow(const SmallMat& X, u64 e) const;
    bool is_identity_action(const SmallMat& X) const;
    IntVec apply(const SmallMat& X, const IntVec& h) const;
};

std::string format_h(const IntVec& h);

}  // namespace iwk1
