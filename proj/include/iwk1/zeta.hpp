#pragma once

// Bernoulli numbers, Dirichlet L-values at negative integers, partial zeta
// values of layer fields for towers abelian over Q, Delta-values, the
// finite-level approximation elements and the congruence checks on them.

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <tuple>
#include <vector>

#include "iwk1/groupmodel.hpp"
#include "iwk1/groupring.hpp"

namespace iwk1 {

ExactRational bernoulli(int k);
ExactRational bernoulli_poly(int k, const ExactRational& x);

// zeta_S(1-k; a mod f): the partial zeta function of the residue class of a,
// restricted to n prime to every l in S, at s = 1-k.
ExactRational partial_zeta_Q(u64 f, i64 a, int k, const std::vector<u64>& sigma);

// Values zeta_m^exps[n] on units; exps[n] = -1 off the units.
class DirichletCharacter {
public:
    DirichletCharacter(u64 modulus, int order, std::vector<int> exps);
    static DirichletCharacter trivial(u64 modulus);

    u64 modulus() const { return mod_; }
    int order() const { return m_; }  // values live in Q(zeta_order)
    int exponent(u64 n) const { return exps_[static_cast<std::size_t>(n % mod_)]; }
    u64 conductor() const { return cond_; }
    bool is_even() const;
    // Exponent of the primitive character at n; -1 if gcd(n, conductor) > 1.
    int primitive_exponent(u64 n) const;
    CycloRational value(u64 n) const;

private:
    u64 mod_;
    int m_;
    std::vector<int> exps_;
    u64 cond_ = 1;
};

// Generalized Bernoulli number of the primitive character.
CycloRational generalized_bernoulli(const DirichletCharacter& chi, int k);
CycloRational dirichlet_L_value(const DirichletCharacter& chi, int k, const std::vector<u64>& sigma);

struct ArtinLine {
    u64 a = 0;
    std::string image;  // element text
};

// An abelian tower over Q: G = H x Gamma with trivial action, Gamma acting
// through the cyclotomic character with kappa(gamma) = kappa_gamma.
struct ZetaDatumSpec {
    u64 p = 3;
    u64 f0 = 1;
    std::vector<u64> sigma;
    int depth = 0;
    int level = 0;
    i64 kappa_gamma = 1;
    std::vector<u64> orders;  // H
    std::vector<ArtinLine> artin;
    std::vector<std::string> header;
};

ZetaDatumSpec parse_zeta_datum_spec(const std::string& text);

class ZetaDatum {
public:
    explicit ZetaDatum(ZetaDatumSpec spec);

    const ZetaDatumSpec& spec() const { return spec_; }
    u64 p() const { return spec_.p; }
    int depth() const { return spec_.depth; }
    int level() const { return spec_.level; }
    int f() const { return f_; }
    const std::vector<u64>& sigma() const { return spec_.sigma; }
    // f0 p^(j+1)
    u64 modulus(int j) const;

    // G/Gamma^(j) with coefficients Z/p^(f+j).
    const GroupModel& model(int j) const;
    // Artin class of n (a unit mod f0 p^(j+1)) as an index of model(j).
    int artin(u64 n, int j) const;
    // kappa(gamma)^(-b k) mod p^(f+j), i.e. N(x)^-k for x with Gamma part b.
    u64 norm_power(i64 b, int k, int j) const;

    // Memoized zeta_i(delta^(x), 1-k) for all x on layer i at level j.
    const std::vector<ExactRational>& layer_partial_zetas(int i, int j, int k) const;

private:
    ZetaDatumSpec spec_;
    int f_ = 1;
    std::vector<int> artin_top_;  // at spec level, indexed by residue
    mutable std::map<int, std::unique_ptr<GroupModel>> models_;
    mutable std::map<std::pair<int, int>, std::vector<CycloRational>> lvalues_;
    mutable std::map<std::tuple<int, int, int>, std::vector<ExactRational>> partial_;
    mutable std::shared_ptr<std::recursive_mutex> mu_ = std::make_shared<std::recursive_mutex>();

    void build_artin();
    const std::vector<CycloRational>& character_L_values(int j, int k) const;
};

ZetaDatum parse_zeta_datum(const std::string& text);
ZetaDatum load_zeta_datum(const std::string& path);

// A function on G_i^ab / Gamma^(level), indexed like the layer group.
struct LocallyConstantFn {
    int layer = 0;
    int level = 0;
    std::vector<ExactRational> values;

    static LocallyConstantFn constant(const ZetaDatum& datum, int i, int level, const ExactRational& c);
    static LocallyConstantFn delta(const ZetaDatum& datum, int i, int level, int class_index);
};

ExactRational partial_zeta_layer(const ZetaDatum& datum, int i, int level, int class_index, int k);
// L_i(eps, 1-k)
ExactRational layer_L_value(const ZetaDatum& datum, const LocallyConstantFn& eps, int k);
ExactRational delta_value(const ZetaDatum& datum, const LocallyConstantFn& eps, int k);

// sum_x Delta_i(delta^(x), 1-k) N(x)^-k x over Z/p^(f+j); requires p-1 | k.
RingElement zeta_approx(const ZetaDatum& datum, int i, int j, int k);
// (z_0, ..., z_e) with z_i computed at weight k p^(e-i).
std::vector<RingElement> zeta_approx_tuple(const ZetaDatum& datum, int j, int k);

struct CongruenceResult {
    bool pass = false;
    int modulus_exponent = 0;  // checked mod p^this
    ExactRational lhs, rhs;
};
// Delta_i(eps, 1-k) against Delta_{i-1}(eps o ver_i, 1-pk) mod p^(i-j_inv).
CongruenceResult dr_congruence_check(const ZetaDatum& datum, int i, int j_inv, const LocallyConstantFn& eps, int k);

// z_i - ver_i(z_{i-1}) in the trace ideal of layer i.
bool ver_congruence_check(const GroupModel& model, const std::vector<RingElement>& z, int i);

// (1 - p^(k-1)) B_k / k mod p.
u64 kummer_value(u64 p, int k);

}  // namespace iwk1
