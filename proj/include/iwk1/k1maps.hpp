#pragma once

// Layer maps between Z/p^N[G/Gamma^(j)] and the abelianization layers:
// norms via determinants (theta, Nr), restriction of classes (beta), its
// inverse on Psi (tau), traces and projections between layer subgroups,
// transfer and p-power maps on rings, and the omega-twisted product.

#include <vector>

#include "iwk1/groupmodel.hpp"
#include "iwk1/groupring.hpp"

namespace iwk1 {

struct LayerTuple {
    enum class Flavor { additive, multiplicative };
    Flavor flavor = Flavor::additive;
    std::vector<RingElement> x;  // x[i] on abelianization(i), 0 <= i <= e
};

using RingMatrix = std::vector<std::vector<RingElement>>;

// Division-free determinant over a commutative ring.
RingElement determinant(const RingMatrix& M);

// theta_i(x): determinant of right multiplication by x on the basis
// {1, g, ..., g^(p^i - 1)}, pushed to G_i^ab.
RingMatrix theta_matrix(const GroupModel& model, int i, const RingElement& x);
RingElement theta(const GroupModel& model, int i, const RingElement& x);
// The same determinant without requiring a unit (denominators of fractions).
RingElement theta_determinant(const GroupModel& model, int i, const RingElement& x);
LayerTuple theta_tuple(const GroupModel& model, const RingElement& x);

RingElement beta(const GroupModel& model, int i, const TraceElement& t);
LayerTuple beta_tuple(const GroupModel& model, const TraceElement& t);

// Inverse of beta on Psi.  Output precision drops by e.
TraceElement tau(const GroupModel& model, const LayerTuple& tuple);

// G_j^ab -> H_j x Gamma^(i) for j <= i.
RingElement tr_map(const GroupModel& model, int j, int i, const RingElement& x);
// G_i^ab -> H_j x Gamma^(i).
RingElement pi_map(const GroupModel& model, int i, int j, const RingElement& x);
RingElement norm_Nr(const GroupModel& model, int j, int i, const RingElement& x);
RingElement norm_determinant(const GroupModel& model, int j, int i, const RingElement& x);

// Exponent e with omega_i(g) = zeta_p^e for g on layer i-1.
int omega_exponent(const GroupModel& model, int i, int layer_index);
// prod_{k<p} omega_i^k-twist of x, for x on layer i-1.  `which` replaces
// omega_i by omega_i^which (any power prime to p is another valid choice).
RingElement omega_twist_product(const GroupModel& model, int i, const RingElement& x, int which = 1);

// Linear extension of the transfer G_{i-1}^ab -> G_i^ab.
RingElement ver_ring(const GroupModel& model, int i, const RingElement& x);
// g -> g^p extended linearly (on any finite group ring).
RingElement phi_ring(const RingElement& x);
TraceElement phi_trace(const TraceElement& t);

// Push a ring element of G to G_0^ab.
RingElement abelianize(const GroupModel& model, const RingElement& x);

// Images under G/Gamma^(j') -> G/Gamma^(j) for j <= j' (same H and action);
// coefficients keep their precision.
RingElement project_level(const GroupModel& lower, const GroupModel& upper, const RingElement& x);
// The same on the layer-i rings.
RingElement project_layer_level(const GroupModel& lower, const GroupModel& upper, int i, const RingElement& x);
TraceElement project_trace_level(const GroupModel& lower, const GroupModel& upper, const TraceElement& t);

}  // namespace iwk1
