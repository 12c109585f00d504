#pragma once

// Membership checks for the additive congruence group Psi and the
// multiplicative group Phi on tuples of layer elements, the finite-level
// additive theorem, and the map L : Phi -> Psi.

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "iwk1/k1maps.hpp"
#include "iwk1/logk1.hpp"

namespace iwk1 {

struct CheckLine {
    std::string key;  // e.g. "A1[0,1]"
    bool pass = true;
    int layer = -1;
    std::string detail;
};

struct CheckReport {
    std::vector<CheckLine> lines;
    int N = 0;
    int level = 0;
    bool pass() const;
    // Smallest layer index with a failing condition, or -1.
    int first_failing_layer() const;
    std::string text() const;  // KEY=PASS|FAIL lines
    void add(std::string key, int layer, bool ok, std::string detail = {});
};

CheckReport check_psi(const GroupModel& model, const LayerTuple& tuple);
// use_special selects MS1-MS3 (requires the model to be of special type).
CheckReport check_phi(const GroupModel& model, const LayerTuple& tuple, bool use_special);

// Tuples of fractions num_i / den_i with central denominators.
struct FractionTuple {
    std::vector<RingElement> num;
    std::vector<RingElement> den;
};
FractionTuple theta_fraction_tuple(const GroupModel& model, const FractionElement& x);
// Phi conditions after clearing denominators.
CheckReport check_phi_fraction(const GroupModel& model, const FractionTuple& tuple, bool use_special);

struct AdditiveReport {
    bool tau_beta_identity = false;
    // beta(T) and the Z_p-lattice of A1/A2 solutions agree over Z_(p)
    bool lattices_equal = false;
    // their reductions mod p^N have the same Howell form
    bool spaces_equal = false;
    int beta_rank = 0;        // lattice ranks
    int constraint_rank = 0;
    int beta_howell_rows = 0;
    // Howell rows of all solutions of the congruences mod p^N, including
    // ones that do not lift; informational
    int naive_howell_rows = 0;
    bool pass() const { return tau_beta_identity && lattices_equal && spaces_equal && beta_rank == constraint_rank; }
};
// At the model's level and precision; TooLarge above `max_dim` unknowns.
// The solution lattice is computed exactly over Z and compared with the
// image of beta before reduction.
AdditiveReport additive_theorem_verify(const GroupModel& model, int max_dim = 1024);

// a_0 = (1/p) log(x_0^p / phi(x_0)), a_i = (1/p) log(M4 expression).
// Output precision drops by one.
LayerTuple L_phi_to_psi(const GroupModel& model, const LayerTuple& tuple);

std::pair<LayerTuple, CheckReport> theta_tuple_and_check(const GroupModel& model, const RingElement& x);
std::pair<FractionTuple, CheckReport> theta_tuple_and_check(const GroupModel& model, const FractionElement& x);

// Tuple files: one `layer i: <element>` line per layer; '#' lines ignored.
LayerTuple parse_tuple(const std::string& text, const GroupModel& model, const Zmod& ctx, LayerTuple::Flavor flavor);
LayerTuple load_tuple(const std::string& path, const GroupModel& model, const Zmod& ctx, LayerTuple::Flavor flavor);
std::string format_tuple(const LayerTuple& tuple, const GroupModel& model);

}  // namespace iwk1
