#pragma once

// Test-vector combinatorics at depth q^2 = p^{2k}: the characters chi_tau of
// K(q)/K(q^2), principal-series descriptors and their stability, the Mackey
// multiplicity count, and the finite-group lemmas behind the main local result.
//
// Character values are exponents of a fixed primitive root of unity, kept
// additively in Z/N; no complex numbers are formed.

#include <optional>
#include <unordered_map>

#include "ggp/volume.hpp"

namespace ggp {

// o/q^2 = Z/p^{2k} together with o/q = Z/p^k.  psi(x) for x in q/q^2 is
// zeta_{p^k}^{x / p^k}; it is trivial on q^2 but not on p^{-1} q^2.
struct DepthFrame {
    LocalRing ring;   // Z/p^{2k}
    LocalRing level;  // Z/p^k
    std::uint32_t k;

    DepthFrame(std::uint32_t p, std::uint32_t k);  // throws InvalidRing

    std::uint32_t p() const { return ring.p(); }
    u64 q() const { return level.modulus(); }

    Zmod lift(const Zmod& x) const { return ring.element(x.value()); }
    Matrix<Zmod> lift(const Matrix<Zmod>& m) const;
    Zmod reduce(const Zmod& x) const { return truncate(x, k); }
    Matrix<Zmod> reduce(const Matrix<Zmod>& m) const;

    // x in q/q^2 -> x / p^k in Z/p^k.  Throws NotInCongruenceSubgroup off q.
    u64 psi_exponent(const Zmod& x) const;
};

// 1 + p^k x for x over o/q.
Matrix<Zmod> congruence_element(const DepthFrame& f, const Matrix<Zmod>& x);
// All of K(q)/K(q^2) at rank n (q^{n^2} elements).
std::vector<Matrix<Zmod>> congruence_quotient(const DepthFrame& f, std::size_t n, u64 budget);

// Exponent of chi_tau(g) = psi(trace((g - 1) tau)) in Z/p^k, for tau over o/q
// and g over o/q^2 with g = 1 mod q.  Throws NotInCongruenceSubgroup.
u64 chi_tau_exponent(const DepthFrame& f, const Matrix<Zmod>& tau, const Matrix<Zmod>& g);

// --- Principal-series-type descriptors ----------------------------------------

// Blocks of a standard parabolic; a 1-block carries a character parameter
// xi in o/q, a larger block a regular (cyclic) parameter matrix.
struct InductionDatum {
    std::vector<Matrix<Zmod>> blocks;  // over o/q

    static InductionDatum principal_series(const std::vector<Zmod>& xis);
    std::size_t rank() const;
    std::vector<std::size_t> partition() const;
    // Product of the block charpolys.  Throws PreconditionFailed on a
    // non-cyclic block.
    MonicPoly<Zmod> polynomial() const;
    std::string to_string() const;
};

struct StablePairCheck {
    bool stable = false;
    MonicPoly<Zmod> P_pi, P_sigma;
};
// Throws PreconditionFailed unless rank(pi) = rank(sigma) + 1.
StablePairCheck stable_pair_check(const InductionDatum& pi, const InductionDatum& sigma);

// Conductor exponent of chi / eta for GL_1 data of depth q^2, from
// d = xi_chi - xi_eta in o/q: 2k - v(d) when d is nonzero, otherwise only
// bounded by k (nullopt).
std::optional<std::uint32_t> ratio_conductor_exponent(const DepthFrame& f, const Zmod& d);

struct ConductorIdentity {
    u64 exponent_bound = 0;  // sum over (i, j) of the conductor exponents, k for undetermined pairs
    u64 target = 0;          // 2k n (n+1)
    bool all_units = false;
    bool holds() const { return (exponent_bound == target) == all_units; }
};
ConductorIdentity conductor_identity(const DepthFrame& f, const std::vector<Zmod>& xis, const std::vector<Zmod>& etas);

// Stable tau with P_tau = P_pi and P_{tau_H} = P_sigma.  Throws NotStablePair.
Matrix<Zmod> regular_parameter_for_pair(const InductionDatum& pi, const InductionDatum& sigma);

// --- Matrix-coefficient support -------------------------------------------------

struct SupportCheck {
    u64 h_count = 0;  // |H(o/q)|
    u64 fixed = 0;    // #{h : h tau h^{-1} = tau}
    bool stable = false;
    bool holds() const { return fixed == 1; }
};
SupportCheck coefficient_support_check(const LocalRing& level, const Matrix<Zmod>& tau, u64 budget);

// u = 1 + p^w t E_ij in K(q^2) with a^{-1} u a = 1 + t E_ij in K(q) and
// chi_tau(a^{-1} u a) != 1, for a = diag(p^{e_1}, ..., p^{e_n}, 1).
struct NoncompactWitness {
    bool min_side = false;             // extreme block is the most negative exponent
    std::vector<std::size_t> block;    // the extreme coordinates
    std::size_t row = 0, col = 0;      // x = E_{row,col}
    int weight = 0;                    // a^{-1} x a = p^{weight} x, weight < 0
    std::uint32_t t_valuation = 0;     // 2k - 1
    std::uint32_t precision = 0;       // u is computed over Z/p^precision
    Matrix<Zmod> u;
    Matrix<Zmod> conjugated;           // a^{-1} u a over o/q^2
    u64 chi_exponent = 0;
    bool in_k_q2 = false;
    bool conjugated_in_k_q = false;
    bool verified() const { return in_k_q2 && conjugated_in_k_q && chi_exponent != 0; }
};
// Throws PreconditionFailed when all exponents vanish, WitnessSearchFailed
// when tau has no unit entry pairing the extreme block with its complement.
NoncompactWitness noncompact_support_witness(const DepthFrame& f, const Matrix<Zmod>& tau, const std::vector<int>& exps);

// --- Mackey multiplicity ------------------------------------------------------

struct MackeyResult {
    u64 dimension = 0;
    u64 cosets = 0;            // |P(o/q) \ G(o/q)|
    u64 flag_preserving = 0;   // cosets with Ad(g) tau block upper triangular
};
// Block eigenspaces: a 1-block contributes 1 iff the diagonal entry is xi; a
// larger block contributes 1 iff the diagonal block is cyclic with the
// block's charpoly (multiplicity-one regular blocks).
MackeyResult mackey_dimension(const LocalRing& level, const InductionDatum& datum, const Matrix<Zmod>& tau, u64 budget);

// Oracle: the chi_tau-eigenspace of K(q)/K(q^2) on Ind_B^G(chi_1 x ... x chi_n)
// realized on functions on G(Z/p^2), with chi_i(1 + y) = psi(y xi_i).
// The representation is monomial on B \ G, so the eigenspace dimension is
// the number of K-orbits whose stabilizer phase matches chi_tau.
u64 induced_model_dimension(std::uint32_t p, const std::vector<Zmod>& xis, const Matrix<Zmod>& tau, u64 budget);

// --- J_tau ----------------------------------------------------------------------

BigInt gl_order(std::uint32_t p, std::uint32_t m, std::size_t n);

struct VolumeRatio {
    BigInt g_order, g_tau_order, h_order;
    u64 h_fixed = 0;        // |H(o/q) n G_tau(o/q)|
    Rational ratio;         // [G : G_tau] / |H|
    Rational normalized;    // ratio / Q^n
    Rational lower, upper;  // (1 - 1/q)^{n+1}, (1 - 1/q)^{-(n+1)}
    bool in_window() const { return lower <= normalized && normalized <= upper; }
};
// Throws NotCyclic for non-cyclic tau.
VolumeRatio j_tau_volume_ratio(const LocalRing& level, const Matrix<Zmod>& tau, u64 budget);

// An extension of chi_tau from K(q)/K(q^2) to J_tau/K(q^2), where J_tau is the
// preimage of G_tau(o/q).  Every j factors as a b with a a unit of
// (o/q^2)[tau~] (tau~ the lift of tau) and b in K(q); the extension is
// lambda(a) + chi_tau(b), lambda a character of the units extending chi_tau
// on the units congruent to 1, built one cyclic generator at a time.
class ChiExtension {
public:
    // Throws PreconditionFailed for non-cyclic tau, ExtensionFailed on an
    // internal inconsistency.
    ChiExtension(const DepthFrame& f, const Matrix<Zmod>& tau, u64 budget);

    const DepthFrame& frame() const { return f_; }
    u64 modulus() const { return N_; }  // values live in Z/N
    u64 value(const Matrix<Zmod>& j) const;  // throws PreconditionFailed off J_tau
    bool in_j(const Matrix<Zmod>& g) const;
    // chi_tau scaled into Z/N.
    u64 chi_scaled(const Matrix<Zmod>& k) const;

    std::size_t units_size() const { return units_.size(); }
    const std::vector<Matrix<Zmod>>& units() const { return units_; }
    // |J_tau / K(q^2)|.
    u64 j_order() const;
    // All of J_tau/K(q^2).
    std::vector<Matrix<Zmod>> j_elements(u64 budget) const;

    bool normal_kernel = false;     // j ker j^{-1} = ker on generators
    bool abelian_quotient = false;  // generator commutators in ker chi_tau
    u64 commutators_checked = 0;

private:
    DepthFrame f_;
    Matrix<Zmod> tau_, tau_lift_;
    std::vector<Matrix<Zmod>> units_, unit_inv_;
    std::unordered_map<u64, std::size_t> lift_index_;  // reduction mod q -> unit index
    std::unordered_map<u64, u64> lambda_;
    u64 N_ = 1;
};

struct ExtensionCheck {
    u64 elements = 0;
    u64 pairs = 0;
    u64 multiplicativity_failures = 0;
    u64 restriction_failures = 0;
    u64 commutator_failures = 0;  // exhaustive commutators outside ker chi_tau
    bool ok() const { return multiplicativity_failures == 0 && restriction_failures == 0 && commutator_failures == 0; }
};
// Exhaustive over pairs of J_tau/K(q^2) when |J|^2 <= budget, otherwise over
// `samples` seeded random pairs.
ExtensionCheck check_extension(const ChiExtension& ext, u64 budget, u64 samples, u64 seed);

}  // namespace ggp
