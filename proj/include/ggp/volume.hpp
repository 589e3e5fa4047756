#pragma once

// The distance d_H from HZ, polynomial congruence counts, and empirical
// checks of the uniform volume bound and the bilinear-form estimate.
// All bound arithmetic is exact (cpp_rational); there are no floats.

#include <array>
#include <functional>
#include <optional>
#include <unordered_map>

#include <boost/multiprecision/cpp_int.hpp>

#include "ggp/random.hpp"
#include "ggp/transversality_search.hpp"

namespace ggp {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

u64 int_pow(u64 base, u64 exp);

// d_H = q^{-ell}.  ell = m is the sentinel for d_H = 0 at working precision.
struct DistanceValue {
    std::uint32_t ell = 0;
    std::uint32_t m = 1;
    bool at_infinity() const { return ell == 0; }  // d_H^infty = 1
    bool vanishes() const { return ell == m; }
    bool operator==(const DistanceValue&) const = default;
};

DistanceValue distance_d_h(const Matrix<Zmod>& g, const Matrix<Zmod>& ginv);
DistanceValue distance_d_h(const Matrix<Zmod>& g);

// Oracle for d_H: the largest l <= m such that g mod p^l lies in H Z mod p^l,
// found by reducing and testing membership at each level.
std::uint32_t hz_depth(const Matrix<Zmod>& g);

u64 q_star(u64 q, std::uint32_t m);

// 1/(1 + Q d_H) + d_H^infty / Q*, with Q = q^m.
Rational volume_shape(u64 q, std::uint32_t m, const DistanceValue& d);

// |H_{tau_H}| >= (1 - 1/q)^n Q^n, n = rank - 1.
bool centralizer_lower_bound_holds(u64 q, std::uint32_t m, std::size_t n, u64 centralizer_size);

// --- Volume bound ------------------------------------------------------------

struct VolumeReport {
    std::uint32_t p = 0, m = 0;
    std::size_t rank = 0;
    MonicPoly<Zmod> P, P_H;
    Matrix<Zmod> a;
    u64 count = 0;
    u64 centralizer_size = 0;
    DistanceValue d_h;
    Rational bound;  // shape * |H_{tau_H}|
    Rational ratio;  // count / bound
    bool degenerate = false;
    std::string regime;
    u64 seed = 0;
    u64 instance = 0;
};

// Both sides of the volume bound for one (tau, a), a outside HZ.
// Throws CharacteristicTwo, NotStable, DegenerateInstance (a in HZ).
VolumeReport verify_volume_bound(const LocalRing& ring, const Matrix<Zmod>& tau, const Matrix<Zmod>& a);

// X_{tau,a} depends on tau only through G_tau, which is unchanged by
// tau -> lambda tau + mu.  One representative per orbit of charpoly pairs.
struct AffineTauClass {
    TauClass<Zmod> cls;
    u64 orbit_size = 0;
};
std::vector<AffineTauClass> affine_tau_classes(const LocalRing& ring, std::size_t rank);

// |X_{tau,a}(R)| for every coset H a Z at once, indexed by hz_coset_key.
// Each (b, y) in G_tau x H_{tau_H} contributes to the coset of b y^{-1};
// a coset receives exactly |X_{tau,a}| |Z| such pairs since H n G_tau = 1.
std::vector<std::uint32_t> x_counts_by_coset(const LocalRing& ring, const Matrix<Zmod>& tau, u64 budget);

struct VolumeSweepSummary {
    std::uint32_t p = 0, m = 0;
    std::size_t rank = 0;
    std::string mode;
    u64 seed = 0;
    u64 tau_classes = 0;
    u64 instances = 0;  // (tau, a) with a outside HZ; exhaustive counts weight by affine orbit
    u64 nonempty = 0;
    Rational c_emp = 0;
    std::vector<Rational> c_emp_by_ell;  // index ell = 0 .. m-1
    std::optional<VolumeReport> worst;
    bool centralizer_lower_bound_ok = true;
    Rational min_centralizer_fraction = 1;  // min |H_{tau_H}| / Q^n
};

using VolumeSink = std::function<void(const VolumeReport&)>;

// Every stable tau (up to affine change) and every coset H a Z outside HZ.
VolumeSweepSummary volume_sweep_exhaustive(const LocalRing& ring, std::size_t rank, u64 budget, unsigned jobs,
                                           const VolumeSink& sink = {});

// Seeded random (tau, a); a cycles through uniform, near-HZ (a in H K(p)) and
// through-X (a = b y^{-1}) draws.
VolumeSweepSummary volume_sweep_seeded(const LocalRing& ring, std::size_t rank, u64 instances, u64 seed, u64 budget,
                                       unsigned jobs, const VolumeSink& sink = {});

// --- a mod p central and a^2 central => a central (q odd) --------------------

struct CentralSquareCheck {
    bool residue_central = false;
    bool square_central = false;
    bool central = false;
    bool hypotheses() const { return residue_central && square_central; }
    bool holds() const { return !hypotheses() || central; }
};
CentralSquareCheck central_square_lemma(const Matrix<Zmod>& a);

struct CentralSquareSweep {
    u64 checked = 0;
    u64 hypotheses_met = 0;
    u64 violations = 0;
};
// All a with a mod p central (the only candidates for the hypotheses).
CentralSquareSweep central_square_sweep(const LocalRing& ring, std::size_t rank, u64 budget);

// --- Polynomial congruences ----------------------------------------------------

struct Monomial {
    std::vector<std::uint8_t> exps;
    Zmod coeff;
};

class MultiPoly {
public:
    MultiPoly(const LocalRing& ring, std::size_t nvars) : ring_(ring), n_(nvars) {}

    void add_term(std::vector<std::uint8_t> exps, const Zmod& c);
    Zmod eval(const Vec<Zmod>& x) const;
    // Coefficient of prod (X_i - y_i)^{k_i} in the expansion of P about y.
    Zmod taylor_coefficient(const Vec<Zmod>& y, const std::vector<std::uint8_t>& k) const;
    std::size_t degree() const;
    std::size_t nvars() const { return n_; }
    const LocalRing& ring() const { return ring_; }
    const std::vector<Monomial>& terms() const { return terms_; }
    std::string to_string() const;

private:
    LocalRing ring_;
    std::size_t n_;
    std::vector<Monomial> terms_;
};

// #{y in (Z/p^m)^n : P(y) = 0} by full enumeration.
u64 congruence_count(const MultiPoly& P, u64 budget);

enum class CongruenceRegime { UnitLinear, UnitQuadratic };
const char* regime_name(CongruenceRegime r);

// u X_1 + G(X_2..X_n) + p R(X), resp. u X_1^2 + G(X_2..X_n) + p R(X).
MultiPoly random_regime_polynomial(const LocalRing& ring, std::size_t nvars, std::size_t degree,
                                   CongruenceRegime regime, Rng& rng);

// The regime hypothesis at every y (it depends only on y mod p).
bool regime_hypothesis_holds(const MultiPoly& P, CongruenceRegime regime);

// q^{mn-m}, resp. q^{mn-ceil(m/2)}.
u64 congruence_scale(u64 q, std::uint32_t m, std::size_t n, CongruenceRegime regime);
// Constant from the Hensel / rescaling argument: d, resp. d^{ceil(m/2)}.
u64 calibrated_constant(std::size_t degree, std::uint32_t m, CongruenceRegime regime);

struct CongruenceCheck {
    u64 count = 0;
    u64 scale = 0;
    u64 calibrated = 0;
    Rational constant;  // count / scale
    bool hypothesis = false;
    bool within() const { return hypothesis && count <= calibrated * scale; }
};
CongruenceCheck congruence_check(const MultiPoly& P, CongruenceRegime regime, u64 budget);

struct CongruenceSweep {
    std::array<u64, 2> polynomials{};
    std::array<Rational, 2> max_constant{};
    std::array<u64, 2> failures{};
    u64 hypersurface_checked = 0;
    u64 hypersurface_failures = 0;
    bool anchors_exact = false;
};
// Grid p in primes, m <= max_m, n <= max_n; per_cell polynomials per regime and cell.
CongruenceSweep congruence_sweep(const std::vector<std::uint32_t>& primes, std::uint32_t max_m, std::size_t max_n,
                                 std::size_t per_cell, u64 seed, u64 budget);

// --- Bilinear forms ---------------------------------------------------------

// H = GL_n(R) embedded in G, with a lookup from matrix to index.
class HGroup {
public:
    HGroup(const LocalRing& ring, std::size_t rank, u64 budget);
    const std::vector<Matrix<Zmod>>& elements() const { return elems_; }
    std::size_t size() const { return elems_.size(); }
    std::size_t index_of(const Matrix<Zmod>& h) const;
    const LocalRing& ring() const { return ring_; }

private:
    LocalRing ring_;
    std::vector<Matrix<Zmod>> elems_;
    std::unordered_map<u64, std::size_t> index_;
};

// A random nonnegative function on H, right-invariant under H_{tau_H}.
std::vector<u64> random_invariant_function(const HGroup& H, const Matrix<Zmod>& tau, u64 max_value, Rng& rng);
bool is_right_invariant(const HGroup& H, const Matrix<Zmod>& tau, const std::vector<u64>& u);

struct BilinearResult {
    Rational I;
    Rational norm1_sq, norm2_sq;  // probability-measure L^2 norms, squared
    Rational trivial_factor;      // 1/|H|
    std::optional<Rational> refined_factor;  // C * shape / |H|, gamma outside HZ
    DistanceValue d_h;
    bool trivial_ok = false;
    bool refined_ok = true;
    bool trivial_saturated = false;
};

// I = |H|^{-2} sum over x, y in H with x^{-1} gamma y in G_tau of u1(x) u2(y).
// Bounds compared through squares.
BilinearResult bilinear_form_check(const HGroup& H, const Matrix<Zmod>& tau, const Matrix<Zmod>& gamma,
                                   const std::vector<u64>& u1, const std::vector<u64>& u2, const Rational& C);
// Same I by the literal double sum (oracle).
Rational bilinear_form_direct(const HGroup& H, const Matrix<Zmod>& tau, const Matrix<Zmod>& gamma,
                              const std::vector<u64>& u1, const std::vector<u64>& u2);

struct BilinearSweep {
    u64 gammas = 0;
    u64 refined_checked = 0;
    u64 trivial_failures = 0;
    u64 refined_failures = 0;
    Rational worst_refined_ratio_sq = 0;  // max (I / refined bound)^2
    bool identity_saturates = false;
};
BilinearSweep bilinear_sweep(const HGroup& H, const Matrix<Zmod>& tau, const std::vector<u64>& u1,
                             const std::vector<u64>& u2, const Rational& C, u64 budget);

}  // namespace ggp
