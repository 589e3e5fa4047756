#pragma once

// Exact bookkeeping of the subconvexity exponent: the amplifier length
// L = T^alpha, the per-term powers of T in the amplified bound, the balancing
// alpha, and the resulting saving delta in both normalizations
//     T^{n(n+1)/2 + eps - delta}   and   T^{2 n (n+1) (1/4 - delta_n)}.

#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace ggp {

using ExpRational = boost::multiprecision::cpp_rational;

struct ExponentParams {
    unsigned n = 1;
    ExpRational theta = 0;
    ExpRational alpha = 0;
    // Throws ConfigInvalid unless n >= 1, 0 <= theta < 1/2, alpha > 0.
    void validate() const;
};

// (2 (n+1)^2 - n)(n+1).
unsigned long long a_constant(unsigned n);

// Supremum of admissible delta_n: (1 - 2 theta) / (4 n (n+1) (A + 1 - 2 theta)).
// theta = 1/2 is accepted as the limiting value (0).
ExpRational delta_bound(unsigned n, const ExpRational& theta);

// A power T^exponent, tagged by the term it came from.
struct ExponentTerm {
    ExpRational exponent;
    std::string origin;
    bool operator==(const ExponentTerm&) const = default;
};

// Delta_j << L^j / T^{1/2} + 1/R: exponents {j alpha - 1/2, r} where r = -1/4
// with the floor R >= T^{1/4}, or r = -ceil(m/2) / (2m) for T = q^{2m}.
std::vector<ExponentTerm> delta_j_exponents(unsigned j, const ExpRational& alpha, bool use_r_floor, unsigned m = 1);

// Every term of the amplified bound with Delta_j substituted:
// sum_{j=1}^{n+1} (L^{-(1-2theta) j} + L^{(2(n+1)^2-n) j} Delta_j)
//   + L^{-1} sum_{j=0}^{n+1} (same).
std::vector<ExponentTerm> amplified_terms(const ExponentParams& params);

// L^{-(1-2theta)}, L^A L^{n+1} / T^{1/2}, L^A / T^{1/4}.
std::vector<ExponentTerm> three_term_display(const ExponentParams& params);

ExpRational max_exponent(const std::vector<ExponentTerm>& terms);

struct AlphaOptimum {
    unsigned n = 1;
    ExpRational theta;
    unsigned long long A = 0;
    ExpRational alpha_star;       // 1 / (4 (A + 1 - 2 theta))
    ExpRational delta;            // (1 - 2 theta) / (4 (A + 1 - 2 theta))
    bool first_equals_third = false;
    bool second_dominated = false;   // (n+1) alpha* <= 1/4, so term 2 <= term 3
    bool max_is_minus_delta = false; // over every amplified term
    ExpRational delta_bound;         // the delta_n display
    bool display_consistent = false; // delta == n (n+1) delta_bound
    // delta_n obtained by matching T^{n(n+1)/2 + eps - delta} against
    // T^{2n(n+1)(1/4 - delta_n)}: (delta - eps) / (2 n (n+1)).
    ExpRational delta_n_aligned;
    ExpRational display_over_aligned;  // delta_bound / delta_n_aligned (eps = 0)
    bool ok() const { return first_equals_third && second_dominated && max_is_minus_delta && display_consistent; }
};
AlphaOptimum optimize_alpha(unsigned n, const ExpRational& theta, const ExpRational& epsilon = 0);

std::string rational_to_string(const ExpRational& r);
// "a/b" or "a"; throws ConfigInvalid on malformed input.
ExpRational parse_rational(const std::string& s);

}  // namespace ggp
