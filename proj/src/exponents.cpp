#include "ggp/exponents.hpp"

#include <algorithm>

#include "ggp/errors.hpp"

namespace ggp {

namespace {

const ExpRational kHalf(1, 2);
const ExpRational kQuarter(1, 4);

void check_theta(const ExpRational& theta) {
    if (theta < 0 || theta > kHalf) throw ConfigInvalid("theta must lie in [0, 1/2]");
}

}  // namespace

void ExponentParams::validate() const {
    if (n < 1) throw ConfigInvalid("n must be >= 1");
    if (theta < 0 || theta >= kHalf) throw ConfigInvalid("theta must lie in [0, 1/2)");
    if (alpha <= 0) throw ConfigInvalid("alpha must be positive");
}

unsigned long long a_constant(unsigned n) {
    const unsigned long long m = n + 1ull;
    return (2 * m * m - n) * m;
}

ExpRational delta_bound(unsigned n, const ExpRational& theta) {
    if (n < 1) throw ConfigInvalid("n must be >= 1");
    check_theta(theta);
    const ExpRational A(a_constant(n));
    return (1 - 2 * theta) / (4 * ExpRational(n) * (n + 1) * (A + 1 - 2 * theta));
}

std::vector<ExponentTerm> delta_j_exponents(unsigned j, const ExpRational& alpha, bool use_r_floor, unsigned m) {
    if (m < 1) throw ConfigInvalid("m must be >= 1");
    std::vector<ExponentTerm> out;
    out.push_back({ExpRational(j) * alpha - kHalf, "L^j/T^(1/2)"});
    if (use_r_floor)
        out.push_back({-kQuarter, "1/R, R >= T^(1/4)"});
    else
        out.push_back({-ExpRational((m + 1) / 2, 2 * m), "1/R, R = q^ceil(m/2)"});
    return out;
}

std::vector<ExponentTerm> amplified_terms(const ExponentParams& params) {
    params.validate();
    const unsigned n = params.n;
    const ExpRational& a = params.alpha;
    const ExpRational big(2 * (n + 1ull) * (n + 1ull) - n);
    std::vector<ExponentTerm> out;
    auto add_block = [&](unsigned j, const ExpRational& shift, const std::string& tag) {
        const std::string js = std::to_string(j);
        out.push_back({shift - (1 - 2 * params.theta) * j * a, tag + "L^(-(1-2theta)j), j=" + js});
        for (const auto& d : delta_j_exponents(j, a, true))
            out.push_back({shift + big * j * a + d.exponent, tag + "L^((2(n+1)^2-n)j) Delta_j [" + d.origin + "], j=" + js});
    };
    for (unsigned j = 1; j <= n + 1; ++j) add_block(j, 0, "");
    for (unsigned j = 0; j <= n + 1; ++j) add_block(j, -a, "L^-1 ");
    return out;
}

std::vector<ExponentTerm> three_term_display(const ExponentParams& params) {
    params.validate();
    const ExpRational A(a_constant(params.n));
    const ExpRational& a = params.alpha;
    return {
        {-(1 - 2 * params.theta) * a, "L^(-(1-2theta))"},
        {A * a + (params.n + 1) * a - kHalf, "L^A L^(n+1)/T^(1/2)"},
        {A * a - kQuarter, "L^A/T^(1/4)"},
    };
}

ExpRational max_exponent(const std::vector<ExponentTerm>& terms) {
    if (terms.empty()) throw PreconditionFailed("no terms");
    ExpRational m = terms.front().exponent;
    for (const auto& t : terms) m = std::max(m, t.exponent);
    return m;
}

AlphaOptimum optimize_alpha(unsigned n, const ExpRational& theta, const ExpRational& epsilon) {
    if (n < 1) throw ConfigInvalid("n must be >= 1");
    check_theta(theta);
    if (epsilon < 0) throw ConfigInvalid("epsilon must be nonnegative");
    AlphaOptimum out;
    out.n = n;
    out.theta = theta;
    out.A = a_constant(n);
    const ExpRational A(out.A);
    out.alpha_star = 1 / (4 * (A + 1 - 2 * theta));
    out.delta = (1 - 2 * theta) / (4 * (A + 1 - 2 * theta));
    out.delta_bound = delta_bound(n, theta);
    out.display_consistent = out.delta == ExpRational(n) * (n + 1) * out.delta_bound;
    out.delta_n_aligned = (out.delta - epsilon) / (2 * ExpRational(n) * (n + 1));
    out.display_over_aligned = out.delta_n_aligned == 0 ? ExpRational(0) : out.delta_bound / out.delta_n_aligned;

    // At theta = 1/2 the amplifier no longer helps; the terms are still
    // evaluated at alpha*, which stays positive.
    ExponentParams params{n, theta == kHalf ? ExpRational(0) : theta, out.alpha_star};
    if (theta == kHalf) {
        out.first_equals_third = true;
        out.second_dominated = (n + 1) * out.alpha_star <= kQuarter;
        out.max_is_minus_delta = out.delta == 0;
        return out;
    }
    auto three = three_term_display(params);
    out.first_equals_third = three[0].exponent == three[2].exponent;
    out.second_dominated = (n + 1) * out.alpha_star <= kQuarter && three[1].exponent <= three[2].exponent;
    out.max_is_minus_delta = max_exponent(amplified_terms(params)) == -out.delta;
    return out;
}

std::string rational_to_string(const ExpRational& r) {
    auto num = boost::multiprecision::numerator(r);
    auto den = boost::multiprecision::denominator(r);
    return den == 1 ? num.str() : num.str() + "/" + den.str();
}

ExpRational parse_rational(const std::string& s) {
    try {
        auto slash = s.find('/');
        if (slash == std::string::npos) return ExpRational(boost::multiprecision::cpp_int(s));
        boost::multiprecision::cpp_int num(s.substr(0, slash)), den(s.substr(slash + 1));
        if (den == 0) throw ConfigInvalid("zero denominator in '" + s + "'");
        return ExpRational(num, den);
    } catch (const ConfigInvalid&) {
        throw;
    } catch (const std::exception&) {
        throw ConfigInvalid("not a rational number: '" + s + "'");
    }
}

}  // namespace ggp
