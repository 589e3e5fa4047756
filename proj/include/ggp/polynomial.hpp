#pragma once

// Univariate polynomials over the scalar rings.  MonicPoly keeps the full
// coefficient list (constant term first, leading 1 last), so a degree-0
// polynomial still carries a sample element of its ring.

#include <cassert>
#include <string>
#include <vector>

#include "ggp/local_ring.hpp"

namespace ggp {

template <Scalar T>
class MonicPoly {
public:
    MonicPoly() = default;
    // coeffs: c_0, ..., c_{d-1}, 1
    explicit MonicPoly(std::vector<T> coeffs) : c_(std::move(coeffs)) {
        if (c_.empty() || c_.back() != c_.back().one()) throw PreconditionFailed("polynomial is not monic");
    }
    // From the non-leading coefficients c_0..c_{d-1}; `unit` supplies the ring.
    static MonicPoly from_lower(std::vector<T> lower, const T& unit) {
        lower.push_back(unit.one());
        return MonicPoly(std::move(lower));
    }
    static MonicPoly one(const T& unit) { return MonicPoly({unit.one()}); }
    // X - r
    static MonicPoly linear(const T& r) { return MonicPoly({-r, r.one()}); }

    std::size_t degree() const { return c_.size() - 1; }
    const T& operator[](std::size_t i) const { return c_[i]; }
    const std::vector<T>& coeffs() const { return c_; }
    T unit() const { return c_.back(); }

    MonicPoly operator*(const MonicPoly& o) const {
        std::vector<T> r(c_.size() + o.c_.size() - 1, unit().zero());
        for (std::size_t i = 0; i < c_.size(); ++i)
            for (std::size_t j = 0; j < o.c_.size(); ++j) r[i + j] += c_[i] * o.c_[j];
        return MonicPoly(std::move(r));
    }
    bool operator==(const MonicPoly& o) const { return c_ == o.c_; }
    bool operator!=(const MonicPoly& o) const { return !(*this == o); }

    T eval(const T& x) const {
        T acc = c_.back();
        for (std::size_t i = c_.size() - 1; i-- > 0;) acc = acc * x + c_[i];
        return acc;
    }

private:
    std::vector<T> c_;
};

// Dense polynomial over a field with trailing zeros trimmed; used for gcds.
template <Scalar F>
std::vector<F> poly_trim(std::vector<F> a) {
    while (!a.empty() && a.back().is_zero()) a.pop_back();
    return a;
}

// Remainder of a modulo b over a field (b nonzero).
template <Scalar F>
std::vector<F> poly_rem(std::vector<F> a, const std::vector<F>& b) {
    a = poly_trim(std::move(a));
    assert(!b.empty());
    F lead_inv = b.back().inverse();
    while (a.size() >= b.size()) {
        F factor = a.back() * lead_inv;
        std::size_t shift = a.size() - b.size();
        for (std::size_t i = 0; i < b.size(); ++i) a[shift + i] -= factor * b[i];
        a = poly_trim(std::move(a));
    }
    return a;
}

template <Scalar F>
std::vector<F> poly_gcd(std::vector<F> a, std::vector<F> b) {
    a = poly_trim(std::move(a));
    b = poly_trim(std::move(b));
    while (!b.empty()) {
        auto r = poly_rem(a, b);
        a = std::move(b);
        b = std::move(r);
    }
    return a;
}

// Reduction to the residue field: Z/p^m -> F_p, identity on F_{p^2}.
inline Zmod residue(const Zmod& x) { return Zmod(x.value() % x.p(), x.p(), x.p(), 1); }
inline Fq2 residue(const Fq2& x) { return x; }

// Two monic polynomials are coprime over a local ring iff their reductions
// are coprime over the residue field (Nakayama).
template <Scalar T>
bool monic_coprime(const MonicPoly<T>& a, const MonicPoly<T>& b) {
    using F = decltype(residue(a[0]));
    std::vector<F> ra, rb;
    for (const auto& c : a.coeffs()) ra.push_back(residue(c));
    for (const auto& c : b.coeffs()) rb.push_back(residue(c));
    auto g = poly_gcd(ra, rb);
    return g.size() == 1;
}

template <Scalar T>
std::string poly_to_string(const MonicPoly<T>& P) {
    std::string s = "[";
    for (std::size_t i = 0; i < P.coeffs().size(); ++i) {
        if (i) s += ",";
        s += P[i].to_string();
    }
    return s + "]";
}

// All monic polynomials of the given degree over an enumerable ring, in
// lexicographic order of (c_0, ..., c_{d-1}) with c_0 varying fastest.
template <FiniteRing R>
std::vector<MonicPoly<typename R::Elem>> all_monic(const R& ring, std::size_t degree) {
    u64 q = ring.size();
    u64 total = 1;
    for (std::size_t i = 0; i < degree; ++i) {
        if (total > (u64{1} << 40) / q) throw BudgetExceeded("too many monic polynomials to enumerate");
        total *= q;
    }
    std::vector<MonicPoly<typename R::Elem>> out;
    out.reserve(total);
    for (u64 idx = 0; idx < total; ++idx) {
        std::vector<typename R::Elem> c;
        u64 r = idx;
        for (std::size_t i = 0; i < degree; ++i) {
            c.push_back(ring.element(r % q));
            r /= q;
        }
        out.push_back(MonicPoly<typename R::Elem>::from_lower(std::move(c), ring.one()));
    }
    return out;
}

}  // namespace ggp
