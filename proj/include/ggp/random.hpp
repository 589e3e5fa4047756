#pragma once

// Seeded sampling.  std::uniform_int_distribution is implementation-defined,
// so reported seeds would not replay across standard libraries; we reduce
// mt19937_64 output by rejection instead.

#include <random>

#include "ggp/ggp_core.hpp"

namespace ggp {

using Rng = std::mt19937_64;

inline u64 uniform_below(Rng& rng, u64 n) {
    if (n <= 1) return 0;
    const u64 limit = ~u64{0} - (~u64{0} % n);
    u64 x;
    do x = rng();
    while (x >= limit);
    return x % n;
}

template <class R>
typename R::Elem random_element(const R& ring, Rng& rng) {
    return ring.element(uniform_below(rng, ring.size()));
}

template <FiniteRing R>
Matrix<typename R::Elem> random_matrix(const R& ring, std::size_t d, Rng& rng) {
    Matrix<typename R::Elem> M(d, ring.zero());
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) M(i, j) = random_element(ring, rng);
    return M;
}

template <FiniteRing R>
Matrix<typename R::Elem> random_invertible(const R& ring, std::size_t d, Rng& rng) {
    for (;;) {
        auto M = random_matrix(ring, d, rng);
        if (is_invertible(M)) return M;
    }
}

template <FiniteRing R>
MonicPoly<typename R::Elem> random_monic(const R& ring, std::size_t deg, Rng& rng) {
    Vec<typename R::Elem> c;
    for (std::size_t i = 0; i < deg; ++i) c.push_back(random_element(ring, rng));
    return MonicPoly<typename R::Elem>::from_lower(c, ring.one());
}

// A uniformly random unit of the algebra spanned by `basis`.
template <FiniteRing R>
Matrix<typename R::Elem> random_unit_of(const R& ring, const std::vector<Matrix<typename R::Elem>>& basis, Rng& rng) {
    for (;;) {
        Vec<typename R::Elem> c;
        for (std::size_t i = 0; i < basis.size(); ++i) c.push_back(random_element(ring, rng));
        auto x = from_coefficients(basis, c);
        if (is_invertible(x)) return x;
    }
}

// A stable tau with uniformly random coprime charpolys (P, P_H).
template <FiniteRing R>
Matrix<typename R::Elem> random_stable_tau(const R& ring, std::size_t rank, Rng& rng) {
    for (;;) {
        auto P = random_monic(ring, rank, rng);
        auto PH = random_monic(ring, rank - 1, rng);
        if (monic_coprime(P, PH)) return construct_tau(P, PH);
    }
}

}  // namespace ggp
