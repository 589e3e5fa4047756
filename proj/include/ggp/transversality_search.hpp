#pragma once

// Exhaustive sweeps over stable tau (one per coprime charpoly pair; stable
// elements with equal charpoly pairs are H-conjugate, and every quantity here
// is H-equivariant) and over a.

#include <functional>

#include "ggp/parallel.hpp"
#include "ggp/random.hpp"
#include "ggp/transversality.hpp"

namespace ggp {

template <Scalar T>
struct TauClass {
    MonicPoly<T> P, P_H;
    Matrix<T> tau;
};

template <FiniteRing R>
std::vector<TauClass<typename R::Elem>> stable_tau_classes(const R& ring, std::size_t rank) {
    std::vector<TauClass<typename R::Elem>> out;
    for (auto& [P, PH] : coprime_pairs(ring, rank)) {
        auto tau = construct_tau(P, PH);
        out.push_back({P, PH, std::move(tau)});
    }
    return out;
}

// All elements of G_tau(R) (units of R[tau]).
template <FiniteRing R>
std::vector<Matrix<typename R::Elem>> g_tau_elements(const R& ring, const Matrix<typename R::Elem>& tau, u64 budget) {
    return centralizer_units(ring, tau, budget);
}

template <FiniteRing R>
std::vector<Matrix<typename R::Elem>> general_linear(const R& ring, std::size_t d, u64 budget) {
    std::vector<Matrix<typename R::Elem>> out;
    for_each_matrix(ring, d, budget, [&](const Matrix<typename R::Elem>& g) {
        if (is_invertible(g)) out.push_back(g);
    });
    return out;
}

// --- Tangency at the identity for a in G_tau ------------------------------

template <Scalar T>
struct AtOneRecord {
    std::size_t tau_index;
    Matrix<T> a;
    TangencyAtOne conditions;
    bool doubly_tangential;
    bool a_central;
    // tangential <=> a^2 central, doubly <=> a central (the latter asserted
    // only when 2 is a unit and rank >= 3).
    bool consistent;
};

template <FiniteRing R>
std::vector<AtOneRecord<typename R::Elem>> sweep_tangency_at_one(const R& ring, const std::vector<TauClass<typename R::Elem>>& taus,
                                                                  u64 budget, unsigned jobs) {
    using T = typename R::Elem;
    const bool check_double = ring.p() != 2 && !taus.empty() && taus.front().tau.dim() >= 3;
    auto per_tau = parallel_map(taus.size(), jobs, [&](std::size_t t) {
        std::vector<AtOneRecord<T>> recs;
        const auto& tau = taus[t].tau;
        auto I = Matrix<T>::identity(tau.dim(), tau.sample());
        TauEngine<T> engine(tau);
        for (const auto& a : g_tau_elements(ring, tau, budget)) {
            XScheme<T> X(engine, a);
            auto cond = tangency_at_one_conditions(X);
            auto rep = X.tangency(I, true);
            bool central = is_scalar_matrix(a);
            bool ok = cond.tangential == cond.square_central && cond.tangential == cond.mu_equals_nu &&
                      cond.tangential == cond.ab_relation;
            if (check_double) ok = ok && rep.doubly_tangential == central;
            recs.push_back({t, a, cond, rep.doubly_tangential, central, ok});
        }
        return recs;
    });
    std::vector<AtOneRecord<T>> out;
    for (auto& v : per_tau)
        for (auto& r : v) out.push_back(std::move(r));
    return out;
}

// Seeded variant: instance i draws a stable tau and a in G_tau from its own
// stream, cycling through a uniform unit of R[tau], a scalar, and a scalar
// times 1 + p^{m-1} x (central mod p^{m-1} but usually not central).
template <FiniteRing R>
struct SeededAtOne {
    std::vector<TauClass<typename R::Elem>> taus;  // one per instance
    std::vector<AtOneRecord<typename R::Elem>> records;
};

inline u64 instance_seed(u64 seed, std::size_t i) { return seed + 0x9E3779B97F4A7C15ULL * (i + 1); }

template <FiniteRing R>
SeededAtOne<R> sweep_tangency_at_one_seeded(const R& ring, std::size_t rank, u64 instances, u64 seed, unsigned jobs) {
    using T = typename R::Elem;
    const bool check_double = ring.p() != 2 && rank >= 3;
    auto drawn = parallel_map(instances, jobs, [&](std::size_t i) {
        Rng rng(instance_seed(seed, i));
        auto tau = random_stable_tau(ring, rank, rng);
        const auto basis = centralizer_basis(tau);
        Matrix<T> a;
        const T unit = [&] {
            for (;;) {
                auto x = random_element(ring, rng);
                if (x.is_unit()) return x;
            }
        }();
        switch (i % 3) {
            case 0: a = random_unit_of(ring, basis, rng); break;
            case 1: a = Matrix<T>::scalar(rank, unit); break;
            default: {
                T pm = ring.one();
                for (std::uint32_t k = 1; k < ring.m(); ++k) pm = pm * ring.from_int(ring.p());
                auto x = random_unit_of(ring, basis, rng);
                a = Matrix<T>::scalar(rank, unit) * (Matrix<T>::identity(rank, unit) + x * pm);
                if (!is_invertible(a)) a = x;
            }
        }
        XScheme<T> X(tau, a);
        auto cond = tangency_at_one_conditions(X);
        auto rep = X.tangency(Matrix<T>::identity(rank, unit), true);
        bool central = is_scalar_matrix(a);
        bool ok = cond.tangential == cond.square_central && cond.tangential == cond.mu_equals_nu &&
                  cond.tangential == cond.ab_relation;
        if (check_double) ok = ok && rep.doubly_tangential == central;
        return std::pair{TauClass<T>{charpoly(tau), charpoly(tau_sub_h(tau)), tau},
                         AtOneRecord<T>{i, a, cond, rep.doubly_tangential, central, ok}};
    });
    SeededAtOne<R> out;
    for (auto& [cls, rec] : drawn) {
        out.taus.push_back(std::move(cls));
        out.records.push_back(std::move(rec));
    }
    return out;
}

// --- Main transversality: a outside HZ is never doubly tangential ---------

template <Scalar T>
struct TransversalityRecord {
    std::size_t tau_index;
    Matrix<T> a;
    std::size_t x_points;
    std::size_t centralizer_size;
    std::size_t doubly_tangential_points;
    std::size_t tangential_points;
    // Theorem check: tangential at y iff b^2 central where a y = h b.
    bool tangency_matches_b_square;
    bool ok;
};

enum class AMode { CosetRepresentatives, AllOfG };

template <FiniteRing R>
std::vector<Matrix<typename R::Elem>> a_candidates(const R& ring, std::size_t d, AMode mode, u64 budget) {
    if (mode == AMode::CosetRepresentatives) return hz_coset_representatives(ring, d, budget);
    return general_linear(ring, d, budget);
}

template <FiniteRing R>
std::vector<TransversalityRecord<typename R::Elem>>
sweep_transversality(const R& ring, const std::vector<TauClass<typename R::Elem>>& taus,
                     const std::vector<Matrix<typename R::Elem>>& as, u64 budget, unsigned jobs) {
    using T = typename R::Elem;
    auto per_tau = parallel_map(taus.size(), jobs, [&](std::size_t t) {
        std::vector<TransversalityRecord<T>> recs;
        const auto& tau = taus[t].tau;
        auto hunits = h_centralizer_units(ring, tau, budget);
        TauEngine<T> engine(tau);
        for (const auto& a : as) {
            if (in_hz(a)) continue;
            XScheme<T> X(engine, a);
            TransversalityRecord<T> rec{t, a, 0, hunits.size(), 0, 0, true, true};
            for (const auto& y : hunits) {
                if (!X.contains(y)) continue;
                ++rec.x_points;
                auto rep = X.tangency(y, true);
                rec.tangential_points += rep.tangential;
                rec.doubly_tangential_points += rep.doubly_tangential;
                auto b = X.tau_data().decompose(a * y).second;
                if (rep.tangential != is_scalar_matrix(b * b)) rec.tangency_matches_b_square = false;
            }
            rec.ok = rec.doubly_tangential_points == 0 && rec.tangency_matches_b_square;
            recs.push_back(std::move(rec));
        }
        return recs;
    });
    std::vector<TransversalityRecord<T>> out;
    for (auto& v : per_tau)
        for (auto& r : v) out.push_back(std::move(r));
    return out;
}

// --- Counterexample search -------------------------------------------------

template <Scalar T>
struct Counterexample {
    Matrix<T> tau;
    MonicPoly<T> P, P_H;
    Matrix<T> a;
    std::size_t x_points;
    std::size_t centralizer_size;
    bool x_is_everything;  // X(R) = H_{tau_H}(R)
};

// Pairs (tau, a) with a outside HZ and X_{tau,a}(R) nonempty and doubly
// tangential at every point.  Empty for odd p and rank >= 3.
template <FiniteRing R>
std::vector<Counterexample<typename R::Elem>> search_counterexamples(const R& ring, std::size_t rank, u64 budget, unsigned jobs) {
    using T = typename R::Elem;
    auto taus = stable_tau_classes(ring, rank);
    auto as = hz_coset_representatives(ring, rank, budget);
    auto per_tau = parallel_map(taus.size(), jobs, [&](std::size_t t) {
        std::vector<Counterexample<T>> found;
        const auto& tau = taus[t].tau;
        auto hunits = h_centralizer_units(ring, tau, budget);
        TauEngine<T> engine(tau);
        for (const auto& a : as) {
            if (in_hz(a)) continue;
            XScheme<T> X(engine, a);
            std::size_t points = 0;
            bool all_double = true;
            for (const auto& y : hunits) {
                if (!X.contains(y)) continue;
                ++points;
                if (!X.tangency(y, true).doubly_tangential) {
                    all_double = false;
                    break;
                }
            }
            if (points > 0 && all_double)
                found.push_back({tau, taus[t].P, taus[t].P_H, a, points, hunits.size(), points == hunits.size()});
        }
        return found;
    });
    std::vector<Counterexample<T>> out;
    for (auto& v : per_tau)
        for (auto& r : v) out.push_back(std::move(r));
    return out;
}

// Replay: recompute every claim of a counterexample record from scratch.
template <FiniteRing R>
bool replay_counterexample(const R& ring, const Counterexample<typename R::Elem>& c, u64 budget) {
    using T = typename R::Elem;
    if (in_hz(c.a) || !is_stable(c.tau)) return false;
    XScheme<T> X(c.tau, c.a);
    std::size_t points = 0;
    for (const auto& y : h_centralizer_units(ring, c.tau, budget)) {
        if (!X.contains(y)) continue;
        ++points;
        if (!X.tangency(y, true).doubly_tangential) return false;
    }
    return points == c.x_points && points > 0;
}

}  // namespace ggp
