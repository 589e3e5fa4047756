#include "doctest.h"

#include <random>
#include <set>

#include "ggp/transversality_search.hpp"

using namespace ggp;

namespace {

MonicPoly<Zmod> poly(const LocalRing& R, std::initializer_list<i64> lower) {
    Vec<Zmod> c;
    for (auto x : lower) c.push_back(R.from_int(x));
    return MonicPoly<Zmod>::from_lower(c, R.one());
}

// All of M_{H,tau_H}(R) as directions, by coefficient enumeration.
std::vector<Matrix<Zmod>> all_h_directions(const LocalRing& R, const Matrix<Zmod>& tau) {
    auto basis = h_direction_basis(tau);
    std::vector<Matrix<Zmod>> out;
    const std::size_t n = basis.size();
    u64 total = 1;
    for (std::size_t i = 0; i < n; ++i) total *= R.size();
    for (u64 idx = 0; idx < total; ++idx) {
        Vec<Zmod> c;
        u64 r = idx;
        for (std::size_t i = 0; i < n; ++i) {
            c.push_back(R.element(r % R.size()));
            r /= R.size();
        }
        out.push_back(from_coefficients(basis, c));
    }
    return out;
}

// Oracle: every lift y + e w of y lies in X over R[e].
bool tangential_oracle(const LocalRing& R, const Matrix<Zmod>& tau, const Matrix<Zmod>& a, const Matrix<Zmod>& y) {
    StableTau<Dual<Zmod>> st(lift_dual(tau));
    auto ad = lift_dual(a);
    for (const auto& w : all_h_directions(R, tau)) {
        auto yl = Matrix<Dual<Zmod>>::from_rows(y.dim(), [&] {
            Vec<Dual<Zmod>> e;
            for (std::size_t i = 0; i < y.entries().size(); ++i) e.push_back({y.entries()[i], w.entries()[i]});
            return e;
        }());
        if (!st.in_h_gtau(ad * yl)) return false;
    }
    return true;
}

// Oracle: every lift y + e1 w1 + e2 w2 + e1e2 w12 lies in X over R[e1,e2].
bool doubly_oracle(const LocalRing& R, const Matrix<Zmod>& tau, const Matrix<Zmod>& a, const Matrix<Zmod>& y) {
    StableTau<BiDual<Zmod>> st(lift_bidual(tau));
    auto ab = lift_bidual(a);
    auto dirs = all_h_directions(R, tau);
    for (const auto& w1 : dirs)
        for (const auto& w2 : dirs)
            for (const auto& w12 : dirs) {
                Vec<BiDual<Zmod>> e;
                for (std::size_t i = 0; i < y.entries().size(); ++i)
                    e.push_back({y.entries()[i], w1.entries()[i], w2.entries()[i], w12.entries()[i]});
                if (!st.in_h_gtau(ab * Matrix<BiDual<Zmod>>::from_rows(y.dim(), e))) return false;
            }
    return true;
}

}  // namespace

TEST_CASE("basis tangency test agrees with enumerating all lifts (F_3, rank 3)") {
    LocalRing R(3, 1);
    auto taus = stable_tau_classes(R, 3);
    std::mt19937_64 rng(11);
    auto G = general_linear(R, 3, 100000);
    int checked = 0, tangential = 0, doubly = 0;
    for (int trial = 0; trial < 60; ++trial) {
        const auto& tau = taus[rng() % taus.size()].tau;
        // Mix a in G_tau (tangency likely) with arbitrary a.
        Matrix<Zmod> a = trial % 2 ? G[rng() % G.size()] : [&] {
            auto gt = g_tau_elements(R, tau, 1000);
            return gt[rng() % gt.size()];
        }();
        XScheme<Zmod> X(tau, a);
        for (const auto& y : enumerate_x_points(R, X, 1000)) {
            auto rep = X.tangency(y, true);
            CHECK(rep.tangential == tangential_oracle(R, tau, a, y));
            if (rep.tangential) CHECK(rep.doubly_tangential == doubly_oracle(R, tau, a, y));
            CHECK(X.replay(y, rep));
            ++checked;
            tangential += rep.tangential;
            doubly += rep.doubly_tangential;
        }
    }
    CHECK(checked > 0);
    CHECK(tangential > 0);
    CHECK(doubly > 0);
}

TEST_CASE("four equivalent conditions for tangency at 1 (exhaustive F_3 and F_5, rank 3)") {
    for (std::uint32_t p : {3u, 5u}) {
        LocalRing R(p, 1);
        auto taus = stable_tau_classes(R, 3);
        if (p == 5) taus.resize(40);
        auto recs = sweep_tangency_at_one(R, taus, 1000000, 1);
        std::size_t bad = 0, tang = 0;
        for (const auto& r : recs) {
            bad += !r.consistent;
            tang += r.conditions.tangential;
        }
        CHECK(bad == 0);
        CHECK(tang > 0);
        CHECK(tang < recs.size());
    }
}

TEST_CASE("tangency at 1 over Z/9 (seeded)") {
    LocalRing R(3, 2);
    auto run = sweep_tangency_at_one_seeded(R, 3, 120, 12, 2);
    REQUIRE(run.records.size() == 120);
    std::size_t tang = 0, doubly = 0, central = 0;
    for (const auto& r : run.records) {
        CHECK(r.consistent);
        CHECK(is_stable(run.taus[r.tau_index].tau));
        CHECK(commutes(r.a, run.taus[r.tau_index].tau));
        tang += r.conditions.tangential;
        doubly += r.doubly_tangential;
        central += r.a_central;
    }
    // Both sides of each equivalence are exercised.
    CHECK(tang > 0);
    CHECK(tang < run.records.size());
    CHECK(central > 0);
    CHECK(doubly == central);
    // Same seed, different thread count: identical draws.
    auto again = sweep_tangency_at_one_seeded(R, 3, 120, 12, 1);
    for (std::size_t i = 0; i < 120; ++i) CHECK(again.records[i].a == run.records[i].a);
}

TEST_CASE("H \\ G / Z coset representatives") {
    for (auto [p, m] : {std::pair{3u, 1u}, {2u, 1u}, {3u, 2u}}) {
        LocalRing R(p, m);
        const std::size_t d = 3;
        auto reps = hz_coset_representatives(R, d, 100000000);
        CHECK(reps.size() == hz_coset_count(R, d));
        std::set<u64> keys;
        for (const auto& g : reps) {
            auto gi = inverse(g);
            keys.insert(hz_coset_key(R, g, gi));
        }
        CHECK(keys.size() == reps.size());
        if (m == 1) {
            // Every element of G lands on a representative's key.
            std::size_t hits = 0, total = 0;
            for (const auto& g : general_linear(R, d, 1000000)) {
                ++total;
                hits += keys.count(hz_coset_key(R, g, inverse(g)));
            }
            CHECK(hits == total);
        }
    }
    QuadraticField F4(2);
    CHECK(hz_coset_representatives(F4, 3, 100000000).size() == 336);
}

TEST_CASE("X_{tau,a} depends only on the coset H a Z") {
    LocalRing R(3, 1);
    auto taus = stable_tau_classes(R, 3);
    auto G = general_linear(R, 3, 100000);
    std::vector<Matrix<Zmod>> H;
    for (const auto& g : general_linear(R, 2, 1000)) H.push_back(embed_h(g));
    std::mt19937_64 rng(13);
    for (int i = 0; i < 40; ++i) {
        const auto& tau = taus[rng() % taus.size()].tau;
        const auto& a = G[rng() % G.size()];
        auto h = H[rng() % H.size()];
        auto z = Matrix<Zmod>::scalar(3, R.from_int(2));
        XScheme<Zmod> X1(tau, a), X2(tau, h * a * z);
        for (const auto& y : h_centralizer_units(R, tau, 1000)) CHECK(X1.contains(y) == X2.contains(y));
    }
}

TEST_CASE("homomorphism defect vanishes for central a") {
    LocalRing R(5, 1);
    auto tau = construct_tau(poly(R, {3, 1, 2}), poly(R, {1, 0}));
    StableTau<Zmod> st(tau);
    auto a = Matrix<Zmod>::scalar(3, R.from_int(2));
    auto dirs = h_direction_basis(tau);
    for (const auto& u : dirs)
        for (const auto& v : dirs) {
            auto d = homomorphism_defect(st, a, u, v);
            for (const auto& x : d) CHECK(x.is_zero());
        }
    CHECK_THROWS_AS(mu_nu(st, embed_h(Matrix<Zmod>::from_rows(2, {R.one(), R.one(), R.zero(), R.one()})), dirs[0]),
                    PreconditionFailed);
}

TEST_CASE("tangency requires a point of X") {
    LocalRing R(3, 1);
    auto taus = stable_tau_classes(R, 3);
    auto G = general_linear(R, 3, 100000);
    for (const auto& a : G) {
        XScheme<Zmod> X(taus[0].tau, a);
        auto I = Matrix<Zmod>::identity(3, R.zero());
        if (!X.contains(I)) {
            CHECK_THROWS_AS(X.tangency(I), PreconditionFailed);
            break;
        }
    }
}

#include "ggp/witnesses.hpp"

TEST_CASE("rank 2 antidiagonal pair: X is all of H_{tau_H}") {
    for (auto [p, m] : {std::pair{5u, 1u}, {3u, 2u}, {7u, 1u}}) {
        auto r = check_rank_two_antidiagonal(LocalRing(p, m));
        CHECK(r.a_outside_hz);
        CHECK(r.x_points == r.centralizer_size);
        CHECK(r.closed_form_matches);
        CHECK(r.doubly_tangential_everywhere);
    }
}

TEST_CASE("rank 2 search over F_5 contains the antidiagonal pair") {
    LocalRing R(5, 1);
    auto found = search_counterexamples(R, 2, 1000000, 1);
    auto tau = Matrix<Zmod>::from_rows(2, {R.zero(), R.one(), R.one(), R.zero()});
    bool hit = false;
    for (const auto& c : found) {
        CHECK(replay_counterexample(R, c, 1000000));
        if (c.tau == tau) {
            XScheme<Zmod> X(c.tau, c.a);
            // same double coset as a = tau
            hit = hit || hz_coset_key(R, c.a, inverse(c.a)) == hz_coset_key(R, tau, inverse(tau));
        }
    }
    CHECK(hit);
}

TEST_CASE("rank-6 diagonal example over F_17") {
    auto w = gl6_witness();
    CHECK(w.a0_b0_zero);
    CHECK(w.a1_is_minus_alpha);
    CHECK(w.mu_one_h_is_one);
    CHECK(w.mu_tau_h_diagonal);
    CHECK(w.p_tau_h_annihilates);
    CHECK(w.center_in_x);
    CHECK(w.x_proper);
    CHECK(w.a_outside_hz);
    CHECK(is_stable(w.tau));
    CHECK_THROWS_AS(gl6_witness(17, 5), PreconditionFailed);
}
