#include "doctest.h"

#include <map>
#include <random>
#include <set>

#include "ggp/ggp_core.hpp"

using namespace ggp;

namespace {

Matrix<Zmod> mat(const LocalRing& R, std::size_t n, std::initializer_list<i64> xs) {
    Vec<Zmod> e;
    for (auto x : xs) e.push_back(R.from_int(x));
    return Matrix<Zmod>::from_rows(n, e);
}

MonicPoly<Zmod> poly(const LocalRing& R, std::initializer_list<i64> lower) {
    Vec<Zmod> c;
    for (auto x : lower) c.push_back(R.from_int(x));
    return MonicPoly<Zmod>::from_lower(c, R.one());
}

}  // namespace

TEST_CASE("stability discriminant of the worked F_5 example") {
    LocalRing R(5, 1);
    auto tau = mat(R, 3, {0, 1, 0, 1, 0, 1, 2, 4, 0});
    auto [rows, cols] = stability_determinants(tau);
    CHECK(rows == R.from_int(3));
    CHECK(cols == R.from_int(-1));
    CHECK(stability_delta(tau) == R.from_int(2));
    CHECK(is_stable(tau));
}

TEST_CASE("construct_tau reproduces the worked example") {
    LocalRing R(5, 1);
    auto tau = construct_tau(poly(R, {-2, 0, 0}), poly(R, {-1, 0}));
    CHECK(tau == mat(R, 3, {0, 1, 0, 1, 0, 1, 2, 4, 0}));
}

TEST_CASE("construct_tau for nilpotent targets") {
    LocalRing R(3, 2);
    for (std::size_t n = 1; n <= 5; ++n) {
        Vec<Zmod> zP(n + 1, R.zero()), zH(n, R.zero());
        auto P = MonicPoly<Zmod>::from_lower(zP, R.one());
        auto PH = MonicPoly<Zmod>::from_lower(zH, R.one());
        // X^{n+1} and X^n share the root 0: not a stable pair.
        CHECK_THROWS_AS(construct_tau(P, PH), NotStable);
        // Shift P_H so the pair becomes coprime.
        auto PH1 = MonicPoly<Zmod>::linear(R.one());
        MonicPoly<Zmod> PHn = PH1;
        for (std::size_t k = 1; k < n; ++k) PHn = PHn * PH1;
        auto tau = construct_tau(P, PHn);
        CHECK(charpoly(tau) == P);
        CHECK(charpoly(tau_sub_h(tau)) == PHn);
        CHECK(is_stable(tau));
    }
}

TEST_CASE("construct_tau hits every coprime pair over Z/9 at rank 3") {
    LocalRing R(3, 2);
    auto pairs = coprime_pairs(R, 3);
    CHECK(pairs.size() > 0);
    std::mt19937_64 rng(5);
    for (int i = 0; i < 300; ++i) {
        const auto& [P, PH] = pairs[rng() % pairs.size()];
        auto tau = construct_tau(P, PH);
        CHECK(charpoly(tau) == P);
        CHECK(charpoly(tau_sub_h(tau)) == PH);
    }
}

TEST_CASE("stability is equivalent to coprime charpolys (exhaustive, F_3 rank 3)") {
    LocalRing R(3, 1);
    // Stable orbits are classified by the charpoly pair; H(F_3) acts freely.
    std::map<std::pair<u64, u64>, int> per_pair;
    int stable = 0;
    for_each_matrix(R, 3, 20000, [&](const Matrix<Zmod>& tau) {
        bool s = is_stable(tau);
        auto P = charpoly(tau), PH = charpoly(tau_sub_h(tau));
        CHECK(s == monic_coprime(P, PH));
        if (s) {
            ++stable;
            u64 kp = P[0].value() + 3 * P[1].value() + 9 * P[2].value();
            u64 kh = PH[0].value() + 3 * PH[1].value();
            per_pair[{kp, kh}]++;
        }
    });
    auto pairs = coprime_pairs(R, 3);
    CHECK(per_pair.size() == pairs.size());
    for (const auto& [k, c] : per_pair) CHECK(c == 48);
    CHECK(stable == 48 * static_cast<int>(pairs.size()));
}

TEST_CASE("centralizer of a cyclic tau is R[tau] (brute-force commutant over F_3)") {
    LocalRing R(3, 1);
    auto tau = companion(poly(R, {-1, 0, 0}));
    CHECK(charpoly(tau) == poly(R, {-1, 0, 0}));
    auto basis = centralizer_basis(tau);
    std::set<u64> span;
    for (u64 a = 0; a < 3; ++a)
        for (u64 b = 0; b < 3; ++b)
            for (u64 c = 0; c < 3; ++c)
                span.insert(matrix_key(R, from_coefficients(basis, {R.element(a), R.element(b), R.element(c)})));
    std::set<u64> commutant;
    for_each_matrix(R, 3, 20000, [&](const Matrix<Zmod>& x) {
        if (commutes(x, tau)) commutant.insert(matrix_key(R, x));
    });
    CHECK(commutant == span);
    CHECK(commutant.size() == 27);
}

TEST_CASE("non-cyclic tau is rejected") {
    LocalRing R(3, 1);
    CHECK_THROWS_AS(centralizer_basis(Matrix<Zmod>::identity(3, R.zero())), NotCyclic);
    CHECK_FALSE(is_cyclic(mat(R, 3, {1, 0, 0, 0, 1, 0, 0, 0, 2})));
    CHECK(is_cyclic(mat(R, 3, {0, 0, 0, 0, 1, 0, 0, 0, 2})));
}

TEST_CASE("flag-cyclic construction is cyclic with the right diagonal blocks") {
    LocalRing R(3, 2);
    std::vector<MonicPoly<Zmod>> blocks{poly(R, {1}), poly(R, {2, 0}), poly(R, {1}), poly(R, {0, 1})};
    auto tau = construct_flag_cyclic(blocks);
    CHECK(tau.dim() == 6);
    CHECK(is_cyclic(tau));
    MonicPoly<Zmod> prod = MonicPoly<Zmod>::one(R.one());
    for (const auto& b : blocks) prod = prod * b;
    CHECK(charpoly(tau) == prod);
    // Block upper triangular: nothing below the diagonal blocks.
    std::size_t off = 0;
    for (const auto& b : blocks) {
        for (std::size_t i = off + b.degree(); i < 6; ++i)
            for (std::size_t j = off; j < off + b.degree(); ++j) CHECK(tau(i, j).is_zero());
        off += b.degree();
    }
}

TEST_CASE("centralizer units: |G_tau(F_3)| for a split regular tau") {
    LocalRing R(3, 1);
    auto tau = mat(R, 3, {0, 0, 0, 0, 1, 0, 0, 0, 2});
    CHECK(centralizer_units(R, tau, 1000).size() == 8);
    CHECK_THROWS_AS(centralizer_units(R, tau, 10), BudgetExceeded);
}

TEST_CASE("membership form: both variants agree with brute-force decomposition (F_3 rank 3)") {
    LocalRing R(3, 1);
    auto tau = construct_tau(poly(R, {1, 0, 0}), poly(R, {1, 0}));
    StableTau<Zmod> st(tau);
    auto gtau = centralizer_units(R, tau, 1000);
    // Oracle: H G_tau as a set of keys.
    std::set<u64> hg;
    std::vector<Matrix<Zmod>> H;
    for_each_matrix(R, 2, 1000, [&](const Matrix<Zmod>& A) {
        if (is_invertible(A)) H.push_back(embed_h(A));
    });
    for (const auto& h : H)
        for (const auto& b : gtau) hg.insert(matrix_key(R, h * b));
    CHECK(hg.size() == H.size() * gtau.size());  // H meets G_tau trivially
    int members = 0;
    for_each_matrix(R, 3, 20000, [&](const Matrix<Zmod>& g) {
        if (!is_invertible(g)) return;
        bool in = st.in_h_gtau(g);
        CHECK(in == (hg.count(matrix_key(R, g)) == 1));
        auto cr = st.membership_form_cramer(g);
        Vec<Zmod> detvec = st.one();
        detvec[0] = determinant(g);
        if (in) {
            ++members;
            CHECK(cr == detvec);
            auto [h, b] = st.decompose(g);
            CHECK(in_h(h));
            CHECK(st.in_centralizer(b));
            CHECK(h * b == g);
        } else {
            CHECK_THROWS_AS(st.decompose(g), NotInProduct);
        }
    });
    CHECK(members == static_cast<int>(hg.size()));
}

TEST_CASE("M_tau arithmetic matches matrix multiplication") {
    LocalRing R(5, 2);
    auto tau = construct_tau(poly(R, {3, 1, 2, 0}), poly(R, {1, 0, 4}));
    StableTau<Zmod> st(tau);
    std::mt19937_64 rng(7);
    for (int i = 0; i < 50; ++i) {
        Vec<Zmod> a, b;
        for (int j = 0; j < 4; ++j) {
            a.push_back(R.element(rng() % 25));
            b.push_back(R.element(rng() % 25));
        }
        CHECK(st.to_matrix(st.mul(a, b)) == st.to_matrix(a) * st.to_matrix(b));
        CHECK(st.coefficients_of(st.to_matrix(a)) == a);
        CHECK(st.from_row(st.to_matrix(a).row(3)) == a);
    }
}
