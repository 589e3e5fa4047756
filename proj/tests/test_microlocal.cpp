#include "doctest.h"

#include <set>

#include "ggp/microlocal.hpp"

using namespace ggp;

namespace {

std::vector<Matrix<Zmod>> all_matrices(const LocalRing& R, std::size_t n) {
    std::vector<Matrix<Zmod>> out;
    for_each_matrix(R, n, kDefaultBudget, [&](const Matrix<Zmod>& m) { out.push_back(m); });
    return out;
}

std::vector<Matrix<Zmod>> stable_matrices(const LocalRing& R, std::size_t n) {
    std::vector<Matrix<Zmod>> out;
    for (auto& m : all_matrices(R, n))
        if (is_stable(m)) out.push_back(std::move(m));
    return out;
}

Matrix<Zmod> mat(const LocalRing& R, std::size_t n, std::vector<i64> v) {
    Vec<Zmod> e;
    for (auto x : v) e.push_back(R.from_int(x));
    return Matrix<Zmod>::from_rows(n, e);
}

Matrix<Zmod> random_matrix(const LocalRing& R, std::size_t n, Rng& rng) {
    Matrix<Zmod> M(n, R.zero());
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) M(i, j) = random_element(R, rng);
    return M;
}

}  // namespace

TEST_CASE("psi is trivial on q^2 but not on p^-1 q^2") {
    for (auto [p, k] : {std::pair{3u, 1u}, {3u, 2u}, {5u, 1u}, {7u, 2u}}) {
        DepthFrame f(p, k);
        CHECK(f.psi_exponent(f.ring.element(int_pow(p, 2 * k - 1))) != 0);
        CHECK(f.psi_exponent(f.ring.zero()) == 0);
        if (k > 0) CHECK_THROWS_AS(f.psi_exponent(f.ring.element(int_pow(p, k - 1))), NotInCongruenceSubgroup);
    }
}

TEST_CASE("chi_tau: trivial parameter, domain check") {
    DepthFrame f(3, 1);
    auto K = congruence_quotient(f, 2, kDefaultBudget);
    CHECK(K.size() == 81);
    auto zero = Matrix<Zmod>(2, f.level.zero());
    for (const auto& g : K) CHECK(chi_tau_exponent(f, zero, g) == 0);
    auto g = Matrix<Zmod>::identity(2, f.ring.one());
    g(0, 1) = f.ring.one();
    CHECK_THROWS_AS(chi_tau_exponent(f, zero, g), NotInCongruenceSubgroup);
}

TEST_CASE("chi_tau is multiplicative on K(q)/K(q^2) and every character arises (rank 2, p = 3)") {
    DepthFrame f(3, 1);
    auto K = congruence_quotient(f, 2, kDefaultBudget);
    std::set<std::vector<u64>> tables;
    u64 failures = 0;
    for (const auto& tau : all_matrices(f.level, 2)) {
        std::vector<u64> table;
        for (const auto& g : K) table.push_back(chi_tau_exponent(f, tau, g));
        for (std::size_t a = 0; a < K.size(); ++a)
            for (std::size_t b = 0; b < K.size(); ++b)
                if (chi_tau_exponent(f, tau, K[a] * K[b]) != (table[a] + table[b]) % f.q()) ++failures;
        tables.insert(table);
    }
    CHECK(failures == 0);
    // K(q)/K(q^2) = (Z/3)^4 has 81 characters.
    CHECK(tables.size() == 81);
}

TEST_CASE("chi_tau multiplicativity at k = 2 (seeded)") {
    DepthFrame f(3, 2);
    Rng rng(11);
    for (int t = 0; t < 200; ++t) {
        auto tau = random_matrix(f.level, 3, rng);
        auto g1 = congruence_element(f, random_matrix(f.level, 3, rng));
        auto g2 = congruence_element(f, random_matrix(f.level, 3, rng));
        CHECK(chi_tau_exponent(f, tau, g1 * g2) ==
              (chi_tau_exponent(f, tau, g1) + chi_tau_exponent(f, tau, g2)) % f.q());
    }
}

TEST_CASE("stable pairs of principal-series data") {
    LocalRing F3(3, 1);
    auto gl1 = [&](i64 x) { return InductionDatum::principal_series({F3.from_int(x)}); };
    CHECK(stable_pair_check(InductionDatum::principal_series({F3.from_int(0), F3.from_int(1)}), gl1(1)).stable == false);
    CHECK(stable_pair_check(InductionDatum::principal_series({F3.from_int(0), F3.from_int(2)}), gl1(1)).stable);
    // The GL_1 parameters xi = 0, eta = 1 differ by a unit:
    auto pi = InductionDatum::principal_series({F3.from_int(0), F3.from_int(0)});
    CHECK(stable_pair_check(pi, gl1(1)).stable);
    CHECK_THROWS_AS(stable_pair_check(gl1(0), gl1(1)), PreconditionFailed);
}

TEST_CASE("conductor identity: product of conductors is maximal iff all differences are units") {
    for (auto [p, k] : {std::pair{3u, 1u}, {3u, 2u}, {5u, 1u}}) {
        DepthFrame f(p, k);
        const u64 q = f.q();
        for (std::size_t n : {1u, 2u}) {
            // all (xi_1..xi_{n+1} | eta_1..eta_n) over o/q
            const u64 total = int_pow(q, 2 * n + 1);
            if (total > 200000) continue;
            for (u64 idx = 0; idx < total; ++idx) {
                std::vector<Zmod> xis, etas;
                u64 r = idx;
                for (std::size_t i = 0; i <= n; ++i, r /= q) xis.push_back(f.level.element(r % q));
                for (std::size_t j = 0; j < n; ++j, r /= q) etas.push_back(f.level.element(r % q));
                auto ci = conductor_identity(f, xis, etas);
                CHECK(ci.holds());
                auto chk = stable_pair_check(InductionDatum::principal_series(xis), InductionDatum::principal_series(etas));
                CHECK(chk.stable == ci.all_units);
            }
        }
    }
}

TEST_CASE("regular parameter for a stable pair") {
    LocalRing F3(3, 1);
    auto pi = InductionDatum::principal_series({F3.from_int(0), F3.from_int(1)});
    auto sigma = InductionDatum::principal_series({F3.from_int(2)});
    auto tau = regular_parameter_for_pair(pi, sigma);
    CHECK(charpoly(tau) == pi.polynomial());
    CHECK(charpoly(tau_sub_h(tau)) == sigma.polynomial());
    CHECK(is_cyclic(tau));
    CHECK(stability_determinants(tau).first.is_unit());
    CHECK(stability_determinants(tau).second.is_unit());
    CHECK_THROWS_AS(regular_parameter_for_pair(pi, InductionDatum::principal_series({F3.from_int(1)})), NotStablePair);

    // Every stable tau with the same charpoly pair is H-conjugate to it, with
    // trivial stabilizer: the class has exactly |H| elements (rank 3).
    auto pi3 = InductionDatum::principal_series({F3.from_int(0), F3.from_int(0), F3.from_int(1)});
    auto sigma3 = InductionDatum::principal_series({F3.from_int(2), F3.from_int(2)});
    auto tau3 = regular_parameter_for_pair(pi3, sigma3);
    std::set<u64> orbit;
    for (const auto& h : general_linear(F3, 2, kDefaultBudget)) {
        auto g = embed_h(h);
        orbit.insert(matrix_key(F3, g * tau3 * inverse(g)));
    }
    u64 same_pair = 0;
    for (const auto& t : stable_matrices(F3, 3))
        if (charpoly(t) == charpoly(tau3) && charpoly(tau_sub_h(t)) == charpoly(tau_sub_h(tau3))) {
            ++same_pair;
            CHECK(orbit.count(matrix_key(F3, t)) == 1);
        }
    CHECK(same_pair == 48);
    CHECK(orbit.size() == 48);
}

TEST_CASE("coefficient support: stable tau has trivial stabilizer in H(o/q) (rank 3, p = 3, exhaustive)") {
    LocalRing F3(3, 1);
    u64 checked = 0, bad = 0;
    for (const auto& tau : stable_matrices(F3, 3)) {
        auto s = coefficient_support_check(F3, tau, kDefaultBudget);
        ++checked;
        if (!s.holds() || s.h_count != 48) ++bad;
    }
    CHECK(checked > 0);
    CHECK(bad == 0);

    // e an eigenvector: tau_H commutes with a torus of H.
    auto tau = mat(F3, 3, {1, 0, 0, 0, 2, 0, 0, 0, 0});
    auto s = coefficient_support_check(F3, tau, kDefaultBudget);
    CHECK_FALSE(s.stable);
    CHECK(s.fixed > 1);

    // The verdict is invariant under conjugation by H.
    Rng rng(5);
    auto H = general_linear(F3, 2, kDefaultBudget);
    auto stable = stable_matrices(F3, 3);
    for (int t = 0; t < 50; ++t) {
        auto base = stable[uniform_below(rng, stable.size())];
        auto g = embed_h(H[uniform_below(rng, H.size())]);
        CHECK(coefficient_support_check(F3, g * base * inverse(g), kDefaultBudget).fixed ==
              coefficient_support_check(F3, base, kDefaultBudget).fixed);
        CHECK(coefficient_support_check(F3, g * tau * inverse(g), kDefaultBudget).fixed == s.fixed);
    }
}

TEST_CASE("coefficient support at Z/9 (seeded)") {
    LocalRing R(3, 2);
    Rng rng(3);
    int done = 0;
    while (done < 20) {
        auto tau = random_matrix(R, 3, rng);
        if (!is_stable(tau)) continue;
        CHECK(coefficient_support_check(R, tau, kDefaultBudget).fixed == 1);
        ++done;
    }
}

TEST_CASE("noncompact support witness for every stable tau and small a (rank 3, p = 3)") {
    DepthFrame f(3, 1);
    u64 witnesses = 0, failures = 0;
    auto stable = stable_matrices(f.level, 3);
    for (std::size_t t = 0; t < stable.size(); t += 7)
        for (int e1 = -2; e1 <= 2; ++e1)
            for (int e2 = -2; e2 <= 2; ++e2) {
                if (e1 == 0 && e2 == 0) continue;
                auto w = noncompact_support_witness(f, stable[t], {e1, e2});
                ++witnesses;
                if (!w.verified() || w.weight >= 0) ++failures;
            }
    CHECK(witnesses > 0);
    CHECK(failures == 0);
}

TEST_CASE("noncompact support witness: proof normalization, k = 2, and failure without stability") {
    DepthFrame f(3, 1);
    LocalRing F3(3, 1);
    auto pi = InductionDatum::principal_series({F3.from_int(0), F3.from_int(1), F3.from_int(2)});
    auto sigma = InductionDatum::principal_series({F3.from_int(0), F3.from_int(0)});
    CHECK_THROWS_AS(regular_parameter_for_pair(pi, sigma), NotStablePair);
    auto tau = construct_tau(charpoly(mat(F3, 3, {0, 0, 0, 0, 1, 0, 0, 0, 2})), MonicPoly<Zmod>({F3.one(), F3.zero(), F3.one()}));
    REQUIRE(is_stable(tau));
    // a = diag(p^-1, 1, 1): positive weight, extreme block {0}.
    auto w = noncompact_support_witness(f, tau, {-1, 0});
    CHECK(w.min_side);
    CHECK(w.block == std::vector<std::size_t>{0});
    CHECK(w.verified());
    CHECK(w.in_k_q2);
    // a^{-1} u a = 1 + t E_{row,col} with t = p^{2k-1}.
    auto expect = Matrix<Zmod>::identity(3, f.ring.one());
    expect(w.row, w.col) = f.ring.element(int_pow(3, w.t_valuation));
    CHECK(w.conjugated == expect);
    CHECK(w.chi_exponent == tau(w.col, w.row).value() * 1 % 3);
    CHECK_THROWS_AS(noncompact_support_witness(f, tau, {0, 0}), PreconditionFailed);

    // tau_+ = 0 mod p means an invariant line in V_H: no witness.
    auto bad = mat(F3, 3, {1, 1, 1, 0, 2, 1, 0, 1, 0});
    CHECK_FALSE(is_stable(bad));
    CHECK_THROWS_AS(noncompact_support_witness(f, bad, {1, 0}), WitnessSearchFailed);

    DepthFrame f2(3, 2);
    Rng rng(9);
    int done = 0;
    while (done < 30) {
        auto t = random_matrix(f2.level, 3, rng);
        if (!is_stable(t)) continue;
        const int e1 = static_cast<int>(uniform_below(rng, 7)) - 3;
        const int e2 = static_cast<int>(uniform_below(rng, 7)) - 3;
        if (e1 == 0 && e2 == 0) continue;
        auto w2 = noncompact_support_witness(f2, t, {e1, e2});
        CHECK(w2.verified());
        ++done;
    }
}

TEST_CASE("Mackey multiplicity one for rank 2 principal series, p = 3") {
    LocalRing F3(3, 1);
    for (i64 x1 = 0; x1 < 3; ++x1)
        for (i64 x2 = 0; x2 < 3; ++x2) {
            if (x1 == x2) continue;
            auto datum = InductionDatum::principal_series({F3.from_int(x1), F3.from_int(x2)});
            auto target = datum.polynomial();
            u64 hits = 0;
            for (const auto& P : all_monic(F3, 2)) {
                auto r = mackey_dimension(F3, datum, companion(P), kDefaultBudget);
                CHECK(r.cosets == 4);
                CHECK(r.dimension == (P == target ? 1u : 0u));
                hits += r.dimension;
            }
            CHECK(hits == 1);
            auto diag = mat(F3, 2, {x1, 0, 0, x2});
            CHECK(mackey_dimension(F3, datum, diag, kDefaultBudget).dimension == 1);
        }
}

TEST_CASE("Mackey count agrees with the induced-model eigenspace oracle (rank 2, p = 3)") {
    LocalRing F3(3, 1);
    u64 compared = 0, disagreements = 0;
    for (i64 x1 = 0; x1 < 3; ++x1)
        for (i64 x2 = 0; x2 < 3; ++x2) {
            std::vector<Zmod> xis{F3.from_int(x1), F3.from_int(x2)};
            auto datum = InductionDatum::principal_series(xis);
            for (const auto& tau : all_matrices(F3, 2)) {
                ++compared;
                if (mackey_dimension(F3, datum, tau, kDefaultBudget).dimension !=
                    induced_model_dimension(3, xis, tau, kDefaultBudget))
                    ++disagreements;
            }
        }
    CHECK(compared == 729);
    CHECK(disagreements == 0);
    // Equal parameters, scalar tau: every coset contributes.
    std::vector<Zmod> same{F3.from_int(1), F3.from_int(1)};
    auto scalar = mat(F3, 2, {1, 0, 0, 1});
    CHECK(induced_model_dimension(3, same, scalar, kDefaultBudget) == 4);
}

TEST_CASE("Mackey count: rank 3 principal series and a (2,1) datum") {
    LocalRing F3(3, 1);
    auto datum = InductionDatum::principal_series({F3.from_int(0), F3.from_int(1), F3.from_int(2)});
    u64 hits = 0;
    for (const auto& P : all_monic(F3, 3)) {
        auto r = mackey_dimension(F3, datum, companion(P), kDefaultBudget);
        CHECK(r.cosets == 13 * 4);
        if (r.dimension) CHECK(P == datum.polynomial());
        hits += r.dimension;
    }
    CHECK(hits == 1);

    InductionDatum block;
    block.blocks = {companion(MonicPoly<Zmod>({F3.one(), F3.zero(), F3.one()})), Matrix<Zmod>(1, F3.from_int(1))};
    auto tau = construct_flag_cyclic(std::vector{charpoly(block.blocks[0]), charpoly(block.blocks[1])});
    auto r = mackey_dimension(F3, block, tau, kDefaultBudget);
    CHECK(r.cosets == 13);
    CHECK(r.dimension == 1);
    CHECK(mackey_dimension(F3, block, companion(MonicPoly<Zmod>({F3.one(), F3.one(), F3.one(), F3.one()})), kDefaultBudget).dimension == 0);
}

TEST_CASE("group orders and the J_tau volume ratio") {
    LocalRing F3(3, 1), R9(3, 2);
    CHECK(gl_order(3, 1, 2) == 48);
    CHECK(gl_order(3, 1, 2) == BigInt(general_linear(F3, 2, kDefaultBudget).size()));
    CHECK(gl_order(3, 2, 2) == BigInt(general_linear(R9, 2, kDefaultBudget).size()));
    CHECK(gl_order(3, 1, 3) == 11232);

    auto split = construct_tau(charpoly(mat(F3, 3, {0, 0, 0, 0, 1, 0, 0, 0, 2})), MonicPoly<Zmod>({F3.one(), F3.zero(), F3.one()}));
    auto v = j_tau_volume_ratio(F3, split, kDefaultBudget);
    CHECK(v.g_tau_order == 8);
    CHECK(v.in_window());
    CHECK(v.h_fixed == 1);
    CHECK(v.lower == Rational(8, 27));

    for (auto* R : {&F3, &R9})
        for (const auto& cls : stable_tau_classes(*R, 3)) {
            auto r = j_tau_volume_ratio(*R, cls.tau, kDefaultBudget);
            CHECK(r.in_window());
            CHECK(r.h_fixed == 1);
        }
    CHECK_THROWS_AS(j_tau_volume_ratio(F3, mat(F3, 2, {1, 0, 0, 1}), kDefaultBudget), NotCyclic);
}

TEST_CASE("extension of chi_tau to J_tau") {
    DepthFrame f(3, 1);
    LocalRing& F3 = f.level;

    SUBCASE("rank 1, tau = 0: trivial") {
        ChiExtension ext(f, Matrix<Zmod>(1, F3.zero()), kDefaultBudget);
        for (const auto& j : ext.j_elements(kDefaultBudget)) CHECK(ext.value(j) == 0);
    }
    SUBCASE("rank 2, split, non-split and nilpotent-regular tau: exhaustive") {
        for (auto tau : {mat(F3, 2, {0, 0, 0, 1}), mat(F3, 2, {0, 2, 1, 0}), mat(F3, 2, {1, 1, 0, 1})}) {
            ChiExtension ext(f, tau, kDefaultBudget);
            CHECK(ext.normal_kernel);
            CHECK(ext.abelian_quotient);
            auto chk = check_extension(ext, kDefaultBudget, 0, 0);
            CHECK(chk.pairs == chk.elements * chk.elements);
            CHECK(chk.ok());
        }
        ChiExtension split(f, mat(F3, 2, {0, 0, 0, 1}), kDefaultBudget);
        CHECK(split.j_order() == 4 * 81);
    }
    SUBCASE("rank 3, stable tau: sampled") {
        auto tau = construct_tau(charpoly(mat(F3, 3, {0, 0, 0, 0, 1, 0, 0, 0, 2})), MonicPoly<Zmod>({F3.one(), F3.zero(), F3.one()}));
        ChiExtension ext(f, tau, kDefaultBudget);
        CHECK(ext.normal_kernel);
        CHECK(ext.abelian_quotient);
        auto chk = check_extension(ext, 10000000, 4000, 1);
        CHECK(chk.pairs == 4000);
        CHECK(chk.ok());
    }
    SUBCASE("commutators with powers of the lifted tau lie in ker chi_tau") {
        auto tau = mat(F3, 2, {0, 2, 1, 0});
        ChiExtension ext(f, tau, kDefaultBudget);
        auto lift = f.lift(tau) + Matrix<Zmod>::identity(2, f.ring.one());
        for (const auto& b : congruence_quotient(f, 2, kDefaultBudget)) {
            auto a = lift;
            for (int e = 1; e < 6; ++e, a = a * lift) {
                if (!is_invertible(a)) continue;
                CHECK(chi_tau_exponent(f, tau, a * b * inverse(b * a)) == 0);
            }
        }
        CHECK_FALSE(ext.in_j(Matrix<Zmod>::identity(2, f.ring.one()) + f.lift(mat(F3, 2, {0, 1, 0, 0}))));
        CHECK_THROWS_AS(ChiExtension(f, mat(F3, 2, {1, 0, 0, 1}), kDefaultBudget), PreconditionFailed);
    }
}
