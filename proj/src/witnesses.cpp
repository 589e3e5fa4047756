#include "ggp/witnesses.hpp"

namespace ggp {

RankTwoCheck check_rank_two_antidiagonal(const LocalRing& ring) {
    const Zmod z = ring.zero(), o = ring.one();
    auto tau = Matrix<Zmod>::from_rows(2, {z, o, o, z});
    const auto& a = tau;
    XScheme<Zmod> X(tau, a);
    RankTwoCheck r;
    r.a_outside_hz = !in_hz(a);
    r.closed_form_matches = true;
    r.doubly_tangential_everywhere = true;
    auto units = h_centralizer_units(ring, tau, ring.size() + 1);
    r.centralizer_size = units.size();
    for (const auto& y : units) {
        if (!X.contains(y)) continue;
        ++r.x_points;
        const Zmod y1 = y(0, 0);
        auto [h, b] = X.tau_data().decompose(a * y);
        auto h_expect = Matrix<Zmod>::from_rows(2, {y1.inverse(), z, z, o});
        auto b_expect = Matrix<Zmod>::from_rows(2, {z, y1, y1, z});
        if (h != h_expect || b != b_expect) r.closed_form_matches = false;
        if (!X.tangency(y, true).doubly_tangential) r.doubly_tangential_everywhere = false;
    }
    return r;
}

Gl6Witness gl6_witness(std::uint32_t p, i64 alpha) {
    LocalRing R(p, 1);
    Gl6Witness w;
    w.p = p;
    w.alpha = alpha;
    const Zmod al = R.from_int(alpha);
    if (al * al != R.from_int(2)) throw PreconditionFailed("alpha is not a square root of 2");
    const std::size_t d = 6;
    const Zmod zero = R.zero(), one = R.one();

    // Original coordinates.
    Vec<Zmod> diag_tau{R.from_int(0), R.from_int(1), R.from_int(2), al * R.from_int(2), R.from_int(1) + al * R.from_int(2),
                       R.from_int(2) + al * R.from_int(2)};
    auto tau0 = Matrix<Zmod>::diagonal(diag_tau);
    auto a0 = Matrix<Zmod>::diagonal({one, one, one, -one, -one, -one});
    const Zmod sixth = R.from_int(6).inverse();
    Vec<Zmod> e(d, sixth), estar(d, one);

    // S^{-1} has columns eps_i - eps_6 (i < 6), which span ker e*, and then e.
    Matrix<Zmod> Sinv(d, zero);
    for (std::size_t i = 0; i + 1 < d; ++i) {
        Sinv(i, i) = one;
        Sinv(d - 1, i) = -one;
    }
    for (std::size_t i = 0; i < d; ++i) Sinv(i, d - 1) = e[i];
    auto S = inverse(Sinv);
    w.frame = S;
    w.tau = S * tau0 * Sinv;
    w.a = S * a0 * Sinv;
    // Sanity: the frame vectors land on the standard ones.
    auto e_std = S * e;
    auto estar_std = row_times(estar, Sinv);
    if (e_std != frame_e(d, zero) || estar_std != frame_e(d, zero)) throw PreconditionFailed("frame change failed");

    StableTau<Zmod> st(w.tau);
    auto [A, B] = ab_invariants(st, w.a);
    w.A0 = A[0];
    w.B0 = B[0];
    w.A1 = A[1];
    w.a0_b0_zero = A[0].is_zero() && B[0].is_zero();
    w.a1_is_minus_alpha = A[1] == -al;
    w.a_outside_hz = !in_hz(w.a);

    auto dirs = h_direction_basis(w.tau);
    auto mu1 = mu_nu(st, w.a, dirs[0]).first;
    w.mu_one_h_is_one = st.is_one(mu1);
    auto mut = st.to_matrix(mu_nu(st, w.a, dirs[1]).first);
    auto mut_orig = Sinv * mut * S;
    Vec<Zmod> expect_diag;
    for (int k = 0; k < 2; ++k)
        for (int j = 0; j < 3; ++j) expect_diag.push_back(al + R.from_int(j));
    w.mu_tau_h_diagonal = mut_orig == Matrix<Zmod>::diagonal(expect_diag);
    auto PH = charpoly(tau_sub_h(w.tau));
    w.p_tau_h_annihilates = eval_poly(PH, mut) == Matrix<Zmod>::zero(d, zero);

    XScheme<Zmod> X(w.tau, w.a);
    w.center_in_x = true;
    for (u64 l = 1; l < p; ++l) {
        auto y = Matrix<Zmod>::scalar(d, R.element(l));
        y(d - 1, d - 1) = one;
        if (!X.contains(y)) w.center_in_x = false;
    }
    // Walk y = 1 + c tau_H + ... in a fixed order until one falls outside X.
    auto th = tau_sub_h(w.tau);
    auto basis = centralizer_basis(th);
    for (u64 idx = 1; idx < 100000 && !w.x_proper; ++idx) {
        Vec<Zmod> c;
        u64 r = idx;
        for (std::size_t j = 0; j < basis.size(); ++j) {
            c.push_back(R.element(r % p));
            r /= p;
        }
        auto yh = from_coefficients(basis, c);
        if (!is_invertible(yh)) continue;
        auto y = embed_h(yh);
        if (!X.contains(y)) {
            w.x_proper = true;
            w.missing_point = y;
        }
    }
    return w;
}

}  // namespace ggp
