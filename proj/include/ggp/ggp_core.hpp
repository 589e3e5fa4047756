#pragma once

// The GL_n x GL_{n+1} frame: V = V_H + span(e), with e the last basis vector
// and e* the last coordinate functional.  H = GL(V_H) sits in G as block(A, 1).

#include <optional>

#include "ggp/matrix.hpp"

namespace ggp {

template <Scalar T>
Vec<T> frame_e(std::size_t dim, const T& sample) {
    Vec<T> v(dim, sample.zero());
    v.back() = sample.one();
    return v;
}

// 1_H = diag(1, ..., 1, 0)
template <Scalar T>
Matrix<T> one_h(std::size_t dim, const T& sample) {
    Matrix<T> m = Matrix<T>::identity(dim, sample);
    m(dim - 1, dim - 1) = sample.zero();
    return m;
}

// tau_H = 1_H tau 1_H restricted to V_H (the upper-left block).
template <Scalar T>
Matrix<T> tau_sub_h(const Matrix<T>& tau) {
    const std::size_t n = tau.dim() - 1;
    if (n == 0) throw PreconditionFailed("rank must be at least 2");
    Matrix<T> r(n, tau.sample().zero());
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) r(i, j) = tau(i, j);
    return r;
}

// block(A, 1): the image of A in H.
template <Scalar T>
Matrix<T> embed_h(const Matrix<T>& A) {
    const std::size_t n = A.dim();
    Matrix<T> r(n + 1, A.sample().zero());
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) r(i, j) = A(i, j);
    r(n, n) = A.sample().one();
    return r;
}

// block(A, 0): a direction in M_H.
template <Scalar T>
Matrix<T> embed_h_direction(const Matrix<T>& A) {
    Matrix<T> r = embed_h(A);
    r(A.dim(), A.dim()) = A.sample().zero();
    return r;
}

template <Scalar T>
bool in_h(const Matrix<T>& g) {
    const std::size_t n = g.dim() - 1;
    for (std::size_t i = 0; i < n; ++i)
        if (!g(n, i).is_zero() || !g(i, n).is_zero()) return false;
    return g(n, n) == g(n, n).one();
}

// g in H Z: block diagonal with the H-block invertible.
template <Scalar T>
bool in_hz(const Matrix<T>& g) {
    const std::size_t n = g.dim() - 1;
    for (std::size_t i = 0; i < n; ++i)
        if (!g(n, i).is_zero() || !g(i, n).is_zero()) return false;
    return g(n, n).is_unit() && is_invertible(g);
}

// Columns v, tau v, ..., tau^{d-1} v.
template <Scalar T>
Matrix<T> krylov_columns(const Matrix<T>& tau, Vec<T> v) {
    const std::size_t d = tau.dim();
    Matrix<T> K(d, tau.sample().zero());
    for (std::size_t j = 0; j < d; ++j) {
        for (std::size_t i = 0; i < d; ++i) K(i, j) = v[i];
        v = tau * v;
    }
    return K;
}

// Rows r, r tau, ..., r tau^{d-1}.
template <Scalar T>
Matrix<T> krylov_rows(const Matrix<T>& tau, Vec<T> r) {
    const std::size_t d = tau.dim();
    Matrix<T> K(d, tau.sample().zero());
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) K(i, j) = r[j];
        r = row_times(r, tau);
    }
    return K;
}

// Delta(tau) = det(e*, e* tau, ..., e* tau^n) * det(e, tau e, ..., tau^n e).
template <Scalar T>
T stability_delta(const Matrix<T>& tau) {
    check_dim(tau.dim());
    auto e = frame_e(tau.dim(), tau.sample());
    return determinant(krylov_rows(tau, e)) * determinant(krylov_columns(tau, e));
}

template <Scalar T>
std::pair<T, T> stability_determinants(const Matrix<T>& tau) {
    auto e = frame_e(tau.dim(), tau.sample());
    return {determinant(krylov_rows(tau, e)), determinant(krylov_columns(tau, e))};
}

template <Scalar T>
bool is_stable(const Matrix<T>& tau) { return stability_delta(tau).is_unit(); }

// Companion matrix with ones on the subdiagonal: tau e_i = e_{i+1}.
template <Scalar T>
Matrix<T> companion(const MonicPoly<T>& P) {
    const std::size_t d = P.degree();
    check_dim(d);
    Matrix<T> C(d, P[0].zero());
    for (std::size_t i = 1; i < d; ++i) C(i, i - 1) = P[0].one();
    for (std::size_t i = 0; i < d; ++i) C(i, d - 1) = -P[i];
    return C;
}

// Stable tau with prescribed charpolys (P of degree n+1, P_H of degree n) in
// the shape
//     [ a1 1 0 ... ]
//     [ a2 0 1 ... ]
//     [ ...        ]
//     [ b_n ... b1 b0 ]
// where the upper-left block is a companion-like matrix for P_H and the last
// row is solved for: P_tau is affine in the b's and triangular with unit
// pivots, so back-substitution from the top degree down recovers them.
template <Scalar T>
Matrix<T> construct_tau(const MonicPoly<T>& P, const MonicPoly<T>& P_H) {
    const std::size_t n = P_H.degree();
    if (P.degree() != n + 1) throw PreconditionFailed("deg P must equal deg P_H + 1");
    if (n == 0) throw PreconditionFailed("rank must be at least 2");
    check_dim(n + 1);
    if (!monic_coprime(P, P_H)) throw NotStable("P and P_H are not coprime");
    const T zero = P[0].zero();
    Matrix<T> tau(n + 1, zero);
    for (std::size_t i = 0; i < n; ++i) {
        tau(i, 0) = -P_H[n - 1 - i];
        tau(i, i + 1) = zero.one();  // for i = n-1 this links V_H to e
    }
    // b_k sits at (n, n-k); b_0 is the corner.
    auto set_b = [&](Matrix<T>& t, std::size_t k, const T& v) { t(n, n - k) = v; };
    const auto base = charpoly(tau);
    std::vector<Vec<T>> deltas;  // D_k = P_tau(e_k) - P_tau(0)
    for (std::size_t k = 0; k <= n; ++k) {
        Matrix<T> t = tau;
        set_b(t, k, zero.one());
        auto Pk = charpoly(t);
        Vec<T> d;
        for (std::size_t i = 0; i <= n + 1; ++i) d.push_back(Pk[i] - base[i]);
        deltas.push_back(std::move(d));
    }
    Vec<T> b(n + 1, zero);
    for (std::size_t k = 0; k <= n; ++k) {
        const std::size_t deg = n - k;
        const T& pivot = deltas[k][deg];
        if (!pivot.is_unit()) throw PreconditionFailed("construct_tau: non-unit pivot");
        T rhs = P[deg] - base[deg];
        for (std::size_t l = 0; l < k; ++l) rhs -= b[l] * deltas[l][deg];
        b[k] = rhs * pivot.inverse();
    }
    for (std::size_t k = 0; k <= n; ++k) set_b(tau, k, b[k]);
    if (charpoly(tau) != P || charpoly(tau_sub_h(tau)) != P_H)
        throw PreconditionFailed("construct_tau: charpoly mismatch");
    if (!is_stable(tau)) throw NotStable("constructed tau is not stable");
    return tau;
}

// Cyclic iff 1, tau, ..., tau^{d-1} stay independent mod p.
template <Scalar T>
bool is_cyclic(const Matrix<T>& tau) {
    std::vector<Vec<T>> flat;
    Matrix<T> P = Matrix<T>::identity(tau.dim(), tau.sample());
    for (std::size_t j = 0; j < tau.dim(); ++j) {
        flat.push_back(P.entries());
        P = P * tau;
    }
    return residue_rank(flat) == tau.dim();
}

// 1, tau, ..., tau^{d-1}: a basis of M_tau for cyclic tau.
template <Scalar T>
std::vector<Matrix<T>> centralizer_basis(const Matrix<T>& tau) {
    if (!is_cyclic(tau)) throw NotCyclic("tau is not cyclic");
    std::vector<Matrix<T>> basis;
    Matrix<T> P = Matrix<T>::identity(tau.dim(), tau.sample());
    for (std::size_t j = 0; j < tau.dim(); ++j) {
        basis.push_back(P);
        P = P * tau;
    }
    return basis;
}

template <Scalar T>
Matrix<T> from_coefficients(const std::vector<Matrix<T>>& basis, const Vec<T>& c) {
    Matrix<T> r = basis.front() * c.front().zero();
    for (std::size_t j = 0; j < basis.size(); ++j) r = r + basis[j] * c[j];
    return r;
}

// Block upper-triangular cyclic tau whose diagonal blocks are companions of
// the given polynomials.  Block j+1's last basis vector also maps onto block
// j's first basis vector, which is a cyclic vector of everything before it,
// so the first vector of the last block is cyclic for the whole.
template <Scalar T>
Matrix<T> construct_flag_cyclic(const std::vector<MonicPoly<T>>& blocks) {
    if (blocks.empty()) throw PreconditionFailed("no blocks");
    std::size_t d = 0;
    for (const auto& b : blocks) d += b.degree();
    check_dim(d);
    const T zero = blocks.front()[0].zero();
    Matrix<T> tau(d, zero);
    std::size_t off = 0, prev_first = 0;
    for (std::size_t k = 0; k < blocks.size(); ++k) {
        auto C = companion(blocks[k]);
        for (std::size_t i = 0; i < C.dim(); ++i)
            for (std::size_t j = 0; j < C.dim(); ++j) tau(off + i, off + j) = C(i, j);
        if (k > 0) tau(prev_first, off + C.dim() - 1) += zero.one();
        prev_first = off;
        off += C.dim();
    }
    return tau;
}

// Units of R[tau] for cyclic tau (powers 0..d-1), enumerated by coefficient
// vectors.  The result has q^d candidates, checked against the budget.
template <FiniteRing R>
std::vector<Matrix<typename R::Elem>> centralizer_units(const R& ring, const Matrix<typename R::Elem>& tau, u64 budget) {
    auto basis = centralizer_basis(tau);
    const std::size_t d = tau.dim();
    const u64 q = ring.size();
    u64 total = 1;
    for (std::size_t i = 0; i < d; ++i) {
        if (total > budget / q) throw BudgetExceeded("centralizer enumeration exceeds budget");
        total *= q;
    }
    std::vector<Matrix<typename R::Elem>> out;
    Vec<typename R::Elem> c(d, ring.zero());
    for (u64 idx = 0; idx < total; ++idx) {
        u64 r = idx;
        for (std::size_t j = 0; j < d; ++j) {
            c[j] = ring.element(r % q);
            r /= q;
        }
        auto x = from_coefficients(basis, c);
        if (is_invertible(x)) out.push_back(std::move(x));
    }
    return out;
}

// H_{tau_H}: units of R[tau_H], embedded in H.
template <FiniteRing R>
std::vector<Matrix<typename R::Elem>> h_centralizer_units(const R& ring, const Matrix<typename R::Elem>& tau, u64 budget) {
    auto units = centralizer_units(ring, tau_sub_h(tau), budget);
    std::vector<Matrix<typename R::Elem>> out;
    out.reserve(units.size());
    for (const auto& u : units) out.push_back(embed_h(u));
    return out;
}

// Power basis 1_H, tau_H, ..., tau_H^{n-1} of M_{H,tau_H}, as directions in M.
template <Scalar T>
std::vector<Matrix<T>> h_direction_basis(const Matrix<T>& tau) {
    auto th = tau_sub_h(tau);
    std::vector<Matrix<T>> out;
    Matrix<T> P = Matrix<T>::identity(th.dim(), th.sample());
    for (std::size_t j = 0; j < th.dim(); ++j) {
        out.push_back(embed_h_direction(P));
        P = P * th;
    }
    return out;
}

// Precomputed data for a stable tau: arithmetic in M_tau = R[X]/(P_tau) and
// the inverses of the Krylov maps [. e] and [e* .].
template <Scalar T>
class StableTau {
public:
    using Coeffs = Vec<T>;

    explicit StableTau(Matrix<T> tau) : tau_(std::move(tau)) {
        d_ = tau_.dim();
        check_dim(d_);
        if (d_ < 2) throw PreconditionFailed("rank must be at least 2");
        if (!is_stable(tau_)) throw NotStable("tau is not stable");
        P_ = charpoly(tau_);
        auto e = frame_e(d_, tau_.sample());
        col_inv_ = inverse(krylov_columns(tau_, e));
        row_inv_ = inverse(krylov_rows(tau_, e));
        Matrix<T> P = Matrix<T>::identity(d_, tau_.sample());
        for (std::size_t j = 0; j < d_; ++j) {
            powers_.push_back(P);
            P = P * tau_;
        }
    }

    const Matrix<T>& tau() const { return tau_; }
    std::size_t dim() const { return d_; }
    const MonicPoly<T>& charpoly_tau() const { return P_; }
    const std::vector<Matrix<T>>& powers() const { return powers_; }

    // [. e]^{-1}(v): coefficients c with (sum c_j tau^j) e = v.
    Coeffs from_column(const Vec<T>& v) const { return col_inv_ * v; }
    // [e* .]^{-1}(r): coefficients c with e* (sum c_j tau^j) = r.
    Coeffs from_row(const Vec<T>& r) const { return row_times(r, row_inv_); }

    Coeffs mul(const Coeffs& a, const Coeffs& b) const {
        const T zero = tau_.sample().zero();
        Coeffs r(2 * d_ - 1, zero);
        for (std::size_t i = 0; i < d_; ++i)
            for (std::size_t j = 0; j < d_; ++j) r[i + j] += a[i] * b[j];
        for (std::size_t k = 2 * d_ - 2; k >= d_; --k) {
            const T c = r[k];
            if (c.is_zero()) continue;
            for (std::size_t i = 0; i < d_; ++i) r[k - d_ + i] -= c * P_[i];
        }
        r.resize(d_);
        return r;
    }
    Coeffs one() const {
        Coeffs r(d_, tau_.sample().zero());
        r[0] = tau_.sample().one();
        return r;
    }
    bool is_one(const Coeffs& c) const { return c == one(); }
    Matrix<T> to_matrix(const Coeffs& c) const { return from_coefficients(powers_, c); }
    // Coefficients of an element known to lie in M_tau.
    Coeffs coefficients_of(const Matrix<T>& x) const { return from_column(x * frame_e(d_, tau_.sample())); }
    bool in_centralizer(const Matrix<T>& x) const { return commutes(x, tau_); }

    // f(g) = [e* .]^{-1}(e* g) [. e]^{-1}(g^{-1} e); g in H G_tau iff f(g) = 1.
    Coeffs membership_form(const Matrix<T>& g) const {
        auto ginv = inverse(g);
        return mul(from_row(g.row(d_ - 1)), from_column(ginv.col(d_ - 1)));
    }
    bool in_h_gtau(const Matrix<T>& g) const { return is_one(membership_form(g)); }

    // Division-free variant: [e* .]^{-1}(e* g) [. e]^{-1}(adj(g) e), which
    // equals det(g) exactly when g lies in H G_tau.
    Coeffs membership_form_cramer(const Matrix<T>& g) const {
        auto adj = adjugate(g);
        return mul(from_row(g.row(d_ - 1)), from_column(adj.col(d_ - 1)));
    }

    // g = h b with h in H and b in G_tau; throws NotInProduct otherwise.
    std::pair<Matrix<T>, Matrix<T>> decompose(const Matrix<T>& g) const {
        if (!in_h_gtau(g)) throw NotInProduct("element is not in H G_tau");
        Matrix<T> b = to_matrix(from_row(g.row(d_ - 1)));
        Matrix<T> h = g * inverse(b);
        if (!in_h(h) || h * b != g) throw NotInProduct("decomposition check failed");
        return {h, b};
    }

private:
    Matrix<T> tau_;
    std::size_t d_ = 0;
    MonicPoly<T> P_;
    Matrix<T> col_inv_, row_inv_;
    std::vector<Matrix<T>> powers_;
};

// All (P, P_H) pairs of monic polynomials of degrees (d, d-1) that are coprime.
template <FiniteRing R>
std::vector<std::pair<MonicPoly<typename R::Elem>, MonicPoly<typename R::Elem>>>
coprime_pairs(const R& ring, std::size_t d) {
    auto Ps = all_monic(ring, d);
    auto PHs = all_monic(ring, d - 1);
    std::vector<std::pair<MonicPoly<typename R::Elem>, MonicPoly<typename R::Elem>>> out;
    for (const auto& P : Ps)
        for (const auto& PH : PHs)
            if (monic_coprime(P, PH)) out.emplace_back(P, PH);
    return out;
}

}  // namespace ggp
