#pragma once

// The scheme X_{tau,a} = { y in H_{tau_H} : a y in H G_tau } and its first-
// and second-order tangency, tested by evaluating the membership form over
// R[e]/(e^2) and R[e1,e2]/(e1^2,e2^2).

#include <memory>
#include <optional>

#include "ggp/ggp_core.hpp"

namespace ggp {

template <Scalar T>
Matrix<Dual<T>> lift_dual(const Matrix<T>& m) {
    return m.map([](const T& x) { return dual_lift(x); });
}

template <Scalar T>
Matrix<BiDual<T>> lift_bidual(const Matrix<T>& m) {
    return m.map([](const T& x) { return bidual_lift(x); });
}

// 1 + e u over R[e].
template <Scalar T>
Matrix<Dual<T>> one_plus_eps(const Matrix<T>& u) {
    const std::size_t d = u.dim();
    Matrix<Dual<T>> r(d, dual_lift(u.sample().zero()));
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) r(i, j) = {i == j ? u.sample().one() : u.sample().zero(), u(i, j)};
    return r;
}

// (1 + e1 u)(1 + e2 v) over R[e1,e2].
template <Scalar T>
Matrix<BiDual<T>> one_plus_eps_pair(const Matrix<T>& u, const Matrix<T>& v) {
    const std::size_t d = u.dim();
    const T z = u.sample().zero();
    Matrix<BiDual<T>> a(d, bidual_lift(z)), b(d, bidual_lift(z));
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            T id = i == j ? z.one() : z;
            a(i, j) = {id, u(i, j), z, z};
            b(i, j) = {id, z, v(i, j), z};
        }
    return a * b;
}

struct TangencyReport {
    bool tangential = false;
    bool doubly_tangential = false;
    // First basis direction 0 <= k < n along which tangency fails.
    std::optional<std::size_t> failing_direction;
    // First ordered basis pair along which second-order tangency fails.
    std::optional<std::pair<std::size_t, std::size_t>> failing_pair;
};

// Per-tau data shared by every X_{tau,a}: the membership machinery over R,
// R[e] and R[e1,e2], and the power basis of M_{H,tau_H}.
template <Scalar T>
class TauEngine {
public:
    explicit TauEngine(const Matrix<T>& tau)
        : base_(tau), dual_(lift_dual(tau)), bidual_(lift_bidual(tau)), directions_(h_direction_basis(tau)) {}

    const StableTau<T>& base() const { return base_; }
    const StableTau<Dual<T>>& dual() const { return dual_; }
    const StableTau<BiDual<T>>& bidual() const { return bidual_; }
    const std::vector<Matrix<T>>& directions() const { return directions_; }

private:
    StableTau<T> base_;
    StableTau<Dual<T>> dual_;
    StableTau<BiDual<T>> bidual_;
    std::vector<Matrix<T>> directions_;
};

// Points and tangency of X_{tau,a} for fixed (tau, a).
template <Scalar T>
class XScheme {
public:
    XScheme(const Matrix<T>& tau, const Matrix<T>& a)
        : owned_(std::make_shared<TauEngine<T>>(tau)), eng_(owned_.get()) { set_a(a); }
    // Borrow a prebuilt engine (must outlive this object).
    XScheme(const TauEngine<T>& engine, const Matrix<T>& a) : eng_(&engine) { set_a(a); }

    const StableTau<T>& tau_data() const { return eng_->base(); }
    const Matrix<T>& a() const { return a_; }
    const std::vector<Matrix<T>>& directions() const { return eng_->directions(); }

    bool contains(const Matrix<T>& y) const { return eng_->base().in_h_gtau(a_ * y); }

    bool tangential_along(const Matrix<T>& y, const Matrix<T>& u) const {
        return eng_->dual().in_h_gtau(a_dual_ * lift_dual(y) * one_plus_eps(u));
    }
    bool doubly_tangential_along(const Matrix<T>& y, const Matrix<T>& u, const Matrix<T>& v) const {
        return eng_->bidual().in_h_gtau(a_bidual_ * lift_bidual(y) * one_plus_eps_pair(u, v));
    }

    // y must be a point of X(R); throws PreconditionFailed otherwise.
    TangencyReport tangency(const Matrix<T>& y, bool second_order = true) const {
        if (!contains(y)) throw PreconditionFailed("y is not a point of X_{tau,a}");
        const auto& dirs = directions();
        TangencyReport rep;
        rep.tangential = true;
        for (std::size_t k = 0; k < dirs.size(); ++k)
            if (!tangential_along(y, dirs[k])) {
                rep.tangential = false;
                rep.failing_direction = k;
                break;
            }
        if (!rep.tangential || !second_order) return rep;
        rep.doubly_tangential = true;
        for (std::size_t i = 0; i < dirs.size() && rep.doubly_tangential; ++i)
            for (std::size_t j = 0; j < dirs.size(); ++j)
                if (!doubly_tangential_along(y, dirs[i], dirs[j])) {
                    rep.doubly_tangential = false;
                    rep.failing_pair = {i, j};
                    break;
                }
        return rep;
    }

    // Re-check that a reported witness really does fail.
    bool replay(const Matrix<T>& y, const TangencyReport& rep) const {
        const auto& dirs = directions();
        if (rep.failing_direction) return !tangential_along(y, dirs[*rep.failing_direction]);
        if (rep.failing_pair)
            return !doubly_tangential_along(y, dirs[rep.failing_pair->first], dirs[rep.failing_pair->second]);
        return rep.tangential && rep.doubly_tangential;
    }

private:
    void set_a(const Matrix<T>& a) {
        if (a.dim() != eng_->base().dim()) throw PreconditionFailed("dimension mismatch between tau and a");
        if (!is_invertible(a)) throw SingularOverRing("a is not invertible");
        a_ = a;
        a_dual_ = lift_dual(a);
        a_bidual_ = lift_bidual(a);
    }

    std::shared_ptr<TauEngine<T>> owned_;
    const TauEngine<T>* eng_;
    Matrix<T> a_;
    Matrix<Dual<T>> a_dual_;
    Matrix<BiDual<T>> a_bidual_;
};

template <FiniteRing R>
std::vector<Matrix<typename R::Elem>> enumerate_x_points(const R& ring, const XScheme<typename R::Elem>& X, u64 budget) {
    std::vector<Matrix<typename R::Elem>> out;
    for (auto& y : h_centralizer_units(ring, X.tau_data().tau(), budget))
        if (X.contains(y)) out.push_back(std::move(y));
    return out;
}

// mu(u) = [e* .]^{-1}(e* a u a^{-1}) and nu(u) = [. e]^{-1}(a u a^{-1} e), for a in G_tau.
template <Scalar T>
std::pair<Vec<T>, Vec<T>> mu_nu(const StableTau<T>& st, const Matrix<T>& a, const Matrix<T>& u) {
    if (!st.in_centralizer(a)) throw PreconditionFailed("a does not commute with tau");
    auto c = a * u * inverse(a);
    return {st.from_row(c.row(st.dim() - 1)), st.from_column(c.col(st.dim() - 1))};
}

// A_j = e* a tau^j e and B_j = e* a^{-1} tau^j e for 0 <= j < rank.
template <Scalar T>
std::pair<Vec<T>, Vec<T>> ab_invariants(const StableTau<T>& st, const Matrix<T>& a) {
    const std::size_t d = st.dim();
    auto ainv = inverse(a);
    Vec<T> A, B;
    for (const auto& P : st.powers()) {
        A.push_back((a * P)(d - 1, d - 1));
        B.push_back((ainv * P)(d - 1, d - 1));
    }
    return {A, B};
}

// 2 (mu(u1 u2) - mu(u1) mu(u2)) in M_tau.
template <Scalar T>
Vec<T> homomorphism_defect(const StableTau<T>& st, const Matrix<T>& a, const Matrix<T>& u1, const Matrix<T>& u2) {
    auto m12 = mu_nu(st, a, u1 * u2).first;
    auto prod = st.mul(mu_nu(st, a, u1).first, mu_nu(st, a, u2).first);
    const T two = a.sample().from_int(2);
    Vec<T> r;
    for (std::size_t i = 0; i < m12.size(); ++i) r.push_back(two * (m12[i] - prod[i]));
    return r;
}

// The four conditions characterizing tangency at 1 for a in G_tau.
struct TangencyAtOne {
    bool tangential = false;
    bool mu_equals_nu = false;
    bool ab_relation = false;  // A_j a^{-1} = B_j a for all j
    bool square_central = false;
};

template <Scalar T>
TangencyAtOne tangency_at_one_conditions(const XScheme<T>& X) {
    const auto& st = X.tau_data();
    const auto& a = X.a();
    const std::size_t d = st.dim();
    TangencyAtOne r;
    auto I = Matrix<T>::identity(d, a.sample());
    r.tangential = X.tangency(I, false).tangential;
    r.mu_equals_nu = true;
    for (const auto& u : X.directions()) {
        auto [mu, nu] = mu_nu(st, a, u);
        if (mu != nu) r.mu_equals_nu = false;
    }
    auto [A, B] = ab_invariants(st, a);
    auto ainv = inverse(a);
    r.ab_relation = true;
    for (std::size_t j = 0; j < d; ++j)
        if (ainv * A[j] != a * B[j]) r.ab_relation = false;
    r.square_central = is_scalar_matrix(a * a);
    return r;
}

// ---------------------------------------------------------------------------
// Representatives of H \ G / Z.  The coset H g is determined by the pair
// (r, c) = (e* g, g^{-1} e), which satisfies r c = 1; Z rescales it to
// (lambda r, lambda^{-1} c).  We normalize so the first unit entry of r is 1.

template <FiniteRing R>
Matrix<typename R::Elem> coset_representative(const Vec<typename R::Elem>& r, const Vec<typename R::Elem>& c) {
    using T = typename R::Elem;
    const std::size_t d = r.size();
    std::size_t pivot = d;
    for (std::size_t i = 0; i < d; ++i)
        if (r[i].is_unit()) {
            pivot = i;
            break;
        }
    if (pivot == d) throw PreconditionFailed("row is not unimodular");
    const T rinv = r[pivot].inverse();
    // Columns: a basis of ker r, then c.
    Matrix<T> ginv(d, r[0].zero());
    std::size_t col = 0;
    for (std::size_t j = 0; j < d; ++j) {
        if (j == pivot) continue;
        ginv(j, col) = r[0].one();
        ginv(pivot, col) = -(r[j] * rinv);
        ++col;
    }
    for (std::size_t i = 0; i < d; ++i) ginv(i, d - 1) = c[i];
    return inverse(ginv);
}

// Canonical key of the double coset H g Z from r = e* g and c = g^{-1} e,
// as an index into [0, q^{2d}).
template <FiniteRing R>
u64 hz_coset_key_rc(const R& ring, const Vec<typename R::Elem>& r, const Vec<typename R::Elem>& c) {
    const std::size_t d = r.size();
    std::size_t pivot = 0;
    while (!r[pivot].is_unit()) ++pivot;
    const auto lam = r[pivot].inverse();
    const auto laminv = r[pivot];
    u64 key = 0;
    const u64 q = ring.size();
    for (std::size_t i = 0; i < d; ++i) key = key * q + ring.index(r[i] * lam);
    for (std::size_t i = 0; i < d; ++i) key = key * q + ring.index(c[i] * laminv);
    return key;
}

template <FiniteRing R>
u64 hz_coset_key(const R& ring, const Matrix<typename R::Elem>& g, const Matrix<typename R::Elem>& ginv) {
    return hz_coset_key_rc(ring, g.row(g.dim() - 1), ginv.col(g.dim() - 1));
}

template <FiniteRing R>
std::vector<Matrix<typename R::Elem>> hz_coset_representatives(const R& ring, std::size_t d, u64 budget) {
    using T = typename R::Elem;
    const u64 q = ring.size();
    u64 total = 1;
    for (std::size_t i = 0; i < d; ++i) {
        if (total > budget / (q * q)) throw BudgetExceeded("coset enumeration exceeds budget");
        total *= q;
    }
    std::vector<Matrix<T>> out;
    Vec<T> r(d, ring.zero()), c(d, ring.zero());
    for (u64 ri = 0; ri < total; ++ri) {
        u64 x = ri;
        for (std::size_t i = 0; i < d; ++i) {
            r[i] = ring.element(x % q);
            x /= q;
        }
        std::size_t pivot = 0;
        while (pivot < d && !r[pivot].is_unit()) ++pivot;
        if (pivot == d || r[pivot] != ring.one()) continue;
        for (u64 ci = 0; ci < total; ++ci) {
            u64 y = ci;
            for (std::size_t i = 0; i < d; ++i) {
                c[i] = ring.element(y % q);
                y /= q;
            }
            if (dot(r, c) == ring.one()) out.push_back(coset_representative<R>(r, c));
        }
    }
    return out;
}

// |G(R)| / (|H(R)| |Z(R)|) for R = Z/p^m or F_{p^2}: the number of cosets above.
template <FiniteRing R>
u64 hz_coset_count(const R& ring, std::size_t d) {
    const u64 q = ring.size(), k = ring.residue_size();
    u64 qd = 1, kd = 1;
    for (std::size_t i = 0; i < d; ++i) {
        qd *= q;
        kd *= k;
    }
    // unimodular rows / units, times solutions of r c = 1
    u64 units = q - q / k;
    return (qd - qd / kd) / units * (qd / q);
}

}  // namespace ggp
