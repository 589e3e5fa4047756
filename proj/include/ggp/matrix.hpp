#pragma once

// Dense square matrices over the scalar rings, with division-free
// characteristic polynomials (Berkowitz) so that determinants, adjugates and
// inverses are valid over Z/p^m and its nilpotent extensions.

#include <functional>
#include <string>
#include <vector>

#include "ggp/polynomial.hpp"

namespace ggp {

inline constexpr std::size_t kMaxDim = 8;

template <Scalar T>
using Vec = std::vector<T>;

template <Scalar T>
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t n, const T& fill) : n_(n), a_(n * n, fill) {}

    static Matrix zero(std::size_t n, const T& sample) { return Matrix(n, sample.zero()); }
    static Matrix identity(std::size_t n, const T& sample) {
        Matrix m(n, sample.zero());
        for (std::size_t i = 0; i < n; ++i) m(i, i) = sample.one();
        return m;
    }
    static Matrix scalar(std::size_t n, const T& s) {
        Matrix m(n, s.zero());
        for (std::size_t i = 0; i < n; ++i) m(i, i) = s;
        return m;
    }
    static Matrix diagonal(const Vec<T>& d) {
        Matrix m(d.size(), d.at(0).zero());
        for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
        return m;
    }
    // Row-major entries.
    static Matrix from_rows(std::size_t n, const Vec<T>& entries) {
        if (entries.size() != n * n) throw PreconditionFailed("matrix entry count mismatch");
        Matrix m;
        m.n_ = n;
        m.a_ = entries;
        return m;
    }

    std::size_t dim() const { return n_; }
    T& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }
    const Vec<T>& entries() const { return a_; }
    T sample() const { return a_.front(); }

    Vec<T> row(std::size_t i) const { return Vec<T>(a_.begin() + i * n_, a_.begin() + (i + 1) * n_); }
    Vec<T> col(std::size_t j) const {
        Vec<T> c;
        c.reserve(n_);
        for (std::size_t i = 0; i < n_; ++i) c.push_back((*this)(i, j));
        return c;
    }

    Matrix operator+(const Matrix& o) const {
        Matrix r = *this;
        for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] += o.a_[i];
        return r;
    }
    Matrix operator-(const Matrix& o) const {
        Matrix r = *this;
        for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] -= o.a_[i];
        return r;
    }
    Matrix operator-() const {
        Matrix r = *this;
        for (auto& x : r.a_) x = -x;
        return r;
    }
    Matrix operator*(const Matrix& o) const {
        Matrix r(n_, sample().zero());
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t k = 0; k < n_; ++k) {
                const T& x = (*this)(i, k);
                if (x.is_zero()) continue;
                for (std::size_t j = 0; j < n_; ++j) r(i, j) += x * o(k, j);
            }
        return r;
    }
    Matrix operator*(const T& s) const {
        Matrix r = *this;
        for (auto& x : r.a_) x = x * s;
        return r;
    }
    Vec<T> operator*(const Vec<T>& v) const {
        Vec<T> r(n_, sample().zero());
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j) r[i] += (*this)(i, j) * v[j];
        return r;
    }
    bool operator==(const Matrix& o) const { return n_ == o.n_ && a_ == o.a_; }
    bool operator!=(const Matrix& o) const { return !(*this == o); }

    T trace() const {
        T t = sample().zero();
        for (std::size_t i = 0; i < n_; ++i) t += (*this)(i, i);
        return t;
    }
    Matrix transpose() const {
        Matrix r = *this;
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j) r(i, j) = (*this)(j, i);
        return r;
    }
    // Entry-wise map into another scalar type.
    template <class F>
    auto map(F&& f) const {
        using U = decltype(f(a_.front()));
        Vec<U> e;
        e.reserve(a_.size());
        for (const auto& x : a_) e.push_back(f(x));
        return Matrix<U>::from_rows(n_, e);
    }

private:
    std::size_t n_ = 0;
    Vec<T> a_;
};

// Row vector times matrix.
template <Scalar T>
Vec<T> row_times(const Vec<T>& r, const Matrix<T>& m) {
    Vec<T> out(m.dim(), r.front().zero());
    for (std::size_t i = 0; i < m.dim(); ++i)
        for (std::size_t j = 0; j < m.dim(); ++j) out[j] += r[i] * m(i, j);
    return out;
}

template <Scalar T>
T dot(const Vec<T>& a, const Vec<T>& b) {
    T s = a.front().zero();
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

template <Scalar T>
Matrix<T> matrix_pow(const Matrix<T>& a, std::size_t k) {
    Matrix<T> r = Matrix<T>::identity(a.dim(), a.sample());
    for (std::size_t i = 0; i < k; ++i) r = r * a;
    return r;
}

inline void check_dim(std::size_t n) {
    if (n == 0) throw PreconditionFailed("empty matrix");
    if (n > kMaxDim) throw DimensionTooLarge("matrix dimension " + std::to_string(n) + " exceeds " + std::to_string(kMaxDim));
}

// det(X - A) by Berkowitz's division-free algorithm.
template <Scalar T>
MonicPoly<T> charpoly(const Matrix<T>& A) {
    const std::size_t n = A.dim();
    check_dim(n);
    const T zero = A.sample().zero();
    // v holds coefficients leading-first for the leading k x k principal block.
    Vec<T> v{zero.one(), -A(0, 0)};
    for (std::size_t k = 1; k < n; ++k) {
        // Column of the Toeplitz factor: 1, -a, -R C, -R M C, ..., -R M^{k-1} C.
        Vec<T> col{zero.one(), -A(k, k)};
        Vec<T> c(k, zero);
        for (std::size_t i = 0; i < k; ++i) c[i] = A(i, k);
        for (std::size_t step = 0; step < k; ++step) {
            T rc = zero;
            for (std::size_t i = 0; i < k; ++i) rc += A(k, i) * c[i];
            col.push_back(-rc);
            Vec<T> next(k, zero);
            for (std::size_t i = 0; i < k; ++i)
                for (std::size_t j = 0; j < k; ++j) next[i] += A(i, j) * c[j];
            c = std::move(next);
        }
        Vec<T> w(k + 2, zero);
        for (std::size_t i = 0; i < k + 2; ++i)
            for (std::size_t j = 0; j <= i && j < v.size(); ++j) w[i] += col[i - j] * v[j];
        v = std::move(w);
    }
    return MonicPoly<T>(Vec<T>(v.rbegin(), v.rend()));
}

template <Scalar T>
T determinant(const Matrix<T>& A) {
    auto P = charpoly(A);
    return A.dim() % 2 == 0 ? P[0] : -P[0];
}

// adj(A) = (-1)^{n-1} (A^{n-1} + c_{n-1} A^{n-2} + ... + c_1), by Cayley-Hamilton.
template <Scalar T>
std::pair<T, Matrix<T>> determinant_and_adjugate(const Matrix<T>& A) {
    const std::size_t n = A.dim();
    auto P = charpoly(A);
    Matrix<T> S = Matrix<T>::identity(n, A.sample());
    for (std::size_t j = n - 1; j >= 1; --j) {
        S = S * A;
        for (std::size_t i = 0; i < n; ++i) S(i, i) += P[j];
    }
    T det = n % 2 == 0 ? P[0] : -P[0];
    if (n % 2 == 0) S = -S;
    return {det, S};
}

template <Scalar T>
Matrix<T> adjugate(const Matrix<T>& A) { return determinant_and_adjugate(A).second; }

template <Scalar T>
Matrix<T> inverse(const Matrix<T>& A) {
    auto [det, adj] = determinant_and_adjugate(A);
    if (!det.is_unit()) throw SingularOverRing("determinant is not a unit");
    return adj * det.inverse();
}

template <Scalar T>
bool is_invertible(const Matrix<T>& A) { return determinant(A).is_unit(); }

// P(A) for a monic P.
template <Scalar T>
Matrix<T> eval_poly(const MonicPoly<T>& P, const Matrix<T>& A) {
    const std::size_t n = A.dim();
    Matrix<T> acc = Matrix<T>::identity(n, A.sample());
    for (std::size_t i = P.degree(); i-- > 0;) {
        acc = acc * A;
        for (std::size_t k = 0; k < n; ++k) acc(k, k) += P[i];
    }
    return acc;
}

template <Scalar T>
bool is_scalar_matrix(const Matrix<T>& A) {
    for (std::size_t i = 0; i < A.dim(); ++i)
        for (std::size_t j = 0; j < A.dim(); ++j)
            if (i != j ? !A(i, j).is_zero() : A(i, i) != A(0, 0)) return false;
    return true;
}

template <Scalar T>
bool commutes(const Matrix<T>& A, const Matrix<T>& B) { return A * B == B * A; }

// Rank over the residue field of a family of vectors.
template <Scalar T>
std::size_t residue_rank(const std::vector<Vec<T>>& vectors) {
    using F = decltype(residue(vectors.front().front()));
    std::vector<Vec<F>> rows;
    for (const auto& v : vectors) {
        Vec<F> r;
        for (const auto& x : v) r.push_back(residue(x));
        rows.push_back(std::move(r));
    }
    std::size_t rank = 0;
    const std::size_t cols = rows.empty() ? 0 : rows.front().size();
    for (std::size_t c = 0; c < cols && rank < rows.size(); ++c) {
        std::size_t piv = rank;
        while (piv < rows.size() && rows[piv][c].is_zero()) ++piv;
        if (piv == rows.size()) continue;
        std::swap(rows[piv], rows[rank]);
        F inv = rows[rank][c].inverse();
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (i == rank || rows[i][c].is_zero()) continue;
            F f = rows[i][c] * inv;
            for (std::size_t j = 0; j < cols; ++j) rows[i][j] -= f * rows[rank][j];
        }
        ++rank;
    }
    return rank;
}

// Visit every matrix over an enumerable ring (q^{n^2} of them).
template <FiniteRing R>
void for_each_matrix(const R& ring, std::size_t n, u64 budget,
                     const std::function<void(const Matrix<typename R::Elem>&)>& visit) {
    const u64 q = ring.size();
    u64 total = 1;
    for (std::size_t i = 0; i < n * n; ++i) {
        if (total > budget / q) throw BudgetExceeded("matrix enumeration exceeds budget");
        total *= q;
    }
    Matrix<typename R::Elem> M(n, ring.zero());
    std::vector<u64> digits(n * n, 0);
    for (u64 idx = 0; idx < total; ++idx) {
        visit(M);
        for (std::size_t k = 0; k < n * n; ++k) {
            if (++digits[k] < q) {
                M(k / n, k % n) = ring.element(digits[k]);
                break;
            }
            digits[k] = 0;
            M(k / n, k % n) = ring.zero();
        }
    }
}

// Integer key of a matrix over an enumerable ring, for hashing.
template <FiniteRing R>
u64 matrix_key(const R& ring, const Matrix<typename R::Elem>& M) {
    u64 k = 0;
    for (std::size_t i = M.entries().size(); i-- > 0;) k = k * ring.size() + ring.index(M.entries()[i]);
    return k;
}

template <Scalar T>
std::string matrix_to_string(const Matrix<T>& M) {
    std::string s = "[";
    for (std::size_t i = 0; i < M.dim(); ++i) {
        s += i ? ",[" : "[";
        for (std::size_t j = 0; j < M.dim(); ++j) s += (j ? "," : "") + M(i, j).to_string();
        s += "]";
    }
    return s + "]";
}

}  // namespace ggp
