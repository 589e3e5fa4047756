#pragma once

// Arithmetic in o/p^m = Z/p^m and in the small finite fields F_{p^2}, plus the
// nilpotent extensions R[e]/(e^2) and R[e1,e2]/(e1^2,e2^2) used for tangency.
//
// Elements carry their ring parameters by value, so generic matrix code can
// build zero/one from any sample element without a separate context object.

#include <concepts>
#include <cstdint>
#include <string>
#include <vector>

#include "ggp/errors.hpp"

namespace ggp {

using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;

// Largest modulus accepted: residues are kept below 2^62 so that sums never
// wrap and products fit in the 128-bit intermediate.
inline constexpr u64 kMaxModulus = u64{1} << 62;

// Default enumeration budget (number of candidates an enumeration may visit).
inline constexpr u64 kDefaultBudget = 200000000;

bool is_prime(u64 n);

class Zmod {
public:
    Zmod() = default;
    Zmod(u64 value, u64 modulus, std::uint32_t p, std::uint32_t m)
        : v_(value % modulus), mod_(modulus), p_(p), m_(m) {}

    u64 value() const { return v_; }
    u64 modulus() const { return mod_; }
    std::uint32_t p() const { return p_; }
    std::uint32_t m() const { return m_; }

    Zmod zero() const { return {0, mod_, p_, m_}; }
    Zmod one() const { return {1 % mod_, mod_, p_, m_}; }
    Zmod from_int(i64 k) const;

    bool is_zero() const { return v_ == 0; }
    bool is_unit() const { return v_ % p_ != 0; }
    Zmod inverse() const;  // throws NonUnit
    // p-adic valuation, capped at m (the valuation of 0).
    std::uint32_t valuation() const;
    // Signed representative in (-mod/2, mod/2].
    i64 centered() const;

    Zmod operator+(const Zmod& o) const {
        u64 s = v_ + o.v_;
        if (s >= mod_) s -= mod_;
        return {s, mod_, p_, m_, raw_tag{}};
    }
    Zmod operator-(const Zmod& o) const {
        u64 s = v_ >= o.v_ ? v_ - o.v_ : v_ + mod_ - o.v_;
        return {s, mod_, p_, m_, raw_tag{}};
    }
    Zmod operator-() const { return {v_ == 0 ? 0 : mod_ - v_, mod_, p_, m_, raw_tag{}}; }
    Zmod operator*(const Zmod& o) const {
        return {static_cast<u64>(static_cast<u128>(v_) * o.v_ % mod_), mod_, p_, m_, raw_tag{}};
    }
    Zmod& operator+=(const Zmod& o) { return *this = *this + o; }
    Zmod& operator-=(const Zmod& o) { return *this = *this - o; }
    Zmod& operator*=(const Zmod& o) { return *this = *this * o; }
    bool operator==(const Zmod& o) const { return v_ == o.v_ && mod_ == o.mod_; }
    bool operator!=(const Zmod& o) const { return !(*this == o); }

    std::string to_string() const { return std::to_string(v_); }

private:
    struct raw_tag {};
    Zmod(u64 v, u64 mod, std::uint32_t p, std::uint32_t m, raw_tag) : v_(v), mod_(mod), p_(p), m_(m) {}

    u64 v_ = 0;
    u64 mod_ = 1;
    std::uint32_t p_ = 2;
    std::uint32_t m_ = 1;
};

// The ring Z/p^m; also the enumerator of its elements.
class LocalRing {
public:
    using Elem = Zmod;

    LocalRing(std::uint32_t p, std::uint32_t m);  // throws InvalidRing

    std::uint32_t p() const { return p_; }
    std::uint32_t m() const { return m_; }
    u64 modulus() const { return q_; }
    // Cardinality of the residue field.
    u64 residue_size() const { return p_; }
    u64 size() const { return q_; }

    Zmod element(u64 index) const { return {index, q_, p_, m_}; }
    u64 index(const Zmod& x) const { return x.value(); }
    Zmod zero() const { return element(0); }
    Zmod one() const { return element(1 % q_); }
    Zmod from_int(i64 k) const { return zero().from_int(k); }
    Zmod uniformizer() const { return element(p_ % q_); }

    // The same ring with precision reduced to m' <= m.
    LocalRing truncated(std::uint32_t m_new) const { return {p_, m_new}; }
    Zmod reduce(const Zmod& x, const LocalRing& target) const;

    std::string name() const;

private:
    std::uint32_t p_;
    std::uint32_t m_;
    u64 q_;
};

Zmod unit_inverse(const Zmod& x);
std::uint32_t valuation(const Zmod& x);
// Image of x under Z/p^m -> Z/p^{m'} (m' <= m).
Zmod truncate(const Zmod& x, std::uint32_t m_new);

// F_{p^2} = F_p[X]/(X^2 - s X - t) with a fixed irreducible: X^2 + X + 1 for
// p = 2, X^2 - r (r the least quadratic non-residue) for odd p.  p^1 fields
// use Zmod with m = 1.
class Fq2 {
public:
    Fq2() = default;
    Fq2(std::uint32_t c0, std::uint32_t c1, std::uint32_t p, std::uint32_t s, std::uint32_t t)
        : c0_(c0 % p), c1_(c1 % p), p_(p), s_(s), t_(t) {}

    std::uint32_t c0() const { return c0_; }
    std::uint32_t c1() const { return c1_; }
    std::uint32_t p() const { return p_; }

    Fq2 zero() const { return {0, 0, p_, s_, t_}; }
    Fq2 one() const { return {1, 0, p_, s_, t_}; }
    Fq2 from_int(i64 k) const;

    bool is_zero() const { return c0_ == 0 && c1_ == 0; }
    bool is_unit() const { return !is_zero(); }
    Fq2 inverse() const;
    std::uint32_t valuation() const { return is_zero() ? 1 : 0; }

    Fq2 operator+(const Fq2& o) const { return {c0_ + o.c0_, c1_ + o.c1_, p_, s_, t_}; }
    Fq2 operator-(const Fq2& o) const { return {c0_ + p_ - o.c0_, c1_ + p_ - o.c1_, p_, s_, t_}; }
    Fq2 operator-() const { return {p_ - c0_, p_ - c1_, p_, s_, t_}; }
    Fq2 operator*(const Fq2& o) const;
    Fq2& operator+=(const Fq2& o) { return *this = *this + o; }
    Fq2& operator-=(const Fq2& o) { return *this = *this - o; }
    Fq2& operator*=(const Fq2& o) { return *this = *this * o; }
    bool operator==(const Fq2& o) const { return c0_ == o.c0_ && c1_ == o.c1_ && p_ == o.p_; }
    bool operator!=(const Fq2& o) const { return !(*this == o); }

    std::string to_string() const;

private:
    std::uint32_t c0_ = 0, c1_ = 0, p_ = 2, s_ = 1, t_ = 1;
};

class QuadraticField {
public:
    using Elem = Fq2;

    explicit QuadraticField(std::uint32_t p);

    std::uint32_t p() const { return p_; }
    std::uint32_t m() const { return 1; }
    u64 residue_size() const { return u64{p_} * p_; }
    u64 size() const { return u64{p_} * p_; }

    Fq2 element(u64 index) const {
        return {static_cast<std::uint32_t>(index % p_), static_cast<std::uint32_t>(index / p_), p_, s_, t_};
    }
    u64 index(const Fq2& x) const { return x.c0() + u64{p_} * x.c1(); }
    Fq2 zero() const { return element(0); }
    Fq2 one() const { return element(1); }
    Fq2 from_int(i64 k) const { return zero().from_int(k); }
    // X^2 = s X + t
    std::uint32_t s() const { return s_; }
    std::uint32_t t() const { return t_; }

    std::string name() const;

private:
    std::uint32_t p_;
    std::uint32_t s_;
    std::uint32_t t_;
};

// R[e]/(e^2).
template <class T>
struct Dual {
    T a0, a1;

    Dual() = default;
    Dual(const T& x, const T& y) : a0(x), a1(y) {}

    Dual zero() const { return {a0.zero(), a0.zero()}; }
    Dual one() const { return {a0.one(), a0.zero()}; }
    Dual from_int(i64 k) const { return {a0.from_int(k), a0.zero()}; }
    bool is_zero() const { return a0.is_zero() && a1.is_zero(); }
    bool is_unit() const { return a0.is_unit(); }
    Dual inverse() const {
        T i = a0.inverse();
        return {i, -(a1 * i * i)};
    }
    Dual operator+(const Dual& o) const { return {a0 + o.a0, a1 + o.a1}; }
    Dual operator-(const Dual& o) const { return {a0 - o.a0, a1 - o.a1}; }
    Dual operator-() const { return {-a0, -a1}; }
    Dual operator*(const Dual& o) const { return {a0 * o.a0, a0 * o.a1 + a1 * o.a0}; }
    Dual& operator+=(const Dual& o) { return *this = *this + o; }
    Dual& operator-=(const Dual& o) { return *this = *this - o; }
    Dual& operator*=(const Dual& o) { return *this = *this * o; }
    bool operator==(const Dual& o) const { return a0 == o.a0 && a1 == o.a1; }
    bool operator!=(const Dual& o) const { return !(*this == o); }
};

// R[e1,e2]/(e1^2, e2^2); coefficients of 1, e1, e2, e1 e2.
template <class T>
struct BiDual {
    T a0, a1, a2, a12;

    BiDual() = default;
    BiDual(const T& x, const T& y1, const T& y2, const T& y12) : a0(x), a1(y1), a2(y2), a12(y12) {}

    BiDual zero() const { auto z = a0.zero(); return {z, z, z, z}; }
    BiDual one() const { auto z = a0.zero(); return {a0.one(), z, z, z}; }
    BiDual from_int(i64 k) const { auto z = a0.zero(); return {a0.from_int(k), z, z, z}; }
    bool is_zero() const { return a0.is_zero() && a1.is_zero() && a2.is_zero() && a12.is_zero(); }
    bool is_unit() const { return a0.is_unit(); }
    BiDual inverse() const {
        // (x0 + n)^{-1} = x0^{-1} - x0^{-2} n + x0^{-3} n^2 with n^2 = 2 a1 a2 e1e2.
        T i = a0.inverse();
        T i2 = i * i;
        T two = a0.from_int(2);
        return {i, -(a1 * i2), -(a2 * i2), two * a1 * a2 * i2 * i - a12 * i2};
    }
    BiDual operator+(const BiDual& o) const { return {a0 + o.a0, a1 + o.a1, a2 + o.a2, a12 + o.a12}; }
    BiDual operator-(const BiDual& o) const { return {a0 - o.a0, a1 - o.a1, a2 - o.a2, a12 - o.a12}; }
    BiDual operator-() const { return {-a0, -a1, -a2, -a12}; }
    BiDual operator*(const BiDual& o) const {
        return {a0 * o.a0, a0 * o.a1 + a1 * o.a0, a0 * o.a2 + a2 * o.a0,
                a0 * o.a12 + a12 * o.a0 + a1 * o.a2 + a2 * o.a1};
    }
    BiDual& operator+=(const BiDual& o) { return *this = *this + o; }
    BiDual& operator-=(const BiDual& o) { return *this = *this - o; }
    BiDual& operator*=(const BiDual& o) { return *this = *this * o; }
    bool operator==(const BiDual& o) const { return a0 == o.a0 && a1 == o.a1 && a2 == o.a2 && a12 == o.a12; }
    bool operator!=(const BiDual& o) const { return !(*this == o); }
};

template <class T>
Dual<T> dual_lift(const T& x) { return {x, x.zero()}; }

template <class T>
BiDual<T> bidual_lift(const T& x) { auto z = x.zero(); return {x, z, z, z}; }

// Minimal scalar interface shared by every ring flavour above.
template <class T>
concept Scalar = requires(const T a, const T b, i64 k) {
    { a + b } -> std::same_as<T>;
    { a - b } -> std::same_as<T>;
    { a * b } -> std::same_as<T>;
    { -a } -> std::same_as<T>;
    { a == b } -> std::convertible_to<bool>;
    { a.zero() } -> std::same_as<T>;
    { a.one() } -> std::same_as<T>;
    { a.from_int(k) } -> std::same_as<T>;
    { a.is_zero() } -> std::convertible_to<bool>;
    { a.is_unit() } -> std::convertible_to<bool>;
    { a.inverse() } -> std::same_as<T>;
};

// Enumerable base rings (Z/p^m and F_{p^2}).
template <class R>
concept FiniteRing = requires(const R r, u64 i, const typename R::Elem x) {
    { r.size() } -> std::convertible_to<u64>;
    { r.element(i) } -> std::same_as<typename R::Elem>;
    { r.index(x) } -> std::convertible_to<u64>;
    { r.p() } -> std::convertible_to<std::uint32_t>;
    { r.residue_size() } -> std::convertible_to<u64>;
};

}  // namespace ggp
