#include "ggp/local_ring.hpp"

#include <sstream>

namespace ggp {

bool is_prime(u64 n) {
    if (n < 2) return false;
    for (u64 d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

Zmod Zmod::from_int(i64 k) const {
    i64 r = k % static_cast<i64>(mod_);
    if (r < 0) r += static_cast<i64>(mod_);
    return {static_cast<u64>(r), mod_, p_, m_};
}

Zmod Zmod::inverse() const {
    if (!is_unit()) throw NonUnit("element " + std::to_string(v_) + " is not a unit mod " + std::to_string(mod_));
    // Extended Euclid on (v, mod) in signed 128-bit.
    __int128 r0 = mod_, r1 = v_, s0 = 0, s1 = 1;
    while (r1 != 0) {
        __int128 qt = r0 / r1;
        __int128 t = r0 - qt * r1;
        r0 = r1;
        r1 = t;
        t = s0 - qt * s1;
        s0 = s1;
        s1 = t;
    }
    __int128 m = mod_;
    __int128 inv = ((s0 % m) + m) % m;
    return {static_cast<u64>(inv), mod_, p_, m_};
}

std::uint32_t Zmod::valuation() const {
    if (v_ == 0) return m_;
    std::uint32_t k = 0;
    u64 x = v_;
    while (x % p_ == 0) {
        x /= p_;
        ++k;
    }
    return k;
}

i64 Zmod::centered() const {
    return v_ > mod_ / 2 ? static_cast<i64>(v_) - static_cast<i64>(mod_) : static_cast<i64>(v_);
}

LocalRing::LocalRing(std::uint32_t p, std::uint32_t m) : p_(p), m_(m), q_(1) {
    if (!is_prime(p)) throw InvalidRing("p = " + std::to_string(p) + " is not prime");
    if (m < 1) throw InvalidRing("precision m must be at least 1");
    for (std::uint32_t i = 0; i < m; ++i) {
        if (q_ > kMaxModulus / p) throw InvalidRing("p^m exceeds the supported modulus width");
        q_ *= p;
    }
}

Zmod LocalRing::reduce(const Zmod& x, const LocalRing& target) const {
    if (target.p_ != p_ || target.m_ > m_) throw InvalidRing("reduction target must be Z/p^m' with m' <= m");
    return target.element(x.value() % target.q_);
}

std::string LocalRing::name() const {
    return m_ == 1 ? "F_" + std::to_string(p_) : "Z/" + std::to_string(p_) + "^" + std::to_string(m_);
}

Zmod unit_inverse(const Zmod& x) { return x.inverse(); }
std::uint32_t valuation(const Zmod& x) { return x.valuation(); }

Zmod truncate(const Zmod& x, std::uint32_t m_new) {
    LocalRing src(x.p(), x.m());
    return src.reduce(x, src.truncated(m_new));
}

Fq2 Fq2::from_int(i64 k) const {
    i64 r = k % static_cast<i64>(p_);
    if (r < 0) r += p_;
    return {static_cast<std::uint32_t>(r), 0, p_, s_, t_};
}

Fq2 Fq2::operator*(const Fq2& o) const {
    // (a + bX)(c + dX) = ac + (ad + bc) X + bd X^2, X^2 = s X + t.
    u64 p = p_;
    u64 ac = u64{c0_} * o.c0_ % p;
    u64 bd = u64{c1_} * o.c1_ % p;
    u64 mid = (u64{c0_} * o.c1_ + u64{c1_} * o.c0_) % p;
    u64 r0 = (ac + bd * t_) % p;
    u64 r1 = (mid + bd * s_) % p;
    return {static_cast<std::uint32_t>(r0), static_cast<std::uint32_t>(r1), p_, s_, t_};
}

Fq2 Fq2::inverse() const {
    if (is_zero()) throw NonUnit("zero is not invertible in F_" + std::to_string(p_) + "^2");
    // x^{q-2} by square-and-multiply.
    u64 e = u64{p_} * p_ - 2;
    Fq2 base = *this, acc = one();
    while (e) {
        if (e & 1) acc = acc * base;
        base = base * base;
        e >>= 1;
    }
    return acc;
}

std::string Fq2::to_string() const {
    std::ostringstream os;
    os << c0_ << "+" << c1_ << "x";
    return os.str();
}

QuadraticField::QuadraticField(std::uint32_t p) : p_(p), s_(0), t_(0) {
    if (!is_prime(p)) throw InvalidRing("p = " + std::to_string(p) + " is not prime");
    if (p > (1u << 20)) throw InvalidRing("quadratic extension only supported for small p");
    if (p == 2) {
        // X^2 + X + 1: X^2 = X + 1.
        s_ = 1;
        t_ = 1;
        return;
    }
    for (std::uint32_t r = 2; r < p; ++r) {
        bool square = false;
        for (u64 x = 1; x < p && !square; ++x) square = (x * x) % p == r;
        if (!square) {
            t_ = r;
            return;
        }
    }
    throw InvalidRing("no quadratic non-residue found");
}

std::string QuadraticField::name() const { return "F_" + std::to_string(p_) + "^2"; }

}  // namespace ggp
