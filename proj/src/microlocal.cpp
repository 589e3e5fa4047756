#include "ggp/microlocal.hpp"

#include <deque>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

namespace ggp {

// --- Frame and chi_tau ----------------------------------------------------------

DepthFrame::DepthFrame(std::uint32_t p, std::uint32_t k_) : ring(p, 2 * k_), level(p, k_), k(k_) {
    if (k == 0) throw InvalidRing("depth exponent k must be >= 1");
}

Matrix<Zmod> DepthFrame::lift(const Matrix<Zmod>& m) const {
    return m.map([&](const Zmod& x) { return lift(x); });
}

Matrix<Zmod> DepthFrame::reduce(const Matrix<Zmod>& m) const {
    return m.map([&](const Zmod& x) { return reduce(x); });
}

u64 DepthFrame::psi_exponent(const Zmod& x) const {
    if (x.valuation() < k) throw NotInCongruenceSubgroup("argument of psi is not in q");
    return x.value() / q();
}

Matrix<Zmod> congruence_element(const DepthFrame& f, const Matrix<Zmod>& x) {
    const Zmod pk = f.ring.element(f.q());
    auto g = f.lift(x) * pk;
    for (std::size_t i = 0; i < g.dim(); ++i) g(i, i) += f.ring.one();
    return g;
}

std::vector<Matrix<Zmod>> congruence_quotient(const DepthFrame& f, std::size_t n, u64 budget) {
    std::vector<Matrix<Zmod>> out;
    for_each_matrix(f.level, n, budget, [&](const Matrix<Zmod>& x) { out.push_back(congruence_element(f, x)); });
    return out;
}

u64 chi_tau_exponent(const DepthFrame& f, const Matrix<Zmod>& tau, const Matrix<Zmod>& g) {
    if (g.dim() != tau.dim()) throw PreconditionFailed("dimension mismatch");
    auto x = g;
    for (std::size_t i = 0; i < x.dim(); ++i) x(i, i) -= f.ring.one();
    for (const auto& e : x.entries())
        if (e.valuation() < f.k) throw NotInCongruenceSubgroup("g is not congruent to 1 mod q");
    return f.psi_exponent((x * f.lift(tau)).trace());
}

// --- Descriptors ----------------------------------------------------------------

InductionDatum InductionDatum::principal_series(const std::vector<Zmod>& xis) {
    InductionDatum d;
    for (const auto& xi : xis) d.blocks.push_back(Matrix<Zmod>(1, xi));
    return d;
}

std::size_t InductionDatum::rank() const {
    std::size_t r = 0;
    for (const auto& b : blocks) r += b.dim();
    return r;
}

std::vector<std::size_t> InductionDatum::partition() const {
    std::vector<std::size_t> out;
    for (const auto& b : blocks) out.push_back(b.dim());
    return out;
}

MonicPoly<Zmod> InductionDatum::polynomial() const {
    if (blocks.empty()) throw PreconditionFailed("empty induction datum");
    auto P = MonicPoly<Zmod>::one(blocks.front().sample());
    for (const auto& b : blocks) {
        if (!is_cyclic(b)) throw PreconditionFailed("block parameter is not cyclic");
        P = P * charpoly(b);
    }
    return P;
}

std::string InductionDatum::to_string() const {
    std::string s = "[";
    for (std::size_t i = 0; i < blocks.size(); ++i) s += (i ? "," : "") + matrix_to_string(blocks[i]);
    return s + "]";
}

StablePairCheck stable_pair_check(const InductionDatum& pi, const InductionDatum& sigma) {
    if (pi.rank() != sigma.rank() + 1) throw PreconditionFailed("ranks must be n+1 and n");
    StablePairCheck out;
    out.P_pi = pi.polynomial();
    out.P_sigma = sigma.polynomial();
    out.stable = monic_coprime(out.P_pi, out.P_sigma);
    return out;
}

std::optional<std::uint32_t> ratio_conductor_exponent(const DepthFrame& f, const Zmod& d) {
    if (d.is_zero()) return std::nullopt;
    return 2 * f.k - d.valuation();
}

ConductorIdentity conductor_identity(const DepthFrame& f, const std::vector<Zmod>& xis, const std::vector<Zmod>& etas) {
    if (xis.size() != etas.size() + 1) throw PreconditionFailed("need n+1 and n characters");
    ConductorIdentity out;
    out.all_units = true;
    for (const auto& x : xis)
        for (const auto& y : etas) {
            auto c = ratio_conductor_exponent(f, x - y);
            out.exponent_bound += c ? *c : f.k;
            out.all_units = out.all_units && (x - y).is_unit();
        }
    out.target = u64{2} * f.k * etas.size() * xis.size();
    return out;
}

Matrix<Zmod> regular_parameter_for_pair(const InductionDatum& pi, const InductionDatum& sigma) {
    auto chk = stable_pair_check(pi, sigma);
    if (!chk.stable) throw NotStablePair("depth polynomials are not coprime");
    auto tau = construct_tau(chk.P_pi, chk.P_sigma);
    if (!is_stable(tau)) throw std::logic_error("constructed parameter is not stable");
    return tau;
}

// --- Support lemmas -------------------------------------------------------------

SupportCheck coefficient_support_check(const LocalRing& level, const Matrix<Zmod>& tau, u64 budget) {
    SupportCheck out;
    out.stable = is_stable(tau);
    for (const auto& h : general_linear(level, tau.dim() - 1, budget)) {
        ++out.h_count;
        auto g = embed_h(h);
        if (g * tau == tau * g) ++out.fixed;
    }
    return out;
}

NoncompactWitness noncompact_support_witness(const DepthFrame& f, const Matrix<Zmod>& tau, const std::vector<int>& exps) {
    const std::size_t d = tau.dim();
    if (exps.size() + 1 != d) throw PreconditionFailed("need one exponent per coordinate of V_H");
    std::vector<int> e(exps);
    e.push_back(0);
    const int lo = *std::min_element(e.begin(), e.end());
    const int hi = *std::max_element(e.begin(), e.end());
    if (lo == 0 && hi == 0) throw PreconditionFailed("a lies in K_H");

    NoncompactWitness w;
    w.min_side = lo < 0;
    const int extreme = w.min_side ? lo : hi;
    std::vector<bool> in_block(d, false);
    for (std::size_t i = 0; i < d; ++i)
        if (e[i] == extreme) {
            in_block[i] = true;
            w.block.push_back(i);
        }

    // x = E_{row,col} pairs with tau_{col,row}; the weight e_col - e_row must
    // be negative, which puts row off the block (min side) or on it (max side).
    bool found = false;
    for (std::size_t r = 0; r < d && !found; ++r)
        for (std::size_t c = 0; c < d && !found; ++c) {
            if (in_block[r] == w.min_side || in_block[c] != w.min_side) continue;
            if (!tau(c, r).is_unit()) continue;
            w.row = r;
            w.col = c;
            found = true;
        }
    if (!found) throw WitnessSearchFailed("tau has no unit entry pairing the extreme block with its complement");
    w.weight = e[w.col] - e[w.row];
    const std::uint32_t shift = static_cast<std::uint32_t>(-w.weight);
    w.t_valuation = 2 * f.k - 1;

    const std::uint32_t spread = static_cast<std::uint32_t>(hi - lo);
    w.precision = 2 * f.k + spread + 1;
    const LocalRing big(f.p(), w.precision);
    w.u = Matrix<Zmod>::identity(d, big.one());
    w.u(w.row, w.col) = big.element(int_pow(f.p(), shift + w.t_valuation));

    w.in_k_q2 = true;
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
            if ((w.u(i, j) - (i == j ? big.one() : big.zero())).valuation() < 2 * f.k) w.in_k_q2 = false;

    // a^{-1} u a has (i, j) entry p^{e_j - e_i} u_ij.
    w.conjugated = Matrix<Zmod>::identity(d, f.ring.one());
    bool integral = true;
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            const int s = e[j] - e[i];
            const Zmod& x = w.u(i, j);
            u64 v;
            if (s >= 0) {
                v = (x * big.element(int_pow(f.p(), static_cast<u64>(s)))).value();
            } else {
                if (x.valuation() < static_cast<std::uint32_t>(-s)) {
                    integral = false;
                    continue;
                }
                v = x.value() / int_pow(f.p(), static_cast<u64>(-s));
            }
            w.conjugated(i, j) = f.ring.element(v % f.ring.modulus());
        }
    w.conjugated_in_k_q = integral;
    for (std::size_t i = 0; i < d && integral; ++i)
        for (std::size_t j = 0; j < d; ++j)
            if ((w.conjugated(i, j) - (i == j ? f.ring.one() : f.ring.zero())).valuation() < f.k)
                w.conjugated_in_k_q = false;
    if (w.conjugated_in_k_q) w.chi_exponent = chi_tau_exponent(f, tau, w.conjugated);
    return w;
}

// --- Mackey -----------------------------------------------------------------------

namespace {

std::vector<std::size_t> block_index(const std::vector<std::size_t>& partition) {
    std::vector<std::size_t> out;
    for (std::size_t b = 0; b < partition.size(); ++b) out.insert(out.end(), partition[b], b);
    return out;
}

bool block_upper(const Matrix<Zmod>& g, const std::vector<std::size_t>& blk) {
    for (std::size_t r = 0; r < g.dim(); ++r)
        for (std::size_t c = 0; c < g.dim(); ++c)
            if (blk[r] > blk[c] && !g(r, c).is_zero()) return false;
    return true;
}

// One representative per coset P g, with the coset index of every g.
struct CosetTable {
    std::vector<Matrix<Zmod>> reps;
    std::unordered_map<u64, std::size_t> coset_of;
};

CosetTable parabolic_cosets(const LocalRing& ring, const std::vector<Matrix<Zmod>>& G,
                            const std::vector<std::size_t>& blk) {
    std::vector<Matrix<Zmod>> P;
    for (const auto& g : G)
        if (block_upper(g, blk)) P.push_back(g);
    CosetTable t;
    for (const auto& g : G) {
        if (t.coset_of.count(matrix_key(ring, g))) continue;
        const std::size_t idx = t.reps.size();
        t.reps.push_back(g);
        for (const auto& p : P) t.coset_of[matrix_key(ring, p * g)] = idx;
    }
    return t;
}

Matrix<Zmod> diagonal_block(const Matrix<Zmod>& m, std::size_t start, std::size_t size) {
    Matrix<Zmod> out(size, m.sample());
    for (std::size_t i = 0; i < size; ++i)
        for (std::size_t j = 0; j < size; ++j) out(i, j) = m(start + i, start + j);
    return out;
}

}  // namespace

MackeyResult mackey_dimension(const LocalRing& level, const InductionDatum& datum, const Matrix<Zmod>& tau, u64 budget) {
    const std::size_t n = datum.rank();
    if (tau.dim() != n) throw PreconditionFailed("tau and datum have different ranks");
    const auto part = datum.partition();
    const auto blk = block_index(part);
    auto cosets = parabolic_cosets(level, general_linear(level, n, budget), blk);

    MackeyResult out;
    out.cosets = cosets.reps.size();
    for (const auto& g : cosets.reps) {
        auto t = g * tau * inverse(g);
        if (!block_upper(t, blk)) continue;
        ++out.flag_preserving;
        bool match = true;
        std::size_t start = 0;
        for (std::size_t b = 0; b < part.size() && match; ++b) {
            auto x = diagonal_block(t, start, part[b]);
            const auto& param = datum.blocks[b];
            match = part[b] == 1 ? x(0, 0) == param(0, 0) : is_cyclic(x) && charpoly(x) == charpoly(param);
            start += part[b];
        }
        if (match) ++out.dimension;
    }
    return out;
}

u64 induced_model_dimension(std::uint32_t p, const std::vector<Zmod>& xis, const Matrix<Zmod>& tau, u64 budget) {
    const std::size_t n = xis.size();
    if (tau.dim() != n) throw PreconditionFailed("tau and characters have different ranks");
    const DepthFrame f(p, 1);
    const u64 q2 = f.ring.modulus();
    const u64 N = q2 - q2 / p;  // |(Z/p^2)^x|, cyclic

    // Discrete logarithm on (Z/p^2)^x.
    std::vector<u64> dlog(q2, 0);
    for (u64 gen = 2; gen < q2; ++gen) {
        if (gen % p == 0) continue;
        std::vector<u64> tab(q2, N);
        u64 x = 1;
        u64 order = 0;
        do {
            tab[x] = order++;
            x = x * gen % q2;
        } while (x != 1);
        if (order == N) {
            dlog = std::move(tab);
            break;
        }
    }
    // chi_i(1 + p s) = psi(p s xi_i) fixes the parameter mod p; take the
    // smallest such exponent (tame part irrelevant for the eigenspace).
    std::vector<u64> c(n);
    const u64 scale = N / p;
    for (std::size_t i = 0; i < n; ++i) {
        const u64 want = scale * (xis[i].value() % p) % N;
        u64 ci = 0;
        while (ci < N && ci * dlog[1 + p] % N != want) ++ci;
        if (ci == N) throw std::logic_error("no character with the requested parameter");
        c[i] = ci;
    }
    auto chi_b = [&](const Matrix<Zmod>& b) {
        u64 s = 0;
        for (std::size_t i = 0; i < n; ++i) s += c[i] * dlog[b(i, i).value()];
        return s % N;
    };

    std::vector<std::size_t> blk(n);
    std::iota(blk.begin(), blk.end(), 0);
    auto cosets = parabolic_cosets(f.ring, general_linear(f.ring, n, budget), blk);
    auto K = congruence_quotient(f, n, budget);
    std::vector<u64> chi_h;
    for (const auto& h : K) chi_h.push_back(chi_tau_exponent(f, tau, h) * scale % N);
    std::vector<Matrix<Zmod>> rep_inv;
    for (const auto& g : cosets.reps) rep_inv.push_back(inverse(g));

    const std::size_t C = cosets.reps.size();
    std::vector<i64> phase(C, -1);
    u64 dim = 0;
    for (std::size_t start = 0; start < C; ++start) {
        if (phase[start] >= 0) continue;
        phase[start] = 0;
        bool consistent = true;
        std::deque<std::size_t> queue{start};
        while (!queue.empty()) {
            const std::size_t cur = queue.front();
            queue.pop_front();
            for (std::size_t h = 0; h < K.size(); ++h) {
                auto gh = cosets.reps[cur] * K[h];
                const std::size_t nxt = cosets.coset_of.at(matrix_key(f.ring, gh));
                const u64 target = (static_cast<u64>(phase[cur]) + chi_h[h] + N - chi_b(gh * rep_inv[nxt])) % N;
                if (phase[nxt] < 0) {
                    phase[nxt] = static_cast<i64>(target);
                    queue.push_back(nxt);
                } else if (static_cast<u64>(phase[nxt]) != target) {
                    consistent = false;
                }
            }
        }
        if (consistent) ++dim;
    }
    return dim;
}

// --- J_tau -------------------------------------------------------------------------

BigInt gl_order(std::uint32_t p, std::uint32_t m, std::size_t n) {
    BigInt pn = boost::multiprecision::pow(BigInt(p), static_cast<unsigned>(n));
    BigInt r = boost::multiprecision::pow(BigInt(p), static_cast<unsigned>((m - 1) * n * n));
    for (std::size_t i = 0; i < n; ++i) r *= pn - boost::multiprecision::pow(BigInt(p), static_cast<unsigned>(i));
    return r;
}

VolumeRatio j_tau_volume_ratio(const LocalRing& level, const Matrix<Zmod>& tau, u64 budget) {
    if (!is_cyclic(tau)) throw NotCyclic("tau is not cyclic");
    const std::size_t n = tau.dim() - 1;
    VolumeRatio out;
    out.g_order = gl_order(level.p(), level.m(), n + 1);
    out.h_order = gl_order(level.p(), level.m(), n);
    auto gt = centralizer_units(level, tau, budget);
    out.g_tau_order = gt.size();
    for (const auto& g : gt)
        if (in_h(g)) ++out.h_fixed;
    out.ratio = Rational(out.g_order) / Rational(out.g_tau_order * out.h_order);
    const BigInt Qn = boost::multiprecision::pow(BigInt(level.modulus()), static_cast<unsigned>(n));
    out.normalized = out.ratio / Rational(Qn);
    const Rational frac(BigInt(level.p() - 1), BigInt(level.p()));
    out.lower = 1;
    for (std::size_t i = 0; i <= n; ++i) out.lower *= frac;
    out.upper = 1 / out.lower;
    return out;
}

namespace {

// Extend a character from the subgroup listed in `known` to the abelian group
// `elems`: for a outside the current subgroup S, with d minimal such that
// a^d in S, pick lambda(a) with d lambda(a) = lambda(a^d) in Z/N.
void extend_over(const LocalRing& ring, const std::vector<Matrix<Zmod>>& elems, std::unordered_map<u64, u64>& known,
                 std::vector<Matrix<Zmod>>& members, u64 N) {
    for (const auto& a : elems) {
        if (known.count(matrix_key(ring, a))) continue;
        auto pw = a;
        u64 d = 1;
        while (!known.count(matrix_key(ring, pw))) {
            pw = pw * a;
            ++d;
        }
        const u64 target = known.at(matrix_key(ring, pw));
        u64 x = 0;
        while (x < N && (d % N) * x % N != target) ++x;
        if (x == N) throw ExtensionFailed("no root of the character value in Z/N");
        std::vector<Matrix<Zmod>> grown;
        grown.reserve(members.size() * d);
        for (const auto& s : members) {
            const u64 base = known.at(matrix_key(ring, s));
            auto sj = s;
            for (u64 j = 0; j < d; ++j) {
                if (j) {
                    sj = sj * a;
                    known[matrix_key(ring, sj)] = (base + j * x) % N;
                }
                grown.push_back(sj);
            }
        }
        members = std::move(grown);
    }
}

}  // namespace

ChiExtension::ChiExtension(const DepthFrame& f, const Matrix<Zmod>& tau, u64 budget)
    : f_(f), tau_(tau), tau_lift_(f.lift(tau)) {
    const std::size_t n = tau.dim();
    if (!is_cyclic(tau)) throw PreconditionFailed("tau must be cyclic");
    units_ = centralizer_units(f_.ring, tau_lift_, budget);
    N_ = units_.size();
    if (N_ % f_.q() != 0) throw ExtensionFailed("unit group order not divisible by q");

    // The units congruent to 1 mod q, where lambda must equal chi_tau.
    std::vector<Matrix<Zmod>> members;
    for (const auto& a : units_) {
        bool congruent = true;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if ((a(i, j) - (i == j ? f_.ring.one() : f_.ring.zero())).valuation() < f_.k) congruent = false;
        if (!congruent) continue;
        lambda_[matrix_key(f_.ring, a)] = chi_scaled(a);
        members.push_back(a);
    }
    extend_over(f_.ring, units_, lambda_, members, N_);
    if (members.size() != units_.size()) throw ExtensionFailed("extension did not cover the unit group");
    for (std::size_t i = 0; i < units_.size(); ++i) {
        auto key = matrix_key(f_.level, f_.reduce(units_[i]));
        if (!lift_index_.count(key)) lift_index_[key] = i;
    }
    for (const auto& a : units_) unit_inv_.push_back(inverse(a));

    // ker chi_tau is normal and J/ker abelian: it suffices to test the
    // generators a (units) against 1 + p^k E_rs, since K(q)/K(q^2) is abelian.
    normal_kernel = abelian_quotient = true;
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t s = 0; s < n; ++s) {
            Matrix<Zmod> E(n, f_.level.zero());
            E(r, s) = f_.level.one();
            auto x = congruence_element(f_, E);
            auto x_inv = inverse(x);
            const u64 cx = chi_scaled(x);
            for (std::size_t i = 0; i < units_.size(); ++i) {
                auto conj = units_[i] * x * unit_inv_[i];
                if (chi_scaled(conj) != cx) normal_kernel = false;
                if (chi_scaled(conj * x_inv) != 0) abelian_quotient = false;
                ++commutators_checked;
            }
        }
}

u64 ChiExtension::chi_scaled(const Matrix<Zmod>& k) const {
    return chi_tau_exponent(f_, tau_, k) * (N_ / f_.q()) % N_;
}

bool ChiExtension::in_j(const Matrix<Zmod>& g) const {
    return is_invertible(g) && lift_index_.count(matrix_key(f_.level, f_.reduce(g)));
}

u64 ChiExtension::value(const Matrix<Zmod>& j) const {
    auto it = lift_index_.find(matrix_key(f_.level, f_.reduce(j)));
    if (it == lift_index_.end() || !is_invertible(j)) throw PreconditionFailed("element is not in J_tau");
    const auto& a = units_[it->second];
    auto b = unit_inv_[it->second] * j;
    return (lambda_.at(matrix_key(f_.ring, a)) + chi_scaled(b)) % N_;
}

u64 ChiExtension::j_order() const {
    return lift_index_.size() * int_pow(f_.q(), tau_.dim() * tau_.dim());
}

std::vector<Matrix<Zmod>> ChiExtension::j_elements(u64 budget) const {
    if (j_order() > budget) throw BudgetExceeded("J_tau enumeration exceeds budget");
    auto K = congruence_quotient(f_, tau_.dim(), budget);
    std::vector<Matrix<Zmod>> out;
    out.reserve(j_order());
    for (const auto& [key, idx] : lift_index_)
        for (const auto& b : K) out.push_back(units_[idx] * b);
    return out;
}

ExtensionCheck check_extension(const ChiExtension& ext, u64 budget, u64 samples, u64 seed) {
    const auto& f = ext.frame();
    const u64 N = ext.modulus();
    ExtensionCheck out;
    auto J = ext.j_elements(budget);
    out.elements = J.size();
    const std::size_t n = J.front().dim();
    for (const auto& b : congruence_quotient(f, n, budget))
        if (ext.value(b) != ext.chi_scaled(b)) ++out.restriction_failures;

    std::vector<u64> vals;
    vals.reserve(J.size());
    for (const auto& j : J) vals.push_back(ext.value(j));
    auto check_pair = [&](std::size_t x, std::size_t y) {
        ++out.pairs;
        if (ext.value(J[x] * J[y]) != (vals[x] + vals[y]) % N) ++out.multiplicativity_failures;
        auto comm = J[x] * J[y] * inverse(J[y] * J[x]);
        try {
            if (ext.chi_scaled(comm) != 0) ++out.commutator_failures;
        } catch (const NotInCongruenceSubgroup&) {
            ++out.commutator_failures;
        }
    };
    const u64 total = static_cast<u64>(J.size()) * J.size();
    if (total <= budget) {
        for (std::size_t x = 0; x < J.size(); ++x)
            for (std::size_t y = 0; y < J.size(); ++y) check_pair(x, y);
    } else {
        Rng rng(seed);
        for (u64 s = 0; s < samples; ++s) check_pair(uniform_below(rng, J.size()), uniform_below(rng, J.size()));
    }
    return out;
}

}  // namespace ggp
