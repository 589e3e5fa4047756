#include "ggp/volume.hpp"

#include <set>
#include <stdexcept>

namespace ggp {

u64 int_pow(u64 base, u64 exp) {
    u64 r = 1;
    while (exp--) r *= base;
    return r;
}

// --- d_H ---------------------------------------------------------------------

DistanceValue distance_d_h(const Matrix<Zmod>& g, const Matrix<Zmod>& ginv) {
    const std::size_t n = g.dim() - 1;
    const std::uint32_t m = g(0, 0).m();
    DistanceValue out{0, m};
    if (!g(n, n).is_unit() || !ginv(n, n).is_unit()) return out;
    std::uint32_t ell = m;
    for (std::size_t i = 0; i < n; ++i)
        for (const auto* x : {&g(i, n), &g(n, i), &ginv(i, n), &ginv(n, i)}) ell = std::min(ell, x->valuation());
    out.ell = ell;
    return out;
}

DistanceValue distance_d_h(const Matrix<Zmod>& g) { return distance_d_h(g, inverse(g)); }

std::uint32_t hz_depth(const Matrix<Zmod>& g) {
    const std::uint32_t m = g(0, 0).m();
    for (std::uint32_t l = m; l >= 1; --l)
        if (in_hz(g.map([&](const Zmod& x) { return truncate(x, l); }))) return l;
    return 0;
}

u64 q_star(u64 q, std::uint32_t m) { return int_pow(q, (m + 1) / 2); }

Rational volume_shape(u64 q, std::uint32_t m, const DistanceValue& d) {
    Rational qd = d.vanishes() ? Rational(0) : Rational(BigInt(int_pow(q, m - d.ell)));
    Rational s = Rational(1) / (1 + qd);
    if (d.at_infinity()) s += Rational(1) / Rational(BigInt(q_star(q, m)));
    return s;
}

bool centralizer_lower_bound_holds(u64 q, std::uint32_t m, std::size_t n, u64 centralizer_size) {
    BigInt lhs = BigInt(centralizer_size) * boost::multiprecision::pow(BigInt(q), static_cast<unsigned>(n));
    BigInt rhs = boost::multiprecision::pow(BigInt(q - 1), static_cast<unsigned>(n)) *
                 boost::multiprecision::pow(BigInt(q), static_cast<unsigned>(m * n));
    return lhs >= rhs;
}

// --- Volume bound ------------------------------------------------------------

namespace {

Rational make_ratio(u64 count, const Rational& bound) { return bound == 0 ? Rational(0) : Rational(count) / bound; }

VolumeReport report_for(const LocalRing& ring, const Matrix<Zmod>& tau, const Matrix<Zmod>& a, u64 count,
                        u64 centralizer_size, const DistanceValue& d) {
    VolumeReport r;
    r.p = ring.p();
    r.m = ring.m();
    r.rank = tau.dim();
    r.P = charpoly(tau);
    r.P_H = charpoly(tau_sub_h(tau));
    r.a = a;
    r.count = count;
    r.centralizer_size = centralizer_size;
    r.d_h = d;
    r.bound = volume_shape(ring.p(), ring.m(), d) *
              Rational(centralizer_size);
    r.ratio = make_ratio(count, r.bound);
    return r;
}

}  // namespace

VolumeReport verify_volume_bound(const LocalRing& ring, const Matrix<Zmod>& tau, const Matrix<Zmod>& a) {
    if (ring.p() == 2) throw CharacteristicTwo("the volume bound requires q odd");
    if (!is_stable(tau)) throw NotStable("tau is not stable");
    if (in_hz(a)) throw DegenerateInstance("a lies in HZ");
    StableTau<Zmod> st(tau);
    auto units = h_centralizer_units(ring, tau, kDefaultBudget);
    u64 count = 0;
    for (const auto& y : units) count += st.in_h_gtau(a * y);
    return report_for(ring, tau, a, count, units.size(), distance_d_h(a));
}

std::vector<AffineTauClass> affine_tau_classes(const LocalRing& ring, std::size_t rank) {
    const u64 q = ring.size();
    auto pairs = coprime_pairs(ring, rank);
    auto pair_key = [&](const MonicPoly<Zmod>& P, const MonicPoly<Zmod>& PH) {
        u64 k = 0;
        for (std::size_t i = 0; i < P.degree(); ++i) k = k * q + ring.index(P[i]);
        for (std::size_t i = 0; i < PH.degree(); ++i) k = k * q + ring.index(PH[i]);
        return k;
    };
    std::vector<bool> seen(int_pow(q, 2 * rank - 1), false);
    std::vector<Zmod> units;
    for (u64 i = 0; i < q; ++i)
        if (ring.element(i).is_unit()) units.push_back(ring.element(i));
    std::vector<AffineTauClass> out;
    for (const auto& [P, PH] : pairs) {
        if (seen[pair_key(P, PH)]) continue;
        auto tau = construct_tau(P, PH);
        u64 orbit = 0;
        for (const auto& lam : units)
            for (u64 j = 0; j < q; ++j) {
                auto t = tau * lam + Matrix<Zmod>::scalar(rank, ring.element(j));
                auto k = pair_key(charpoly(t), charpoly(tau_sub_h(t)));
                if (!seen[k]) {
                    seen[k] = true;
                    ++orbit;
                }
            }
        out.push_back({{P, PH, std::move(tau)}, orbit});
    }
    return out;
}

std::vector<std::uint32_t> x_counts_by_coset(const LocalRing& ring, const Matrix<Zmod>& tau, u64 budget) {
    const std::size_t d = tau.dim();
    const u64 q = ring.size();
    const u64 keys = int_pow(q, 2 * d);
    if (keys > budget) throw BudgetExceeded("coset histogram exceeds budget");
    auto gt = centralizer_units(ring, tau, budget);
    auto hc = h_centralizer_units(ring, tau, budget);
    if (static_cast<double>(gt.size()) * static_cast<double>(hc.size()) > static_cast<double>(budget))
        throw BudgetExceeded("G_tau x H_{tau_H} exceeds budget");
    std::vector<Vec<Zmod>> b_rows, b_cols;
    for (const auto& b : gt) {
        b_rows.push_back(b.row(d - 1));
        b_cols.push_back(inverse(b).col(d - 1));
    }
    std::vector<std::uint32_t> counts(keys, 0);
    for (const auto& y : hc) {
        auto yinv = inverse(y);
        for (std::size_t i = 0; i < gt.size(); ++i) {
            // g = b y^{-1}: e* g = (e* b) y^{-1}, g^{-1} e = y (b^{-1} e)
            ++counts[hz_coset_key_rc(ring, row_times(b_rows[i], yinv), y * b_cols[i])];
        }
    }
    const u64 z = q - q / ring.p();
    for (auto& c : counts) {
        if (c % z) throw std::logic_error("coset histogram not divisible by |Z|");
        c /= static_cast<std::uint32_t>(z);
    }
    return counts;
}

namespace {

struct ClassResult {
    std::vector<u64> max_count;        // per ell
    std::vector<std::size_t> argmax;   // rep index per ell
    u64 nonempty = 0;
    u64 centralizer_size = 0;
    std::vector<std::uint32_t> per_rep;  // only when streaming
};

void absorb(VolumeSweepSummary& s, const VolumeReport& r) {
    if (r.ratio > s.c_emp || !s.worst) {
        if (r.ratio > s.c_emp) s.c_emp = r.ratio;
        if (!s.worst || r.ratio >= s.worst->ratio) s.worst = r;
    }
    if (r.d_h.ell < s.c_emp_by_ell.size() && r.ratio > s.c_emp_by_ell[r.d_h.ell]) s.c_emp_by_ell[r.d_h.ell] = r.ratio;
}

void note_centralizer(VolumeSweepSummary& s, const LocalRing& ring, std::size_t rank, u64 size) {
    const std::size_t n = rank - 1;
    if (!centralizer_lower_bound_holds(ring.p(), ring.m(), n, size)) s.centralizer_lower_bound_ok = false;
    Rational frac(BigInt(size), boost::multiprecision::pow(BigInt(ring.size()), static_cast<unsigned>(n)));
    if (frac < s.min_centralizer_fraction) s.min_centralizer_fraction = frac;
}

}  // namespace

VolumeSweepSummary volume_sweep_exhaustive(const LocalRing& ring, std::size_t rank, u64 budget, unsigned jobs,
                                           const VolumeSink& sink) {
    if (ring.p() == 2) throw CharacteristicTwo("the volume bound requires q odd");
    VolumeSweepSummary s;
    s.p = ring.p();
    s.m = ring.m();
    s.rank = rank;
    s.mode = "exhaustive";
    s.c_emp_by_ell.assign(ring.m(), Rational(0));
    auto classes = affine_tau_classes(ring, rank);
    s.tau_classes = classes.size();
    auto reps = hz_coset_representatives(ring, rank, budget);
    std::vector<u64> rep_key(reps.size());
    std::vector<DistanceValue> rep_dist(reps.size());
    std::unordered_map<u64, std::size_t> rep_of_key;
    for (std::size_t i = 0; i < reps.size(); ++i) {
        auto inv = inverse(reps[i]);
        rep_key[i] = hz_coset_key(ring, reps[i], inv);
        rep_dist[i] = distance_d_h(reps[i], inv);
        rep_of_key[rep_key[i]] = i;
    }
    auto I = Matrix<Zmod>::identity(rank, ring.zero());
    const u64 identity_key = hz_coset_key(ring, I, I);
    const bool streaming = static_cast<bool>(sink);

    auto results = parallel_map(classes.size(), jobs, [&](std::size_t t) {
        ClassResult cr;
        cr.max_count.assign(ring.m(), 0);
        cr.argmax.assign(ring.m(), reps.size());
        auto counts = x_counts_by_coset(ring, classes[t].cls.tau, budget);
        cr.centralizer_size = h_centralizer_units(ring, classes[t].cls.tau, budget).size();
        if (streaming) cr.per_rep.resize(reps.size());
        for (std::size_t i = 0; i < reps.size(); ++i) {
            if (rep_key[i] == identity_key) continue;
            const u64 c = counts[rep_key[i]];
            if (streaming) cr.per_rep[i] = static_cast<std::uint32_t>(c);
            if (c == 0) continue;
            ++cr.nonempty;
            const auto ell = rep_dist[i].ell;
            if (c > cr.max_count[ell] || cr.argmax[ell] == reps.size()) {
                cr.max_count[ell] = c;
                cr.argmax[ell] = i;
            }
        }
        return cr;
    });

    for (std::size_t t = 0; t < classes.size(); ++t) {
        const auto& cr = results[t];
        const auto& tau = classes[t].cls.tau;
        const u64 w = classes[t].orbit_size;
        s.instances += w * (reps.size() - 1);
        s.nonempty += w * cr.nonempty;
        note_centralizer(s, ring, rank, cr.centralizer_size);
        for (std::uint32_t ell = 0; ell < ring.m(); ++ell) {
            if (cr.argmax[ell] == reps.size()) continue;
            // Recompute the extremal instance directly as a cross-check.
            auto rep = verify_volume_bound(ring, tau, reps[cr.argmax[ell]]);
            if (rep.count != cr.max_count[ell]) throw std::logic_error("coset histogram disagrees with direct count");
            rep.regime = "exhaustive";
            absorb(s, rep);
        }
        if (streaming)
            for (std::size_t i = 0; i < reps.size(); ++i) {
                if (rep_key[i] == identity_key) continue;
                auto r = report_for(ring, tau, reps[i], cr.per_rep[i], cr.centralizer_size, rep_dist[i]);
                r.regime = "exhaustive";
                r.instance = t * reps.size() + i;
                sink(r);
            }
    }
    (void)rep_of_key;
    return s;
}

VolumeSweepSummary volume_sweep_seeded(const LocalRing& ring, std::size_t rank, u64 instances, u64 seed, u64 budget,
                                       unsigned jobs, const VolumeSink& sink) {
    if (ring.p() == 2) throw CharacteristicTwo("the volume bound requires q odd");
    VolumeSweepSummary s;
    s.p = ring.p();
    s.m = ring.m();
    s.rank = rank;
    s.mode = "seeded";
    s.seed = seed;
    s.c_emp_by_ell.assign(ring.m(), Rational(0));
    (void)budget;
    auto reports = parallel_map(instances, jobs, [&](std::size_t i) {
        Rng rng(instance_seed(seed, i));
        MonicPoly<Zmod> P, PH;
        do {
            P = random_monic(ring, rank, rng);
            PH = random_monic(ring, rank - 1, rng);
        } while (!monic_coprime(P, PH));
        auto tau = construct_tau(P, PH);
        static const char* kRegimes[] = {"uniform", "near_hz", "through_x"};
        int regime = static_cast<int>(i % 3);
        if (regime == 1 && ring.m() == 1) regime = 2;
        Matrix<Zmod> a;
        do {
            if (regime == 0) {
                a = random_invertible(ring, rank, rng);
            } else if (regime == 1) {
                auto h = embed_h(random_invertible(ring, rank - 1, rng));
                a = h * (Matrix<Zmod>::identity(rank, ring.zero()) + random_matrix(ring, rank, rng) * ring.uniformizer());
            } else {
                auto b = random_unit_of(ring, centralizer_basis(tau), rng);
                auto y = embed_h(random_unit_of(ring, centralizer_basis(tau_sub_h(tau)), rng));
                a = b * inverse(y);
            }
        } while (in_hz(a));
        auto r = verify_volume_bound(ring, tau, a);
        r.regime = kRegimes[regime];
        r.seed = seed;
        r.instance = i;
        return r;
    });
    std::set<std::pair<std::vector<u64>, std::vector<u64>>> taus;
    for (const auto& r : reports) {
        ++s.instances;
        s.nonempty += r.count > 0;
        note_centralizer(s, ring, rank, r.centralizer_size);
        std::vector<u64> pk, phk;
        for (const auto& c : r.P.coeffs()) pk.push_back(c.value());
        for (const auto& c : r.P_H.coeffs()) phk.push_back(c.value());
        taus.insert({pk, phk});
        absorb(s, r);
        if (sink) sink(r);
    }
    s.tau_classes = taus.size();
    return s;
}

// --- Central square lemma ------------------------------------------------------

CentralSquareCheck central_square_lemma(const Matrix<Zmod>& a) {
    if (a(0, 0).p() == 2) throw CharacteristicTwo("the lemma requires q odd");
    CentralSquareCheck c;
    c.residue_central = is_scalar_matrix(a.map([](const Zmod& x) { return truncate(x, 1); }));
    c.square_central = is_scalar_matrix(a * a);
    c.central = is_scalar_matrix(a);
    return c;
}

CentralSquareSweep central_square_sweep(const LocalRing& ring, std::size_t rank, u64 budget) {
    const std::uint32_t p = ring.p(), m = ring.m();
    const std::size_t cells = rank * rank;
    const u64 lifts = int_pow(int_pow(p, m - 1), cells);
    if (lifts > budget / (p - 1)) throw BudgetExceeded("central square sweep exceeds budget");
    const u64 q_low = int_pow(p, m - 1);
    CentralSquareSweep s;
    for (u64 c = 1; c < p; ++c)
        for (u64 idx = 0; idx < lifts; ++idx) {
            auto a = Matrix<Zmod>::scalar(rank, ring.element(c));
            u64 r = idx;
            for (std::size_t k = 0; k < cells; ++k) {
                a(k / rank, k % rank) += ring.element((r % q_low) * p);
                r /= q_low;
            }
            auto chk = central_square_lemma(a);
            ++s.checked;
            s.hypotheses_met += chk.hypotheses();
            s.violations += !chk.holds();
        }
    return s;
}

// --- Polynomial congruences ------------------------------------------------------

void MultiPoly::add_term(std::vector<std::uint8_t> exps, const Zmod& c) {
    if (exps.size() != n_) throw PreconditionFailed("monomial arity mismatch");
    if (c.is_zero()) return;
    for (auto& t : terms_)
        if (t.exps == exps) {
            t.coeff += c;
            return;
        }
    terms_.push_back({std::move(exps), c});
}

Zmod MultiPoly::eval(const Vec<Zmod>& x) const {
    Zmod acc = ring_.zero();
    for (const auto& t : terms_) {
        Zmod v = t.coeff;
        for (std::size_t i = 0; i < n_; ++i)
            for (std::uint8_t e = 0; e < t.exps[i]; ++e) v *= x[i];
        acc += v;
    }
    return acc;
}

Zmod MultiPoly::taylor_coefficient(const Vec<Zmod>& y, const std::vector<std::uint8_t>& k) const {
    auto binom = [](u64 n, u64 r) {
        u64 b = 1;
        for (u64 i = 0; i < r; ++i) b = b * (n - i) / (i + 1);
        return b;
    };
    Zmod acc = ring_.zero();
    for (const auto& t : terms_) {
        Zmod v = t.coeff;
        bool zero = false;
        for (std::size_t i = 0; i < n_ && !zero; ++i) {
            if (k[i] > t.exps[i]) {
                zero = true;
                break;
            }
            v *= ring_.from_int(static_cast<i64>(binom(t.exps[i], k[i])));
            for (std::uint8_t e = 0; e < t.exps[i] - k[i]; ++e) v *= y[i];
        }
        if (!zero) acc += v;
    }
    return acc;
}

std::size_t MultiPoly::degree() const {
    std::size_t d = 0;
    for (const auto& t : terms_)
        if (!t.coeff.is_zero()) {
            std::size_t s = 0;
            for (auto e : t.exps) s += e;
            d = std::max(d, s);
        }
    return d;
}

std::string MultiPoly::to_string() const {
    std::string s;
    for (const auto& t : terms_) {
        if (t.coeff.is_zero()) continue;
        if (!s.empty()) s += " + ";
        s += t.coeff.to_string();
        for (std::size_t i = 0; i < n_; ++i)
            if (t.exps[i]) s += "*X" + std::to_string(i + 1) + (t.exps[i] > 1 ? "^" + std::to_string(t.exps[i]) : "");
    }
    return s.empty() ? "0" : s;
}

u64 congruence_count(const MultiPoly& P, u64 budget) {
    const auto& ring = P.ring();
    const u64 q = ring.size(), mod = ring.modulus();
    const std::size_t n = P.nvars();
    u64 total = 1;
    for (std::size_t i = 0; i < n; ++i) {
        if (total > budget / q) throw BudgetExceeded("congruence enumeration exceeds budget");
        total *= q;
    }
    if (n == 0) return P.terms().empty() || P.eval({}).is_zero();
    std::size_t deg1 = 0;
    for (const auto& t : P.terms()) deg1 = std::max<std::size_t>(deg1, t.exps[0]);
    auto mulmod = [mod](u64 a, u64 b) { return static_cast<u64>(static_cast<u128>(a) * b % mod); };
    // For each tail (x_2..x_n), collapse to a univariate polynomial in x_1.
    const u64 tails = total / q;
    std::vector<u64> tail(n, 0), coeff(deg1 + 1);
    u64 count = 0;
    for (u64 ti = 0; ti < tails; ++ti) {
        u64 r = ti;
        for (std::size_t i = 1; i < n; ++i) {
            tail[i] = r % q;
            r /= q;
        }
        std::fill(coeff.begin(), coeff.end(), 0);
        for (const auto& t : P.terms()) {
            u64 v = t.coeff.value();
            for (std::size_t i = 1; i < n; ++i)
                for (std::uint8_t e = 0; e < t.exps[i]; ++e) v = mulmod(v, tail[i]);
            coeff[t.exps[0]] = (coeff[t.exps[0]] + v) % mod;
        }
        for (u64 x = 0; x < q; ++x) {
            u64 acc = 0;
            for (std::size_t k = deg1 + 1; k-- > 0;) acc = (mulmod(acc, x) + coeff[k]) % mod;
            count += acc == 0;
        }
    }
    return count;
}

const char* regime_name(CongruenceRegime r) {
    return r == CongruenceRegime::UnitLinear ? "unit_linear" : "unit_quadratic";
}

namespace {

// All exponent vectors over `n` variables of total degree <= d, with the
// variables before `first` forced to exponent 0.
std::vector<std::vector<std::uint8_t>> monomials(std::size_t n, std::size_t d, std::size_t first) {
    std::vector<std::vector<std::uint8_t>> out;
    std::vector<std::uint8_t> e(n, 0);
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t i, std::size_t left) {
        if (i == n) {
            out.push_back(e);
            return;
        }
        if (i < first) {
            rec(i + 1, left);
            return;
        }
        for (std::size_t k = 0; k <= left; ++k) {
            e[i] = static_cast<std::uint8_t>(k);
            rec(i + 1, left - k);
        }
        e[i] = 0;
    };
    rec(0, d);
    return out;
}

}  // namespace

MultiPoly random_regime_polynomial(const LocalRing& ring, std::size_t nvars, std::size_t degree,
                                   CongruenceRegime regime, Rng& rng) {
    if (nvars == 0) throw PreconditionFailed("need at least one variable");
    if (regime == CongruenceRegime::UnitQuadratic && degree < 2) throw PreconditionFailed("quadratic regime needs degree >= 2");
    MultiPoly P(ring, nvars);
    Zmod u;
    do u = random_element(ring, rng);
    while (!u.is_unit());
    std::vector<std::uint8_t> lead(nvars, 0);
    lead[0] = regime == CongruenceRegime::UnitLinear ? 1 : 2;
    P.add_term(lead, u);
    for (const auto& e : monomials(nvars, degree, 1))
        if (uniform_below(rng, 2)) P.add_term(e, random_element(ring, rng));
    if (ring.m() > 1)
        for (const auto& e : monomials(nvars, degree, 0))
            if (uniform_below(rng, 2)) P.add_term(e, random_element(ring, rng) * ring.uniformizer());
    return P;
}

bool regime_hypothesis_holds(const MultiPoly& P, CongruenceRegime regime) {
    const auto& ring = P.ring();
    const std::size_t n = P.nvars();
    const std::size_t max_order = regime == CongruenceRegime::UnitLinear ? 1 : 2;
    std::vector<std::vector<std::uint8_t>> ks;
    for (auto& k : monomials(n, max_order, 0)) {
        std::size_t s = 0;
        for (auto e : k) s += e;
        if (s >= 1) ks.push_back(k);
    }
    const u64 p = ring.p();
    const u64 total = int_pow(p, n);
    Vec<Zmod> y(n, ring.zero());
    for (u64 idx = 0; idx < total; ++idx) {
        u64 r = idx;
        for (std::size_t i = 0; i < n; ++i) {
            y[i] = ring.element(r % p);
            r /= p;
        }
        bool ok = false;
        for (const auto& k : ks)
            if (P.taylor_coefficient(y, k).is_unit()) {
                ok = true;
                break;
            }
        if (!ok) return false;
    }
    return true;
}

u64 congruence_scale(u64 q, std::uint32_t m, std::size_t n, CongruenceRegime regime) {
    const u64 drop = regime == CongruenceRegime::UnitLinear ? m : (m + 1) / 2;
    return int_pow(q, m * n - drop);
}

u64 calibrated_constant(std::size_t degree, std::uint32_t m, CongruenceRegime regime) {
    return regime == CongruenceRegime::UnitLinear ? degree : int_pow(degree, (m + 1) / 2);
}

CongruenceCheck congruence_check(const MultiPoly& P, CongruenceRegime regime, u64 budget) {
    const auto& ring = P.ring();
    CongruenceCheck c;
    c.count = congruence_count(P, budget);
    c.scale = congruence_scale(ring.p(), ring.m(), P.nvars(), regime);
    c.calibrated = calibrated_constant(P.degree(), ring.m(), regime);
    c.constant = Rational(c.count) / Rational(c.scale);
    c.hypothesis = regime_hypothesis_holds(P, regime);
    return c;
}

CongruenceSweep congruence_sweep(const std::vector<std::uint32_t>& primes, std::uint32_t max_m, std::size_t max_n,
                                 std::size_t per_cell, u64 seed, u64 budget) {
    CongruenceSweep s;
    s.anchors_exact = true;
    Rng rng(seed);
    for (auto p : primes)
        for (std::uint32_t m = 1; m <= max_m; ++m)
            for (std::size_t n = 1; n <= max_n; ++n) {
                LocalRing R(p, m);
                if (int_pow(R.size(), n) > budget) continue;
                // Anchors: P = X_1 (Hensel-exact) and P = X_1^2 at m = 2.
                MultiPoly lin(R, n), sq(R, n);
                std::vector<std::uint8_t> e(n, 0);
                e[0] = 1;
                lin.add_term(e, R.one());
                e[0] = 2;
                sq.add_term(e, R.one());
                if (congruence_count(lin, budget) != congruence_scale(p, m, n, CongruenceRegime::UnitLinear))
                    s.anchors_exact = false;
                if (m == 2 && congruence_count(sq, budget) != congruence_scale(p, m, n, CongruenceRegime::UnitQuadratic))
                    s.anchors_exact = false;
                for (int ri = 0; ri < 2; ++ri) {
                    auto regime = static_cast<CongruenceRegime>(ri);
                    for (std::size_t k = 0; k < per_cell; ++k) {
                        std::size_t deg = 2 + uniform_below(rng, 2);
                        auto P = random_regime_polynomial(R, n, deg, regime, rng);
                        auto c = congruence_check(P, regime, budget);
                        ++s.polynomials[ri];
                        if (c.constant > s.max_constant[ri]) s.max_constant[ri] = c.constant;
                        s.failures[ri] += !c.within();
                    }
                }
                if (m == 1)
                    for (std::size_t k = 0; k < per_cell; ++k) {
                        MultiPoly P(R, n);
                        for (const auto& mono : monomials(n, 1 + uniform_below(rng, 3), 0))
                            if (uniform_below(rng, 2)) P.add_term(mono, random_element(R, rng));
                        if (P.terms().empty()) P.add_term(std::vector<std::uint8_t>(n, 0), R.one());
                        ++s.hypersurface_checked;
                        if (congruence_count(P, budget) > P.degree() * int_pow(p, n - 1) &&
                            !(P.degree() == 0 && congruence_count(P, budget) == 0))
                            ++s.hypersurface_failures;
                    }
            }
    return s;
}

// --- Bilinear forms ---------------------------------------------------------

HGroup::HGroup(const LocalRing& ring, std::size_t rank, u64 budget) : ring_(ring) {
    for (const auto& g : general_linear(ring, rank - 1, budget)) {
        index_[matrix_key(ring, embed_h(g))] = elems_.size();
        elems_.push_back(embed_h(g));
    }
}

std::size_t HGroup::index_of(const Matrix<Zmod>& h) const {
    auto it = index_.find(matrix_key(ring_, h));
    if (it == index_.end()) throw PreconditionFailed("matrix is not in H");
    return it->second;
}

std::vector<u64> random_invariant_function(const HGroup& H, const Matrix<Zmod>& tau, u64 max_value, Rng& rng) {
    auto hc = h_centralizer_units(H.ring(), tau, kDefaultBudget);
    std::vector<u64> u(H.size(), 0);
    std::vector<bool> done(H.size(), false);
    for (std::size_t i = 0; i < H.size(); ++i) {
        if (done[i]) continue;
        const u64 v = uniform_below(rng, max_value + 1);
        for (const auto& y : hc) {
            auto j = H.index_of(H.elements()[i] * y);
            u[j] = v;
            done[j] = true;
        }
    }
    return u;
}

bool is_right_invariant(const HGroup& H, const Matrix<Zmod>& tau, const std::vector<u64>& u) {
    auto hc = h_centralizer_units(H.ring(), tau, kDefaultBudget);
    for (std::size_t i = 0; i < H.size(); ++i)
        for (const auto& y : hc)
            if (u[H.index_of(H.elements()[i] * y)] != u[i]) return false;
    return true;
}

namespace {

Rational norm_sq(const std::vector<u64>& u) {
    BigInt s = 0;
    for (auto v : u) s += BigInt(v) * v;
    return Rational(s, BigInt(u.size()));
}

}  // namespace

BilinearResult bilinear_form_check(const HGroup& H, const Matrix<Zmod>& tau, const Matrix<Zmod>& gamma,
                                   const std::vector<u64>& u1, const std::vector<u64>& u2, const Rational& C) {
    StableTau<Zmod> st(tau);
    const auto ginv = inverse(gamma);
    BigInt S = 0;
    for (std::size_t i = 0; i < H.size(); ++i) {
        // x^{-1} gamma y = b in G_tau  <=>  gamma^{-1} x = y b^{-1}; y is unique since H n G_tau = 1.
        auto g = ginv * H.elements()[i];
        if (!st.in_h_gtau(g)) continue;
        auto y = st.decompose(g).first;
        S += BigInt(u1[i]) * u2[H.index_of(y)];
    }
    BilinearResult r;
    const BigInt h = H.size();
    r.I = Rational(S, h * h);
    r.norm1_sq = norm_sq(u1);
    r.norm2_sq = norm_sq(u2);
    r.trivial_factor = Rational(BigInt(1), h);
    const Rational rhs = r.trivial_factor * r.trivial_factor * r.norm1_sq * r.norm2_sq;
    r.trivial_ok = r.I * r.I <= rhs;
    r.trivial_saturated = r.I * r.I == rhs;
    r.d_h = distance_d_h(gamma, ginv);
    if (!in_hz(gamma)) {
        r.refined_factor = C * volume_shape(H.ring().p(), H.ring().m(), r.d_h) / Rational(h);
        r.refined_ok = r.I * r.I <= *r.refined_factor * *r.refined_factor * r.norm1_sq * r.norm2_sq;
    }
    return r;
}

Rational bilinear_form_direct(const HGroup& H, const Matrix<Zmod>& tau, const Matrix<Zmod>& gamma,
                              const std::vector<u64>& u1, const std::vector<u64>& u2) {
    BigInt S = 0;
    for (std::size_t i = 0; i < H.size(); ++i) {
        auto xg = inverse(H.elements()[i]) * gamma;
        for (std::size_t j = 0; j < H.size(); ++j)
            if (commutes(xg * H.elements()[j], tau)) S += BigInt(u1[i]) * u2[j];
    }
    const BigInt h = H.size();
    return Rational(S, h * h);
}

BilinearSweep bilinear_sweep(const HGroup& H, const Matrix<Zmod>& tau, const std::vector<u64>& u1,
                             const std::vector<u64>& u2, const Rational& C, u64 budget) {
    BilinearSweep s;
    const auto& ring = H.ring();
    const std::size_t d = tau.dim();
    std::vector<u64> ones(H.size(), 1);
    auto id = bilinear_form_check(H, tau, Matrix<Zmod>::identity(d, ring.zero()), ones, ones, C);
    s.identity_saturates = id.trivial_saturated && id.I == Rational(BigInt(1), BigInt(H.size()));
    for (const auto& gamma : general_linear(ring, d, budget)) {
        auto r = bilinear_form_check(H, tau, gamma, u1, u2, C);
        ++s.gammas;
        s.trivial_failures += !r.trivial_ok;
        if (r.refined_factor) {
            ++s.refined_checked;
            s.refined_failures += !r.refined_ok;
            const Rational den = *r.refined_factor * *r.refined_factor * r.norm1_sq * r.norm2_sq;
            if (den > 0) {
                Rational q = r.I * r.I / den;
                if (q > s.worst_refined_ratio_sq) s.worst_refined_ratio_sq = q;
            }
        }
    }
    return s;
}

}  // namespace ggp
