// Command-line driver: verification sweeps, searches and witnesses, emitted
// as JSON lines (default) or CSV.  Exit status: 0 success, 1 some check
// failed, 2 usage or configuration error.

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "ggp/exponents.hpp"
#include "ggp/microlocal.hpp"
#include "ggp/witnesses.hpp"

using namespace ggp;
using json = nlohmann::ordered_json;

namespace {

// --- Configuration ----------------------------------------------------------------

struct Config {
    std::string command;
    std::uint32_t p = 3, m = 1;
    std::size_t rank = 3;
    u64 seed = 0;
    unsigned jobs = 1;
    std::optional<u64> budget_flag;
    u64 budget = kDefaultBudget;
    std::string format = "json";
    std::string output;
    std::string mode = "exhaustive";
    u64 instances = 500;
    bool summary_only = false;
    // Per-command inputs.
    std::string tau, a, P, PH, xi, fields = "F2,F4", n_range = "2", thetas = "0", epsilon = "0", C = "8/7";
    std::uint32_t alpha = 6;
    u64 taus = 1, max_value = 3, max_records = 0;
    int exp_range = 1;
    bool no_oracle = false;
    std::string a_mode = "cosets";
};

u64 parse_u64(const std::string& s, const char* what) {
    try {
        std::size_t used = 0;
        u64 v = std::stoull(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigInvalid(std::string(what) + ": not a nonnegative integer: '" + s + "'");
    }
}

// --budget wins, then GGP_BUDGET, then the library default.
void resolve_budget(Config& cfg) {
    if (cfg.budget_flag) {
        cfg.budget = *cfg.budget_flag;
    } else if (const char* env = std::getenv("GGP_BUDGET"); env && *env) {
        cfg.budget = parse_u64(env, "GGP_BUDGET");
    }
    if (cfg.budget == 0) throw ConfigInvalid("budget must be positive");
}

void validate_common(const Config& cfg) {
    if (cfg.rank < 2 || cfg.rank > kMaxDim) throw ConfigInvalid("rank must lie in [2, " + std::to_string(kMaxDim) + "]");
    if (cfg.jobs == 0) throw ConfigInvalid("jobs must be >= 1");
    if (cfg.mode != "exhaustive" && cfg.mode != "seeded") throw ConfigInvalid("mode must be exhaustive or seeded");
    if (cfg.mode == "seeded" && cfg.instances == 0) throw ConfigInvalid("instances must be >= 1");
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, sep);)
        if (!item.empty()) out.push_back(item);
    return out;
}

std::vector<i64> parse_int_list(const std::string& s, const char* what) {
    std::vector<i64> out;
    for (const auto& t : split(s, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stoll(t, &used));
            if (used != t.size()) throw std::invalid_argument(t);
        } catch (const std::exception&) {
            throw ConfigInvalid(std::string(what) + ": not an integer list: '" + s + "'");
        }
    }
    return out;
}

// "2", "1-10" or "1,2,5".
std::vector<unsigned> parse_range(const std::string& s) {
    std::vector<unsigned> out;
    for (const auto& t : split(s, ',')) {
        auto dash = t.find('-');
        if (dash == std::string::npos) {
            out.push_back(static_cast<unsigned>(parse_u64(t, "n")));
            continue;
        }
        auto lo = parse_u64(t.substr(0, dash), "n"), hi = parse_u64(t.substr(dash + 1), "n");
        if (lo > hi || hi > 1000) throw ConfigInvalid("bad range '" + t + "'");
        for (auto v = lo; v <= hi; ++v) out.push_back(static_cast<unsigned>(v));
    }
    if (out.empty()) throw ConfigInvalid("empty range");
    return out;
}

// A matrix as a JSON array of rows, or a flat row-major array.
Matrix<Zmod> parse_matrix(const LocalRing& ring, const std::string& text, const char* what) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception&) {
        throw ConfigInvalid(std::string(what) + ": not a JSON array");
    }
    if (!j.is_array() || j.empty()) throw ConfigInvalid(std::string(what) + ": expected a nonempty array");
    std::vector<i64> flat;
    try {
        if (j.front().is_array()) {
            for (const auto& row : j) {
                if (row.size() != j.size()) throw ConfigInvalid(std::string(what) + ": matrix is not square");
                for (const auto& x : row) flat.push_back(x.get<i64>());
            }
        } else {
            for (const auto& x : j) flat.push_back(x.get<i64>());
        }
    } catch (const json::exception&) {
        throw ConfigInvalid(std::string(what) + ": entries must be integers");
    }
    std::size_t d = 0;
    while (d * d < flat.size()) ++d;
    if (d * d != flat.size() || d < 1 || d > kMaxDim) throw ConfigInvalid(std::string(what) + ": bad entry count");
    Vec<Zmod> entries;
    for (auto v : flat) entries.push_back(ring.from_int(v));
    return Matrix<Zmod>::from_rows(d, entries);
}

MonicPoly<Zmod> parse_poly(const LocalRing& ring, const std::string& s, const char* what) {
    Vec<Zmod> lower;
    for (auto v : parse_int_list(s, what)) lower.push_back(ring.from_int(v));
    return MonicPoly<Zmod>::from_lower(lower, ring.one());
}

// --- Serialization ------------------------------------------------------------------

// Ring elements as integers: residues for Z/p^m, c0 + p c1 for F_{p^2}.
u64 elem_int(const Zmod& x) { return x.value(); }
u64 elem_int(const Fq2& x) { return x.c0() + u64{x.p()} * x.c1(); }

template <Scalar T>
json to_json(const Matrix<T>& M) {
    json rows = json::array();
    for (std::size_t i = 0; i < M.dim(); ++i) {
        json r = json::array();
        for (std::size_t j = 0; j < M.dim(); ++j) r.push_back(elem_int(M(i, j)));
        rows.push_back(std::move(r));
    }
    return rows;
}

template <Scalar T>
json to_json(const MonicPoly<T>& P) {
    json c = json::array();
    for (const auto& x : P.coeffs()) c.push_back(elem_int(x));
    return c;
}

std::string rat(const Rational& r) { return rational_to_string(r); }

json to_json(const VolumeReport& r) {
    return {{"p", r.p},
            {"m", r.m},
            {"rank", r.rank},
            {"P", to_json(r.P)},
            {"P_H", to_json(r.P_H)},
            {"a", to_json(r.a)},
            {"count", r.count},
            {"centralizer_size", r.centralizer_size},
            {"d_h_ell", r.d_h.ell},
            {"bound", rat(r.bound)},
            {"ratio", rat(r.ratio)},
            {"degenerate", r.degenerate},
            {"regime", r.regime},
            {"seed", r.seed},
            {"instance", r.instance}};
}

std::string timestamp() {
    auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

// Streams records in the order given (every producer below is already
// instance-ordered), then the summary.  The header line carries the only
// nondeterministic field, the timestamp.
class Emitter {
public:
    Emitter(const Config& cfg) : csv_(cfg.format == "csv"), seed_(cfg.seed) {
        if (!cfg.output.empty()) {
            file_.open(cfg.output);
            if (!file_) throw ConfigInvalid("cannot open output file '" + cfg.output + "'");
            out_ = &file_;
        }
    }

    void header(json h) {
        json line = {{"type", "header"}, {"timestamp", timestamp()}};
        line.update(h);
        if (csv_)
            *out_ << "# " << line.dump() << '\n';
        else
            *out_ << line.dump() << '\n';
    }

    void record(json r) {
        json line = {{"type", "record"}};
        line.update(r);
        line["seed"] = seed_;
        write(line, columns_);
    }

    void summary(json s) {
        json line = {{"type", "summary"}};
        line.update(s);
        line["seed"] = seed_;
        if (csv_) {
            std::vector<std::string> cols;
            write(line, cols);
        } else {
            write(line, columns_);
        }
        out_->flush();
    }

private:
    static std::string csv_cell(const json& v) {
        std::string s = v.is_string() ? v.get<std::string>() : v.dump();
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string q = "\"";
        for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
        return q + "\"";
    }

    void write(const json& line, std::vector<std::string>& cols) {
        if (!csv_) {
            *out_ << line.dump() << '\n';
            return;
        }
        if (cols.empty()) {
            for (const auto& [k, v] : line.items()) cols.push_back(k);
            for (std::size_t i = 0; i < cols.size(); ++i) *out_ << (i ? "," : "") << cols[i];
            *out_ << '\n';
        }
        for (std::size_t i = 0; i < cols.size(); ++i) {
            if (i) *out_ << ',';
            if (line.contains(cols[i])) *out_ << csv_cell(line[cols[i]]);
        }
        *out_ << '\n';
    }

    bool csv_;
    u64 seed_;
    std::ofstream file_;
    std::ostream* out_ = &std::cout;
    std::vector<std::string> columns_;
};

json ring_header(const Config& cfg) {
    return {{"command", cfg.command}, {"p", cfg.p}, {"m", cfg.m}, {"rank", cfg.rank}, {"seed", cfg.seed},
            {"budget", cfg.budget}, {"jobs", cfg.jobs}};
}

int status(u64 failures) { return failures == 0 ? 0 : 1; }

// --- stability / xscheme / volume verify ---------------------------------------------------

int cmd_stability_check(const Config& cfg) {
    LocalRing ring(cfg.p, cfg.m);
    Emitter out(cfg);
    out.header(ring_header(cfg));
    Matrix<Zmod> tau;
    if (!cfg.tau.empty()) {
        tau = parse_matrix(ring, cfg.tau, "--tau");
    } else if (!cfg.P.empty() && !cfg.PH.empty()) {
        auto P = parse_poly(ring, cfg.P, "--P"), PH = parse_poly(ring, cfg.PH, "--PH");
        if (P.degree() != PH.degree() + 1) throw ConfigInvalid("deg P must equal deg P_H + 1");
        if (!monic_coprime(P, PH)) {
            out.record({{"instance", 0}, {"P", to_json(P)}, {"P_H", to_json(PH)}, {"coprime", false}, {"stable", false}});
            out.summary({{"stable", false}, {"failures", 0}});
            return 0;
        }
        tau = construct_tau(P, PH);
    } else {
        throw ConfigInvalid("give --tau, or --P and --PH");
    }
    if (tau.dim() < 2) throw ConfigInvalid("tau must be at least 2x2");
    auto [dr, dc] = stability_determinants(tau);
    const bool stable = (dr * dc).is_unit();
    auto P = charpoly(tau), PH = charpoly(tau_sub_h(tau));
    const bool coprime = monic_coprime(P, PH);
    const bool consistent = stable == coprime && stable == (dr.is_unit() && dc.is_unit());
    out.record({{"instance", 0},
                {"tau", to_json(tau)},
                {"delta", elem_int(dr * dc)},
                {"det_rows", elem_int(dr)},
                {"det_columns", elem_int(dc)},
                {"stable", stable},
                {"P", to_json(P)},
                {"P_H", to_json(PH)},
                {"coprime", coprime},
                {"cyclic", is_cyclic(tau)},
                {"consistent", consistent}});
    out.summary({{"stable", stable}, {"failures", consistent ? 0 : 1}});
    return status(!consistent);
}

std::pair<Matrix<Zmod>, Matrix<Zmod>> tau_and_a(const Config& cfg, const LocalRing& ring) {
    if (cfg.tau.empty() || cfg.a.empty()) throw ConfigInvalid("give --tau and --a");
    auto tau = parse_matrix(ring, cfg.tau, "--tau");
    auto a = parse_matrix(ring, cfg.a, "--a");
    if (tau.dim() != a.dim()) throw ConfigInvalid("--tau and --a differ in size");
    if (!is_stable(tau)) throw ConfigInvalid("tau is not stable");
    if (!is_invertible(a)) throw ConfigInvalid("a is not invertible");
    return {tau, a};
}

int cmd_xscheme_enumerate(const Config& cfg) {
    LocalRing ring(cfg.p, cfg.m);
    auto [tau, a] = tau_and_a(cfg, ring);
    Emitter out(cfg);
    out.header(ring_header(cfg));
    XScheme<Zmod> X(tau, a);
    auto hunits = h_centralizer_units(ring, tau, cfg.budget);
    u64 points = 0;
    for (const auto& y : hunits)
        if (X.contains(y)) out.record({{"instance", points++}, {"y", to_json(y)}});
    out.summary({{"x_points", points},
                 {"centralizer_size", hunits.size()},
                 {"x_is_everything", points == hunits.size()},
                 {"a_in_hz", in_hz(a)},
                 {"failures", 0}});
    return 0;
}

int cmd_xscheme_tangency(const Config& cfg) {
    LocalRing ring(cfg.p, cfg.m);
    auto [tau, a] = tau_and_a(cfg, ring);
    Emitter out(cfg);
    out.header(ring_header(cfg));
    XScheme<Zmod> X(tau, a);
    u64 points = 0, tangential = 0, doubly = 0, failures = 0;
    const bool odd = ring.p() != 2;
    for (const auto& y : h_centralizer_units(ring, tau, cfg.budget)) {
        if (!X.contains(y)) continue;
        auto rep = X.tangency(y, true);
        const bool replay_ok = X.replay(y, rep);
        auto b = X.tau_data().decompose(a * y).second;
        const bool b_sq = is_scalar_matrix(b * b);
        const bool matches = rep.tangential == b_sq;
        failures += !replay_ok + (odd && !matches);
        tangential += rep.tangential;
        doubly += rep.doubly_tangential;
        json r = {{"instance", points++},
                  {"y", to_json(y)},
                  {"tangential", rep.tangential},
                  {"doubly_tangential", rep.doubly_tangential},
                  {"failing_direction", rep.failing_direction ? json(*rep.failing_direction) : json(nullptr)},
                  {"failing_pair", rep.failing_pair ? json::array({rep.failing_pair->first, rep.failing_pair->second})
                                                    : json(nullptr)},
                  {"b_square_central", b_sq},
                  {"replay_ok", replay_ok}};
        out.record(std::move(r));
    }
    const bool outside = !in_hz(a);
    const bool applies = odd && tau.dim() >= 3 && outside;
    const bool transversal = !applies || doubly == 0;
    failures += !transversal;
    out.summary({{"x_points", points},
                 {"tangential_points", tangential},
                 {"doubly_tangential_points", doubly},
                 {"a_in_hz", !outside},
                 {"transversality_applies", applies},
                 {"transversal", transversal},
                 {"failures", failures}});
    return status(failures);
}

int cmd_volume_verify(const Config& cfg) {
    LocalRing ring(cfg.p, cfg.m);
    auto [tau, a] = tau_and_a(cfg, ring);
    Emitter out(cfg);
    out.header(ring_header(cfg));
    auto r = verify_volume_bound(ring, tau, a);
    r.seed = cfg.seed;
    out.record(to_json(r));
    const bool lower = centralizer_lower_bound_holds(ring.p(), ring.m(), tau.dim() - 1, r.centralizer_size);
    out.summary({{"ratio", rat(r.ratio)}, {"centralizer_lower_bound_ok", lower}, {"failures", lower ? 0 : 1}});
    return status(!lower);
}

// --- volume sweep / bilinear ------------------------------------------------------------

int cmd_volume_sweep(const Config& cfg) {
    LocalRing ring(cfg.p, cfg.m);
    Emitter out(cfg);
    json h = ring_header(cfg);
    h["mode"] = cfg.mode;
    if (cfg.mode == "seeded") h["instances"] = cfg.instances;
    out.header(h);
    VolumeSink sink;
    if (!cfg.summary_only) sink = [&](const VolumeReport& r) { out.record(to_json(r)); };
    auto s = cfg.mode == "exhaustive" ? volume_sweep_exhaustive(ring, cfg.rank, cfg.budget, cfg.jobs, sink)
                                      : volume_sweep_seeded(ring, cfg.rank, cfg.instances, cfg.seed, cfg.budget, cfg.jobs, sink);
    json by_ell = json::array();
    for (const auto& c : s.c_emp_by_ell) by_ell.push_back(rat(c));
    const u64 failures = s.centralizer_lower_bound_ok ? 0 : 1;
    out.summary({{"mode", s.mode},
                 {"tau_classes", s.tau_classes},
                 {"instances", s.instances},
                 {"nonempty", s.nonempty},
                 {"c_emp", rat(s.c_emp)},
                 {"c_emp_by_ell", by_ell},
                 {"worst", s.worst ? to_json(*s.worst) : json(nullptr)},
                 {"centralizer_lower_bound_ok", s.centralizer_lower_bound_ok},
                 {"min_centralizer_fraction", rat(s.min_centralizer_fraction)},
                 {"failures", failures}});
    return status(failures);
}

int cmd_bilinear_check(const Config& cfg) {
    LocalRing ring(cfg.p, cfg.m);
    const Rational C = parse_rational(cfg.C);
    if (C <= 0) throw ConfigInvalid("--C must be positive");
    if (cfg.taus == 0) throw ConfigInvalid("--taus must be >= 1");
    Emitter out(cfg);
    json h = ring_header(cfg);
    h["C"] = rat(C);
    out.header(h);
    HGroup H(ring, cfg.rank, cfg.budget);
    std::vector<u64> ones(H.size(), 1);
    u64 failures = 0, gammas = 0;
    for (u64 t = 0; t < cfg.taus; ++t) {
        Rng rng(instance_seed(cfg.seed, t));
        auto tau = random_stable_tau(ring, cfg.rank, rng);
        auto u1 = random_invariant_function(H, tau, cfg.max_value, rng);
        auto u2 = random_invariant_function(H, tau, cfg.max_value, rng);
        auto I = Matrix<Zmod>::identity(cfg.rank, ring.zero());
        auto one = bilinear_form_check(H, tau, I, ones, ones, C);
        const bool saturates = one.I == Rational(1, H.size());
        auto s = bilinear_sweep(H, tau, u1, u2, C, cfg.budget);
        const u64 f = s.trivial_failures + s.refined_failures + !saturates;
        failures += f;
        gammas += s.gammas;
        out.record({{"instance", t},
                    {"tau", to_json(tau)},
                    {"h_order", H.size()},
                    {"identity_constant_I", rat(one.I)},
                    {"identity_saturates", saturates},
                    {"gammas", s.gammas},
                    {"refined_checked", s.refined_checked},
                    {"trivial_failures", s.trivial_failures},
                    {"refined_failures", s.refined_failures},
                    {"worst_refined_ratio_sq", rat(s.worst_refined_ratio_sq)},
                    {"failures", f}});
    }
    out.summary({{"taus", cfg.taus}, {"gammas", gammas}, {"C", rat(C)}, {"failures", failures}});
    return status(failures);
}

// --- search / witnesses -------------------------------------------------------------------

template <FiniteRing R>
void search_field(const R& ring, const std::string& name, const Config& cfg, Emitter& out, u64& emitted, json& per_field,
                  u64& failures) {
    auto hits = search_counterexamples(ring, cfg.rank, cfg.budget, cfg.jobs);
    auto replays = parallel_map(hits.size(), cfg.jobs, [&](std::size_t i) { return replay_counterexample(ring, hits[i], cfg.budget); });
    u64 replay_failures = 0, full = 0;
    for (std::size_t i = 0; i < hits.size(); ++i) {
        const auto& c = hits[i];
        replay_failures += !replays[i];
        full += c.x_is_everything;
        if (cfg.max_records && emitted >= cfg.max_records) continue;
        out.record({{"instance", emitted++},
                    {"field", name},
                    {"tau", to_json(c.tau)},
                    {"P", to_json(c.P)},
                    {"P_H", to_json(c.P_H)},
                    {"a", to_json(c.a)},
                    {"x_points", c.x_points},
                    {"centralizer_size", c.centralizer_size},
                    {"x_is_everything", c.x_is_everything},
                    {"replay_ok", static_cast<bool>(replays[i])}});
    }
    // For odd q and rank >= 3 every hit contradicts the transversality theorem.
    const u64 odd_hits = ring.p() != 2 && cfg.rank >= 3 ? hits.size() : 0;
    failures += replay_failures + odd_hits;
    per_field[name] = {{"hits", hits.size()}, {"x_is_everything", full}, {"replay_failures", replay_failures}};
}

int cmd_search_counterexample(const Config& cfg) {
    auto names = split(cfg.fields, ',');
    if (names.empty()) throw ConfigInvalid("--field is empty");
    // Validate every field before any computation.
    struct Field {
        std::string name;
        std::uint32_t p;
        bool quadratic;
    };
    std::vector<Field> fields;
    for (const auto& f : names) {
        if (f.size() < 2 || f[0] != 'F') throw ConfigInvalid("field must look like F<q>: '" + f + "'");
        const u64 q = parse_u64(f.substr(1), "--field");
        if (is_prime(q)) {
            fields.push_back({f, static_cast<std::uint32_t>(q), false});
            continue;
        }
        std::uint32_t p = 2;
        while (u64{p} * p < q) ++p;
        if (u64{p} * p != q || !is_prime(p)) throw ConfigInvalid("only F_p and F_{p^2} are supported: '" + f + "'");
        fields.push_back({f, p, true});
    }
    Emitter out(cfg);
    json h = ring_header(cfg);
    h.erase("p");
    h.erase("m");
    h["fields"] = names;
    h["element_encoding"] = "F_p: residue; F_{p^2}: c0 + p c1 for c0 + c1 X";
    out.header(h);
    u64 emitted = 0, failures = 0;
    json per_field = json::object();
    for (const auto& f : fields) {
        if (f.quadratic)
            search_field(QuadraticField(f.p), f.name, cfg, out, emitted, per_field, failures);
        else
            search_field(LocalRing(f.p, 1), f.name, cfg, out, emitted, per_field, failures);
    }
    u64 total = 0;
    for (const auto& [k, v] : per_field.items()) total += v["hits"].get<u64>();
    out.summary({{"hits", total}, {"by_field", per_field}, {"records_emitted", emitted}, {"failures", failures}});
    return status(failures);
}

int cmd_witness_gl6(const Config& cfg) {
    Emitter out(cfg);
    json h = ring_header(cfg);
    h["alpha"] = cfg.alpha;
    out.header(h);
    auto w = gl6_witness(cfg.p, cfg.alpha);
    out.record({{"instance", 0},
                {"tau", to_json(w.tau)},
                {"a", to_json(w.a)},
                {"frame", to_json(w.frame)},
                {"A0", elem_int(w.A0)},
                {"B0", elem_int(w.B0)},
                {"A1", elem_int(w.A1)},
                {"a0_b0_zero", w.a0_b0_zero},
                {"a1_is_minus_alpha", w.a1_is_minus_alpha},
                {"mu_one_h_is_one", w.mu_one_h_is_one},
                {"mu_tau_h_diagonal", w.mu_tau_h_diagonal},
                {"p_tau_h_annihilates", w.p_tau_h_annihilates},
                {"center_in_x", w.center_in_x},
                {"x_proper", w.x_proper},
                {"missing_point", to_json(w.missing_point)},
                {"a_outside_hz", w.a_outside_hz}});
    out.summary({{"ok", w.ok()}, {"failures", w.ok() ? 0 : 1}});
    return status(!w.ok());
}

int cmd_witness_rank2(const Config& cfg) {
    LocalRing ring(cfg.p, cfg.m);
    Emitter out(cfg);
    out.header(ring_header(cfg));
    auto c = check_rank_two_antidiagonal(ring);
    out.record({{"instance", 0},
                {"x_points", c.x_points},
                {"centralizer_size", c.centralizer_size},
                {"a_outside_hz", c.a_outside_hz},
                {"closed_form_matches", c.closed_form_matches},
                {"doubly_tangential_everywhere", c.doubly_tangential_everywhere}});
    out.summary({{"ok", c.ok()}, {"failures", c.ok() ? 0 : 1}});
    return status(!c.ok());
}

// --- microlocal ------------------------------------------------------------------------

int cmd_microlocal_mackey(const Config& cfg) {
    LocalRing level(cfg.p, cfg.m);
    auto xs = parse_int_list(cfg.xi, "--xi");
    if (xs.empty()) throw ConfigInvalid("give --xi, one parameter per 1-block");
    Vec<Zmod> xis;
    for (auto x : xs) xis.push_back(level.from_int(x));
    auto datum = InductionDatum::principal_series(xis);
    const std::size_t n = xis.size();
    const bool oracle = !cfg.no_oracle && cfg.m == 1;
    bool distinct = true;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) distinct = distinct && (xis[i] - xis[j]).is_unit();
    Emitter out(cfg);
    json h = ring_header(cfg);
    h["rank"] = n;
    h["xi"] = xs;
    h["oracle"] = oracle;
    out.header(h);
    const auto expected = datum.polynomial();
    u64 index = 0, nonzero = 0, disagreements = 0;
    bool multiplicity_one = true;
    for (const auto& P : all_monic(level, n)) {
        auto tau = companion(P);
        auto r = mackey_dimension(level, datum, tau, cfg.budget);
        json rec = {{"instance", index++},
                    {"P", to_json(P)},
                    {"tau", to_json(tau)},
                    {"dimension", r.dimension},
                    {"cosets", r.cosets},
                    {"flag_preserving", r.flag_preserving}};
        if (oracle) {
            const u64 o = induced_model_dimension(cfg.p, xis, tau, cfg.budget);
            rec["oracle_dimension"] = o;
            disagreements += o != r.dimension;
        }
        nonzero += r.dimension != 0;
        if (distinct && r.dimension != (P == expected ? 1u : 0u)) multiplicity_one = false;
        out.record(std::move(rec));
    }
    const u64 failures = disagreements + (distinct && !multiplicity_one);
    out.summary({{"polynomials", index},
                 {"nonzero", nonzero},
                 {"expected_polynomial", to_json(expected)},
                 {"distinct_parameters", distinct},
                 {"multiplicity_one", distinct ? json(multiplicity_one) : json(nullptr)},
                 {"oracle_disagreements", oracle ? json(disagreements) : json(nullptr)},
                 {"failures", failures}});
    return status(failures);
}

// Every exponent vector in [-r, r]^n other than 0.
std::vector<std::vector<int>> exponent_grid(std::size_t n, int r) {
    std::vector<std::vector<int>> out;
    std::vector<int> e(n, -r);
    for (;;) {
        if (std::any_of(e.begin(), e.end(), [](int x) { return x != 0; })) out.push_back(e);
        std::size_t i = 0;
        while (i < n && e[i] == r) e[i++] = -r;
        if (i == n) return out;
        ++e[i];
    }
}

int cmd_microlocal_support(const Config& cfg) {
    DepthFrame f(cfg.p, cfg.m);
    const LocalRing& level = f.level;
    if (cfg.exp_range < 1 || cfg.exp_range > 4) throw ConfigInvalid("--exp-range must lie in [1, 4]");
    Emitter out(cfg);
    json h = ring_header(cfg);
    h["k"] = cfg.m;
    h["mode"] = cfg.mode;
    h["exp_range"] = cfg.exp_range;
    out.header(h);
    std::vector<Matrix<Zmod>> taus;
    if (cfg.mode == "exhaustive") {
        for (auto& c : stable_tau_classes(level, cfg.rank)) taus.push_back(std::move(c.tau));
    } else {
        for (u64 i = 0; i < cfg.instances; ++i) {
            Rng rng(instance_seed(cfg.seed, i));
            taus.push_back(random_stable_tau(level, cfg.rank, rng));
        }
    }
    const auto grid = exponent_grid(cfg.rank - 1, cfg.exp_range);
    struct Row {
        SupportCheck support;
        u64 witnesses = 0, witness_failures = 0;
        VolumeRatio volume;
        std::string error;
    };
    auto rows = parallel_map(taus.size(), cfg.jobs, [&](std::size_t t) {
        Row r;
        try {
            r.support = coefficient_support_check(level, taus[t], cfg.budget);
            for (const auto& e : grid) {
                ++r.witnesses;
                try {
                    r.witness_failures += !noncompact_support_witness(f, taus[t], e).verified();
                } catch (const WitnessSearchFailed&) {
                    ++r.witness_failures;
                }
            }
            r.volume = j_tau_volume_ratio(level, taus[t], cfg.budget);
        } catch (const BudgetExceeded& e) {
            r.error = e.what();
        }
        return r;
    });
    u64 failures = 0, budget_skips = 0, witnesses = 0;
    for (std::size_t t = 0; t < taus.size(); ++t) {
        const auto& r = rows[t];
        json rec = {{"instance", t}, {"tau", to_json(taus[t])}};
        if (!r.error.empty()) {
            ++budget_skips;
            rec["error"] = r.error;
            out.record(std::move(rec));
            continue;
        }
        const bool ok = r.support.holds() && r.witness_failures == 0 && r.volume.in_window();
        failures += !ok;
        witnesses += r.witnesses;
        rec.update({{"h_order", r.support.h_count},
                    {"h_fixing_tau", r.support.fixed},
                    {"support_ok", r.support.holds()},
                    {"witnesses", r.witnesses},
                    {"witness_failures", r.witness_failures},
                    {"volume_ratio_normalized", rat(r.volume.normalized)},
                    {"window", json::array({rat(r.volume.lower), rat(r.volume.upper)})},
                    {"in_window", r.volume.in_window()},
                    {"ok", ok}});
        out.record(std::move(rec));
    }
    out.summary({{"taus", taus.size()},
                 {"witnesses", witnesses},
                 {"budget_exceeded", budget_skips},
                 {"failures", failures}});
    return status(failures);
}

// --- exponents / verify --------------------------------------------------------------

int cmd_exponent_table(const Config& cfg) {
    auto ns = parse_range(cfg.n_range);
    std::vector<ExpRational> thetas;
    for (const auto& t : split(cfg.thetas, ',')) thetas.push_back(parse_rational(t));
    const auto eps = parse_rational(cfg.epsilon);
    for (auto n : ns)
        if (n < 1) throw ConfigInvalid("n must be >= 1");
    Emitter out(cfg);
    out.header({{"command", cfg.command}, {"epsilon", rational_to_string(eps)}, {"seed", cfg.seed}});
    u64 failures = 0, rows = 0;
    for (auto n : ns)
        for (const auto& theta : thetas) {
            auto o = optimize_alpha(n, theta, eps);
            failures += !o.ok();
            out.record({{"instance", rows++},
                        {"n", n},
                        {"theta", rational_to_string(theta)},
                        {"A", o.A},
                        {"alpha_star", rational_to_string(o.alpha_star)},
                        {"delta", rational_to_string(o.delta)},
                        {"delta_n_bound", rational_to_string(o.delta_bound)},
                        {"delta_n_aligned", rational_to_string(o.delta_n_aligned)},
                        {"bound_over_aligned", rational_to_string(o.display_over_aligned)},
                        {"first_equals_third", o.first_equals_third},
                        {"second_dominated", o.second_dominated},
                        {"max_is_minus_delta", o.max_is_minus_delta},
                        {"ok", o.ok()}});
        }
    out.summary({{"rows", rows}, {"failures", failures}});
    return status(failures);
}

template <Scalar T>
json at_one_json(const AtOneRecord<T>& r, const TauClass<T>& cls, u64 instance) {
    return {{"instance", instance},
            {"tau_index", r.tau_index},
            {"P", to_json(cls.P)},
            {"P_H", to_json(cls.P_H)},
            {"a", to_json(r.a)},
            {"tangential", r.conditions.tangential},
            {"square_central", r.conditions.square_central},
            {"mu_equals_nu", r.conditions.mu_equals_nu},
            {"ab_relation", r.conditions.ab_relation},
            {"doubly_tangential", r.doubly_tangential},
            {"a_central", r.a_central},
            {"consistent", r.consistent}};
}

int cmd_verify_tangential(const Config& cfg) {
    LocalRing ring(cfg.p, cfg.m);
    Emitter out(cfg);
    json h = ring_header(cfg);
    h["mode"] = cfg.mode;
    if (cfg.mode == "seeded") h["instances"] = cfg.instances;
    out.header(h);
    std::vector<TauClass<Zmod>> taus;
    std::vector<AtOneRecord<Zmod>> recs;
    if (cfg.mode == "exhaustive") {
        taus = stable_tau_classes(ring, cfg.rank);
        recs = sweep_tangency_at_one(ring, taus, cfg.budget, cfg.jobs);
    } else {
        auto run = sweep_tangency_at_one_seeded(ring, cfg.rank, cfg.instances, cfg.seed, cfg.jobs);
        taus = std::move(run.taus);
        recs = std::move(run.records);
    }
    u64 failures = 0, tangential = 0, doubly = 0, central = 0;
    for (std::size_t i = 0; i < recs.size(); ++i) {
        const auto& r = recs[i];
        failures += !r.consistent;
        tangential += r.conditions.tangential;
        doubly += r.doubly_tangential;
        central += r.a_central;
        if (!cfg.summary_only) out.record(at_one_json(r, taus[r.tau_index], i));
    }
    out.summary({{"mode", cfg.mode},
                 {"tau_classes", cfg.mode == "exhaustive" ? json(taus.size()) : json(nullptr)},
                 {"instances", recs.size()},
                 {"tangential", tangential},
                 {"doubly_tangential", doubly},
                 {"central", central},
                 {"double_check_applies", ring.p() != 2 && cfg.rank >= 3},
                 {"failures", failures}});
    return status(failures);
}

int cmd_verify_transversality(const Config& cfg) {
    LocalRing ring(cfg.p, cfg.m);
    if (cfg.a_mode != "cosets" && cfg.a_mode != "all") throw ConfigInvalid("--a-mode must be cosets or all");
    Emitter out(cfg);
    json h = ring_header(cfg);
    h["a_mode"] = cfg.a_mode;
    out.header(h);
    auto taus = stable_tau_classes(ring, cfg.rank);
    auto as = a_candidates(ring, cfg.rank, cfg.a_mode == "cosets" ? AMode::CosetRepresentatives : AMode::AllOfG, cfg.budget);
    auto recs = sweep_transversality(ring, taus, as, cfg.budget, cfg.jobs);
    const bool applies = ring.p() != 2 && cfg.rank >= 3;
    u64 failures = 0, exceptions = 0, nonempty = 0;
    for (std::size_t i = 0; i < recs.size(); ++i) {
        const auto& r = recs[i];
        // Exception to the theorem: X is all of H_{tau_H} and doubly tangential everywhere.
        const bool exception = r.x_points == r.centralizer_size && r.doubly_tangential_points == r.x_points;
        exceptions += exception;
        nonempty += r.x_points > 0;
        if (applies) failures += !r.ok || exception;
        if (cfg.summary_only) continue;
        out.record({{"instance", i},
                    {"tau_index", r.tau_index},
                    {"P", to_json(taus[r.tau_index].P)},
                    {"P_H", to_json(taus[r.tau_index].P_H)},
                    {"a", to_json(r.a)},
                    {"x_points", r.x_points},
                    {"centralizer_size", r.centralizer_size},
                    {"tangential_points", r.tangential_points},
                    {"doubly_tangential_points", r.doubly_tangential_points},
                    {"tangency_matches_b_square", r.tangency_matches_b_square},
                    {"exception", exception},
                    {"ok", r.ok}});
    }
    out.summary({{"tau_classes", taus.size()},
                 {"a_candidates", as.size()},
                 {"instances", recs.size()},
                 {"nonempty", nonempty},
                 {"exceptions", exceptions},
                 {"theorem_applies", applies},
                 {"failures", failures}});
    return status(failures);
}

// --- Wiring -----------------------------------------------------------------------------

using Handler = int (*)(const Config&);

struct Leaf {
    CLI::App* app;
    Handler handler;
};

void add_output(CLI::App* sub, Config& cfg) {
    sub->add_option("--seed", cfg.seed, "RNG seed (mt19937_64), recorded in every line");
    sub->add_option("--format", cfg.format, "json (JSON lines) or csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--output,-o", cfg.output, "write the report here instead of stdout");
    sub->add_option("--budget", cfg.budget_flag, "enumeration budget (overrides GGP_BUDGET)");
    sub->add_option("--jobs,-j", cfg.jobs, "worker threads; output order does not depend on it");
}

void add_ring(CLI::App* sub, Config& cfg, bool rank = true) {
    sub->add_option("--p", cfg.p, "residue characteristic");
    sub->add_option("--m", cfg.m, "precision: the ring is Z/p^m");
    if (rank) sub->add_option("--rank", cfg.rank, "rank of G = GL_rank");
}

void add_sweep(CLI::App* sub, Config& cfg) {
    sub->add_option("--mode", cfg.mode, "exhaustive or seeded")->check(CLI::IsMember({"exhaustive", "seeded"}));
    sub->add_option("--instances", cfg.instances, "seeded instance count");
    sub->add_flag("--summary-only", cfg.summary_only, "emit only the header and summary");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"GGP-pair volume, tangency and exponent verification"};
    app.require_subcommand(1);
    Config cfg;
    std::vector<Leaf> leaves;
    auto group = [&](const char* name, const char* desc) {
        auto* g = app.add_subcommand(name, desc);
        g->require_subcommand(1);
        return g;
    };
    auto leaf = [&](CLI::App* parent, const char* name, const char* desc, Handler h) {
        auto* s = parent->add_subcommand(name, desc);
        add_output(s, cfg);
        leaves.push_back({s, h});
        return s;
    };

    auto* stability = group("stability", "stability of tau");
    auto* s = leaf(stability, "check", "Delta(tau), charpolys and their coprimality", cmd_stability_check);
    add_ring(s, cfg, false);
    s->add_option("--tau", cfg.tau, "matrix as JSON rows, e.g. [[0,1],[1,0]]");
    s->add_option("--P", cfg.P, "instead of --tau: lower coefficients of P_tau, e.g. 1,0,2");
    s->add_option("--PH", cfg.PH, "lower coefficients of P_{tau_H}");

    auto* xscheme = group("xscheme", "the scheme X_{tau,a}");
    for (auto [name, desc, h] : {std::tuple{"enumerate", "points of X over Z/p^m", cmd_xscheme_enumerate},
                                 std::tuple{"tangency", "first- and second-order tangency at every point",
                                            cmd_xscheme_tangency}}) {
        s = leaf(xscheme, name, desc, h);
        add_ring(s, cfg, false);
        s->add_option("--tau", cfg.tau, "stable tau as JSON rows")->required();
        s->add_option("--a", cfg.a, "invertible a as JSON rows")->required();
    }

    auto* volume = group("volume", "the uniform volume bound");
    s = leaf(volume, "verify", "count against bound for one (tau, a)", cmd_volume_verify);
    add_ring(s, cfg, false);
    s->add_option("--tau", cfg.tau, "stable tau as JSON rows")->required();
    s->add_option("--a", cfg.a, "a outside HZ as JSON rows")->required();
    s = leaf(volume, "sweep", "exhaustive or seeded sweep; summary carries C_emp", cmd_volume_sweep);
    add_ring(s, cfg);
    add_sweep(s, cfg);

    auto* bilinear = group("bilinear", "the bilinear-form estimate");
    s = leaf(bilinear, "check", "trivial and refined bounds over every gamma", cmd_bilinear_check);
    add_ring(s, cfg);
    s->add_option("--C", cfg.C, "constant of the refined bound (rational)");
    s->add_option("--taus", cfg.taus, "number of seeded stable tau");
    s->add_option("--max-value", cfg.max_value, "test functions take values in [0, max-value]");

    auto* search = group("search", "searches");
    s = leaf(search, "counterexample", "a outside HZ with X doubly tangential everywhere", cmd_search_counterexample);
    s->add_option("--rank", cfg.rank, "rank of G");
    s->add_option("--field", cfg.fields, "comma-separated fields F<q>, q = p or p^2");
    s->add_option("--max-records", cfg.max_records, "cap on emitted hit records (0 = all)");

    auto* witness = group("witness", "explicit instances");
    s = leaf(witness, "gl6", "the rank-6 diagonal example", cmd_witness_gl6);
    s->add_option("--p", cfg.p, "prime")->default_val(17);
    s->add_option("--alpha", cfg.alpha, "square root of 2 mod p");
    s = leaf(witness, "rank2", "tau = a = antidiagonal(1, 1)", cmd_witness_rank2);
    add_ring(s, cfg, false);

    auto* micro = group("microlocal", "test-vector combinatorics at depth q^2, q = p^m");
    s = leaf(micro, "mackey", "chi_tau-eigenspace dimension over all monic tau charpolys", cmd_microlocal_mackey);
    add_ring(s, cfg, false);
    s->add_option("--xi", cfg.xi, "principal-series parameters, e.g. 0,1")->required();
    s->add_flag("--no-oracle", cfg.no_oracle, "skip the induced-model cross-check");
    s = leaf(micro, "support", "coefficient support, noncompact witnesses, J_tau volume ratio", cmd_microlocal_support);
    add_ring(s, cfg);
    add_sweep(s, cfg);
    s->add_option("--exp-range", cfg.exp_range, "witness exponents range over [-r, r]^n");

    auto* exponent = group("exponent", "exponent bookkeeping");
    s = leaf(exponent, "table", "alpha*, delta and delta_n per (n, theta)", cmd_exponent_table);
    s->add_option("--n", cfg.n_range, "n, a range 1-10 or a list");
    s->add_option("--theta", cfg.thetas, "comma-separated rationals in [0, 1/2]");
    s->add_option("--epsilon", cfg.epsilon, "the epsilon of T^{n(n+1)/2 + eps}");

    auto* verify = group("verify", "theorem sweeps");
    s = leaf(verify, "tangential", "tangency at 1 for a in G_tau: a^2 central, resp. a central", cmd_verify_tangential);
    add_ring(s, cfg);
    add_sweep(s, cfg);
    s = leaf(verify, "transversality", "a outside HZ is never doubly tangential", cmd_verify_transversality);
    add_ring(s, cfg);
    s->add_option("--a-mode", cfg.a_mode, "cosets (H\\G/Z representatives) or all");
    s->add_flag("--summary-only", cfg.summary_only, "emit only the header and summary");

    // The exponent table is CSV unless asked otherwise.
    bool format_given = false;
    for (int i = 1; i < argc; ++i) format_given = format_given || std::string(argv[i]).rfind("--format", 0) == 0;

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    for (const auto& l : leaves) {
        if (!l.app->parsed()) continue;
        cfg.command = l.app->get_parent()->get_name() + " " + l.app->get_name();
        if (cfg.command == "exponent table" && !format_given) cfg.format = "csv";
        try {
            resolve_budget(cfg);
            validate_common(cfg);
            return l.handler(cfg);
        } catch (const ConfigInvalid& e) {
            std::cerr << "error: " << e.what() << '\n';
            return 2;
        } catch (const InvalidRing& e) {
            std::cerr << "error: " << e.what() << '\n';
            return 2;
        } catch (const BudgetExceeded& e) {
            std::cerr << "error: " << e.what() << " (raise --budget or GGP_BUDGET)\n";
            return 2;
        } catch (const CharacteristicTwo& e) {
            std::cerr << "error: " << e.what() << '\n';
            return 2;
        } catch (const DegenerateInstance& e) {
            std::cerr << "error: " << e.what() << '\n';
            return 2;
        } catch (const PreconditionFailed& e) {
            std::cerr << "error: " << e.what() << '\n';
            return 2;
        } catch (const NotStable& e) {
            std::cerr << "error: " << e.what() << '\n';
            return 2;
        } catch (const Error& e) {
            std::cerr << "check failed: " << e.what() << '\n';
            return 1;
        }
    }
    return 2;
}
