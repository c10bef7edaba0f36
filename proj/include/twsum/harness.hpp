#ifndef TWSUM_HARNESS_HPP
#define TWSUM_HARNESS_HPP

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <functional>
#include <map>
#include <mutex>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "charsum.hpp"
#include "dwork.hpp"
#include "io.hpp"
#include "polygons.hpp"

namespace twsum::harness {

using nlohmann::json;

inline constexpr const char* kVersion = "0.1.0";

/// Thrown for malformed or infeasible job configurations (exit code 3).
class config_error : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Status { Pass, Fail, Inconclusive };

inline const char* status_name(Status s) {
    switch (s) {
        case Status::Pass: return "pass";
        case Status::Fail: return "fail";
        default: return "inconclusive";
    }
}

struct CaseOutcome {
    Status status = Status::Pass;
    json detail = json::object();
};

struct CaseResult {
    std::string id;
    json params;
    CaseOutcome outcome;
};

struct VerifyReport {
    std::string suite;
    json config;
    std::vector<CaseResult> cases;
    std::size_t passed = 0, failed = 0, inconclusive = 0;
    double wall_seconds = 0;

    /// 0 pass, 1 failures, 2 inconclusive only.
    int exit_code(bool allow_inconclusive) const {
        if (failed > 0) return 1;
        if (inconclusive > 0 && !allow_inconclusive) return 2;
        return 0;
    }

    /// Wall time is left out unless asked for so that reports are reproducible byte for byte.
    json to_json(bool with_timing = false) const {
        json cs = json::array();
        for (const auto& c : cases) {
            json row{{"id", c.id}, {"status", status_name(c.outcome.status)}, {"detail", c.outcome.detail}};
            if (c.outcome.status != Status::Pass) row["repro"] = json{{"suite", suite}, {"case", c.params}};
            cs.push_back(std::move(row));
        }
        json out{{"suite", suite},
                 {"version", kVersion},
                 {"config", config},
                 {"cases", cs},
                 {"totals", {{"pass", passed}, {"fail", failed}, {"inconclusive", inconclusive}, {"total", cases.size()}}}};
        if (with_timing) out["wall_seconds"] = wall_seconds;
        return out;
    }
};

/// Runs fn(i) for i < n on a worker pool; the result order is the index order.
template <class T>
std::vector<T> parallel_map(std::size_t n, unsigned workers, const std::function<T(std::size_t)>& fn) {
    std::vector<T> out(n);
    if (workers <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mu;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < std::min<std::size_t>(workers, n); ++w) {
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < n;) {
                try {
                    out[i] = fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mu);
                    if (!error) error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
    return out;
}

/// Worker count from TWSUM_WORKERS, else the hardware concurrency.
inline unsigned worker_count() {
    if (const char* env = std::getenv("TWSUM_WORKERS")) {
        const int n = std::atoi(env);
        if (n >= 1) return static_cast<unsigned>(n);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

// ---- job parameters ----

inline TrivialDigits parse_conv(const std::string& s) {
    if (s == "zero") return TrivialDigits::Zero;
    if (s == "full") return TrivialDigits::Full;
    throw config_error("trivial-class convention must be 'zero' or 'full', got '" + s + "'");
}
inline std::string conv_name(TrivialDigits c) { return c == TrivialDigits::Zero ? "zero" : "full"; }

/// Parameter grid shared by the suites. Empty lists fall back to the suite defaults.
struct Grid {
    std::vector<u64> p, d, k;
    std::vector<unsigned> b;
    std::optional<std::pair<i64, i64>> u;   ///< inclusive range, default [0, q-2]
    std::vector<TrivialDigits> conventions;
    unsigned m = 1;
    int M = -1;
    std::optional<json> f;                  ///< fixes the polynomial instead of enumerating
};

inline Grid grid_from_json(const json& j) {
    Grid g;
    auto list = [&](const char* key, auto& dst) {
        if (!j.contains(key)) return;
        const auto& v = j.at(key);
        if (v.is_array()) {
            for (const auto& x : v) dst.push_back(x.get<typename std::decay_t<decltype(dst)>::value_type>());
        } else {
            dst.push_back(v.get<typename std::decay_t<decltype(dst)>::value_type>());
        }
    };
    list("p", g.p);
    list("d", g.d);
    list("k", g.k);
    list("b", g.b);
    if (j.contains("u")) {
        const auto& u = j.at("u");
        if (u.is_array() && u.size() == 2) {
            g.u = std::pair<i64, i64>{u[0].get<i64>(), u[1].get<i64>()};
        } else if (u.is_number_integer()) {
            g.u = std::pair<i64, i64>{u.get<i64>(), u.get<i64>()};
        } else if (!(u.is_string() && u.get<std::string>() == "all")) {
            throw config_error("grid.u must be an integer, [lo, hi] or \"all\"");
        }
    }
    if (j.contains("conventions"))
        for (const auto& c : j.at("conventions")) g.conventions.push_back(parse_conv(c.get<std::string>()));
    if (j.contains("m")) g.m = j.at("m").get<unsigned>();
    if (j.contains("M")) g.M = j.at("M").get<int>();
    if (j.contains("f")) g.f = j.at("f");
    return g;
}

inline json grid_to_json(const Grid& g) {
    json j{{"p", g.p}, {"d", g.d}, {"k", g.k}, {"b", g.b}, {"m", g.m}, {"M", g.M}};
    if (g.u) {
        j["u"] = json::array({g.u->first, g.u->second});
    } else {
        j["u"] = "all";
    }
    json cv = json::array();
    for (auto c : g.conventions) cv.push_back(conv_name(c));
    j["conventions"] = cv;
    if (g.f) j["f"] = *g.f;
    return j;
}

struct JobConfig {
    std::string suite;
    Grid grid;
    u64 seed = 7;
    int trials = -1;
    bool allow_inconclusive = false;
    std::optional<json> single_case;  ///< re-runs one embedded case
    json precision = json::object();  ///< optional {J, N_pi, K}
};

inline JobConfig config_from_json(const json& j) {
    JobConfig c;
    try {
        if (j.contains("suite")) c.suite = j.at("suite").get<std::string>();
        if (j.contains("grid")) c.grid = grid_from_json(j.at("grid"));
        if (j.contains("seed")) c.seed = j.at("seed").get<u64>();
        if (j.contains("trials")) c.trials = j.at("trials").get<int>();
        if (j.contains("allow_inconclusive")) c.allow_inconclusive = j.at("allow_inconclusive").get<bool>();
        if (j.contains("case")) c.single_case = j.at("case");
        if (j.contains("precision")) c.precision = j.at("precision");
    } catch (const nlohmann::json::exception& e) {
        throw config_error(std::string("config: ") + e.what());
    }
    return c;
}

inline json config_to_json(const JobConfig& c) {
    json j{{"suite", c.suite}, {"grid", grid_to_json(c.grid)}, {"seed", c.seed}, {"trials", c.trials},
           {"allow_inconclusive", c.allow_inconclusive}, {"precision", c.precision}};
    if (c.single_case) j["case"] = *c.single_case;
    return j;
}

// ---- shared helpers ----

inline std::vector<std::string> values_str(const ConvexPolygon& P) {
    std::vector<std::string> v;
    for (const auto& x : P.values()) v.push_back(x.str());
    return v;
}

inline std::vector<i64> u_values(const Grid& g, u64 q) {
    std::vector<i64> us;
    const i64 lo = g.u ? g.u->first : 0;
    const i64 hi = g.u ? g.u->second : static_cast<i64>(q) - 2;
    for (i64 u = lo; u <= hi; ++u) us.push_back(u);
    return us;
}

/// Two-term polynomials a_d x^d + a_k x^k with a_d, a_k units (a_k = 0 when k = 0),
/// or the single polynomial fixed by the grid.
inline std::vector<json> poly_family(const Grid& g, u64 p, unsigned b, u64 d, u64 k) {
    if (g.f) return {*g.f};
    auto F = FieldCtx::build(p, b);
    std::vector<json> out;
    for (u64 ck = (k == 0 ? 0 : 1); ck < (k == 0 ? 1 : F->size()); ++ck)
        for (u64 cd = 1; cd < F->size(); ++cd) {
            json f = json::object();
            if (k != 0) f["a" + std::to_string(k)] = F->decode(ck).str();
            f["a" + std::to_string(d)] = F->decode(cd).str();
            out.push_back(f);
        }
    return out;
}

/// Random two-term polynomial over F_{p^b}.
inline json random_poly(std::mt19937_64& rng, u64 q, unsigned b, u64 p, u64 d, u64 k) {
    auto F = FieldCtx::build(p, b);
    std::uniform_int_distribution<u64> unit(1, q - 1);
    json f = json::object();
    if (k != 0) f["a" + std::to_string(k)] = F->decode(unit(rng)).str();
    f["a" + std::to_string(d)] = F->decode(unit(rng)).str();
    return f;
}

inline std::mt19937_64 case_rng(u64 seed, u64 index) {
    std::seed_seq seq{seed & 0xffffffffu, seed >> 32, index & 0xffffffffu, index >> 32};
    return std::mt19937_64(seq);
}

struct CaseContext {
    FieldPtr F;
    TwistData tw;
    PolySpec f;
    PolygonSpec spec;
};

inline CaseContext case_context(const json& c, int M) {
    CaseContext x;
    const u64 p = c.at("p").get<u64>();
    const unsigned b = c.at("b").get<unsigned>();
    const u64 d = c.at("d").get<u64>();
    const TrivialDigits conv = c.contains("conv") ? parse_conv(c.at("conv").get<std::string>()) : TrivialDigits::Zero;
    x.F = FieldCtx::build(p, b);
    x.tw = make_twist(p, b, c.at("u").get<i64>(), conv);
    x.f = io::poly_from_json(x.F, d, c.at("f"));
    x.spec = PolygonSpec{x.tw, d, x.f.k, M};
    return x;
}

/// The arithmetic bound for f: p_{d,[0,k],u} when f has a second exponent, else p_{Delta,u}.
inline ConvexPolygon arithmetic_bound(const PolygonSpec& s) { return s.k >= 1 ? p_dk_u(s) : p_delta_u(s); }

inline json domination_json(const Domination& d) {
    json j{{"holds", d.holds}, {"equal_at", d.equal_at}};
    if (!d.holds) j["first_failure"] = {d.first_failure, d.upper_value.str(), d.lower_value.str()};
    return j;
}

// ---- suites ----

struct Suite {
    std::string name;
    std::function<std::vector<json>(const JobConfig&)> enumerate;
    std::function<CaseOutcome(const json&)> run;
    std::function<std::string(const json&)> id;
};

inline std::string default_id(const json& c) { return c.dump(); }

/// p_{d,[0,k],u} >= p_{Delta,u} value-wise, plus convexity of both.
inline Suite suite_dk_vs_delta() {
    Suite s;
    s.name = "dk-vs-delta";
    s.enumerate = [](const JobConfig& cfg) {
        const Grid& g = cfg.grid;
        std::vector<json> cases;
        const auto ps = g.p.empty() ? std::vector<u64>{11, 13, 23} : g.p;
        const auto ds = g.d.empty() ? std::vector<u64>{2, 3} : g.d;
        const auto bs = g.b.empty() ? std::vector<unsigned>{1, 2} : g.b;
        const auto convs = g.conventions.empty() ? std::vector<TrivialDigits>{TrivialDigits::Zero, TrivialDigits::Full}
                                                 : g.conventions;
        const int M = g.M < 0 ? 30 : g.M;
        for (u64 p : ps)
            for (u64 d : ds)
                for (u64 k = 1; k < d; ++k) {
                    if (!g.k.empty() && std::find(g.k.begin(), g.k.end(), k) == g.k.end()) continue;
                    for (unsigned b : bs) {
                        const u64 q = nt::checked_pow(p, b);
                        for (i64 u : u_values(g, q)) {
                            const bool trivial = ((u % static_cast<i64>(q - 1)) + static_cast<i64>(q - 1)) % static_cast<i64>(q - 1) == 0;
                            for (auto cv : convs) {
                                if (!trivial && cv != convs.front()) continue;
                                cases.push_back({{"p", p}, {"b", b}, {"d", d}, {"k", k}, {"u", u}, {"conv", conv_name(cv)}, {"M", M}});
                            }
                        }
                    }
                }
        return cases;
    };
    s.run = [](const json& c) {
        const auto spec = make_spec(c.at("p").get<u64>(), c.at("b").get<unsigned>(), c.at("d").get<u64>(), c.at("k").get<u64>(),
                                    c.at("u").get<i64>(), c.at("M").get<int>(), parse_conv(c.at("conv").get<std::string>()));
        const auto P = p_dk_u(spec), D = p_delta_u(spec);
        const auto dom = dominates(P, D, spec.M);
        CaseOutcome o;
        o.detail = {{"domination", domination_json(dom)}, {"dk_convex", P.is_convex()}, {"delta_convex", D.is_convex()}};
        o.status = dom.holds && P.is_convex() && D.is_convex() ? Status::Pass : Status::Fail;
        return o;
    };
    s.id = default_id;
    return s;
}

/// b p_{Delta,u} >= b (p-1) H^infinity_{Delta,u} value-wise.
inline Suite suite_hodge_cross() {
    Suite s;
    s.name = "hodge-cross";
    s.enumerate = [](const JobConfig& cfg) {
        JobConfig c2 = cfg;
        if (c2.grid.k.empty()) c2.grid.k = {1};
        auto cases = suite_dk_vs_delta().enumerate(c2);
        std::vector<json> out;
        for (auto& c : cases)
            if (c.at("k").get<u64>() == 1) out.push_back(c);
        return out;
    };
    s.run = [](const json& c) {
        const auto spec = make_spec(c.at("p").get<u64>(), c.at("b").get<unsigned>(), c.at("d").get<u64>(), 0,
                                    c.at("u").get<i64>(), c.at("M").get<int>(), parse_conv(c.at("conv").get<std::string>()));
        const Rat b(static_cast<i64>(spec.b()));
        const auto lhs = p_delta_u(spec).scaled(b);
        const auto rhs = hodge_infinity(spec).scaled(b * Rat(static_cast<i64>(spec.p() - 1)));
        const auto dom = dominates(lhs, rhs, spec.M);
        return CaseOutcome{dom.holds ? Status::Pass : Status::Fail, {{"domination", domination_json(dom)}}};
    };
    s.id = default_id;
    return s;
}

/// Cases (p, b, d, k, u, f) over the exhaustive polynomial family; the F_11, d = 2 grid by default.
inline std::vector<json> poly_grid_cases(const JobConfig& cfg, std::vector<unsigned> default_b = {1}) {
    const Grid& g = cfg.grid;
    const auto ps = g.p.empty() ? std::vector<u64>{11} : g.p;
    const auto ds = g.d.empty() ? std::vector<u64>{2} : g.d;
    const auto bs = g.b.empty() ? default_b : g.b;
    std::vector<json> cases;
    for (u64 p : ps)
        for (u64 d : ds) {
            std::vector<u64> ks = g.k;
            if (ks.empty()) ks = {d - 1};
            for (u64 k : ks)
                for (unsigned b : bs) {
                    const u64 q = nt::checked_pow(p, b);
                    const auto fam = poly_family(g, p, b, d, k);
                    for (i64 u : u_values(g, q))
                        for (const auto& f : fam) cases.push_back({{"p", p}, {"b", b}, {"d", d}, {"u", u}, {"f", f}});
                }
        }
    return cases;
}

inline int lfun_precision(const json& c) { return c.contains("K") ? c.at("K").get<int>() : 6; }

/// Oracle L-polynomial: NP >= ord_p(q) p_{d,[0,k],u} on [0, p^{m-1} d].
inline Suite suite_lfun_bound() {
    Suite s;
    s.name = "lfun-bound";
    s.enumerate = [](const JobConfig& cfg) {
        auto cases = poly_grid_cases(cfg);
        for (auto& c : cases) c["m"] = cfg.grid.m;
        return cases;
    };
    s.run = [](const json& c) {
        const unsigned m = c.value("m", 1u);
        const u64 D = nt::checked_pow(c.at("p").get<u64>(), m - 1) * c.at("d").get<u64>();
        const auto x = case_context(c, static_cast<int>(D));
        const auto L = l_poly(x.f, x.tw, m, lfun_precision(c));
        CaseOutcome o;
        o.detail = {{"valuations", io::to_json(L).at("valuations")}, {"np", values_str(L.newton.polygon)}};
        if (!L.conclusive || L.newton.polygon.extent() < static_cast<int>(D)) {
            o.status = Status::Inconclusive;
            return o;
        }
        const Rat b(static_cast<i64>(x.tw.b));
        const auto bound = arithmetic_bound(x.spec).scaled(b);
        const auto dom = dominates(L.newton.polygon, bound, static_cast<int>(D));
        const auto delta = p_delta_u(x.spec).scaled(b);
        o.detail["bound"] = values_str(bound);
        o.detail["domination"] = domination_json(dom);
        o.detail["equals_b_p_delta"] = L.newton.polygon.truncated(static_cast<int>(D)) == delta.truncated(static_cast<int>(D));
        o.status = dom.holds ? Status::Pass : Status::Fail;
        return o;
    };
    s.id = default_id;
    return s;
}

/// For each u some f has NP of L equal to b p_{Delta,u} on [0, p^{m-1} d].
inline Suite suite_generic_equality() {
    Suite s;
    s.name = "generic-equality";
    s.enumerate = [](const JobConfig& cfg) {
        const Grid& g = cfg.grid;
        const auto ps = g.p.empty() ? std::vector<u64>{11} : g.p;
        const auto ds = g.d.empty() ? std::vector<u64>{2} : g.d;
        const auto bs = g.b.empty() ? std::vector<unsigned>{1} : g.b;
        std::vector<json> cases;
        for (u64 p : ps)
            for (u64 d : ds)
                for (unsigned b : bs) {
                    const u64 q = nt::checked_pow(p, b);
                    std::vector<u64> ks = g.k.empty() ? std::vector<u64>{d - 1} : g.k;
                    json fams = json::array();
                    for (u64 k : ks)
                        for (auto& f : poly_family(g, p, b, d, k)) fams.push_back(f);
                    for (i64 u : u_values(g, q))
                        cases.push_back({{"p", p}, {"b", b}, {"d", d}, {"u", u}, {"m", g.m}, {"family", fams}});
                }
        return cases;
    };
    s.run = [](const json& c) {
        const unsigned m = c.value("m", 1u);
        const u64 D = nt::checked_pow(c.at("p").get<u64>(), m - 1) * c.at("d").get<u64>();
        json attaining = json::array();
        int inconclusive = 0;
        json target;
        for (const auto& f : c.at("family")) {
            json one = c;
            one.erase("family");
            one["f"] = f;
            const auto x = case_context(one, static_cast<int>(D));
            const auto L = l_poly(x.f, x.tw, m, lfun_precision(c));
            const auto delta = p_delta_u(x.spec).scaled(Rat(static_cast<i64>(x.tw.b)));
            target = values_str(delta);
            if (!L.conclusive || L.newton.polygon.extent() < static_cast<int>(D)) {
                ++inconclusive;
                continue;
            }
            if (L.newton.polygon.truncated(static_cast<int>(D)) == delta) attaining.push_back(f);
        }
        CaseOutcome o;
        o.detail = {{"target", target}, {"attaining", attaining}, {"attaining_count", attaining.size()},
                    {"family_size", c.at("family").size()}, {"inconclusive", inconclusive}};
        o.status = !attaining.empty() ? Status::Pass : (inconclusive > 0 ? Status::Inconclusive : Status::Fail);
        return o;
    };
    s.id = [](const json& c) {
        return "p=" + c.at("p").dump() + " b=" + c.at("b").dump() + " d=" + c.at("d").dump() + " u=" + c.at("u").dump();
    };
    return s;
}

inline std::optional<DworkParams> precision_override(const json& c) {
    if (!c.contains("precision")) return std::nullopt;
    const auto& pr = c.at("precision");
    if (pr.empty()) return std::nullopt;
    return DworkParams{pr.at("J").get<int>(), pr.at("N_pi").get<int>(), pr.at("K").get<int>()};
}

/// Dwork T-adic NP of C on [0, M] against ord_p(q) p_{d,[0,k],u}, b p_{Delta,u} and b (p-1) H.
inline Suite suite_cfun_bound() {
    Suite s;
    s.name = "cfun-bound";
    s.enumerate = [](const JobConfig& cfg) {
        auto cases = poly_grid_cases(cfg);
        const int M = cfg.grid.M < 0 ? 6 : cfg.grid.M;
        for (auto& c : cases) {
            c["M"] = M;
            if (!cfg.precision.empty()) c["precision"] = cfg.precision;
        }
        return cases;
    };
    s.run = [](const json& c) {
        const int M = c.at("M").get<int>();
        const auto x = case_context(c, M);
        const auto r = c_function_np(x.f, x.tw, M, {}, precision_override(c));
        CaseOutcome o;
        o.detail = io::to_json(r);
        if (!r.conclusive || !r.stable) {
            o.status = Status::Inconclusive;
            return o;
        }
        const Rat b(static_cast<i64>(x.tw.b));
        const auto d1 = dominates(r.polygon, arithmetic_bound(x.spec).scaled(b), M);
        const auto d2 = dominates(r.polygon, p_delta_u(x.spec).scaled(b), M);
        const auto d3 = dominates(r.polygon, hodge_infinity(x.spec).scaled(b * Rat(static_cast<i64>(x.tw.p - 1))), M);
        o.detail["vs_arith_dk"] = domination_json(d1);
        o.detail["vs_arith_delta"] = domination_json(d2);
        o.detail["vs_hodge"] = domination_json(d3);
        o.status = d1.holds && d2.holds && d3.holds ? Status::Pass : Status::Fail;
        return o;
    };
    s.id = default_id;
    return s;
}

/// Random (R, tau) for the key combinatorial estimate.
inline Suite suite_key_estimate() {
    Suite s;
    s.name = "key-estimate";
    s.enumerate = [](const JobConfig& cfg) {
        const int trials = cfg.trials < 0 ? 1000 : cfg.trials;
        const u64 p = cfg.grid.p.empty() ? 11 : cfg.grid.p.front();
        const u64 d = cfg.grid.d.empty() ? 2 : cfg.grid.d.front();
        const u64 k = cfg.grid.k.empty() ? 1 : cfg.grid.k.front();
        const unsigned bmax = cfg.grid.b.empty() ? 2 : *std::max_element(cfg.grid.b.begin(), cfg.grid.b.end());
        const int mmax = cfg.grid.M < 0 ? 4 : cfg.grid.M;
        std::vector<json> cases;
        for (int t = 0; t < trials; ++t)
            cases.push_back({{"p", p}, {"d", d}, {"k", k}, {"bmax", bmax}, {"mmax", mmax}, {"seed", cfg.seed}, {"index", t}});
        return cases;
    };
    s.run = [](const json& c) {
        auto rng = case_rng(c.at("seed").get<u64>(), c.at("index").get<u64>());
        const u64 p = c.at("p").get<u64>();
        const unsigned b = std::uniform_int_distribution<unsigned>(1, c.at("bmax").get<unsigned>())(rng);
        const int m = std::uniform_int_distribution<int>(0, c.at("mmax").get<int>())(rng);
        const u64 q = nt::checked_pow(p, b);
        const i64 u = std::uniform_int_distribution<i64>(0, static_cast<i64>(q) - 2)(rng);
        const auto spec = make_spec(p, b, c.at("d").get<u64>(), c.at("k").get<u64>(), u, m);
        // candidates (l, w), l < 3m, 1 <= w <= b
        std::vector<BasisIndex> pool;
        for (int l = 0; l < 3 * m; ++l)
            for (unsigned w = 1; w <= b; ++w) pool.push_back({l, w});
        std::vector<std::vector<BasisIndex>> R;
        std::vector<std::vector<std::size_t>> tau;
        for (unsigned i = 0; i < b; ++i) {
            std::shuffle(pool.begin(), pool.end(), rng);
            std::vector<BasisIndex> Ri(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(b) * m);
            std::vector<std::size_t> ti(Ri.size());
            std::iota(ti.begin(), ti.end(), std::size_t{0});
            std::shuffle(ti.begin(), ti.end(), rng);
            R.push_back(std::move(Ri));
            tau.push_back(std::move(ti));
        }
        const auto ke = key_estimate_check(spec, m, R, tau);
        json Rj = json::array(), tj = json::array();
        for (unsigned i = 0; i < b; ++i) {
            json ri = json::array();
            for (const auto& x : R[i]) ri.push_back({x.l, x.w});
            Rj.push_back(ri);
            tj.push_back(tau[i]);
        }
        CaseOutcome o;
        o.detail = {{"b", b}, {"m", m}, {"u", u}, {"R", Rj}, {"tau", tj}, {"rhs", ke.rhs.str()},
                    {"lhs", ke.lhs ? json(ke.lhs->str()) : json("inf")}, {"hypothesis", ke.hypothesis}};
        o.status = ke.holds ? Status::Pass : Status::Fail;
        return o;
    };
    s.id = [](const json& c) { return "trial " + c.at("index").dump(); };
    return s;
}

/// Seeded (f, u) for the trace-formula check; the last case is the negative control.
inline Suite suite_trace_consistency() {
    Suite s;
    s.name = "trace-consistency";
    s.enumerate = [](const JobConfig& cfg) {
        const int trials = cfg.trials < 0 ? 10 : cfg.trials;
        const u64 p = cfg.grid.p.empty() ? 11 : cfg.grid.p.front();
        const u64 d = cfg.grid.d.empty() ? 2 : cfg.grid.d.front();
        const u64 k = cfg.grid.k.empty() ? 1 : cfg.grid.k.front();
        const auto bs = cfg.grid.b.empty() ? std::vector<unsigned>{1, 2} : cfg.grid.b;
        std::vector<json> cases;
        for (int t = 0; t <= trials; ++t) {
            const bool negative = t == trials;
            const unsigned b = bs[static_cast<std::size_t>(t) % bs.size()];
            cases.push_back({{"p", p}, {"b", b}, {"d", d}, {"k", k}, {"seed", cfg.seed}, {"index", t}, {"N_pi", 10}, {"K", 5},
                             {"negative_control", negative}});
        }
        return cases;
    };
    s.run = [](const json& c) {
        auto rng = case_rng(c.at("seed").get<u64>(), c.at("index").get<u64>());
        const u64 p = c.at("p").get<u64>();
        const unsigned b = c.at("b").get<unsigned>();
        const u64 q = nt::checked_pow(p, b);
        json params{{"p", p}, {"b", b}, {"d", c.at("d")}};
        params["u"] = std::uniform_int_distribution<i64>(0, static_cast<i64>(q) - 2)(rng);
        params["f"] = random_poly(rng, q, b, p, c.at("d").get<u64>(), c.at("k").get<u64>());
        const auto x = case_context(params, 1);
        const bool negative = c.at("negative_control").get<bool>();
        const TwistData dw = negative ? make_twist(p, b, static_cast<i64>(x.tw.u) + 1) : x.tw;
        const auto tc = trace_consistency(x.f, x.tw, dw, c.at("N_pi").get<int>(), c.at("K").get<int>());
        CaseOutcome o;
        o.detail = {{"job", params}, {"equal", tc.equal}, {"negative_control", negative}};
        if (negative) o.detail["dwork_u"] = dw.u;
        o.status = tc.equal != negative ? Status::Pass : Status::Fail;
        return o;
    };
    s.id = [](const json& c) {
        return std::string(c.at("negative_control").get<bool>() ? "negative control " : "trial ") + c.at("index").dump();
    };
    return s;
}

/// ord gamma_n >= [n/d] + ceil(r_n/k), and the same bound on every Psi block entry.
inline Suite suite_gamma_orders() {
    Suite s;
    s.name = "gamma-orders";
    s.enumerate = [](const JobConfig& cfg) {
        const int trials = cfg.trials < 0 ? 5 : cfg.trials;
        const u64 p = cfg.grid.p.empty() ? 11 : cfg.grid.p.front();
        const u64 d = cfg.grid.d.empty() ? 2 : cfg.grid.d.front();
        const u64 k = cfg.grid.k.empty() ? 1 : cfg.grid.k.front();
        const auto bs = cfg.grid.b.empty() ? std::vector<unsigned>{1, 2} : cfg.grid.b;
        const int nmax = cfg.grid.M < 0 ? 200 : cfg.grid.M;
        std::vector<json> cases;
        for (unsigned b : bs)
            for (int t = 0; t < trials; ++t)
                cases.push_back({{"p", p}, {"b", b}, {"d", d}, {"k", k}, {"seed", cfg.seed}, {"index", t}, {"n_max", nmax}});
        return cases;
    };
    s.run = [](const json& c) {
        auto rng = case_rng(c.at("seed").get<u64>() ^ (c.at("b").get<u64>() << 40), c.at("index").get<u64>());
        const u64 p = c.at("p").get<u64>(), d = c.at("d").get<u64>(), k = c.at("k").get<u64>();
        const unsigned b = c.at("b").get<unsigned>();
        const u64 q = nt::checked_pow(p, b);
        const int nmax = c.at("n_max").get<int>();
        json params{{"p", p}, {"b", b}, {"d", d}};
        params["u"] = std::uniform_int_distribution<i64>(0, static_cast<i64>(q) - 2)(rng);
        params["f"] = random_poly(rng, q, b, p, d, k);
        const auto x = case_context(params, 1);
        const int N = nmax / static_cast<int>(d) + 2;
        auto zq = ZqCtx::build(x.f.field, std::min(8, nt::max_precision(p)));
        const auto g = ef_gamma(x.f, zq, nmax + 1, N);
        auto bound = [&](i64 n) {
            const i64 r = n % static_cast<i64>(d);
            return n / static_cast<i64>(d) + (x.f.k == 0 ? (r == 0 ? 0 : N) : (r + static_cast<i64>(x.f.k) - 1) / static_cast<i64>(x.f.k));
        };
        int checked = 0;
        json failures = json::array();
        for (i64 n = 0; n <= nmax; ++n) {
            const auto v = g.at(n).ord();
            if (!v.determinate) continue;
            ++checked;
            if (v.value < Rat(bound(n))) failures.push_back({n, v.value.str(), bound(n)});
        }
        // Psi blocks reuse gamma_{pl + u_{b-i} - j}
        int entries = 0;
        const int J = 12;
        for (unsigned i = 1; i <= b; ++i) {
            const auto A = psi_block(g, x.tw, i, J, N);
            for (int l = 0; l < J; ++l)
                for (int j = 0; j < J; ++j) {
                    const i64 n = block_gamma_index(x.tw, i, l, j);
                    const auto v = A(l, j).ord();
                    if (n < 0) {
                        if (!A(l, j).is_zero()) failures.push_back({"nonzero entry at negative index", i, l, j});
                        continue;
                    }
                    if (!v.determinate || n > nmax) continue;
                    ++entries;
                    if (v.value < Rat(bound(n))) failures.push_back({"entry", i, l, j, v.value.str(), bound(n)});
                }
        }
        CaseOutcome o;
        o.detail = {{"job", params}, {"checked_gamma", checked}, {"checked_entries", entries}, {"failures", failures}};
        o.status = failures.empty() ? Status::Pass : Status::Fail;
        return o;
    };
    s.id = [](const json& c) { return "b=" + c.at("b").dump() + " trial " + c.at("index").dump(); };
    return s;
}

/// pi_1-adic NP of L (oracle) >= T-adic NP of C (Dwork) on [0, d].
inline Suite suite_oracle_dwork() {
    Suite s;
    s.name = "oracle-dwork";
    s.enumerate = [](const JobConfig& cfg) {
        auto all = poly_grid_cases(cfg);
        const int trials = cfg.trials < 0 ? 10 : cfg.trials;
        auto rng = case_rng(cfg.seed, 0);
        std::shuffle(all.begin(), all.end(), rng);
        if (static_cast<int>(all.size()) > trials) all.resize(static_cast<std::size_t>(trials));
        return all;
    };
    s.run = [](const json& c) {
        const int D = static_cast<int>(c.at("d").get<u64>());
        const auto x = case_context(c, D);
        const auto L = l_poly(x.f, x.tw, 1, lfun_precision(c));
        const auto C = c_function_np(x.f, x.tw, D);
        CaseOutcome o;
        o.detail = {{"lfun_np", values_str(L.newton.polygon)}, {"dwork_np", values_str(C.polygon)}};
        if (!L.conclusive || !C.conclusive || !C.stable || L.newton.polygon.extent() < D) {
            o.status = Status::Inconclusive;
            return o;
        }
        const auto dom = dominates(L.newton.polygon, C.polygon, D);
        o.detail["domination"] = domination_json(dom);
        o.status = dom.holds ? Status::Pass : Status::Fail;
        return o;
    };
    s.id = default_id;
    return s;
}

inline const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names{"dk-vs-delta", "hodge-cross",       "lfun-bound",   "cfun-bound",
                                                "generic-equality", "key-estimate", "trace-consistency",
                                                "gamma-orders", "oracle-dwork"};
    return names;
}

inline Suite find_suite(const std::string& name) {
    if (name == "dk-vs-delta") return suite_dk_vs_delta();
    if (name == "hodge-cross") return suite_hodge_cross();
    if (name == "lfun-bound") return suite_lfun_bound();
    if (name == "cfun-bound") return suite_cfun_bound();
    if (name == "generic-equality") return suite_generic_equality();
    if (name == "key-estimate") return suite_key_estimate();
    if (name == "trace-consistency") return suite_trace_consistency();
    if (name == "gamma-orders") return suite_gamma_orders();
    if (name == "oracle-dwork") return suite_oracle_dwork();
    throw config_error("unknown suite '" + name + "'");
}

/// Runs a suite. A `case` entry in the config runs exactly that case.
inline VerifyReport run_suite(const JobConfig& cfg, unsigned workers = worker_count()) {
    const Suite suite = find_suite(cfg.suite);
    VerifyReport rep;
    rep.suite = suite.name;
    rep.config = config_to_json(cfg);
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<json> cases;
    try {
        cases = cfg.single_case ? std::vector<json>{*cfg.single_case} : suite.enumerate(cfg);
    } catch (const config_error&) {
        throw;
    } catch (const std::exception& e) {
        throw config_error(std::string("grid: ") + e.what());
    }
    rep.cases = parallel_map<CaseResult>(cases.size(), workers, [&](std::size_t i) {
        CaseResult r;
        r.params = cases[i];
        r.id = suite.id(cases[i]);
        try {
            r.outcome = suite.run(cases[i]);
        } catch (const precision_error& e) {
            r.outcome = {Status::Inconclusive, {{"error", e.what()}}};
        } catch (const std::length_error& e) {
            throw config_error(e.what());
        }
        return r;
    });
    for (const auto& c : rep.cases) {
        if (c.outcome.status == Status::Pass) ++rep.passed;
        if (c.outcome.status == Status::Fail) ++rep.failed;
        if (c.outcome.status == Status::Inconclusive) ++rep.inconclusive;
    }
    rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

// ---- sweep ----

/// One CSV row per (p, q, d, k, u, f): polygon values, NP values and the bound gaps
/// min_m (NP(m) - bound(m)). `source` is "dwork" (T-adic NP of C on [0, M]) or
/// "lfun" (pi_1-adic NP of L on [0, d]).
inline std::string sweep_csv(const JobConfig& cfg, const std::string& source, unsigned workers = worker_count()) {
    if (source != "dwork" && source != "lfun") throw config_error("sweep source must be 'dwork' or 'lfun'");
    std::vector<json> cases;
    const Grid& g = cfg.grid;
    if (!(g.p.empty() && g.d.empty() && g.b.empty())) {
        JobConfig c2 = cfg;
        if (c2.grid.p.empty() || c2.grid.d.empty() || c2.grid.b.empty())
            throw config_error("sweep grid needs p, d and b (all empty means an empty sweep)");
        cases = poly_grid_cases(c2);
    }
    auto join = [](const ConvexPolygon& P, int M) {
        std::string s;
        const auto v = P.values();
        for (int m = 0; m <= M && m < static_cast<int>(v.size()); ++m) s += (m ? ";" : "") + v[static_cast<std::size_t>(m)].str();
        return s;
    };
    auto gap = [](const ConvexPolygon& A, const ConvexPolygon& B, int M) {
        const auto a = A.values(), b = B.values();
        Rat best = a[0] - b[0];
        for (int m = 1; m <= M; ++m) best = std::min(best, a[static_cast<std::size_t>(m)] - b[static_cast<std::size_t>(m)]);
        return best.str();
    };
    const auto rows = parallel_map<std::string>(cases.size(), workers, [&](std::size_t i) {
        const json& c = cases[i];
        const int M = source == "dwork" ? (g.M < 0 ? 6 : g.M) : static_cast<int>(c.at("d").get<u64>());
        const auto x = case_context(c, M);
        const Rat b(static_cast<i64>(x.tw.b));
        const auto dk = arithmetic_bound(x.spec).scaled(b);
        const auto delta = p_delta_u(x.spec).scaled(b);
        const auto hodge = hodge_infinity(x.spec).scaled(b * Rat(static_cast<i64>(x.tw.p - 1)));
        ConvexPolygon np;
        std::string status = "ok";
        if (source == "dwork") {
            const auto r = c_function_np(x.f, x.tw, M);
            np = r.polygon;
            if (!r.conclusive || !r.stable) status = "inconclusive";
        } else {
            const auto L = l_poly(x.f, x.tw, 1, 6);
            np = L.newton.polygon;
            if (!L.conclusive) status = "inconclusive";
        }
        std::string fs;
        for (const auto& [key, val] : c.at("f").items()) fs += (fs.empty() ? "" : " ") + key + "=" + val.get<std::string>();
        std::ostringstream os;
        os << x.tw.p << ',' << x.tw.q << ',' << x.f.d << ',' << x.f.k << ',' << x.tw.u << ",\"" << fs << "\"," << M << ','
           << join(dk, M) << ',' << join(delta, M) << ',' << join(hodge, M) << ',';
        if (np.extent() >= M) {
            os << join(np, M) << ',' << gap(np, dk, M) << ',' << gap(np, delta, M) << ',' << gap(np, hodge, M);
        } else {
            os << ",,,";
            status = "inconclusive";
        }
        os << ',' << status << '\n';
        return os.str();
    });
    std::string out = "p,q,d,k,u,f,M,arith_dk,arith_delta,hodge,np,gap_dk,gap_delta,gap_hodge,status\n";
    for (const auto& r : rows) out += r;
    return out;
}

}  // namespace twsum::harness

#endif  // TWSUM_HARNESS_HPP
