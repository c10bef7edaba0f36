// twsum: polygons, L-functions, Dwork C-function polygons and verification suites.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "twsum/twsum.hpp"

using namespace twsum;
using nlohmann::json;
namespace hn = twsum::harness;

namespace {

constexpr int kExitConfig = 3;

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw hn::config_error("cannot open config file '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw hn::config_error("config file '" + path + "': " + e.what());
    }
}

void emit(const std::string& text, const std::string& out) {
    if (out.empty() || out == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(out);
    if (!f) throw std::runtime_error("cannot write '" + out + "'");
    f << text;
}

/// "f" flag syntax: a1=3,a2=1+t
json parse_poly_flag(const std::string& s) {
    json f = json::object();
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw hn::config_error("--f expects a1=...,a2=...");
        f[item.substr(0, eq)] = item.substr(eq + 1);
    }
    return f;
}

std::vector<u64> parse_list(const std::string& s) {
    std::vector<u64> v;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) v.push_back(std::stoull(item));
    }
    return v;
}

/// Flags shared by polygon, lfun and cfun-dwork; a --config file supplies the same keys.
struct JobFlags {
    u64 p = 0;
    std::string q;
    u64 d = 0, k = 0;
    i64 u = 0;
    std::string conv = "zero";
    std::string f;
    unsigned m = 1;
    int M = 6, K = -1, J = -1, N = -1;
    bool no_adaptive = false;
    std::string config, out, format = "json";

    json job() const {
        json j = config.empty() ? json::object() : read_json_file(config);
        auto fill = [&](const char* key, const json& v) {
            if (!j.contains(key)) j[key] = v;
        };
        fill("p", p);
        fill("q", q.empty() ? json(p) : json(q));
        fill("d", d);
        fill("k", k);
        fill("u", u);
        fill("conv", conv);
        fill("m", m);
        fill("M", M);
        if (!f.empty()) fill("f", parse_poly_flag(f));
        json prec = j.value("precision", json::object());
        if (K > 0 && !prec.contains("K")) prec["K"] = K;
        if (J > 0 && !prec.contains("J")) prec["J"] = J;
        if (N > 0 && !prec.contains("N_pi")) prec["N_pi"] = N;
        j["precision"] = prec;
        fill("adaptive", !no_adaptive);
        return j;
    }
};

void add_job_flags(CLI::App* sc, JobFlags& fl, bool poly) {
    sc->add_option("--p", fl.p, "characteristic");
    sc->add_option("--q", fl.q, "field size, e.g. 121 or 11^2 (default p)");
    sc->add_option("--d", fl.d, "degree");
    sc->add_option("--k", fl.k, "second-highest exponent");
    sc->add_option("--u", fl.u, "twist exponent");
    sc->add_option("--conv", fl.conv, "digits of the trivial class: zero or full")->check(CLI::IsMember({"zero", "full"}));
    if (poly) sc->add_option("--f", fl.f, "coefficients, e.g. a1=3,a2=1+t");
    sc->add_option("--config", fl.config, "job JSON; its keys take precedence over flags");
    sc->add_option("--out", fl.out, "output path (default stdout)");
}

struct Resolved {
    FieldPtr F;
    TwistData tw;
    u64 d = 0, k = 0;
};

Resolved resolve(const json& j) {
    Resolved r;
    try {
        const u64 p = j.at("p").get<u64>();
        if (p == 0) throw hn::config_error("--p is required");
        const unsigned b = io::parse_q(p, j.at("q"));
        r.d = j.at("d").get<u64>();
        r.k = j.value("k", u64{0});
        r.F = FieldCtx::build(p, b);
        r.tw = make_twist(p, b, j.at("u").get<i64>(), hn::parse_conv(j.value("conv", std::string("zero"))));
    } catch (const json::exception& e) {
        throw hn::config_error(std::string("job: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw hn::config_error(e.what());
    }
    return r;
}

int cmd_polygon(const std::string& kind, const JobFlags& fl, int points) {
    json j = fl.job();
    const Resolved r = resolve(j);
    if (kind == "arith-dk" && r.k == 0) throw hn::config_error("arith-dk needs --k");
    const auto spec = make_spec(r.tw.p, r.tw.b, r.d, kind == "arith-dk" ? r.k : 0, static_cast<i64>(r.tw.u), points,
                                hn::parse_conv(j.value("conv", std::string("zero"))));
    ConvexPolygon P;
    if (kind == "hodge") {
        P = hodge_infinity(spec);
    } else if (kind == "arith-delta") {
        P = p_delta_u(spec);
    } else {
        P = p_dk_u(spec);
    }
    if (fl.format == "csv") {
        emit(io::to_csv(P), fl.out);
    } else {
        json o = io::to_json(P);
        o["kind"] = kind;
        o["twist"] = io::to_json(r.tw);
        o["d"] = r.d;
        if (kind == "arith-dk") o["k"] = r.k;
        emit(o.dump(2) + "\n", fl.out);
    }
    return 0;
}

int cmd_lfun(const JobFlags& fl) {
    json j = fl.job();
    const Resolved r = resolve(j);
    if (!j.contains("f")) throw hn::config_error("lfun needs the polynomial (--f or \"f\" in the job)");
    const PolySpec f = io::poly_from_json(r.F, r.d, j.at("f"));
    const int K = j.at("precision").value("K", 6);
    const auto L = l_poly(f, r.tw, j.at("m").get<unsigned>(), K);
    json o = io::to_json(L);
    o["field"] = io::to_json(*r.F);
    o["twist"] = io::to_json(r.tw);
    o["poly"] = io::to_json(f);
    const PolygonSpec spec{r.tw, f.d, f.k, static_cast<int>(L.degree)};
    o["bound"] = io::to_json((f.k ? p_dk_u(spec) : p_delta_u(spec)).scaled(Rat(static_cast<i64>(r.tw.b))));
    emit(o.dump(2) + "\n", fl.out);
    return 0;
}

int cmd_cfun(const JobFlags& fl) {
    json j = fl.job();
    const Resolved r = resolve(j);
    if (!j.contains("f")) throw hn::config_error("cfun-dwork needs the polynomial (--f or \"f\" in the job)");
    const PolySpec f = io::poly_from_json(r.F, r.d, j.at("f"));
    const int M = j.at("M").get<int>();
    CFunctionOptions opt;
    opt.adaptive = j.value("adaptive", true);
    const json& pr = j.at("precision");
    std::optional<DworkParams> start;
    if (pr.contains("J") || pr.contains("N_pi") || pr.contains("K")) {
        start = DworkParams{pr.value("J", static_cast<int>(f.d) * (M + 8)), pr.value("N_pi", initial_pi_truncation(f, r.tw, M)),
                            pr.value("K", 20)};
    }
    const auto res = c_function_np(f, r.tw, M, opt, start);
    json o = io::to_json(res);
    o["field"] = io::to_json(*r.F);
    o["twist"] = io::to_json(r.tw);
    o["poly"] = io::to_json(f);
    emit(o.dump(2) + "\n", fl.out);
    // fixed parameters cannot be stability-checked, so only conclusiveness counts there
    return !res.conclusive || (opt.adaptive && !res.stable) ? 2 : 0;
}

struct VerifyFlags {
    std::string suite, config, out, p, d, k, b, q, u, conv;
    int M = -1, trials = -1;
    unsigned m = 1;
    u64 seed = 7;
    bool seed_set = false, allow_inconclusive = false, timing = false;
    std::string source = "dwork";
};

hn::JobConfig verify_config(const VerifyFlags& fl) {
    hn::JobConfig c;
    if (!fl.config.empty()) c = hn::config_from_json(read_json_file(fl.config));
    if (c.suite.empty()) c.suite = fl.suite;
    auto& g = c.grid;
    if (g.p.empty() && !fl.p.empty()) g.p = parse_list(fl.p);
    if (g.d.empty() && !fl.d.empty()) g.d = parse_list(fl.d);
    if (g.k.empty() && !fl.k.empty()) g.k = parse_list(fl.k);
    if (g.b.empty() && !fl.b.empty())
        for (u64 b : parse_list(fl.b)) g.b.push_back(static_cast<unsigned>(b));
    if (g.b.empty() && !fl.q.empty()) {
        if (g.p.size() != 1) throw hn::config_error("--q needs exactly one --p");
        std::stringstream ss(fl.q);
        std::string item;
        while (std::getline(ss, item, ',')) g.b.push_back(io::parse_q(g.p.front(), json(item)));
    }
    if (!g.u && !fl.u.empty() && fl.u != "all") {
        const auto colon = fl.u.find(':');
        if (colon == std::string::npos) {
            g.u = std::pair<i64, i64>{std::stoll(fl.u), std::stoll(fl.u)};
        } else {
            g.u = std::pair<i64, i64>{std::stoll(fl.u.substr(0, colon)), std::stoll(fl.u.substr(colon + 1))};
        }
    }
    if (g.conventions.empty() && !fl.conv.empty()) {
        std::stringstream ss(fl.conv);
        std::string item;
        while (std::getline(ss, item, ',')) g.conventions.push_back(hn::parse_conv(item));
    }
    if (g.M < 0) g.M = fl.M;
    if (fl.m != 1) g.m = fl.m;
    if (c.trials < 0) c.trials = fl.trials;
    if (fl.seed_set) c.seed = fl.seed;
    c.allow_inconclusive = c.allow_inconclusive || fl.allow_inconclusive;
    return c;
}

int cmd_verify(const VerifyFlags& fl) {
    const hn::JobConfig cfg = verify_config(fl);
    if (cfg.suite.empty()) throw hn::config_error("--suite is required");
    const auto rep = hn::run_suite(cfg);
    emit(rep.to_json(fl.timing).dump(2) + "\n", fl.out);
    std::cerr << rep.suite << ": " << rep.passed << " pass, " << rep.failed << " fail, " << rep.inconclusive << " inconclusive ("
              << rep.wall_seconds << " s)\n";
    return rep.exit_code(cfg.allow_inconclusive);
}

int cmd_sweep(const VerifyFlags& fl) {
    const hn::JobConfig cfg = verify_config(fl);
    emit(hn::sweep_csv(cfg, fl.source), fl.out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Twisted T-adic exponential sums: polygons, L-functions and Dwork C-functions"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(hn::kVersion));

    JobFlags poly_fl, lfun_fl, cfun_fl;
    std::string kind;
    int points = 4;
    auto* poly = app.add_subcommand("polygon", "twisted Hodge or arithmetic polygon");
    poly->add_option("kind", kind, "hodge | arith-delta | arith-dk")->required()->check(CLI::IsMember({"hodge", "arith-delta", "arith-dk"}));
    add_job_flags(poly, poly_fl, false);
    poly->add_option("--points", points, "number of slopes");
    poly->add_option("--format", poly_fl.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

    auto* lfun = app.add_subcommand("lfun", "L-polynomial at T = pi_m by direct enumeration");
    add_job_flags(lfun, lfun_fl, true);
    lfun->add_option("--m", lfun_fl.m, "pi_m specialization");
    lfun->add_option("--K", lfun_fl.K, "p-adic precision");

    auto* cfun = app.add_subcommand("cfun-dwork", "T-adic Newton polygon of the C-function from the Dwork matrix");
    add_job_flags(cfun, cfun_fl, true);
    cfun->add_option("--M", cfun_fl.M, "polygon extent");
    cfun->add_option("--J", cfun_fl.J, "matrix truncation");
    cfun->add_option("--N", cfun_fl.N, "pi-adic truncation");
    cfun->add_option("--K", cfun_fl.K, "p-adic precision");
    cfun->add_flag("--no-adaptive", cfun_fl.no_adaptive, "single run at the given precision");

    VerifyFlags vf, sf;
    auto add_grid = [](CLI::App* sc, VerifyFlags& f) {
        sc->add_option("--config", f.config, "job JSON; its keys take precedence over flags");
        sc->add_option("--p", f.p, "comma-separated primes");
        sc->add_option("--d", f.d, "comma-separated degrees");
        sc->add_option("--k", f.k, "comma-separated second exponents");
        sc->add_option("--b", f.b, "comma-separated extension degrees b (q = p^b)");
        sc->add_option("--q", f.q, "comma-separated q values, alternative to --b");
        sc->add_option("--u", f.u, "twist u, range lo:hi, or all");
        sc->add_option("--conv", f.conv, "trivial-class conventions: zero,full");
        sc->add_option("--M", f.M, "polygon extent (or n_max for gamma-orders, m_max for key-estimate)");
        sc->add_option("--m", f.m, "pi_m specialization for L-functions");
        sc->add_option("--out", f.out, "output path (default stdout)");
    };
    auto* verify = app.add_subcommand("verify", "run a verification suite");
    verify->add_option("--suite", vf.suite, "suite name")->check(CLI::IsMember(hn::suite_names()));
    add_grid(verify, vf);
    verify->add_option("--trials", vf.trials, "number of random trials");
    verify->add_option("--seed", vf.seed, "seed for randomized suites")->each([&](const std::string&) { vf.seed_set = true; });
    verify->add_flag("--allow-inconclusive", vf.allow_inconclusive, "exit 0 when only inconclusive cases remain");
    verify->add_flag("--timing", vf.timing, "include wall time in the report");

    auto* sweep = app.add_subcommand("sweep", "CSV dataset of polygons and Newton polygons over a grid");
    add_grid(sweep, sf);
    sweep->add_option("--source", sf.source, "dwork or lfun")->check(CLI::IsMember({"dwork", "lfun"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    try {
        if (*poly) return cmd_polygon(kind, poly_fl, points);
        if (*lfun) return cmd_lfun(lfun_fl);
        if (*cfun) return cmd_cfun(cfun_fl);
        if (*verify) return cmd_verify(vf);
        if (*sweep) return cmd_sweep(sf);
    } catch (const hn::config_error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::length_error& e) {
        std::cerr << "infeasible: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
