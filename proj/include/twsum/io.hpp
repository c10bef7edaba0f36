#ifndef TWSUM_IO_HPP
#define TWSUM_IO_HPP

#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "charsum.hpp"
#include "dwork.hpp"
#include "polygons.hpp"

namespace twsum::io {

using nlohmann::json;

inline json to_json(const Rat& r) { return r.str(); }

inline json to_json(const Valuation& v) {
    if (v.determinate) return v.value.str();
    return json{{"atLeast", v.value.str()}, {"indeterminate", true}};
}

inline json to_json(const ConvexPolygon& P) {
    json slopes = json::array(), points = json::array();
    for (const auto& s : P.slopes()) slopes.push_back(s.str());
    const auto vals = P.values();
    for (std::size_t i = 0; i < vals.size(); ++i) points.push_back(json::array({i, vals[i].str()}));
    return json{{"slopes", slopes}, {"points", points}};
}

inline ConvexPolygon polygon_from_json(const json& j) {
    std::vector<Rat> slopes;
    for (const auto& s : j.at("slopes")) slopes.push_back(Rat::parse(s.get<std::string>()));
    return ConvexPolygon(std::move(slopes));
}

/// m,value,slope rows; the slope column is empty on the last row.
inline std::string to_csv(const ConvexPolygon& P) {
    std::ostringstream os;
    os << "m,value,slope\n";
    const auto vals = P.values();
    for (std::size_t i = 0; i < vals.size(); ++i) {
        os << i << ',' << vals[i].str() << ',';
        if (i < P.slopes().size()) os << P.slopes()[i].str();
        os << '\n';
    }
    return os.str();
}

inline json to_json(const FieldCtx& F) {
    return json{{"p", F.p()}, {"n", F.n()}, {"modulus", F.modulus()}, {"generator", F.generator().str()}};
}

inline json to_json(const TwistData& t) {
    return json{{"p", t.p}, {"b", t.b}, {"q", t.q}, {"u", t.u}, {"digits", t.digits}, {"s", t.s}};
}

inline json to_json(const PolySpec& f) {
    json coeffs = json::object();
    for (u64 i : f.support()) coeffs["a" + std::to_string(i)] = f.coeff(i).str();
    return json{{"d", f.d}, {"k", f.k}, {"f", coeffs}};
}

/// Z_q element as its coefficient list on the tau power basis.
inline json to_json(const ZqElem& z) { return z.coeffs(); }

inline json to_json(const PimElem& z) {
    json c = json::array();
    for (int j = 0; j < z.e(); ++j) c.push_back(to_json(z.coeff(j)));
    return json{{"basis", "pi_m^j"}, {"coeffs", c}, {"precision", z.prec()}};
}

inline json to_json(const LFunctionData& L) {
    json coeffs = json::array(), vals = json::array();
    for (const auto& c : L.coeffs) coeffs.push_back(to_json(c));
    for (const auto& v : L.valuations) vals.push_back(to_json(v));
    return json{{"m", L.m},
                {"degree", L.degree},
                {"coefficients", coeffs},
                {"valuations", vals},
                {"newton", to_json(L.newton.polygon)},
                {"conclusive", L.conclusive}};
}

inline json to_json(const DworkParams& prm) { return json{{"J", prm.J}, {"N_pi", prm.N}, {"K", prm.K}}; }

inline json to_json(const CFunctionResult& r) {
    json vals = json::array();
    for (const auto& v : r.valuations) vals.push_back(to_json(v));
    json diag = to_json(r.params);
    diag["stable"] = r.stable;
    diag["conclusive"] = r.conclusive;
    diag["rounds"] = r.rounds;
    diag["indeterminate"] = r.indeterminate;
    return json{{"polygon", to_json(r.polygon)}, {"valuations", vals}, {"diagnostics", diag}};
}

/// Parses "p^b", "121" or a bare integer into b, checking that q is a power of p.
inline unsigned parse_q(u64 p, const json& q) {
    u64 value = 0;
    if (q.is_number_unsigned() || q.is_number_integer()) {
        value = q.get<u64>();
    } else {
        const std::string s = q.get<std::string>();
        const auto caret = s.find('^');
        if (caret == std::string::npos) {
            value = std::stoull(s);
        } else {
            if (std::stoull(s.substr(0, caret)) != p) throw std::invalid_argument("q must be a power of p");
            const unsigned b = static_cast<unsigned>(std::stoul(s.substr(caret + 1)));
            if (b == 0) throw std::invalid_argument("q exponent must be >= 1");
            return b;
        }
    }
    unsigned b = 0;
    u64 acc = 1;
    while (acc < value) {
        acc *= p;
        ++b;
    }
    if (acc != value || b == 0) throw std::invalid_argument("q = " + std::to_string(value) + " is not a power of p");
    return b;
}

/// Reads {"a1": "...", "a2": "..."} into a PolySpec over `field`.
inline PolySpec poly_from_json(const FieldPtr& field, u64 d, const json& f) {
    std::map<u64, FieldElem> coeffs;
    for (const auto& [key, val] : f.items()) {
        if (key.size() < 2 || key[0] != 'a') throw std::invalid_argument("polynomial keys look like a1, a2, ...");
        const u64 i = std::stoull(key.substr(1));
        coeffs.emplace(i, field->parse(val.is_string() ? val.get<std::string>() : std::to_string(val.get<i64>())));
    }
    return make_poly(field, d, coeffs);
}

}  // namespace twsum::io

#endif  // TWSUM_IO_HPP
