#ifndef TWSUM_POLYGONS_HPP
#define TWSUM_POLYGONS_HPP

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ffield.hpp"
#include "rational.hpp"

namespace twsum {

/// Piecewise-linear function on [0, n] with value 0 at 0, given by its slope on
/// each [i, i+1].
class ConvexPolygon {
public:
    ConvexPolygon() = default;
    explicit ConvexPolygon(std::vector<Rat> slopes) : slopes_(std::move(slopes)) {}

    const std::vector<Rat>& slopes() const { return slopes_; }
    int extent() const { return static_cast<int>(slopes_.size()); }

    /// Value at integer abscissa m <= extent().
    Rat value(int m) const {
        if (m < 0 || m > extent()) throw std::out_of_range("ConvexPolygon::value: abscissa outside polygon");
        Rat v = 0;
        for (int i = 0; i < m; ++i) v += slopes_[static_cast<std::size_t>(i)];
        return v;
    }
    std::vector<Rat> values() const {
        std::vector<Rat> v{Rat(0)};
        for (const Rat& s : slopes_) v.push_back(v.back() + s);
        return v;
    }
    bool is_convex() const {
        for (std::size_t i = 1; i < slopes_.size(); ++i)
            if (slopes_[i] < slopes_[i - 1]) return false;
        return true;
    }
    ConvexPolygon scaled(const Rat& c) const {
        std::vector<Rat> s;
        s.reserve(slopes_.size());
        for (const Rat& x : slopes_) s.push_back(x * c);
        return ConvexPolygon(std::move(s));
    }
    ConvexPolygon truncated(int n) const {
        return ConvexPolygon(std::vector<Rat>(slopes_.begin(), slopes_.begin() + std::min(n, extent())));
    }
    /// Integer abscissae where the slope changes, plus both endpoints.
    std::vector<int> vertices() const {
        std::vector<int> v{0};
        for (int i = 1; i < extent(); ++i)
            if (slopes_[static_cast<std::size_t>(i)] != slopes_[static_cast<std::size_t>(i - 1)]) v.push_back(i);
        if (extent() > 0) v.push_back(extent());
        return v;
    }

    friend bool operator==(const ConvexPolygon&, const ConvexPolygon&) = default;

private:
    std::vector<Rat> slopes_;
};

/// A point for Newton-polygon extraction; an empty ordinate means infinite or
/// indeterminate and is left out of the hull.
struct HullPoint {
    int index = 0;
    std::optional<Rat> value;
};

struct NewtonPolygon {
    ConvexPolygon polygon;
    std::vector<int> excluded;  ///< indices whose ordinate was infinite or indeterminate
};

/// Lower convex hull through (0, 0) of the finite points.
inline NewtonPolygon np_from_points(std::vector<HullPoint> points) {
    std::sort(points.begin(), points.end(), [](const HullPoint& a, const HullPoint& b) { return a.index < b.index; });
    for (std::size_t i = 1; i < points.size(); ++i)
        if (points[i].index == points[i - 1].index) throw std::invalid_argument("np_from_points: duplicate index");
    if (points.empty() || points.front().index != 0 || !points.front().value)
        throw std::invalid_argument("np_from_points: point at index 0 is required");
    NewtonPolygon out;
    std::vector<std::pair<int, Rat>> hull;
    for (const auto& pt : points) {
        if (!pt.value) {
            out.excluded.push_back(pt.index);
            continue;
        }
        const std::pair<int, Rat> cur{pt.index, *pt.value};
        while (hull.size() >= 2) {
            const auto& a = hull[hull.size() - 2];
            const auto& b = hull.back();
            // drop b unless it lies strictly below segment a-cur
            const Rat lhs = (b.second - a.second) * Rat(cur.first - a.first);
            const Rat rhs = (cur.second - a.second) * Rat(b.first - a.first);
            if (lhs >= rhs) {
                hull.pop_back();
            } else {
                break;
            }
        }
        hull.push_back(cur);
    }
    std::vector<Rat> slopes;
    for (std::size_t i = 1; i < hull.size(); ++i) {
        const Rat s = (hull[i].second - hull[i - 1].second) / Rat(hull[i].first - hull[i - 1].first);
        for (int x = hull[i - 1].first; x < hull[i].first; ++x) slopes.push_back(s);
    }
    out.polygon = ConvexPolygon(std::move(slopes));
    return out;
}

/// Newton polygon of points (i, v_i), i = 0..n-1. Indeterminate valuations are
/// left out of the hull; the result is conclusive when every such point's lower
/// bound lies on or above the hull and the last point is determinate.
struct ValuedNewtonPolygon {
    NewtonPolygon np;
    bool conclusive = true;
};

inline ValuedNewtonPolygon np_from_valuations(const std::vector<Valuation>& vals) {
    std::vector<HullPoint> pts;
    for (std::size_t i = 0; i < vals.size(); ++i)
        pts.push_back({static_cast<int>(i), vals[i].determinate ? std::optional<Rat>(vals[i].value) : std::nullopt});
    ValuedNewtonPolygon out{np_from_points(std::move(pts)), true};
    const int ext = out.np.polygon.extent();
    for (int i : out.np.excluded) {
        if (i > ext || vals[static_cast<std::size_t>(i)].value < out.np.polygon.value(i)) out.conclusive = false;
    }
    return out;
}

/// Parameters of Delta = [0, d], the twist u and the second exponent k.
struct PolygonSpec {
    TwistData twist;
    u64 d = 1;
    u64 k = 0;  ///< 0 when the second-highest exponent is irrelevant
    int M = 0;

    u64 p() const { return twist.p; }
    unsigned b() const { return twist.b; }
    u64 q() const { return twist.q; }
};

inline PolygonSpec make_spec(u64 p, unsigned b, u64 d, u64 k, i64 u, int M,
                             TrivialDigits conv = TrivialDigits::Zero) {
    if (d == 0) throw std::invalid_argument("polygon spec: d must be >= 1");
    if (k != 0 && k >= d) throw std::invalid_argument("polygon spec: k must satisfy 1 <= k <= d-1");
    if (M < 0) throw std::invalid_argument("polygon spec: M must be >= 0");
    return PolygonSpec{make_twist(p, b, u, conv), d, k, M};
}

/// First M slopes of the infinite u-twisted Hodge polygon of [0, d].
inline ConvexPolygon hodge_infinity(const PolygonSpec& s) {
    const u64 q = s.q();
    const u64 qm1 = q - 1;
    const unsigned b = s.b();
    const std::size_t need = static_cast<std::size_t>(b) * static_cast<std::size_t>(s.M);
    std::vector<u64> vs;  // lattice points v, degree v / ((q-1) d)
    u64 pu = s.twist.u % qm1;
    for (unsigned i = 0; i < b; ++i) {
        for (std::size_t t = 0; t < need; ++t) vs.push_back(pu + t * qm1);
        pu = pu * s.p() % qm1;
    }
    std::sort(vs.begin(), vs.end());
    std::vector<Rat> slopes;
    const i64 den = static_cast<i64>(qm1 * s.d * b);
    for (int i = 0; i < s.M; ++i) {
        i64 sum = 0;
        for (unsigned j = 0; j < b; ++j) sum += static_cast<i64>(vs[static_cast<std::size_t>(i) * b + j]);
        slopes.emplace_back(sum, den);
    }
    return ConvexPolygon(std::move(slopes));
}

/// delta^{(i)}(n): 1 iff p l = n - u_{b-i} (mod d) for some integer 0 <= l < d{n/d}.
inline int delta_in(const PolygonSpec& s, unsigned i, u64 n) {
    const i64 d = static_cast<i64>(s.d);
    const Rat frac = Rat(static_cast<i64>(n), d).frac();
    const i64 bound = (frac * Rat(d)).floor();  // d{n/d} is an integer
    const i64 target = static_cast<i64>(n) - static_cast<i64>(s.twist.digit(static_cast<i64>(s.b()) - i));
    for (i64 l = 0; l < bound; ++l) {
        i64 diff = static_cast<i64>(s.p()) * l - target;
        if (((diff % d) + d) % d == 0) return 1;
    }
    return 0;
}

/// Twisted arithmetic polygon p_{Delta,u}: slope at n is
/// (1/b) sum_i (ceil(((p-1) n + u_{b-i}) / d) - delta^{(i)}(n)).
inline ConvexPolygon p_delta_u(const PolygonSpec& s) {
    const unsigned b = s.b();
    const i64 d = static_cast<i64>(s.d);
    std::vector<Rat> slopes;
    for (int n = 0; n < s.M; ++n) {
        Rat sum = 0;
        for (unsigned i = 1; i <= b; ++i) {
            const i64 ub = static_cast<i64>(s.twist.digit(static_cast<i64>(b) - i));
            const Rat x(static_cast<i64>(s.p() - 1) * n + ub, d);
            sum += Rat(x.ceil() - delta_in(s, i, static_cast<u64>(n)));
        }
        slopes.push_back(sum / Rat(b));
    }
    return ConvexPolygon(std::move(slopes));
}

namespace detail {

/// r_a = d{a/d}
inline i64 r_of(i64 a, i64 d) { return (Rat(a, d).frac() * Rat(d)).floor(); }
/// r_{a,i} = d{(p a + u_{b-i})/d}
inline i64 r_of_i(const PolygonSpec& s, i64 a, unsigned i) {
    const i64 ub = static_cast<i64>(s.twist.digit(static_cast<i64>(s.b()) - i));
    return r_of(static_cast<i64>(s.p()) * a + ub, static_cast<i64>(s.d));
}
inline Rat frac_over(i64 x, i64 k) { return Rat(x, k).frac(); }

/// sum_{j=0}^{r} (1[{r_{j,i}/k} > {r/k}] - 1[{r_j/k} > {r/k}]) for one digit index i.
inline i64 indicator_block(const PolygonSpec& s, unsigned i, i64 r) {
    const i64 d = static_cast<i64>(s.d), k = static_cast<i64>(s.k);
    const Rat ref = frac_over(r, k);
    i64 total = 0;
    for (i64 j = 0; j <= r; ++j) {
        if (frac_over(r_of_i(s, j, i), k) > ref) ++total;
        if (frac_over(r_of(j, d), k) > ref) --total;
    }
    return total;
}

}  // namespace detail

/// Slope varpi_{d,[0,k],u}(a) of the polygon of {d} U [0, k]. At a = 0 the
/// block indexed by r_{a-1} is an empty sum.
inline Rat varpi(const PolygonSpec& s, i64 a) {
    if (s.k < 1 || s.k >= s.d) throw std::invalid_argument("p_dk_u: k must satisfy 1 <= k <= d-1");
    const unsigned b = s.b();
    const i64 d = static_cast<i64>(s.d), k = static_cast<i64>(s.k), p = static_cast<i64>(s.p());
    const i64 ra = detail::r_of(a, d);
    i64 sum = 0;
    for (unsigned i = 1; i <= b; ++i) {
        const i64 ub = static_cast<i64>(s.twist.digit(static_cast<i64>(b) - i));
        const i64 rai = detail::r_of_i(s, a, i);
        sum += Rat(p * a + ub, d).floor() - Rat(a, d).floor() + Rat(rai, k).floor() - Rat(ra, k).floor();
        sum += detail::indicator_block(s, i, ra);
        if (a > 0) sum -= detail::indicator_block(s, i, detail::r_of(a - 1, d));
    }
    return Rat(sum, static_cast<i64>(b));
}

/// Twisted arithmetic polygon p_{d,[0,k],u}, first M slopes.
inline ConvexPolygon p_dk_u(const PolygonSpec& s) {
    std::vector<Rat> slopes;
    for (int a = 0; a < s.M; ++a) slopes.push_back(varpi(s, a));
    return ConvexPolygon(std::move(slopes));
}

struct Domination {
    bool holds = true;
    int first_failure = -1;  ///< least failing abscissa, -1 if none
    Rat upper_value;         ///< P(first_failure)
    Rat lower_value;         ///< Q(first_failure)
    std::vector<int> equal_at;
};

/// P(m) >= Q(m) for every integer 0 <= m <= extent (values, not slopes).
inline Domination dominates(const ConvexPolygon& P, const ConvexPolygon& Q, int extent) {
    if (extent > P.extent() || extent > Q.extent())
        throw std::out_of_range("dominates: extent beyond polygon definition");
    Domination r;
    const auto pv = P.values(), qv = Q.values();
    for (int m = 0; m <= extent; ++m) {
        const auto i = static_cast<std::size_t>(m);
        if (pv[i] == qv[i]) r.equal_at.push_back(m);
        if (pv[i] < qv[i] && r.holds) {
            r.holds = false;
            r.first_failure = m;
            r.upper_value = pv[i];
            r.lower_value = qv[i];
        }
    }
    return r;
}

/// One row/column label (l, w) of the normal-basis expansion.
struct BasisIndex {
    i64 l = 0;
    unsigned w = 1;
    friend bool operator==(const BasisIndex&, const BasisIndex&) = default;
};

struct KeyEstimate {
    bool holds = false;
    bool hypothesis = false;   ///< p > d(2d+1)
    std::optional<Rat> lhs;    ///< empty when some term is +infinity
    Rat rhs;
};

/// Evaluates sum_i sum_{(l,w) in R_i} ([x/d] + ceil(d{x/d}/k)), x = p l + u_{b-i} - tau_i(l),
/// against b^2 p_{d,[0,k],u}(m). A negative x is an identically zero matrix
/// entry and counts as +infinity. tau[i][j] is the position in R[i] of the image of R[i][j].
inline KeyEstimate key_estimate_check(const PolygonSpec& s, int m, const std::vector<std::vector<BasisIndex>>& R,
                                      const std::vector<std::vector<std::size_t>>& tau) {
    const unsigned b = s.b();
    if (R.size() != b || tau.size() != b) throw std::invalid_argument("key_estimate_check: need b index sets");
    const i64 d = static_cast<i64>(s.d), k = static_cast<i64>(s.k), p = static_cast<i64>(s.p());
    KeyEstimate out;
    out.hypothesis = s.p() > s.d * (2 * s.d + 1);
    PolygonSpec sm = s;
    sm.M = m;
    out.rhs = p_dk_u(sm).value(m) * Rat(static_cast<i64>(b) * b);
    Rat lhs = 0;
    bool infinite = false;
    for (unsigned i = 1; i <= b; ++i) {
        const auto& Ri = R[i - 1];
        const auto& ti = tau[i - 1];
        if (Ri.size() != static_cast<std::size_t>(b) * m || ti.size() != Ri.size())
            throw std::invalid_argument("key_estimate_check: R_i must have b*m elements and tau_i must match");
        std::vector<bool> seen(Ri.size(), false);
        for (std::size_t t : ti) {
            if (t >= Ri.size() || seen[t]) throw std::invalid_argument("key_estimate_check: tau_i is not a permutation");
            seen[t] = true;
        }
        const i64 ub = static_cast<i64>(s.twist.digit(static_cast<i64>(b) - i));
        for (std::size_t j = 0; j < Ri.size(); ++j) {
            const i64 x = p * Ri[j].l + ub - Ri[ti[j]].l;
            if (x < 0) {
                infinite = true;
                continue;
            }
            const Rat xd(x, d);
            lhs += Rat(xd.floor()) + Rat((xd.frac() * Rat(d) / Rat(k)).ceil());
        }
    }
    if (!infinite) out.lhs = lhs;
    out.holds = infinite || lhs >= out.rhs;
    return out;
}

}  // namespace twsum

#endif  // TWSUM_POLYGONS_HPP
