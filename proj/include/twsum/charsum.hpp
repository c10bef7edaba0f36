#ifndef TWSUM_CHARSUM_HPP
#define TWSUM_CHARSUM_HPP

#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "ffield.hpp"
#include "padic.hpp"
#include "polygons.hpp"

namespace twsum {

/// f(x) = a_d x^d + sum_{i=1}^{k} a_i x^i over F_q, with a_d a_k != 0.
struct PolySpec {
    FieldPtr field;
    u64 d = 0;
    u64 k = 0;                    ///< 0 for a pure monomial a_d x^d
    std::vector<FieldElem> a;     ///< a[0..d], a[0] = 0

    const FieldElem& coeff(u64 i) const { return a[static_cast<std::size_t>(i)]; }
    std::vector<u64> support() const {
        std::vector<u64> s;
        for (u64 i = 1; i <= d; ++i)
            if (!a[static_cast<std::size_t>(i)].is_zero()) s.push_back(i);
        return s;
    }
    FieldElem eval(const FieldElem& x) const {
        FieldElem acc = x.ctx()->zero();
        for (u64 i = d + 1; i-- > 0;) acc = acc * x + a[static_cast<std::size_t>(i)];
        return acc;
    }
};

/// Builds and validates a PolySpec from (exponent, coefficient) pairs.
inline PolySpec make_poly(FieldPtr field, u64 d, const std::map<u64, FieldElem>& coeffs) {
    if (d == 0) throw std::invalid_argument("PolySpec: degree must be >= 1");
    PolySpec f;
    f.field = field;
    f.d = d;
    f.a.assign(static_cast<std::size_t>(d) + 1, field->zero());
    for (const auto& [i, c] : coeffs) {
        if (i == 0 && !c.is_zero()) throw std::invalid_argument("PolySpec: constant term must be zero");
        if (i > d) throw std::invalid_argument("PolySpec: exponent above degree");
        f.a[static_cast<std::size_t>(i)] = field->elem(c.coeffs());
    }
    if (f.a[static_cast<std::size_t>(d)].is_zero()) throw std::invalid_argument("PolySpec: a_d must be nonzero");
    for (u64 i = d - 1; i >= 1; --i) {
        if (!f.a[static_cast<std::size_t>(i)].is_zero()) {
            f.k = i;
            break;
        }
    }
    return f;
}

/// Everything needed to enumerate f over F_{q^l}: the tower, the unramified
/// lift Z_{q^l}/p^K and the Teichmuller lifts of the embedded coefficients.
class ExtensionLift {
public:
    ExtensionLift(const PolySpec& f, unsigned l, int K)
        : tower_(f.field, l), zql_(ZqCtx::build(tower_.ext(), K)) {
        for (u64 i : f.support()) {
            terms_.push_back(i);
            lifts_.push_back(zql_->teichmuller(tower_.embed(f.coeff(i))));
        }
        W_ = zql_->teich_generator();
    }

    const FieldTower& tower() const { return tower_; }
    const ZqPtr& zq() const { return zql_; }

    /// Tr_{Z_{q^l}/Z_p}(f^(omega(x))) mod p^K for omega(x) given.
    u64 trace_of(const ZqElem& x_hat) const {
        ZqElem acc = zql_->zero();
        ZqElem pw = zql_->one();
        u64 deg = 0;
        for (std::size_t t = 0; t < terms_.size(); ++t) {
            pw = pw * x_hat.pow(terms_[t] - deg);
            deg = terms_[t];
            acc += lifts_[t] * pw;
        }
        return acc.trace();
    }

    /// Visits every unit x = G^e of F_{q^l}: callback(e, trace exponent mod p^K).
    template <class Fn>
    void for_each_unit(Fn&& fn) const {
        const u64 order = tower_.ext()->size() - 1;
        ZqElem x_hat = zql_->one();
        for (u64 e = 0; e < order; ++e) {
            fn(e, trace_of(x_hat));
            x_hat = x_hat * W_;
        }
    }

private:
    FieldTower tower_;
    ZqPtr zql_;
    std::vector<u64> terms_;
    std::vector<ZqElem> lifts_;
    ZqElem W_;
};

/// Tr_{Q_{q^l}/Q_p}(f^(x^)) mod p^m for x in F_{q^l} with Teichmuller-lifted coefficients.
inline u64 witt_trace_exponent(const FieldElem& x, const PolySpec& f, const FieldTower& tower, int m) {
    if (x.is_zero()) throw std::domain_error("witt_trace_exponent: x must be a unit");
    auto zql = ZqCtx::build(tower.ext(), m);
    ZqElem acc = zql->zero();
    const ZqElem xh = zql->teichmuller(x);
    for (u64 i : f.support()) acc += zql->teichmuller(tower.embed(f.coeff(i))) * xh.pow(i);
    return acc.trace();
}

inline constexpr u64 kDefaultEnumerationGuard = u64(1) << 24;

/// chi(y) = omega(y)^{-u} evaluated at y = g^c: the power w^{(-u c) mod (q-1)} of omega(g).
inline u64 character_exponent(const TwistData& tw, u64 c) {
    const u64 qm1 = tw.q - 1;
    if (qm1 == 1) return 0;
    const u64 uc = static_cast<u64>(static_cast<u128>(tw.u % qm1) * (c % qm1) % qm1);
    return (qm1 - uc) % qm1;
}

/// S_{f,chi}(l, pi_m) = sum over x in F_{q^l}^x of chi(Norm x) zeta_{p^m}^{Tr f(x)}.
inline PimElem s_sum(const PolySpec& f, const TwistData& tw, unsigned l, const std::shared_ptr<const PimCtx>& pim,
                     u64 guard = kDefaultEnumerationGuard) {
    const ZqPtr& zq = pim->zq();
    if (zq->field()->modulus() != f.field->modulus() || zq->p() != tw.p || zq->b() != tw.b)
        throw std::invalid_argument("s_sum: context field does not match the polynomial's field");
    const u64 size = nt::checked_pow(tw.q, l);
    if (size > guard) throw std::length_error("s_sum: q^l = " + std::to_string(size) + " exceeds enumeration guard");
    const u64 pm = nt::checked_pow(tw.p, pim->m());
    ExtensionLift lift(f, l, static_cast<int>(pim->m()));
    const u64 qm1 = tw.q - 1;
    // counts[t][c]: number of x with exponent t and chi(Norm x) = w^c
    std::vector<std::vector<u64>> counts(pm, std::vector<u64>(qm1, 0));
    lift.for_each_unit([&](u64 e, u64 t) {
        const u64 c = character_exponent(tw, lift.tower().norm_log(e));
        ++counts[t % pm][c];
    });
    const ZqElem& w = zq->teich_generator();
    std::vector<ZqElem> wpow{zq->one()};
    for (u64 c = 1; c < qm1; ++c) wpow.push_back(wpow.back() * w);
    PimElem total = PimElem::from_zq(pim, zq->zero());
    PimElem zeta_t = PimElem::from_zq(pim, zq->one());
    const PimElem zeta = zeta_t + PimElem::uniformizer(pim);
    for (u64 t = 0; t < pm; ++t) {
        ZqElem acc = zq->zero();
        for (u64 c = 0; c < qm1; ++c)
            if (counts[t][c] != 0) acc += wpow[c] * zq->from_int(static_cast<i64>(counts[t][c]));
        if (!acc.is_zero()) total += zeta_t.scaled(acc);
        zeta_t = zeta_t * zeta;
    }
    return total;
}

/// S_{f,chi}(l, T) mod (T^N, p^K). Exponents are computed at Witt length
/// K + ord_p((N-1)!) so that every coefficient keeps K digits.
inline TSeries s_series(const PolySpec& f, const TwistData& tw, unsigned l, int N, int K,
                        u64 guard = kDefaultEnumerationGuard) {
    const u64 size = nt::checked_pow(tw.q, l);
    if (size > guard) throw std::length_error("s_series: q^l = " + std::to_string(size) + " exceeds enumeration guard");
    const int Kp = K + nt::vp_factorial(static_cast<u64>(std::max(N - 1, 0)), tw.p);
    if (Kp > nt::max_precision(tw.p)) throw precision_error("s_series: working precision exceeds 63-bit range");
    auto zq = ZqCtx::build(f.field, Kp);
    ExtensionLift lift(f, l, Kp);
    const u64 qm1 = tw.q - 1;
    std::map<u64, std::vector<u64>> by_exponent;
    lift.for_each_unit([&](u64 e, u64 t) {
        auto& row = by_exponent[t];
        if (row.empty()) row.assign(qm1, 0);
        ++row[character_exponent(tw, lift.tower().norm_log(e))];
    });
    const ZqElem& w = zq->teich_generator();
    std::vector<ZqElem> wpow{zq->one()};
    for (u64 c = 1; c < qm1; ++c) wpow.push_back(wpow.back() * w);
    TSeries out{zq, std::vector<ZqElem>(static_cast<std::size_t>(N), zq->zero()), std::vector<int>(static_cast<std::size_t>(N), K)};
    for (const auto& [t, row] : by_exponent) {
        ZqElem chi_sum = zq->zero();
        for (u64 c = 0; c < qm1; ++c)
            if (row[c] != 0) chi_sum += wpow[c] * zq->from_int(static_cast<i64>(row[c]));
        if (chi_sum.is_zero()) continue;
        const TSeries bin = binom_series(zq, t, Kp, N);
        for (int k = 0; k < N; ++k) {
            const auto i = static_cast<std::size_t>(k);
            out.coeffs[i] += bin.coeffs[i] * chi_sum;
            out.prec[i] = std::min(out.prec[i], bin.prec[i]);
        }
    }
    return out;
}

/// L_{f,chi}(s, pi_m) as a polynomial with coefficients in Z_q[pi_m].
struct LFunctionData {
    unsigned m = 1;
    u64 degree = 0;                      ///< p^{m-1} d
    std::vector<PimElem> coeffs;         ///< c_0 .. c_{terms}
    std::vector<Valuation> valuations;   ///< ord_{pi_m} c_i
    NewtonPolygon newton;                ///< NP on [0, degree]
    bool conclusive = true;              ///< indeterminate points cannot lower the NP
    std::vector<PimElem> power_sums;     ///< S_1 .. S_terms
};

/// Coefficients of exp(sum_l S_l s^l / l) from k c_k = sum_{j=1}^k S_j c_{k-j}.
/// `extra` computes that many coefficients past the degree (they must vanish).
inline LFunctionData l_poly(const PolySpec& f, const TwistData& tw, unsigned m, int K, unsigned extra = 0,
                            u64 guard = kDefaultEnumerationGuard) {
    if (f.d % tw.p == 0) throw std::invalid_argument("l_poly: p divides d");
    const u64 D = nt::checked_pow(tw.p, m - 1) * f.d;
    const u64 terms = D + extra;
    // over-provision for the divisions by k <= terms
    const int loss = nt::vp_factorial(terms, tw.p);
    const int Kw = K + loss;
    if (Kw > nt::max_precision(tw.p)) throw precision_error("l_poly: working precision exceeds 63-bit range");
    auto zq = ZqCtx::build(f.field, Kw);
    auto pim = std::make_shared<const PimCtx>(zq, m);
    LFunctionData out;
    out.m = m;
    out.degree = D;
    for (u64 l = 1; l <= terms; ++l) out.power_sums.push_back(s_sum(f, tw, static_cast<unsigned>(l), pim, guard));
    out.coeffs.push_back(PimElem::from_zq(pim, zq->one()));
    for (u64 k = 1; k <= terms; ++k) {
        PimElem acc = PimElem::from_zq(pim, zq->zero());
        for (u64 j = 1; j <= k; ++j) acc += out.power_sums[j - 1] * out.coeffs[k - j];
        out.coeffs.push_back(acc.divided_by(k));
    }
    for (const auto& c : out.coeffs) out.valuations.push_back(c.ord());
    const auto vnp = np_from_valuations(std::vector<Valuation>(out.valuations.begin(), out.valuations.begin() + static_cast<std::ptrdiff_t>(D) + 1));
    out.newton = vnp.np;
    out.conclusive = vnp.conclusive;
    return out;
}

/// NP of L on [0, extent]; there it coincides with the NP of C(s, pi_m).
inline ConvexPolygon l_to_c_np(const LFunctionData& L, int extent) {
    if (extent < 0 || static_cast<u64>(extent) > L.degree)
        throw std::out_of_range("l_to_c_np: extent beyond the degree of L");
    if (!L.conclusive) throw precision_error("l_to_c_np: Newton polygon has indeterminate points");
    return L.newton.polygon.truncated(extent);
}

}  // namespace twsum

#endif  // TWSUM_CHARSUM_HPP
