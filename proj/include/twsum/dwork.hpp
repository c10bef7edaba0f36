#ifndef TWSUM_DWORK_HPP
#define TWSUM_DWORK_HPP

#include <algorithm>
#include <boost/multiprecision/cpp_int.hpp>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "charsum.hpp"
#include "padic.hpp"
#include "polygons.hpp"

namespace twsum {

/// Coefficients lambda_0..lambda_{n-1} of the Artin-Hasse exponential
/// E(t) = exp(sum_{j>=0} t^{p^j} / p^j), reduced mod p^K. Computed exactly over Q
/// from n lambda_n = sum_{p^j <= n} lambda_{n - p^j}.
inline std::vector<u64> artin_hasse(int n, u64 p, int K) {
    using boost::multiprecision::cpp_int;
    using boost::multiprecision::cpp_rational;
    if (n <= 0) return {};
    std::vector<cpp_rational> lam(static_cast<std::size_t>(n));
    lam[0] = 1;
    for (int i = 1; i < n; ++i) {
        cpp_rational acc = 0;
        for (u64 pj = 1; pj <= static_cast<u64>(i); pj *= p) acc += lam[static_cast<std::size_t>(i) - pj];
        lam[static_cast<std::size_t>(i)] = acc / i;
    }
    const Zmod z(p, K);
    const cpp_int m = z.modulus();
    std::vector<u64> out;
    out.reserve(lam.size());
    for (const auto& r : lam) {
        const cpp_int num = boost::multiprecision::numerator(r);
        const cpp_int den = boost::multiprecision::denominator(r);
        if (den % p == 0) throw std::logic_error("artin_hasse: coefficient is not p-integral");
        cpp_int nm = num % m;
        if (nm < 0) nm += m;
        const u64 dm = static_cast<u64>(den % m);
        out.push_back(z.mul(static_cast<u64>(nm), z.inv(dm)));
    }
    return out;
}

/// E(pi) - 1 as a pi-series: the value substituted for T.
inline PiSeries artin_hasse_minus_one(const ZqPtr& zq, int N) {
    const auto lam = artin_hasse(N, zq->p(), zq->K());
    PiSeries s(zq, N);
    for (int i = 1; i < N; ++i) s.set(i, zq->from_int(static_cast<i64>(lam[static_cast<std::size_t>(i)])));
    return s;
}

/// gamma_n, the coefficient of x^n in E_f(x) = E(pi a_d x^d) prod_{i<=k} E(pi a_i x^i).
struct GammaTable {
    std::vector<PiSeries> gamma;

    const PiSeries& at(i64 n) const { return gamma.at(static_cast<std::size_t>(n)); }
    i64 size() const { return static_cast<i64>(gamma.size()); }
};

/// Computes gamma_0..gamma_{count-1} mod pi^N by multiplying out the single-term
/// factors sum_t lambda_t (a^_i)^t pi^t x^{i t}.
inline GammaTable ef_gamma(const PolySpec& f, const ZqPtr& zq, i64 count, int N) {
    if (count <= 0) throw std::invalid_argument("ef_gamma: count must be positive");
    const unsigned b = zq->b();
    const auto lam = artin_hasse(N, zq->p(), zq->K());
    const auto cnt = static_cast<std::size_t>(count);
    const auto width = static_cast<std::size_t>(N) * b;
    std::vector<u64> cur(cnt * width, 0), nxt;
    cur[0] = 1;  // gamma_0 starts at 1
    for (u64 i : f.support()) {
        const ZqElem a_hat = zq->teichmuller(f.coeff(i));
        // factor terms: t with i t < count and t < N
        std::vector<std::vector<u64>> term;
        ZqElem apow = zq->one();
        for (i64 t = 0; t < N && static_cast<i64>(i) * t < count; ++t) {
            ZqElem c = apow * zq->from_int(static_cast<i64>(lam[static_cast<std::size_t>(t)]));
            term.push_back(c.coeffs());
            apow = apow * a_hat;
        }
        nxt.assign(cnt * width, 0);
        for (std::size_t n = 0; n < cnt; ++n) {
            const u64* src = cur.data() + n * width;
            for (std::size_t t = 0; t < term.size(); ++t) {
                const std::size_t n2 = n + i * t;
                if (n2 >= cnt) break;
                u64* dst = nxt.data() + n2 * width;
                for (int s = 0; s + static_cast<int>(t) < N; ++s) {
                    const u64* a = src + static_cast<std::size_t>(s) * b;
                    bool nz = false;
                    for (unsigned r = 0; r < b; ++r) nz |= a[r] != 0;
                    if (!nz) continue;
                    zq->fma(a, term[t].data(), dst + static_cast<std::size_t>(s + static_cast<int>(t)) * b);
                }
            }
        }
        cur.swap(nxt);
    }
    GammaTable g;
    g.gamma.reserve(cnt);
    for (std::size_t n = 0; n < cnt; ++n) {
        PiSeries s(zq, N);
        std::copy(cur.begin() + static_cast<std::ptrdiff_t>(n * width), cur.begin() + static_cast<std::ptrdiff_t>((n + 1) * width), s.at(0));
        s.touch(0);
        s.normalize();
        g.gamma.push_back(std::move(s));
    }
    return g;
}

/// Square matrix of pi-series, row-major.
class SeriesMatrix {
public:
    SeriesMatrix() = default;
    SeriesMatrix(ZqPtr zq, int n, int N) : zq_(std::move(zq)), n_(n), N_(N) {
        entries_.reserve(static_cast<std::size_t>(n) * n);
        for (int i = 0; i < n * n; ++i) entries_.emplace_back(zq_, N);
    }
    int size() const { return n_; }
    int N() const { return N_; }
    const ZqPtr& zq() const { return zq_; }
    PiSeries& operator()(int r, int c) { return entries_[static_cast<std::size_t>(r) * n_ + c]; }
    const PiSeries& operator()(int r, int c) const { return entries_[static_cast<std::size_t>(r) * n_ + c]; }

    SeriesMatrix frobenius(i64 k) const {
        SeriesMatrix out(zq_, n_, N_);
        for (std::size_t i = 0; i < entries_.size(); ++i) out.entries_[i] = entries_[i].frobenius(k);
        return out;
    }
    friend SeriesMatrix operator*(const SeriesMatrix& a, const SeriesMatrix& b) {
        SeriesMatrix out(a.zq_, a.n_, a.N_);
        for (int i = 0; i < a.n_; ++i)
            for (int k = 0; k < a.n_; ++k) {
                const PiSeries& x = a(i, k);
                if (x.lo() >= a.N_) continue;
                for (int j = 0; j < a.n_; ++j) {
                    const PiSeries& y = b(k, j);
                    if (y.lo() >= a.N_) continue;
                    PiSeries::fma(x, y, out(i, j));
                }
            }
        for (auto& e : out.entries_) e.normalize();
        return out;
    }
    PiSeries trace() const {
        PiSeries t(zq_, N_);
        for (int i = 0; i < n_; ++i) t += (*this)(i, i);
        t.normalize();
        return t;
    }

private:
    ZqPtr zq_;
    int n_ = 0;
    int N_ = 0;
    std::vector<PiSeries> entries_;
};

/// Truncation and precision of the Dwork matrix.
struct DworkParams {
    int J = 0;   ///< rows/columns kept
    int N = 0;   ///< pi-adic truncation
    int K = 0;   ///< p-adic precision
    friend bool operator==(const DworkParams&, const DworkParams&) = default;
};

/// gamma index p l + u_{b-i} - j of block i; negative means the entry is zero.
inline i64 block_gamma_index(const TwistData& tw, unsigned i, int l, int j) {
    return static_cast<i64>(tw.p) * l + static_cast<i64>(tw.digit(static_cast<i64>(tw.b) - i)) - j;
}

/// Number of gamma_n that can be nonzero mod pi^N: ord gamma_n >= ceil(n/d).
inline i64 gamma_count(u64 d, int N) { return static_cast<i64>(d) * N + 1; }

/// Block A^{(i)}: (l, j) entry gamma_{p l + u_{b-i} - j}, mapping the B_{p^i u} patch to B_{p^{i-1} u}.
inline SeriesMatrix psi_block(const GammaTable& g, const TwistData& tw, unsigned i, int J, int N) {
    SeriesMatrix A(g.gamma.front().ctx(), J, N);
    for (int l = 0; l < J; ++l)
        for (int j = 0; j < J; ++j) {
            const i64 n = block_gamma_index(tw, i, l, j);
            if (n < 0 || n >= g.size()) continue;
            A(l, j) = g.at(n);
            A(l, j).truncate(N);
        }
    return A;
}

/// Matrix of Psi^b on B_u. Psi is sigma^{-1}-semilinear, so Psi^b is the
/// Z_q-linear map sigma^{-1}(A^{(1)}) sigma^{-2}(A^{(2)}) ... sigma^{-b}(A^{(b)}).
inline SeriesMatrix psi_b_matrix(const GammaTable& g, const TwistData& tw, int J, int N) {
    SeriesMatrix M = psi_block(g, tw, tw.b, J, N);
    for (unsigned i = tw.b - 1; i >= 1; --i) M = psi_block(g, tw, i, J, N).frobenius(-static_cast<i64>(i)) * M;
    return M;
}

inline SeriesMatrix psi_b_matrix(const PolySpec& f, const TwistData& tw, const DworkParams& prm) {
    auto zq = ZqCtx::build(f.field, prm.K);
    const GammaTable g = ef_gamma(f, zq, gamma_count(f.d, prm.N), prm.N);
    return psi_b_matrix(g, tw, prm.J, prm.N);
}

/// c_0..c_terms with det(1 - s A) = sum_i (-1)^i c_i s^i (c_i = sum of the
/// principal i x i minors). Berkowitz's division-free recursion, keeping only
/// the top terms+1 coefficients of each leading-submatrix characteristic polynomial.
inline std::vector<PiSeries> char_series(const SeriesMatrix& A, int terms) {
    const int n = A.size();
    const int N = A.N();
    const ZqPtr& zq = A.zq();
    terms = std::min(terms, n);
    std::vector<PiSeries> v{PiSeries::constant(zq->one(), N)};
    for (int r = 1; r <= n; ++r) {
        const int last = r - 1;
        const int T = std::min(terms, r);
        // Toeplitz column t_0..t_T
        std::vector<PiSeries> t;
        t.push_back(PiSeries::constant(zq->one(), N));
        if (T >= 1) t.push_back(-A(last, last));
        if (T >= 2) {
            std::vector<PiSeries> y;
            y.reserve(static_cast<std::size_t>(last));
            for (int l = 0; l < last; ++l) y.push_back(A(l, last));
            for (int k = 2; k <= T; ++k) {
                PiSeries dot(zq, N);
                for (int j = 0; j < last; ++j) {
                    if (A(last, j).lo() >= N || y[static_cast<std::size_t>(j)].lo() >= N) continue;
                    PiSeries::fma(A(last, j), y[static_cast<std::size_t>(j)], dot);
                }
                t.push_back(-dot);
                if (k == T) break;
                std::vector<PiSeries> ny;
                ny.reserve(y.size());
                for (int l = 0; l < last; ++l) {
                    PiSeries acc(zq, N);
                    for (int j = 0; j < last; ++j) {
                        if (A(l, j).lo() >= N || y[static_cast<std::size_t>(j)].lo() >= N) continue;
                        PiSeries::fma(A(l, j), y[static_cast<std::size_t>(j)], acc);
                    }
                    acc.normalize();
                    ny.push_back(std::move(acc));
                }
                y = std::move(ny);
            }
        }
        std::vector<PiSeries> nv;
        for (int i = 0; i <= T; ++i) {
            PiSeries acc(zq, N);
            for (int j = 0; j <= i && j < static_cast<int>(v.size()); ++j)
                PiSeries::fma(t[static_cast<std::size_t>(i - j)], v[static_cast<std::size_t>(j)], acc);
            acc.normalize();
            nv.push_back(std::move(acc));
        }
        v = std::move(nv);
    }
    for (std::size_t i = 1; i < v.size(); i += 2) v[i] = -v[i];
    return v;
}

/// Characteristic-series coefficients of the truncated Psi^b for f and the twist.
inline std::vector<PiSeries> char_series(const PolySpec& f, const TwistData& tw, const DworkParams& prm, int terms) {
    return char_series(psi_b_matrix(f, tw, prm), terms);
}

struct CFunctionOptions {
    int K0 = 20;          ///< capped at the 63-bit range for p
    int max_rounds = 6;   ///< escalation rounds before giving up
    bool adaptive = true;
};

struct CFunctionResult {
    ConvexPolygon polygon;               ///< T-adic NP of C on [0, M]
    std::vector<Valuation> valuations;   ///< ord_pi c_i, i = 0..M
    DworkParams params;
    bool stable = false;
    bool conclusive = false;
    std::vector<int> indeterminate;
    int rounds = 0;
};

/// Starting pi-truncation: ceil(b p_{d,[0,k],u}(M)) + 8 (p_{Delta,u} for monomials).
inline int initial_pi_truncation(const PolySpec& f, const TwistData& tw, int M) {
    PolygonSpec s{tw, f.d, f.k, M};
    const Rat top = (f.k >= 1 ? p_dk_u(s) : p_delta_u(s)).value(M) * Rat(tw.b);
    return static_cast<int>(std::max<i64>(top.ceil(), 0)) + 8;
}

namespace detail {

struct CRun {
    std::vector<Valuation> vals;
    ValuedNewtonPolygon vnp;
};

inline CRun c_run(const PolySpec& f, const TwistData& tw, const DworkParams& prm, int M) {
    CRun r;
    const auto c = char_series(f, tw, prm, M);
    for (int i = 0; i <= M; ++i) {
        if (i < static_cast<int>(c.size())) {
            r.vals.push_back(c[static_cast<std::size_t>(i)].ord());
        } else {
            r.vals.push_back(Valuation::at_least(prm.N));
        }
    }
    r.vnp = np_from_valuations(r.vals);
    return r;
}

}  // namespace detail

/// T-adic Newton polygon of C_{f,chi}(s, T) on [0, M] as the lower hull of
/// (i, ord_pi c_i), i <= M. Adaptive: J, N and K are doubled one at a time
/// until every doubling reproduces the polygon.
inline CFunctionResult c_function_np(const PolySpec& f, const TwistData& tw, int M, CFunctionOptions opt = {},
                                     std::optional<DworkParams> start = std::nullopt) {
    const int Kcap = nt::max_precision(tw.p);
    DworkParams prm = start.value_or(DworkParams{static_cast<int>(f.d) * (M + 8), initial_pi_truncation(f, tw, M),
                                                 std::min(opt.K0, Kcap)});
    prm.K = std::min(prm.K, Kcap);
    CFunctionResult out;
    for (int round = 0; round < opt.max_rounds; ++round) {
        out.rounds = round + 1;
        const auto base = detail::c_run(f, tw, prm, M);
        out.valuations = base.vals;
        out.polygon = base.vnp.np.polygon;
        out.params = prm;
        out.conclusive = base.vnp.conclusive && base.vnp.np.polygon.extent() == M;
        out.indeterminate = base.vnp.np.excluded;
        if (!opt.adaptive) {
            out.stable = false;
            return out;
        }
        if (!out.conclusive) {
            prm.N *= 2;
            prm.K = std::min(prm.K * 2, Kcap);
            continue;
        }
        bool stable = true;
        DworkParams next = prm;
        const DworkParams tries[3] = {{prm.J * 2, prm.N, prm.K}, {prm.J, prm.N * 2, prm.K}, {prm.J, prm.N, std::min(prm.K * 2, Kcap)}};
        for (int t = 0; t < 3; ++t) {
            if (tries[t] == prm) continue;
            const auto alt = detail::c_run(f, tw, tries[t], M);
            if (!(alt.vnp.conclusive && alt.vnp.np.polygon == out.polygon)) {
                stable = false;
                if (t == 0) next.J = tries[t].J;
                if (t == 1) next.N = tries[t].N;
                if (t == 2) next.K = tries[t].K;
            }
        }
        if (stable) {
            out.stable = true;
            return out;
        }
        prm = next;
    }
    return out;
}

struct TraceConsistency {
    bool equal = false;
    PiSeries sum_side;     ///< S_1(T) at T = E(pi) - 1
    PiSeries dwork_side;   ///< (q-1) Tr(Psi^b)
};

/// Compares S_1(T)|_{T=E(pi)-1} for twist `sum_twist` with (q-1) Tr(Psi^b) for
/// `dwork_twist`, mod (pi^N, p^K). Passing different twists gives a negative control.
inline TraceConsistency trace_consistency(const PolySpec& f, const TwistData& sum_twist, const TwistData& dwork_twist,
                                          int N, int K, int J = 0) {
    TraceConsistency out;
    const TSeries S = s_series(f, sum_twist, 1, N, K);
    auto zq = ZqCtx::build(f.field, K);
    // re-express the series coefficients in the precision-K context
    TSeries Sk{zq, {}, S.prec};
    for (const auto& c : S.coeffs) Sk.coeffs.push_back(zq->elem(c.coeffs()));
    out.sum_side = subst_T(Sk, artin_hasse_minus_one(zq, N));
    if (J <= 0) J = static_cast<int>(f.d) * N / static_cast<int>(sum_twist.p - 1) + 2;
    const GammaTable g = ef_gamma(f, zq, gamma_count(f.d, N), N);
    const SeriesMatrix Mb = psi_b_matrix(g, dwork_twist, J, N);
    out.dwork_side = Mb.trace().scaled(zq->from_int(static_cast<i64>(dwork_twist.q - 1)));
    const int prec = std::min(out.sum_side.prec(), out.dwork_side.prec());
    out.equal = prec >= K && out.sum_side.congruent(out.dwork_side, N, K);
    return out;
}

inline TraceConsistency trace_consistency(const PolySpec& f, const TwistData& tw, int N, int K, int J = 0) {
    return trace_consistency(f, tw, tw, N, K, J);
}

}  // namespace twsum

#endif  // TWSUM_DWORK_HPP
