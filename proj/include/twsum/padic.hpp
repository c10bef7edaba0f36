#ifndef TWSUM_PADIC_HPP
#define TWSUM_PADIC_HPP

#include <algorithm>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "ffield.hpp"
#include "modint.hpp"
#include "rational.hpp"

namespace twsum {

/// Arithmetic of polynomials over Z/p^K modulo a monic polynomial.
namespace zpoly {

inline std::vector<u64> mulmod(const std::vector<u64>& a, const std::vector<u64>& b, const std::vector<u64>& mod,
                               const Zmod& z) {
    const std::size_t n = mod.size() - 1;
    std::vector<u64> prod(2 * n - 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
        if (a[i] == 0) continue;
        for (std::size_t j = 0; j < n; ++j) prod[i + j] = z.add(prod[i + j], z.mul(a[i], b[j]));
    }
    for (std::size_t k = 2 * n - 1; k-- > n;) {
        const u64 c = prod[k];
        if (c == 0) continue;
        for (std::size_t i = 0; i < n; ++i) prod[k - n + i] = z.sub(prod[k - n + i], z.mul(c, mod[i]));
        prod[k] = 0;
    }
    prod.resize(n);
    return prod;
}

inline std::vector<u64> powmod(std::vector<u64> base, u64 e, const std::vector<u64>& mod, const Zmod& z) {
    std::vector<u64> r(mod.size() - 1, 0);
    r[0] = 1 % z.modulus();
    while (e > 0) {
        if (e & 1) r = mulmod(r, base, mod, z);
        base = mulmod(base, base, mod, z);
        e >>= 1;
    }
    return r;
}

}  // namespace zpoly

class ZqCtx;
using ZqPtr = std::shared_ptr<const ZqCtx>;
class ZqElem;

/// Z_q / p^K for q = p^b, on the power basis of tau = Teichmuller lift of the
/// class of t in F_q. Because tau is a root of unity, sigma(tau) = tau^p holds
/// exactly and Frobenius is a fixed b x b matrix.
class ZqCtx : public std::enable_shared_from_this<ZqCtx> {
public:
    static ZqPtr build(FieldPtr field, int K) {
        auto ctx = std::shared_ptr<ZqCtx>(new ZqCtx(std::move(field), K));
        ctx->init();
        return ctx;
    }

    const FieldPtr& field() const { return field_; }
    const Zmod& zmod() const { return z_; }
    u64 p() const { return z_.p(); }
    unsigned b() const { return b_; }
    int K() const { return z_.K(); }
    u64 q() const { return field_->size(); }
    /// Minimal polynomial of tau over Z_p mod p^K (monic, ascending).
    const std::vector<u64>& modulus() const { return hmod_; }

    // Raw kernels on length-b coefficient arrays.
    void mul(const u64* a, const u64* c, u64* out) const {
        if (b_ == 1) {
            out[0] = z_.mul(a[0], c[0]);
            return;
        }
        u64 prod[2 * kMaxInline];
        u64* pr = prod;
        std::vector<u64> heap;
        if (b_ > kMaxInline) {
            heap.assign(2 * b_, 0);
            pr = heap.data();
        } else {
            std::fill(prod, prod + 2 * b_, 0);
        }
        for (unsigned i = 0; i < b_; ++i) {
            if (a[i] == 0) continue;
            for (unsigned j = 0; j < b_; ++j) pr[i + j] = z_.add(pr[i + j], z_.mul(a[i], c[j]));
        }
        for (unsigned k = 2 * b_ - 1; k-- > b_;) {
            const u64 v = pr[k];
            if (v == 0) continue;
            for (unsigned i = 0; i < b_; ++i) pr[k - b_ + i] = z_.sub(pr[k - b_ + i], z_.mul(v, hmod_[i]));
        }
        std::copy(pr, pr + b_, out);
    }
    /// out += a * c
    void fma(const u64* a, const u64* c, u64* out) const {
        if (b_ == 1) {
            out[0] = z_.add(out[0], z_.mul(a[0], c[0]));
            return;
        }
        u64 tmp[kMaxInline];
        std::vector<u64> heap;
        u64* t = tmp;
        if (b_ > kMaxInline) {
            heap.assign(b_, 0);
            t = heap.data();
        }
        mul(a, c, t);
        for (unsigned i = 0; i < b_; ++i) out[i] = z_.add(out[i], t[i]);
    }
    /// sigma^k applied to a, k taken modulo b.
    void frob(const u64* a, i64 k, u64* out) const {
        i64 r = k % static_cast<i64>(b_);
        if (r < 0) r += b_;
        if (r == 0) {
            std::copy(a, a + b_, out);
            return;
        }
        const auto& m = frob_pow_[static_cast<std::size_t>(r)];
        std::vector<u64> res(b_, 0);
        for (unsigned j = 0; j < b_; ++j) {
            if (a[j] == 0) continue;
            for (unsigned i = 0; i < b_; ++i) res[i] = z_.add(res[i], z_.mul(a[j], m[j * b_ + i]));
        }
        std::copy(res.begin(), res.end(), out);
    }
    u64 trace(const u64* a) const {
        u64 s = 0;
        for (unsigned j = 0; j < b_; ++j) s = z_.add(s, z_.mul(a[j], trace_tab_[j]));
        return s;
    }
    /// ord_p; K when the element vanishes mod p^K.
    int val(const u64* a) const {
        int v = z_.K();
        for (unsigned j = 0; j < b_; ++j) v = std::min(v, z_.val(a[j]));
        return v;
    }

    inline ZqElem zero() const;
    inline ZqElem one() const;
    inline ZqElem from_int(i64 v) const;
    inline ZqElem elem(std::vector<u64> coeffs) const;
    /// Teichmuller lift omega(x) of x in F_q: iterate z -> z^q from any lift.
    inline ZqElem teichmuller(const FieldElem& x) const;
    /// omega(g) for the field's generator g.
    inline const ZqElem& teich_generator() const;
    /// Reduction mod p.
    inline FieldElem reduce(const ZqElem& z) const;

private:
    static constexpr unsigned kMaxInline = 16;

    ZqCtx(FieldPtr field, int K) : field_(std::move(field)), z_(field_->p(), K), b_(field_->n()) {}

    void init() {
        const u64 p = z_.p();
        const u64 q = field_->size();
        // naive lift of the F_p modulus; any monic lift gives Z_q / p^K
        std::vector<u64> hl(field_->modulus().begin(), field_->modulus().end());
        std::vector<u64> x(b_, 0);
        if (b_ == 1) {
            x[0] = z_.neg(hl[0]);
        } else {
            x[1] = 1;
        }
        std::vector<u64> tau0 = x;
        for (int i = 1; i < z_.K(); ++i) tau0 = zpoly::powmod(tau0, q, hl, z_);
        // hmod(Y) = prod_{i<b} (Y - tau0^{p^i}), coefficients land in Z/p^K
        using RElem = std::vector<u64>;
        std::vector<RElem> poly{RElem(b_, 0)};
        poly[0][0] = 1 % z_.modulus();
        RElem conj = tau0;
        for (unsigned i = 0; i < b_; ++i) {
            std::vector<RElem> next(poly.size() + 1, RElem(b_, 0));
            for (std::size_t d = 0; d < poly.size(); ++d) {
                for (unsigned c = 0; c < b_; ++c) next[d + 1][c] = z_.add(next[d + 1][c], poly[d][c]);
                RElem prod = zpoly::mulmod(poly[d], conj, hl, z_);
                for (unsigned c = 0; c < b_; ++c) next[d][c] = z_.sub(next[d][c], prod[c]);
            }
            poly = std::move(next);
            conj = zpoly::powmod(conj, p, hl, z_);
        }
        hmod_.assign(b_ + 1, 0);
        for (unsigned d = 0; d <= b_; ++d) {
            for (unsigned c = 1; c < b_; ++c)
                if (poly[d][c] != 0) throw std::logic_error("ZqCtx: minimal polynomial not over Z_p");
            hmod_[d] = poly[d][0];
        }
        // Frobenius powers: column j of sigma^r is tau^{j p^r}
        frob_pow_.assign(b_, std::vector<u64>(b_ * b_, 0));
        std::vector<u64> tau(b_, 0);
        if (b_ == 1) {
            tau[0] = z_.neg(hmod_[0]);
        } else {
            tau[1] = 1;
        }
        for (unsigned r = 0; r < b_; ++r) {
            const u64 pr = nt::checked_pow(p, r);
            for (unsigned j = 0; j < b_; ++j) {
                std::vector<u64> img = zpoly::powmod(tau, static_cast<u64>(j) * pr, hmod_, z_);
                for (unsigned i = 0; i < b_; ++i) frob_pow_[r][j * b_ + i] = img[i];
            }
        }
        trace_tab_.assign(b_, 0);
        for (unsigned j = 0; j < b_; ++j) {
            u64 s = 0;
            for (unsigned r = 0; r < b_; ++r) s = z_.add(s, frob_pow_[r][j * b_ + 0]);
            trace_tab_[j] = s;
        }
        teich_gen_ = std::make_shared<std::vector<u64>>(teich_raw(field_->generator()));
    }

    std::vector<u64> teich_raw(const FieldElem& x) const {
        std::vector<u64> v(x.coeffs().begin(), x.coeffs().end());
        if (b_ == 1) v[0] = x.coeffs()[0];
        const u64 q = field_->size();
        for (int i = 1; i < z_.K(); ++i) v = zpoly::powmod(v, q, hmod_, z_);
        return v;
    }

    FieldPtr field_;
    Zmod z_;
    unsigned b_;
    std::vector<u64> hmod_;
    std::vector<std::vector<u64>> frob_pow_;
    std::vector<u64> trace_tab_;
    std::shared_ptr<std::vector<u64>> teich_gen_;
    mutable std::shared_ptr<ZqElem> teich_gen_elem_;
};

/// Element of Z_q / p^K as a value type.
class ZqElem {
public:
    ZqElem() = default;
    ZqElem(ZqPtr ctx, std::vector<u64> c) : ctx_(std::move(ctx)), c_(std::move(c)) {}

    const ZqPtr& ctx() const { return ctx_; }
    const std::vector<u64>& coeffs() const { return c_; }
    std::vector<u64>& coeffs() { return c_; }
    const u64* data() const { return c_.data(); }

    bool is_zero() const {
        return std::all_of(c_.begin(), c_.end(), [](u64 v) { return v == 0; });
    }

    ZqElem operator+(const ZqElem& o) const {
        ZqElem r = *this;
        for (std::size_t i = 0; i < c_.size(); ++i) r.c_[i] = ctx_->zmod().add(c_[i], o.c_[i]);
        return r;
    }
    ZqElem operator-(const ZqElem& o) const {
        ZqElem r = *this;
        for (std::size_t i = 0; i < c_.size(); ++i) r.c_[i] = ctx_->zmod().sub(c_[i], o.c_[i]);
        return r;
    }
    ZqElem operator-() const {
        ZqElem r = *this;
        for (auto& v : r.c_) v = ctx_->zmod().neg(v);
        return r;
    }
    ZqElem operator*(const ZqElem& o) const {
        ZqElem r(ctx_, std::vector<u64>(c_.size(), 0));
        ctx_->mul(c_.data(), o.c_.data(), r.c_.data());
        return r;
    }
    ZqElem& operator+=(const ZqElem& o) { return *this = *this + o; }
    ZqElem& operator*=(const ZqElem& o) { return *this = *this * o; }

    ZqElem pow(u64 e) const {
        ZqElem r = ctx_->one();
        ZqElem base = *this;
        while (e > 0) {
            if (e & 1) r = r * base;
            base = base * base;
            e >>= 1;
        }
        return r;
    }
    /// Inverse of a unit by Newton iteration from the residue-field inverse.
    ZqElem inverse() const {
        if (ctx_->val(c_.data()) != 0) throw std::domain_error("ZqElem::inverse: not a unit");
        FieldElem r = ctx_->reduce(*this).inverse();
        ZqElem y = ctx_->elem(r.coeffs());
        const ZqElem two = ctx_->from_int(2);
        for (int prec = 1; prec < ctx_->K(); prec *= 2) y = y * (two - *this * y);
        return y;
    }
    /// sigma^k.
    ZqElem frobenius(i64 k) const {
        ZqElem r(ctx_, std::vector<u64>(c_.size(), 0));
        ctx_->frob(c_.data(), k, r.c_.data());
        return r;
    }
    /// Tr_{Z_q/Z_p}, a residue mod p^K.
    u64 trace() const { return ctx_->trace(c_.data()); }
    int val() const { return ctx_->val(c_.data()); }

    friend bool operator==(const ZqElem& a, const ZqElem& b) { return a.c_ == b.c_; }

private:
    ZqPtr ctx_;
    std::vector<u64> c_;
};

inline ZqElem ZqCtx::zero() const { return ZqElem(shared_from_this(), std::vector<u64>(b_, 0)); }
inline ZqElem ZqCtx::one() const { return from_int(1); }
inline ZqElem ZqCtx::from_int(i64 v) const {
    std::vector<u64> c(b_, 0);
    c[0] = z_.from_signed(v);
    return ZqElem(shared_from_this(), std::move(c));
}
inline ZqElem ZqCtx::elem(std::vector<u64> coeffs) const {
    coeffs.resize(b_, 0);
    for (auto& v : coeffs) v = z_.reduce(v);
    return ZqElem(shared_from_this(), std::move(coeffs));
}
inline ZqElem ZqCtx::teichmuller(const FieldElem& x) const {
    if (x.ctx().get() != field_.get() && x.ctx()->modulus() != field_->modulus())
        throw std::invalid_argument("teichmuller: element from a different field");
    return ZqElem(shared_from_this(), teich_raw(x));
}
inline const ZqElem& ZqCtx::teich_generator() const {
    if (!teich_gen_elem_) teich_gen_elem_ = std::make_shared<ZqElem>(shared_from_this(), *teich_gen_);
    return *teich_gen_elem_;
}
inline FieldElem ZqCtx::reduce(const ZqElem& z) const {
    std::vector<u64> v(b_);
    for (unsigned i = 0; i < b_; ++i) v[i] = z.coeffs()[i] % z_.p();
    if (b_ == 1) return field_->constant(v[0]);
    return field_->elem(std::move(v));
}

/// Power series in pi over Z_q, truncated mod pi^N, with coefficients known mod p^prec.
/// `lo` is a lower bound for the index of the first nonzero coefficient.
class PiSeries {
public:
    PiSeries() = default;
    PiSeries(ZqPtr ctx, int N) : ctx_(std::move(ctx)), N_(N), prec_(ctx_->K()), lo_(N), c_(static_cast<std::size_t>(N) * ctx_->b(), 0) {}

    static PiSeries constant(const ZqElem& z, int N) {
        PiSeries s(z.ctx(), N);
        s.set(0, z);
        return s;
    }

    const ZqPtr& ctx() const { return ctx_; }
    int N() const { return N_; }
    int prec() const { return prec_; }
    void set_prec(int prec) { prec_ = std::min(prec_, prec); }
    int lo() const { return lo_; }
    unsigned b() const { return ctx_->b(); }

    const u64* at(int i) const { return c_.data() + static_cast<std::size_t>(i) * b(); }
    u64* at(int i) { return c_.data() + static_cast<std::size_t>(i) * b(); }
    ZqElem coeff(int i) const { return ZqElem(ctx_, std::vector<u64>(at(i), at(i) + b())); }
    void set(int i, const ZqElem& z) {
        if (i >= N_) return;
        std::copy(z.coeffs().begin(), z.coeffs().end(), at(i));
        if (!z.is_zero()) lo_ = std::min(lo_, i);
    }
    /// Mark coefficients from index i as possibly nonzero.
    void touch(int i) { lo_ = std::min(lo_, i); }
    bool is_zero() const {
        for (int i = lo_; i < N_; ++i)
            for (unsigned j = 0; j < b(); ++j)
                if (at(i)[j] != 0) return false;
        return true;
    }
    /// Tightens lo to the first nonzero coefficient.
    void normalize() {
        while (lo_ < N_) {
            const u64* a = at(lo_);
            bool nz = false;
            for (unsigned j = 0; j < b(); ++j) nz |= a[j] != 0;
            if (nz) break;
            ++lo_;
        }
    }

    /// ord_pi: index of the first coefficient nonzero mod p^prec, else at least N.
    Valuation ord() const {
        const Zmod& z = ctx_->zmod();
        const u64 pp = nt::checked_pow(z.p(), static_cast<unsigned>(prec_));
        for (int i = lo_; i < N_; ++i) {
            const u64* a = at(i);
            for (unsigned j = 0; j < b(); ++j)
                if (a[j] % pp != 0) return Valuation::exact(i);
        }
        return Valuation::at_least(N_);
    }

    PiSeries& operator+=(const PiSeries& o) {
        const Zmod& z = ctx_->zmod();
        const int n = std::min(N_, o.N_);
        truncate(n);
        for (int i = o.lo_; i < n; ++i) {
            const u64* a = o.at(i);
            u64* r = at(i);
            for (unsigned j = 0; j < b(); ++j) r[j] = z.add(r[j], a[j]);
        }
        lo_ = std::min(lo_, o.lo_);
        prec_ = std::min(prec_, o.prec_);
        return *this;
    }
    PiSeries& operator-=(const PiSeries& o) {
        const Zmod& z = ctx_->zmod();
        const int n = std::min(N_, o.N_);
        truncate(n);
        for (int i = o.lo_; i < n; ++i) {
            const u64* a = o.at(i);
            u64* r = at(i);
            for (unsigned j = 0; j < b(); ++j) r[j] = z.sub(r[j], a[j]);
        }
        lo_ = std::min(lo_, o.lo_);
        prec_ = std::min(prec_, o.prec_);
        return *this;
    }
    friend PiSeries operator+(PiSeries a, const PiSeries& o) { return a += o; }
    friend PiSeries operator-(PiSeries a, const PiSeries& o) { return a -= o; }
    PiSeries operator-() const {
        PiSeries r(ctx_, N_);
        r -= *this;
        r.prec_ = prec_;
        return r;
    }

    /// out += a * c, truncated to out's length.
    static void fma(const PiSeries& a, const PiSeries& c, PiSeries& out) {
        const int n = out.N_;
        const int start = a.lo_ + c.lo_;
        out.prec_ = std::min({out.prec_, a.prec_, c.prec_});
        if (start >= n) return;
        const ZqCtx& ctx = *out.ctx_;
        const int an = std::min(a.N_, n), cn = std::min(c.N_, n);
        if (ctx.b() == 1) {
            const Zmod& z = ctx.zmod();
            const u64 m = z.modulus();
            for (int k = start; k < n; ++k) {
                u128 acc = out.c_[k];
                const int i_hi = std::min(an - 1, k - c.lo_);
                for (int i = a.lo_; i <= i_hi; ++i) {
                    const int j = k - i;
                    if (j >= cn) continue;
                    acc += static_cast<u128>(a.c_[i]) * c.c_[j];
                    if (acc >= (u128(1) << 126)) acc %= m;
                }
                out.c_[k] = static_cast<u64>(acc % m);
            }
        } else {
            for (int i = a.lo_; i < an; ++i) {
                const u64* ai = a.at(i);
                bool nz = false;
                for (unsigned t = 0; t < ctx.b(); ++t) nz |= ai[t] != 0;
                if (!nz) continue;
                for (int j = c.lo_; j < cn && i + j < n; ++j) ctx.fma(ai, c.at(j), out.at(i + j));
            }
        }
        out.lo_ = std::min(out.lo_, start);
    }

    friend PiSeries operator*(const PiSeries& a, const PiSeries& c) {
        PiSeries r(a.ctx_, std::min(a.N_, c.N_));
        fma(a, c, r);
        return r;
    }
    PiSeries& operator*=(const PiSeries& o) { return *this = *this * o; }

    PiSeries scaled(const ZqElem& s) const {
        PiSeries r(ctx_, N_);
        r.prec_ = prec_;
        for (int i = lo_; i < N_; ++i) ctx_->mul(at(i), s.data(), r.at(i));
        r.lo_ = lo_;
        return r;
    }
    PiSeries frobenius(i64 k) const {
        PiSeries r(ctx_, N_);
        r.prec_ = prec_;
        for (int i = lo_; i < N_; ++i) ctx_->frob(at(i), k, r.at(i));
        r.lo_ = lo_;
        return r;
    }
    /// Multiply by pi^k.
    PiSeries shifted(int k) const {
        PiSeries r(ctx_, N_);
        r.prec_ = prec_;
        for (int i = lo_; i + k < N_; ++i) std::copy(at(i), at(i) + b(), r.at(i + k));
        r.lo_ = std::min(N_, lo_ + k);
        return r;
    }
    void truncate(int n) {
        if (n >= N_) return;
        N_ = n;
        c_.resize(static_cast<std::size_t>(n) * b());
        lo_ = std::min(lo_, N_);
    }

    /// Equality of the coefficients below min(N) modulo p^min(prec).
    bool congruent(const PiSeries& o, int n, int prec) const {
        const u64 pp = nt::checked_pow(ctx_->p(), static_cast<unsigned>(prec));
        for (int i = 0; i < n; ++i)
            for (unsigned j = 0; j < b(); ++j)
                if (at(i)[j] % pp != o.at(i)[j] % pp) return false;
        return true;
    }

private:
    ZqPtr ctx_;
    int N_ = 0;
    int prec_ = 0;
    int lo_ = 0;
    std::vector<u64> c_;
};

/// Power series in T over Z/p^K (or Z_q / p^K), each coefficient with its own
/// absolute p-adic precision.
struct TSeries {
    ZqPtr ctx;
    std::vector<ZqElem> coeffs;
    std::vector<int> prec;

    int N() const { return static_cast<int>(coeffs.size()); }
};

/// (1+T)^t = sum_{k<N} C(t,k) T^k for a residue t known mod p^{K_in}. Coefficient
/// k is known mod p^{K_in - ord_p(k!)}; the falling factorial is computed mod
/// p^{K_in} and divided exactly.
inline TSeries binom_series(const ZqPtr& ctx, u64 t, int K_in, int N) {
    const u64 p = ctx->p();
    if (K_in > ctx->K()) throw precision_error("binom_series: input precision exceeds context");
    Zmod zin(p, K_in);
    t = zin.reduce(t);
    TSeries s{ctx, {}, {}};
    u64 falling = 1 % zin.modulus();
    for (int k = 0; k < N; ++k) {
        if (k > 0) falling = zin.mul(falling, zin.sub(t, zin.reduce(static_cast<u64>(k - 1))));
        const int v = nt::vp_factorial(static_cast<u64>(k), p);
        const int prec = K_in - v;
        if (prec <= 0) throw precision_error("binom_series: coefficient " + std::to_string(k) + " has no precision left");
        u64 unit = 1;
        for (u64 j = 2; j <= static_cast<u64>(k); ++j) {
            u64 jj = j;
            while (jj % p == 0) jj /= p;
            unit = zin.mul(unit, zin.reduce(jj));
        }
        const u64 pv = nt::checked_pow(p, static_cast<unsigned>(v));
        const u64 num = falling / pv;  // falling is divisible by p^v as an integer
        Zmod zout(p, prec);
        const u64 c = zout.mul(zout.reduce(num), zout.inv(zout.reduce(unit)));
        s.coeffs.push_back(ctx->from_int(static_cast<i64>(c)));
        s.prec.push_back(prec);
    }
    return s;
}

/// Substitutes T = value (ord_pi(value) >= 1) into a T-series.
inline PiSeries subst_T(const TSeries& series, const PiSeries& value) {
    if (value.ord().determinate && value.ord().value == Rat(0))
        throw std::domain_error("subst_T: substituted value must have positive order");
    PiSeries v = value;
    if (v.lo() == 0) {
        // coefficient 0 may be nonzero only beyond the known precision
        for (unsigned j = 0; j < v.b(); ++j) v.at(0)[j] = 0;
        v.normalize();
    }
    const int N = std::min(series.N(), value.N());
    PiSeries result(series.ctx, N);
    PiSeries power = PiSeries::constant(series.ctx->one(), N);
    power.set_prec(value.prec());
    int prec = value.prec();
    for (int k = 0; k < N; ++k) {
        if (power.lo() >= N) break;
        prec = std::min(prec, series.prec[static_cast<std::size_t>(k)]);
        PiSeries term = power.scaled(series.coeffs[static_cast<std::size_t>(k)]);
        result += term;
        power = power * v;
    }
    result.set_prec(prec);
    return result;
}

/// Z_q[pi_m] with pi_m = zeta_{p^m} - 1, ramification e = p^{m-1}(p-1), reduced
/// by the Eisenstein polynomial Phi_{p^m}(1 + X).
class PimCtx {
public:
    PimCtx(ZqPtr zq, unsigned m) : zq_(std::move(zq)), m_(m) {
        if (m == 0) throw std::invalid_argument("PimCtx: m must be >= 1");
        const u64 p = zq_->p();
        const u64 pm1 = nt::checked_pow(p, m - 1);
        e_ = static_cast<int>(pm1 * (p - 1));
        const Zmod& z = zq_->zmod();
        // Phi_{p^m}(Y) = sum_{i<p} Y^{i p^{m-1}}, with Y = 1 + X
        std::vector<u64> eis(static_cast<std::size_t>(e_) + 1, 0);
        for (u64 i = 0; i < p; ++i) {
            const u64 n = i * pm1;
            // (1+X)^n by Pascal's rule mod p^K
            std::vector<u64> pas{1 % z.modulus()};
            for (u64 r = 0; r < n; ++r) {
                std::vector<u64> nxt(pas.size() + 1, 0);
                for (std::size_t j = 0; j < pas.size(); ++j) {
                    nxt[j] = z.add(nxt[j], pas[j]);
                    nxt[j + 1] = z.add(nxt[j + 1], pas[j]);
                }
                pas = std::move(nxt);
            }
            for (std::size_t j = 0; j < pas.size(); ++j) eis[j] = z.add(eis[j], pas[j]);
        }
        eis_ = std::move(eis);
    }

    const ZqPtr& zq() const { return zq_; }
    unsigned m() const { return m_; }
    int e() const { return e_; }
    u64 p() const { return zq_->p(); }
    /// Phi_{p^m}(1+X), monic of degree e.
    const std::vector<u64>& eisenstein() const { return eis_; }

private:
    ZqPtr zq_;
    unsigned m_;
    int e_;
    std::vector<u64> eis_;
};

/// Element sum_{j<e} d_j pi_m^j with d_j in Z_q known mod p^prec.
class PimElem {
public:
    PimElem() = default;
    explicit PimElem(std::shared_ptr<const PimCtx> ctx)
        : ctx_(std::move(ctx)), prec_(ctx_->zq()->K()),
          c_(static_cast<std::size_t>(ctx_->e()) * ctx_->zq()->b(), 0) {}

    static PimElem from_zq(std::shared_ptr<const PimCtx> ctx, const ZqElem& z) {
        PimElem r(std::move(ctx));
        std::copy(z.coeffs().begin(), z.coeffs().end(), r.at(0));
        return r;
    }
    /// pi_m itself.
    static PimElem uniformizer(std::shared_ptr<const PimCtx> ctx) {
        PimElem r(ctx);
        if (ctx->e() == 1) {
            // pi = -eis[0] when e = 1 (p = 2, m = 1)
            r.at(0)[0] = ctx->zq()->zmod().neg(ctx->eisenstein()[0]);
        } else {
            r.at(1)[0] = 1;
        }
        return r;
    }
    /// zeta_{p^m}^t = (1 + pi_m)^t.
    static PimElem zeta_pow(const std::shared_ptr<const PimCtx>& ctx, u64 t) {
        PimElem one = from_zq(ctx, ctx->zq()->one());
        PimElem zeta = one + uniformizer(ctx);
        return zeta.pow(t);
    }

    const std::shared_ptr<const PimCtx>& ctx() const { return ctx_; }
    int prec() const { return prec_; }
    void set_prec(int p) { prec_ = std::min(prec_, p); }
    unsigned b() const { return ctx_->zq()->b(); }
    int e() const { return ctx_->e(); }
    const u64* at(int j) const { return c_.data() + static_cast<std::size_t>(j) * b(); }
    u64* at(int j) { return c_.data() + static_cast<std::size_t>(j) * b(); }
    ZqElem coeff(int j) const { return ZqElem(ctx_->zq(), std::vector<u64>(at(j), at(j) + b())); }

    PimElem operator+(const PimElem& o) const {
        PimElem r = *this;
        const Zmod& z = ctx_->zq()->zmod();
        for (std::size_t i = 0; i < c_.size(); ++i) r.c_[i] = z.add(c_[i], o.c_[i]);
        r.prec_ = std::min(prec_, o.prec_);
        return r;
    }
    PimElem operator-(const PimElem& o) const {
        PimElem r = *this;
        const Zmod& z = ctx_->zq()->zmod();
        for (std::size_t i = 0; i < c_.size(); ++i) r.c_[i] = z.sub(c_[i], o.c_[i]);
        r.prec_ = std::min(prec_, o.prec_);
        return r;
    }
    PimElem& operator+=(const PimElem& o) { return *this = *this + o; }
    PimElem operator*(const PimElem& o) const {
        const ZqCtx& zq = *ctx_->zq();
        const Zmod& z = zq.zmod();
        const int e = ctx_->e();
        const unsigned bb = b();
        std::vector<u64> prod(static_cast<std::size_t>(2 * e - 1) * bb, 0);
        for (int i = 0; i < e; ++i)
            for (int j = 0; j < e; ++j) zq.fma(at(i), o.at(j), prod.data() + static_cast<std::size_t>(i + j) * bb);
        const auto& eis = ctx_->eisenstein();
        for (int k = 2 * e - 2; k >= e; --k) {
            u64* top = prod.data() + static_cast<std::size_t>(k) * bb;
            for (int i = 0; i < e; ++i) {
                u64* dst = prod.data() + static_cast<std::size_t>(k - e + i) * bb;
                for (unsigned t = 0; t < bb; ++t) dst[t] = z.sub(dst[t], z.mul(top[t], eis[static_cast<std::size_t>(i)]));
            }
        }
        PimElem r(ctx_);
        std::copy(prod.begin(), prod.begin() + static_cast<std::ptrdiff_t>(static_cast<std::size_t>(e) * bb), r.c_.begin());
        r.prec_ = std::min(prec_, o.prec_);
        return r;
    }
    PimElem scaled(const ZqElem& s) const {
        PimElem r(ctx_);
        for (int j = 0; j < e(); ++j) ctx_->zq()->mul(at(j), s.data(), r.at(j));
        r.prec_ = prec_;
        return r;
    }
    PimElem pow(u64 n) const {
        PimElem r = from_zq(ctx_, ctx_->zq()->one());
        PimElem base = *this;
        while (n > 0) {
            if (n & 1) r = r * base;
            base = base * base;
            n >>= 1;
        }
        r.prec_ = std::min(r.prec_, prec_);
        return r;
    }
    PimElem frobenius(i64 k) const {
        PimElem r(ctx_);
        for (int j = 0; j < e(); ++j) ctx_->zq()->frob(at(j), k, r.at(j));
        r.prec_ = prec_;
        return r;
    }
    /// Exact division by a positive integer n = p^v * unit; loses v digits of precision.
    PimElem divided_by(u64 n) const {
        const Zmod& z = ctx_->zq()->zmod();
        const u64 p = z.p();
        const int v = nt::vp(n, p);
        u64 unit = n;
        for (int i = 0; i < v; ++i) unit /= p;
        if (v >= prec_) throw precision_error("PimElem::divided_by: precision exhausted");
        PimElem r(ctx_);
        const u64 uinv = z.inv(z.reduce(unit));
        const u64 pv = nt::checked_pow(p, static_cast<unsigned>(v));
        const u64 keep = nt::checked_pow(p, static_cast<unsigned>(prec_));
        for (std::size_t i = 0; i < c_.size(); ++i) {
            const u64 val = c_[i] % keep;
            if (val % pv != 0) throw std::domain_error("PimElem::divided_by: not divisible");
            r.c_[i] = z.mul(val / pv, uinv);
        }
        r.prec_ = prec_ - v;
        return r;
    }

    /// ord_{pi_m}, normalized so that ord(pi_m) = 1 and ord(p) = e.
    Valuation ord() const {
        const int e = ctx_->e();
        const ZqCtx& zq = *ctx_->zq();
        const u64 keep = nt::checked_pow(zq.p(), static_cast<unsigned>(prec_));
        int best = -1;
        for (int j = 0; j < e; ++j) {
            int v = prec_;
            for (unsigned t = 0; t < b(); ++t) {
                const u64 d = at(j)[t] % keep;
                if (d != 0) v = std::min(v, nt::vp(d, zq.p()));
            }
            if (v < prec_) {
                const int cand = j + e * v;
                if (best < 0 || cand < best) best = cand;
            }
        }
        if (best < 0) return Valuation::at_least(e * prec_);
        return Valuation::exact(best);
    }

    bool congruent(const PimElem& o, int prec) const {
        const u64 keep = nt::checked_pow(ctx_->p(), static_cast<unsigned>(prec));
        for (std::size_t i = 0; i < c_.size(); ++i)
            if (c_[i] % keep != o.c_[i] % keep) return false;
        return true;
    }

private:
    std::shared_ptr<const PimCtx> ctx_;
    int prec_ = 0;
    std::vector<u64> c_;
};

/// Substitutes T = pi_m into a T-series. Truncation at T^N costs floor(N/e) digits.
inline PimElem subst_T(const TSeries& series, const std::shared_ptr<const PimCtx>& pim) {
    PimElem result = PimElem::from_zq(pim, pim->zq()->zero());
    PimElem power = PimElem::from_zq(pim, pim->zq()->one());
    const PimElem pi = PimElem::uniformizer(pim);
    int prec = pim->zq()->K();
    for (int k = 0; k < series.N(); ++k) {
        prec = std::min(prec, series.prec[static_cast<std::size_t>(k)]);
        result += power.scaled(series.coeffs[static_cast<std::size_t>(k)]);
        power = power * pi;
    }
    prec = std::min(prec, series.N() / pim->e());
    result.set_prec(prec);
    return result;
}

}  // namespace twsum

#endif  // TWSUM_PADIC_HPP
