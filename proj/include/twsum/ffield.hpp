#ifndef TWSUM_FFIELD_HPP
#define TWSUM_FFIELD_HPP

#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "modint.hpp"

namespace twsum {

/// Dense polynomials over F_p, ascending coefficients. Used for moduli.
namespace fp_poly {

using Poly = std::vector<u64>;

inline void trim(Poly& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

inline Poly mul(const Poly& a, const Poly& b, u64 p) {
    if (a.empty() || b.empty()) return {};
    Poly r(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] = (r[i + j] + a[i] * b[j]) % p;
    trim(r);
    return r;
}

/// Remainder of a modulo a nonzero polynomial m.
inline Poly rem(Poly a, const Poly& m, u64 p) {
    trim(a);
    const std::size_t dm = m.size() - 1;
    const u64 lead_inv = nt::inv_mod(m.back(), p);
    while (a.size() > dm && !a.empty()) {
        u64 c = a.back() * lead_inv % p;
        std::size_t shift = a.size() - 1 - dm;
        for (std::size_t i = 0; i <= dm; ++i) a[shift + i] = (a[shift + i] + (p - c) * m[i]) % p;
        trim(a);
    }
    return a;
}

inline Poly mulmod(const Poly& a, const Poly& b, const Poly& m, u64 p) { return rem(mul(a, b, p), m, p); }

inline Poly powmod(Poly base, u64 e, const Poly& m, u64 p) {
    Poly r{1};
    r = rem(r, m, p);
    base = rem(base, m, p);
    while (e > 0) {
        if (e & 1) r = mulmod(r, base, m, p);
        base = mulmod(base, base, m, p);
        e >>= 1;
    }
    return r;
}

inline Poly gcd(Poly a, Poly b, u64 p) {
    trim(a);
    trim(b);
    while (!b.empty()) {
        Poly r = rem(a, b, p);
        a = std::move(b);
        b = std::move(r);
    }
    return a;
}

inline Poly sub(Poly a, const Poly& b, u64 p) {
    if (a.size() < b.size()) a.resize(b.size(), 0);
    for (std::size_t i = 0; i < b.size(); ++i) a[i] = (a[i] + p - b[i]) % p;
    trim(a);
    return a;
}

/// Rabin's irreducibility test for a monic f of degree n.
inline bool is_irreducible(const Poly& f, u64 p) {
    const std::size_t n = f.size() - 1;
    if (n == 0) return false;
    if (n == 1) return true;
    const Poly x{0, 1};
    auto frob_iter = [&](std::size_t k) {
        Poly r = x;
        for (std::size_t i = 0; i < k; ++i) r = powmod(r, p, f, p);
        return r;
    };
    if (sub(frob_iter(n), x, p) != Poly{}) return false;
    for (u64 r : nt::prime_factors(n)) {
        Poly g = gcd(f, sub(frob_iter(n / r), x, p), p);
        if (g.size() != 1) return false;
    }
    return true;
}

}  // namespace fp_poly

class FieldCtx;
using FieldPtr = std::shared_ptr<const FieldCtx>;

/// Element of F_{p^n} = F_p[t]/(modulus): coefficient vector of length n.
class FieldElem {
public:
    FieldElem() = default;
    FieldElem(FieldPtr ctx, std::vector<u64> coeffs) : ctx_(std::move(ctx)), c_(std::move(coeffs)) {}

    const FieldPtr& ctx() const { return ctx_; }
    const std::vector<u64>& coeffs() const { return c_; }
    bool is_zero() const {
        for (u64 v : c_)
            if (v != 0) return false;
        return true;
    }

    inline FieldElem operator+(const FieldElem& o) const;
    inline FieldElem operator-(const FieldElem& o) const;
    inline FieldElem operator-() const;
    inline FieldElem operator*(const FieldElem& o) const;
    inline FieldElem pow(u64 e) const;
    inline FieldElem inverse() const;
    inline std::string str() const;

    friend bool operator==(const FieldElem& a, const FieldElem& b) { return a.c_ == b.c_; }

private:
    FieldPtr ctx_;
    std::vector<u64> c_;
};

/// F_{p^n} with a verified irreducible modulus and a verified primitive generator.
/// Immutable after construction.
class FieldCtx : public std::enable_shared_from_this<FieldCtx> {
public:
    /// Builds F_{p^n}. Without a modulus the lexicographically least monic
    /// irreducible is used, ordering candidates by sum c_i p^i (c_n = 1 omitted).
    static FieldPtr build(u64 p, unsigned n, std::optional<std::vector<u64>> modulus = std::nullopt) {
        if (!nt::is_prime(p)) throw std::invalid_argument("build_field: p = " + std::to_string(p) + " is not prime");
        if (n == 0) throw std::invalid_argument("build_field: degree must be >= 1");
        const u64 order = nt::checked_pow(p, n);
        std::vector<u64> mod;
        if (modulus) {
            mod = *modulus;
            if (mod.size() != n + 1 || mod.back() != 1)
                throw std::invalid_argument("build_field: modulus must be monic of degree n");
            for (u64& c : mod) c %= p;
            if (!fp_poly::is_irreducible(mod, p)) throw std::invalid_argument("build_field: modulus is reducible");
        } else {
            for (u64 code = 0; code < order; ++code) {
                std::vector<u64> cand(n + 1, 0);
                u64 c = code;
                for (unsigned i = 0; i < n; ++i, c /= p) cand[i] = c % p;
                cand[n] = 1;
                if (fp_poly::is_irreducible(cand, p)) {
                    mod = std::move(cand);
                    break;
                }
            }
        }
        auto ctx = std::shared_ptr<FieldCtx>(new FieldCtx(p, n, order, std::move(mod)));
        ctx->find_generator();
        return ctx;
    }

    u64 p() const { return p_; }
    unsigned n() const { return n_; }
    /// Field size p^n.
    u64 size() const { return order_; }
    const std::vector<u64>& modulus() const { return mod_; }
    const FieldElem& generator() const { return gen_; }

    FieldElem zero() const { return FieldElem(self(), std::vector<u64>(n_, 0)); }
    FieldElem one() const { return constant(1); }
    FieldElem constant(u64 c) const {
        std::vector<u64> v(n_, 0);
        v[0] = c % p_;
        return FieldElem(self(), std::move(v));
    }
    /// The class of t (the adjoined root of the modulus).
    FieldElem t() const {
        if (n_ == 1) return constant(p_ - mod_[0]);
        std::vector<u64> v(n_, 0);
        v[1] = 1;
        return FieldElem(self(), std::move(v));
    }
    FieldElem elem(std::vector<u64> coeffs) const {
        coeffs.resize(n_, 0);
        for (u64& c : coeffs) c %= p_;
        return FieldElem(self(), std::move(coeffs));
    }

    /// Integer code sum c_i p^i, a bijection onto [0, p^n).
    u64 encode(const FieldElem& x) const {
        u64 code = 0;
        for (unsigned i = n_; i-- > 0;) code = code * p_ + x.coeffs()[i];
        return code;
    }
    FieldElem decode(u64 code) const {
        std::vector<u64> v(n_, 0);
        for (unsigned i = 0; i < n_; ++i, code /= p_) v[i] = code % p_;
        return FieldElem(self(), std::move(v));
    }

    std::vector<u64> mul_raw(const std::vector<u64>& a, const std::vector<u64>& b) const {
        std::vector<u64> prod(2 * n_ - 1, 0);
        for (unsigned i = 0; i < n_; ++i) {
            if (a[i] == 0) continue;
            for (unsigned j = 0; j < n_; ++j) prod[i + j] = (prod[i + j] + a[i] * b[j]) % p_;
        }
        for (unsigned k = 2 * n_ - 1; k-- > n_;) {
            u64 c = prod[k];
            if (c == 0) continue;
            for (unsigned i = 0; i < n_; ++i) prod[k - n_ + i] = (prod[k - n_ + i] + (p_ - c) * mod_[i]) % p_;
            prod[k] = 0;
        }
        prod.resize(n_);
        return prod;
    }

    /// Parses "c0+c1*t+...+c{n-1}*t^{n-1}"; terms may appear in any order or be omitted.
    FieldElem parse(const std::string& text) const {
        std::vector<u64> v(n_, 0);
        std::string s;
        for (char ch : text)
            if (ch != ' ') s.push_back(ch);
        if (s.empty()) throw std::invalid_argument("field element: empty string");
        std::size_t pos = 0;
        while (pos < s.size()) {
            bool negative = false;
            if (s[pos] == '+' || s[pos] == '-') {
                negative = s[pos] == '-';
                ++pos;
            }
            std::size_t end = s.find_first_of("+-", pos);
            std::string term = s.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
            pos = end == std::string::npos ? s.size() : end;
            u64 coef = 1;
            unsigned power = 0;
            auto tpos = term.find('t');
            if (tpos == std::string::npos) {
                coef = std::stoull(term);
            } else {
                std::string lhs = term.substr(0, tpos);
                if (!lhs.empty()) {
                    if (lhs.back() != '*') throw std::invalid_argument("field element: bad term '" + term + "'");
                    lhs.pop_back();
                    coef = std::stoull(lhs);
                }
                power = 1;
                std::string rhs = term.substr(tpos + 1);
                if (!rhs.empty()) {
                    if (rhs[0] != '^') throw std::invalid_argument("field element: bad term '" + term + "'");
                    power = static_cast<unsigned>(std::stoul(rhs.substr(1)));
                }
            }
            coef %= p_;
            if (negative) coef = (p_ - coef) % p_;
            // reduce t^power through the modulus when power >= n
            FieldElem mono = t().pow(power);
            for (unsigned i = 0; i < n_; ++i) v[i] = (v[i] + coef * mono.coeffs()[i]) % p_;
        }
        return FieldElem(self(), std::move(v));
    }

private:
    FieldCtx(u64 p, unsigned n, u64 order, std::vector<u64> mod) : p_(p), n_(n), order_(order), mod_(std::move(mod)) {}

    FieldPtr self() const { return shared_from_this(); }

    void find_generator() {
        const u64 group = order_ - 1;
        const auto primes = nt::prime_factors(group);
        for (u64 code = 1; code < order_; ++code) {
            FieldElem x = decode(code);
            bool primitive = true;
            for (u64 r : primes) {
                if (x.pow(group / r) == one()) {
                    primitive = false;
                    break;
                }
            }
            if (primitive) {
                gen_ = x;
                return;
            }
        }
        throw std::logic_error("build_field: no generator found");
    }

    u64 p_;
    unsigned n_;
    u64 order_;
    std::vector<u64> mod_;
    FieldElem gen_;
};

inline FieldElem FieldElem::operator+(const FieldElem& o) const {
    std::vector<u64> v(c_.size());
    const u64 p = ctx_->p();
    for (std::size_t i = 0; i < c_.size(); ++i) v[i] = (c_[i] + o.c_[i]) % p;
    return FieldElem(ctx_, std::move(v));
}
inline FieldElem FieldElem::operator-(const FieldElem& o) const {
    std::vector<u64> v(c_.size());
    const u64 p = ctx_->p();
    for (std::size_t i = 0; i < c_.size(); ++i) v[i] = (c_[i] + p - o.c_[i]) % p;
    return FieldElem(ctx_, std::move(v));
}
inline FieldElem FieldElem::operator-() const { return ctx_->zero() - *this; }
inline FieldElem FieldElem::operator*(const FieldElem& o) const { return FieldElem(ctx_, ctx_->mul_raw(c_, o.c_)); }
inline FieldElem FieldElem::pow(u64 e) const {
    FieldElem r = ctx_->one();
    FieldElem b = *this;
    while (e > 0) {
        if (e & 1) r = r * b;
        b = b * b;
        e >>= 1;
    }
    return r;
}
inline FieldElem FieldElem::inverse() const {
    if (is_zero()) throw std::domain_error("FieldElem::inverse: zero");
    return pow(ctx_->size() - 2);
}
inline std::string FieldElem::str() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < c_.size(); ++i) {
        if (i > 0) os << '+';
        os << c_[i];
        if (i == 1) os << "*t";
        if (i > 1) os << "*t^" << i;
    }
    return os.str();
}

/// Absolute trace Tr_{F_{p^n}/F_p}(x) = sum_j x^{p^j}, returned as a residue in [0, p).
inline u64 trace_to_prime(const FieldElem& x) {
    const auto& ctx = *x.ctx();
    FieldElem acc = ctx.zero();
    FieldElem y = x;
    for (unsigned j = 0; j < ctx.n(); ++j) {
        acc = acc + y;
        y = y.pow(ctx.p());
    }
    for (unsigned i = 1; i < ctx.n(); ++i)
        if (acc.coeffs()[i] != 0) throw std::logic_error("trace_to_prime: trace not in prime field");
    return acc.coeffs()[0];
}

/// Discrete log of x to `base` by baby-step giant-step; result in [0, ord(base)).
inline u64 dlog(const FieldElem& x, const FieldElem& base) {
    if (x.is_zero()) throw std::domain_error("dlog: zero has no logarithm");
    const auto& ctx = *x.ctx();
    const u64 group = ctx.size() - 1;
    const u64 m = static_cast<u64>(std::ceil(std::sqrt(static_cast<double>(group)))) + 1;
    std::unordered_map<u64, u64> baby;
    baby.reserve(m * 2);
    FieldElem cur = ctx.one();
    for (u64 j = 0; j < m; ++j) {
        baby.emplace(ctx.encode(cur), j);
        cur = cur * base;
    }
    const FieldElem giant = base.pow(m).inverse();
    FieldElem y = x;
    for (u64 i = 0; i <= m; ++i) {
        auto it = baby.find(ctx.encode(y));
        if (it != baby.end()) {
            u64 e = i * m + it->second;
            // reduce modulo the order of base
            u64 ord = group;
            for (u64 r : nt::prime_factors(group))
                while (ord % r == 0 && base.pow(ord / r) == ctx.one()) ord /= r;
            return e % ord;
        }
        y = y * giant;
    }
    throw std::domain_error("dlog: x is not in the subgroup generated by base");
}

/// F_{q^l} over F_q with q = p^b, both represented over F_p. The embedding of
/// F_q sends t to a fixed root of F_q's modulus; the generators are linked by
/// norm(G^e) = g^{e * e_inv mod (q-1)}.
class FieldTower {
public:
    FieldTower(FieldPtr base, unsigned l) : base_(std::move(base)), l_(l) {
        if (l == 0) throw std::invalid_argument("FieldTower: l must be >= 1");
        ext_ = FieldCtx::build(base_->p(), base_->n() * l);
        const u64 q = base_->size();
        const u64 big = ext_->size();
        norm_exp_ = (big - 1) / (q - 1);
        const FieldElem h = ext_->generator().pow(norm_exp_);
        // the subfield F_q inside F_{q^l} is {0} U <h>; find the first root of base's modulus
        FieldElem y = ext_->one();
        bool found = false;
        for (u64 j = 0; j < q - 1; ++j, y = y * h) {
            if (eval_in_ext(base_->modulus(), y).is_zero()) {
                found = true;
                break;
            }
        }
        if (!found) {
            y = ext_->zero();
            if (!eval_in_ext(base_->modulus(), y).is_zero()) throw std::logic_error("FieldTower: no embedding found");
        }
        embed_t_ = y;
        const FieldElem g_img = embed(base_->generator());
        const u64 e_full = dlog(g_img, ext_->generator());
        if (q > 2) {
            const u64 e = (e_full / norm_exp_) % (q - 1);
            e_inv_ = nt::inv_mod(e, q - 1);
        } else {
            e_inv_ = 0;
        }
    }

    const FieldPtr& base() const { return base_; }
    const FieldPtr& ext() const { return ext_; }
    unsigned degree() const { return l_; }
    /// (q^l - 1)/(q - 1).
    u64 norm_exponent() const { return norm_exp_; }

    FieldElem embed(const FieldElem& a) const { return eval_in_ext(a.coeffs(), embed_t_); }

    /// dlog_g(Norm(G^e)) for the base generator g and extension generator G.
    u64 norm_log(u64 e) const {
        const u64 q = base_->size();
        if (q == 2) return 0;
        return static_cast<u64>(static_cast<u128>(e % (q - 1)) * e_inv_ % (q - 1));
    }

    /// Norm_{F_{q^l}/F_q}(x) = x^{(q^l-1)/(q-1)}, as an element of the base field.
    FieldElem norm(const FieldElem& x) const {
        if (x.is_zero()) return base_->zero();
        return base_->generator().pow(norm_log(dlog(x, ext_->generator())));
    }

private:
    FieldElem eval_in_ext(const std::vector<u64>& coeffs, const FieldElem& y) const {
        FieldElem acc = ext_->zero();
        for (std::size_t i = coeffs.size(); i-- > 0;) acc = acc * y + ext_->constant(coeffs[i]);
        return acc;
    }

    FieldPtr base_;
    FieldPtr ext_;
    unsigned l_;
    u64 norm_exp_ = 1;
    FieldElem embed_t_;
    u64 e_inv_ = 0;
};

/// Convention for the digits of the trivial residue class u = 0 mod (q-1).
enum class TrivialDigits {
    Zero,  ///< representative 0, all digits 0
    Full,  ///< representative q-1, all digits p-1
};

/// Twist exponent u mod (q-1) with its base-p digits and the exponents s_i.
struct TwistData {
    u64 p = 0;
    unsigned b = 0;
    u64 q = 0;
    u64 u = 0;                  ///< chosen representative
    std::vector<u64> digits;    ///< u_0..u_{b-1}
    std::vector<u64> s;         ///< s_0..s_{b-1}

    /// u_i with the periodic extension u_i = u_{i mod b}.
    u64 digit(i64 i) const {
        i64 r = i % static_cast<i64>(b);
        if (r < 0) r += b;
        return digits[static_cast<std::size_t>(r)];
    }
    bool trivial() const { return u % (q - 1) == 0; }
};

inline TwistData make_twist(u64 p, unsigned b, i64 u, TrivialDigits conv = TrivialDigits::Zero) {
    if (!nt::is_prime(p)) throw std::invalid_argument("make_twist: p not prime");
    if (b == 0) throw std::invalid_argument("make_twist: b must be >= 1");
    TwistData t;
    t.p = p;
    t.b = b;
    t.q = nt::checked_pow(p, b);
    const i64 qm1 = static_cast<i64>(t.q - 1);
    i64 r = qm1 == 0 ? 0 : u % qm1;
    if (r < 0) r += qm1;
    t.u = (r == 0 && conv == TrivialDigits::Full) ? t.q - 1 : static_cast<u64>(r);
    u64 rest = t.u;
    for (unsigned i = 0; i < b; ++i, rest /= p) t.digits.push_back(rest % p);
    // s_{b-l} = u_l + u_{l+1} p + ... + u_{b+l-1} p^{b-1}
    t.s.assign(b, 0);
    for (unsigned l = 0; l < b; ++l) {
        u64 v = 0;
        for (unsigned j = b; j-- > 0;) v = v * p + t.digit(l + j);
        t.s[(b - l) % b] = v;
    }
    return t;
}

}  // namespace twsum

#endif  // TWSUM_FFIELD_HPP
