#ifndef TWSUM_MODINT_HPP
#define TWSUM_MODINT_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace twsum {

using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;

/// Thrown when a computation needs more p-adic or series precision than is available.
class precision_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace nt {

inline bool is_prime(u64 n) {
    if (n < 2) return false;
    for (u64 d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

/// Distinct prime factors by trial division.
inline std::vector<u64> prime_factors(u64 n) {
    std::vector<u64> out;
    for (u64 d = 2; d * d <= n; ++d) {
        if (n % d == 0) {
            out.push_back(d);
            while (n % d == 0) n /= d;
        }
    }
    if (n > 1) out.push_back(n);
    return out;
}

/// a^e, throwing on overflow of 64 bits.
inline u64 checked_pow(u64 a, unsigned e) {
    u64 r = 1;
    for (unsigned i = 0; i < e; ++i) {
        if (a != 0 && r > UINT64_MAX / a) throw std::overflow_error("checked_pow: overflow");
        r *= a;
    }
    return r;
}

/// ord_p(n!) by Legendre's formula.
inline int vp_factorial(u64 n, u64 p) {
    int v = 0;
    while (n > 0) {
        n /= p;
        v += static_cast<int>(n);
    }
    return v;
}

/// ord_p(n) for n > 0.
inline int vp(u64 n, u64 p) {
    int v = 0;
    while (n != 0 && n % p == 0) {
        n /= p;
        ++v;
    }
    return v;
}

inline u64 gcd(u64 a, u64 b) {
    while (b != 0) {
        u64 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

/// Inverse of a modulo m; requires gcd(a, m) = 1.
inline u64 inv_mod(u64 a, u64 m) {
    if (m == 1) return 0;
    i64 t = 0, new_t = 1;
    i64 r = static_cast<i64>(m), new_r = static_cast<i64>(a % m);
    while (new_r != 0) {
        i64 q = r / new_r;
        t = std::exchange(new_t, t - q * new_t);
        r = std::exchange(new_r, r - q * new_r);
    }
    if (r != 1) throw std::domain_error("inv_mod: not invertible");
    return t < 0 ? static_cast<u64>(t + static_cast<i64>(m)) : static_cast<u64>(t);
}

/// Largest K with p^K < 2^63.
inline int max_precision(u64 p) {
    int k = 0;
    u128 v = 1;
    while (v * p < (u128(1) << 63)) {
        v *= p;
        ++k;
    }
    return k;
}

}  // namespace nt

/// Residues modulo p^K with p^K < 2^63.
class Zmod {
public:
    Zmod() = default;
    Zmod(u64 p, int K) : p_(p), K_(K) {
        if (!nt::is_prime(p)) throw std::invalid_argument("Zmod: p must be prime");
        if (K < 1) throw std::invalid_argument("Zmod: precision must be >= 1");
        if (K > nt::max_precision(p))
            throw precision_error("Zmod: p^" + std::to_string(K) + " exceeds 63-bit modulus range");
        m_ = nt::checked_pow(p, static_cast<unsigned>(K));
    }

    u64 p() const { return p_; }
    int K() const { return K_; }
    u64 modulus() const { return m_; }

    u64 reduce(u64 a) const { return a % m_; }
    u64 from_signed(i64 a) const {
        i64 r = a % static_cast<i64>(m_);
        return r < 0 ? static_cast<u64>(r + static_cast<i64>(m_)) : static_cast<u64>(r);
    }
    u64 add(u64 a, u64 b) const {
        u64 s = a + b;
        return s >= m_ ? s - m_ : s;
    }
    u64 sub(u64 a, u64 b) const { return a >= b ? a - b : a + m_ - b; }
    u64 neg(u64 a) const { return a == 0 ? 0 : m_ - a; }
    u64 mul(u64 a, u64 b) const { return static_cast<u64>(static_cast<u128>(a) * b % m_); }
    u64 pow(u64 a, u64 e) const {
        u64 r = 1 % m_;
        while (e > 0) {
            if (e & 1) r = mul(r, a);
            a = mul(a, a);
            e >>= 1;
        }
        return r;
    }
    /// Inverse of a p-adic unit.
    u64 inv(u64 a) const {
        if (a % p_ == 0) throw std::domain_error("Zmod::inv: not a unit");
        return nt::inv_mod(a, m_);
    }
    /// ord_p of a residue; returns K for zero (meaning "at least K").
    int val(u64 a) const {
        if (a == 0) return K_;
        return nt::vp(a, p_);
    }

private:
    u64 p_ = 2;
    int K_ = 1;
    u64 m_ = 2;
};

}  // namespace twsum

#endif  // TWSUM_MODINT_HPP
