#include <gtest/gtest.h>

#include "twsum/ffield.hpp"

using namespace twsum;

namespace {

// x^e by repeated multiplication, independent of FieldElem::pow
FieldElem slow_pow(const FieldElem& x, u64 e) {
    FieldElem r = x.ctx()->one();
    for (u64 i = 0; i < e; ++i) r = r * x;
    return r;
}

std::vector<FieldElem> all_elements(const FieldPtr& F) {
    std::vector<FieldElem> v;
    for (u64 c = 0; c < F->size(); ++c) v.push_back(F->decode(c));
    return v;
}

}  // namespace

TEST(FieldBuild, F4UsesUniqueQuadratic) {
    auto F = FieldCtx::build(2, 2);
    EXPECT_EQ(F->modulus(), (std::vector<u64>{1, 1, 1}));
}

TEST(FieldBuild, F11GeneratorIsTwo) {
    auto F = FieldCtx::build(11, 1);
    EXPECT_EQ(F->generator(), F->constant(2));
}

TEST(FieldBuild, UserModulus) {
    auto F = FieldCtx::build(3, 2, std::vector<u64>{1, 0, 1});
    EXPECT_EQ(F->size(), 9u);
    EXPECT_EQ(F->t() * F->t(), F->constant(2));
}

TEST(FieldBuild, Rejections) {
    EXPECT_THROW(FieldCtx::build(9, 1), std::invalid_argument);
    EXPECT_THROW(FieldCtx::build(3, 2, std::vector<u64>{2, 0, 1}), std::invalid_argument);  // t^2 - 1
    EXPECT_THROW(FieldCtx::build(3, 2, std::vector<u64>{1, 1}), std::invalid_argument);
}

TEST(FieldBuild, DefaultModulusIsLeastIrreducible) {
    // brute force: first monic of degree n (by code) with no root and, for n <= 3, that is enough
    for (u64 p : {2u, 3u, 5u, 7u}) {
        for (unsigned n : {2u, 3u}) {
            std::vector<u64> expect;
            for (u64 code = 0;; ++code) {
                std::vector<u64> c(n + 1, 0);
                u64 x = code;
                for (unsigned i = 0; i < n; ++i, x /= p) c[i] = x % p;
                c[n] = 1;
                bool root = false;
                for (u64 r = 0; r < p && !root; ++r) {
                    u64 v = 0;
                    for (unsigned i = n + 1; i-- > 0;) v = (v * r + c[i]) % p;
                    root = v == 0;
                }
                if (!root) {
                    expect = c;
                    break;
                }
            }
            EXPECT_EQ(FieldCtx::build(p, n)->modulus(), expect) << p << "^" << n;
        }
    }
}

TEST(FieldBuild, GeneratorHasFullOrder) {
    for (auto [p, n] : {std::pair<u64, unsigned>{2, 3}, {3, 2}, {5, 2}, {7, 2}, {11, 2}}) {
        auto F = FieldCtx::build(p, n);
        const FieldElem g = F->generator();
        FieldElem x = g;
        u64 order = 1;
        while (!(x == F->one())) {
            x = x * g;
            ++order;
        }
        EXPECT_EQ(order, F->size() - 1);
    }
}

TEST(FieldTrace, Examples) {
    auto F4 = FieldCtx::build(2, 2);
    EXPECT_EQ(trace_to_prime(F4->t()), 1u);
    auto F11 = FieldCtx::build(11, 1);
    EXPECT_EQ(trace_to_prime(F11->constant(7)), 7u);
    auto F9 = FieldCtx::build(3, 2, std::vector<u64>{1, 0, 1});
    EXPECT_EQ(trace_to_prime(F9->t()), 0u);
}

TEST(FieldTrace, AdditiveAndFrobeniusInvariant) {
    for (auto [p, n] : {std::pair<u64, unsigned>{3, 2}, {7, 2}, {2, 4}, {3, 3}}) {
        auto F = FieldCtx::build(p, n);
        const auto els = all_elements(F);
        for (const auto& x : els) {
            EXPECT_EQ(trace_to_prime(slow_pow(x, p)), trace_to_prime(x));
            for (std::size_t j = 0; j < els.size(); j += 5)
                EXPECT_EQ(trace_to_prime(x + els[j]), (trace_to_prime(x) + trace_to_prime(els[j])) % p);
        }
    }
}

TEST(FieldNorm, Examples) {
    auto F3 = FieldCtx::build(3, 1);
    FieldTower T(F3, 2);
    EXPECT_EQ(T.norm(T.ext()->one()), F3->one());
    // F_121 / F_11: norm of the generator generates F_11^x
    auto F11 = FieldCtx::build(11, 1);
    FieldTower T2(F11, 2);
    const FieldElem n = T2.norm(T2.ext()->generator());
    u64 order = 1;
    for (FieldElem x = n; !(x == F11->one()); x = x * n) ++order;
    EXPECT_EQ(order, 10u);
}

TEST(FieldNorm, MatchesPowerAndIsMultiplicative) {
    for (auto [p, b, l] : {std::tuple<u64, unsigned, unsigned>{2, 1, 3}, {3, 1, 2}, {3, 2, 2}, {11, 1, 2}, {7, 2, 1}, {2, 2, 3}}) {
        auto F = FieldCtx::build(p, b);
        FieldTower T(F, l);
        const auto els = all_elements(T.ext());
        for (std::size_t i = 1; i < els.size(); ++i) {
            const auto& x = els[i];
            // embedded norm equals x^{(q^l-1)/(q-1)}
            EXPECT_EQ(T.embed(T.norm(x)), x.pow(T.norm_exponent()));
            const auto& y = els[(i * 7) % (els.size() - 1) + 1];
            EXPECT_EQ(T.norm(x * y), T.norm(x) * T.norm(y));
        }
    }
}

TEST(FieldNorm, Transitivity) {
    for (u64 p : {2u, 3u}) {
        auto Fp = FieldCtx::build(p, 1);
        auto Fq = FieldCtx::build(p, 2);
        FieldTower big(Fp, 4), top(Fq, 2), low(Fp, 2);
        ASSERT_EQ(big.ext()->modulus(), top.ext()->modulus());
        for (const auto& x : all_elements(big.ext())) {
            if (x.is_zero()) continue;
            const FieldElem via = low.norm(low.ext()->elem(top.norm(top.ext()->elem(x.coeffs())).coeffs()));
            EXPECT_EQ(via, big.norm(x));
        }
    }
}

TEST(FieldDlog, Examples) {
    auto F = FieldCtx::build(11, 1);
    EXPECT_EQ(dlog(F->constant(9), F->constant(2)), 6u);
    EXPECT_EQ(dlog(F->constant(2), F->constant(2)), 1u);
    EXPECT_EQ(dlog(F->one(), F->constant(2)), 0u);
    EXPECT_THROW(dlog(F->zero(), F->constant(2)), std::domain_error);
}

TEST(FieldDlog, RoundTripExhaustive) {
    for (auto [p, n] : {std::pair<u64, unsigned>{7, 1}, {11, 1}, {7, 2}, {11, 2}, {2, 5}, {3, 4}}) {
        auto F = FieldCtx::build(p, n);
        const FieldElem g = F->generator();
        FieldElem x = F->one();
        for (u64 e = 0; e < F->size() - 1; ++e, x = x * g) EXPECT_EQ(dlog(x, g), e);
    }
}

TEST(FieldElemText, ParseAndPrint) {
    auto F = FieldCtx::build(11, 2);
    const FieldElem x = F->parse("3+4*t");
    EXPECT_EQ(x.str(), "3+4*t");
    EXPECT_EQ(F->parse(x.str()), x);
    EXPECT_EQ(F->parse("t^2"), F->t() * F->t());
    EXPECT_EQ(F->parse("-1"), F->constant(10));
}

TEST(Twist, DigitsAndExponentsExhaustive) {
    for (auto [p, b] : {std::pair<u64, unsigned>{7, 1}, {11, 1}, {7, 2}, {11, 2}}) {
        const u64 q = nt::checked_pow(p, b);
        for (i64 u = 0; u < static_cast<i64>(q) - 1; ++u) {
            for (auto conv : {TrivialDigits::Zero, TrivialDigits::Full}) {
                const auto tw = make_twist(p, b, u, conv);
                u64 rebuilt = 0;
                for (unsigned i = b; i-- > 0;) {
                    EXPECT_LT(tw.digits[i], p);
                    rebuilt = rebuilt * p + tw.digits[i];
                }
                EXPECT_EQ(rebuilt, tw.u);
                u64 pi = 1;
                for (unsigned i = 0; i < b; ++i, pi *= p) {
                    EXPECT_LT(tw.s[i], q - 1 + (tw.u == q - 1 ? 1 : 0));
                    EXPECT_EQ(tw.s[i] % (q - 1), (pi * tw.u) % (q - 1)) << "u=" << u << " i=" << i;
                }
            }
        }
    }
}

TEST(Twist, TrivialClassConventions) {
    const auto z = make_twist(11, 2, 0, TrivialDigits::Zero);
    const auto f = make_twist(11, 2, 120, TrivialDigits::Full);
    EXPECT_EQ(z.u, 0u);
    EXPECT_EQ(f.u, 120u);
    EXPECT_EQ(f.digits, (std::vector<u64>{10, 10}));
    EXPECT_EQ(make_twist(11, 1, -1).u, 9u);
    EXPECT_EQ(make_twist(11, 1, 23).u, 3u);
}
