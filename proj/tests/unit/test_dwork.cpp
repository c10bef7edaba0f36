#include <gtest/gtest.h>

#include <algorithm>
#include <boost/multiprecision/cpp_int.hpp>
#include <numeric>
#include <random>

#include "twsum/dwork.hpp"

using namespace twsum;
using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;

namespace {

PolySpec poly(const FieldPtr& F, u64 d, std::map<u64, std::string> c) {
    std::map<u64, FieldElem> m;
    for (auto& [i, s] : c) m.emplace(i, F->parse(s));
    return make_poly(F, d, m);
}

u64 reduce_rational(const cpp_rational& r, u64 p, int K) {
    const Zmod z(p, K);
    const cpp_int m = z.modulus();
    cpp_int num = boost::multiprecision::numerator(r) % m;
    if (num < 0) num += m;
    const u64 den = static_cast<u64>(boost::multiprecision::denominator(r) % m);
    return z.mul(static_cast<u64>(num), z.inv(den));
}

// exp(g) for g with g(0)=0, by summing g^k/k! over rationals
std::vector<cpp_rational> exp_series(const std::vector<cpp_rational>& g) {
    const std::size_t n = g.size();
    std::vector<cpp_rational> out(n, 0), pw(n, 0);
    pw[0] = 1;
    cpp_rational fact = 1;
    for (std::size_t k = 0; k < n; ++k) {
        if (k > 0) fact *= static_cast<long>(k);
        for (std::size_t i = 0; i < n; ++i) out[i] += pw[i] / fact;
        std::vector<cpp_rational> nx(n, 0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; i + j < n; ++j) nx[i + j] += pw[i] * g[j];
        pw = std::move(nx);
    }
    return out;
}

PiSeries random_series(const ZqPtr& zq, int N, std::mt19937_64& rng) {
    PiSeries s(zq, N);
    for (int i = 0; i < N; ++i) {
        std::vector<u64> c(zq->b());
        for (auto& x : c) x = rng() % zq->q();
        s.set(i, zq->elem(c));
    }
    return s;
}

PiSeries leibniz_det(const SeriesMatrix& A, const std::vector<int>& idx) {
    const ZqPtr& zq = A.zq();
    PiSeries det(zq, A.N());
    std::vector<int> perm(idx.size());
    std::iota(perm.begin(), perm.end(), 0);
    do {
        int inv = 0;
        for (std::size_t i = 0; i < perm.size(); ++i)
            for (std::size_t j = i + 1; j < perm.size(); ++j) inv += perm[i] > perm[j];
        PiSeries term = PiSeries::constant(zq->one(), A.N());
        for (std::size_t i = 0; i < perm.size(); ++i) term = term * A(idx[i], idx[static_cast<std::size_t>(perm[i])]);
        if (inv % 2) det -= term;
        else det += term;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return det;
}

}  // namespace

TEST(ArtinHasse, LowCoefficientsAreInverseFactorials) {
    for (u64 p : {5ull, 7ull, 11ull}) {
        const auto lam = artin_hasse(static_cast<int>(p), p, 6);
        cpp_rational f = 1;
        for (u64 n = 0; n < p; ++n) {
            if (n > 0) f *= static_cast<long>(n);
            EXPECT_EQ(lam[n], reduce_rational(1 / f, p, 6)) << "p=" << p << " n=" << n;
        }
    }
}

TEST(ArtinHasse, MatchesExponentialOfLogSeries) {
    const u64 p = 3;
    const int n = 20, K = 8;
    std::vector<cpp_rational> g(n, 0);
    for (u64 pj = 1; pj < static_cast<u64>(n); pj *= p) g[pj] = cpp_rational(1, static_cast<long>(pj));
    const auto ex = exp_series(g);
    const auto lam = artin_hasse(n, p, K);
    for (int i = 0; i < n; ++i) EXPECT_EQ(lam[static_cast<std::size_t>(i)], reduce_rational(ex[static_cast<std::size_t>(i)], p, K)) << i;
}

TEST(Gamma, Monomial) {
    auto F = FieldCtx::build(7, 2);
    const auto f = poly(F, 3, {{3, "2+t"}});
    const int N = 6;
    auto zq = ZqCtx::build(F, 5);
    const auto g = ef_gamma(f, zq, 16, N);
    const auto lam = artin_hasse(N, 7, 5);
    const ZqElem a = zq->teichmuller(f.coeff(3));
    for (i64 n = 0; n < 16; ++n) {
        PiSeries expect(zq, N);
        if (n % 3 == 0 && n / 3 < N) expect.set(static_cast<int>(n / 3), a.pow(static_cast<u64>(n / 3)) * zq->from_int(static_cast<i64>(lam[static_cast<std::size_t>(n / 3)])));
        EXPECT_TRUE(g.at(n).congruent(expect, N, zq->K())) << n;
    }
}

TEST(Gamma, TwoTermDirectConvolution) {
    // gamma_n = sum_{2s + t = n} lambda_s lambda_t a2^s a1^t pi^{s+t}
    auto F = FieldCtx::build(11, 1);
    const auto f = poly(F, 2, {{2, "3"}, {1, "7"}});
    const int N = 12;
    auto zq = ZqCtx::build(F, 6);
    const auto g = ef_gamma(f, zq, gamma_count(2, N), N);
    const auto lam = artin_hasse(N, 11, 6);
    const ZqElem a2 = zq->teichmuller(f.coeff(2)), a1 = zq->teichmuller(f.coeff(1));
    for (i64 n = 0; n < g.size(); ++n) {
        PiSeries expect(zq, N);
        for (i64 s = 0; 2 * s <= n; ++s) {
            const i64 t = n - 2 * s;
            if (s + t >= N) continue;
            PiSeries term(zq, N);
            term.set(static_cast<int>(s + t), a2.pow(static_cast<u64>(s)) * a1.pow(static_cast<u64>(t)) *
                                                  zq->from_int(static_cast<i64>(lam[static_cast<std::size_t>(s)] * lam[static_cast<std::size_t>(t)] % zq->zmod().modulus())));
            expect += term;
        }
        EXPECT_TRUE(g.at(n).congruent(expect, N, zq->K())) << n;
    }
    EXPECT_TRUE(g.at(0).congruent(PiSeries::constant(zq->one(), N), N, zq->K()));
}

TEST(Gamma, OrderBound) {
    auto F = FieldCtx::build(13, 1);
    const auto f = poly(F, 3, {{3, "2"}, {2, "5"}, {1, "1"}});
    const int N = 40;
    auto zq = ZqCtx::build(F, 4);
    const auto g = ef_gamma(f, zq, 100, N);
    for (i64 n = 0; n < 100; ++n) {
        const i64 r = n % 3;
        const i64 bound = n / 3 + (r + 1) / 2;
        const Valuation v = g.at(n).ord();
        if (v.determinate) {
            EXPECT_GE(v.value, Rat(bound)) << n;
        }
    }
}

TEST(PsiMatrix, SingleBlockEntries) {
    auto F = FieldCtx::build(11, 1);
    const auto f = poly(F, 2, {{2, "1"}, {1, "1"}});
    const auto tw = make_twist(11, 1, 4);
    const DworkParams prm{6, 10, 5};
    auto zq = ZqCtx::build(F, prm.K);
    const auto g = ef_gamma(f, zq, gamma_count(2, prm.N), prm.N);
    const auto A = psi_b_matrix(g, tw, prm.J, prm.N);
    for (int l = 0; l < prm.J; ++l)
        for (int j = 0; j < prm.J; ++j) {
            const i64 n = 11 * l + 4 - j;
            if (n < 0 || n >= g.size()) EXPECT_TRUE(A(l, j).is_zero());
            else EXPECT_TRUE(A(l, j).congruent(g.at(n), prm.N, zq->K()));
        }
}

TEST(CharSeries, AgreesWithPrincipalMinors) {
    std::mt19937_64 rng(11);
    for (unsigned b : {1u, 2u}) {
        auto F = FieldCtx::build(5, b);
        auto zq = ZqCtx::build(F, 4);
        const int n = 5, N = 4;
        SeriesMatrix A(zq, n, N);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) A(r, c) = random_series(zq, N, rng);
        const auto cs = char_series(A, n);
        ASSERT_EQ(cs.size(), static_cast<std::size_t>(n + 1));
        EXPECT_TRUE(cs[0].congruent(PiSeries::constant(zq->one(), N), N, zq->K()));
        for (int i = 1; i <= n; ++i) {
            PiSeries sum(zq, N);
            for (unsigned mask = 0; mask < (1u << n); ++mask) {
                if (std::popcount(mask) != i) continue;
                std::vector<int> idx;
                for (int r = 0; r < n; ++r)
                    if (mask >> r & 1) idx.push_back(r);
                sum += leibniz_det(A, idx);
            }
            EXPECT_TRUE(cs[static_cast<std::size_t>(i)].congruent(sum, N, zq->K())) << "b=" << b << " i=" << i;
        }
        const auto top = char_series(A, 2);
        EXPECT_EQ(top.size(), 3u);
        EXPECT_TRUE(top[2].congruent(cs[2], N, zq->K()));
        EXPECT_TRUE(cs[1].congruent(A.trace(), N, zq->K()));
    }
}

TEST(TraceConsistency, SpecExamples) {
    auto F = FieldCtx::build(11, 1);
    EXPECT_TRUE(trace_consistency(poly(F, 2, {{2, "1"}, {1, "1"}}), make_twist(11, 1, 1), 10, 5).equal);
    EXPECT_TRUE(trace_consistency(poly(F, 2, {{2, "1"}}), make_twist(11, 1, 0), 10, 5).equal);
}

TEST(TraceConsistency, ExtensionFields) {
    {
        auto F = FieldCtx::build(3, 2);
        const auto f = poly(F, 2, {{2, "1+t"}, {1, "2"}});
        for (i64 u = 0; u < 8; ++u) EXPECT_TRUE(trace_consistency(f, make_twist(3, 2, u), 10, 5).equal) << u;
    }
    {
        auto F = FieldCtx::build(3, 3);
        const auto f = poly(F, 2, {{2, "1"}, {1, "t"}});
        for (i64 u : {0, 1, 5, 13, 25}) EXPECT_TRUE(trace_consistency(f, make_twist(3, 3, u), 9, 4).equal) << u;
    }
}

TEST(TraceConsistency, WrongTwistIsDetected) {
    auto F = FieldCtx::build(11, 1);
    const auto f = poly(F, 2, {{2, "1"}, {1, "1"}});
    const auto r = trace_consistency(f, make_twist(11, 1, 1), make_twist(11, 1, 2), 10, 5);
    EXPECT_FALSE(r.equal);
}

TEST(TraceConsistency, TrivialClassNeedsZeroDigits) {
    // the representative q-1 puts the trivial class on the shifted basis, which is a different space
    auto F = FieldCtx::build(5, 1);
    const auto f = poly(F, 2, {{2, "1"}, {1, "2"}});
    EXPECT_TRUE(trace_consistency(f, make_twist(5, 1, 0, TrivialDigits::Zero), 10, 5).equal);
    EXPECT_FALSE(trace_consistency(f, make_twist(5, 1, 0, TrivialDigits::Full), 10, 5).equal);
}

TEST(CharSeries, ConjugateTwist) {
    // p u lands on the sigma-conjugate class: same orders, coefficients moved by sigma
    auto F = FieldCtx::build(3, 2);
    const auto f = poly(F, 2, {{2, "1+t"}, {1, "1"}});
    const DworkParams prm{12, 12, 6};
    for (i64 u : {1, 2, 5}) {
        const auto c = char_series(f, make_twist(3, 2, u), prm, 4);
        const auto cp = char_series(f, make_twist(3, 2, 3 * u), prm, 4);
        for (std::size_t i = 0; i < c.size(); ++i) {
            EXPECT_EQ(c[i].ord(), cp[i].ord()) << "u=" << u << " i=" << i;
        }
    }
}

TEST(CFunction, ExampleAboveArithmeticBound) {
    auto F = FieldCtx::build(11, 1);
    const auto f = poly(F, 2, {{2, "1"}, {1, "1"}});
    const auto tw = make_twist(11, 1, 1);
    const auto r = c_function_np(f, tw, 4);
    EXPECT_TRUE(r.conclusive);
    EXPECT_TRUE(r.stable);
    EXPECT_EQ(r.polygon.value(0), Rat(0));
    const auto bound = p_dk_u(make_spec(11, 1, 2, 1, 1, 4));
    EXPECT_EQ(bound.value(1), Rat(1));
    EXPECT_EQ(bound.value(2), Rat(6));
    EXPECT_EQ(bound.value(3), Rat(17));
    EXPECT_TRUE(dominates(r.polygon, bound, 4).holds);

    // fixed parameters at double size give the same polygon
    CFunctionOptions fixed;
    fixed.adaptive = false;
    const DworkParams big{r.params.J * 2, r.params.N * 2, r.params.K};
    EXPECT_EQ(c_function_np(f, tw, 4, fixed, big).polygon, r.polygon);
}

TEST(CFunction, TruncationTooSmallIsInconclusive) {
    auto F = FieldCtx::build(11, 1);
    const auto f = poly(F, 2, {{2, "1"}, {1, "1"}});
    CFunctionOptions fixed;
    fixed.adaptive = false;
    const auto r = c_function_np(f, make_twist(11, 1, 1), 4, fixed, DworkParams{8, 3, 4});
    EXPECT_FALSE(r.conclusive);
    EXPECT_FALSE(r.indeterminate.empty());
}
