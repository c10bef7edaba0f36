#include <gtest/gtest.h>

#include "twsum/charsum.hpp"

using namespace twsum;

namespace {

PolySpec poly(const FieldPtr& F, u64 d, std::map<u64, std::string> c) {
    std::map<u64, FieldElem> m;
    for (auto& [i, s] : c) m.emplace(i, F->parse(s));
    return make_poly(F, d, m);
}

}  // namespace

TEST(PolySpec, SecondExponentAndValidation) {
    auto F = FieldCtx::build(11, 1);
    EXPECT_EQ(poly(F, 3, {{3, "1"}, {1, "2"}}).k, 1u);
    EXPECT_EQ(poly(F, 3, {{3, "1"}, {2, "2"}, {1, "5"}}).k, 2u);
    EXPECT_EQ(poly(F, 2, {{2, "4"}}).k, 0u);
    EXPECT_THROW(poly(F, 2, {{1, "4"}}), std::invalid_argument);
    EXPECT_THROW(poly(F, 2, {{2, "1"}, {0, "3"}}), std::invalid_argument);
}

TEST(WittTrace, LengthOneIsFieldTrace) {
    auto F = FieldCtx::build(3, 2);
    const auto f = poly(F, 2, {{2, "1+t"}, {1, "2"}});
    for (unsigned l : {1u, 2u}) {
        FieldTower T(F, l);
        for (u64 c = 1; c < T.ext()->size(); ++c) {
            const FieldElem x = T.ext()->decode(c);
            const FieldElem fx = T.embed(f.coeff(2)) * x * x + T.embed(f.coeff(1)) * x;
            EXPECT_EQ(witt_trace_exponent(x, f, T, 1), trace_to_prime(fx));
        }
    }
}

TEST(WittTrace, IdentityPolynomialGivesTeichmullerResidue) {
    auto F = FieldCtx::build(5, 1);
    const auto f = poly(F, 1, {{1, "1"}});
    FieldTower T(F, 1);
    EXPECT_EQ(witt_trace_exponent(T.ext()->constant(2), f, T, 2), 7u);
    auto zq = ZqCtx::build(F, 3);
    for (u64 x = 1; x < 5; ++x)
        EXPECT_EQ(witt_trace_exponent(T.ext()->constant(x), f, T, 3), zq->teichmuller(F->constant(x)).coeffs()[0]);
}

TEST(SSum, Examples) {
    {
        auto F = FieldCtx::build(11, 1);
        auto zq = ZqCtx::build(F, 4);
        auto pim = std::make_shared<const PimCtx>(zq, 1);
        const auto S = s_sum(poly(F, 1, {{1, "1"}}), make_twist(11, 1, 0), 1, pim);
        EXPECT_TRUE(S.congruent(PimElem::from_zq(pim, zq->from_int(-1)), 4));
    }
    {
        auto F = FieldCtx::build(3, 1);
        auto zq = ZqCtx::build(F, 4);
        auto pim = std::make_shared<const PimCtx>(zq, 1);
        const auto S = s_sum(poly(F, 2, {{2, "1"}}), make_twist(3, 1, 0), 1, pim);
        const PimElem two_zeta = PimElem::zeta_pow(pim, 1).scaled(zq->from_int(2));
        EXPECT_TRUE(S.congruent(two_zeta, 4));
    }
}

TEST(SSum, MatchesDirectEnumeration) {
    // oracle: enumerate F_{p^l} as its own field, chi via dlog of x^{(q^l-1)/(q-1)}, additive part via trace
    const u64 p = 7;
    auto F = FieldCtx::build(p, 1);
    const auto f = poly(F, 2, {{2, "3"}, {1, "5"}});
    auto zq = ZqCtx::build(F, 5);
    auto pim = std::make_shared<const PimCtx>(zq, 1);
    const ZqElem w = zq->teichmuller(F->generator());
    for (unsigned l : {1u, 2u, 3u}) {
        auto E = FieldCtx::build(p, l);
        const u64 big = E->size();
        for (i64 u : {0, 1, 4}) {
            PimElem expect = PimElem::from_zq(pim, zq->zero());
            for (u64 c = 1; c < big; ++c) {
                const FieldElem x = E->decode(c);
                const FieldElem nx = x.pow((big - 1) / (p - 1));
                const u64 n = nx.coeffs()[0];
                const u64 fx = trace_to_prime(E->constant(3) * x * x + E->constant(5) * x);
                // chi(n) = omega(n)^{-u}
                const u64 e = dlog(F->constant(n), F->generator());
                const u64 ce = ((p - 1) - (static_cast<u64>(u) * e) % (p - 1)) % (p - 1);
                expect += PimElem::zeta_pow(pim, fx).scaled(w.pow(ce));
            }
            const auto got = s_sum(f, make_twist(p, 1, u), l, pim);
            EXPECT_TRUE(got.congruent(expect, 5)) << "l=" << l << " u=" << u;
        }
    }
}

TEST(SSum, GaloisTwistExhaustive) {
    // S_{f, chi^p} = sigma(S_{f, chi}) for every u, q = 121
    auto F = FieldCtx::build(11, 2);
    const auto f = poly(F, 2, {{2, "1+t"}, {1, "3+2*t"}});
    auto zq = ZqCtx::build(F, 3);
    auto pim = std::make_shared<const PimCtx>(zq, 1);
    for (i64 u = 0; u < 120; ++u) {
        const auto S = s_sum(f, make_twist(11, 2, u), 1, pim);
        const auto Sp = s_sum(f, make_twist(11, 2, 11 * u), 1, pim);
        EXPECT_TRUE(Sp.congruent(S.frobenius(1), 3)) << "u=" << u;
    }
}

TEST(SSeries, ConstantTermVanishesForNontrivialChi) {
    auto F = FieldCtx::build(11, 1);
    const auto f = poly(F, 2, {{2, "1"}, {1, "1"}});
    for (i64 u = 1; u < 10; ++u) {
        const auto S = s_series(f, make_twist(11, 1, u), 1, 6, 4);
        EXPECT_TRUE(S.coeffs[0].is_zero());
    }
}

TEST(SSeries, TrivialCharacterUnrolled) {
    auto F = FieldCtx::build(5, 1);
    const auto f = poly(F, 1, {{1, "1"}});
    const int N = 8, K = 4;
    const auto S = s_series(f, make_twist(5, 1, 0), 1, N, K);
    for (int k = 0; k < N; ++k) {
        const u64 pp = nt::checked_pow(5, static_cast<unsigned>(S.prec[static_cast<std::size_t>(k)]));
        u64 expect = 0;
        auto zq = ZqCtx::build(F, 10);
        for (u64 x = 1; x < 5; ++x) {
            const auto b = binom_series(zq, zq->teichmuller(F->constant(x)).coeffs()[0], 10, N);
            expect = (expect + b.coeffs[static_cast<std::size_t>(k)].coeffs()[0]) % pp;
        }
        EXPECT_EQ(S.coeffs[static_cast<std::size_t>(k)].coeffs()[0] % pp, expect) << k;
    }
}

TEST(SSeries, SpecializationMatchesSSum) {
    for (auto [p, b] : {std::pair<u64, unsigned>{3, 1}, {5, 1}, {3, 2}}) {
        auto F = FieldCtx::build(p, b);
        const auto f = poly(F, 2, {{2, "1"}, {1, "2"}});
        const u64 q = F->size();
        for (unsigned m : {1u, 2u})
            for (i64 u = 0; u + 1 < static_cast<i64>(q); ++u) {
                const auto tw = make_twist(p, b, u);
                const int K = 3;
                const int e = static_cast<int>(nt::checked_pow(p, m - 1) * (p - 1));
                const int N = e * K + 1;
                const auto S = s_series(f, tw, 1, N, K + 2);
                auto zq = ZqCtx::build(F, S.ctx->K());
                auto pim = std::make_shared<const PimCtx>(zq, m);
                TSeries Sk{zq, {}, S.prec};
                for (const auto& c : S.coeffs) Sk.coeffs.push_back(zq->elem(c.coeffs()));
                const PimElem via_series = subst_T(Sk, pim);
                ASSERT_GE(via_series.prec(), K);
                const PimElem direct = s_sum(f, tw, 1, pim);
                EXPECT_TRUE(via_series.congruent(direct, K)) << "p=" << p << " b=" << b << " m=" << m << " u=" << u;
            }
    }
}

TEST(SSum, EnumerationGuard) {
    auto F = FieldCtx::build(11, 2);
    auto zq = ZqCtx::build(F, 2);
    auto pim = std::make_shared<const PimCtx>(zq, 1);
    EXPECT_THROW(s_sum(poly(F, 2, {{2, "1"}}), make_twist(11, 2, 1), 3, pim, 1000), std::length_error);
}

TEST(LPoly, DegreeAndNormalization) {
    auto F = FieldCtx::build(11, 1);
    for (i64 u : {0, 1, 5}) {
        const auto f = poly(F, 2, {{2, "1"}, {1, "1"}});
        const auto L = l_poly(f, make_twist(11, 1, u), 1, 5, 2);
        EXPECT_EQ(L.degree, 2u);
        ASSERT_EQ(L.coeffs.size(), 5u);
        EXPECT_EQ(L.valuations[0], Valuation::exact(0));
        // coefficients past the degree vanish to working precision
        EXPECT_FALSE(L.valuations[3].determinate);
        EXPECT_FALSE(L.valuations[4].determinate);
        EXPECT_TRUE(L.conclusive);
        EXPECT_EQ(L.newton.polygon.extent(), 2);
    }
}

TEST(LPoly, BoundOnExample) {
    auto F = FieldCtx::build(11, 1);
    const auto f = poly(F, 2, {{2, "1"}, {1, "1"}});
    const auto L = l_poly(f, make_twist(11, 1, 1), 1, 6);
    const auto bound = p_dk_u(make_spec(11, 1, 2, 1, 1, 2));
    EXPECT_TRUE(dominates(L.newton.polygon, bound, 2).holds);
    // each slope is at most ord_{pi_1}(q) = p - 1
    for (const auto& s : L.newton.polygon.slopes()) EXPECT_LE(s, Rat(10));
}

TEST(LPoly, SecondLevelDegree) {
    // m = 2, p = 3, d = 2: degree p d = 6 over F_3
    auto F = FieldCtx::build(3, 1);
    const auto f = poly(F, 2, {{2, "1"}, {1, "1"}});
    const auto L = l_poly(f, make_twist(3, 1, 1), 2, 4, 1);
    EXPECT_EQ(L.degree, 6u);
    EXPECT_FALSE(L.valuations[7].determinate);
}

TEST(LPoly, RejectsPDividingD) {
    auto F = FieldCtx::build(3, 1);
    EXPECT_THROW(l_poly(poly(F, 3, {{3, "1"}, {1, "1"}}), make_twist(3, 1, 1), 1, 4), std::invalid_argument);
}

TEST(LToC, Extent) {
    auto F = FieldCtx::build(11, 1);
    const auto L = l_poly(poly(F, 2, {{2, "2"}, {1, "7"}}), make_twist(11, 1, 3), 1, 5);
    EXPECT_EQ(l_to_c_np(L, 0).extent(), 0);
    EXPECT_EQ(l_to_c_np(L, 2), L.newton.polygon);
    EXPECT_THROW(l_to_c_np(L, 3), std::out_of_range);
}
