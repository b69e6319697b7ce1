#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include <wavedecay/certificates.hpp>

#include "oracles.hpp"

using namespace wavedecay;

TEST(CriticalRate, MatchesLongDoubleBisection) {
    for (double d : {0.05, 0.3, 1.0, 2.5, 6.0, 10.0}) {
        const double l = weights::critical_rate(d).value;
        const long double ref = oracle::critical_rate_bisect(d, 1e-30L, 100.0L);
        EXPECT_NEAR(l, static_cast<double>(ref), 1e-12 * std::max(1.0, l)) << "drift " << d;
    }
}

TEST(CriticalRate, ZeroDriftIsUnbounded) {
    const auto r = weights::critical_rate(0.0);
    EXPECT_TRUE(r.infinite);
}

TEST(CriticalRate, NegativeDriftThrows) { EXPECT_THROW((void)weights::critical_rate(-1.0), Error); }

TEST(CriticalRate, RootFunctionSignsAroundRoot) {
    const double d = 0.7;
    const double ratio = weights::critical_rate(d).value / d;
    EXPECT_LT(weights::root_function(d, ratio * 0.999), 0.0);
    EXPECT_GT(weights::root_function(d, ratio * 1.001), 0.0);
}

TEST(ExplicitRate, ClosedForm) {
    const double d = 0.4;
    const double ref = std::sqrt(2.0) * d * std::exp(-2 * d) * std::sqrt(1 - 4 * d * std::exp(-4 * d));
    EXPECT_DOUBLE_EQ(weights::explicit_rate(d), ref);
    EXPECT_EQ(weights::explicit_rate(0.0), 0.0);
}

TEST(ExplicitRate, BelowCriticalAndAdmissible) {
    for (double d : numerics::log_space(0.01, 20.0, 80)) {
        const double l0 = weights::explicit_rate(d);
        EXPECT_LT(l0, weights::critical_rate(d).value) << d;
        EXPECT_GT(weights::admissibility_margin(d, l0), 0.0) << d;
    }
}

TEST(AdmissibilityMargin, MatchesDirectFormulaAwayFromCancellation) {
    const double d = 0.5;
    for (double l : {0.1, 0.5, 1.0}) {
        const double s = std::hypot(d, l);
        EXPECT_NEAR(weights::admissibility_margin(d, l), s / (d + l) - std::tanh(s), 1e-14);
    }
}

TEST(Weights, MatchRk4Oracle) {
    const std::pair<double, double> cases[] = {{0.1, 0.05}, {0.5, 0.2}, {1.0, 0.1}, {2.0, 0.01}, {0.3840592437, 0.2061447835}};
    for (auto [d, l] : cases) {
        const auto w = build_weights(d, l);
        for (double y : {0.25, 0.5, 1.0}) {
            const auto [p1, p2] = oracle::weights_rk4(d, l, y, 4000);
            EXPECT_NEAR(w.phi1(y), p1, 1e-11);
            EXPECT_NEAR(w.phi2(y), p2, 1e-11);
        }
    }
}

TEST(Weights, DerivativesSatisfyTheSystem) {
    const auto w = build_weights(0.8, 0.15);
    for (double y : {0.0, 0.3, 0.9}) {
        EXPECT_NEAR(w.dphi1(y), w.lambda * w.phi1(y) + w.drift * (w.phi1(y) - w.phi2(y)), 1e-13);
        EXPECT_NEAR(w.dphi2(y), -w.lambda * w.phi2(y) - w.drift * (w.phi1(y) - w.phi2(y)), 1e-13);
    }
}

TEST(Weights, ZeroRateGivesUnitWeights) {
    const auto w = build_weights(0.0, 0.0);
    EXPECT_DOUBLE_EQ(w.phi1(0.7), 1.0);
    EXPECT_DOUBLE_EQ(w.phi2(0.7), 1.0);
}

TEST(Weights, SecondWeightVanishesAtCriticalRate) {
    for (double d : {0.2, 1.0, 3.0}) {
        const double ls = weights::critical_rate(d).value;
        const auto w = build_weights(d, ls * (1.0 - 1e-8));
        EXPECT_GT(w.phi2(1.0), 0.0);
        EXPECT_LT(w.phi2(1.0), 1e-6) << d;
    }
}

TEST(Weights, RateAtOrAboveCriticalThrows) {
    const double ls = weights::critical_rate(0.5).value;
    EXPECT_THROW((void)build_weights(0.5, ls), Error);
    EXPECT_THROW((void)build_weights(0.5, -0.1), Error);
}

TEST(CothInequality, HoldsOnAdmissibleRange) {
    for (double a : {0.1, 0.5, 1.0, 2.0, 5.0}) {
        const double top = weights::coth_inequality_bound(a);
        ASSERT_GT(top, 1.0) << a;
        for (int i = 1; i <= 1000; ++i) {
            const double q = 1.0 + (top - 1.0) * i / 1001.0;
            if (q <= 1.0) continue;
            const auto c = weights::coth_inequality(a, q);
            EXPECT_TRUE(c.in_range);
            EXPECT_TRUE(c.holds) << "a=" << a << " q=" << q;
        }
    }
}

TEST(CothInequality, BoundAgreesWithUnsimplifiedForm) {
    for (double a : {0.1, 0.5, 1.0}) {
        const double e2 = std::exp(2 * a);
        const double e4 = e2 * e2;
        const double direct = 1.0 + (e4 + 4 * a - e2 * std::sqrt(e4 + 8 * a)) / (8 * a * a);
        EXPECT_NEAR(weights::coth_inequality_bound(a), direct, 1e-10);
    }
}

TEST(CothInequality, DomainErrors) {
    EXPECT_THROW((void)weights::coth_inequality(0.0, 1.5), Error);
    EXPECT_THROW((void)weights::coth_inequality(1.0, 1.0), Error);
    EXPECT_FALSE(weights::coth_inequality(1.0, 5.0).in_range);
}

TEST(Certificate, ConstantCoefficientsFiniteTime) {
    const auto p = profiles::constant(1.0, 1.0, {0.0, 1.0});
    const auto d = initial_data::bumps(BumpSpec{0.5, 0.4, 1.0}, BumpSpec{0.5, 0.4, 1.0});
    const auto c = certify(p, d);
    EXPECT_EQ(c.gamma0, 0.0);
    EXPECT_TRUE(c.lambda_star.infinite);
    EXPECT_TRUE(c.finite_time);
    EXPECT_EQ(c.Lambda1, 0.0);
    ASSERT_TRUE(c.Lambda2.has_value());
    EXPECT_TRUE(c.Lambda2->infinite);
    EXPECT_NEAR(c.t0, 1.0, 1e-12);
}

TEST(Certificate, RampRelations) {
    const auto p = profiles::cosine_ramp(1.0, 1.0, 0.0, 0.6, {0.0, 1.0});
    const auto d = initial_data::bumps(BumpSpec{0.5, 0.8, 0.5}, BumpSpec{0.5, 0.8, 0.5});
    const auto c = certify(p, d);
    EXPECT_GT(c.gamma0, 0.0);
    EXPECT_DOUBLE_EQ(c.lambda0, weights::explicit_rate(c.gamma0));
    EXPECT_DOUBLE_EQ(c.Lambda1, c.lambda0 / (2.0 * c.t0));
    EXPECT_DOUBLE_EQ(c.b0_t0, c.b0 * c.t0);
    ASSERT_TRUE(c.improved_rate_applicable);
    EXPECT_NEAR(c.Lambda2->value, std::abs(std::log(c.b0_t0)) / (2 * c.t0), 1e-15);
    ASSERT_TRUE(c.eta && c.algebraic_rate);
    EXPECT_DOUBLE_EQ(*c.algebraic_rate, 0.5 * (1.0 - *c.eta));
    EXPECT_EQ(c.weight_rate, c.lambda0);
}

TEST(Certificate, LargeVariationDisablesImprovedRate) {
    const auto p = profiles::cosine_ramp(1.0, 1.0, 0.0, 3.0, {0.0, 1.0});
    const auto d = initial_data::bumps(BumpSpec{0.5, 0.8, 0.5}, std::nullopt);
    const auto c = certify(p, d);
    EXPECT_GT(c.b0_t0, 1.0);
    EXPECT_FALSE(c.improved_rate_applicable);
    EXPECT_FALSE(c.Lambda2.has_value());
    EXPECT_FALSE(c.algebraic_rate.has_value());
}

TEST(Certificate, InadmissibleOverrideThrows) {
    const auto p = profiles::cosine_ramp(1.0, 1.0, 0.0, 0.6, {0.0, 1.0});
    const auto d = initial_data::bumps(BumpSpec{0.5, 0.8, 0.5}, std::nullopt);
    CertificateOptions o;
    o.weight_rate = 10.0;
    EXPECT_THROW((void)certify(p, d, o), Error);
}

TEST(Certificate, SerializationFormat) {
    const auto p = profiles::constant(1.0, 1.0, {0.0, 1.0});
    const auto d = initial_data::bumps(BumpSpec{0.5, 0.4, 1.0}, std::nullopt);
    std::ostringstream os;
    write_certificate(os, certify(p, d));
    const std::string s = os.str();
    EXPECT_NE(s.find("gamma0 = 0\n"), std::string::npos);
    EXPECT_NE(s.find("lambda_star = inf\n"), std::string::npos);
    EXPECT_NE(s.find("Lambda2 = inf\n"), std::string::npos);
    EXPECT_NE(s.find("u_infty = 0\n"), std::string::npos);
    EXPECT_NE(s.find("t0 = 1\n"), std::string::npos);
}
