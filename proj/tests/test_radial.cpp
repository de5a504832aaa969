#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "plap/radial.hpp"
#include "plap/solver.hpp"

using namespace plap;
using radial::RadialProfile;

TEST(Gamma, HandValues) {
    EXPECT_DOUBLE_EQ(radial::gamma(2, 2), 0.0);
    EXPECT_DOUBLE_EQ(radial::gamma(1.5, 2), 1.0);
    EXPECT_DOUBLE_EQ(radial::gamma(1.5, 3), 3.0);
    EXPECT_THROW(radial::gamma(1.0, 2), std::domain_error);
    EXPECT_THROW(radial::gamma(0.5, 2), std::domain_error);
}

TEST(Gamma, GrowsLikeInverseDistanceToOne) {
    for (int d : {2, 3, 5})
        for (long k = 1; k <= 1000000; k *= 10) EXPECT_NEAR(radial::gamma(1 + 1.0 / k, d), k * (d - 1) - 1.0, 1e-9 * k) << k;
}

TEST(Profile, BoundaryAndInteriorValues) {
    const RadialProfile prof(1.5, 2, 1, 2, 0, 1);
    EXPECT_DOUBLE_EQ(prof.value(1), 0.0);
    EXPECT_NEAR(prof.value(2), 1.0, 1e-15);
    // gamma = 1: (1/1.5 - 1)/(1/2 - 1) = 2/3.
    EXPECT_NEAR(prof.value(1.5), 2.0 / 3, 1e-15);
}

TEST(Profile, Derivatives) {
    const RadialProfile prof(1.5, 2, 1, 2, 0, 1);
    // u(r) = 2 - 2/r.
    EXPECT_NEAR(prof.derivative(1), 2.0, 1e-14);
    EXPECT_NEAR(prof.derivative(2), 0.5, 1e-14);
    const RadialProfile harm(2, 2, 1, 2, 0, 1);
    EXPECT_NEAR(harm.derivative(1), 1 / std::log(2.0), 1e-14);
    EXPECT_NEAR(harm.value(1.5), std::log(1.5) / std::log(2.0), 1e-14);
}

TEST(Profile, DerivativeMatchesFiniteDifference) {
    for (double p : {1.05, 1.2, 1.7, 2.0}) {
        const RadialProfile prof(p, 3, 0.5, 1.7, 0.3, 0.9);
        for (double r : {0.6, 1.0, 1.5}) {
            const double h = 1e-6;
            const double fd = (prof.value(r + h) - prof.value(r - h)) / (2 * h);
            EXPECT_NEAR(prof.derivative(r), fd, 1e-6 * std::max(1.0, std::abs(fd))) << p << ' ' << r;
        }
    }
}

TEST(Profile, RangeAndParameterErrors) {
    const RadialProfile prof(1.5, 2, 1, 2, 0, 1);
    EXPECT_THROW(prof.value(0.9), std::out_of_range);
    EXPECT_THROW(prof.derivative(2.1), std::out_of_range);
    EXPECT_THROW(RadialProfile(2.5, 2, 1, 2, 0, 1), std::domain_error);
    EXPECT_THROW(RadialProfile(1.5, 1, 1, 2, 0, 1), std::domain_error);
    EXPECT_THROW(RadialProfile(1.5, 2, 2, 1, 0, 1), std::domain_error);
}

TEST(Profile, StrictlyMonotone) {
    const RadialProfile prof(1.3, 2, 1, 2, 0, 1);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(1, 2);
    for (int i = 0; i < 1000; ++i) {
        double a = U(rng), b = U(rng);
        if (a == b) continue;
        if (a > b) std::swap(a, b);
        EXPECT_LT(prof.value(a), prof.value(b));
    }
}

TEST(Profile, FiniteForHugeGamma) {
    const RadialProfile prof(1.0001, 2, 1, 2, 0, 1);
    EXPECT_GT(prof.gamma(), 9000);
    for (double r : {1.0, 1.0001, 1.01, 1.5, 2.0}) {
        EXPECT_TRUE(std::isfinite(prof.value(r)));
        EXPECT_TRUE(std::isfinite(prof.derivative(r)));
    }
    EXPECT_NEAR(prof.derivative(1.0), prof.gamma(), 1e-6 * prof.gamma());
}

TEST(Profile, DiscreteRadialFluxIsConstant) {
    for (double p : {1.2, 1.5, 2.0}) {
        const RadialProfile prof(p, 2, 1, 2, 0, 1);
        std::vector<double> r, u;
        const int n = 20000;
        for (int i = 0; i <= n; ++i) {
            r.push_back(1.0 + static_cast<double>(i) / n);
            u.push_back(prof.value(r.back()));
        }
        EXPECT_LE(radial_flux_defect(r, u, p, 2), 1e-6) << p;
    }
}

TEST(Barrier, ShellValues) {
    const Vec c = Vec::Zero(2);
    EXPECT_NEAR(radial::barrier_lower(1.5, 2, 1, 1, Vec{{1.0, 0.0}}, c), 0.0, 1e-15);
    EXPECT_NEAR(radial::barrier_lower(1.5, 2, 1, 1, Vec{{0.0, 2.0}}, c), 1.0, 1e-15);
    EXPECT_NEAR(radial::barrier_lower(1.5, 2, 1, 1, Vec{{1.5, 0.0}}, c), 2.0 / 3, 1e-15);
    EXPECT_THROW(radial::barrier_lower(1.5, 2, 1, 1, Vec{{0.5, 0.0}}, c), std::out_of_range);
    const Vec shifted{{3.0, 0.0}};
    EXPECT_NEAR(radial::barrier_lower(1.5, 2, 1, 1, Vec{{4.5, 0.0}}, shifted), 2.0 / 3, 1e-15);
}

TEST(Barrier, SeparatingSphere) {
    // Decreasing profile from 1 on |x| = R to 0 on |x| = R_outer.
    const double b = radial::separating_sphere_bound(1.5, 2, 1, 0.5, 2);
    EXPECT_NEAR(b, 1.0 / 3, 1e-14);
    EXPECT_THROW(radial::separating_sphere_bound(1.5, 2, 1, 1.5, 2), std::domain_error);
}

TEST(Lemma31, HandEvaluation) {
    const auto b = radial::lemma31(1.5, 1, 1, 0.5);
    EXPECT_NEAR(b.prefactor, 1.0 / 576, 1e-15);
    // exponent -864/(p-1)
    EXPECT_NEAR(b.rate, 864.0, 1e-10);
    EXPECT_NEAR(b.log_value(), std::log(1.0 / 576) - 864 / 0.5, 1e-9);
}

TEST(Lemma31, MonotoneInP) {
    double prev = -std::numeric_limits<double>::infinity();
    for (double p = 1.01; p <= 2.0; p += 0.01) {
        const double v = radial::lemma31(p, 2, 1, 0.5).log_value();
        EXPECT_GT(v, prev);
        prev = v;
    }
}

TEST(Lemma31, InUnitInterval) {
    for (double p : {1.01, 1.5, 2.0})
        for (int d : {2, 3})
            for (double h : {0.01, 0.3, 0.99}) {
                const auto b = radial::lemma31(p, d, 1, h);
                EXPECT_GT(b.prefactor, 0);
                EXPECT_LT(b.log_value(), 0);
                EXPECT_GE(b.value(), 0);
                EXPECT_LT(b.value(), 1);
            }
}

TEST(Lemma31, VanishesAsHShrinks) {
    EXPECT_LT(radial::lemma31(2, 2, 1, 1e-3).log_value(), radial::lemma31(2, 2, 1, 1e-2).log_value());
    EXPECT_EQ(radial::lemma31_bound(2, 2, 1, 1e-3), 0.0);
    EXPECT_THROW(radial::lemma31(1.5, 2, 1, 1.0), std::domain_error);
    EXPECT_THROW(radial::lemma31(1.5, 2, 1, 0.0), std::domain_error);
}
