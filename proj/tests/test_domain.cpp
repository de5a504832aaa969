#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "plap/domain.hpp"

using namespace plap;

namespace {
Vec v2(double a, double b) { return Vec{{a, b}}; }
}  // namespace

TEST(Annulus, InsideProjectNormal) {
    const Domain dom = make_annulus(1, 2, 2);
    EXPECT_TRUE(dom.inside(v2(1.5, 0)));
    EXPECT_FALSE(dom.inside(v2(0.5, 0)));
    EXPECT_FALSE(dom.inside(v2(2.5, 0)));
    EXPECT_TRUE(dom.boundary_project(v2(3, 0)).isApprox(v2(2, 0)));
    const auto n = dom.inward_normal(v2(1, 0));
    ASSERT_TRUE(n);
    EXPECT_TRUE(n->isApprox(v2(1, 0)));
    // Displacement along the normal must enter the domain.
    EXPECT_TRUE(dom.inside(v2(1, 0) + 1e-6 * *n));
    EXPECT_FALSE(dom.inside(v2(1, 0) - 1e-6 * *n));
    const auto n_out = dom.inward_normal(v2(0, 2));
    ASSERT_TRUE(n_out);
    EXPECT_TRUE(n_out->isApprox(v2(0, -1)));
    EXPECT_FALSE(dom.inward_normal(v2(1.5, 0)));
}

TEST(Builtins, ConstructionErrorsNameTheField) {
    auto field_of = [](auto&& fn) {
        try {
            fn();
        } catch (const ConstructionError& e) {
            return e.field();
        }
        return std::string("none");
    };
    EXPECT_EQ(field_of([] { make_annulus(0, 2, 2); }), "r_in");
    EXPECT_EQ(field_of([] { make_annulus(2, 1, 2); }), "r_out");
    EXPECT_EQ(field_of([] { make_annulus(1, 2, 0); }), "d");
    EXPECT_EQ(field_of([] { make_cylinder(1, -1, 1); }), "R");
    EXPECT_EQ(field_of([] { make_cylinder(1, 1, 0); }), "H");
    EXPECT_EQ(field_of([] { make_cylinder(0, 1, 1); }), "d");
    EXPECT_EQ(field_of([] { make_box({1, 0}); }), "sides[1]");
    EXPECT_EQ(field_of([] { parse_domain("torus 1 2"); }), "domain");
}

TEST(Builtins, NormalDisplacementProperty) {
    const std::vector<Domain> doms{make_annulus(1, 2, 2), make_annulus(0.5, 1.5, 3), make_cylinder(1, 1, 1),
                                   make_cylinder(2, 1, 0.7), make_box({1, 2}), make_box({1, 1, 0.5})};
    std::mt19937_64 rng(11);
    for (const Domain& dom : doms) {
        std::uniform_real_distribution<double> U(-1, 1);
        int checked = 0;
        for (int i = 0; i < 1000; ++i) {
            Vec x(dom.dim);
            for (int a = 0; a < dom.dim; ++a) {
                const double mid = 0.5 * (dom.bbox.lo[a] + dom.bbox.hi[a]);
                x[a] = mid + 0.75 * (dom.bbox.hi[a] - dom.bbox.lo[a]) * U(rng);
            }
            const Vec b = dom.boundary_project(x);
            const auto n = dom.inward_normal(b);
            if (!n) continue;
            ++checked;
            ASSERT_NEAR(n->norm(), 1.0, 1e-12);
            const double t = 1e-6 * dom.diameter();
            EXPECT_TRUE(dom.inside(b + t * *n)) << dom.describe();
            EXPECT_FALSE(dom.inside(b - t * *n)) << dom.describe();
        }
        EXPECT_GT(checked, 600) << dom.describe();
    }
}

TEST(Builtins, InsideImpliesBoundingBox) {
    const Domain dom = make_cylinder(2, 1, 2);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(-3, 3);
    for (int i = 0; i < 2000; ++i) {
        const Vec x{{U(rng), U(rng), U(rng)}};
        if (dom.inside(x)) EXPECT_TRUE(dom.bbox.contains(x));
    }
}

TEST(Cylinder, RimHasNoNormal) {
    const Domain dom = make_cylinder(1, 1, 1);
    EXPECT_FALSE(dom.inward_normal(v2(1, 0)));
    EXPECT_FALSE(dom.inward_normal(v2(-1, 1)));
    EXPECT_TRUE(dom.inward_normal(v2(0, 0))->isApprox(v2(0, 1)));
    EXPECT_TRUE(dom.inward_normal(v2(1, 0.5))->isApprox(v2(-1, 0)));
}

TEST(Indicators, Values) {
    const Domain cyl = make_cylinder(1, 1, 1);
    const auto crit = cylinder_critical_indicator(cyl);
    EXPECT_EQ(crit(v2(0, 0)), 0.0);
    EXPECT_EQ(crit(v2(1, 0)), 1.0);  // the rim belongs to the closed set
    EXPECT_EQ(crit(v2(0.3, 1)), 1.0);
    EXPECT_EQ(crit(v2(-1, 0.4)), 1.0);
    const auto ramp = cylinder_ramp_indicator(cyl);
    EXPECT_DOUBLE_EQ(ramp(v2(0, 1)), 1.0);
    EXPECT_NEAR(ramp(v2(0.95, 1)), 0.5, 1e-12);
    EXPECT_EQ(ramp(v2(0.5, 0)), 0.0);
    const Domain ann = make_annulus(1, 2, 2);
    EXPECT_EQ(annulus_inner_indicator(ann)(v2(1, 0)), 1.0);
    EXPECT_EQ(annulus_outer_indicator(ann)(v2(1, 0)), 0.0);
    EXPECT_THROW(parse_boundary("critical", ann), ConstructionError);
}

TEST(EnclosingBall, AnnulusInnerSphereZero) {
    const Domain dom = make_annulus(1, 2, 2);
    // F = 0 on the inner sphere, 1 on the outer; every |x| = 1 lies in B((-1,0), 2).
    EXPECT_TRUE(check_enclosing_ball(annulus_outer_indicator(dom), dom, v2(1, 0), 2.0));
}

TEST(EnclosingBall, MonotoneInRadius) {
    const Domain dom = make_annulus(1, 2, 2);
    const auto F = annulus_outer_indicator(dom);
    for (double R : {1.01, 1.5, 2.0, 3.0, 10.0}) EXPECT_TRUE(check_enclosing_ball(F, dom, v2(1, 0), R)) << R;
    // Radii below the curvature radius 1 of the inner sphere cannot enclose it.
    EXPECT_FALSE(check_enclosing_ball(F, dom, v2(1, 0), 0.5));
}

TEST(EnclosingBall, FlatBottomFails) {
    const Domain dom = make_cylinder(1, 1, 1);
    const auto F = cylinder_critical_indicator(dom);
    for (double R : {0.5, 1.0, 10.0, 1e4}) EXPECT_FALSE(check_enclosing_ball(F, dom, v2(0, 0), R)) << R;
}

TEST(EnclosingBall, VacuousWhenFIsOne) {
    const Domain dom = make_annulus(1, 2, 2);
    EXPECT_TRUE(check_enclosing_ball(constant_indicator(1.0), dom, v2(1, 0), 0.1));
}

TEST(EnclosingBall, NeedsNormal) {
    const Domain dom = make_cylinder(1, 1, 1);
    EXPECT_THROW(check_enclosing_ball(constant_indicator(0.0), dom, v2(1, 0), 1.0), std::domain_error);
}

TEST(Separation, AnnulusOuterPoint) {
    const Domain dom = make_annulus(1, 2, 2);
    const auto F = annulus_inner_indicator(dom);
    const auto sep = check_hyperplane_separation(F, dom, v2(2, 0));
    ASSERT_TRUE(sep);
    EXPECT_NEAR(sep->xi[0], 1.0, 1e-9);
    EXPECT_NEAR(sep->xi[1], 0.0, 1e-9);
    EXPECT_NEAR(sep->beta, 1.5, 1e-9);
    // The stated inequalities hold on the sample.
    EXPECT_GT(sep->xi.dot(v2(2, 0)), sep->beta);
    for (const Vec& s : dom.sample_boundary(kDefaultBoundarySamples))
        if (F.is_one(s)) EXPECT_LT(sep->xi.dot(s), sep->beta);
}

TEST(Separation, CylinderRimBlocksSeparation) {
    const Domain dom = make_cylinder(1, 1, 1);
    EXPECT_FALSE(check_hyperplane_separation(cylinder_critical_indicator(dom), dom, v2(0, 0)));
}

TEST(Separation, VacuousWhenFIsZero) {
    const Domain dom = make_annulus(1, 2, 2);
    const auto sep = check_hyperplane_separation(constant_indicator(0.0), dom, v2(2, 0));
    ASSERT_TRUE(sep);
    EXPECT_GT(sep->xi.dot(v2(2, 0)), sep->beta);
}

TEST(Parse, RoundTrips) {
    const Domain a = parse_domain("annulus 1.0 2.0 2");
    EXPECT_EQ(a.kind, DomainKind::Annulus);
    EXPECT_EQ(a.dim, 2);
    const Domain c = parse_domain("cylinder 2 1 0.5");
    EXPECT_EQ(c.dim, 3);
    EXPECT_EQ(parse_domain("box 1 2 3").dim, 3);
    EXPECT_THROW(parse_domain("annulus 1 x 2"), ConstructionError);
    EXPECT_EQ(parse_boundary("ramp 0.2", c).description, "ramp");
}
