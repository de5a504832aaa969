#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "plap/radial.hpp"
#include "plap/solver.hpp"

using namespace plap;

namespace {

Vec v2(double a, double b) { return Vec{{a, b}}; }

std::shared_ptr<const Grid> annulus_grid(int n, bool outer = true) {
    const Domain dom = make_annulus(1, 2, 2);
    return std::make_shared<const Grid>(
        discretize(dom, outer ? annulus_outer_indicator(dom) : annulus_inner_indicator(dom), n));
}

/// F = 1 on the chosen angular sectors.
BoundaryIndicator sectors(std::uint32_t mask) {
    return {[=](const Vec& x) {
                double a = std::atan2(x[1], x[0]);
                if (a < 0) a += 2 * std::numbers::pi;
                const int s = std::min(7, static_cast<int>(a / (2 * std::numbers::pi) * 8));
                return ((mask >> s) & 1u) ? 1.0 : 0.0;
            },
            "sectors"};
}

}  // namespace

TEST(Discretize, UnitSquareCounts) {
    const Domain box = make_box({1, 1});
    const Grid g = discretize(box, constant_indicator(0.0), 4);
    EXPECT_EQ(g.interior_count(), 9);
    EXPECT_EQ(g.dirichlet_count(), 16);
}

TEST(Discretize, AxisNeighboursAreClassified) {
    const Grid g = *annulus_grid(16);
    for (std::int64_t id : g.unknowns)
        for (int a = 0; a < g.dim; ++a)
            for (int s : {-1, 1}) EXPECT_NE(g.node_class[id + s * g.strides[a]], NodeClass::Exterior);
}

TEST(Discretize, DirichletValues) {
    const Domain dom = make_annulus(1, 2, 2);
    const Grid g = discretize(dom, annulus_outer_indicator(dom), 16);
    for (std::int64_t id = 0; id < g.node_count(); ++id) {
        if (g.node_class[id] != NodeClass::Dirichlet) continue;
        const double r = g.position(id).norm();
        EXPECT_EQ(g.dirichlet[id], r < 1.5 ? 0.0 : 1.0);
    }
    const Grid one = discretize(dom, constant_indicator(1.0), 16);
    for (std::int64_t id = 0; id < one.node_count(); ++id)
        if (one.node_class[id] == NodeClass::Dirichlet) EXPECT_EQ(one.dirichlet[id], 1.0);
}

TEST(Discretize, MollifiedValuesInUnitInterval) {
    const Domain dom = make_cylinder(1, 1, 1);
    const Grid g = discretize(dom, cylinder_critical_indicator(dom), 32, 0.1);
    bool fractional = false;
    for (std::int64_t id = 0; id < g.node_count(); ++id) {
        if (g.node_class[id] != NodeClass::Dirichlet) continue;
        EXPECT_GE(g.dirichlet[id], 0.0);
        EXPECT_LE(g.dirichlet[id], 1.0);
        fractional = fractional || (g.dirichlet[id] > 0 && g.dirichlet[id] < 1);
    }
    EXPECT_TRUE(fractional);
}

TEST(Discretize, TooCoarse) {
    const Domain dom = make_annulus(1, 1.05, 2);
    EXPECT_THROW(discretize(dom, constant_indicator(0.0), 1), std::runtime_error);
}

TEST(Solve, ZeroDataGivesZero) {
    const Domain dom = make_annulus(1, 2, 2);
    const GridSolution sol = solve(discretize(dom, constant_indicator(0.0), 16), 1.5);
    EXPECT_TRUE(sol.converged);
    EXPECT_EQ(sol.iterations, 1);
    for (std::int64_t id : sol.grid->unknowns) EXPECT_EQ(sol.values[id], 0.0);
}

TEST(Solve, HarmonicAnnulus) {
    const GridSolution sol = solve(annulus_grid(64), 2.0);
    EXPECT_TRUE(sol.converged);
    EXPECT_NEAR(sol.interpolate(v2(1.5, 0)), std::log(1.5) / std::log(2.0), 0.02);
}

TEST(Solve, RadialOracleAtModerateResolution) {
    const GridSolution sol = solve(annulus_grid(64), 1.5);
    ASSERT_TRUE(sol.converged);
    EXPECT_LE(sol.residual, 1e-8);
    EXPECT_NEAR(sol.interpolate(v2(1.5, 0)), 2.0 / 3, 0.02);
    const radial::RadialProfile prof(1.5, 2, 1, 2, 0, 1);
    double err = 0;
    for (std::int64_t id : sol.grid->unknowns)
        err = std::max(err, std::abs(sol.values[id] - prof.value(sol.grid->position(id).norm())));
    EXPECT_LE(err, 0.04);
}

TEST(Solve, MaximumPrinciple) {
    for (double p : {1.1, 1.5, 2.0}) {
        const GridSolution sol = solve(annulus_grid(32), p);
        for (std::int64_t id : sol.grid->unknowns) {
            EXPECT_GE(sol.values[id], -1e-9);
            EXPECT_LE(sol.values[id], 1 + 1e-9);
        }
    }
}

TEST(Solve, EnergyNonIncreasing) {
    for (double p : {1.1, 1.3, 1.7}) {
        SolveOptions opt;
        opt.nested = false;
        const GridSolution sol = solve(annulus_grid(32), p, opt);
        ASSERT_GE(sol.energy_history.size(), 3u);
        for (std::size_t i = 1; i < sol.energy_history.size(); ++i)
            EXPECT_LE(sol.energy_history[i], sol.energy_history[i - 1] * (1 + 1e-12)) << p << " step " << i;
    }
}

TEST(Solve, NonConvergenceIsFlagged) {
    SolveOptions opt;
    opt.max_iter = 1;
    opt.nested = false;
    const GridSolution sol = solve(annulus_grid(32), 1.2, opt);
    EXPECT_FALSE(sol.converged);
    EXPECT_EQ(sol.iterations, 1);
}

TEST(Solve, RejectsBadParameters) {
    auto g = annulus_grid(16);
    EXPECT_THROW(solve(g, 2.5), std::domain_error);
    SolveOptions opt;
    opt.delta = 0;
    EXPECT_THROW(solve(g, 1.5, opt), std::invalid_argument);
}

TEST(Compare, SelfAndZero) {
    const Domain dom = make_annulus(1, 2, 2);
    auto g0 = std::make_shared<const Grid>(discretize(dom, constant_indicator(0.0), 32));
    auto g1 = annulus_grid(32);
    const GridSolution zero = solve(g0, 1.5), u = solve(g1, 1.5);
    EXPECT_TRUE(compare(u, u));
    EXPECT_TRUE(compare(zero, u));
    EXPECT_FALSE(compare(u, zero));
    EXPECT_THROW(compare(u, solve(g1, 1.6)), std::invalid_argument);
    EXPECT_THROW(compare(u, solve(annulus_grid(16), 1.5)), std::invalid_argument);
}

TEST(Compare, OrderedRandomData) {
    const Domain dom = make_annulus(1, 2, 2);
    std::mt19937_64 rng(99);
    for (int i = 0; i < 20; ++i) {
        const auto m1 = static_cast<std::uint32_t>(rng()) & 0xffu;
        const auto m2 = m1 | (static_cast<std::uint32_t>(rng()) & 0xffu);
        auto g1 = std::make_shared<const Grid>(discretize(dom, sectors(m1), 24));
        auto g2 = std::make_shared<const Grid>(discretize(dom, sectors(m2), 24));
        EXPECT_TRUE(compare(solve(g1, 1.4), solve(g2, 1.4))) << m1 << ' ' << m2;
    }
}

TEST(Solve, MirrorSymmetryOnCylinder) {
    const Domain dom = make_cylinder(1, 1, 1);
    auto g = std::make_shared<const Grid>(discretize(dom, cylinder_critical_indicator(dom), 32));
    const GridSolution sol = solve(g, 1.5);
    for (std::int64_t id : g->unknowns) {
        auto m = g->index_of(id);
        m[0] = g->dims[0] - 1 - m[0];
        EXPECT_NEAR(sol.values[id], sol.values[g->id_of(m)], 1e-8);
    }
}

TEST(Solve, ThreadCountInvariance) {
    auto g = annulus_grid(32);
    SolveOptions one, many;
    many.threads = 4;
    const GridSolution a = solve(g, 1.3, one), b = solve(g, 1.3, one), c = solve(g, 1.3, many);
    for (std::int64_t id : g->unknowns) {
        EXPECT_EQ(a.values[id], b.values[id]);
        EXPECT_NEAR(a.values[id], c.values[id], 1e-12);
    }
}

TEST(BoundaryDerivative, LinearFieldIsExact) {
    const Domain box = make_box({1, 1});
    auto g = std::make_shared<const Grid>(discretize(box, constant_indicator(0.0), 16));
    GridSolution sol;
    sol.grid = g;
    sol.values.assign(g->node_count(), 0.0);
    for (std::int64_t id = 0; id < g->node_count(); ++id) sol.values[id] = g->position(id)[1];
    EXPECT_NEAR(boundary_derivative(sol, box, v2(0.5, 0), {0.125, 0.25}), 1.0, 1e-12);
    EXPECT_NEAR(boundary_derivative(sol, box, v2(0.5, 0), {0.2}), 1.0, 1e-12);
}

TEST(BoundaryDerivative, Errors) {
    const Domain box = make_box({1, 1});
    auto g = std::make_shared<const Grid>(discretize(box, constant_indicator(0.0), 16));
    const GridSolution sol = solve(g, 1.5);
    EXPECT_THROW(boundary_derivative(sol, box, v2(0.5, 0), {0.05}), std::invalid_argument);
    try {
        boundary_derivative(sol, box, v2(0.5, 0), {0.25, 1.5});
        FAIL();
    } catch (const std::out_of_range& e) {
        EXPECT_NE(std::string(e.what()).find("1.5"), std::string::npos);
    }
    EXPECT_THROW(boundary_derivative(sol, box, v2(0, 0), {0.25}), std::domain_error);
}

TEST(BoundaryDerivative, AnnulusOrientation) {
    auto g_out = annulus_grid(64, true);
    const GridSolution u = solve(g_out, 1.5);
    // u increases from 0 on |x| = 1: inward derivative +2 at (1,0). The
    // first-order boundary shift on the curved inner sphere dominates at n = 64.
    EXPECT_NEAR(boundary_derivative(u, g_out->domain, v2(1, 0), {0.04, 0.08}), 2.0, 0.6);
    auto g_in = annulus_grid(64, false);
    const GridSolution w = solve(g_in, 1.5);
    // 1 - u vanishes on |x| = 2 and grows inward with slope 1/2.
    EXPECT_NEAR(boundary_derivative(w, g_in->domain, v2(2, 0), {0.04, 0.08}), 0.5, 0.05);
}

TEST(Export, CsvHeaderAndPrecision) {
    const Domain box = make_box({1, 1});
    const GridSolution sol = solve(discretize(box, constant_indicator(1.0), 8), 1.5);
    std::ostringstream os;
    write_solution_csv(os, sol);
    const std::string s = os.str();
    EXPECT_EQ(s.substr(0, 6), "x,y,u\n");
    const auto rows = std::count(s.begin(), s.end(), '\n');
    EXPECT_EQ(rows, 1 + sol.grid->interior_count() + sol.grid->dirichlet_count());
}
