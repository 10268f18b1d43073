#include <gtest/gtest.h>

#include <cmath>

#include <kgds/error.hpp>
#include <kgds/geometry.hpp>
#include <kgds/kernels.hpp>

namespace {

using namespace kgds;

TEST(Params, Natural) {
    PhysicalParams p = PhysicalParams::natural(1.0, 0.2, 0.5);
    EXPECT_DOUBLE_EQ(p.schwarzschild_radius(), 0.2);
    EXPECT_DOUBLE_EQ(p.mass_term(), 0.5);
    EXPECT_DOUBLE_EQ(p.curved_mass_sq(), 1.75);
}

TEST(Symbols, RadialAndTangential) {
    PhysicalParams p = PhysicalParams::natural(1.0, 0.5, 0.0);
    Vec3 x{2.0, 0.0, 0.0};
    double F = lapse_F(2.0, p);
    EXPECT_DOUBLE_EQ(F, 0.75);
    // Radial covector: |xi|^2 - R (x.xi)^2 / |x|^3 = 1 - 0.5 * 4 / 8
    EXPECT_NEAR(principal_symbol(x, {1.0, 0.0, 0.0}, p), -F * 0.75, 1e-15);
    EXPECT_NEAR(principal_symbol(x, {0.0, 1.0, 0.0}, p), -F, 1e-15);
    EXPECT_NEAR(lower_order_symbol(x, {0.0, 1.0, 0.0}, p), 0.0, 1e-15);
    EXPECT_NEAR(lower_order_symbol(x, {1.0, 0.0, 0.0}, p), -F * 0.5 * 2.0 / 8.0, 1e-15);
    EXPECT_DOUBLE_EQ(char_speed_bound(x, p), 0.75);
}

TEST(Symbols, FlatLimit) {
    PhysicalParams p = PhysicalParams::natural(1.0, 0.0, 0.0);
    Vec3 x{0.3, -1.0, 0.4}, xi{1.5, 0.2, -0.7};
    EXPECT_NEAR(principal_symbol(x, xi, p), -(1.5 * 1.5 + 0.04 + 0.49), 1e-14);
    EXPECT_EQ(lower_order_symbol(x, xi, p), 0.0);
}

TEST(Cutoff, SmoothStep) {
    PhysicalParams p = PhysicalParams::natural(1.0, 0.2, 0.0);
    EXPECT_EQ(cutoff_chi(0.25, 0.2, p), 0.0);
    EXPECT_EQ(cutoff_chi(0.3, 0.2, p), 0.0);
    EXPECT_NEAR(cutoff_chi(0.35, 0.2, p), 0.5, 1e-14);
    EXPECT_NEAR(cutoff_chi(0.4, 0.2, p), 1.0, 1e-14);
    EXPECT_EQ(cutoff_chi(3.0, 0.2, p), 1.0);
}

TEST(AuxSymbol, MatchesFullSymbolAwayFromHorizon) {
    PhysicalParams p = PhysicalParams::natural(1.0, 0.2, 0.0);
    Vec3 x{1.0, 0.5, 0.0}, xi{0.3, 1.1, -0.4};
    std::complex<double> a = aux_symbol(x, xi, 0.1, p);
    EXPECT_NEAR(a.real(), principal_symbol(x, xi, p), 1e-14);
    EXPECT_NEAR(a.imag(), lower_order_symbol(x, xi, p), 1e-14);
    // Inside the cutoff the symbol is the flat d'Alembertian.
    Vec3 y{0.22, 0.0, 0.0};
    std::complex<double> b = aux_symbol(y, xi, 0.1, p);
    EXPECT_NEAR(b.real(), -(0.09 + 1.21 + 0.16), 1e-14);
    EXPECT_EQ(b.imag(), 0.0);
}

TEST(DampingGradient, StaticHoleIsFlat) {
    PhysicalParams p = PhysicalParams::natural(1.0, 0.2, 0.0);
    EXPECT_EQ(damping_gradient(1.0, 0.0, 0.1, 0.0, 2.0, p), 0.0);
    // a = e^t with constant Mb: 2 c^2 G Mb a_dot / (c^2 r a - 2 G Mb)^2
    double v = damping_gradient(1.0, 1.0, 0.1, 0.0, 2.0, p);
    EXPECT_NEAR(v, 2.0 * 0.1 / std::pow(2.0 - 0.2, 2), 1e-15);
}

TEST(Geodesic, FlatCaseIsStraightLine) {
    PhysicalParams p = PhysicalParams::natural(1.0, 0.0, 0.0);
    for (double t : {0.0, 0.5, 2.0, 10.0}) EXPECT_NEAR(geodesic_radius(t, 2.0, p), 2.0 - phi(t, 1.0), 1e-15);
    EXPECT_NEAR(geodesic_limit_radius(2.0, p), 1.0, 1e-15);
    EXPECT_NEAR(influence_radius(3.0, 2.0, p), 2.0 - phi(3.0, 1.0), 1e-15);
}

TEST(Geodesic, ResidualBelowTolerance) {
    for (double R : {0.05, 0.2, 0.5}) {
        PhysicalParams p = PhysicalParams::natural(1.0, R, 0.0);
        for (double rid : {1.2 + R, 2.0, 3.5}) {
            double prev = rid;
            for (double t : {0.1, 0.5, 1.0, 3.0, 10.0, 40.0}) {
                double r = geodesic_radius(t, rid, p);
                EXPECT_LT(std::abs(geodesic_residual(t, r, rid, p)), 1e-12);
                EXPECT_LE(r, prev);
                EXPECT_GT(r, R);
                // The curved ray is slower than the flat bound.
                EXPECT_GE(r, influence_radius(t, rid, p) - 1e-14);
                prev = r;
            }
            EXPECT_GT(support_margin(rid, p), 0.0);
        }
    }
}

TEST(Geodesic, StaticConformalTime) {
    PhysicalParams p = PhysicalParams::natural(1.0, 0.2, 0.0);
    ConformalTime A = static_conformal_time();
    double r = geodesic_radius(1.0, 3.0, p, 1e-12, A);
    EXPECT_LT(std::abs(geodesic_residual(1.0, r, 3.0, p, A)), 1e-12);
    EXPECT_NEAR(de_sitter_conformal_time(2.0)(1.0), phi(1.0, 2.0), 1e-16);
}

TEST(Geodesic, Errors) {
    PhysicalParams p = PhysicalParams::natural(1.0, 0.5, 0.0);
    try {
        geodesic_radius(1.0, 0.4, p);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::InvalidParams);
    }
    PhysicalParams flat = PhysicalParams::natural(0.0, 0.5, 0.0);
    EXPECT_THROW(geodesic_limit_radius(2.0, flat), Error);
}

}  // namespace
