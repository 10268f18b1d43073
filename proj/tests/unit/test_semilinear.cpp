#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <limits>

#include <kgds/error.hpp>
#include <kgds/semilinear.hpp>

#include "oracles.hpp"

namespace {

using namespace kgds;

Nonlinearity power(NonlinearityKind kind, double alpha) {
    Nonlinearity nl;
    nl.kind = kind;
    nl.alpha = alpha;
    return nl;
}

RadialField bump_data(const RadialGrid& g, double eps) {
    RadialField d = RadialField::zeros(g);
    for (int i = 0; i < g.n; ++i) d.values[i] = oracle::poly6_bump(g.r(i), 3.0, 0.8);
    double n0 = field_norm(d, NormKind::H2Discrete);
    for (double& v : d.values) v *= eps / n0;
    return d;
}

TEST(Nonlinearity, Values) {
    EXPECT_DOUBLE_EQ(power(NonlinearityKind::PowerAbs, 1.0)(-2.0), 4.0);
    EXPECT_DOUBLE_EQ(power(NonlinearityKind::PowerSigned, 1.0)(-2.0), -4.0);
    EXPECT_DOUBLE_EQ(power(NonlinearityKind::PowerSigned, 2.0)(0.5), 0.125);
    EXPECT_EQ(Nonlinearity::none()(3.0), 0.0);
    EXPECT_TRUE(Nonlinearity::none().is_zero());
    Nonlinearity c;
    c.kind = NonlinearityKind::Custom;
    c.custom = [](double x) { return std::sin(x) * x; };
    EXPECT_DOUBLE_EQ(c(0.5), std::sin(0.5) * 0.5);
}

TEST(Nonlinearity, DifferenceKeepsPrecision) {
    for (NonlinearityKind k : {NonlinearityKind::PowerAbs, NonlinearityKind::PowerSigned}) {
        for (double alpha : {0.5, 1.0, 1.7}) {
            Nonlinearity nl = power(k, alpha);
            for (double b : {-1.3, 1e-3, 0.7}) {
                for (double d : {1e-14, -3e-9, 1e-4}) {
                    double want = oracle::power_difference(k == NonlinearityKind::PowerAbs, alpha, b, d);
                    double got = nl.difference(b, d);
                    EXPECT_NEAR(got, want, 1e-12 * std::abs(want))
                        << "alpha=" << alpha << " b=" << b << " d=" << d;
                }
            }
        }
    }
}

TEST(Nonlinearity, DifferenceFromSubnormalIsFinite) {
    Nonlinearity nl = power(NonlinearityKind::PowerSigned, 1.0);
    double b = std::numeric_limits<double>::denorm_min() * 7.0;
    double v = nl.difference(b, 1e-6);
    EXPECT_TRUE(std::isfinite(v));
    EXPECT_NEAR(v, 1e-12, 1e-24);
    EXPECT_EQ(nl.difference(0.0, 0.0), 0.0);
}

TEST(Potential, Values) {
    PhysicalParams p = PhysicalParams::natural(1.0, 0.2, 2.0);
    Potential none;
    EXPECT_EQ(none.value(1.0, 0.0, p), 0.0);
    EXPECT_FALSE(none.active());
    EXPECT_FALSE(static_cast<bool>(none.bind(p)));
    Potential grav;
    grav.kind = PotentialKind::Gravitational;
    EXPECT_DOUBLE_EQ(grav.value(2.0, 5.0, p), -2.0 * 0.2 / 2.0);
    Potential yuk;
    yuk.kind = PotentialKind::Yukawa;
    yuk.coupling_sq = 0.3;
    yuk.range = 2.0;
    EXPECT_DOUBLE_EQ(yuk.value(1.5, 0.0, p), -0.3 * std::exp(-3.0) / 1.5);
    Potential dec;
    dec.kind = PotentialKind::ExpDecaying;
    dec.higgs_sq = 0.4;
    EXPECT_DOUBLE_EQ(dec.bind(p)(1.0, 0.5), -0.4 * std::exp(-1.0));
    RadialGrid g = RadialGrid::uniform(0.6, 5.4, 49);
    EXPECT_NEAR(potential_eps0(grav, g, p, 1.0), 2.0 * 0.2 / 1.0, 1e-12);
}

TEST(Norms, Ordering) {
    RadialGrid g = RadialGrid::uniform(0.6, 5.4, 121);
    RadialField d = bump_data(g, 1.0);
    double l2 = field_norm(d, NormKind::L2), h1 = field_norm(d, NormKind::H1), h2 = field_norm(d, NormKind::H2Discrete);
    EXPECT_NEAR(h2, 1.0, 1e-14);
    EXPECT_LT(l2, h1);
    EXPECT_LT(h1, h2);
}

TEST(Norms, WeightedHistory) {
    RadialGrid g = RadialGrid::uniform(1.0, 2.0, 16);
    SpaceTimeField f;
    for (int k = 0; k < 5; ++k) {
        f.times.push_back(k);
        f.snapshots.push_back({g, std::vector<double>(g.n, std::exp(-1.0 * k)), double(k)});
    }
    double base = field_norm(f.snapshots[0], NormKind::L2);
    EXPECT_NEAR(weighted_norm(f, 0.5, NormKind::L2), base, 1e-14);
    EXPECT_NEAR(weighted_norm(f, 2.0, NormKind::L2), base * std::exp(4.0), 1e-10 * std::exp(4.0));
    EXPECT_EQ(weighted_distance(f, f, 0.5, NormKind::H1), 0.0);
    WeightedNormState st = weighted_history(f, 0.5, NormKind::L2);
    EXPECT_EQ(st.history.size(), 5u);
    st.push(9.0, std::numeric_limits<double>::quiet_NaN());
    EXPECT_TRUE(std::isnan(st.sup()));
}

PicardOptions quick_options(double eps) {
    PicardOptions o;
    o.gamma = 0.5;
    o.t_max = 2.0;
    o.eps = eps;
    return o;
}

TransformConfig strict_config(double m2) {
    TransformConfig cfg = TransformConfig::from_params(PhysicalParams::natural(1.0, 0.05, m2));
    cfg.strict_support = true;
    cfg.R_ID = 2.0;
    return cfg;
}

TEST(Picard, LinearProblemReturnsFreeSolution) {
    RadialGrid g = RadialGrid::uniform(0.6, 5.4, 97);
    RadialField d = bump_data(g, 1e-3);
    TransformConfig cfg = strict_config(3.25);
    PicardResult r = picard_iterate(d, RadialField::zeros(g), Nonlinearity::none(), Potential{}, quick_options(1e-3), cfg);
    EXPECT_TRUE(r.diagnostics.converged);
    SpaceTimeField free = psi_id(d, RadialField::zeros(g), r.psi.times, cfg);
    for (std::size_t k = 0; k < r.psi.size(); ++k)
        for (int i = 0; i < g.n; ++i) EXPECT_NEAR(r.psi.snapshots[k].values[i], free.snapshots[k].values[i], 1e-15);
}

TEST(Picard, SmallDataContracts) {
    RadialGrid g = RadialGrid::uniform(0.6, 5.4, 97);
    RadialField d = bump_data(g, 1e-3);
    PicardResult r = picard_iterate(d, RadialField::zeros(g), power(NonlinearityKind::PowerSigned, 1.0), Potential{},
                                    quick_options(1e-3), strict_config(2.1875));
    const PicardDiagnostics& dg = r.diagnostics;
    EXPECT_TRUE(dg.converged);
    EXPECT_LT(dg.max_contraction, 0.5);
    EXPECT_TRUE(dg.ball_bound);
    EXPECT_TRUE(dg.support_confined);
    EXPECT_LT(dg.weighted_sup, 2e-3);
    for (std::size_t k = 1; k < dg.distances.size(); ++k) EXPECT_LT(dg.distances[k], dg.distances[k - 1]);
}

TEST(Picard, RejectsBadOptions) {
    RadialGrid g = RadialGrid::uniform(0.6, 5.4, 97);
    RadialField d = bump_data(g, 1e-3);
    PicardOptions o = quick_options(1e-3);
    o.max_iter = 0;
    EXPECT_THROW(picard_iterate(d, RadialField::zeros(g), Nonlinearity::none(), Potential{}, o, strict_config(3.25)), Error);
}

TEST(Lifespan, RequiresSupercriticalMass) {
    RadialGrid g = RadialGrid::uniform(1.0, 2.0, 16);
    RadialField d{g, std::vector<double>(g.n, 1e-2), 0.0};
    TransformConfig cfg = TransformConfig::from_params(PhysicalParams::natural(1.0, 0.0, 2.0));
    try {
        lifespan_run(d, RadialField::zeros(g), power(NonlinearityKind::PowerAbs, 1.0), -0.12, 1e-2, cfg);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::InvalidParams);
    }
}

}  // namespace
