#include <gtest/gtest.h>

#include <random>

#include "phasekit/compact.hpp"

using namespace phasekit;

namespace {

UPoly cubic_factor(const Rational& c) {
    // c u (u^2 + 1)
    return UPoly(std::vector<Rational>{0, c, 0, c});
}

// v^(d-1) times the pushforward of the plane field under
// (x, y) -> (y/x, 1/x), evaluated directly at the preimage
Vec2 u1_oracle(const PolyField& f, double u, double v) {
    double x = 1 / v, y = u / v;
    Vec2 X = f(Vec2{x, y});
    double du = (X[1] * x - y * X[0]) / (x * x), dv = -X[0] / (x * x);
    double s = std::pow(v, f.degree() - 1);
    return {s * du, s * dv};
}

Vec2 u2_oracle(const PolyField& f, double u, double v) {
    double x = u / v, y = 1 / v;
    Vec2 X = f(Vec2{x, y});
    double du = (X[0] * y - x * X[1]) / (y * y), dv = -X[1] / (y * y);
    double s = std::pow(v, f.degree() - 1);
    return {s * du, s * dv};
}

}  // namespace

TEST(Compact, CdkDivisorPolynomials) {
    for (auto [a, b] : {std::pair{Rational(1, 2), Rational(19, 10)}, std::pair{Rational(5, 2), Rational(1, 2)}}) {
        auto f = cdk_field(a, b);
        EXPECT_EQ(infinity_polynomial(f, ChartId::U1), cubic_factor(a - b));
        EXPECT_EQ(infinity_polynomial(f, ChartId::U2), cubic_factor(b - a));
    }
}

TEST(Compact, LinearFieldIsStationaryAtInfinity) {
    auto f = make_field(BiPoly::x(), BiPoly::y());
    EXPECT_TRUE(infinity_polynomial(f, ChartId::U1).is_zero());
    EXPECT_TRUE(infinity_polynomial(f, ChartId::U2).is_zero());
    EXPECT_TRUE(infinite_stationary_points(f).continuum);
}

TEST(Compact, CdkChartJacobiansAtAxisPoints) {
    Rational a(7, 10), b(19, 10);
    auto f = cdk_field(a, b);
    for (ChartId c : {ChartId::U1, ChartId::V1})
        EXPECT_EQ(jacobian_at(compactify_chart(f, c), 0, 0), (Mat2q{a - b, b - 1, 0, a})) << chart_name(c);
    for (ChartId c : {ChartId::U2, ChartId::V2})
        EXPECT_EQ(jacobian_at(compactify_chart(f, c), 0, 0), (Mat2q{b - a, 0, 0, b})) << chart_name(c);
}

TEST(Compact, ChartsMatchPushforward) {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> U(-2, 2), V(0.05, 1.5);
    for (auto f : {cdk_field(Rational(7, 10), Rational(1, 2)), cdk_field(Rational(5, 2), Rational(19, 10)),
                   make_field(BiPoly::y(), -1 * BiPoly::x() + BiPoly::x().pow(2))}) {
        auto u1 = compactify_chart(f, ChartId::U1), u2 = compactify_chart(f, ChartId::U2);
        for (int k = 0; k < 100; ++k) {
            double u = U(rng), v = V(rng);
            Vec2 g = u1(Vec2{u, v}), o = u1_oracle(f, u, v);
            for (int i = 0; i < 2; ++i) EXPECT_NEAR(g[i], o[i], 1e-9 * std::max(1.0, std::fabs(o[i])));
            g = u2(Vec2{u, v});
            o = u2_oracle(f, u, v);
            for (int i = 0; i < 2; ++i) EXPECT_NEAR(g[i], o[i], 1e-9 * std::max(1.0, std::fabs(o[i])));
        }
    }
}

TEST(Compact, ChartTransitionOnOverlap) {
    // phi(u, v) = (1/u, v/u) maps U1 to U2; X_U2(phi(z)) = u^(1-d) Dphi X_U1(z)
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> U(0.2, 3), V(0.05, 1.5);
    auto f = cdk_field(Rational(7, 10), Rational(1, 2));
    int d = f.degree();
    auto u1 = compactify_chart(f, ChartId::U1), u2 = compactify_chart(f, ChartId::U2);
    for (int k = 0; k < 100; ++k) {
        double u = U(rng) * (k % 2 ? -1 : 1), v = V(rng);
        Vec2 a = u1(Vec2{u, v});
        double j11 = -1 / (u * u), j12 = 0, j21 = -v / (u * u), j22 = 1 / u;
        double s = std::pow(u, 1 - d);
        Vec2 expect{s * (j11 * a[0] + j12 * a[1]), s * (j21 * a[0] + j22 * a[1])};
        Vec2 got = u2(Vec2{1 / u, v / u});
        for (int i = 0; i < 2; ++i) EXPECT_NEAR(got[i], expect[i], 1e-9 * std::max(1.0, std::fabs(expect[i])));
    }
}

TEST(Infinity, SaddlesAlongXWhenBAboveA) {
    auto inf = infinite_stationary_points(cdk_field(Rational(1, 2), Rational(19, 10)));
    ASSERT_FALSE(inf.continuum);
    ASSERT_EQ(inf.points.size(), 2u);
    EXPECT_EQ(inf.points[0].direction_label, "+x");
    EXPECT_EQ(inf.points[0].kind.kind, Kind::saddle);
    EXPECT_EQ(inf.points[0].antipode_kind.kind, Kind::saddle);
    EXPECT_EQ(inf.points[1].direction_label, "+y");
    EXPECT_EQ(inf.points[1].kind.kind, Kind::repelling_node);
    EXPECT_EQ(inf.points[1].antipode_kind.kind, Kind::repelling_node);
}

TEST(Infinity, NodesAlongXWhenAAboveB) {
    auto inf = infinite_stationary_points(cdk_field(Rational(5, 2), Rational(1, 2)));
    ASSERT_EQ(inf.points.size(), 2u);
    EXPECT_EQ(inf.points[0].kind.kind, Kind::repelling_node);
    EXPECT_EQ(inf.points[1].kind.kind, Kind::saddle);
}

TEST(Infinity, ContinuumWhenAEqualsB) {
    Rational a(1, 2);
    auto inf = infinite_stationary_points(cdk_field(a, a));
    EXPECT_TRUE(inf.continuum);
    EXPECT_TRUE(inf.points.empty());
    // transverse eigenvalue a (1 + u^2) > 0: one outgoing orbit per point
    EXPECT_EQ(inf.continuum_transverse, UPoly(std::vector<Rational>{a, 0, a}));
    EXPECT_EQ(inf.continuum_transverse_y, a);
}

TEST(Infinity, NothingComesInFromInfinity) {
    for (int i = 1; i <= 6; ++i)
        for (int j = 1; j <= 6; ++j) {
            Rational a(i, 2), b(j, 2);
            auto inf = infinite_stationary_points(cdk_field(a, b));
            if (inf.continuum) {
                EXPECT_GT(inf.continuum_transverse.eval(Rational(0)), 0);
                continue;
            }
            for (const auto& p : inf.points) EXPECT_GE(p.exact_jacobian->d, 0) << a << " " << b;
        }
}

TEST(Disc, CentreAndBoundary) {
    EXPECT_EQ(to_disc({0, 0}), (Vec2{0, 0}));
    Vec2 far = to_disc({1e300, 0});
    EXPECT_NEAR(far[0], 1.0, 1e-15);
    EXPECT_NEAR(to_disc({1e8, 0})[0], 1.0, 1e-15);
    EXPECT_FALSE(from_disc({1.0, 0.0}).has_value());
    EXPECT_FALSE(from_disc({0.8, 0.8}).has_value());
}

TEST(Disc, RoundTrip) {
    std::mt19937 rng(1);
    std::uniform_real_distribution<double> R(-10, 10);
    double worst = 0;
    for (int k = 0; k < 1000; ++k) {
        Vec2 z{R(rng), R(rng)};
        auto back = from_disc(to_disc(z));
        ASSERT_TRUE(back.has_value());
        worst = std::max(worst, std::hypot((*back)[0] - z[0], (*back)[1] - z[1]));
    }
    EXPECT_LT(worst, 1e-12);
}
