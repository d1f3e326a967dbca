#include <gtest/gtest.h>

#include <random>

#include "phasekit/equilibria.hpp"

using namespace phasekit;

namespace {

const BiPoly X = BiPoly::x();
const BiPoly Y = BiPoly::y();

Rational q(long n, long d = 1) { return make_rational(n, d); }

double residual(const PolyField& f, const StationaryPoint& s) {
    auto v = f(s.location());
    return std::max(std::fabs(v[0]), std::fabs(v[1]));
}

}  // namespace

TEST(CdkStationary, CircleCase) {
    auto r = cdk_stationary_points(1, 1);
    EXPECT_TRUE(r.circle);
    EXPECT_EQ(r.circle_cy, q(1, 2));
    EXPECT_EQ(r.circle_r2, q(1, 4));
    // the unit field vanishes on the circle; rational points from the
    // Pythagorean parametrisation
    PolyField f = cdk_field(1, 1);
    for (long t = -50; t <= 50; ++t) {
        Rational tt = q(t, 7);
        Rational x = tt / (1 + tt * tt) , y = q(1, 2) + (1 - tt * tt) / (2 * (1 + tt * tt));
        ASSERT_EQ(x * x + (y - q(1, 2)) * (y - q(1, 2)), q(1, 4));
        EXPECT_EQ(f.P.eval(x, y), 0);
        EXPECT_EQ(f.Q.eval(x, y), 0);
    }
}

TEST(CdkStationary, FourPoints) {
    auto r = cdk_stationary_points(q(5, 2), q(1, 2));
    ASSERT_EQ(r.points.size(), 4u);
    EXPECT_EQ(*r.points[2].y.exact, q(1, 4));
    EXPECT_NEAR(r.points[2].x.value, std::sqrt(0.0375), 1e-15);
    EXPECT_NEAR(r.points[3].x.value, -std::sqrt(0.0375), 1e-15);
    PolyField f = cdk_field(q(5, 2), q(1, 2));
    for (const auto& s : r.points) EXPECT_LT(residual(f, s), 1e-12);
}

TEST(CdkStationary, TwoPointsOnly) {
    auto r = cdk_stationary_points(q(7, 10), q(1, 2));
    ASSERT_EQ(r.points.size(), 2u);
    EXPECT_EQ(*r.points[0].x.exact, 0);
    EXPECT_EQ(*r.points[0].y.exact, 0);
    EXPECT_EQ(*r.points[1].x.exact, 0);
    EXPECT_EQ(*r.points[1].y.exact, 1);
}

TEST(CdkStationary, CoordinateRelationExact) {
    // x^2 + (b-1)^2/(a-b)^2 + (b-1)/(a(a-b)) = 0 with x^2 from the solver
    for (long i = 1; i < 30; ++i)
        for (long j = 1; j < 30; ++j) {
            Rational a = q(i, 10), b = q(j, 10);
            if (!((b > 1 && a < 1) || (b < 1 && a > 1))) continue;
            Rational y2 = -(b - 1) / (a - b);
            Rational x2 = y2 / a - y2 * y2;
            EXPECT_EQ(x2 + (b - 1) * (b - 1) / ((a - b) * (a - b)) + (b - 1) / (a * (a - b)), 0);
            EXPECT_GT(x2, 0);
        }
}

TEST(Jacobian, ShiftedS2) {
    for (auto a : {q(1, 2), q(5, 2)})
        for (auto b : {q(1, 2), q(19, 10)}) {
            PolyField g = shift_to_origin(cdk_field(a, b), 0, 1);
            EXPECT_EQ(jacobian_at(g, 0, 0), (Mat2q{1 - a, 0, 0, -b}));
        }
}

TEST(Jacobian, LinearSaddle) {
    EXPECT_EQ(jacobian_at(make_field(X, -Y), 0, 0), (Mat2q{1, 0, 0, -1}));
}

TEST(Shift, S2System) {
    Rational a = q(1, 2), b = q(3, 7);
    PolyField g = shift_to_origin(cdk_field(a, b), 0, 1);
    EXPECT_EQ(g.P, X * (Y * ((1 - 2 * a) * BiPoly(1) - a * Y) - a * (X * X) + BiPoly(1 - a)));
    EXPECT_EQ(g.Q, -b * (Y * (Y * Y + 2 * Y + X * X + 1)) - X * X);
}

TEST(Shift, IdentityAndInverse) {
    PolyField f = cdk_field(q(7, 10), q(19, 10));
    PolyField g = shift_to_origin(f, 0, 0);
    EXPECT_EQ(g.P, f.P);
    EXPECT_EQ(g.Q, f.Q);
    PolyField h = shift_to_origin(shift_to_origin(f, q(1, 3), q(-2, 5)), q(-1, 3), q(2, 5));
    EXPECT_EQ(h.P, f.P);
    EXPECT_EQ(h.Q, f.Q);
}

TEST(ClassifyLinear, Basic) {
    EXPECT_EQ(classify_linear(Mat2q{-1, 0, 0, -2}).kind, Kind::attracting_node);
    EXPECT_EQ(classify_linear(Mat2q{1, 0, 0, -2}).kind, Kind::saddle);
    EXPECT_EQ(classify_linear(Mat2q{0, 1, -1, 0}).kind, Kind::center_linear);
    EXPECT_EQ(classify_linear(Mat2q{0, 1, 0, 0}).kind, Kind::nilpotent);
    EXPECT_EQ(classify_linear(Mat2q{0, 0, 0, -3}).kind, Kind::semi_hyperbolic);
    EXPECT_EQ(classify_linear(Mat2d{-1, 5, -5, -1}).kind, Kind::attracting_focus);
    auto near = classify_linear(Mat2d{1e-14, 0, 0, -1});
    EXPECT_EQ(near.kind, Kind::semi_hyperbolic);
    EXPECT_TRUE(near.boundary);
}

TEST(ClassifyLinear, SimilarityInvariant) {
    std::mt19937 rng(5);
    std::uniform_int_distribution<int> e(-6, 6);
    for (int k = 0; k < 500; ++k) {
        Mat2q J{e(rng), e(rng), e(rng), e(rng)};
        Mat2q S{e(rng), e(rng), e(rng), e(rng)};
        Rational d = S.det();
        if (d == 0) continue;
        Mat2q Si{S.d / d, -S.b / d, -S.c / d, S.a / d};
        auto mul = [](const Mat2q& l, const Mat2q& r) {
            return Mat2q{l.a * r.a + l.b * r.c, l.a * r.b + l.b * r.d, l.c * r.a + l.d * r.c, l.c * r.b + l.d * r.d};
        };
        EXPECT_EQ(classify_linear(mul(mul(S, J), Si)), classify_linear(J));
        // the float path agrees away from boundaries
        auto exact = classify_linear(J);
        auto approx = classify_linear(to_double(mul(mul(S, J), Si)));
        if (!approx.boundary) EXPECT_EQ(approx.kind, exact.kind);
    }
}

TEST(S34, StrongFocus) {
    auto r = cdk_stationary_points(q(1, 2), q(19, 10));
    ASSERT_EQ(r.points.size(), 4u);
    EXPECT_EQ(r.points[2].kind.kind, Kind::attracting_focus);
    EXPECT_EQ(r.points[3].kind.kind, Kind::attracting_focus);
    auto ev = s34_eigenvalues(q(1, 2), q(19, 10));
    EXPECT_NE(ev[0].imag(), 0.0);
    EXPECT_LT(ev[0].real(), 0.0);
    EXPECT_NEAR(ev[0].real(), 1.9 * (1 - 1.9) / (2 * 0.5 * 1.4), 1e-14);
}

TEST(S34, SaddleForLargeA) {
    auto r = cdk_stationary_points(q(5, 2), q(1, 2));
    EXPECT_EQ(r.points[2].kind.kind, Kind::saddle);
    auto ev = s34_eigenvalues(q(5, 2), q(1, 2));
    EXPECT_EQ(ev[0].imag(), 0.0);
    EXPECT_LT(ev[0].real() * ev[1].real(), 0.0);
    EXPECT_THROW((void)s34_eigenvalues(q(1, 2), q(1, 2)), DomainError);
}

TEST(S34, FormulaMatchesJacobian) {
    for (long i = 1; i < 30; i += 2)
        for (long j = 1; j < 30; j += 2) {
            Rational a = q(i, 10), b = q(j, 10);
            if (!((b > 1 && a < 1) || (b < 1 && a > 1))) continue;
            auto ev = s34_eigenvalues(a, b);
            PolyField f = cdk_field(a, b);
            auto pts = cdk_stationary_points(a, b).points;
            for (int k : {2, 3}) {
                auto num = eigenvalues(jacobian_at(f, pts[k].location()));
                double scale = std::max(1.0, std::abs(ev[0]));
                bool direct = std::abs(num[0] - ev[0]) < 1e-10 * scale && std::abs(num[1] - ev[1]) < 1e-10 * scale;
                bool swapped = std::abs(num[0] - ev[1]) < 1e-10 * scale && std::abs(num[1] - ev[0]) < 1e-10 * scale;
                EXPECT_TRUE(direct || swapped) << "a=" << a << " b=" << b;
            }
        }
}

TEST(S34, NodeAtEqualityBoundary) {
    // |8a(a-1)| = b exactly: a = 1/2, b = 2
    auto r = cdk_stationary_points(q(1, 2), q(2));
    EXPECT_EQ(r.points[2].kind.kind, Kind::attracting_node);
}

TEST(SemiHyperbolic, S2UnitA) {
    auto node = cdk_stationary_points(1, q(19, 10)).points[1];
    EXPECT_EQ(node.kind.kind, Kind::semi_hyperbolic);
    EXPECT_EQ(node.kind.sub, SemiKind::attracting_node);
    auto saddle = cdk_stationary_points(1, q(1, 2)).points[1];
    EXPECT_EQ(saddle.kind.sub, SemiKind::saddle);
}

TEST(SemiHyperbolic, CenterManifoldFlowAtS2) {
    // reduced flow at s2 for a = 1 is -(1 - 1/b) u^3 to leading order
    Rational b = q(19, 10);
    auto cm = center_manifold_flow(cdk_field(1, b), 0, 1);
    EXPECT_EQ(cm.order, 3);
    EXPECT_EQ(cm.coefficient, -(1 - 1 / b));
    EXPECT_EQ(cm.lambda, -b);
}

TEST(SemiHyperbolic, TextbookCases) {
    // x' = x^2, y' = -y: saddle-node
    EXPECT_EQ(classify_semihyperbolic(make_field(X * X, -Y), 0, 0), SemiKind::saddle_node);
    // x' = -x^3, y' = -y: attracting node; x' = x^3, y' = -y: saddle
    EXPECT_EQ(classify_semihyperbolic(make_field(-X.pow(3), -Y), 0, 0), SemiKind::attracting_node);
    EXPECT_EQ(classify_semihyperbolic(make_field(X.pow(3), -Y), 0, 0), SemiKind::saddle);
    EXPECT_EQ(classify_semihyperbolic(make_field(X.pow(3), Y), 0, 0), SemiKind::repelling_node);
    // manifold bends: x' = x y, y' = -y + x^2 gives u' = u^3 + ...
    EXPECT_EQ(classify_semihyperbolic(make_field(X * Y, -Y + X * X), 0, 0), SemiKind::saddle);
    EXPECT_THROW((void)classify_semihyperbolic(make_field(BiPoly(), -Y), 0, 0), InconclusiveError);
}

TEST(FindStationary, CdkFourPoints) {
    PolyField f = cdk_field(q(5, 2), q(1, 2));
    auto res = find_stationary(f, {-2, 2, -2, 2}, 1e-10);
    EXPECT_FALSE(res.continuum);
    ASSERT_EQ(res.points.size(), 4u);
    auto closed = cdk_stationary_points(q(5, 2), q(1, 2)).points;
    for (const auto& c : closed) {
        double best = 1e9;
        for (const auto& p : res.points)
            best = std::min(best, std::hypot(p.x.value - c.x.value, p.y.value - c.y.value));
        EXPECT_LT(best, 1e-8);
    }
}

TEST(FindStationary, CircleContinuum) {
    auto res = find_stationary(cdk_field(1, 1), {-2, 2, -2, 2}, 1e-10);
    EXPECT_TRUE(res.continuum);
    EXPECT_EQ(res.continuum_factor, X * X + Y * Y - Y);
}

TEST(FindStationary, Linear) {
    auto res = find_stationary(make_field(X, Y), {-1, 1, -1, 1}, 1e-10);
    ASSERT_EQ(res.points.size(), 1u);
    EXPECT_EQ(*res.points[0].x.exact, 0);
    EXPECT_EQ(res.points[0].kind.kind, Kind::repelling_node);
}

TEST(FindStationary, GridAgreesWithClosedForm) {
    for (int i = 0; i < 20; ++i)
        for (int j = 0; j < 20; ++j) {
            Rational a = q(3 * (100 * i + 37), 2000), b = q(3 * (100 * j + 61), 2000);
            auto closed = cdk_stationary_points(a, b).points;
            double R = 1;
            for (const auto& c : closed) R = std::max({R, std::fabs(c.x.value), std::fabs(c.y.value)});
            R = 1.5 * R + 0.5;
            auto res = find_stationary(cdk_field(a, b), {-R, R, -R, R}, 1e-10);
            ASSERT_EQ(res.points.size(), closed.size()) << "a=" << a << " b=" << b;
            auto dist = [](const StationaryPoint& l, const StationaryPoint& r) {
                return std::hypot(l.x.value - r.x.value, l.y.value - r.y.value);
            };
            double haus = 0;
            for (const auto& c : closed) {
                double best = 1e9;
                for (const auto& p : res.points) best = std::min(best, dist(c, p));
                haus = std::max(haus, best);
            }
            for (const auto& p : res.points) {
                double best = 1e9;
                for (const auto& c : closed) best = std::min(best, dist(c, p));
                haus = std::max(haus, best);
            }
            EXPECT_LT(haus, 1e-8) << "a=" << a << " b=" << b;
        }
}
