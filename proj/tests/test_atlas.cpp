#include <gtest/gtest.h>

#include <functional>
#include <random>
#include <set>

#include "phasekit/atlas.hpp"

using namespace phasekit;

namespace {

Rational q(long n, long d = 1) { return make_rational(n, d); }

Rational abs8(const Rational& a) {
    Rational v = 8 * a * (a - 1);
    return v < 0 ? Rational(-v) : v;
}

// one independent predicate per region, written as flat conjunctions
const std::vector<std::pair<RegionId, std::function<bool(const Rational&, const Rational&)>>>& predicates() {
    static const std::vector<std::pair<RegionId, std::function<bool(const Rational&, const Rational&)>>> p = {
        {RegionId::r1, [](auto& a, auto& b) { return a == 1 && b == 1; }},
        {RegionId::r2a, [](auto& a, auto& b) { return b < 1 && 1 < a; }},
        {RegionId::r2b, [](auto& a, auto& b) { return a < 1 && 1 < b && abs8(a) > b; }},
        {RegionId::r2c, [](auto& a, auto& b) { return a < 1 && 1 < b && abs8(a) <= b; }},
        {RegionId::r3a, [](auto& a, auto& b) { return a == 1 && 1 < b; }},
        {RegionId::r3b, [](auto& a, auto& b) { return a == 1 && b < 1; }},
        {RegionId::r3c, [](auto& a, auto& b) { return 1 < a && 1 < b && a == b; }},
        {RegionId::r3d, [](auto& a, auto& b) { return 1 < a && 1 < b && a < b; }},
        {RegionId::r3e, [](auto& a, auto& b) { return 1 < a && 1 < b && a > b; }},
        {RegionId::r3f, [](auto& a, auto& b) { return a < 1 && b < 1 && a == b; }},
        {RegionId::r3g, [](auto& a, auto& b) { return a < 1 && b < 1 && a < b; }},
        {RegionId::r3h, [](auto& a, auto& b) { return a < 1 && b < 1 && a > b; }},
        {RegionId::r3i, [](auto& a, auto& b) { return b == 1 && 2 * a < 1; }},
        {RegionId::r3j, [](auto& a, auto& b) { return b == 1 && 2 * a == 1; }},
        {RegionId::r3k, [](auto& a, auto& b) { return b == 1 && 2 * a > 1 && a < 1; }},
        {RegionId::r3l, [](auto& a, auto& b) { return b == 1 && a > 1; }},
    };
    return p;
}

std::vector<RegionId> firing(const Rational& a, const Rational& b) {
    std::vector<RegionId> out;
    for (const auto& [r, f] : predicates())
        if (f(a, b)) out.push_back(r);
    return out;
}

struct Pair {
    Rational a, b;
    const char* region;
};

const std::vector<Pair>& representatives() {
    static const std::vector<Pair> v = {
        {q(5, 2), q(1, 2), "2a"}, {q(1), q(1, 2), "3b"},    {q(7, 10), q(1, 2), "3h"},  {q(1, 2), q(1, 2), "3f"},
        {q(1, 5), q(1, 2), "3g"}, {q(1), q(1), "1"},         {q(1, 5), q(1), "3i"},      {q(1, 2), q(1), "3j"},
        {q(7, 10), q(1), "3k"},   {q(5, 2), q(1), "3l"},     {q(1, 2), q(19, 10), "2b"}, {q(7, 10), q(19, 10), "2c"},
        {q(1), q(19, 10), "3a"},  {q(6, 5), q(19, 10), "3d"}, {q(19, 10), q(19, 10), "3c"}, {q(5, 2), q(19, 10), "3e"},
    };
    return v;
}

}  // namespace

TEST(ClassifyRegion, SpecimenPoints) {
    EXPECT_EQ(classify_region(q(1), q(1)), RegionId::r1);
    EXPECT_EQ(classify_region(q(5, 2), q(1, 2)), RegionId::r2a);
    EXPECT_EQ(classify_region(q(1, 2), q(19, 10)), RegionId::r2b);
    EXPECT_EQ(classify_region(q(3, 10), q(1)), RegionId::r3i);
}

TEST(ClassifyRegion, RepresentativesCoverEveryRegion) {
    std::set<std::string> seen;
    for (const auto& p : representatives()) {
        EXPECT_STREQ(region_name(classify_region(p.a, p.b)), p.region) << p.a << "," << p.b;
        seen.insert(p.region);
    }
    EXPECT_EQ(seen.size(), 16u);
}

TEST(ClassifyRegion, BoundaryPoints) {
    EXPECT_EQ(classify_region(q(1), q(1)), RegionId::r1);
    EXPECT_EQ(classify_region(q(1, 2), q(1)), RegionId::r3j);
    EXPECT_EQ(classify_region(q(1), q(1, 2)), RegionId::r3b);
    EXPECT_EQ(classify_region(q(19, 10), q(19, 10)), RegionId::r3c);
    // |8a(a-1)| = b exactly: the node side
    EXPECT_EQ(classify_region(q(1, 2), q(2)), RegionId::r2c);
    EXPECT_EQ(classify_region(q(1, 2), q(199, 100)), RegionId::r2b);
}

TEST(ClassifyRegion, RejectsNonpositive) {
    EXPECT_THROW(classify_region(q(0), q(1)), DomainError);
    EXPECT_THROW(classify_region(q(1), q(-1, 2)), DomainError);
}

TEST(ClassifyRegion, PartitionOverRandomPoints) {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<long> num(1, 300), pick(0, 9);
    for (int k = 0; k < 10000; ++k) {
        // bias towards the boundary values so that every line is hit
        auto draw = [&]() -> Rational {
            switch (pick(rng)) {
                case 0: return q(1);
                case 1: return q(1, 2);
                default: return q(num(rng), 100);
            }
        };
        Rational a = draw(), b = pick(rng) == 0 ? a : draw();
        auto f = firing(a, b);
        ASSERT_EQ(f.size(), 1u) << a << "," << b;
        EXPECT_EQ(classify_region(a, b), f[0]) << a << "," << b;
    }
}

TEST(ClassifyRegion, DoublesAreRationalizedWithWarning) {
    std::vector<std::string> warnings;
    EXPECT_EQ(classify_region(0.7, 0.5, &warnings), RegionId::r3h);
    ASSERT_EQ(warnings.size(), 1u);  // 0.5 is exact, 0.7 is not
    EXPECT_NE(warnings[0].find("7/10"), std::string::npos);
    EXPECT_EQ(rationalize(0.1), q(1, 10));
    EXPECT_EQ(rationalize(1.9), q(19, 10));
}

TEST(RegionSummary, CrossValidatesEveryRepresentative) {
    for (const auto& p : representatives()) {
        RegionSummary s;
        ASSERT_NO_THROW(s = region_summary(p.a, p.b)) << p.a << "," << p.b;
        EXPECT_STREQ(region_name(s.region), p.region);
        EXPECT_EQ(s.homoclinic, p.b < 1 || (p.b == 1 && p.a < 1));
        if (!s.circle) EXPECT_EQ(s.homoclinic, s.s1_sectors.elliptic > 0);
    }
}

TEST(RegionSummary, Case3h) {
    auto s = region_summary(q(7, 10), q(1, 2));
    EXPECT_EQ(s.region, RegionId::r3h);
    EXPECT_EQ(s.s1_sectors.elliptic, 2);
    EXPECT_EQ(s.s1_sectors.index, 2);
    ASSERT_EQ(s.finite_points.size(), 2u);
    EXPECT_EQ(s.finite_points[1].label, "s2");
    EXPECT_EQ(s.finite_points[1].kind.kind, Kind::saddle);
    EXPECT_TRUE(s.finite_points[1].x_repelling);
    EXPECT_TRUE(s.infinity.x_kind.is_repelling_node());
    EXPECT_EQ(s.infinity.y_kind.kind, Kind::saddle);
    EXPECT_EQ(s.almost_attractors, std::vector<std::string>{"s1"});
}

TEST(RegionSummary, Case3cContinuumAtInfinity) {
    auto s = region_summary(q(19, 10), q(19, 10));
    EXPECT_EQ(s.region, RegionId::r3c);
    EXPECT_TRUE(s.infinity.continuum);
    EXPECT_EQ(s.infinity.case_label, "1");
    EXPECT_EQ(s.finite_points[1].kind.kind, Kind::attracting_node);
}

TEST(RegionSummary, Case3i) {
    auto s = region_summary(q(3, 10), q(1));
    EXPECT_EQ(s.region, RegionId::r3i);
    EXPECT_EQ(s.s1_sectors.case_label, "3a");
    EXPECT_EQ(s.s1_sectors.weights, (NewtonWeights{1, 2}));
    EXPECT_EQ(s.finite_points[1].kind.kind, Kind::saddle);
}

TEST(RegionSummary, CircleCase) {
    auto s = region_summary(q(1), q(1));
    EXPECT_TRUE(s.circle);
    EXPECT_TRUE(s.finite_points.empty());
    EXPECT_TRUE(s.infinity.continuum);
    EXPECT_FALSE(s.homoclinic);
    EXPECT_EQ(s.almost_attractors, (std::vector<std::string>{"s1", "circle"}));
}

TEST(RegionSummary, AlmostAttractors) {
    EXPECT_EQ(region_summary(q(5, 2), q(1, 2)).almost_attractors, (std::vector<std::string>{"s1", "s2"}));
    EXPECT_EQ(region_summary(q(1, 2), q(19, 10)).almost_attractors, (std::vector<std::string>{"s3", "s4"}));
    EXPECT_EQ(region_summary(q(5, 2), q(1)).almost_attractors, (std::vector<std::string>{"s1", "s2"}));
    EXPECT_EQ(region_summary(q(6, 5), q(19, 10)).almost_attractors, (std::vector<std::string>{"s2"}));
}

TEST(RegionSummary, OriginCaseGoldenTable) {
    // a in {0.2, 0.5, 0.7, 2.5} x b in {0.5, 1, 1.9}
    const char* want[4][3] = {{"1", "3a", "2"}, {"1", "3b", "2"}, {"1", "3c", "2"}, {"1", "3d", "2"}};
    Rational as[] = {q(1, 5), q(1, 2), q(7, 10), q(5, 2)}, bs[] = {q(1, 2), q(1), q(19, 10)};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 3; ++j) {
            auto d = classify_nilpotent_origin(cdk_field(as[i], bs[j]));
            EXPECT_EQ(s1_case_of(d), want[i][j]) << as[i] << "," << bs[j];
            EXPECT_EQ(d.homoclinic, j == 0 || (j == 1 && i < 3));
        }
}

TEST(RegionSummary, HomoclinicDependsOnlyOnB) {
    for (Rational b : {q(1, 3), q(1, 2), q(9, 10), q(1), q(11, 10), q(2)}) {
        std::set<bool> flags;
        for (int k = 1; k <= 20; ++k) {
            Rational a = q(k, 20);  // a in (0, 1]
            if (a == 1 && b == 1) continue;
            flags.insert(region_summary(a, b).homoclinic);
        }
        EXPECT_EQ(flags.size(), 1u) << b;
        EXPECT_EQ(*flags.begin(), b <= 1) << b;
    }
}

TEST(ScanGrid, ThreeByThreeMatchesPointwise) {
    auto m = scan_grid({q(1, 2), q(5, 2)}, {q(1, 2), q(5, 2)}, 3);
    ASSERT_EQ(m.cells.size(), 9u);
    for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 3; ++i) EXPECT_EQ(m.at(i, j), classify_region(m.a_values[i], m.b_values[j]));
    // corners
    EXPECT_EQ(m.a_values[0], q(5, 6));
    EXPECT_EQ(m.at(0, 0), RegionId::r3f);
    EXPECT_EQ(m.at(2, 0), RegionId::r2a);
    EXPECT_EQ(m.at(0, 2), RegionId::r2c);
    EXPECT_EQ(m.at(2, 2), RegionId::r3c);
}

TEST(ScanGrid, DegenerateSingleCell) {
    auto m = scan_grid({q(1), q(1)}, {q(1), q(1)}, 1);
    ASSERT_EQ(m.cells.size(), 1u);
    EXPECT_EQ(m.cells[0], RegionId::r1);
}

TEST(ScanGrid, SixteenRegionsOnFullQuadrant) {
    auto m = scan_grid({q(0), q(3)}, {q(0), q(3)}, 200);
    EXPECT_EQ(m.cells.size(), 40000u);
    EXPECT_EQ(m.distinct().size(), 16u);
    std::set<std::string> names;
    for (const auto& l : m.loci) names.insert(l.name);
    for (const char* n : {"a=1", "b=1", "a=b", "|8a(a-1)|=b", "a=1/2,b=1", "a=1,b=1"}) EXPECT_TRUE(names.count(n)) << n;
}

TEST(ScanGrid, DeterministicAcrossThreadCounts) {
    setenv("ATLAS_THREADS", "1", 1);
    auto one = scan_grid({q(0), q(3)}, {q(0), q(3)}, 60);
    setenv("ATLAS_THREADS", "7", 1);
    auto many = scan_grid({q(0), q(3)}, {q(0), q(3)}, 60);
    unsetenv("ATLAS_THREADS");
    EXPECT_EQ(one.cells, many.cells);
    EXPECT_EQ(atlas_threads() >= 1, true);
}

TEST(ScanGrid, RejectsBadRanges) {
    EXPECT_THROW(scan_grid({q(-1), q(1)}, {q(1), q(2)}, 4), DomainError);
    EXPECT_THROW(scan_grid({q(2), q(1)}, {q(1), q(2)}, 4), DomainError);
    EXPECT_THROW(scan_grid({q(1), q(2)}, {q(1), q(2)}, 0), DomainError);
}
