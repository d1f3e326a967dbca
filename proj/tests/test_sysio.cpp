#include <gtest/gtest.h>

#include <random>

#include "phasekit/report.hpp"

using namespace phasekit;

namespace {

Rational q(long n, long d = 1) { return make_rational(n, d); }

// random source text from the grammar, with noise in spacing and brackets
std::string random_expr(std::mt19937_64& rng, int depth) {
    std::uniform_int_distribution<int> pick(0, 9);
    auto ws = [&] { return pick(rng) < 3 ? std::string(" ") : std::string(); };
    if (depth == 0 || pick(rng) < 3) {
        switch (pick(rng) % 6) {
            case 0: return "x";
            case 1: return "y";
            case 2: return "a";
            case 3: return "b2";
            case 4: return std::to_string(pick(rng));
            default: return std::to_string(pick(rng)) + "." + std::to_string(pick(rng) + 1);
        }
    }
    std::string l = random_expr(rng, depth - 1), r = random_expr(rng, depth - 1);
    switch (pick(rng)) {
        case 0: return l + ws() + "+" + ws() + r;
        case 1: return l + ws() + "-" + ws() + r;
        case 2: return l + ws() + "*" + ws() + r;
        case 3: return "(" + l + ")" + ws() + "/" + ws() + "(" + r + " + 3)";
        case 4: return "-" + ws() + "(" + l + ")";
        case 5: return "(" + l + ")^" + std::to_string(pick(rng) % 4);
        case 6: return "(" + l + ws() + "-" + ws() + r + ")";
        case 7: return l + "*-" + r;
        case 8: return "x^2^" + std::to_string(pick(rng) % 2) + ws() + "+" + ws() + l;
        default: return l + " / 7";
    }
}

}  // namespace

TEST(Parser, SingleVariable) {
    auto s = parse_system("x\ny");
    auto f = to_rational_field(s);
    EXPECT_EQ(f.p(), BiPoly::x());
    EXPECT_EQ(f.q(), BiPoly(1));
    EXPECT_EQ(f.r(), BiPoly::y());
}

TEST(Parser, SemicolonSeparator) {
    auto s = parse_system("x*y ; x - y");
    EXPECT_EQ(to_rational_field(s).r(), BiPoly::x() - BiPoly::y());
}

TEST(Parser, CdkStructurallyEqualToBuiltin) {
    auto s = parse_system("x*y/(x^2+y^2) - a*x ; y^2/(x^2+y^2) - b*y + b - 1", {{"a", q(1, 2)}, {"b", q(1, 2)}});
    EXPECT_EQ(to_rational_field(s), cdk_rational_field(q(1, 2), q(1, 2)));
    EXPECT_EQ(to_rational_field(cdk_spec(q(7, 10), q(19, 10))), cdk_rational_field(q(7, 10), q(19, 10)));
}

TEST(Parser, HeaderParameters) {
    auto s = parse_system("param a = 7/10\nparam b = 0.5\n# comment\nx*y/(x^2+y^2) - a*x\ny^2/(x^2+y^2) - b*y + b - 1\n");
    ASSERT_EQ(s.parameters.size(), 2u);
    EXPECT_EQ(*s.parameters[1].value, q(1, 2));
    EXPECT_EQ(to_rational_field(s), cdk_rational_field(q(7, 10), q(1, 2)));
}

TEST(Parser, Precedence) {
    auto f = [](const char* t) { return to_rational_field(parse_system(std::string(t) + "; 0")).p(); };
    BiPoly x = BiPoly::x(), y = BiPoly::y();
    EXPECT_EQ(f("-x^2"), -1 * (x * x));
    EXPECT_EQ(f("x - y - x"), -1 * y);
    EXPECT_EQ(f("2^3^2"), BiPoly(q(512)));
    EXPECT_EQ(f("x^2^0"), x);
    EXPECT_EQ(f("x*y^2"), x * y * y);
    EXPECT_EQ(f("(x+y)^2"), x * x + 2 * (x * y) + y * y);
    auto s = parse_system("x - y - x ; 1");
    EXPECT_EQ(to_string(*s.rhs_x), "x - y - x");
    auto t = parse_system("x - (y - x) ; 1");
    EXPECT_EQ(to_string(*t.rhs_x), "x - (y - x)");
    EXPECT_EQ(to_string(*parse_system("-(x^2) ; 1").rhs_x), "-x^2");
    EXPECT_EQ(to_string(*parse_system("(-x)^2 ; 1").rhs_x), "(-x)^2");
}

TEST(Parser, LiteralsAreExact) {
    auto s = parse_system("0.1*x ; 1/3*y");
    auto f = to_rational_field(s);
    EXPECT_EQ(f.p(), q(1, 10) * BiPoly::x());
    EXPECT_EQ(f.r(), q(1, 3) * BiPoly::y());
    EXPECT_EQ(to_string(*s.rhs_y), "(1/3)*y");
}

TEST(Parser, SyntaxErrorPosition) {
    try {
        parse_system("x + y\ny * * 2");
        FAIL();
    } catch (const UnsupportedConstructError&) {
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2);
        EXPECT_EQ(e.column(), 5);
    }
    try {
        parse_system("x + y ; y * * 2");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 1);
        EXPECT_EQ(e.column(), 13);
    }
    // a line break ends an expression
    EXPECT_THROW(parse_system("x +\ny ; 1"), ParseError);
    EXPECT_THROW(parse_system("x + (y ; 1"), ParseError);
    EXPECT_THROW(parse_system("x"), ParseError);
    EXPECT_THROW(parse_system("x ; y ; 1"), ParseError);
    EXPECT_THROW(parse_system("x^-1 ; y"), ParseError);
    EXPECT_THROW(parse_system("x^0.5 ; y"), ParseError);
    EXPECT_THROW(parse_system("x^y ; y"), ParseError);
}

TEST(Parser, UnsupportedConstructNamesToken) {
    try {
        parse_system("ln(x^2)/2 - y ; x");
        FAIL();
    } catch (const UnsupportedConstructError& e) {
        EXPECT_EQ(e.token(), "ln");
        EXPECT_EQ(e.column(), 1);
    }
    try {
        parse_system("x ; y + sin(x)");
        FAIL();
    } catch (const UnsupportedConstructError& e) {
        EXPECT_EQ(e.token(), "sin");
    }
    EXPECT_THROW(parse_system("x & y ; 1"), ParseError);
    EXPECT_THROW(parse_system("x + $ ; 1"), UnsupportedConstructError);
    EXPECT_THROW(parse_system("f(x) ; 1"), UnsupportedConstructError);
}

TEST(Parser, UnknownSymbol) {
    try {
        parse_system("c*x ; y");
        FAIL();
    } catch (const UnknownSymbolError& e) {
        EXPECT_EQ(e.name(), "c");
        EXPECT_EQ(e.column(), 1);
    }
}

TEST(Parser, ZeroDenominator) {
    EXPECT_THROW(parse_system("1/0 ; y"), ZeroDenominatorError);
    EXPECT_THROW(parse_system("x/(y - y) ; y"), ZeroDenominatorError);
    // only detected once the parameter is bound
    auto s = parse_system("param a\nx/(a - 1) ; y");
    EXPECT_EQ(unbound_parameters(s), std::vector<std::string>{"a"});
    EXPECT_THROW(to_rational_field(s), UnboundParameterError);
    s.bind("a", q(1));
    EXPECT_THROW(to_rational_field(s), ZeroDenominatorError);
}

TEST(Parser, BindingsOverrideHeader) {
    auto s = parse_system("param a = 1\na*x ; y", {{"a", q(3)}});
    EXPECT_EQ(to_rational_field(s).p(), 3 * BiPoly::x());
}

TEST(Parser, RoundTripOnRandomSpecs) {
    std::mt19937_64 rng(5);
    int checked = 0;
    for (int k = 0; k < 100; ++k) {
        std::string text = "param a = " + std::to_string(k % 7 + 1) + "/3\nparam b2\n" + random_expr(rng, 4) + " ; " +
                           random_expr(rng, 3);
        SystemSpec s;
        try {
            s = parse_system(text);
        } catch (const ZeroDenominatorError&) {
            continue;
        }
        std::string printed = format_system(s);
        SystemSpec t = parse_system(printed);
        EXPECT_EQ(s, t) << text << "\n--\n" << printed;
        EXPECT_EQ(format_system(t), printed);
        ++checked;
    }
    EXPECT_GE(checked, 95);
}

TEST(Parser, RoundTripPreservesField) {
    std::mt19937_64 rng(9);
    for (int k = 0; k < 50; ++k) {
        std::string text = "param a = 2/5\nparam b2 = -3\n" + random_expr(rng, 3) + "\n" + random_expr(rng, 3);
        SystemSpec s;
        try {
            s = parse_system(text);
        } catch (const ZeroDenominatorError&) {
            continue;
        }
        EXPECT_EQ(to_rational_field(parse_system(format_system(s))), to_rational_field(s));
    }
}

TEST(Report, EmptyReportIsMinimal) {
    Report r;
    std::string out = format_report(r);
    EXPECT_EQ(out, "{\n  \"format\": \"phasekit-report/1\",\n  \"equilibria\": [],\n  \"diagnostics\": []\n}\n");
    EXPECT_EQ(format_report(r, ReportFormat::human), "equilibria: 0\n");
}

TEST(Report, CdkFourEquilibria) {
    auto r = analyze_cdk(q(5, 2), q(1, 2));
    auto j = nlohmann::ordered_json::parse(format_report(r));
    EXPECT_EQ(j["equilibria"].size(), 4u);
    EXPECT_EQ(j["region"]["case"], "2a");
    EXPECT_EQ(j["equilibria"][1]["x"]["exact"], "0");
    EXPECT_EQ(j["equilibria"][1]["y"]["exact"], "1");
    // s3 has an irrational x-coordinate
    EXPECT_TRUE(j["equilibria"][2]["x"].contains("approx"));
    EXPECT_TRUE(j["equilibria"][2]["x"].contains("tol"));
}

TEST(Report, Deterministic) {
    auto r = analyze_cdk(q(7, 10), q(1, 2));
    EXPECT_EQ(format_report(r), format_report(analyze_cdk(q(7, 10), q(1, 2))));
    EXPECT_EQ(format_report(r, ReportFormat::human), format_report(analyze_cdk(q(7, 10), q(1, 2)), ReportFormat::human));
    EXPECT_NE(format_report(r, ReportFormat::human).find("region: 3h"), std::string::npos);
}

TEST(Report, SystemEchoRoundTrips) {
    auto r = analyze_cdk(q(7, 10), q(1, 2));
    auto s = system_from_report(format_report(r));
    ASSERT_TRUE(s.has_value());
    EXPECT_EQ(*s, *r.system);
}

TEST(Report, NumbersCarryTwelveDigits) {
    Report r;
    StationaryPoint p;
    p.x = Coord::approx(std::sqrt(2.0), 1e-15);
    p.y = Coord::of(q(1, 3));
    r.equilibria.push_back(p);
    std::string out = format_report(r);
    EXPECT_NE(out.find("1.41421356237"), std::string::npos);
    EXPECT_EQ(out.find("1.414213562373"), std::string::npos);
    EXPECT_NE(out.find("\"exact\": \"1/3\""), std::string::npos);
}

TEST(Report, GeneralSystem) {
    auto r = analyze_system(parse_system("y ; x^2"));
    ASSERT_EQ(r.equilibria.size(), 1u);
    ASSERT_TRUE(r.origin.has_value());
    EXPECT_EQ(r.origin->hyperbolic(), 2);
    ASSERT_TRUE(r.infinity.has_value());
}

TEST(RegionMapDocument, RoundTrip) {
    auto m = scan_grid({q(1, 2), q(5, 2)}, {q(1, 2), q(5, 2)}, 3);
    std::string text = region_map_json(m).dump();
    auto back = region_map_from_json(text);
    EXPECT_EQ(back.cells, m.cells);
    EXPECT_EQ(back.a_values, m.a_values);
    EXPECT_EQ(back.loci.size(), m.loci.size());
    EXPECT_EQ(region_map_json(back).dump(), text);
    EXPECT_THROW(region_map_from_json("{\"format\":\"other\"}"), ParseError);
}
