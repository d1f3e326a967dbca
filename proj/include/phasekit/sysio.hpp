#pragma once

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "phasekit/desing.hpp"

namespace phasekit {

/// Expression tree over x, y, named parameters and rational literals.
struct Expr {
    enum class Op { num, x, y, param, neg, add, sub, mul, div, pow };
    Op op = Op::num;
    Rational value;       // num
    std::string name;     // param
    unsigned exponent = 0;  // pow
    std::shared_ptr<const Expr> lhs, rhs;

    friend bool operator==(const Expr& l, const Expr& r) {
        if (l.op != r.op) return false;
        switch (l.op) {
            case Op::num: return l.value == r.value;
            case Op::x:
            case Op::y: return true;
            case Op::param: return l.name == r.name;
            case Op::neg: return *l.lhs == *r.lhs;
            case Op::pow: return l.exponent == r.exponent && *l.lhs == *r.lhs;
            default: return *l.lhs == *r.lhs && *l.rhs == *r.rhs;
        }
    }
};

using ExprPtr = std::shared_ptr<const Expr>;

namespace expr {

inline ExprPtr num(const Rational& v) {
    auto e = std::make_shared<Expr>();
    e->value = v;
    return e;
}
inline ExprPtr var_x() {
    auto e = std::make_shared<Expr>();
    e->op = Expr::Op::x;
    return e;
}
inline ExprPtr var_y() {
    auto e = std::make_shared<Expr>();
    e->op = Expr::Op::y;
    return e;
}
inline ExprPtr param(std::string name) {
    auto e = std::make_shared<Expr>();
    e->op = Expr::Op::param;
    e->name = std::move(name);
    return e;
}
inline ExprPtr unary(Expr::Op op, ExprPtr a, unsigned exponent = 0) {
    auto e = std::make_shared<Expr>();
    e->op = op;
    e->lhs = std::move(a);
    e->exponent = exponent;
    return e;
}
inline ExprPtr binary(Expr::Op op, ExprPtr a, ExprPtr b) {
    auto e = std::make_shared<Expr>();
    e->op = op;
    e->lhs = std::move(a);
    e->rhs = std::move(b);
    return e;
}

}  // namespace expr

struct Parameter {
    std::string name;
    std::optional<Rational> value;
    friend bool operator==(const Parameter&, const Parameter&) = default;
};

struct SystemSpec {
    ExprPtr rhs_x, rhs_y;
    /// declaration order
    std::vector<Parameter> parameters;

    const Parameter* find(std::string_view name) const {
        for (const auto& p : parameters)
            if (p.name == name) return &p;
        return nullptr;
    }
    /// Declares or rebinds a parameter.
    void bind(const std::string& name, const Rational& v) {
        for (auto& p : parameters)
            if (p.name == name) {
                p.value = v;
                return;
            }
        parameters.push_back({name, v});
    }

    friend bool operator==(const SystemSpec& l, const SystemSpec& r) {
        return l.parameters == r.parameters && *l.rhs_x == *r.rhs_x && *l.rhs_y == *r.rhs_y;
    }
};

namespace detail {

inline bool is_reserved_function(std::string_view s) {
    static const char* names[] = {"ln",   "log",  "exp",  "sin",   "cos",  "tan",  "sqrt", "abs",  "sinh",
                                  "cosh", "tanh", "asin", "acos",  "atan", "pow",  "sec",  "csc",  "cot"};
    for (const char* n : names)
        if (s == n) return true;
    return false;
}

inline bool valid_identifier(std::string_view s) {
    if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    for (char c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
    return s != "x" && s != "y" && s != "param" && !is_reserved_function(s);
}

/// Precedence climbing: + - < * / < unary - < ^ (right associative).
class ExprParser {
public:
    ExprParser(std::string_view text, int line, int col0, const std::vector<Parameter>& params)
        : text_(text), line_(line), col0_(col0), params_(params) {}

    ExprPtr parse() {
        skip();
        if (pos_ >= text_.size()) fail("empty expression");
        ExprPtr e = sum();
        skip();
        if (pos_ < text_.size()) fail(std::string("unexpected '") + text_[pos_] + "'");
        return e;
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
    int line_, col0_;
    const std::vector<Parameter>& params_;

    int column() const { return col0_ + static_cast<int>(pos_); }
    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, line_, column()); }

    void skip() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    bool eat(char c) {
        skip();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    ExprPtr sum() {
        ExprPtr l = product();
        for (;;) {
            if (eat('+')) l = expr::binary(Expr::Op::add, l, product());
            else if (eat('-')) l = expr::binary(Expr::Op::sub, l, product());
            else return l;
        }
    }

    ExprPtr product() {
        ExprPtr l = signed_factor();
        for (;;) {
            if (eat('*')) {
                l = expr::binary(Expr::Op::mul, l, signed_factor());
            } else if (eat('/')) {
                ExprPtr r = signed_factor();
                // literal quotients are folded into one rational literal
                if (l->op == Expr::Op::num && r->op == Expr::Op::num && r->value != 0)
                    l = expr::num(l->value / r->value);
                else
                    l = expr::binary(Expr::Op::div, l, r);
            } else {
                return l;
            }
        }
    }

    ExprPtr signed_factor() {
        if (eat('-')) {
            ExprPtr a = signed_factor();
            if (a->op == Expr::Op::num) return expr::num(-a->value);
            return expr::unary(Expr::Op::neg, a);
        }
        return power();
    }

    ExprPtr power() {
        ExprPtr base = primary();
        if (!eat('^')) return base;
        skip();
        int col = column();
        unsigned n = exponent_chain();
        if (base->op == Expr::Op::num) {
            if (base->value == 0 && n == 0) throw ParseError("0^0 is undefined", line_, col);
            return expr::num(pow(base->value, n));
        }
        return expr::unary(Expr::Op::pow, base, n);
    }

    /// INT ('^' INT)*, evaluated right to left
    unsigned exponent_chain() {
        skip();
        if (pos_ < text_.size() && text_[pos_] == '-') fail("negative exponent");
        if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_])))
            fail("exponent must be a nonnegative integer literal");
        std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (pos_ < text_.size() && text_[pos_] == '.') fail("exponent must be a nonnegative integer literal");
        std::string digits(text_.substr(start, pos_ - start));
        if (digits.size() > 4) fail("exponent too large");
        unsigned n = static_cast<unsigned>(std::stoul(digits));
        if (eat('^')) {
            unsigned m = exponent_chain();
            unsigned long long r = 1;
            for (unsigned k = 0; k < m; ++k) {
                r *= n;
                if (r > 1000) fail("exponent too large");
            }
            n = static_cast<unsigned>(r);
        }
        if (n > 1000) fail("exponent too large");
        return n;
    }

    ExprPtr primary() {
        skip();
        if (pos_ >= text_.size()) fail("unexpected end of expression");
        char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            ExprPtr e = sum();
            if (!eat(')')) fail("expected ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            std::size_t start = pos_;
            while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
                ++pos_;
            std::string lit(text_.substr(start, pos_ - start));
            try {
                return expr::num(parse_rational(lit));
            } catch (const DomainError&) {
                throw ParseError("malformed number '" + lit + "'", line_, col0_ + static_cast<int>(start));
            }
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                ++pos_;
            std::string id(text_.substr(start, pos_ - start));
            int col = col0_ + static_cast<int>(start);
            skip();
            bool call = pos_ < text_.size() && text_[pos_] == '(';
            if (is_reserved_function(id) || call) throw UnsupportedConstructError(id, line_, col);
            if (id == "x") return expr::var_x();
            if (id == "y") return expr::var_y();
            for (const auto& p : params_)
                if (p.name == id) return expr::param(id);
            throw UnknownSymbolError(id, line_, col);
        }
        if (std::string_view("+*/^);").find(c) != std::string_view::npos) fail(std::string("unexpected '") + c + "'");
        throw UnsupportedConstructError(std::string(1, c), line_, column());
    }
};

struct Fraction {
    BiPoly num, den;
};

inline Fraction normalize(const Expr& e, const std::vector<Parameter>& params) {
    using Op = Expr::Op;
    auto reduce = [](const BiPoly& n, const BiPoly& d) {
        auto [a, b] = reduce_fraction(n, d);
        return Fraction{a, b};
    };
    switch (e.op) {
        case Op::num: return {BiPoly(e.value), BiPoly(1)};
        case Op::x: return {BiPoly::x(), BiPoly(1)};
        case Op::y: return {BiPoly::y(), BiPoly(1)};
        case Op::param:
            for (const auto& p : params)
                if (p.name == e.name) {
                    if (!p.value) throw UnboundParameterError(e.name);
                    return {BiPoly(*p.value), BiPoly(1)};
                }
            throw UnboundParameterError(e.name);
        case Op::neg: {
            Fraction a = normalize(*e.lhs, params);
            return {-1 * a.num, a.den};
        }
        case Op::pow: {
            Fraction a = normalize(*e.lhs, params);
            if (a.num.is_zero() && e.exponent == 0) throw ZeroDenominatorError("0^0 is undefined");
            return {a.num.pow(e.exponent), a.den.pow(e.exponent)};
        }
        default: break;
    }
    Fraction a = normalize(*e.lhs, params), b = normalize(*e.rhs, params);
    switch (e.op) {
        case Op::add: return reduce(a.num * b.den + b.num * a.den, a.den * b.den);
        case Op::sub: return reduce(a.num * b.den - b.num * a.den, a.den * b.den);
        case Op::mul: return reduce(a.num * b.num, a.den * b.den);
        case Op::div:
            if (b.num.is_zero()) throw ZeroDenominatorError("division by an expression that is identically zero");
            return reduce(a.num * b.den, a.den * b.num);
        default: break;
    }
    throw InternalInconsistencyError("unknown expression node");
}

inline std::string strip_comment(std::string_view line) {
    auto h = line.find('#');
    return std::string(h == std::string_view::npos ? line : line.substr(0, h));
}

inline bool blank(std::string_view s) {
    for (char c : s)
        if (!std::isspace(static_cast<unsigned char>(c))) return false;
    return true;
}

}  // namespace detail

/// Each right-hand side as a reduced fraction p/q (q monic). Every
/// parameter that occurs must be bound.
inline RationalField to_rational_field(const SystemSpec& s) {
    auto fx = detail::normalize(*s.rhs_x, s.parameters);
    auto fy = detail::normalize(*s.rhs_y, s.parameters);
    return RationalField(fx.num, fx.den, fy.num, fy.den);
}

inline PolyField to_poly_field(const SystemSpec& s) { return desingularize(to_rational_field(s)); }

/// Parameters used by the right-hand sides without a value.
inline std::vector<std::string> unbound_parameters(const SystemSpec& s) {
    std::vector<std::string> out;
    std::function<void(const Expr&)> walk = [&](const Expr& e) {
        if (e.op == Expr::Op::param) {
            const Parameter* p = s.find(e.name);
            if ((!p || !p->value) && std::find(out.begin(), out.end(), e.name) == out.end()) out.push_back(e.name);
        }
        if (e.lhs) walk(*e.lhs);
        if (e.rhs) walk(*e.rhs);
    };
    walk(*s.rhs_x);
    walk(*s.rhs_y);
    return out;
}

/// Spec text: optional "param <name> [= <rational>]" header lines, then two
/// expressions separated by ';' or a line break. '#' starts a comment.
/// `bindings` declares (and binds) further parameters, overriding the text.
/// When all parameters are bound the right-hand sides are normalized here,
/// so a zero denominator is reported at parse time.
inline SystemSpec parse_system(std::string_view text, const std::vector<Parameter>& bindings = {}) {
    SystemSpec spec;
    struct Piece {
        std::string text;
        int line, col;
    };
    std::vector<Piece> pieces;
    int line_no = 0;
    std::size_t start = 0;
    bool body = false;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        ++line_no;
        std::string line = detail::strip_comment(text.substr(start, end - start));
        if (!line.empty() && line.back() == '\r') line.pop_back();
        start = end + 1;
        if (detail::blank(line)) {
            if (end == text.size()) break;
            continue;
        }
        std::size_t first = line.find_first_not_of(" \t");
        if (!body && line.compare(first, 6, "param ") == 0) {
            std::string rest = line.substr(first + 6);
            std::string name = rest, value;
            auto eq = rest.find('=');
            if (eq != std::string::npos) {
                name = rest.substr(0, eq);
                value = rest.substr(eq + 1);
            }
            auto trim = [](std::string s) {
                auto a = s.find_first_not_of(" \t"), b = s.find_last_not_of(" \t");
                return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
            };
            name = trim(name);
            value = trim(value);
            int col = static_cast<int>(first) + 7;
            if (!detail::valid_identifier(name)) throw ParseError("invalid parameter name '" + name + "'", line_no, col);
            if (spec.find(name)) throw ParseError("parameter '" + name + "' declared twice", line_no, col);
            Parameter p{name, std::nullopt};
            if (eq != std::string::npos) {
                try {
                    p.value = parse_rational(value);
                } catch (const DomainError&) {
                    throw ParseError("malformed value '" + value + "'", line_no, static_cast<int>(first + 6 + eq) + 2);
                }
            }
            spec.parameters.push_back(p);
            if (end == text.size()) break;
            continue;
        }
        body = true;
        std::size_t from = 0;
        for (;;) {
            std::size_t semi = line.find(';', from);
            std::string part = line.substr(from, semi == std::string::npos ? std::string::npos : semi - from);
            if (!detail::blank(part) || semi != std::string::npos) pieces.push_back({part, line_no, static_cast<int>(from) + 1});
            if (semi == std::string::npos) break;
            from = semi + 1;
        }
        if (end == text.size()) break;
    }
    for (const auto& b : bindings) {
        if (!detail::valid_identifier(b.name)) throw ParseError("invalid parameter name '" + b.name + "'", 0, 0);
        if (b.value) spec.bind(b.name, *b.value);
        else if (!spec.find(b.name)) spec.parameters.push_back(b);
    }
    if (pieces.size() != 2) {
        int l = pieces.empty() ? line_no : pieces.back().line;
        throw ParseError("expected two right-hand sides, found " + std::to_string(pieces.size()), l, 1);
    }
    spec.rhs_x = detail::ExprParser(pieces[0].text, pieces[0].line, pieces[0].col, spec.parameters).parse();
    spec.rhs_y = detail::ExprParser(pieces[1].text, pieces[1].line, pieces[1].col, spec.parameters).parse();
    if (unbound_parameters(spec).empty()) (void)to_rational_field(spec);
    return spec;
}

namespace detail {

inline int precedence(const Expr& e) {
    switch (e.op) {
        case Expr::Op::add:
        case Expr::Op::sub: return 1;
        case Expr::Op::mul:
        case Expr::Op::div: return 2;
        case Expr::Op::neg: return 3;
        case Expr::Op::pow: return 4;
        case Expr::Op::num: return (e.value >= 0 && e.value.get_den() == 1) ? 5 : 0;
        default: return 5;
    }
}

inline void print(const Expr& e, int need, std::string& out) {
    bool paren = precedence(e) < need;
    if (paren) out += "(";
    switch (e.op) {
        case Expr::Op::num: out += to_string(e.value); break;
        case Expr::Op::x: out += "x"; break;
        case Expr::Op::y: out += "y"; break;
        case Expr::Op::param: out += e.name; break;
        case Expr::Op::neg:
            out += "-";
            print(*e.lhs, 3, out);
            break;
        case Expr::Op::pow:
            print(*e.lhs, 5, out);
            out += "^" + std::to_string(e.exponent);
            break;
        case Expr::Op::add:
        case Expr::Op::sub:
            print(*e.lhs, 1, out);
            out += e.op == Expr::Op::add ? " + " : " - ";
            print(*e.rhs, 2, out);
            break;
        case Expr::Op::mul:
        case Expr::Op::div:
            print(*e.lhs, 2, out);
            out += e.op == Expr::Op::mul ? "*" : "/";
            print(*e.rhs, 3, out);
            break;
    }
    if (paren) out += ")";
}

}  // namespace detail

/// Minimal-parenthesis text; negative and fractional literals are always
/// parenthesized so that the output reparses to the same tree.
inline std::string to_string(const Expr& e) {
    std::string out;
    detail::print(e, 1, out);
    return out;
}

/// Spec-file text; parse_system(format_system(s)) == s.
inline std::string format_system(const SystemSpec& s) {
    std::string out;
    for (const auto& p : s.parameters) {
        out += "param " + p.name;
        if (p.value) out += " = " + to_string(*p.value);
        out += "\n";
    }
    out += to_string(*s.rhs_x) + "\n" + to_string(*s.rhs_y) + "\n";
    return out;
}

/// The CDK system as a spec with a and b bound.
inline SystemSpec cdk_spec(const Rational& a, const Rational& b) {
    require_positive(a, b);
    return parse_system("x*y/(x^2 + y^2) - a*x\ny^2/(x^2 + y^2) - b*y + b - 1\n", {{"a", a}, {"b", b}});
}

}  // namespace phasekit
