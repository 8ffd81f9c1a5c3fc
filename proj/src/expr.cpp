#include "liouville/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <vector>

namespace liouville {

namespace {

// Overflow sentinel: far above anything a hypothesis-satisfying potential
// reaches on an interior grid, far below IEEE overflow.
constexpr double kMagnitudeCap = 1e100;
// Quotients with |denominator| below this are flagged as pole proximity.
constexpr double kDenominatorFloor = 1e-30;

enum class Fn { Exp, Sin, Cos, Sinh, Cosh, Tanh, Sech };

const char* fn_name(Fn f) {
    switch (f) {
        case Fn::Exp: return "exp";
        case Fn::Sin: return "sin";
        case Fn::Cos: return "cos";
        case Fn::Sinh: return "sinh";
        case Fn::Cosh: return "cosh";
        case Fn::Tanh: return "tanh";
        case Fn::Sech: return "sech";
    }
    return "?";
}

}  // namespace

struct PotentialExpr::Node {
    enum class Kind { Literal, Var, Neg, Add, Sub, Mul, Div, Pow, Fun } kind;
    Complex literal{};
    int exponent = 0;
    Fn fn = Fn::Exp;
    std::shared_ptr<const Node> a, b;
};

namespace {

using Node = PotentialExpr::Node;
using NodePtr = std::shared_ptr<const Node>;

NodePtr make_literal(Complex v) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Literal;
    n->literal = v;
    return n;
}

NodePtr make_unary(Node::Kind k, NodePtr a) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->a = std::move(a);
    return n;
}

NodePtr make_binary(Node::Kind k, NodePtr a, NodePtr b) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

// ------------------------------------------------------------------ lexer

struct Token {
    enum class Kind { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End } kind;
    double number = 0.0;
    bool imaginary = false;     // number carried a trailing 'i'
    std::string ident;
    std::size_t offset = 0;
};

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) {}

    Token next() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        Token t;
        t.offset = pos_;
        if (pos_ >= text_.size()) {
            t.kind = Token::Kind::End;
            return t;
        }
        char c = text_[pos_];
        switch (c) {
            case '+': ++pos_; t.kind = Token::Kind::Plus; return t;
            case '-': ++pos_; t.kind = Token::Kind::Minus; return t;
            case '*': ++pos_; t.kind = Token::Kind::Star; return t;
            case '/': ++pos_; t.kind = Token::Kind::Slash; return t;
            case '^': ++pos_; t.kind = Token::Kind::Caret; return t;
            case '(': ++pos_; t.kind = Token::Kind::LParen; return t;
            case ')': ++pos_; t.kind = Token::Kind::RParen; return t;
            default: break;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return lex_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return lex_ident();
        throw ParseError(ParseErrorKind::Syntax, pos_,
                         std::string("unexpected character '") + c + "'");
    }

private:
    Token lex_number() {
        Token t;
        t.kind = Token::Kind::Number;
        t.offset = pos_;
        std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (pos_ < text_.size() && text_[pos_] == '.') {
            ++pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        }
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t mark = pos_;
            ++pos_;
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
            if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            } else {
                pos_ = mark;  // "e" belonged to an identifier or was stray
            }
        }
        std::string digits(text_.substr(start, pos_ - start));
        if (digits == ".") {
            throw ParseError(ParseErrorKind::Syntax, start, "malformed number");
        }
        t.number = std::strtod(digits.c_str(), nullptr);
        if (pos_ < text_.size() && text_[pos_] == 'i' &&
            (pos_ + 1 >= text_.size() ||
             !(std::isalnum(static_cast<unsigned char>(text_[pos_ + 1])) || text_[pos_ + 1] == '_'))) {
            t.imaginary = true;
            ++pos_;
        }
        return t;
    }

    Token lex_ident() {
        Token t;
        t.kind = Token::Kind::Ident;
        t.offset = pos_;
        std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        t.ident = std::string(text_.substr(start, pos_ - start));
        return t;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

// ----------------------------------------------------------------- parser

class Parser {
public:
    explicit Parser(std::string_view text) : lexer_(text) { advance(); }

    NodePtr parse_all() {
        NodePtr e = parse_expr();
        if (cur_.kind != Token::Kind::End) {
            throw ParseError(ParseErrorKind::Syntax, cur_.offset, "trailing input");
        }
        return e;
    }

private:
    void advance() { cur_ = lexer_.next(); }

    NodePtr parse_expr() {
        NodePtr lhs = parse_term();
        while (cur_.kind == Token::Kind::Plus || cur_.kind == Token::Kind::Minus) {
            auto k = cur_.kind == Token::Kind::Plus ? Node::Kind::Add : Node::Kind::Sub;
            advance();
            lhs = make_binary(k, lhs, parse_term());
        }
        return lhs;
    }

    NodePtr parse_term() {
        NodePtr lhs = parse_unary();
        while (cur_.kind == Token::Kind::Star || cur_.kind == Token::Kind::Slash) {
            auto k = cur_.kind == Token::Kind::Star ? Node::Kind::Mul : Node::Kind::Div;
            advance();
            lhs = make_binary(k, lhs, parse_unary());
        }
        return lhs;
    }

    NodePtr parse_unary() {
        if (cur_.kind == Token::Kind::Minus) {
            advance();
            return make_unary(Node::Kind::Neg, parse_unary());
        }
        return parse_power();
    }

    NodePtr parse_power() {
        NodePtr base = parse_atom();
        if (cur_.kind != Token::Kind::Caret) return base;
        advance();
        bool negated = false;
        if (cur_.kind == Token::Kind::Minus) {
            negated = true;
            advance();
        }
        if (cur_.kind != Token::Kind::Number) {
            throw ParseError(ParseErrorKind::BranchCut, cur_.offset,
                             "exponent must be an integer literal; a non-integer power "
                             "introduces a branch cut");
        }
        if (cur_.imaginary || cur_.number != std::floor(cur_.number)) {
            throw ParseError(ParseErrorKind::BranchCut, cur_.offset,
                             "non-integer exponent introduces a branch cut");
        }
        double mag = cur_.number;
        if (mag > 16.0) {
            throw ParseError(ParseErrorKind::ExponentRange, cur_.offset,
                             "exponent out of range [-16, 16]");
        }
        int e = static_cast<int>(mag);
        if (negated) e = -e;
        advance();
        if (cur_.kind == Token::Kind::Caret) {
            throw ParseError(ParseErrorKind::Syntax, cur_.offset, "chained '^' is not allowed");
        }
        auto n = std::make_shared<Node>();
        n->kind = Node::Kind::Pow;
        n->exponent = e;
        n->a = base;
        return n;
    }

    NodePtr parse_atom() {
        switch (cur_.kind) {
            case Token::Kind::Number: {
                Complex v = cur_.imaginary ? Complex(0.0, cur_.number) : Complex(cur_.number, 0.0);
                advance();
                return make_literal(v);
            }
            case Token::Kind::LParen: {
                advance();
                NodePtr e = parse_expr();
                expect_rparen();
                return e;
            }
            case Token::Kind::Ident:
                return parse_ident();
            default:
                throw ParseError(ParseErrorKind::Syntax, cur_.offset, "expected a value");
        }
    }

    NodePtr parse_ident() {
        std::string name = cur_.ident;
        std::size_t off = cur_.offset;
        advance();
        if (cur_.kind == Token::Kind::LParen) {
            Fn fn;
            if (name == "exp") fn = Fn::Exp;
            else if (name == "sin") fn = Fn::Sin;
            else if (name == "cos") fn = Fn::Cos;
            else if (name == "sinh") fn = Fn::Sinh;
            else if (name == "cosh") fn = Fn::Cosh;
            else if (name == "tanh") fn = Fn::Tanh;
            else if (name == "sech") fn = Fn::Sech;
            else if (name == "log" || name == "ln" || name == "sqrt") {
                throw ParseError(ParseErrorKind::BranchCut, off,
                                 "'" + name + "' has a branch cut and is not admitted");
            } else {
                throw ParseError(ParseErrorKind::UnknownIdentifier, off,
                                 "unknown function '" + name + "'");
            }
            advance();
            NodePtr arg = parse_expr();
            expect_rparen();
            auto n = std::make_shared<Node>();
            n->kind = Node::Kind::Fun;
            n->fn = fn;
            n->a = arg;
            return n;
        }
        if (name == "z") {
            auto n = std::make_shared<Node>();
            n->kind = Node::Kind::Var;
            return n;
        }
        if (name == "i") return make_literal(Complex(0.0, 1.0));
        if (name == "pi") return make_literal(Complex(3.14159265358979323846, 0.0));
        if (name == "log" || name == "ln" || name == "sqrt") {
            throw ParseError(ParseErrorKind::BranchCut, off,
                             "'" + name + "' has a branch cut and is not admitted");
        }
        throw ParseError(ParseErrorKind::UnknownIdentifier, off, "unknown identifier '" + name + "'");
    }

    void expect_rparen() {
        if (cur_.kind != Token::Kind::RParen) {
            throw ParseError(ParseErrorKind::Syntax, cur_.offset, "expected ')'");
        }
        advance();
    }

    Lexer lexer_;
    Token cur_;
};

// -------------------------------------------------------------- evaluator

struct Ev {
    Complex v;
    bool flag;
};

bool too_big(Complex v) {
    double m = std::abs(v.real()) + std::abs(v.imag());
    return !(m <= kMagnitudeCap);  // catches NaN as well
}

Ev checked(Complex v, bool flag) {
    return {v, flag || too_big(v)};
}

Ev divide(Ev num, Ev den) {
    bool flag = num.flag || den.flag;
    if (std::abs(den.v) < kDenominatorFloor) flag = true;
    return checked(num.v / den.v, flag);
}

Ev eval_node(const Node& n, Complex z) {
    switch (n.kind) {
        case Node::Kind::Literal:
            return {n.literal, false};
        case Node::Kind::Var:
            return {z, false};
        case Node::Kind::Neg: {
            Ev a = eval_node(*n.a, z);
            return {-a.v, a.flag};
        }
        case Node::Kind::Add: {
            Ev a = eval_node(*n.a, z);
            Ev b = eval_node(*n.b, z);
            return checked(a.v + b.v, a.flag || b.flag);
        }
        case Node::Kind::Sub: {
            Ev a = eval_node(*n.a, z);
            Ev b = eval_node(*n.b, z);
            return checked(a.v - b.v, a.flag || b.flag);
        }
        case Node::Kind::Mul: {
            Ev a = eval_node(*n.a, z);
            Ev b = eval_node(*n.b, z);
            return checked(a.v * b.v, a.flag || b.flag);
        }
        case Node::Kind::Div:
            return divide(eval_node(*n.a, z), eval_node(*n.b, z));
        case Node::Kind::Pow: {
            Ev a = eval_node(*n.a, z);
            int e = n.exponent;
            if (e == 0) return {Complex(1.0, 0.0), a.flag};
            unsigned k = static_cast<unsigned>(e < 0 ? -e : e);
            Complex acc(1.0, 0.0);
            Complex base = a.v;
            bool flag = a.flag;
            while (k) {
                if (k & 1u) {
                    acc *= base;
                    flag = flag || too_big(acc);
                }
                k >>= 1u;
                if (k) {
                    base *= base;
                    flag = flag || too_big(base);
                }
            }
            if (e < 0) return divide({Complex(1.0, 0.0), false}, {acc, flag});
            return checked(acc, flag);
        }
        case Node::Kind::Fun: {
            Ev a = eval_node(*n.a, z);
            switch (n.fn) {
                case Fn::Exp: return checked(std::exp(a.v), a.flag);
                case Fn::Sin: return checked(std::sin(a.v), a.flag);
                case Fn::Cos: return checked(std::cos(a.v), a.flag);
                case Fn::Sinh: return checked(std::sinh(a.v), a.flag);
                case Fn::Cosh: return checked(std::cosh(a.v), a.flag);
                case Fn::Tanh:
                    // sinh/cosh so the denominator rule sees the cosh zeros
                    return divide(checked(std::sinh(a.v), a.flag),
                                  checked(std::cosh(a.v), a.flag));
                case Fn::Sech:
                    return divide({Complex(1.0, 0.0), false}, checked(std::cosh(a.v), a.flag));
            }
            return {a.v, true};
        }
    }
    return {Complex{}, true};
}

// ----------------------------------------------------------- pretty print

int precedence(const Node& n) {
    switch (n.kind) {
        case Node::Kind::Add:
        case Node::Kind::Sub: return 1;
        case Node::Kind::Mul:
        case Node::Kind::Div: return 2;
        case Node::Kind::Neg: return 3;
        case Node::Kind::Pow: return 4;
        default: return 5;
    }
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string print_node(const Node& n);

std::string print_child(const Node& child, int min_prec) {
    std::string s = print_node(child);
    if (precedence(child) < min_prec) return "(" + s + ")";
    return s;
}

std::string print_node(const Node& n) {
    switch (n.kind) {
        case Node::Kind::Literal: {
            Complex v = n.literal;
            if (v.imag() == 0.0) {
                if (v.real() < 0.0) return "(" + format_double(v.real()) + ")";
                return format_double(v.real());
            }
            if (v.real() == 0.0) {
                if (v.imag() < 0.0) return "(" + format_double(v.imag()) + "i)";
                return format_double(v.imag()) + "i";
            }
            return "(" + format_double(v.real()) + " + " + format_double(v.imag()) + "i)";
        }
        case Node::Kind::Var: return "z";
        case Node::Kind::Neg: return "-" + print_child(*n.a, 3);
        case Node::Kind::Add: return print_child(*n.a, 1) + " + " + print_child(*n.b, 2);
        case Node::Kind::Sub: return print_child(*n.a, 1) + " - " + print_child(*n.b, 2);
        case Node::Kind::Mul: return print_child(*n.a, 2) + "*" + print_child(*n.b, 3);
        case Node::Kind::Div: return print_child(*n.a, 2) + "/" + print_child(*n.b, 3);
        case Node::Kind::Pow:
            return print_child(*n.a, 5) + "^" + std::to_string(n.exponent);
        case Node::Kind::Fun:
            return std::string(fn_name(n.fn)) + "(" + print_node(*n.a) + ")";
    }
    return "?";
}

}  // namespace

PotentialExpr PotentialExpr::parse(std::string_view text) {
    if (text.size() > 64 * 1024) {
        throw ParseError(ParseErrorKind::Syntax, 64 * 1024, "expression longer than 64 KiB");
    }
    PotentialExpr e;
    e.source_ = std::string(text);
    e.root_ = Parser(text).parse_all();
    return e;
}

EvalResult PotentialExpr::eval(Complex z) const {
    if (!root_) return {Complex(0.0, 0.0), false};
    Ev r = eval_node(*root_, z);
    return {r.v, r.flag};
}

Complex PotentialExpr::value_at(Complex z) const {
    EvalResult r = eval(z);
    if (r.near_pole) {
        throw PoleProximityError(z, "potential evaluation flagged pole proximity");
    }
    return r.value;
}

std::string PotentialExpr::pretty() const {
    if (!root_) return "0";
    return print_node(*root_);
}

bool PotentialExpr::is_zero_literal() const {
    return !root_ || (root_->kind == Node::Kind::Literal && root_->literal == Complex(0.0, 0.0));
}

namespace {
bool depends_on_z(const Node& n) {
    if (n.kind == Node::Kind::Var) return true;
    if (n.a && depends_on_z(*n.a)) return true;
    if (n.b && depends_on_z(*n.b)) return true;
    return false;
}
}  // namespace

bool PotentialExpr::is_constant() const {
    return !root_ || !depends_on_z(*root_);
}

}  // namespace liouville
