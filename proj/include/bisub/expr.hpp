// SPDX-License-Identifier: MIT
//
// Scalar expression language over chart coordinates x, y, z and named real
// parameters: recursive-descent parser, canonical printer, and jet
// evaluation. The grammar (docs/grammar.ebnf) covers +, -, *, /, unary
// minus, integer powers, parentheses and the functions exp, ln, sqrt, sin,
// cos. There is no symbolic differentiation anywhere: all derivatives come
// from evaluating with jets.

#pragma once

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bisub/jet.hpp"
#include "bisub/types.hpp"

namespace bisub {

// ===========================================================================
// Errors
// ===========================================================================

/// Syntax error with the byte offset of the offending token.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t offset, const std::string& what)
        : std::runtime_error("syntax error at offset " + std::to_string(offset) +
                             ": " + what),
          offset_(offset) {}
    [[nodiscard]] std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

class EvalError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A subexpression left its domain (division by zero, ln of a non-positive
/// value, ...) at a concrete point. Never reported as silent NaN.
class DomainError : public EvalError {
public:
    DomainError(std::string subexpression, const Point& at,
                const std::string& reason)
        : EvalError("domain error in '" + subexpression + "' at (" +
                    format_point(at) + "): " + reason),
          subexpression_(std::move(subexpression)),
          at_(at) {}
    [[nodiscard]] const std::string& subexpression() const { return subexpression_; }
    [[nodiscard]] const Point& at() const { return at_; }

private:
    static std::string format_point(const Point& p) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "%.6g, %.6g, %.6g", p.x, p.y, p.z);
        return buf;
    }
    std::string subexpression_;
    Point at_;
};

// ===========================================================================
// Abstract syntax tree
// ===========================================================================

enum class ExprKind { Number, Variable, Parameter, Add, Sub, Mul, Div, Neg, Pow, Call };
enum class ExprFunc { Exp, Ln, Sqrt, Sin, Cos };

struct ExprNode;
using ExprNodePtr = std::shared_ptr<const ExprNode>;

struct ExprNode {
    ExprNode() = default;
    explicit ExprNode(ExprKind k) : kind(k) {}

    ExprKind kind = ExprKind::Number;
    double number = 0.0;              // Number
    int axis = 0;                     // Variable: 0=x, 1=y, 2=z
    std::string name;                 // Parameter
    ExprFunc func = ExprFunc::Exp;    // Call
    int exponent = 0;                 // Pow
    ExprNodePtr a, b;                 // operands
};

[[nodiscard]] inline const char* func_name(ExprFunc f) {
    switch (f) {
        case ExprFunc::Exp: return "exp";
        case ExprFunc::Ln: return "ln";
        case ExprFunc::Sqrt: return "sqrt";
        case ExprFunc::Sin: return "sin";
        case ExprFunc::Cos: return "cos";
    }
    return "?";
}

namespace expr_detail {

[[nodiscard]] inline std::string print_node(const ExprNode& n, int context);

/// Operator precedence used by both the parser and the printer:
/// additive 1, multiplicative 2, unary minus 3, power 4, primary 5.
[[nodiscard]] inline int precedence(ExprKind k) {
    switch (k) {
        case ExprKind::Add:
        case ExprKind::Sub: return 1;
        case ExprKind::Mul:
        case ExprKind::Div: return 2;
        case ExprKind::Neg: return 3;
        case ExprKind::Pow: return 4;
        default: return 5;
    }
}

[[nodiscard]] inline std::string print_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    // trim to shortest representation that round-trips
    for (int prec = 1; prec < 17; ++prec) {
        char s[40];
        std::snprintf(s, sizeof s, "%.*g", prec, v);
        if (std::strtod(s, nullptr) == v) return s;
    }
    return buf;
}

inline std::string print_node(const ExprNode& n, int context) {
    const int prec = precedence(n.kind);
    std::string body;
    switch (n.kind) {
        case ExprKind::Number: body = print_number(n.number); break;
        case ExprKind::Variable: body = n.axis == 0 ? "x" : n.axis == 1 ? "y" : "z"; break;
        case ExprKind::Parameter: body = n.name; break;
        case ExprKind::Add:
            body = print_node(*n.a, 1) + " + " + print_node(*n.b, 2);
            break;
        case ExprKind::Sub:
            body = print_node(*n.a, 1) + " - " + print_node(*n.b, 2);
            break;
        case ExprKind::Mul:
            body = print_node(*n.a, 2) + "*" + print_node(*n.b, 3);
            break;
        case ExprKind::Div:
            body = print_node(*n.a, 2) + "/" + print_node(*n.b, 3);
            break;
        case ExprKind::Neg: body = "-" + print_node(*n.a, 3); break;
        case ExprKind::Pow:
            body = print_node(*n.a, 5) + "^" + std::to_string(n.exponent);
            break;
        case ExprKind::Call:
            body = std::string(func_name(n.func)) + "(" + print_node(*n.a, 0) + ")";
            break;
    }
    return prec < context ? "(" + body + ")" : body;
}

}  // namespace expr_detail

/// Immutable expression handle (shared subtrees are fine).
class Expr {
public:
    Expr() = default;
    explicit Expr(ExprNodePtr root) : root_(std::move(root)) {}

    [[nodiscard]] bool empty() const { return root_ == nullptr; }
    [[nodiscard]] const ExprNode& node() const {
        if (!root_) throw std::logic_error("empty expression");
        return *root_;
    }
    [[nodiscard]] const ExprNodePtr& ptr() const { return root_; }

    /// Canonical text form; parsing it back yields a structurally identical
    /// tree.
    [[nodiscard]] std::string str() const {
        return root_ ? expr_detail::print_node(*root_, 0) : "";
    }

private:
    ExprNodePtr root_;
};

[[nodiscard]] inline bool structurally_equal(const ExprNode& a, const ExprNode& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case ExprKind::Number: return a.number == b.number;
        case ExprKind::Variable: return a.axis == b.axis;
        case ExprKind::Parameter: return a.name == b.name;
        case ExprKind::Call:
            return a.func == b.func && structurally_equal(*a.a, *b.a);
        case ExprKind::Pow:
            return a.exponent == b.exponent && structurally_equal(*a.a, *b.a);
        case ExprKind::Neg: return structurally_equal(*a.a, *b.a);
        default:
            return structurally_equal(*a.a, *b.a) && structurally_equal(*a.b, *b.b);
    }
}

[[nodiscard]] inline bool structurally_equal(const Expr& a, const Expr& b) {
    if (a.empty() || b.empty()) return a.empty() == b.empty();
    return structurally_equal(a.node(), b.node());
}

// ===========================================================================
// Parser
// ===========================================================================

namespace expr_detail {

enum class TokKind { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };

struct Token {
    TokKind kind = TokKind::End;
    std::size_t offset = 0;
    double number = 0.0;
    bool integral = false;  // number written as plain digits
    std::string text;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) { advance(); }

    [[nodiscard]] const Token& peek() const { return tok_; }
    Token take() {
        Token t = tok_;
        advance();
        return t;
    }

private:
    void advance() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_])))
            ++pos_;
        tok_.offset = pos_;
        tok_.text.clear();
        if (pos_ >= src_.size()) {
            tok_.kind = TokKind::End;
            return;
        }
        const char c = src_[pos_];
        switch (c) {
            case '+': tok_.kind = TokKind::Plus; ++pos_; return;
            case '-': tok_.kind = TokKind::Minus; ++pos_; return;
            case '*': tok_.kind = TokKind::Star; ++pos_; return;
            case '/': tok_.kind = TokKind::Slash; ++pos_; return;
            case '^': tok_.kind = TokKind::Caret; ++pos_; return;
            case '(': tok_.kind = TokKind::LParen; ++pos_; return;
            case ')': tok_.kind = TokKind::RParen; ++pos_; return;
            default: break;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            lex_number();
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
                ++pos_;
            tok_.kind = TokKind::Ident;
            tok_.text = std::string(src_.substr(start, pos_ - start));
            return;
        }
        throw ParseError(pos_, std::string("unexpected character '") + c + "'");
    }

    void lex_number() {
        const std::size_t start = pos_;
        bool integral = true;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
            ++pos_;
        if (pos_ < src_.size() && src_[pos_] == '.') {
            integral = false;
            ++pos_;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
                ++pos_;
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            integral = false;
            std::size_t mark = pos_++;
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
            if (pos_ >= src_.size() || !std::isdigit(static_cast<unsigned char>(src_[pos_])))
                throw ParseError(mark, "malformed exponent in numeric literal");
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
                ++pos_;
        }
        const std::string text(src_.substr(start, pos_ - start));
        if (text == ".") throw ParseError(start, "malformed numeric literal");
        // reject shapes strtod would silently truncate, e.g. "1..2"
        if (pos_ < src_.size() && src_[pos_] == '.')
            throw ParseError(pos_, "malformed numeric literal");
        char* end = nullptr;
        tok_.number = std::strtod(text.c_str(), &end);
        if (end != text.c_str() + text.size())
            throw ParseError(start, "malformed numeric literal");
        tok_.kind = TokKind::Number;
        tok_.integral = integral;
        tok_.text = text;
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    Token tok_;
};

class Parser {
public:
    Parser(std::string_view src, const std::set<std::string>& params)
        : lex_(src), params_(params) {
        for (const char* reserved : {"x", "y", "z", "exp", "ln", "sqrt", "sin", "cos"})
            if (params.count(reserved))
                throw std::invalid_argument(
                    "parameter name '" + std::string(reserved) + "' is reserved");
    }

    Expr parse() {
        ExprNodePtr e = additive();
        const Token& t = lex_.peek();
        if (t.kind != TokKind::End)
            throw ParseError(t.offset, "unexpected trailing input");
        return Expr(std::move(e));
    }

private:
    static ExprNodePtr make(ExprNode n) {
        return std::make_shared<const ExprNode>(std::move(n));
    }

    ExprNodePtr additive() {
        ExprNodePtr e = multiplicative();
        for (;;) {
            const TokKind k = lex_.peek().kind;
            if (k != TokKind::Plus && k != TokKind::Minus) return e;
            lex_.take();
            ExprNodePtr rhs = multiplicative();
            ExprNode n{k == TokKind::Plus ? ExprKind::Add : ExprKind::Sub};
            n.a = std::move(e);
            n.b = std::move(rhs);
            e = make(std::move(n));
        }
    }

    ExprNodePtr multiplicative() {
        ExprNodePtr e = unary();
        for (;;) {
            const TokKind k = lex_.peek().kind;
            if (k != TokKind::Star && k != TokKind::Slash) return e;
            lex_.take();
            ExprNodePtr rhs = unary();
            ExprNode n{k == TokKind::Star ? ExprKind::Mul : ExprKind::Div};
            n.a = std::move(e);
            n.b = std::move(rhs);
            e = make(std::move(n));
        }
    }

    ExprNodePtr unary() {
        if (lex_.peek().kind == TokKind::Minus) {
            lex_.take();
            ExprNode n{ExprKind::Neg};
            n.a = unary();
            return make(std::move(n));
        }
        return power();
    }

    ExprNodePtr power() {
        ExprNodePtr base = primary();
        if (lex_.peek().kind != TokKind::Caret) return base;
        lex_.take();
        bool negative = false;
        if (lex_.peek().kind == TokKind::Minus) {
            negative = true;
            lex_.take();
        }
        const Token t = lex_.peek();
        if (t.kind != TokKind::Number || !t.integral)
            throw ParseError(t.offset, "exponent must be an integer literal");
        lex_.take();
        ExprNode n{ExprKind::Pow};
        n.exponent = static_cast<int>(t.number) * (negative ? -1 : 1);
        n.a = std::move(base);
        return make(std::move(n));
    }

    ExprNodePtr primary() {
        const Token t = lex_.peek();
        switch (t.kind) {
            case TokKind::Number: {
                lex_.take();
                ExprNode n{ExprKind::Number};
                n.number = t.number;
                return make(std::move(n));
            }
            case TokKind::LParen: {
                lex_.take();
                ExprNodePtr e = additive();
                const Token& close = lex_.peek();
                if (close.kind != TokKind::RParen)
                    throw ParseError(close.offset, "expected ')'");
                lex_.take();
                return e;
            }
            case TokKind::Ident: return identifier();
            default:
                throw ParseError(t.offset, "expected operand");
        }
    }

    ExprNodePtr identifier() {
        const Token t = lex_.take();
        if (t.text == "x" || t.text == "y" || t.text == "z") {
            ExprNode n{ExprKind::Variable};
            n.axis = t.text == "x" ? 0 : t.text == "y" ? 1 : 2;
            return make(std::move(n));
        }
        static const std::pair<const char*, ExprFunc> funcs[] = {
            {"exp", ExprFunc::Exp}, {"ln", ExprFunc::Ln}, {"sqrt", ExprFunc::Sqrt},
            {"sin", ExprFunc::Sin}, {"cos", ExprFunc::Cos}};
        for (const auto& [fname, f] : funcs) {
            if (t.text != fname) continue;
            const Token& open = lex_.peek();
            if (open.kind != TokKind::LParen)
                throw ParseError(open.offset,
                                 "expected '(' after function '" + t.text + "'");
            lex_.take();
            ExprNode n{ExprKind::Call};
            n.func = f;
            n.a = additive();
            const Token& close = lex_.peek();
            if (close.kind != TokKind::RParen)
                throw ParseError(close.offset, "expected ')'");
            lex_.take();
            return make(std::move(n));
        }
        if (params_.count(t.text)) {
            ExprNode n{ExprKind::Parameter};
            n.name = t.text;
            return make(std::move(n));
        }
        throw ParseError(t.offset, "unknown identifier '" + t.text +
                                       "' (not a coordinate, function, or "
                                       "declared parameter)");
    }

    Lexer lex_;
    const std::set<std::string>& params_;
};

}  // namespace expr_detail

/// Parse an expression; identifiers other than x/y/z and the function names
/// must appear in `params`.
[[nodiscard]] inline Expr parse_expr(std::string_view text,
                                     const std::set<std::string>& params = {}) {
    expr_detail::Parser p(text, params);
    return p.parse();
}

// ===========================================================================
// Jet evaluation
// ===========================================================================

namespace expr_detail {

template <int K>
Jet<K> eval_node(const ExprNode& n, const Point& p, const Params& params) {
    auto guarded = [&](auto&& op) {
        try {
            Jet<K> r = op();
            if (!r.finite())
                throw DomainError(print_node(n, 0), p, "non-finite result");
            return r;
        } catch (const std::domain_error& e) {
            throw DomainError(print_node(n, 0), p, e.what());
        }
    };
    switch (n.kind) {
        case ExprKind::Number: return Jet<K>::constant(n.number);
        case ExprKind::Variable: return Jet<K>::variable(p[n.axis], n.axis);
        case ExprKind::Parameter: {
            auto it = params.find(n.name);
            if (it == params.end())
                throw EvalError("parameter '" + n.name + "' has no bound value");
            return Jet<K>::constant(it->second);
        }
        case ExprKind::Add:
            return eval_node<K>(*n.a, p, params) + eval_node<K>(*n.b, p, params);
        case ExprKind::Sub:
            return eval_node<K>(*n.a, p, params) - eval_node<K>(*n.b, p, params);
        case ExprKind::Mul:
            return eval_node<K>(*n.a, p, params) * eval_node<K>(*n.b, p, params);
        case ExprKind::Div:
            return guarded([&] {
                return eval_node<K>(*n.a, p, params) / eval_node<K>(*n.b, p, params);
            });
        case ExprKind::Neg: return -eval_node<K>(*n.a, p, params);
        case ExprKind::Pow:
            return guarded([&] { return pow(eval_node<K>(*n.a, p, params), n.exponent); });
        case ExprKind::Call:
            return guarded([&] {
                Jet<K> u = eval_node<K>(*n.a, p, params);
                switch (n.func) {
                    case ExprFunc::Exp: return exp(u);
                    case ExprFunc::Ln: return log(u);
                    case ExprFunc::Sqrt: return sqrt(u);
                    case ExprFunc::Sin: return sin(u);
                    case ExprFunc::Cos: return cos(u);
                }
                throw EvalError("unknown function");
            });
    }
    throw EvalError("malformed expression node");
}

}  // namespace expr_detail

/// Evaluate to an order-K jet at a point. Same point, same order, same
/// parameters -> bit-identical coefficients (purely sequential arithmetic).
template <int K>
[[nodiscard]] Jet<K> eval_jet(const Expr& e, const Point& p,
                              const Params& params = {}) {
    Jet<K> r = expr_detail::eval_node<K>(e.node(), p, params);
    if (!r.finite())
        throw DomainError(e.str(), p, "non-finite result");
    return r;
}

[[nodiscard]] inline double eval_value(const Expr& e, const Point& p,
                                       const Params& params = {}) {
    return eval_jet<0>(e, p, params).value();
}

}  // namespace bisub
