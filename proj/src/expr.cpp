#include "swb/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <vector>

namespace swb {

namespace {

ExprPtr make_node(ExprNode n) { return std::make_shared<const ExprNode>(std::move(n)); }

ExprPtr num(double v, SourcePos pos = {}) {
    ExprNode n;
    n.kind = NodeKind::Number;
    n.value = v;
    n.pos = pos;
    return make_node(std::move(n));
}

ExprPtr unary(NodeKind k, ExprPtr a, SourcePos pos = {}) {
    ExprNode n;
    n.kind = k;
    n.lhs = std::move(a);
    n.pos = pos;
    return make_node(std::move(n));
}

ExprPtr binary(NodeKind k, ExprPtr a, ExprPtr b, SourcePos pos = {}) {
    ExprNode n;
    n.kind = k;
    n.lhs = std::move(a);
    n.rhs = std::move(b);
    n.pos = pos;
    return make_node(std::move(n));
}

ExprPtr fun_node(FunKind f, ExprPtr a, SourcePos pos = {}) {
    ExprNode n;
    n.kind = NodeKind::Function;
    n.fun = f;
    n.lhs = std::move(a);
    n.pos = pos;
    return make_node(std::move(n));
}

const char* fun_name(FunKind f) {
    switch (f) {
        case FunKind::Sqrt: return "sqrt";
        case FunKind::Exp: return "exp";
        case FunKind::Ln: return "ln";
        case FunKind::Sin: return "sin";
        case FunKind::Cos: return "cos";
        case FunKind::Abs: return "abs";
    }
    return "?";
}

bool is_num(const ExprPtr& e) { return e->kind == NodeKind::Number; }
bool is_num(const ExprPtr& e, double v) { return is_num(e) && e->value == v; }

bool integral_value(double v) {
    return std::isfinite(v) && v == std::nearbyint(v) && std::fabs(v) < 1e15;
}

// ---------------------------------------------------------------- tokenizer

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };

struct Token {
    Tok kind;
    double value = 0.0;
    std::string text;
    int line = 1;
    int column = 1;
};

class Lexer {
public:
    explicit Lexer(const std::string& s) : s_(s) {}

    Token next() {
        skip_ws();
        Token t;
        t.line = line_;
        t.column = col_;
        if (pos_ >= s_.size()) {
            t.kind = Tok::End;
            return t;
        }
        char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            size_t start = pos_;
            while (pos_ < s_.size() &&
                   (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.'))
                advance();
            if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
                size_t mark = pos_;
                advance();
                if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) advance();
                if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
                    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
                        advance();
                } else {
                    pos_ = mark;  // 'e' was an identifier start, not an exponent
                    col_ = t.column + static_cast<int>(mark - start);
                }
            }
            t.kind = Tok::Number;
            t.text = s_.substr(start, pos_ - start);
            try {
                t.value = std::stod(t.text);
            } catch (const std::exception&) {
                throw ParseError("malformed number '" + t.text + "'", t.line, t.column);
            }
            return t;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t start = pos_;
            while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) ||
                                        s_[pos_] == '_'))
                advance();
            t.kind = Tok::Ident;
            t.text = s_.substr(start, pos_ - start);
            return t;
        }
        advance();
        switch (c) {
            case '+': t.kind = Tok::Plus; return t;
            case '-': t.kind = Tok::Minus; return t;
            case '*': t.kind = Tok::Star; return t;
            case '/': t.kind = Tok::Slash; return t;
            case '^': t.kind = Tok::Caret; return t;
            case '(': t.kind = Tok::LParen; return t;
            case ')': t.kind = Tok::RParen; return t;
            default:
                throw ParseError(std::string("unexpected character '") + c + "'", t.line,
                                 t.column);
        }
    }

private:
    void skip_ws() {
        while (pos_ < s_.size() &&
               std::isspace(static_cast<unsigned char>(s_[pos_]))) {
            if (s_[pos_] == '\n') {
                ++line_;
                col_ = 1;
                ++pos_;
            } else {
                advance();
            }
        }
    }
    void advance() {
        ++pos_;
        ++col_;
    }

    const std::string& s_;
    size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

// ------------------------------------------------------------------ parser

class Parser {
public:
    explicit Parser(const std::string& s) : lex_(s) { shift(); }

    ExprPtr parse_all() {
        ExprPtr e = parse_sum();
        if (cur_.kind != Tok::End)
            throw ParseError("unexpected token '" + token_text() + "'", cur_.line, cur_.column);
        return e;
    }

private:
    void shift() { cur_ = lex_.next(); }

    std::string token_text() const {
        switch (cur_.kind) {
            case Tok::Number: return cur_.text;
            case Tok::Ident: return cur_.text;
            case Tok::Plus: return "+";
            case Tok::Minus: return "-";
            case Tok::Star: return "*";
            case Tok::Slash: return "/";
            case Tok::Caret: return "^";
            case Tok::LParen: return "(";
            case Tok::RParen: return ")";
            case Tok::End: return "<end>";
        }
        return "?";
    }

    SourcePos here() const { return {cur_.line, cur_.column}; }

    ExprPtr parse_sum() {
        ExprPtr e = parse_term();
        while (cur_.kind == Tok::Plus || cur_.kind == Tok::Minus) {
            NodeKind k = cur_.kind == Tok::Plus ? NodeKind::Add : NodeKind::Sub;
            SourcePos pos = here();
            shift();
            e = binary(k, e, parse_term(), pos);
        }
        return e;
    }

    ExprPtr parse_term() {
        ExprPtr e = parse_factor();
        while (cur_.kind == Tok::Star || cur_.kind == Tok::Slash) {
            NodeKind k = cur_.kind == Tok::Star ? NodeKind::Mul : NodeKind::Div;
            SourcePos pos = here();
            shift();
            e = binary(k, e, parse_factor(), pos);
        }
        return e;
    }

    // unary minus binds weaker than '^'
    ExprPtr parse_factor() {
        if (cur_.kind == Tok::Minus) {
            SourcePos pos = here();
            shift();
            return unary(NodeKind::Negate, parse_factor(), pos);
        }
        return parse_power();
    }

    ExprPtr parse_power() {
        ExprPtr base = parse_atom();
        if (cur_.kind == Tok::Caret) {
            SourcePos pos = here();
            shift();
            return binary(NodeKind::Pow, base, parse_factor(), pos);  // right-assoc
        }
        return base;
    }

    ExprPtr parse_atom() {
        SourcePos pos = here();
        if (cur_.kind == Tok::Number) {
            double v = cur_.value;
            shift();
            return num(v, pos);
        }
        if (cur_.kind == Tok::LParen) {
            shift();
            ExprPtr e = parse_sum();
            if (cur_.kind != Tok::RParen)
                throw ParseError("expected ')'", cur_.line, cur_.column);
            shift();
            return e;
        }
        if (cur_.kind == Tok::Ident) {
            std::string name = cur_.text;
            shift();
            if (cur_.kind == Tok::LParen) {
                FunKind f;
                if (name == "sqrt") f = FunKind::Sqrt;
                else if (name == "exp") f = FunKind::Exp;
                else if (name == "ln") f = FunKind::Ln;
                else if (name == "sin") f = FunKind::Sin;
                else if (name == "cos") f = FunKind::Cos;
                else if (name == "abs") f = FunKind::Abs;
                else
                    throw ParseError("unknown function '" + name +
                                         "' (known: sqrt exp ln sin cos abs)",
                                     pos.line, pos.column);
                shift();
                ExprPtr arg = parse_sum();
                if (cur_.kind != Tok::RParen)
                    throw ParseError("expected ')'", cur_.line, cur_.column);
                shift();
                return fun_node(f, arg, pos);
            }
            if (name == "x") {
                ExprNode n;
                n.kind = NodeKind::Variable;
                n.pos = pos;
                return make_node(std::move(n));
            }
            ExprNode n;
            n.kind = NodeKind::Parameter;
            n.name = name;
            n.pos = pos;
            return make_node(std::move(n));
        }
        throw ParseError("expected a value, got '" + token_text() + "'", cur_.line, cur_.column);
    }

    Lexer lex_;
    Token cur_;
};

// ------------------------------------------------------------------ render

int precedence(NodeKind k) {
    switch (k) {
        case NodeKind::Add:
        case NodeKind::Sub: return 1;
        case NodeKind::Mul:
        case NodeKind::Div: return 2;
        case NodeKind::Negate: return 3;
        case NodeKind::Pow: return 4;
        default: return 5;  // atoms
    }
}

std::string render_number(double v) {
    if (std::signbit(v) && v == 0.0) v = 0.0;
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string render_node(const ExprPtr& e);

std::string render_child(const ExprPtr& child, int parent_prec, bool needs_parens_at_equal) {
    int p = precedence(child->kind);
    bool parens = p < parent_prec || (p == parent_prec && needs_parens_at_equal);
    std::string s = render_node(child);
    return parens ? "(" + s + ")" : s;
}

std::string render_node(const ExprPtr& e) {
    switch (e->kind) {
        case NodeKind::Number: {
            double v = e->value;
            if (v < 0 || (std::signbit(v) && v == 0.0)) return "(" + render_number(v) + ")";
            return render_number(v);
        }
        case NodeKind::Variable: return "x";
        case NodeKind::Parameter: return e->name;
        case NodeKind::Negate: return "-" + render_child(e->lhs, 3, false);
        case NodeKind::Add:
            return render_child(e->lhs, 1, false) + " + " + render_child(e->rhs, 1, true);
        case NodeKind::Sub:
            return render_child(e->lhs, 1, false) + " - " + render_child(e->rhs, 1, true);
        case NodeKind::Mul:
            return render_child(e->lhs, 2, false) + "*" + render_child(e->rhs, 2, true);
        case NodeKind::Div:
            return render_child(e->lhs, 2, false) + "/" + render_child(e->rhs, 2, true);
        case NodeKind::Pow:
            // exponent parenthesized unless atomic; base parenthesized unless atomic
            return render_child(e->lhs, 5, false) + "^" + render_child(e->rhs, 5, false);
        case NodeKind::Function:
            return std::string(fun_name(e->fun)) + "(" + render_node(e->lhs) + ")";
    }
    return "?";
}

// -------------------------------------------------------------- evaluation

double eval_node(const ExprPtr& e, double x, const Bindings& params);

[[noreturn]] void eval_fail(const ExprPtr& e, const std::string& msg) {
    throw EvalError(msg, render_node(e));
}

double eval_node(const ExprPtr& e, double x, const Bindings& params) {
    switch (e->kind) {
        case NodeKind::Number: return e->value;
        case NodeKind::Variable: return x;
        case NodeKind::Parameter: {
            auto it = params.find(e->name);
            if (it == params.end()) eval_fail(e, "unbound parameter '" + e->name + "'");
            return it->second;
        }
        case NodeKind::Negate: return -eval_node(e->lhs, x, params);
        case NodeKind::Add: return eval_node(e->lhs, x, params) + eval_node(e->rhs, x, params);
        case NodeKind::Sub: return eval_node(e->lhs, x, params) - eval_node(e->rhs, x, params);
        case NodeKind::Mul: return eval_node(e->lhs, x, params) * eval_node(e->rhs, x, params);
        case NodeKind::Div: {
            double a = eval_node(e->lhs, x, params);
            double b = eval_node(e->rhs, x, params);
            if (b == 0.0) eval_fail(e, "division by zero");
            return a / b;
        }
        case NodeKind::Pow: {
            double a = eval_node(e->lhs, x, params);
            double b = eval_node(e->rhs, x, params);
            if (integral_value(b)) {
                if (a == 0.0 && b < 0) eval_fail(e, "zero raised to a negative power");
                return std::pow(a, b);
            }
            if (a <= 0.0)
                eval_fail(e, "non-integer power of a non-positive base");
            return std::pow(a, b);
        }
        case NodeKind::Function: {
            double a = eval_node(e->lhs, x, params);
            switch (e->fun) {
                case FunKind::Sqrt:
                    if (a < 0.0) eval_fail(e, "square root of a negative value");
                    return std::sqrt(a);
                case FunKind::Exp: return std::exp(a);
                case FunKind::Ln:
                    if (a <= 0.0) eval_fail(e, "logarithm of a non-positive value");
                    return std::log(a);
                case FunKind::Sin: return std::sin(a);
                case FunKind::Cos: return std::cos(a);
                case FunKind::Abs: return std::fabs(a);
            }
            eval_fail(e, "unknown function");
        }
    }
    eval_fail(e, "unknown node kind");
}

// ------------------------------------------------------------ simplification

ExprPtr simp(const ExprPtr& e);

bool all_num(const ExprPtr& a, const ExprPtr& b) { return is_num(a) && is_num(b); }

ExprPtr simp(const ExprPtr& e) {
    switch (e->kind) {
        case NodeKind::Number:
        case NodeKind::Variable:
        case NodeKind::Parameter: return e;
        case NodeKind::Negate: {
            ExprPtr a = simp(e->lhs);
            if (is_num(a)) return num(-a->value, e->pos);
            if (a->kind == NodeKind::Negate) return a->lhs;
            return unary(NodeKind::Negate, a, e->pos);
        }
        case NodeKind::Add: {
            ExprPtr a = simp(e->lhs), b = simp(e->rhs);
            if (all_num(a, b)) return num(a->value + b->value, e->pos);
            if (is_num(a, 0.0)) return b;
            if (is_num(b, 0.0)) return a;
            return binary(NodeKind::Add, a, b, e->pos);
        }
        case NodeKind::Sub: {
            ExprPtr a = simp(e->lhs), b = simp(e->rhs);
            if (all_num(a, b)) return num(a->value - b->value, e->pos);
            if (is_num(b, 0.0)) return a;
            if (is_num(a, 0.0)) return simp(unary(NodeKind::Negate, b, e->pos));
            return binary(NodeKind::Sub, a, b, e->pos);
        }
        case NodeKind::Mul: {
            ExprPtr a = simp(e->lhs), b = simp(e->rhs);
            if (all_num(a, b)) return num(a->value * b->value, e->pos);
            if (is_num(a, 0.0) || is_num(b, 0.0)) return num(0.0, e->pos);
            if (is_num(a, 1.0)) return b;
            if (is_num(b, 1.0)) return a;
            if (is_num(a, -1.0)) return simp(unary(NodeKind::Negate, b, e->pos));
            if (is_num(b, -1.0)) return simp(unary(NodeKind::Negate, a, e->pos));
            // lift nested constant: (c*u)*k -> (c*k)*u
            if (is_num(b) && a->kind == NodeKind::Mul && is_num(a->lhs))
                return simp(binary(NodeKind::Mul, num(a->lhs->value * b->value), a->rhs, e->pos));
            if (is_num(a) && b->kind == NodeKind::Mul && is_num(b->lhs))
                return simp(binary(NodeKind::Mul, num(a->value * b->lhs->value), b->rhs, e->pos));
            if (is_num(b)) return binary(NodeKind::Mul, b, a, e->pos);  // constants left
            return binary(NodeKind::Mul, a, b, e->pos);
        }
        case NodeKind::Div: {
            ExprPtr a = simp(e->lhs), b = simp(e->rhs);
            if (all_num(a, b) && b->value != 0.0) return num(a->value / b->value, e->pos);
            if (is_num(b, 1.0)) return a;
            if (is_num(a, 0.0) && is_num(b) && b->value != 0.0) return num(0.0, e->pos);
            return binary(NodeKind::Div, a, b, e->pos);
        }
        case NodeKind::Pow: {
            ExprPtr a = simp(e->lhs), b = simp(e->rhs);
            if (all_num(a, b) && (integral_value(b->value) || a->value > 0.0)) {
                double v = std::pow(a->value, b->value);
                if (std::isfinite(v)) return num(v, e->pos);
            }
            if (is_num(b, 1.0)) return a;
            if (is_num(b, 0.0)) return num(1.0, e->pos);
            return binary(NodeKind::Pow, a, b, e->pos);
        }
        case NodeKind::Function: {
            ExprPtr a = simp(e->lhs);
            if (is_num(a) && std::isfinite(a->value)) {
                double v = a->value;
                double folded = std::numeric_limits<double>::quiet_NaN();
                switch (e->fun) {
                    case FunKind::Sqrt:
                        if (v >= 0.0) folded = std::sqrt(v);
                        break;
                    case FunKind::Exp: folded = std::exp(v); break;
                    case FunKind::Ln:
                        if (v > 0.0) folded = std::log(v);
                        break;
                    case FunKind::Sin: folded = std::sin(v); break;
                    case FunKind::Cos: folded = std::cos(v); break;
                    case FunKind::Abs: folded = std::fabs(v); break;
                }
                if (std::isfinite(folded)) return num(folded, e->pos);
            }
            return fun_node(e->fun, a, e->pos);
        }
    }
    return e;
}

// ---------------------------------------------------------- differentiation

ExprPtr diff(const ExprPtr& e);

ExprPtr diff(const ExprPtr& e) {
    switch (e->kind) {
        case NodeKind::Number:
        case NodeKind::Parameter: return num(0.0);
        case NodeKind::Variable: return num(1.0);
        case NodeKind::Negate: return unary(NodeKind::Negate, diff(e->lhs));
        case NodeKind::Add: return binary(NodeKind::Add, diff(e->lhs), diff(e->rhs));
        case NodeKind::Sub: return binary(NodeKind::Sub, diff(e->lhs), diff(e->rhs));
        case NodeKind::Mul:
            return binary(NodeKind::Add, binary(NodeKind::Mul, diff(e->lhs), e->rhs),
                          binary(NodeKind::Mul, e->lhs, diff(e->rhs)));
        case NodeKind::Div: {
            // (u/v)' = u'/v - u v'/v^2
            ExprPtr t1 = binary(NodeKind::Div, diff(e->lhs), e->rhs);
            ExprPtr t2 = binary(
                NodeKind::Div, binary(NodeKind::Mul, e->lhs, diff(e->rhs)),
                binary(NodeKind::Pow, e->rhs, num(2.0)));
            return binary(NodeKind::Sub, t1, t2);
        }
        case NodeKind::Pow: {
            const ExprPtr& u = e->lhs;
            const ExprPtr& v = e->rhs;
            if (is_num(v)) {
                // (u^c)' = c u^(c-1) u'
                ExprPtr p = binary(NodeKind::Pow, u, num(v->value - 1.0));
                return binary(NodeKind::Mul, num(v->value), binary(NodeKind::Mul, p, diff(u)));
            }
            // general: u^v (v' ln u + v u'/u); requires u > 0 at evaluation
            ExprPtr lnu = fun_node(FunKind::Ln, u);
            ExprPtr t1 = binary(NodeKind::Mul, diff(v), lnu);
            ExprPtr t2 = binary(NodeKind::Div, binary(NodeKind::Mul, v, diff(u)), u);
            return binary(NodeKind::Mul, e, binary(NodeKind::Add, t1, t2));
        }
        case NodeKind::Function: {
            const ExprPtr& u = e->lhs;
            ExprPtr du = diff(u);
            switch (e->fun) {
                case FunKind::Sqrt:
                    return binary(NodeKind::Div, du,
                                  binary(NodeKind::Mul, num(2.0), fun_node(FunKind::Sqrt, u)));
                case FunKind::Exp: return binary(NodeKind::Mul, e, du);
                case FunKind::Ln: return binary(NodeKind::Div, du, u);
                case FunKind::Sin:
                    return binary(NodeKind::Mul, fun_node(FunKind::Cos, u), du);
                case FunKind::Cos:
                    return unary(NodeKind::Negate,
                                 binary(NodeKind::Mul, fun_node(FunKind::Sin, u), du));
                case FunKind::Abs:
                    // |u|' = u/|u| * u'; the x = 0 point surfaces as a division
                    // by zero at evaluation time.
                    return binary(NodeKind::Mul,
                                  binary(NodeKind::Div, u, fun_node(FunKind::Abs, u)), du);
            }
        }
    }
    return num(0.0);
}

// ------------------------------------------------------------- substitution

ExprPtr subst_params(const ExprPtr& e, const Bindings& params) {
    switch (e->kind) {
        case NodeKind::Number:
        case NodeKind::Variable: return e;
        case NodeKind::Parameter: {
            auto it = params.find(e->name);
            if (it == params.end()) return e;
            return num(it->second, e->pos);
        }
        case NodeKind::Negate:
            return unary(NodeKind::Negate, subst_params(e->lhs, params), e->pos);
        case NodeKind::Function:
            return fun_node(e->fun, subst_params(e->lhs, params), e->pos);
        default:
            return binary(e->kind, subst_params(e->lhs, params), subst_params(e->rhs, params),
                          e->pos);
    }
}

ExprPtr subst_var(const ExprPtr& e, const ExprPtr& inner) {
    switch (e->kind) {
        case NodeKind::Number:
        case NodeKind::Parameter: return e;
        case NodeKind::Variable: return inner;
        case NodeKind::Negate:
            return unary(NodeKind::Negate, subst_var(e->lhs, inner), e->pos);
        case NodeKind::Function: return fun_node(e->fun, subst_var(e->lhs, inner), e->pos);
        default:
            return binary(e->kind, subst_var(e->lhs, inner), subst_var(e->rhs, inner), e->pos);
    }
}

}  // namespace

Expr constant(double v) { return Expr(num(v)); }

Expr variable() {
    ExprNode n;
    n.kind = NodeKind::Variable;
    return Expr(make_node(std::move(n)));
}

Expr parameter(const std::string& name) {
    ExprNode n;
    n.kind = NodeKind::Parameter;
    n.name = name;
    return Expr(make_node(std::move(n)));
}

Expr operator-(const Expr& a) { return Expr(unary(NodeKind::Negate, a.ptr())); }
Expr operator+(const Expr& a, const Expr& b) { return Expr(binary(NodeKind::Add, a.ptr(), b.ptr())); }
Expr operator-(const Expr& a, const Expr& b) { return Expr(binary(NodeKind::Sub, a.ptr(), b.ptr())); }
Expr operator*(const Expr& a, const Expr& b) { return Expr(binary(NodeKind::Mul, a.ptr(), b.ptr())); }
Expr operator/(const Expr& a, const Expr& b) { return Expr(binary(NodeKind::Div, a.ptr(), b.ptr())); }
Expr pow(const Expr& base, const Expr& exponent) {
    return Expr(binary(NodeKind::Pow, base.ptr(), exponent.ptr()));
}
Expr pow(const Expr& base, double exponent) { return pow(base, constant(exponent)); }
Expr apply_fun(FunKind f, const Expr& arg) { return Expr(fun_node(f, arg.ptr())); }
Expr sqrt(const Expr& a) { return apply_fun(FunKind::Sqrt, a); }

Expr parse(const std::string& text) { return Expr(Parser(text).parse_all()); }

std::string render(const Expr& e) { return render_node(e.ptr()); }

double evaluate(const Expr& e, double x, const Bindings& params) {
    return eval_node(e.ptr(), x, params);
}

Expr differentiate(const Expr& e, int order) {
    if (order < 1 || order > 2)
        throw std::invalid_argument("differentiate: order must be 1 or 2");
    ExprPtr d = simp(diff(e.ptr()));
    if (order == 2) d = simp(diff(d));
    return Expr(d);
}

Expr simplify(const Expr& e) { return Expr(simp(e.ptr())); }

Expr substitute_params(const Expr& e, const Bindings& params) {
    return Expr(subst_params(e.ptr(), params));
}

Expr substitute_var(const Expr& e, const Expr& inner) {
    return Expr(subst_var(e.ptr(), inner.ptr()));
}

bool is_constant(const Expr& e, double v) { return is_num(e.ptr(), v); }

}  // namespace swb
