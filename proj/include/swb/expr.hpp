#pragma once

// Small expression DSL for scalar coefficient functions of one variable "x"
// with named parameters. Supports parsing, evaluation, exact symbolic
// differentiation and conservative simplification. Values are immutable
// after construction and safe to share across threads.

#include <map>
#include <memory>
#include <stdexcept>
#include <string>

namespace swb {

enum class NodeKind {
    Number,
    Variable,   // the distinguished variable "x"
    Parameter,  // named parameter, bound at evaluation time
    Negate,
    Add,
    Sub,
    Mul,
    Div,
    Pow,
    Function,
};

enum class FunKind { Sqrt, Exp, Ln, Sin, Cos, Abs };

struct ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

struct SourcePos {
    int line = 0;  // 1-based; 0 = synthesized node
    int column = 0;
};

struct ExprNode {
    NodeKind kind;
    double value = 0.0;        // Number
    std::string name;          // Parameter
    FunKind fun = FunKind::Sqrt;
    ExprPtr lhs;               // unary arg / left operand
    ExprPtr rhs;               // right operand
    SourcePos pos;
};

// Wrapper value type; an Expr always holds a valid tree.
class Expr {
public:
    Expr() = default;
    explicit Expr(ExprPtr root) : root_(std::move(root)) {}
    const ExprNode& node() const { return *root_; }
    ExprPtr ptr() const { return root_; }
    bool valid() const { return root_ != nullptr; }

private:
    ExprPtr root_;
};

using Bindings = std::map<std::string, double>;

struct ParseError : std::runtime_error {
    ParseError(const std::string& msg, int line, int column)
        : std::runtime_error(msg + " (line " + std::to_string(line) + ", column " +
                             std::to_string(column) + ")"),
          line(line),
          column(column) {}
    int line;
    int column;
};

struct EvalError : std::runtime_error {
    EvalError(const std::string& msg, std::string subexpr)
        : std::runtime_error(msg + " in subexpression: " + subexpr),
          subexpression(std::move(subexpr)) {}
    std::string subexpression;
};

// Construction helpers (all return simplification-free nodes).
Expr constant(double v);
Expr variable();
Expr parameter(const std::string& name);
Expr operator-(const Expr& a);
Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr pow(const Expr& base, const Expr& exponent);
Expr pow(const Expr& base, double exponent);
Expr apply_fun(FunKind f, const Expr& arg);
Expr sqrt(const Expr& a);

// Grammar: standard infix precedence (^ > unary - > *,/ > +,-), parentheses,
// decimal/integer literals, identifiers. Functions: sqrt exp ln sin cos abs.
Expr parse(const std::string& text);

// Renders in the same grammar; parse(render(e)) evaluates identically to e.
std::string render(const Expr& e);

// Evaluates with "x" = x and the given parameter bindings. Unbound
// parameters and domain violations raise EvalError naming the offending
// subexpression. '^' with an integer-valued constant exponent is defined for
// any base; otherwise the base must be positive.
double evaluate(const Expr& e, double x, const Bindings& params = {});

// Exact symbolic derivative of the given order (1 or 2), constant-folded.
Expr differentiate(const Expr& e, int order = 1);

// Constant folding and identity elimination; evaluation-equivalent.
Expr simplify(const Expr& e);

// Replaces parameters that appear in `params` with numeric constants.
Expr substitute_params(const Expr& e, const Bindings& params);

// Replaces the variable "x" with `inner` (function composition).
Expr substitute_var(const Expr& e, const Expr& inner);

bool is_constant(const Expr& e, double v);

}  // namespace swb
