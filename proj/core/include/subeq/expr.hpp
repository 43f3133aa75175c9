#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <vector>

#include "subeq/errors.hpp"

namespace subeq {

/// Tiny frozen expression grammar over variables x1..x9:
///   expr   := term (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := unary
///   unary  := '-' unary | power
///   power  := atom ('^' unary)?            (right-associative)
///   atom   := number | ident | ident '(' expr (',' expr)* ')' | '(' expr ')'
/// '-x1^2' parses as -(x1^2). Constants: pi, e. Functions: sin cos tan exp
/// log sqrt abs atan (unary), min max (binary).
struct ExprNode;
using Expr = std::shared_ptr<const ExprNode>;

struct ExprNode {
    enum class Kind { Number, Var, BinOp, Neg, Call };
    Kind kind = Kind::Number;
    double number = 0.0;   // Number
    int var = 0;           // Var: 0-based index
    char op = 0;           // BinOp: + - * / ^
    std::string fn;        // Call
    std::vector<Expr> args;
};

/// Throws ConfigError with a byte offset on syntax errors, unknown
/// identifiers and arity mismatches.
Expr parse_expr(const std::string& text);

double eval_expr(const Expr& e, const Eigen::VectorXd& x);

/// Canonical fully parenthesized form; parse(print(e)) reproduces the tree.
std::string print_expr(const Expr& e);

/// Largest variable index used (1-based); 0 when constant.
int expr_max_var(const Expr& e);

}  // namespace subeq
