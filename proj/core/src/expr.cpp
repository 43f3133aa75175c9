#include "subeq/expr.hpp"

#include <cctype>
#include <cmath>
#include <map>
#include <sstream>

namespace subeq {

namespace {

struct Parser {
    const std::string& s;
    size_t pos = 0;

    explicit Parser(const std::string& text) : s(text) {}

    [[noreturn]] void fail(const std::string& what) const {
        throw ConfigError("expression error at byte " + std::to_string(pos) + ": " + what);
    }

    void skip_ws() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }

    bool eat(char c) {
        skip_ws();
        if (pos < s.size() && s[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos < s.size() ? s[pos] : '\0';
    }

    Expr make_number(double v) {
        auto n = std::make_shared<ExprNode>();
        n->kind = ExprNode::Kind::Number;
        n->number = v;
        return n;
    }

    Expr parse_expression() {
        Expr lhs = parse_term();
        while (true) {
            char c = peek();
            if (c != '+' && c != '-') break;
            ++pos;
            Expr rhs = parse_term();
            auto n = std::make_shared<ExprNode>();
            n->kind = ExprNode::Kind::BinOp;
            n->op = c;
            n->args = {lhs, rhs};
            lhs = n;
        }
        return lhs;
    }

    Expr parse_term() {
        Expr lhs = parse_unary();
        while (true) {
            char c = peek();
            if (c != '*' && c != '/') break;
            ++pos;
            Expr rhs = parse_unary();
            auto n = std::make_shared<ExprNode>();
            n->kind = ExprNode::Kind::BinOp;
            n->op = c;
            n->args = {lhs, rhs};
            lhs = n;
        }
        return lhs;
    }

    Expr parse_unary() {
        if (eat('-')) {
            auto n = std::make_shared<ExprNode>();
            n->kind = ExprNode::Kind::Neg;
            n->args = {parse_unary()};
            return n;
        }
        return parse_power();
    }

    Expr parse_power() {
        Expr base = parse_atom();
        if (eat('^')) {
            Expr exp = parse_unary();  // right-associative; unary minus allowed in exponent
            auto n = std::make_shared<ExprNode>();
            n->kind = ExprNode::Kind::BinOp;
            n->op = '^';
            n->args = {base, exp};
            return n;
        }
        return base;
    }

    Expr parse_atom() {
        skip_ws();
        if (pos >= s.size()) fail("unexpected end of input");
        char c = s[pos];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            size_t used = 0;
            double v;
            try {
                v = std::stod(s.substr(pos), &used);
            } catch (const std::exception&) {
                fail("bad number");
            }
            pos += used;
            return make_number(v);
        }
        if (c == '(') {
            ++pos;
            Expr e = parse_expression();
            if (!eat(')')) fail("expected ')'");
            return e;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            size_t start = pos;
            while (pos < s.size() &&
                   (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
                ++pos;
            std::string ident = s.substr(start, pos - start);
            if (peek() == '(') {
                ++pos;
                std::vector<Expr> args;
                args.push_back(parse_expression());
                while (eat(',')) args.push_back(parse_expression());
                if (!eat(')')) fail("expected ')' after arguments");
                static const std::map<std::string, int> arity = {
                    {"sin", 1}, {"cos", 1}, {"tan", 1}, {"exp", 1}, {"log", 1},
                    {"sqrt", 1}, {"abs", 1}, {"atan", 1}, {"min", 2}, {"max", 2}};
                auto it = arity.find(ident);
                if (it == arity.end()) fail("unknown function '" + ident + "'");
                if (int(args.size()) != it->second)
                    fail("function '" + ident + "' takes " + std::to_string(it->second) +
                         " argument(s)");
                auto n = std::make_shared<ExprNode>();
                n->kind = ExprNode::Kind::Call;
                n->fn = ident;
                n->args = std::move(args);
                return n;
            }
            if (ident == "pi") return make_number(3.14159265358979323846);
            if (ident == "e") return make_number(2.71828182845904523536);
            if (ident.size() >= 2 && ident[0] == 'x') {
                bool digits = true;
                for (size_t i = 1; i < ident.size(); ++i)
                    if (!std::isdigit(static_cast<unsigned char>(ident[i]))) digits = false;
                if (digits) {
                    int k = std::stoi(ident.substr(1));
                    if (k < 1 || k > 9) fail("variables are x1..x9");
                    auto n = std::make_shared<ExprNode>();
                    n->kind = ExprNode::Kind::Var;
                    n->var = k - 1;
                    return n;
                }
            }
            fail("unknown identifier '" + ident + "'");
        }
        fail(std::string("unexpected character '") + c + "'");
    }
};

}  // namespace

Expr parse_expr(const std::string& text) {
    Parser p(text);
    Expr e = p.parse_expression();
    p.skip_ws();
    if (p.pos != text.size()) p.fail("trailing input");
    return e;
}

double eval_expr(const Expr& e, const Eigen::VectorXd& x) {
    switch (e->kind) {
        case ExprNode::Kind::Number:
            return e->number;
        case ExprNode::Kind::Var:
            if (e->var >= x.size())
                throw ConfigError("expression uses x" + std::to_string(e->var + 1) +
                                  " but the point has dimension " + std::to_string(x.size()));
            return x[e->var];
        case ExprNode::Kind::Neg:
            return -eval_expr(e->args[0], x);
        case ExprNode::Kind::BinOp: {
            const double a = eval_expr(e->args[0], x);
            const double b = eval_expr(e->args[1], x);
            switch (e->op) {
                case '+': return a + b;
                case '-': return a - b;
                case '*': return a * b;
                case '/': return a / b;
                case '^': return std::pow(a, b);
            }
            throw InternalDefect("expr: bad operator");
        }
        case ExprNode::Kind::Call: {
            const double a = eval_expr(e->args[0], x);
            if (e->fn == "sin") return std::sin(a);
            if (e->fn == "cos") return std::cos(a);
            if (e->fn == "tan") return std::tan(a);
            if (e->fn == "exp") return std::exp(a);
            if (e->fn == "log") return std::log(a);
            if (e->fn == "sqrt") return std::sqrt(a);
            if (e->fn == "abs") return std::abs(a);
            if (e->fn == "atan") return std::atan(a);
            const double b = eval_expr(e->args[1], x);
            if (e->fn == "min") return std::min(a, b);
            if (e->fn == "max") return std::max(a, b);
            throw InternalDefect("expr: bad function");
        }
    }
    throw InternalDefect("expr: bad node");
}

std::string print_expr(const Expr& e) {
    std::ostringstream out;
    switch (e->kind) {
        case ExprNode::Kind::Number: {
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", e->number);
            out << buf;
            break;
        }
        case ExprNode::Kind::Var:
            out << "x" << (e->var + 1);
            break;
        case ExprNode::Kind::Neg:
            out << "(-" << print_expr(e->args[0]) << ")";
            break;
        case ExprNode::Kind::BinOp:
            out << "(" << print_expr(e->args[0]) << e->op << print_expr(e->args[1]) << ")";
            break;
        case ExprNode::Kind::Call:
            out << e->fn << "(" << print_expr(e->args[0]);
            for (size_t i = 1; i < e->args.size(); ++i) out << "," << print_expr(e->args[i]);
            out << ")";
            break;
    }
    return out.str();
}

int expr_max_var(const Expr& e) {
    int m = 0;
    if (e->kind == ExprNode::Kind::Var) m = e->var + 1;
    for (const auto& a : e->args) m = std::max(m, expr_max_var(a));
    return m;
}

}  // namespace subeq
