#include "degensolve/expr.hpp"

#include <cctype>
#include <cmath>
#include <vector>

#include "degensolve/errors.hpp"

namespace degensolve {

struct Expression::Node {
    enum class Kind { constant, coordinate, unary, binary } kind;
    double value = 0.0;
    int axis = 0;
    char op = 0;                    // binary: + - * / ^
    std::string fn;                 // unary function name
    std::shared_ptr<const Node> a, b;

    double eval(const Eigen::VectorXd& x) const {
        switch (kind) {
            case Kind::constant: return value;
            case Kind::coordinate:
                if (axis >= x.size()) throw ParameterError("expression uses x" + std::to_string(axis + 1) +
                                                           " beyond the grid dimension");
                return x[axis];
            case Kind::unary: {
                const double v = a->eval(x);
                if (fn == "sin") return std::sin(v);
                if (fn == "cos") return std::cos(v);
                if (fn == "exp") return std::exp(v);
                if (fn == "sqrt") return std::sqrt(v);
                if (fn == "abs") return std::abs(v);
                if (fn == "log") return std::log(v);
                if (fn == "neg") return -v;
                throw ParameterError("expression: unknown function " + fn);
            }
            case Kind::binary: {
                const double l = a->eval(x), r = b->eval(x);
                switch (op) {
                    case '+': return l + r;
                    case '-': return l - r;
                    case '*': return l * r;
                    case '/': return l / r;
                    case '^': return std::pow(l, r);
                }
                throw ParameterError("expression: unknown operator");
            }
        }
        return 0.0;
    }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;

struct Parser {
    const std::string& s;
    std::size_t pos = 0;

    explicit Parser(const std::string& text) : s(text) {}

    void skip() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool eat(char c) {
        skip();
        if (pos < s.size() && s[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    char peek() {
        skip();
        return pos < s.size() ? s[pos] : '\0';
    }

    NodePtr make_const(double v) {
        auto n = std::make_shared<Expression::Node>();
        n->kind = Expression::Node::Kind::constant;
        n->value = v;
        return n;
    }
    NodePtr make_binary(char op, NodePtr a, NodePtr b) {
        auto n = std::make_shared<Expression::Node>();
        n->kind = Expression::Node::Kind::binary;
        n->op = op;
        n->a = std::move(a);
        n->b = std::move(b);
        return n;
    }
    NodePtr make_unary(std::string fn, NodePtr a) {
        auto n = std::make_shared<Expression::Node>();
        n->kind = Expression::Node::Kind::unary;
        n->fn = std::move(fn);
        n->a = std::move(a);
        return n;
    }

    NodePtr expr() {
        NodePtr n = term();
        while (true) {
            if (eat('+'))
                n = make_binary('+', n, term());
            else if (eat('-'))
                n = make_binary('-', n, term());
            else
                return n;
        }
    }
    NodePtr term() {
        NodePtr n = factor();
        while (true) {
            if (eat('*'))
                n = make_binary('*', n, factor());
            else if (eat('/'))
                n = make_binary('/', n, factor());
            else
                return n;
        }
    }
    NodePtr factor() {  // unary minus binds looser than the power
        if (eat('-')) return make_unary("neg", factor());
        if (eat('+')) return factor();
        return power();
    }
    NodePtr power() {  // right-associative, signed exponents allowed
        NodePtr base = primary();
        if (eat('^')) return make_binary('^', base, factor());
        return base;
    }
    NodePtr primary() {
        skip();
        if (eat('(')) {
            NodePtr n = expr();
            if (!eat(')')) throw ConfigError("expression: missing ')' at position " + std::to_string(pos));
            return n;
        }
        if (pos < s.size() && (std::isdigit(static_cast<unsigned char>(s[pos])) || s[pos] == '.')) {
            std::size_t used = 0;
            const double v = std::stod(s.substr(pos), &used);
            pos += used;
            return make_const(v);
        }
        if (pos < s.size() && std::isalpha(static_cast<unsigned char>(s[pos]))) {
            std::size_t e = pos;
            while (e < s.size() && (std::isalnum(static_cast<unsigned char>(s[e])) || s[e] == '_')) ++e;
            const std::string name = s.substr(pos, e - pos);
            pos = e;
            if (name == "pi") return make_const(std::acos(-1.0));
            if (name.size() == 2 && name[0] == 'x' && name[1] >= '1' && name[1] <= '3') {
                auto n = std::make_shared<Expression::Node>();
                n->kind = Expression::Node::Kind::coordinate;
                n->axis = name[1] - '1';
                return n;
            }
            if (eat('(')) {
                NodePtr arg = expr();
                if (!eat(')')) throw ConfigError("expression: missing ')' after " + name);
                if (name != "sin" && name != "cos" && name != "exp" && name != "sqrt" && name != "abs" &&
                    name != "log")
                    throw ConfigError("expression: unknown function '" + name + "'");
                return make_unary(name, arg);
            }
            throw ConfigError("expression: unknown symbol '" + name + "'");
        }
        throw ConfigError("expression: parse error at position " + std::to_string(pos));
    }
};

}  // namespace

Expression Expression::parse(const std::string& text) {
    Parser p(text);
    Expression e;
    e.root_ = p.expr();
    p.skip();
    if (p.pos != text.size()) throw ConfigError("expression: trailing input at position " + std::to_string(p.pos));
    e.text_ = text;
    return e;
}

double Expression::operator()(const Eigen::VectorXd& x) const {
    if (!root_) throw ParameterError("expression: empty");
    return root_->eval(x);
}

}  // namespace degensolve
