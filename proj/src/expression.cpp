#include "n1ma/expression.hpp"

#include "n1ma/error.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>

namespace n1ma {

class ExpressionParser {
public:
    ExpressionParser(Expression& out, std::string_view text, int n_vars) : out_(out), s_(text), n_vars_(n_vars) {}

    int parse() {
        const int root = expr();
        skip_space();
        if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        return root;
    }

private:
    using Op = Expression::Op;

    [[noreturn]] void fail(const std::string& what) const {
        throw ConfigError("parse_expression", "column " + std::to_string(pos_ + 1) + ": " + what + " in \"" +
                                                  std::string(s_) + "\"");
    }

    void skip_space() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_space();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    int node(Op op, int lhs = -1, int rhs = -1, double value = 0.0, int var = 0) {
        out_.nodes_.push_back({op, value, var, lhs, rhs});
        return static_cast<int>(out_.nodes_.size()) - 1;
    }

    int expr() {
        int lhs = term();
        for (;;) {
            if (accept('+')) {
                lhs = node(Op::Add, lhs, term());
            } else if (accept('-')) {
                lhs = node(Op::Sub, lhs, term());
            } else {
                return lhs;
            }
        }
    }

    int term() {
        int lhs = unary();
        for (;;) {
            if (accept('*')) {
                lhs = node(Op::Mul, lhs, unary());
            } else if (accept('/')) {
                lhs = node(Op::Div, lhs, unary());
            } else {
                return lhs;
            }
        }
    }

    int unary() {
        if (accept('-')) return node(Op::Neg, unary());
        if (accept('+')) return unary();
        return power();
    }

    int power() {
        const int base = primary();
        if (accept('^')) return node(Op::Pow, base, unary());
        return base;
    }

    int primary() {
        skip_space();
        if (pos_ >= s_.size()) fail("unexpected end of expression");
        const char c = s_[pos_];
        if (accept('(')) {
            const int inner = expr();
            if (!accept(')')) fail("expected ')'");
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            double v = 0.0;
            const auto [end, ec] = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), v);
            if (ec != std::errc()) fail("malformed number");
            pos_ = static_cast<std::size_t>(end - s_.data());
            return node(Op::Const, -1, -1, v);
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            const std::size_t start = pos_;
            while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            const std::string id(s_.substr(start, pos_ - start));
            if (id == "pi") return node(Op::Const, -1, -1, std::numbers::pi);
            if (id == "e") return node(Op::Const, -1, -1, std::numbers::e);
            if (id.size() > 1 && id[0] == 'x' &&
                id.find_first_not_of("0123456789", 1) == std::string::npos) {
                const int k = std::stoi(id.substr(1));
                if (k < 1 || k > n_vars_) fail("variable " + id + " outside x1..x" + std::to_string(n_vars_));
                return node(Op::Var, -1, -1, 0.0, k - 1);
            }
            static const std::pair<const char*, Op> functions[] = {{"sin", Op::Sin},   {"cos", Op::Cos},
                                                                   {"tan", Op::Tan},   {"exp", Op::Exp},
                                                                   {"log", Op::Log},   {"sqrt", Op::Sqrt},
                                                                   {"abs", Op::Abs}};
            for (const auto& [name, op] : functions) {
                if (id == name) {
                    if (!accept('(')) fail("expected '(' after " + id);
                    const int arg = expr();
                    if (!accept(')')) fail("expected ')'");
                    return node(op, arg);
                }
            }
            pos_ = start;
            fail("unknown identifier '" + id + "'");
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }

    Expression& out_;
    std::string_view s_;
    int n_vars_;
    std::size_t pos_ = 0;
};

Expression Expression::parse(std::string_view text, int n_vars) {
    Expression e;
    e.text_ = std::string(text);
    ExpressionParser p(e, e.text_, n_vars);
    e.root_ = p.parse();
    return e;
}

double Expression::operator()(std::span<const double> x) const { return eval(root_, x); }

double Expression::eval(int i, std::span<const double> x) const {
    const Node& n = nodes_[static_cast<std::size_t>(i)];
    switch (n.op) {
        case Op::Const: return n.value;
        case Op::Var: return x[static_cast<std::size_t>(n.var)];
        case Op::Add: return eval(n.lhs, x) + eval(n.rhs, x);
        case Op::Sub: return eval(n.lhs, x) - eval(n.rhs, x);
        case Op::Mul: return eval(n.lhs, x) * eval(n.rhs, x);
        case Op::Div: return eval(n.lhs, x) / eval(n.rhs, x);
        case Op::Pow: return std::pow(eval(n.lhs, x), eval(n.rhs, x));
        case Op::Neg: return -eval(n.lhs, x);
        case Op::Sin: return std::sin(eval(n.lhs, x));
        case Op::Cos: return std::cos(eval(n.lhs, x));
        case Op::Tan: return std::tan(eval(n.lhs, x));
        case Op::Exp: return std::exp(eval(n.lhs, x));
        case Op::Log: return std::log(eval(n.lhs, x));
        case Op::Sqrt: return std::sqrt(eval(n.lhs, x));
        case Op::Abs: return std::abs(eval(n.lhs, x));
    }
    return 0.0;
}

}  // namespace n1ma
