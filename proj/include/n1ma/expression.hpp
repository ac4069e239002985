#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace n1ma {

/// Arithmetic expression over x1..xn: + - * / ^, unary minus, parentheses,
/// sin cos tan exp log sqrt abs, and the constants pi and e. `^` is right
/// associative and binds tighter than unary minus (-2^2 = -4).
class Expression {
public:
    /// Throws ConfigError on a syntax error or a variable index above n_vars.
    static Expression parse(std::string_view text, int n_vars);

    [[nodiscard]] double operator()(std::span<const double> x) const;
    [[nodiscard]] const std::string& text() const noexcept { return text_; }

private:
    enum class Op { Const, Var, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Tan, Exp, Log, Sqrt, Abs };
    struct Node {
        Op op;
        double value = 0.0;
        int var = 0;
        int lhs = -1;
        int rhs = -1;
    };
    friend class ExpressionParser;

    [[nodiscard]] double eval(int node, std::span<const double> x) const;

    std::string text_;
    std::vector<Node> nodes_;
    int root_ = -1;
};

}  // namespace n1ma
