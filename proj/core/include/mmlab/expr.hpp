#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mmlab {

// Compiled arithmetic expression over variables x1..xk.
//
// Grammar (lowest to highest precedence):
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('-' | '+') unary | power
//   power   := primary ('^' unary)?          right-associative
//   primary := number | 'pi' | 'e' | xK | fn '(' expr (',' expr)* ')' | '(' expr ')'
//   fn      := abs | exp | log | sqrt | min | max
//
// The parsed form is a postfix program; evaluation is pure and reentrant.
class Expression {
public:
    static Expression parse(std::string_view text, std::size_t arity);

    double operator()(std::span<const double> x) const;

    std::size_t arity() const { return arity_; }
    const std::string& text() const { return text_; }

    enum class Op : std::uint8_t { Const, Var, Neg, Add, Sub, Mul, Div, Pow, Abs, Exp, Log, Sqrt, Min, Max };
    struct Instr {
        Op op;
        std::uint32_t index = 0;
        double value = 0.0;
    };

private:
    Expression() = default;

    std::string text_;
    std::size_t arity_ = 0;
    std::size_t max_depth_ = 0;
    std::vector<Instr> program_;

    friend class ExprParser;
};

}  // namespace mmlab
