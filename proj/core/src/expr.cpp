#include "mmlab/expr.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>

#include "mmlab/error.hpp"

namespace mmlab {

class ExprParser {
public:
    ExprParser(std::string_view text, std::size_t arity) : text_(text), arity_(arity) {}

    Expression run() {
        Expression e;
        e.text_ = std::string(text_);
        e.arity_ = arity_;
        skip_ws();
        if (pos_ >= text_.size()) throw SyntaxError(ErrorKind::Syntax, "empty expression", pos_);
        parse_expr();
        skip_ws();
        if (pos_ < text_.size()) {
            throw SyntaxError(ErrorKind::Syntax, "unexpected '" + std::string(1, text_[pos_]) + "'", pos_);
        }
        e.program_ = std::move(program_);
        e.max_depth_ = max_depth_;
        return e;
    }

private:
    using Op = Expression::Op;

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) {
            if (pos_ >= text_.size()) {
                throw SyntaxError(ErrorKind::Syntax, std::string("expected '") + c + "' before end of input", pos_);
            }
            throw SyntaxError(ErrorKind::Syntax, std::string("expected '") + c + "'", pos_);
        }
    }

    void emit(Op op, std::uint32_t index = 0, double value = 0.0) {
        program_.push_back({op, index, value});
        switch (op) {
            case Op::Const:
            case Op::Var: ++depth_; break;
            case Op::Add: case Op::Sub: case Op::Mul: case Op::Div:
            case Op::Pow: case Op::Min: case Op::Max: --depth_; break;
            default: break;
        }
        max_depth_ = std::max(max_depth_, depth_);
    }

    void parse_expr() {
        parse_term();
        for (;;) {
            if (accept('+')) {
                parse_term();
                emit(Op::Add);
            } else if (accept('-')) {
                parse_term();
                emit(Op::Sub);
            } else {
                return;
            }
        }
    }

    void parse_term() {
        parse_unary();
        for (;;) {
            if (accept('*')) {
                parse_unary();
                emit(Op::Mul);
            } else if (accept('/')) {
                parse_unary();
                emit(Op::Div);
            } else {
                return;
            }
        }
    }

    void parse_unary() {
        if (accept('-')) {
            parse_unary();
            emit(Op::Neg);
            return;
        }
        if (accept('+')) {
            parse_unary();
            return;
        }
        parse_power();
    }

    void parse_power() {
        parse_primary();
        if (accept('^')) {
            parse_unary();
            emit(Op::Pow);
        }
    }

    void parse_primary() {
        skip_ws();
        if (pos_ >= text_.size()) throw SyntaxError(ErrorKind::Syntax, "unexpected end of input", pos_);
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            parse_expr();
            expect(')');
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            parse_number();
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            parse_identifier();
            return;
        }
        throw SyntaxError(ErrorKind::Syntax, "unexpected '" + std::string(1, c) + "'", pos_);
    }

    void parse_number() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) ++pos_;
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t p = pos_ + 1;
            if (p < text_.size() && (text_[p] == '+' || text_[p] == '-')) ++p;
            if (p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p]))) {
                pos_ = p;
                while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            }
        }
        double v = 0.0;
        auto res = std::from_chars(text_.data() + start, text_.data() + pos_, v);
        if (res.ec != std::errc{} || res.ptr != text_.data() + pos_) {
            throw SyntaxError(ErrorKind::Syntax, "malformed number", start);
        }
        emit(Op::Const, 0, v);
    }

    void parse_identifier() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
            ++pos_;
        }
        const std::string_view name = text_.substr(start, pos_ - start);

        if (name == "pi") return emit(Op::Const, 0, std::numbers::pi);
        if (name == "e") return emit(Op::Const, 0, std::numbers::e);

        if (name.size() >= 2 && name[0] == 'x' &&
            std::all_of(name.begin() + 1, name.end(), [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); })) {
            std::size_t k = 0;
            std::from_chars(name.data() + 1, name.data() + name.size(), k);
            if (k == 0 || k > arity_) {
                throw SyntaxError(ErrorKind::Arity,
                                  "variable " + std::string(name) + " exceeds arity " + std::to_string(arity_), start);
            }
            return emit(Op::Var, static_cast<std::uint32_t>(k - 1));
        }

        struct Fn {
            std::string_view name;
            Op op;
            int args;
        };
        static constexpr std::array<Fn, 6> fns{{{"abs", Op::Abs, 1},
                                                {"exp", Op::Exp, 1},
                                                {"log", Op::Log, 1},
                                                {"sqrt", Op::Sqrt, 1},
                                                {"min", Op::Min, 2},
                                                {"max", Op::Max, 2}}};
        const auto fn = std::find_if(fns.begin(), fns.end(), [&](const Fn& f) { return f.name == name; });
        if (fn == fns.end()) {
            throw SyntaxError(ErrorKind::UnknownIdentifier, "unknown identifier '" + std::string(name) + "'", start);
        }
        expect('(');
        int count = 0;
        if (!accept(')')) {
            do {
                parse_expr();
                ++count;
                // min/max fold left over any number of arguments >= 2
                if (fn->args == 2 && count >= 2) emit(fn->op);
            } while (accept(','));
            expect(')');
        }
        if ((fn->args == 1 && count != 1) || (fn->args == 2 && count < 2)) {
            throw SyntaxError(ErrorKind::Arity,
                              std::string(name) + " expects " + (fn->args == 1 ? "1 argument" : "at least 2 arguments"),
                              start);
        }
        if (fn->args == 1) emit(fn->op);
    }

    std::string_view text_;
    std::size_t arity_;
    std::size_t pos_ = 0;
    std::size_t depth_ = 0;
    std::size_t max_depth_ = 0;
    std::vector<Expression::Instr> program_;
};

Expression Expression::parse(std::string_view text, std::size_t arity) {
    return ExprParser(text, arity).run();
}

namespace {

double eval_program(const std::vector<Expression::Instr>& program, std::span<const double> x, double* stack) {
    using Op = Expression::Op;
    std::size_t sp = 0;
    for (const auto& ins : program) {
        switch (ins.op) {
            case Op::Const: stack[sp++] = ins.value; break;
            case Op::Var: stack[sp++] = x[ins.index]; break;
            case Op::Neg: stack[sp - 1] = -stack[sp - 1]; break;
            case Op::Add: --sp; stack[sp - 1] += stack[sp]; break;
            case Op::Sub: --sp; stack[sp - 1] -= stack[sp]; break;
            case Op::Mul: --sp; stack[sp - 1] *= stack[sp]; break;
            case Op::Div: --sp; stack[sp - 1] /= stack[sp]; break;
            case Op::Pow: --sp; stack[sp - 1] = std::pow(stack[sp - 1], stack[sp]); break;
            case Op::Abs: stack[sp - 1] = std::abs(stack[sp - 1]); break;
            case Op::Exp: stack[sp - 1] = std::exp(stack[sp - 1]); break;
            case Op::Log: stack[sp - 1] = std::log(stack[sp - 1]); break;
            case Op::Sqrt: stack[sp - 1] = std::sqrt(stack[sp - 1]); break;
            case Op::Min: --sp; stack[sp - 1] = std::min(stack[sp - 1], stack[sp]); break;
            case Op::Max: --sp; stack[sp - 1] = std::max(stack[sp - 1], stack[sp]); break;
        }
    }
    return stack[0];
}

}  // namespace

double Expression::operator()(std::span<const double> x) const {
    if (x.size() < arity_) {
        fail(ErrorKind::Arity, "expression '" + text_ + "' evaluated with " + std::to_string(x.size()) +
                                   " coordinates, needs " + std::to_string(arity_));
    }
    if (max_depth_ <= 32) {
        std::array<double, 32> stack;
        return eval_program(program_, x, stack.data());
    }
    std::vector<double> stack(max_depth_);
    return eval_program(program_, x, stack.data());
}

}  // namespace mmlab
