#pragma once

// Closed-form scalar expressions in one variable `x`.
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('-' | '+') unary | power
//   power   := primary ('^' unary)?          right associative
//   primary := number | 'x' | 'pi' | 'e' | func '(' expr ')' | '(' expr ')'
//   func    := abs | cos | sin | exp | log
//
// Compiled once into an immutable tree; evaluation is thread-safe.

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <memory>
#include <numbers>
#include <string>
#include <string_view>
#include <utility>

#include "blowup/error.hpp"

namespace blowup {

class Expression {
public:
    explicit Expression(std::string source) : source_(std::move(source))
    {
        Parser parser{source_, 0};
        root_ = parser.parse_expr();
        parser.skip_space();
        if (parser.pos != source_.size())
            throw Error(ErrorCode::Parse, "unexpected '" + std::string(1, source_[parser.pos]) +
                                              "' at offset " + std::to_string(parser.pos) + " in \"" +
                                              source_ + "\"");
    }

    double operator()(double x) const { return eval(*root_, x); }

    const std::string& source() const noexcept { return source_; }

private:
    enum class Op { Constant, Variable, Add, Sub, Mul, Div, Pow, Neg, Abs, Cos, Sin, Exp, Log };

    struct Node {
        Op op;
        double value = 0.0;
        std::unique_ptr<const Node> lhs;
        std::unique_ptr<const Node> rhs;
    };
    using NodePtr = std::unique_ptr<const Node>;

    static NodePtr leaf(Op op, double value = 0.0)
    {
        return std::make_unique<const Node>(Node{op, value, nullptr, nullptr});
    }
    static NodePtr unary(Op op, NodePtr arg)
    {
        return std::make_unique<const Node>(Node{op, 0.0, std::move(arg), nullptr});
    }
    static NodePtr binary(Op op, NodePtr lhs, NodePtr rhs)
    {
        return std::make_unique<const Node>(Node{op, 0.0, std::move(lhs), std::move(rhs)});
    }

    struct Parser {
        std::string_view text;
        std::size_t pos;

        void skip_space()
        {
            while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos])))
                ++pos;
        }

        bool accept(char c)
        {
            skip_space();
            if (pos < text.size() && text[pos] == c) {
                ++pos;
                return true;
            }
            return false;
        }

        [[noreturn]] void fail(const std::string& what) const
        {
            throw Error(ErrorCode::Parse,
                        what + " at offset " + std::to_string(pos) + " in \"" + std::string(text) + "\"");
        }

        NodePtr parse_expr()
        {
            NodePtr lhs = parse_term();
            for (;;) {
                if (accept('+'))
                    lhs = binary(Op::Add, std::move(lhs), parse_term());
                else if (accept('-'))
                    lhs = binary(Op::Sub, std::move(lhs), parse_term());
                else
                    return lhs;
            }
        }

        NodePtr parse_term()
        {
            NodePtr lhs = parse_unary();
            for (;;) {
                if (accept('*'))
                    lhs = binary(Op::Mul, std::move(lhs), parse_unary());
                else if (accept('/'))
                    lhs = binary(Op::Div, std::move(lhs), parse_unary());
                else
                    return lhs;
            }
        }

        NodePtr parse_unary()
        {
            if (accept('-'))
                return unary(Op::Neg, parse_unary());
            if (accept('+'))
                return parse_unary();
            return parse_power();
        }

        NodePtr parse_power()
        {
            NodePtr base = parse_primary();
            if (accept('^'))
                return binary(Op::Pow, std::move(base), parse_unary());
            return base;
        }

        NodePtr parse_primary()
        {
            skip_space();
            if (pos >= text.size())
                fail("unexpected end of expression");
            if (accept('(')) {
                NodePtr inner = parse_expr();
                if (!accept(')'))
                    fail("expected ')'");
                return inner;
            }
            const char c = text[pos];
            if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
                const std::string rest(text.substr(pos));
                char* end = nullptr;
                const double value = std::strtod(rest.c_str(), &end);
                if (end == rest.c_str())
                    fail("malformed number");
                pos += static_cast<std::size_t>(end - rest.c_str());
                return leaf(Op::Constant, value);
            }
            if (std::isalpha(static_cast<unsigned char>(c))) {
                const std::size_t start = pos;
                while (pos < text.size() && std::isalnum(static_cast<unsigned char>(text[pos])))
                    ++pos;
                const std::string_view name = text.substr(start, pos - start);
                if (name == "x")
                    return leaf(Op::Variable);
                if (name == "pi")
                    return leaf(Op::Constant, std::numbers::pi);
                if (name == "e")
                    return leaf(Op::Constant, std::numbers::e);
                Op op;
                if (name == "abs")
                    op = Op::Abs;
                else if (name == "cos")
                    op = Op::Cos;
                else if (name == "sin")
                    op = Op::Sin;
                else if (name == "exp")
                    op = Op::Exp;
                else if (name == "log")
                    op = Op::Log;
                else {
                    pos = start;
                    fail("unknown identifier '" + std::string(name) + "'");
                }
                if (!accept('('))
                    fail("expected '(' after function name");
                NodePtr arg = parse_expr();
                if (!accept(')'))
                    fail("expected ')'");
                return unary(op, std::move(arg));
            }
            fail("unexpected character '" + std::string(1, c) + "'");
        }
    };

    static double eval(const Node& n, double x)
    {
        switch (n.op) {
        case Op::Constant: return n.value;
        case Op::Variable: return x;
        case Op::Add: return eval(*n.lhs, x) + eval(*n.rhs, x);
        case Op::Sub: return eval(*n.lhs, x) - eval(*n.rhs, x);
        case Op::Mul: return eval(*n.lhs, x) * eval(*n.rhs, x);
        case Op::Div: return eval(*n.lhs, x) / eval(*n.rhs, x);
        case Op::Pow: return std::pow(eval(*n.lhs, x), eval(*n.rhs, x));
        case Op::Neg: return -eval(*n.lhs, x);
        case Op::Abs: return std::abs(eval(*n.lhs, x));
        case Op::Cos: return std::cos(eval(*n.lhs, x));
        case Op::Sin: return std::sin(eval(*n.lhs, x));
        case Op::Exp: return std::exp(eval(*n.lhs, x));
        case Op::Log: return std::log(eval(*n.lhs, x));
        }
        return 0.0;
    }

    std::string source_;
    std::shared_ptr<const Node> root_;
};

} // namespace blowup
