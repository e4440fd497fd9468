#pragma once

#include <cctype>
#include <memory>
#include <string>

#include "waldenfels/common.hpp"

namespace waldenfels {

/// Fixed-scope arithmetic over the space variables: numbers, x, y, the binary
/// operators + - * / ^, unary minus, and sin/cos/exp. No general scripting.
class Expression {
    struct Node {
        enum class Op { Num, VarX, VarY, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Exp };
        Op op = Op::Num;
        double value = 0;
        std::shared_ptr<Node> a, b;

        double eval(const Vec& x) const {
            switch (op) {
                case Op::Num: return value;
                case Op::VarX: return x[0];
                case Op::VarY: return x[1];
                case Op::Add: return a->eval(x) + b->eval(x);
                case Op::Sub: return a->eval(x) - b->eval(x);
                case Op::Mul: return a->eval(x) * b->eval(x);
                case Op::Div: return a->eval(x) / b->eval(x);
                case Op::Pow: return std::pow(a->eval(x), b->eval(x));
                case Op::Neg: return -a->eval(x);
                case Op::Sin: return std::sin(a->eval(x));
                case Op::Cos: return std::cos(a->eval(x));
                case Op::Exp: return std::exp(a->eval(x));
            }
            return 0;
        }
        bool uses_vars() const {
            if (op == Op::VarX || op == Op::VarY) return true;
            if (a && a->uses_vars()) return true;
            return b && b->uses_vars();
        }
    };

    struct Parser {
        const std::string& s;
        std::size_t pos = 0;

        [[noreturn]] void fail(const std::string& what) const {
            throw config_error("expression error at position " + std::to_string(pos) + " in '" +
                               s + "': " + what);
        }
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

        using P = std::shared_ptr<Node>;
        static P make(Node::Op op, P a = nullptr, P b = nullptr) {
            auto n = std::make_shared<Node>();
            n->op = op;
            n->a = std::move(a);
            n->b = std::move(b);
            return n;
        }

        P expr() {
            P lhs = term();
            for (;;) {
                if (eat('+'))
                    lhs = make(Node::Op::Add, lhs, term());
                else if (eat('-'))
                    lhs = make(Node::Op::Sub, lhs, term());
                else
                    return lhs;
            }
        }
        P term() {
            P lhs = factor();
            for (;;) {
                if (eat('*'))
                    lhs = make(Node::Op::Mul, lhs, factor());
                else if (eat('/'))
                    lhs = make(Node::Op::Div, lhs, factor());
                else
                    return lhs;
            }
        }
        P factor() {
            if (eat('-')) return make(Node::Op::Neg, factor());
            P base = primary();
            if (eat('^')) return make(Node::Op::Pow, base, factor());  // right-assoc
            return base;
        }
        P primary() {
            skip();
            if (pos >= s.size()) fail("unexpected end of expression");
            const char c = s[pos];
            if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
                std::size_t used = 0;
                double v = 0;
                try {
                    v = std::stod(s.substr(pos), &used);
                } catch (...) {
                    fail("malformed number");
                }
                pos += used;
                auto n = make(Node::Op::Num);
                n->value = v;
                return n;
            }
            if (c == '(') {
                ++pos;
                P inner = expr();
                if (!eat(')')) fail("missing ')'");
                return inner;
            }
            if (std::isalpha(static_cast<unsigned char>(c))) {
                std::size_t end = pos;
                while (end < s.size() && std::isalpha(static_cast<unsigned char>(s[end]))) ++end;
                const std::string name = s.substr(pos, end - pos);
                pos = end;
                if (name == "x") return make(Node::Op::VarX);
                if (name == "y") return make(Node::Op::VarY);
                Node::Op op;
                if (name == "sin")
                    op = Node::Op::Sin;
                else if (name == "cos")
                    op = Node::Op::Cos;
                else if (name == "exp")
                    op = Node::Op::Exp;
                else
                    fail("unknown identifier '" + name + "' (allowed: x, y, sin, cos, exp)");
                if (!eat('(')) fail("expected '(' after " + name);
                P inner = expr();
                if (!eat(')')) fail("missing ')'");
                return make(op, inner);
            }
            fail(std::string("unexpected character '") + c + "'");
        }
    };

    std::shared_ptr<Node> root_;
    std::string source_;

  public:
    Expression() = default;

    static Expression parse(const std::string& text) {
        Parser p{text};
        Expression e;
        e.root_ = p.expr();
        p.skip();
        if (p.pos != text.size()) p.fail("trailing input");
        e.source_ = text;
        return e;
    }

    double operator()(const Vec& x) const { return root_->eval(x); }
    bool valid() const { return static_cast<bool>(root_); }
    bool is_constant() const { return root_ && !root_->uses_vars(); }
    bool is_constant_zero() const { return is_constant() && (*this)(Vec{0, 0}) == 0.0; }
    const std::string& source() const { return source_; }
};

}  // namespace waldenfels
