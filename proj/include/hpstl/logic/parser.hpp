#pragma once

// Recursive-descent parser for the HyperPSTL text grammar:
//
//   state    := cmp | "(" probexpr {"," probexpr} ")" "in" IDENT
//   cmp      := probexpr OP probexpr              OP := < > <= >= =
//   probexpr := "P" "{" IDENT {"," IDENT} "}" "(" (path | state) ")"
//             | NUMBER | "abs" "(" probexpr ")" | ("min"|"max") "(" probexpr {"," probexpr} ")"
//             | probexpr ("+"|"-"|"*"|"/") probexpr | "(" probexpr ")"
//   path     := IDENT "@" IDENT | "true" | "false" | "!" path | path "&" path | path "|" path
//             | path "->" path | path "U" [intv] path | "F" [intv] path | "G" [intv] path
//             | "(" path ")" | "(" state ")" "@" IDENT
//   intv     := "[" NUMBER "," (NUMBER | "inf") "]"
//
// Path precedence, tightest first: ! F G, &, |, ->, U (right associative).
// `#` starts a comment that runs to the end of the line.

#include <cctype>
#include <charconv>
#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hpstl/error.hpp"
#include "hpstl/logic/analysis.hpp"
#include "hpstl/logic/formula.hpp"

namespace hpstl::logic {

namespace detail {

struct Token {
    enum class Kind { Ident, Number, Symbol, End };
    Kind kind = Kind::End;
    std::string text;
    double number = 0.0;
    SourcePos pos{};
};

inline std::vector<Token> tokenize(std::string_view text) {
    std::vector<Token> out;
    std::size_t line = 1;
    std::size_t col = 1;
    std::size_t i = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
            ++i;
        }
    };
    while (i < text.size()) {
        const char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        if (c == '#') {
            while (i < text.size() && text[i] != '\n') advance(1);
            continue;
        }
        Token tok;
        tok.pos = {line, col};
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_')) ++j;
            tok.kind = Token::Kind::Ident;
            tok.text = std::string(text.substr(i, j - i));
            advance(j - i);
        } else if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && i + 1 < text.size() &&
                                                                    std::isdigit(static_cast<unsigned char>(text[i + 1])))) {
            std::size_t j = i;
            while (j < text.size() && (std::isdigit(static_cast<unsigned char>(text[j])) || text[j] == '.')) ++j;
            if (j < text.size() && (text[j] == 'e' || text[j] == 'E')) {
                std::size_t k = j + 1;
                if (k < text.size() && (text[k] == '+' || text[k] == '-')) ++k;
                if (k < text.size() && std::isdigit(static_cast<unsigned char>(text[k]))) {
                    j = k;
                    while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
                }
            }
            tok.kind = Token::Kind::Number;
            tok.text = std::string(text.substr(i, j - i));
            const auto res = std::from_chars(tok.text.data(), tok.text.data() + tok.text.size(), tok.number);
            if (res.ec != std::errc() || res.ptr != tok.text.data() + tok.text.size()) {
                throw ParseError(line, col, "malformed number '" + tok.text + "'");
            }
            advance(j - i);
        } else {
            static constexpr std::string_view two[] = {"<=", ">=", "->"};
            tok.kind = Token::Kind::Symbol;
            for (auto s : two) {
                if (text.substr(i, 2) == s) tok.text = std::string(s);
            }
            if (tok.text.empty()) {
                static constexpr std::string_view singles = "@!&|()[]{},<>=+-*/";
                if (singles.find(c) == std::string_view::npos) {
                    throw ParseError(line, col, std::string("unexpected character '") + c + "'");
                }
                tok.text = std::string(1, c);
            }
            advance(tok.text.size());
        }
        out.push_back(std::move(tok));
    }
    Token end;
    end.kind = Token::Kind::End;
    end.pos = {line, col};
    out.push_back(end);
    return out;
}

class Parser {
public:
    explicit Parser(std::string_view text) : toks_(tokenize(text)) {}

    FormulaPtr parse_any() {
        const std::size_t start = pos_;
        try {
            auto f = parse_state();
            expect_end();
            return f;
        } catch (const ParseError& e) {
            remember(e);
        }
        pos_ = start;
        try {
            auto f = parse_path();
            expect_end();
            return f;
        } catch (const ParseError& e) {
            remember(e);
        }
        throw *furthest_;
    }

private:
    // ---- token helpers ----
    const Token& peek(std::size_t ahead = 0) const {
        return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
    }
    bool is_symbol(std::string_view s, std::size_t ahead = 0) const {
        const auto& t = peek(ahead);
        return t.kind == Token::Kind::Symbol && t.text == s;
    }
    bool is_ident(std::string_view s, std::size_t ahead = 0) const {
        const auto& t = peek(ahead);
        return t.kind == Token::Kind::Ident && t.text == s;
    }
    [[noreturn]] void fail(const std::string& what) const {
        const auto& t = peek();
        const std::string found = t.kind == Token::Kind::End ? "end of input" : "'" + t.text + "'";
        throw ParseError(t.pos.line, t.pos.column, what + ", found " + found);
    }
    const Token& take() { return toks_[pos_++]; }
    void expect_symbol(std::string_view s) {
        if (!is_symbol(s)) fail("expected '" + std::string(s) + "'");
        ++pos_;
    }
    std::string expect_ident(const char* what) {
        if (peek().kind != Token::Kind::Ident) fail(std::string("expected ") + what);
        return take().text;
    }
    void expect_end() {
        if (peek().kind != Token::Kind::End) fail("expected end of formula");
    }
    void remember(const ParseError& e) {
        if (!furthest_ || e.line() > furthest_->line() ||
            (e.line() == furthest_->line() && e.column() > furthest_->column())) {
            furthest_ = e;
        }
    }

    // Runs `alt` and rewinds on a parse error, keeping the error if it got furthest.
    template <typename F>
    auto attempt(F&& alt) -> std::optional<decltype(alt())> {
        const std::size_t start = pos_;
        try {
            return alt();
        } catch (const ParseError& e) {
            remember(e);
            pos_ = start;
            return std::nullopt;
        }
    }

    // ---- state formulas ----
    FormulaPtr parse_state() {
        const SourcePos pos = peek().pos;
        if (is_symbol("(")) {
            auto region = attempt([&] { return parse_region_membership(); });
            if (region) return *region;
        }
        auto lhs = parse_probexpr();
        CmpOp op;
        if (is_symbol("<")) {
            op = CmpOp::Lt;
        } else if (is_symbol(">")) {
            op = CmpOp::Gt;
        } else if (is_symbol("<=")) {
            op = CmpOp::Le;
        } else if (is_symbol(">=")) {
            op = CmpOp::Ge;
        } else if (is_symbol("=")) {
            op = CmpOp::Eq;
        } else {
            fail("expected comparison operator");
        }
        ++pos_;
        auto rhs = parse_probexpr();
        return compare(std::move(lhs), op, std::move(rhs), pos);
    }

    FormulaPtr parse_region_membership() {
        const SourcePos pos = peek().pos;
        expect_symbol("(");
        std::vector<ProbPtr> exprs{parse_probexpr()};
        while (is_symbol(",")) {
            ++pos_;
            exprs.push_back(parse_probexpr());
        }
        expect_symbol(")");
        if (!is_ident("in")) fail("expected 'in'");
        ++pos_;
        auto name = expect_ident("region name");
        return in_region(std::move(exprs), std::move(name), pos);
    }

    // ---- probability expressions ----
    ProbPtr parse_probexpr() {
        auto lhs = parse_term();
        while (is_symbol("+") || is_symbol("-")) {
            const SourcePos pos = peek().pos;
            const ArithOp op = take().text == "+" ? ArithOp::Add : ArithOp::Sub;
            lhs = arith(op, {std::move(lhs), parse_term()}, pos);
        }
        return lhs;
    }

    ProbPtr parse_term() {
        auto lhs = parse_factor();
        while (is_symbol("*") || is_symbol("/")) {
            const SourcePos pos = peek().pos;
            const ArithOp op = take().text == "*" ? ArithOp::Mul : ArithOp::Div;
            lhs = arith(op, {std::move(lhs), parse_factor()}, pos);
        }
        return lhs;
    }

    ProbPtr parse_factor() {
        const auto& t = peek();
        const SourcePos pos = t.pos;
        if (t.kind == Token::Kind::Number) {
            return constant(take().number, pos);
        }
        if (is_ident("P") && is_symbol("{", 1)) {
            pos_ += 2;
            std::vector<std::string> vars{expect_ident("path variable")};
            while (is_symbol(",")) {
                ++pos_;
                vars.push_back(expect_ident("path variable"));
            }
            expect_symbol("}");
            for (std::size_t i = 0; i < vars.size(); ++i) {
                for (std::size_t j = 0; j < i; ++j) {
                    if (vars[i] == vars[j]) {
                        throw ParseError(pos.line, pos.column, "path variable '" + vars[i] + "' quantified twice");
                    }
                }
            }
            expect_symbol("(");
            auto body = attempt([&] {
                auto s = parse_state();
                if (!is_symbol(")")) fail("expected ')'");
                return s;
            });
            if (!body) body = parse_path();
            expect_symbol(")");
            return prob(std::move(vars), *body, pos);
        }
        if (is_ident("abs") && is_symbol("(", 1)) {
            pos_ += 2;
            auto inner = parse_probexpr();
            expect_symbol(")");
            return arith(ArithOp::Abs, {std::move(inner)}, pos);
        }
        if ((is_ident("min") || is_ident("max")) && is_symbol("(", 1)) {
            const ArithOp op = take().text == "min" ? ArithOp::Min : ArithOp::Max;
            ++pos_;
            std::vector<ProbPtr> args{parse_probexpr()};
            while (is_symbol(",")) {
                ++pos_;
                args.push_back(parse_probexpr());
            }
            expect_symbol(")");
            if (args.size() < 2) throw ParseError(pos.line, pos.column, "min/max need at least two arguments");
            return arith(op, std::move(args), pos);
        }
        if (is_symbol("(")) {
            ++pos_;
            auto inner = parse_probexpr();
            expect_symbol(")");
            return inner;
        }
        fail("expected probability expression");
    }

    // ---- path formulas ----
    FormulaPtr parse_path() { return parse_until(); }

    FormulaPtr parse_until() {
        auto lhs = parse_implies();
        if (is_ident("U") && !is_symbol("@", 1)) {
            const SourcePos pos = take().pos;
            auto [lo, hi] = parse_optional_interval();
            auto rhs = parse_until();
            return until(std::move(lhs), std::move(rhs), lo, hi, pos);
        }
        return lhs;
    }

    FormulaPtr parse_implies() {
        auto lhs = parse_or();
        if (is_symbol("->")) {
            const SourcePos pos = take().pos;
            return implies(std::move(lhs), parse_implies(), pos);
        }
        return lhs;
    }

    FormulaPtr parse_or() {
        auto lhs = parse_and();
        while (is_symbol("|")) {
            const SourcePos pos = take().pos;
            lhs = disj(std::move(lhs), parse_and(), pos);
        }
        return lhs;
    }

    FormulaPtr parse_and() {
        auto lhs = parse_unary();
        while (is_symbol("&")) {
            const SourcePos pos = take().pos;
            lhs = conj(std::move(lhs), parse_unary(), pos);
        }
        return lhs;
    }

    FormulaPtr parse_unary() {
        const SourcePos pos = peek().pos;
        if (is_symbol("!")) {
            ++pos_;
            return negate(parse_unary(), pos);
        }
        if ((is_ident("F") || is_ident("G")) && !is_symbol("@", 1)) {
            const bool finally = take().text == "F";
            auto [lo, hi] = parse_optional_interval();
            auto body = parse_unary();
            return finally ? eventually(lo, hi, std::move(body), pos) : globally(lo, hi, std::move(body), pos);
        }
        return parse_primary();
    }

    FormulaPtr parse_primary() {
        const SourcePos pos = peek().pos;
        if (is_symbol("(")) {
            auto embedded = attempt([&] {
                expect_symbol("(");
                auto s = parse_state();
                expect_symbol(")");
                expect_symbol("@");
                auto var = expect_ident("path variable");
                return embed(std::move(s), std::move(var), pos);
            });
            if (embedded) return *embedded;
            expect_symbol("(");
            auto inner = parse_path();
            expect_symbol(")");
            return inner;
        }
        if (is_ident("true") && !is_symbol("@", 1)) {
            ++pos_;
            return top(pos);
        }
        if (is_ident("false") && !is_symbol("@", 1)) {
            ++pos_;
            return bottom(pos);
        }
        if (peek().kind == Token::Kind::Ident) {
            auto label = take().text;
            expect_symbol("@");
            auto var = expect_ident("path variable");
            return atom(std::move(label), std::move(var), pos);
        }
        fail("expected path formula");
    }

    std::pair<double, double> parse_optional_interval() {
        if (!is_symbol("[")) return {0.0, kInfinity};
        const SourcePos pos = take().pos;
        if (peek().kind != Token::Kind::Number) fail("expected interval lower bound");
        const double lo = take().number;
        expect_symbol(",");
        double hi;
        if (is_ident("inf")) {
            ++pos_;
            hi = kInfinity;
        } else if (peek().kind == Token::Kind::Number) {
            hi = take().number;
        } else {
            fail("expected interval upper bound or 'inf'");
        }
        expect_symbol("]");
        if (!(lo < hi)) {
            throw ParseError(pos.line, pos.column, "interval requires lower bound < upper bound");
        }
        return {lo, hi};
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    std::optional<ParseError> furthest_;
};

// Quantification must be non-trivial and embedded formulas closed.
inline void check_bindings(const Formula& f);

inline void check_bindings(const ProbExpr& p) {
    std::visit(
        [&](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Prob>) {
                const auto fv = free_vars(*x.body);
                for (const auto& v : x.pathvars) {
                    if (!fv.count(v)) {
                        throw UnboundPathVariable(std::to_string(p.pos.line) + ":" + std::to_string(p.pos.column) +
                                                  ": P quantifies '" + v + "' which does not occur free in its body");
                    }
                }
                check_bindings(*x.body);
            } else if constexpr (std::is_same_v<T, Arith>) {
                for (const auto& a : x.args) check_bindings(*a);
            }
        },
        p.node);
}

inline void check_bindings(const Formula& f) {
    std::visit(
        [&](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Embed>) {
                const auto fv = free_vars(*x.state);
                if (!fv.empty()) {
                    throw UnboundPathVariable(std::to_string(f.pos.line) + ":" + std::to_string(f.pos.column) +
                                              ": embedded state formula has unbound path variable '" +
                                              *fv.begin() + "'");
                }
                check_bindings(*x.state);
            } else if constexpr (std::is_same_v<T, Not>) {
                check_bindings(*x.child);
            } else if constexpr (std::is_same_v<T, And> || std::is_same_v<T, Until>) {
                check_bindings(*x.left);
                check_bindings(*x.right);
            } else if constexpr (std::is_same_v<T, Compare>) {
                check_bindings(*x.left);
                check_bindings(*x.right);
            } else if constexpr (std::is_same_v<T, InRegion>) {
                for (const auto& e : x.exprs) check_bindings(*e);
            }
        },
        f.node);
}

} // namespace detail

/// Parses a state or path formula; derived operators are desugared.
inline FormulaPtr parse_formula(std::string_view text) {
    detail::Parser parser(text);
    auto f = parser.parse_any();
    detail::check_bindings(*f);
    return f;
}

/// Parses a formula that must be closed (no free path variables).
inline FormulaPtr parse_state_formula(std::string_view text) {
    auto f = parse_formula(text);
    const auto fv = free_vars(*f);
    if (!fv.empty()) {
        throw UnboundPathVariable("path variable '" + *fv.begin() + "' is not bound by any probability operator");
    }
    return f;
}

} // namespace hpstl::logic
