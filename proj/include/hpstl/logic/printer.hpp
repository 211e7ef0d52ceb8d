#pragma once

#include <charconv>
#include <cmath>
#include <string>
#include <type_traits>
#include <variant>

#include "hpstl/logic/formula.hpp"

namespace hpstl::logic {

/// Shortest decimal text that reads back to the same double; "inf" for infinity.
inline std::string format_number(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace detail {

inline const char* op_text(CmpOp op) {
    switch (op) {
    case CmpOp::Lt: return "<";
    case CmpOp::Gt: return ">";
    case CmpOp::Le: return "<=";
    case CmpOp::Ge: return ">=";
    case CmpOp::Eq: return "=";
    }
    return "?";
}

std::string print(const Formula& f, bool top);

inline std::string print(const ProbExpr& p) {
    return std::visit(
        [&](const auto& x) -> std::string {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Prob>) {
                std::string out = "P{";
                for (std::size_t i = 0; i < x.pathvars.size(); ++i) {
                    if (i) out += ",";
                    out += x.pathvars[i];
                }
                return out + "}(" + print(*x.body, true) + ")";
            } else if constexpr (std::is_same_v<T, Const>) {
                return format_number(x.value);
            } else {
                auto fn = [&](const char* name) {
                    std::string out = std::string(name) + "(";
                    for (std::size_t i = 0; i < x.args.size(); ++i) {
                        if (i) out += ", ";
                        out += print(*x.args[i]);
                    }
                    return out + ")";
                };
                switch (x.op) {
                case ArithOp::Abs: return fn("abs");
                case ArithOp::Min: return fn("min");
                case ArithOp::Max: return fn("max");
                case ArithOp::Add: return "(" + print(*x.args[0]) + " + " + print(*x.args[1]) + ")";
                case ArithOp::Sub: return "(" + print(*x.args[0]) + " - " + print(*x.args[1]) + ")";
                case ArithOp::Mul: return "(" + print(*x.args[0]) + " * " + print(*x.args[1]) + ")";
                case ArithOp::Div: return "(" + print(*x.args[0]) + " / " + print(*x.args[1]) + ")";
                }
                return "?";
            }
        },
        p.node);
}

inline std::string print(const Formula& f, bool top) {
    auto wrap = [&](std::string s) { return top ? s : "(" + s + ")"; };
    return std::visit(
        [&](const auto& x) -> std::string {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, True>) {
                return "true";
            } else if constexpr (std::is_same_v<T, Atom>) {
                return x.label + "@" + x.pathvar;
            } else if constexpr (std::is_same_v<T, Embed>) {
                return "(" + print(*x.state, true) + ")@" + x.pathvar;
            } else if constexpr (std::is_same_v<T, Not>) {
                return "!" + print(*x.child, false);
            } else if constexpr (std::is_same_v<T, And>) {
                return wrap(print(*x.left, false) + " & " + print(*x.right, false));
            } else if constexpr (std::is_same_v<T, Until>) {
                return wrap(print(*x.left, false) + " U[" + format_number(x.lo) + "," + format_number(x.hi) + "] " +
                            print(*x.right, false));
            } else if constexpr (std::is_same_v<T, Compare>) {
                return wrap(print(*x.left) + " " + op_text(x.op) + " " + print(*x.right));
            } else {
                std::string out = "(";
                for (std::size_t i = 0; i < x.exprs.size(); ++i) {
                    if (i) out += ", ";
                    out += print(*x.exprs[i]);
                }
                return out + ") in " + x.region;
            }
        },
        f.node);
}

} // namespace detail

/// Canonical text: fully parenthesized below the top level, core operators
/// only. Parsing the result yields a structurally equal formula.
inline std::string to_string(const Formula& f) { return detail::print(f, true); }
inline std::string to_string(const ProbExpr& p) { return detail::print(p); }

} // namespace hpstl::logic
