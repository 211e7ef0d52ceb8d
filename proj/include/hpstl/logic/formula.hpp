#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <type_traits>
#include <string>
#include <variant>
#include <vector>

namespace hpstl::logic {

struct Formula;
struct ProbExpr;
using FormulaPtr = std::shared_ptr<const Formula>;
using ProbPtr = std::shared_ptr<const ProbExpr>;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class CmpOp { Lt, Gt, Eq, Le, Ge };
enum class ArithOp { Add, Sub, Mul, Div, Abs, Min, Max };

struct SourcePos {
    std::size_t line = 0;
    std::size_t column = 0;
};

// ---- formulas (path formulas and, when closed, state formulas) ----

struct True {};

// a^pi
struct Atom {
    std::string label;
    std::string pathvar;
};

// Phi^pi: a closed formula evaluated on the state path pi visits.
struct Embed {
    FormulaPtr state;
    std::string pathvar;
};

struct Not {
    FormulaPtr child;
};

struct And {
    FormulaPtr left;
    FormulaPtr right;
};

// left U_[lo,hi] right; hi may be kInfinity.
struct Until {
    FormulaPtr left;
    FormulaPtr right;
    double lo = 0.0;
    double hi = kInfinity;
};

struct Compare {
    ProbPtr left;
    CmpOp op = CmpOp::Lt;
    ProbPtr right;
};

// (p_1, ..., p_n) in D, with D named in the model configuration.
struct InRegion {
    std::vector<ProbPtr> exprs;
    std::string region;
};

struct Formula {
    std::variant<True, Atom, Embed, Not, And, Until, Compare, InRegion> node;
    SourcePos pos{};
};

// ---- probability expressions ----

// P^{pathvars}(body)
struct Prob {
    std::vector<std::string> pathvars;
    FormulaPtr body;
};

struct Const {
    double value = 0.0;
};

struct Arith {
    ArithOp op = ArithOp::Add;
    std::vector<ProbPtr> args;
};

struct ProbExpr {
    std::variant<Prob, Const, Arith> node;
    SourcePos pos{};
};

// ---- builders ----

inline FormulaPtr make(Formula f) { return std::make_shared<const Formula>(std::move(f)); }
inline ProbPtr make(ProbExpr p) { return std::make_shared<const ProbExpr>(std::move(p)); }

inline FormulaPtr top(SourcePos pos = {}) { return make(Formula{True{}, pos}); }
inline FormulaPtr atom(std::string label, std::string pathvar, SourcePos pos = {}) {
    return make(Formula{Atom{std::move(label), std::move(pathvar)}, pos});
}
inline FormulaPtr embed(FormulaPtr state, std::string pathvar, SourcePos pos = {}) {
    return make(Formula{Embed{std::move(state), std::move(pathvar)}, pos});
}
inline FormulaPtr negate(FormulaPtr f, SourcePos pos = {}) { return make(Formula{Not{std::move(f)}, pos}); }
inline FormulaPtr conj(FormulaPtr l, FormulaPtr r, SourcePos pos = {}) {
    return make(Formula{And{std::move(l), std::move(r)}, pos});
}
inline FormulaPtr until(FormulaPtr l, FormulaPtr r, double lo, double hi, SourcePos pos = {}) {
    return make(Formula{Until{std::move(l), std::move(r), lo, hi}, pos});
}
inline FormulaPtr compare(ProbPtr l, CmpOp op, ProbPtr r, SourcePos pos = {}) {
    return make(Formula{Compare{std::move(l), op, std::move(r)}, pos});
}
inline FormulaPtr in_region(std::vector<ProbPtr> exprs, std::string region, SourcePos pos = {}) {
    return make(Formula{InRegion{std::move(exprs), std::move(region)}, pos});
}

// Derived operators, desugared into the core forms.
inline FormulaPtr bottom(SourcePos pos = {}) { return negate(top(pos), pos); }
inline FormulaPtr disj(FormulaPtr l, FormulaPtr r, SourcePos pos = {}) {
    return negate(conj(negate(std::move(l), pos), negate(std::move(r), pos), pos), pos);
}
inline FormulaPtr implies(FormulaPtr l, FormulaPtr r, SourcePos pos = {}) {
    return disj(negate(std::move(l), pos), std::move(r), pos);
}
inline FormulaPtr eventually(double lo, double hi, FormulaPtr f, SourcePos pos = {}) {
    return until(top(pos), std::move(f), lo, hi, pos);
}
inline FormulaPtr globally(double lo, double hi, FormulaPtr f, SourcePos pos = {}) {
    return negate(eventually(lo, hi, negate(std::move(f), pos), pos), pos);
}

inline ProbPtr prob(std::vector<std::string> pathvars, FormulaPtr body, SourcePos pos = {}) {
    return make(ProbExpr{Prob{std::move(pathvars), std::move(body)}, pos});
}
inline ProbPtr constant(double v, SourcePos pos = {}) { return make(ProbExpr{Const{v}, pos}); }
inline ProbPtr arith(ArithOp op, std::vector<ProbPtr> args, SourcePos pos = {}) {
    return make(ProbExpr{Arith{op, std::move(args)}, pos});
}

// ---- structural equality (positions ignored) ----

bool equal(const Formula& a, const Formula& b);
bool equal(const ProbExpr& a, const ProbExpr& b);

namespace detail {

template <typename T>
bool equal_ptr(const std::shared_ptr<const T>& a, const std::shared_ptr<const T>& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    return equal(*a, *b);
}

inline bool same_number(double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); }

} // namespace detail

inline bool equal(const Formula& a, const Formula& b) {
    if (a.node.index() != b.node.index()) return false;
    return std::visit(
        [&](const auto& x) -> bool {
            using T = std::decay_t<decltype(x)>;
            const auto& y = std::get<T>(b.node);
            if constexpr (std::is_same_v<T, True>) {
                return true;
            } else if constexpr (std::is_same_v<T, Atom>) {
                return x.label == y.label && x.pathvar == y.pathvar;
            } else if constexpr (std::is_same_v<T, Embed>) {
                return x.pathvar == y.pathvar && detail::equal_ptr(x.state, y.state);
            } else if constexpr (std::is_same_v<T, Not>) {
                return detail::equal_ptr(x.child, y.child);
            } else if constexpr (std::is_same_v<T, And>) {
                return detail::equal_ptr(x.left, y.left) && detail::equal_ptr(x.right, y.right);
            } else if constexpr (std::is_same_v<T, Until>) {
                return detail::same_number(x.lo, y.lo) && detail::same_number(x.hi, y.hi) &&
                       detail::equal_ptr(x.left, y.left) && detail::equal_ptr(x.right, y.right);
            } else if constexpr (std::is_same_v<T, Compare>) {
                return x.op == y.op && detail::equal_ptr(x.left, y.left) && detail::equal_ptr(x.right, y.right);
            } else {
                if (x.region != y.region || x.exprs.size() != y.exprs.size()) return false;
                for (std::size_t i = 0; i < x.exprs.size(); ++i) {
                    if (!detail::equal_ptr(x.exprs[i], y.exprs[i])) return false;
                }
                return true;
            }
        },
        a.node);
}

inline bool equal(const ProbExpr& a, const ProbExpr& b) {
    if (a.node.index() != b.node.index()) return false;
    return std::visit(
        [&](const auto& x) -> bool {
            using T = std::decay_t<decltype(x)>;
            const auto& y = std::get<T>(b.node);
            if constexpr (std::is_same_v<T, Prob>) {
                return x.pathvars == y.pathvars && detail::equal_ptr(x.body, y.body);
            } else if constexpr (std::is_same_v<T, Const>) {
                return detail::same_number(x.value, y.value);
            } else {
                if (x.op != y.op || x.args.size() != y.args.size()) return false;
                for (std::size_t i = 0; i < x.args.size(); ++i) {
                    if (!detail::equal_ptr(x.args[i], y.args[i])) return false;
                }
                return true;
            }
        },
        a.node);
}

inline bool operator==(const Formula& a, const Formula& b) { return equal(a, b); }
inline bool operator==(const ProbExpr& a, const ProbExpr& b) { return equal(a, b); }

} // namespace hpstl::logic
