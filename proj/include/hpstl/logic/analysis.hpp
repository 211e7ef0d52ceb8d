#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "hpstl/error.hpp"
#include "hpstl/logic/formula.hpp"

namespace hpstl::logic {

using VarSet = std::set<std::string>;

VarSet free_vars(const Formula& f);
VarSet free_vars(const ProbExpr& p);

inline VarSet free_vars(const ProbExpr& p) {
    return std::visit(
        [](const auto& x) -> VarSet {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Prob>) {
                VarSet fv = free_vars(*x.body);
                for (const auto& v : x.pathvars) fv.erase(v);
                return fv;
            } else if constexpr (std::is_same_v<T, Const>) {
                return {};
            } else {
                VarSet fv;
                for (const auto& a : x.args) fv.merge(free_vars(*a));
                return fv;
            }
        },
        p.node);
}

inline VarSet free_vars(const Formula& f) {
    return std::visit(
        [](const auto& x) -> VarSet {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, True>) {
                return {};
            } else if constexpr (std::is_same_v<T, Atom> || std::is_same_v<T, Embed>) {
                return {x.pathvar};
            } else if constexpr (std::is_same_v<T, Not>) {
                return free_vars(*x.child);
            } else if constexpr (std::is_same_v<T, And> || std::is_same_v<T, Until>) {
                VarSet fv = free_vars(*x.left);
                fv.merge(free_vars(*x.right));
                return fv;
            } else if constexpr (std::is_same_v<T, Compare>) {
                VarSet fv = free_vars(*x.left);
                fv.merge(free_vars(*x.right));
                return fv;
            } else {
                VarSet fv;
                for (const auto& e : x.exprs) fv.merge(free_vars(*e));
                return fv;
            }
        },
        f.node);
}

inline bool is_closed(const Formula& f) { return free_vars(f).empty(); }

// ---- structural queries ----

namespace detail {

template <typename FVisit, typename PVisit>
void walk(const Formula& f, FVisit&& on_formula, PVisit&& on_prob);

template <typename FVisit, typename PVisit>
void walk(const ProbExpr& p, FVisit&& on_formula, PVisit&& on_prob) {
    if (!on_prob(p)) return;
    if (const auto* pr = std::get_if<Prob>(&p.node)) {
        walk(*pr->body, on_formula, on_prob);
    } else if (const auto* ar = std::get_if<Arith>(&p.node)) {
        for (const auto& a : ar->args) walk(*a, on_formula, on_prob);
    }
}

// Pre-order traversal; a visitor returning false prunes that subtree.
template <typename FVisit, typename PVisit>
void walk(const Formula& f, FVisit&& on_formula, PVisit&& on_prob) {
    if (!on_formula(f)) return;
    std::visit(
        [&](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Embed>) {
                walk(*x.state, on_formula, on_prob);
            } else if constexpr (std::is_same_v<T, Not>) {
                walk(*x.child, on_formula, on_prob);
            } else if constexpr (std::is_same_v<T, And> || std::is_same_v<T, Until>) {
                walk(*x.left, on_formula, on_prob);
                walk(*x.right, on_formula, on_prob);
            } else if constexpr (std::is_same_v<T, Compare>) {
                walk(*x.left, on_formula, on_prob);
                walk(*x.right, on_formula, on_prob);
            } else if constexpr (std::is_same_v<T, InRegion>) {
                for (const auto& e : x.exprs) walk(*e, on_formula, on_prob);
            }
        },
        f.node);
}

} // namespace detail

// P operators inside embedded state formulas are not counted.
inline bool contains_prob(const Formula& f) {
    bool found = false;
    detail::walk(
        f, [&](const Formula& g) { return !found && !std::holds_alternative<Embed>(g.node); },
        [&](const ProbExpr& p) {
            if (std::holds_alternative<Prob>(p.node)) found = true;
            return !found;
        });
    return found;
}

inline bool contains_embed(const Formula& f) {
    bool found = false;
    detail::walk(
        f,
        [&](const Formula& g) {
            if (std::holds_alternative<Embed>(g.node)) found = true;
            return !found;
        },
        [&](const ProbExpr&) { return !found; });
    return found;
}

inline bool contains_equality(const Formula& f) {
    bool found = false;
    detail::walk(
        f,
        [&](const Formula& g) {
            if (const auto* c = std::get_if<Compare>(&g.node); c && c->op == CmpOp::Eq) found = true;
            return !found;
        },
        [&](const ProbExpr&) { return !found; });
    return found;
}

/// Value of a probability expression free of P operators.
inline std::optional<double> const_value(const ProbExpr& p) {
    if (const auto* c = std::get_if<Const>(&p.node)) return c->value;
    const auto* ar = std::get_if<Arith>(&p.node);
    if (ar == nullptr) return std::nullopt;
    std::vector<double> v;
    for (const auto& a : ar->args) {
        auto x = const_value(*a);
        if (!x) return std::nullopt;
        v.push_back(*x);
    }
    switch (ar->op) {
    case ArithOp::Add: return v[0] + v[1];
    case ArithOp::Sub: return v[0] - v[1];
    case ArithOp::Mul: return v[0] * v[1];
    case ArithOp::Div: return v[0] / v[1];
    case ArithOp::Abs: return std::fabs(v[0]);
    case ArithOp::Min: return *std::min_element(v.begin(), v.end());
    case ArithOp::Max: return *std::max_element(v.begin(), v.end());
    }
    return std::nullopt;
}

/// Evaluates an arithmetic expression given values for its P leaves.
template <typename LeafValue>
double eval_prob_expr(const ProbExpr& p, LeafValue&& leaf) {
    return std::visit(
        [&](const auto& x) -> double {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Prob>) {
                return leaf(p);
            } else if constexpr (std::is_same_v<T, Const>) {
                return x.value;
            } else {
                std::vector<double> v;
                for (const auto& a : x.args) v.push_back(eval_prob_expr(*a, leaf));
                switch (x.op) {
                case ArithOp::Add: return v[0] + v[1];
                case ArithOp::Sub: return v[0] - v[1];
                case ArithOp::Mul: return v[0] * v[1];
                case ArithOp::Div: return v[0] / v[1];
                case ArithOp::Abs: return std::fabs(v[0]);
                case ArithOp::Min: return *std::min_element(v.begin(), v.end());
                case ArithOp::Max: return *std::max_element(v.begin(), v.end());
                }
                return 0.0;
            }
        },
        p.node);
}

inline bool compare_values(double l, CmpOp op, double r) {
    switch (op) {
    case CmpOp::Lt: return l < r;
    case CmpOp::Gt: return l > r;
    case CmpOp::Le: return l <= r;
    case CmpOp::Ge: return l >= r;
    case CmpOp::Eq: return l == r;
    }
    return false;
}

/// Distinct P sub-expressions occurring directly in a state formula (not
/// inside another P), in order of first appearance.
inline std::vector<ProbPtr> prob_leaves(const Formula& state) {
    std::vector<ProbPtr> out;
    std::vector<const ProbExpr*> roots;
    if (const auto* c = std::get_if<Compare>(&state.node)) {
        roots = {c->left.get(), c->right.get()};
    } else if (const auto* r = std::get_if<InRegion>(&state.node)) {
        for (const auto& e : r->exprs) roots.push_back(e.get());
    }
    auto add = [&](const ProbExpr& p, auto&& self) -> void {
        if (std::holds_alternative<Prob>(p.node)) {
            for (const auto& q : out) {
                if (equal(*q, p)) return;
            }
            out.push_back(std::make_shared<const ProbExpr>(p));
        } else if (const auto* ar = std::get_if<Arith>(&p.node)) {
            for (const auto& a : ar->args) self(*a, self);
        }
    };
    for (const auto* r : roots) add(*r, add);
    return out;
}

// ---- classification ----

enum class AlgorithmKind { Simple, Joint, NestedState, NestedPath };

inline const char* to_string(AlgorithmKind k) {
    switch (k) {
    case AlgorithmKind::Simple: return "simple";
    case AlgorithmKind::Joint: return "joint";
    case AlgorithmKind::NestedState: return "nested-state";
    case AlgorithmKind::NestedPath: return "nested-path";
    }
    return "?";
}

/// P(...) compared against a constant.
struct SimpleShape {
    ProbPtr leaf;
    bool less = true; // claim is P < threshold (or <=)
    double threshold = 0.0;
};

inline std::optional<SimpleShape> match_simple(const Formula& state) {
    const auto* c = std::get_if<Compare>(&state.node);
    if (c == nullptr || c->op == CmpOp::Eq) return std::nullopt;
    const bool lt = c->op == CmpOp::Lt || c->op == CmpOp::Le;
    if (std::holds_alternative<Prob>(c->left->node)) {
        if (auto v = const_value(*c->right)) return SimpleShape{c->left, lt, *v};
    }
    if (std::holds_alternative<Prob>(c->right->node)) {
        if (auto v = const_value(*c->left)) return SimpleShape{c->right, !lt, *v};
    }
    return std::nullopt;
}

/// Outer P^{Pi1}(inner) compared against a constant, where inner is a
/// quantifier-free-leaved state formula over P^{Pi2} with Pi1, Pi2 disjoint.
struct NestedPathShape {
    SimpleShape outer;
    std::vector<std::string> outer_vars;
    FormulaPtr inner;
};

inline bool is_state_shape(const Formula& f) {
    return std::holds_alternative<Compare>(f.node) || std::holds_alternative<InRegion>(f.node);
}

inline std::optional<NestedPathShape> match_nested_path(const Formula& state) {
    auto outer = match_simple(state);
    if (!outer) return std::nullopt;
    const auto& pr = std::get<Prob>(outer->leaf->node);
    if (!is_state_shape(*pr.body)) return std::nullopt;
    const VarSet outer_vars(pr.pathvars.begin(), pr.pathvars.end());
    const auto leaves = prob_leaves(*pr.body);
    if (leaves.empty()) return std::nullopt;
    for (const auto& leaf : leaves) {
        const auto& inner = std::get<Prob>(leaf->node);
        if (contains_prob(*inner.body) || contains_embed(*inner.body)) return std::nullopt;
        for (const auto& v : inner.pathvars) {
            if (outer_vars.count(v)) return std::nullopt;
        }
    }
    return NestedPathShape{*outer, pr.pathvars, pr.body};
}

/// Distinct embedded state formulas, in order of first appearance.
inline std::vector<FormulaPtr> embedded_states(const Formula& f) {
    std::vector<FormulaPtr> out;
    detail::walk(
        f,
        [&](const Formula& g) {
            if (const auto* e = std::get_if<Embed>(&g.node)) {
                for (const auto& s : out) {
                    if (equal(*s, *e->state)) return false;
                }
                out.push_back(e->state);
                return false;
            }
            return true;
        },
        [](const ProbExpr&) { return true; });
    return out;
}

FormulaPtr substitute_embeds(const FormulaPtr& f, const std::vector<FormulaPtr>& states,
                             const std::vector<std::string>& labels);

inline ProbPtr substitute_embeds(const ProbPtr& p, const std::vector<FormulaPtr>& states,
                                 const std::vector<std::string>& labels) {
    if (const auto* pr = std::get_if<Prob>(&p->node)) {
        return prob(pr->pathvars, substitute_embeds(pr->body, states, labels), p->pos);
    }
    if (const auto* ar = std::get_if<Arith>(&p->node)) {
        std::vector<ProbPtr> args;
        for (const auto& a : ar->args) args.push_back(substitute_embeds(a, states, labels));
        return arith(ar->op, std::move(args), p->pos);
    }
    return p;
}

/// Replaces each Embed(states[i], pi) by the atom labels[i]^pi.
inline FormulaPtr substitute_embeds(const FormulaPtr& f, const std::vector<FormulaPtr>& states,
                                    const std::vector<std::string>& labels) {
    return std::visit(
        [&](const auto& x) -> FormulaPtr {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Embed>) {
                for (std::size_t i = 0; i < states.size(); ++i) {
                    if (equal(*states[i], *x.state)) return atom(labels[i], x.pathvar, f->pos);
                }
                throw UnsupportedShape("embedded state formula without a label");
            } else if constexpr (std::is_same_v<T, Not>) {
                return negate(substitute_embeds(x.child, states, labels), f->pos);
            } else if constexpr (std::is_same_v<T, And>) {
                return conj(substitute_embeds(x.left, states, labels), substitute_embeds(x.right, states, labels),
                            f->pos);
            } else if constexpr (std::is_same_v<T, Until>) {
                return until(substitute_embeds(x.left, states, labels), substitute_embeds(x.right, states, labels),
                             x.lo, x.hi, f->pos);
            } else if constexpr (std::is_same_v<T, Compare>) {
                return compare(substitute_embeds(x.left, states, labels), x.op,
                               substitute_embeds(x.right, states, labels), f->pos);
            } else if constexpr (std::is_same_v<T, InRegion>) {
                std::vector<ProbPtr> exprs;
                for (const auto& e : x.exprs) exprs.push_back(substitute_embeds(e, states, labels));
                return in_region(std::move(exprs), x.region, f->pos);
            } else {
                return f;
            }
        },
        f->node);
}

inline bool has_nested_prob(const Formula& f) {
    bool nested = false;
    detail::walk(
        f, [&](const Formula& g) { return !nested && !std::holds_alternative<Embed>(g.node); },
        [&](const ProbExpr& p) {
            if (const auto* pr = std::get_if<Prob>(&p.node)) {
                if (contains_prob(*pr->body)) nested = true;
                return false;
            }
            return !nested;
        });
    return nested;
}

/// Picks the verification algorithm for a closed state formula, or throws
/// UnsupportedShape.
inline AlgorithmKind classify(const Formula& f) {
    if (!is_state_shape(f)) throw UnsupportedShape("top-level formula must be a comparison or region membership");
    if (!is_closed(f)) {
        throw UnsupportedShape("formula has free path variable '" + *free_vars(f).begin() + "'");
    }
    if (contains_equality(f)) throw UnsupportedShape("'=' comparisons of probabilities cannot be decided statistically");
    if (contains_embed(f)) {
        for (const auto& s : embedded_states(f)) {
            if (contains_embed(*s) || has_nested_prob(*s)) {
                throw UnsupportedShape("embedded state formulas must not themselves be nested");
            }
            classify(*s);
        }
        if (has_nested_prob(f)) throw UnsupportedShape("nested P operators combined with embedded state formulas");
        return AlgorithmKind::NestedState;
    }
    if (has_nested_prob(f)) {
        if (!match_nested_path(f)) {
            throw UnsupportedShape("nested P operators must take the form P{..}(state) compared to a constant, "
                                   "with a single level of nesting and disjoint path variables");
        }
        return AlgorithmKind::NestedPath;
    }
    if (match_simple(f)) return AlgorithmKind::Simple;
    return AlgorithmKind::Joint;
}

} // namespace hpstl::logic
