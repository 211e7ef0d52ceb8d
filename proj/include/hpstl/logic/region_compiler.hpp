#pragma once

// Turns a state formula over P-leaves into an acceptance region D over the
// vector of leaf probabilities. Affine comparisons give halfspaces; abs, min
// and max expand into conjunctions or unions of halfspaces. Strict and
// non-strict comparisons compile to the same closed region.

#include <cmath>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hpstl/error.hpp"
#include "hpstl/logic/analysis.hpp"
#include "hpstl/logic/formula.hpp"
#include "hpstl/stats/region.hpp"

namespace hpstl::logic {

using RegionTable = std::map<std::string, stats::Region>;

struct CompiledRegion {
    std::vector<ProbPtr> leaves; // coordinate i of D is the probability of leaves[i]
    stats::Region region;
};

namespace detail {

// c . x + k
struct Affine {
    std::vector<double> c;
    double k = 0.0;

    Affine scaled(double s) const {
        Affine a{c, k * s};
        for (double& v : a.c) v *= s;
        return a;
    }
    Affine plus(const Affine& o) const {
        Affine a{c, k + o.k};
        for (std::size_t i = 0; i < c.size(); ++i) a.c[i] += o.c[i];
        return a;
    }
};

// Boolean combination of "affine <= 0" atoms.
struct Constraint {
    enum class Kind { Atom, All, Any } kind = Kind::Atom;
    Affine atom;
    std::vector<Constraint> parts;
};

class RegionBuilder {
public:
    explicit RegionBuilder(std::vector<ProbPtr> leaves) : leaves_(std::move(leaves)) {}

    std::size_t dim() const { return leaves_.size(); }

    std::optional<Affine> affine(const ProbExpr& p) const {
        if (std::holds_alternative<Prob>(p.node)) {
            Affine a{std::vector<double>(dim(), 0.0), 0.0};
            a.c[index_of(p)] = 1.0;
            return a;
        }
        if (const auto* k = std::get_if<Const>(&p.node)) return Affine{std::vector<double>(dim(), 0.0), k->value};
        const auto& ar = std::get<Arith>(p.node);
        switch (ar.op) {
        case ArithOp::Add:
        case ArithOp::Sub: {
            auto l = affine(*ar.args[0]);
            auto r = affine(*ar.args[1]);
            if (!l || !r) return std::nullopt;
            return l->plus(ar.op == ArithOp::Add ? *r : r->scaled(-1.0));
        }
        case ArithOp::Mul: {
            if (auto s = const_value(*ar.args[0])) {
                if (auto r = affine(*ar.args[1])) return r->scaled(*s);
            }
            if (auto s = const_value(*ar.args[1])) {
                if (auto l = affine(*ar.args[0])) return l->scaled(*s);
            }
            return std::nullopt;
        }
        case ArithOp::Div: {
            auto s = const_value(*ar.args[1]);
            if (!s || *s == 0.0) return std::nullopt;
            if (auto l = affine(*ar.args[0])) return l->scaled(1.0 / *s);
            return std::nullopt;
        }
        default:
            if (auto v = const_value(p)) return Affine{std::vector<double>(dim(), 0.0), *v};
            return std::nullopt;
        }
    }

    // e <= a (upper == true) or e >= a.
    Constraint bound(const ProbExpr& e, const Affine& a, bool upper) const {
        if (auto ae = affine(e)) {
            Affine diff = ae->plus(a.scaled(-1.0));
            if (!upper) diff = diff.scaled(-1.0);
            return {Constraint::Kind::Atom, diff, {}};
        }
        const auto& ar = std::get<Arith>(e.node);
        switch (ar.op) {
        case ArithOp::Abs: {
            // |x| <= a  iff  x <= a and x >= -a;  |x| >= a  iff  x >= a or x <= -a
            Constraint c{upper ? Constraint::Kind::All : Constraint::Kind::Any, {}, {}};
            c.parts.push_back(bound(*ar.args[0], a, upper));
            c.parts.push_back(bound(*ar.args[0], a.scaled(-1.0), !upper));
            return c;
        }
        case ArithOp::Max:
        case ArithOp::Min: {
            const bool all = (ar.op == ArithOp::Max) == upper;
            Constraint c{all ? Constraint::Kind::All : Constraint::Kind::Any, {}, {}};
            for (const auto& x : ar.args) c.parts.push_back(bound(*x, a, upper));
            return c;
        }
        case ArithOp::Add:
        case ArithOp::Sub: {
            const double sign = ar.op == ArithOp::Add ? 1.0 : -1.0;
            if (auto r = affine(*ar.args[1])) {
                // x + r <= a  iff  x <= a - r
                return bound(*ar.args[0], a.plus(r->scaled(-sign)), upper);
            }
            if (auto l = affine(*ar.args[0])) {
                // l + s*y <= a  iff  s*y <= a - l
                const Affine rest = a.plus(l->scaled(-1.0));
                return sign > 0 ? bound(*ar.args[1], rest, upper) : bound(*ar.args[1], rest.scaled(-1.0), !upper);
            }
            break;
        }
        case ArithOp::Mul:
        case ArithOp::Div: {
            const bool const_left = ar.op == ArithOp::Mul && const_value(*ar.args[0]).has_value();
            const auto s = const_value(*ar.args[const_left ? 0 : 1]);
            if (!s || *s == 0.0) break;
            const double factor = ar.op == ArithOp::Mul ? *s : 1.0 / *s;
            const auto& inner = *ar.args[const_left ? 1 : 0];
            return bound(inner, a.scaled(1.0 / factor), factor > 0 ? upper : !upper);
        }
        }
        throw UnsupportedShape("probability expression is not piecewise affine in a supported form");
    }

    Constraint compare(const Compare& c) const {
        if (c.op == CmpOp::Eq) throw UnsupportedShape("'=' comparisons cannot be compiled to a region");
        const bool le = c.op == CmpOp::Lt || c.op == CmpOp::Le;
        if (auto r = affine(*c.right)) return bound(*c.left, *r, le);
        if (auto l = affine(*c.left)) return bound(*c.right, *l, !le);
        throw UnsupportedShape("both sides of a comparison are non-affine");
    }

    std::size_t index_of(const ProbExpr& p) const {
        for (std::size_t i = 0; i < leaves_.size(); ++i) {
            if (equal(*leaves_[i], p)) return i;
        }
        throw UnsupportedShape("internal: unknown probability leaf");
    }

private:
    std::vector<ProbPtr> leaves_;
};

inline void flatten(const Constraint& c, Constraint::Kind want, std::vector<stats::Halfspace>& out, bool& ok) {
    if (c.kind == Constraint::Kind::Atom) {
        out.push_back(stats::Halfspace{c.atom.c, -c.atom.k});
        return;
    }
    if (c.kind != want) {
        ok = false;
        return;
    }
    for (const auto& p : c.parts) flatten(p, want, out, ok);
}

inline bool is_pair(const stats::Halfspace& h, std::size_t& i, std::size_t& j) {
    std::size_t pos = h.coeffs.size();
    std::size_t neg = h.coeffs.size();
    for (std::size_t k = 0; k < h.coeffs.size(); ++k) {
        if (h.coeffs[k] == 1.0 && pos == h.coeffs.size()) {
            pos = k;
        } else if (h.coeffs[k] == -1.0 && neg == h.coeffs.size()) {
            neg = k;
        } else if (h.coeffs[k] != 0.0) {
            return false;
        }
    }
    if (pos == h.coeffs.size() || neg == h.coeffs.size()) return false;
    i = pos;
    j = neg;
    return true;
}

// Picks the most specific region kind that represents the halfspaces exactly.
inline stats::Region make_region(std::size_t dim, std::vector<stats::Halfspace> hs, bool intersection) {
    if (dim == 1 && hs.size() == 1 && hs[0].coeffs[0] != 0.0) {
        const double c = hs[0].coeffs[0];
        const double p = hs[0].bound / c;
        if (p > 0.0 && p < 1.0) return c > 0 ? stats::Region::lower_half_line(p) : stats::Region::upper_half_line(p);
    }
    if (hs.size() == 2) {
        std::size_t i1, j1, i2, j2;
        if (is_pair(hs[0], i1, j1) && is_pair(hs[1], i2, j2) && i1 == j2 && j1 == i2) {
            if (intersection && hs[0].bound == hs[1].bound) {
                return stats::Region::abs_diff_le(dim, std::min(i1, j1), std::max(i1, j1), hs[0].bound);
            }
        }
        const auto n0 = hs[0].negated();
        const auto n1 = hs[1].negated();
        if (!intersection && is_pair(n0, i1, j1) && is_pair(n1, i2, j2) && i1 == j2 && j1 == i2 &&
            n0.bound == n1.bound) {
            return stats::Region::abs_diff_ge(dim, std::min(i1, j1), std::max(i1, j1), -hs[0].bound);
        }
    }
    return intersection ? stats::Region::halfspace_conj(dim, std::move(hs))
                        : stats::Region::halfspace_union(dim, std::move(hs));
}

} // namespace detail

/// Compiles a Compare or InRegion state formula. Named regions come from the
/// model configuration.
inline CompiledRegion compile_region(const Formula& state, const RegionTable& named = {}) {
    auto leaves = prob_leaves(state);
    if (leaves.empty()) throw UnsupportedShape("state formula has no probability operator");
    if (const auto* r = std::get_if<InRegion>(&state.node)) {
        const auto it = named.find(r->region);
        if (it == named.end()) throw ConfigError("unknown region '" + r->region + "'");
        for (const auto& e : r->exprs) {
            if (!std::holds_alternative<Prob>(e->node)) {
                throw UnsupportedShape("region membership arguments must be P operators");
            }
        }
        if (leaves.size() != r->exprs.size()) {
            throw UnsupportedShape("region membership arguments must be distinct P operators");
        }
        if (it->second.dimension() != leaves.size()) {
            throw UnsupportedShape("region '" + r->region + "' has dimension " +
                                   std::to_string(it->second.dimension()) + " but is given " +
                                   std::to_string(leaves.size()) + " arguments");
        }
        return {std::move(leaves), it->second};
    }
    const auto* c = std::get_if<Compare>(&state.node);
    if (c == nullptr) throw UnsupportedShape("expected a comparison or region membership");
    detail::RegionBuilder builder(leaves);
    const auto constraint = builder.compare(*c);
    const std::size_t dim = leaves.size();
    std::vector<stats::Halfspace> hs;
    bool ok = true;
    if (constraint.kind == detail::Constraint::Kind::Any) {
        detail::flatten(constraint, detail::Constraint::Kind::Any, hs, ok);
        if (!ok) throw UnsupportedShape("region mixes conjunction inside disjunction");
        return {std::move(leaves), detail::make_region(dim, std::move(hs), false)};
    }
    detail::flatten(constraint, detail::Constraint::Kind::All, hs, ok);
    if (!ok) throw UnsupportedShape("region mixes disjunction inside conjunction");
    return {std::move(leaves), detail::make_region(dim, std::move(hs), true)};
}

} // namespace hpstl::logic
