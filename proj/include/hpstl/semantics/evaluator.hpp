#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "hpstl/error.hpp"
#include "hpstl/logic/formula.hpp"
#include "hpstl/semantics/trace.hpp"

namespace hpstl::semantics {

/// Kleene truth values; Unknown means "depends on the path past the horizon".
enum class Truth : std::uint8_t { False, True, Unknown };

inline Truth truth_not(Truth a) {
    return a == Truth::Unknown ? a : (a == Truth::True ? Truth::False : Truth::True);
}
inline Truth truth_and(Truth a, Truth b) {
    if (a == Truth::False || b == Truth::False) return Truth::False;
    if (a == Truth::Unknown || b == Truth::Unknown) return Truth::Unknown;
    return Truth::True;
}
inline Truth truth_or(Truth a, Truth b) { return truth_not(truth_and(truth_not(a), truth_not(b))); }

/// Path variables bound to traces, evaluated with a common time offset.
struct PathAssignment {
    std::vector<std::string> vars;
    std::vector<const Trace*> traces;
    double base_shift = 0.0;
};

/// V^(t): the same bindings viewed t seconds later.
inline PathAssignment shift(PathAssignment v, double t) {
    v.base_shift += t;
    return v;
}

/// A quantifier-free path formula compiled against a fixed variable order and
/// label vocabulary, so that evaluation does no name lookups.
class PathEvaluator {
public:
    PathEvaluator(const logic::Formula& f, std::vector<std::string> order, const std::vector<std::string>& labels)
        : order_(std::move(order)) {
        root_ = compile(f, labels);
    }

    std::size_t arity() const { return order_.size(); }
    const std::vector<std::string>& order() const { return order_; }

    /// Three-valued truth at absolute time t on traces bound in `order`.
    Truth eval(std::span<const Trace* const> traces, double t = 0.0) const {
        if (traces.size() != order_.size()) {
            throw DomainError("path formula expects " + std::to_string(order_.size()) + " traces, got " +
                              std::to_string(traces.size()));
        }
        Ctx ctx{traces, {}, std::numeric_limits<double>::infinity()};
        for (const Trace* tr : traces) {
            if (!tr->persists()) ctx.horizon = std::min(ctx.horizon, tr->horizon());
        }
        build_breakpoints(ctx);
        return eval_node(ctx, root_, t);
    }

    /// Two-valued truth; HorizonExceeded when the result is not determined.
    bool holds(std::span<const Trace* const> traces, double t = 0.0) const {
        const Truth r = eval(traces, t);
        if (r == Truth::Unknown) {
            throw HorizonExceeded("formula value depends on the path beyond the sampled horizon");
        }
        return r == Truth::True;
    }

private:
    enum class Op : std::uint8_t { True, Atom, Not, And, Until };

    struct Node {
        Op op = Op::True;
        std::size_t a = 0; // child / variable index
        std::size_t b = 0; // child / label index
        double lo = 0.0;
        double hi = 0.0;
    };

    struct Ctx {
        std::span<const Trace* const> traces;
        std::vector<double> breaks;
        double horizon;
    };

    std::size_t compile(const logic::Formula& f, const std::vector<std::string>& labels) {
        Node n;
        if (std::holds_alternative<logic::True>(f.node)) {
            n.op = Op::True;
        } else if (const auto* at = std::get_if<logic::Atom>(&f.node)) {
            n.op = Op::Atom;
            const auto v = std::find(order_.begin(), order_.end(), at->pathvar);
            if (v == order_.end()) throw UnboundPathVariable("path variable '" + at->pathvar + "' is not bound");
            const auto l = std::find(labels.begin(), labels.end(), at->label);
            if (l == labels.end()) throw ConfigError("label '" + at->label + "' is not defined by the model");
            n.a = static_cast<std::size_t>(v - order_.begin());
            n.b = static_cast<std::size_t>(l - labels.begin());
        } else if (const auto* no = std::get_if<logic::Not>(&f.node)) {
            n.op = Op::Not;
            n.a = compile(*no->child, labels);
        } else if (const auto* an = std::get_if<logic::And>(&f.node)) {
            n.op = Op::And;
            n.a = compile(*an->left, labels);
            n.b = compile(*an->right, labels);
        } else if (const auto* un = std::get_if<logic::Until>(&f.node)) {
            if (!(un->lo >= 0.0 && un->lo < un->hi)) throw DomainError("until interval requires 0 <= lo < hi");
            n.op = Op::Until;
            n.a = compile(*un->left, labels);
            n.b = compile(*un->right, labels);
            n.lo = un->lo;
            n.hi = un->hi;
        } else {
            throw UnsupportedShape("path formula still contains a probability operator or embedded state formula");
        }
        nodes_.push_back(n);
        return nodes_.size() - 1;
    }

    void build_breakpoints(Ctx& ctx) const {
        auto& b = ctx.breaks;
        for (const Trace* tr : ctx.traces) {
            const auto ts = tr->times();
            b.insert(b.end(), ts.begin(), ts.end());
        }
        if (std::isfinite(ctx.horizon)) b.push_back(ctx.horizon);
        std::sort(b.begin(), b.end());
        b.erase(std::unique(b.begin(), b.end()), b.end());
    }

    Truth eval_node(const Ctx& ctx, std::size_t idx, double t) const {
        const Node& n = nodes_[idx];
        switch (n.op) {
        case Op::True:
            return Truth::True;
        case Op::Atom: {
            const Trace& tr = *ctx.traces[n.a];
            if (!tr.observed(t)) return Truth::Unknown;
            return tr.has(n.b, t) ? Truth::True : Truth::False;
        }
        case Op::Not:
            return truth_not(eval_node(ctx, n.a, t));
        case Op::And: {
            const Truth l = eval_node(ctx, n.a, t);
            if (l == Truth::False) return l;
            return truth_and(l, eval_node(ctx, n.b, t));
        }
        case Op::Until:
            return eval_until(ctx, n, t);
        }
        return Truth::Unknown;
    }

    // Exists w in [t+lo, t+hi] with right(w), and left on every candidate of [t, w).
    // Candidates are t, t+lo, t+hi and the breakpoints in between.
    Truth eval_until(const Ctx& ctx, const Node& n, double t) const {
        const auto& br = ctx.breaks;
        const double w_first = t + n.lo;
        const double w_last = t + n.hi;

        Truth prefix = Truth::True; // left held on all candidates before the current witness
        Truth result = Truth::False;
        double next_prefix = t;      // next prefix candidate not yet folded in
        std::size_t prefix_idx = static_cast<std::size_t>(std::upper_bound(br.begin(), br.end(), t) - br.begin());

        auto fold_prefix_before = [&](double w) {
            while (next_prefix < w) {
                prefix = truth_and(prefix, eval_node(ctx, n.a, next_prefix));
                if (prefix == Truth::False) return;
                if (prefix_idx < br.size()) {
                    next_prefix = br[prefix_idx++];
                } else {
                    next_prefix = std::numeric_limits<double>::infinity();
                }
            }
        };

        auto try_witness = [&](double w) -> bool {
            fold_prefix_before(w);
            if (prefix == Truth::False) return true;
            const Truth r = eval_node(ctx, n.b, w);
            result = truth_or(result, truth_and(r, prefix));
            return result == Truth::True;
        };

        if (try_witness(w_first)) return result;
        auto it = std::upper_bound(br.begin(), br.end(), w_first);
        for (; it != br.end() && *it <= w_last; ++it) {
            if (try_witness(*it)) return result;
        }
        if (std::isfinite(w_last) && (it == br.begin() || *(it - 1) != w_last) && w_last > w_first) {
            try_witness(w_last);
        }
        return result;
    }

    std::vector<std::string> order_;
    std::vector<Node> nodes_;
    std::size_t root_ = 0;
};

/// Evaluates f at time t under the assignment; variables resolved by name.
inline Truth eval_path(const logic::Formula& f, const PathAssignment& v, double t = 0.0) {
    if (v.vars.size() != v.traces.size()) throw DomainError("assignment arity mismatch");
    if (v.traces.empty()) {
        const PathEvaluator ev(f, {}, {});
        return ev.eval({}, v.base_shift + t);
    }
    const PathEvaluator ev(f, v.vars, v.traces.front()->label_names());
    return ev.eval(v.traces, v.base_shift + t);
}

/// Binds order[i] to traces[i] and evaluates at time 0.
inline bool eval_quantifier_free(const logic::Formula& f, std::span<const Trace* const> traces,
                                 const std::vector<std::string>& order) {
    if (traces.size() != order.size()) throw DomainError("eval_quantifier_free: arity mismatch");
    const std::vector<std::string> labels = traces.empty() ? std::vector<std::string>{} : traces[0]->label_names();
    const PathEvaluator ev(f, order, labels);
    return ev.holds(traces, 0.0);
}

} // namespace hpstl::semantics
