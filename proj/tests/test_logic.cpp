#include <gtest/gtest.h>

#include <functional>
#include <string>
#include <vector>

#include "hpstl/error.hpp"
#include "hpstl/logic/analysis.hpp"
#include "hpstl/logic/formula.hpp"
#include "hpstl/logic/parser.hpp"
#include "hpstl/logic/printer.hpp"
#include "hpstl/logic/region_compiler.hpp"
#include "hpstl/models/random.hpp"

using namespace hpstl;
using namespace hpstl::logic;

namespace {

const Formula& body_of(const FormulaPtr& state) {
    const auto& cmp = std::get<Compare>(state->node);
    return *std::get<Prob>(cmp.left->node).body;
}

// ---------------------------------------------------------------- parsing

TEST(Parser, SensitivityFormulaShape) {
    const auto f = parse_state_formula(
        "P{pi1,pi2} ((!q@pi1 & !q@pi2) U[0,inf] (q@pi1 & F[0,0.9] q@pi2 | q@pi2 & F[0,0.9] q@pi1)) >= 0.95");
    const auto& cmp = std::get<Compare>(f->node);
    EXPECT_EQ(cmp.op, CmpOp::Ge);
    EXPECT_EQ(*cmp.right, *constant(0.95));
    const auto& pr = std::get<Prob>(cmp.left->node);
    EXPECT_EQ(pr.pathvars, (std::vector<std::string>{"pi1", "pi2"}));
    const auto q1 = atom("q", "pi1"), q2 = atom("q", "pi2");
    const auto expected =
        until(conj(negate(q1), negate(q2)),
              disj(conj(q1, eventually(0, 0.9, q2)), conj(q2, eventually(0, 0.9, q1))), 0, kInfinity);
    EXPECT_EQ(*pr.body, *expected);
}

TEST(Parser, GloballyDesugars) {
    const auto f = parse_state_formula("P{pi} (G[0,inf] a@pi) >= 1");
    const auto expected = negate(until(top(), negate(atom("a", "pi")), 0, kInfinity));
    EXPECT_EQ(body_of(f), *expected);
}

TEST(Parser, NestedProbability) {
    const auto f = parse_state_formula("P{pi1}(P{pi2}(a@pi1 U[0,5] b@pi2) < 0.5) < 0.1");
    const auto& outer = std::get<Prob>(std::get<Compare>(f->node).left->node);
    EXPECT_EQ(outer.pathvars, std::vector<std::string>{"pi1"});
    const auto& inner_cmp = std::get<Compare>(outer.body->node);
    const auto& inner = std::get<Prob>(inner_cmp.left->node);
    EXPECT_EQ(inner.pathvars, std::vector<std::string>{"pi2"});
    EXPECT_EQ(*inner.body, *until(atom("a", "pi1"), atom("b", "pi2"), 0, 5));
}

TEST(Parser, DesugaringIdentities) {
    const auto phi = parse_formula("a@p & b@q");
    const auto psi = parse_formula("c@p");
    EXPECT_EQ(*parse_formula("F[1,2] (a@p & b@q)"), *until(top(), phi, 1, 2));
    EXPECT_EQ(*parse_formula("G[1,2] (a@p & b@q)"), *negate(until(top(), negate(phi), 1, 2)));
    EXPECT_EQ(*parse_formula("(a@p & b@q) | c@p"), *negate(conj(negate(phi), negate(psi))));
    EXPECT_EQ(*parse_formula("F c@p"), *until(top(), psi, 0, kInfinity));
    EXPECT_EQ(*parse_formula("false"), *negate(top()));
}

TEST(Parser, PrecedenceAndAssociativity) {
    // ! binds tighter than &, & tighter than |, | tighter than U; U is right-associative.
    EXPECT_EQ(*parse_formula("!a@p & b@p"), *conj(negate(atom("a", "p")), atom("b", "p")));
    EXPECT_EQ(*parse_formula("a@p | b@p & c@p"), *disj(atom("a", "p"), conj(atom("b", "p"), atom("c", "p"))));
    EXPECT_EQ(*parse_formula("a@p U b@p U c@p"),
              *until(atom("a", "p"), until(atom("b", "p"), atom("c", "p"), 0, kInfinity), 0, kInfinity));
    EXPECT_EQ(*parse_formula("a@p | b@p U c@p"),
              *until(disj(atom("a", "p"), atom("b", "p")), atom("c", "p"), 0, kInfinity));
}

TEST(Parser, KeywordsAreContextual) {
    // F, G and U used as label names.
    EXPECT_EQ(*parse_formula("F@p U G@p"), *until(atom("F", "p"), atom("G", "p"), 0, kInfinity));
}

TEST(Parser, CommentsAndWhitespace) {
    const auto f = parse_state_formula("# header\nP{pi}(\n  a@pi # trailing\n) < 0.5\n");
    EXPECT_EQ(body_of(f), *atom("a", "pi"));
}

TEST(Parser, ArithmeticExpressions) {
    const auto f = parse_state_formula("abs(P{p}(a@p) - P{q}(b@q)) * 2 <= min(0.5, max(0.1, 0.2)) + 1 / 4");
    const auto& cmp = std::get<Compare>(f->node);
    EXPECT_EQ(cmp.op, CmpOp::Le);
    const auto& mul = std::get<Arith>(cmp.left->node);
    EXPECT_EQ(mul.op, ArithOp::Mul);
    EXPECT_EQ(std::get<Arith>(mul.args[0]->node).op, ArithOp::Abs);
    EXPECT_EQ(std::get<Arith>(cmp.right->node).op, ArithOp::Add);
}

TEST(Parser, RegionMembership) {
    const auto f = parse_state_formula("(P{p}(a@p), P{q}(b@q)) in D");
    const auto& r = std::get<InRegion>(f->node);
    EXPECT_EQ(r.region, "D");
    EXPECT_EQ(r.exprs.size(), 2u);
}

TEST(Parser, EmbeddedStateFormula) {
    const auto f = parse_state_formula("P{p}(F (P{q}(a@q) > 0.5)@p) > 0.2");
    const auto& u = std::get<Until>(body_of(f).node);
    const auto& e = std::get<Embed>(u.right->node);
    EXPECT_EQ(e.pathvar, "p");
    EXPECT_TRUE(is_closed(*e.state));
}

TEST(Parser, SyntaxErrorCarriesPosition) {
    try {
        parse_formula("P{pi}(a@pi &) < 0.5");
        FAIL() << "expected a parse error";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 1u);
        EXPECT_EQ(e.column(), 13u);
    }
    try {
        parse_formula("P{pi}(a@pi)\n  < < 0.5");
        FAIL() << "expected a parse error";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
    }
}

TEST(Parser, RejectsBadIntervals) {
    EXPECT_THROW(parse_formula("a@p U[2,1] b@p"), ParseError);
    EXPECT_THROW(parse_formula("a@p U[1,1] b@p"), ParseError);
    EXPECT_THROW(parse_formula("a@p U[-1,1] b@p"), ParseError);
    EXPECT_THROW(parse_formula("a@p U[inf,inf] b@p"), ParseError);
}

TEST(Parser, RejectsTrivialQuantification) {
    EXPECT_THROW(parse_formula("P{p,q}(a@p) < 0.5"), UnboundPathVariable);
    EXPECT_THROW(parse_formula("P{p,p}(a@p) < 0.5"), ParseError);
}

TEST(Parser, StateFormulaMustBeClosed) {
    EXPECT_THROW(parse_state_formula("P{q}(a@p & b@q) < 0.5"), UnboundPathVariable);
    EXPECT_NO_THROW(parse_formula("P{q}(a@p & b@q) < 0.5"));
    EXPECT_THROW(parse_state_formula("a@p"), Error);
}

// ---------------------------------------------------------------- printing

TEST(Printer, UntilText) {
    EXPECT_EQ(to_string(*until(atom("a", "pi"), atom("b", "pi"), 0, kInfinity)), "a@pi U[0,inf] b@pi");
}

TEST(Printer, RoundTripExamples) {
    for (const char* text : {
             "P{pi1,pi2} ((!q@pi1 & !q@pi2) U[0,inf] (q@pi1 & F[0,0.9] q@pi2 | q@pi2 & F[0,0.9] q@pi1)) >= 0.95",
             "P{pi} (G[0,inf] a@pi) >= 1",
             "P{pi1}(P{pi2}(a@pi1 U[0,5] b@pi2) < 0.5) < 0.1",
             "(P{p}(a@p), 1 - P{q}(b@q)) in D",
             "P{p}(F (P{q}(a@q) > 0.5)@p) = 0.2",
         }) {
        const auto f = parse_formula(text);
        const auto printed = to_string(*f);
        EXPECT_EQ(*parse_formula(printed), *f) << text << "\nprinted: " << printed;
    }
}

// Random well-formed ASTs: every quantified variable occurs free in its body.
struct Fuzzer {
    models::Rng rng;
    std::vector<std::string> vars = {"p", "q", "r"};
    std::vector<std::string> labels = {"a", "b", "c"};

    std::size_t pick(std::size_t n) { return static_cast<std::size_t>(rng.uniform() * static_cast<double>(n)); }

    double number() { return 0.25 * static_cast<double>(pick(20)); }

    FormulaPtr path(int depth) {
        if (depth <= 0 || rng.uniform() < 0.2) {
            if (rng.uniform() < 0.1) return top();
            return atom(labels[pick(labels.size())], vars[pick(vars.size())]);
        }
        switch (pick(depth > 2 ? 5 : 4)) {
        case 0: return negate(path(depth - 1));
        case 1: return conj(path(depth - 1), path(depth - 1));
        case 2: {
            const double lo = number();
            const double hi = rng.uniform() < 0.3 ? kInfinity : lo + 0.25 * static_cast<double>(1 + pick(8));
            return until(path(depth - 1), path(depth - 1), lo, hi);
        }
        case 3: return atom(labels[pick(labels.size())], vars[pick(vars.size())]);
        default: return embed(state(depth - 2, true), vars[pick(vars.size())]);
        }
    }

    // With `closed`, every P binds all free variables of its body.
    ProbPtr prob_expr(int depth, bool closed) {
        const double r = rng.uniform();
        if (depth <= 0 || r < 0.4) {
            auto body = path(std::max(0, depth - 1));
            const auto fv = free_vars(*body);
            if (fv.empty()) return constant(number());
            std::vector<std::string> pv;
            for (const auto& v : fv) {
                if (closed || pv.empty() || rng.uniform() < 0.5) pv.push_back(v);
            }
            return prob(pv, body);
        }
        if (r < 0.5) return constant(number());
        const auto op = static_cast<ArithOp>(pick(7));
        if (op == ArithOp::Abs) return arith(op, {prob_expr(depth - 1, closed)});
        return arith(op, {prob_expr(depth - 1, closed), prob_expr(depth - 1, closed)});
    }

    FormulaPtr state(int depth, bool closed = false) {
        if (rng.uniform() < 0.2) return in_region({prob_expr(depth, closed), prob_expr(depth, closed)}, "D");
        return compare(prob_expr(depth, closed), static_cast<CmpOp>(pick(5)), prob_expr(depth, closed));
    }
};

TEST(Printer, RoundTripFuzz) {
    Fuzzer fz{models::Rng(17)};
    for (int i = 0; i < 2000; ++i) {
        const auto f = i % 2 ? fz.path(6) : fz.state(6);
        const auto printed = to_string(*f);
        FormulaPtr back;
        ASSERT_NO_THROW(back = parse_formula(printed)) << printed;
        ASSERT_EQ(*back, *f) << printed;
    }
}

// ---------------------------------------------------------------- free variables

TEST(FreeVars, Examples) {
    EXPECT_EQ(free_vars(*parse_formula("a@pi1 & b@pi2")), (VarSet{"pi1", "pi2"}));
    EXPECT_TRUE(free_vars(*parse_formula("P{pi1,pi2}(a@pi1 & b@pi2) < 0.5")).empty());
    EXPECT_EQ(free_vars(*prob({"pi2"}, parse_formula("a@pi1 U b@pi2"))), VarSet{"pi1"});
}

// Top-down recomputation: a variable is free if an occurrence is not under a
// P operator that binds it.
void collect_free(const Formula& f, const VarSet& bound, VarSet& out);

void collect_free(const ProbExpr& p, const VarSet& bound, VarSet& out) {
    if (const auto* pr = std::get_if<Prob>(&p.node)) {
        VarSet b = bound;
        b.insert(pr->pathvars.begin(), pr->pathvars.end());
        collect_free(*pr->body, b, out);
    } else if (const auto* a = std::get_if<Arith>(&p.node)) {
        for (const auto& x : a->args) collect_free(*x, bound, out);
    }
}

void collect_free(const Formula& f, const VarSet& bound, VarSet& out) {
    const auto var = [&](const std::string& v) {
        if (!bound.count(v)) out.insert(v);
    };
    if (const auto* a = std::get_if<Atom>(&f.node)) var(a->pathvar);
    if (const auto* e = std::get_if<Embed>(&f.node)) {
        var(e->pathvar);
        collect_free(*e->state, bound, out);
    }
    if (const auto* n = std::get_if<Not>(&f.node)) collect_free(*n->child, bound, out);
    if (const auto* n = std::get_if<And>(&f.node)) {
        collect_free(*n->left, bound, out);
        collect_free(*n->right, bound, out);
    }
    if (const auto* n = std::get_if<Until>(&f.node)) {
        collect_free(*n->left, bound, out);
        collect_free(*n->right, bound, out);
    }
    if (const auto* c = std::get_if<Compare>(&f.node)) {
        collect_free(*c->left, bound, out);
        collect_free(*c->right, bound, out);
    }
    if (const auto* r = std::get_if<InRegion>(&f.node)) {
        for (const auto& x : r->exprs) collect_free(*x, bound, out);
    }
}

TEST(FreeVars, MatchesIndependentRecomputation) {
    Fuzzer fz{models::Rng(99)};
    for (int i = 0; i < 2000; ++i) {
        const auto f = i % 2 ? fz.path(6) : fz.state(5);
        VarSet want;
        collect_free(*f, {}, want);
        ASSERT_EQ(free_vars(*f), want) << to_string(*f);
    }
}

// ---------------------------------------------------------------- classification

TEST(Classify, Kinds) {
    EXPECT_EQ(classify(*parse_state_formula(
                  "P{pi1,pi2} ((!q@pi1 & !q@pi2) U[0,inf] (q@pi1 & F[0,0.9] q@pi2 | q@pi2 & F[0,0.9] q@pi1)) >= 0.95")),
              AlgorithmKind::Simple);
    EXPECT_EQ(classify(*parse_state_formula("P{pi}(F a@pi) - P{pi}(F b@pi) > 0.05")), AlgorithmKind::Joint);
    EXPECT_EQ(classify(*parse_state_formula("(P{p}(a@p), P{q}(b@q)) in D")), AlgorithmKind::Joint);
    EXPECT_EQ(classify(*parse_state_formula("P{p}(F (P{q}(a@q) > 0.5)@p) > 0.2")), AlgorithmKind::NestedState);
    EXPECT_EQ(classify(*parse_state_formula(
                  "P{pi1} (abs(P{pi2} ((!q1@pi1 & !q2@pi2) U (q1@pi1 & F[5,inf] q2@pi2)) - "
                  "P{pi2} ((!q1@pi1 & !q2@pi2) U (q2@pi2 & F[5,inf] q1@pi1))) <= 0.5) >= 0.5")),
              AlgorithmKind::NestedPath);
}

TEST(Classify, RejectsUnsupportedShapes) {
    EXPECT_THROW(classify(*parse_state_formula("P{p}(a@p) = 0.5")), UnsupportedShape);
    EXPECT_THROW(classify(*parse_state_formula("P{p}(P{q}(P{r}(a@p & b@q & c@r) < 0.5) < 0.5) < 0.5")),
                 UnsupportedShape);
    EXPECT_THROW(classify(*parse_formula("a@p")), UnsupportedShape);
    EXPECT_THROW(classify(*parse_formula("P{q}(a@p & b@q) < 0.5")), UnsupportedShape);
}

TEST(Classify, TotalOnClosedFuzzedFormulas) {
    Fuzzer fz{models::Rng(5)};
    int classified = 0;
    for (int i = 0; i < 1000; ++i) {
        const auto f = fz.state(4, true);
        try {
            classify(*f);
            ++classified;
        } catch (const UnsupportedShape&) {
        }
    }
    EXPECT_GT(classified, 0);
}

// ---------------------------------------------------------------- region compilation

TEST(RegionCompiler, DifferenceBecomesHalfspace) {
    const auto c = compile_region(*parse_state_formula("P{p}(a@p) - P{p}(b@p) > 0.05"));
    ASSERT_EQ(c.leaves.size(), 2u);
    const std::vector<double> in{0.8, 0.6}, out{0.6, 0.58};
    EXPECT_TRUE(c.region.contains(in));
    EXPECT_FALSE(c.region.contains(out));
}

TEST(RegionCompiler, AbsoluteDifference) {
    const auto c = compile_region(*parse_state_formula("abs(P{p}(a@p) - P{p}(b@p)) <= 0.1"));
    EXPECT_EQ(c.region.kind(), stats::Region::Kind::AbsDiffLE);
    const std::vector<double> in{0.5, 0.45}, out{0.5, 0.3};
    EXPECT_TRUE(c.region.contains(in));
    EXPECT_FALSE(c.region.contains(out));
}

TEST(RegionCompiler, SingleThresholdIsHalfLine) {
    EXPECT_EQ(compile_region(*parse_state_formula("P{p}(a@p) < 0.3")).region.kind(),
              stats::Region::Kind::LowerHalfLine);
    EXPECT_EQ(compile_region(*parse_state_formula("P{p}(a@p) >= 0.3")).region.kind(),
              stats::Region::Kind::UpperHalfLine);
}

TEST(RegionCompiler, NamedRegion) {
    RegionTable t;
    t.emplace("D", stats::Region::abs_diff_le(2, 0, 1, 0.1));
    const auto c = compile_region(*parse_state_formula("(P{p}(a@p), P{q}(b@q)) in D"), t);
    EXPECT_EQ(c.region.kind(), stats::Region::Kind::AbsDiffLE);
    EXPECT_THROW(compile_region(*parse_state_formula("(P{p}(a@p), P{q}(b@q)) in E"), t), Error);
}

} // namespace
