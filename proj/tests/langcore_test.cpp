#include <gtest/gtest.h>

#include "seqeff/typechecker.hpp"

using namespace seqeff;
using namespace seqeff::lang;

namespace {

struct Lang : ::testing::Test {
    quantale::QuantaleP q = quantale::make_trace(reglang::Alphabet::parse_list("a,b,c,d,g,h"));
    tc::Checker checker{q};

    ExprP prog(const std::string& s) const { return parse_program(s, *q); }
    TyP type(const std::string& s) const { return parse_type(s, *q); }
    ExprP expanded(const std::string& s) const { return expand(prog(s), checker); }
};

// Subtyping by unfolding Mu to a fixed depth; past the depth everything is assumed
// related. Independent of the assumption-cache algorithm under test.
bool bounded_sub(const TyP& s, const TyP& t, int depth) {
    using TK = Ty::Kind;
    if (s->kind == TK::Any) return true;
    if (s->kind == TK::Mu || t->kind == TK::Mu) {
        if (depth == 0) return true;
        return bounded_sub(unfold(s), unfold(t), depth - 1);
    }
    if (s->kind != t->kind) return false;
    switch (s->kind) {
        case TK::Unit:
        case TK::Bool: return true;
        case TK::Prim:
        case TK::Var: return s->name == t->name;
        case TK::Fun:
        case TK::Comp:
            return bounded_sub(t->a, s->a, depth) && ce::ce_leq(s->latent, t->latent) && bounded_sub(s->b, t->b, depth);
        case TK::Cont:
            return s->name == t->name && bounded_sub(t->a, s->a, depth) && ce::ce_leq(s->latent, t->latent) &&
                   bounded_sub(s->b, t->b, depth);
        case TK::Option:
        case TK::Ref: return bounded_sub(s->a, t->a, depth) && bounded_sub(t->a, s->a, depth);
        case TK::Sum:
            return bounded_sub(s->a, t->a, depth) && bounded_sub(t->a, s->a, depth) && bounded_sub(s->b, t->b, depth) &&
                   bounded_sub(t->b, s->b, depth);
        default: return false;
    }
}

TyP random_type(std::mt19937& rng, const quantale::Quantale& q, int depth, std::vector<std::string>& vars) {
    auto pick = [&](int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); };
    const char* effs[] = {"a", "a + b", "a*", "%e"};
    auto lat = [&] { return ce::ce_pure(q.parse(effs[pick(4)])); };
    if (depth == 0) {
        if (!vars.empty() && pick(2) == 0) return t_var(vars[static_cast<size_t>(pick(static_cast<int>(vars.size())))]);
        switch (pick(3)) {
            case 0: return t_unit();
            case 1: return t_bool();
            default: return t_any();
        }
    }
    switch (pick(5)) {
        case 0: return random_type(rng, q, 0, vars);
        case 1: {
            auto a = random_type(rng, q, depth - 1, vars);
            return t_fun(a, lat(), random_type(rng, q, depth - 1, vars));
        }
        case 2: {
            auto a = random_type(rng, q, depth - 1, vars);
            return t_cont("t", a, lat(), random_type(rng, q, depth - 1, vars));
        }
        case 3: return t_option(random_type(rng, q, depth - 1, vars));
        default: {
            std::string v = "X" + std::to_string(vars.size());
            vars.push_back(v);
            auto a = random_type(rng, q, depth - 1, vars);
            auto body = t_fun(a, lat(), random_type(rng, q, depth - 1, vars));
            vars.pop_back();
            return t_mu(v, body);
        }
    }
}

}  // namespace

TEST_F(Lang, ParsesCoreForms) {
    auto e = prog("(seq (event a) (event b))");
    EXPECT_EQ(e->kind, Expr::Kind::Seq);
    EXPECT_EQ(e->kids[0]->kind, Expr::Kind::Prim);
    EXPECT_EQ(e->kids[0]->name2, "a");
    auto p = prog("(prompt t (abort t nat #u) (lambda (x : nat) (event g)))");
    EXPECT_EQ(p->kind, Expr::Kind::Prompt);
    EXPECT_EQ(p->name, "t");
    EXPECT_EQ(prog("(while c e)")->kind, Expr::Kind::While);
}

TEST_F(Lang, PrintParseRoundTrip) {
    for (auto src : {"(prompt t (abort t nat 3) (lambda (x : nat) (event g)))",
                     "(callcc t {| replace t : a* ~> unit | a*} unit (lambda (k : (cont t unit {| | a} unit)) (k #u)))",
                     "(let (r (ref bool #t)) (case (some (get r)) (x #u) (y (set r y))))",
                     "(try (throw C #u) (catch C (lambda (x : unit) #u)))"}) {
        auto e = prog(src);
        EXPECT_EQ(print(prog(print(e))), print(e)) << src;
    }
}

TEST_F(Lang, ParseErrorsCarryPositions) {
    try {
        prog("(seq (event a) (event z))");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.pos, 22u);
    }
    EXPECT_THROW(prog("(seq (event a)"), ParseError);
    EXPECT_THROW(prog("(lambda (x unit) x)"), ParseError);
    EXPECT_THROW(prog("(abort t nat)"), ParseError);
    EXPECT_THROW(prog("(lambda (lambda : unit) #u)"), ParseError);
}

TEST_F(Lang, LatentEffectsAreCovariant) {
    auto small = type("(-> unit {| | a} unit)");
    auto big = type("(-> unit {| | a + b} unit)");
    EXPECT_TRUE(subtype(small, big));
    EXPECT_FALSE(subtype(big, small));
    EXPECT_TRUE(subtype(small, small));
}

TEST_F(Lang, ArgumentsAreContravariant) {
    auto narrow = type("(-> (-> unit {| | a} unit) {| | %e} unit)");
    auto wide = type("(-> (-> unit {| | a + b} unit) {| | %e} unit)");
    EXPECT_TRUE(subtype(wide, narrow));
    EXPECT_FALSE(subtype(narrow, wide));
}

TEST_F(Lang, RecursiveTypesMatchTheirUnfolding) {
    auto k = type("(mu X (cont t X {| | a} unit))");
    EXPECT_TRUE(subtype(k, unfold(k)));
    EXPECT_TRUE(subtype(unfold(k), k));
    EXPECT_TRUE(subtype(k, unfold(unfold(k))));
    EXPECT_THROW(type("(mu X X)"), ParseError);
}

TEST_F(Lang, SubtypingAgreesWithBoundedUnfolding) {
    std::mt19937 rng(5);
    int agreed = 0;
    for (int i = 0; i < 400; ++i) {
        std::vector<std::string> vars;
        auto s = random_type(rng, *q, 3, vars);
        auto t = i % 3 == 0 ? unfold(s) : random_type(rng, *q, 3, vars);
        bool fast = subtype(s, t);
        EXPECT_EQ(fast, bounded_sub(s, t, 8)) << s->str() << " <: " << t->str();
        agreed += fast;
    }
    EXPECT_GT(agreed, 100);
}

TEST_F(Lang, SubtypingIsAPreorder) {
    std::mt19937 rng(9);
    std::vector<TyP> pool;
    for (int i = 0; i < 40; ++i) {
        std::vector<std::string> vars;
        pool.push_back(random_type(rng, *q, 2, vars));
    }
    for (auto& a : pool) {
        EXPECT_TRUE(subtype(a, a));
        for (auto& b : pool)
            for (auto& c : pool)
                if (subtype(a, b) && subtype(b, c)) {
                    EXPECT_TRUE(subtype(a, c)) << a->str() << b->str() << c->str();
                }
    }
}

TEST_F(Lang, MacroFreeProgramsExpandToThemselves) {
    auto e = prog("(prompt t (seq (event a) (abort t unit #u)) (lambda (x : unit) (event b)))");
    EXPECT_EQ(print(expand(e, checker)), print(e));
}

TEST_F(Lang, LoopExpansionShowsItsPrediction) {
    auto s = print(expanded("(loop (event a))"));
    EXPECT_NE(s.find("(callcc %loop1 {| replace %loop1 : a* ~> unit | a*} unit"), std::string::npos) << s;
    EXPECT_EQ(s.rfind("(prompt %loop1 ", 0), 0u) << s;
}

TEST_F(Lang, TryAndThrowExpandToPromptAndAbort) {
    auto s = print(expanded("(try (throw C 3) (catch C (lambda (x : nat) (event g))))"));
    EXPECT_EQ(s, "(prompt %exn-C (abort %exn-C nat 3) (lambda (x : nat) (event g)))");
}

TEST_F(Lang, ExpansionIsIdempotentAndRoundTrips) {
    for (auto src : {"(loop (event a))", "(while #t (event b))",
                     "(try (seq (event a) (throw C #u)) (catch C (lambda (x : unit) #u)))"}) {
        auto once = expanded(src);
        EXPECT_FALSE(has_macros(once));
        EXPECT_EQ(print(expand(once, checker)), print(once));
        EXPECT_EQ(print(prog(print(once))), print(once));
    }
}

TEST_F(Lang, ExpansionAvoidsUserNames) {
    auto e = prog("(let (%cc2 (event a)) (let (%k3 #u) (loop (seq (event b) %k3))))");
    auto x = expand(e, checker);
    auto c = tc::check_program(checker, e);
    EXPECT_TRUE(c.outcome.eff.C.empty());
    std::set<std::string> names;
    collect_names(x, names);
    EXPECT_TRUE(names.count("%cc2"));
    EXPECT_EQ(print(x).find("(%cc2 %cc2)"), std::string::npos);
}

TEST_F(Lang, ExpansionReportsBodyErrors) {
    EXPECT_THROW(expanded("(loop (abort t nat #t))"), ExpandError);
}
