#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "seqeff/conteffect.hpp"

namespace seqeff::lang {

using ce::CE;
using ce::Tag;
using quantale::Quantale;

struct Ty;
using TyP = std::shared_ptr<const Ty>;

struct Ty : ce::AnnotNode {
    enum class Kind { Unit, Bool, Prim, Fun, Cont, Comp, Mu, Var, Option, Sum, Ref, Any };
    Kind kind;
    std::string name;  // Prim name, Cont tag, Mu binder, Var name
    TyP a, b;          // Fun/Cont/Comp arg and result; Mu body in a; Option/Ref in a; Sum a + b
    CE latent;         // Fun/Cont/Comp

    std::string str() const override;
    bool same(const ce::AnnotNode& other) const override;

private:
    mutable std::once_flag printed_;
    mutable std::string text_;
};

TyP t_unit();
TyP t_bool();
TyP t_nat();
TyP t_any();
TyP t_prim(std::string name);
TyP t_fun(TyP arg, CE latent, TyP res);
TyP t_cont(Tag tag, TyP arg, CE latent, TyP res);
TyP t_comp(TyP arg, CE latent, TyP res);
TyP t_mu(std::string var, TyP body);
TyP t_var(std::string var);
TyP t_option(TyP a);
TyP t_sum(TyP a, TyP b);
TyP t_ref(TyP a);

// One-step unfolding of a Mu type; other types are returned unchanged.
TyP unfold(const TyP& t);
// Unfolds until the head is not a Mu.
TyP head(const TyP& t);
bool subtype(const TyP& s, const TyP& t);
bool same_type(const TyP& s, const TyP& t);
// Least common supertype when one side subsumes the other; Any is the bottom.
std::optional<TyP> type_join(const TyP& s, const TyP& t);

struct Expr;
using ExprP = std::shared_ptr<const Expr>;

struct Expr {
    enum class Kind {
        Var, Lambda, App, If, Prompt, CallCC, CallComp, Abort, ContVal, CompVal, Prim,
        UnitLit, True, False, Nat, Let, Seq, Some, None, Inl, Inr, Case, Hole, Loc,
        Loop, While, Try, Throw, Iterate,
    };
    Kind kind;
    std::string name;   // variable, parameter, tag, primitive, exception, init tag
    std::string name2;  // event symbol, second case binder, generator tag
    TyP ty;             // parameter, thrown, annotation, hole or runtime value type
    CE eff;             // call/cc prediction, hole effect
    uint64_t num = 0;   // Nat literal, store location
    std::vector<ExprP> kids;
    size_t pos = 0;     // source offset
};

ExprP mk(Expr::Kind k, std::vector<ExprP> kids = {}, std::string name = {});
ExprP e_var(std::string n);
ExprP e_lambda(std::string x, TyP ty, ExprP body);
ExprP e_app(ExprP f, ExprP a);
ExprP e_if(ExprP c, ExprP t, ExprP f);
ExprP e_prompt(Tag tag, ExprP body, ExprP handler);
ExprP e_callcc(Tag tag, CE predicted, TyP res, ExprP fn);
ExprP e_callcomp(Tag tag, CE predicted, TyP res, ExprP fn);
ExprP e_abort(Tag tag, TyP thrown, ExprP arg);
ExprP e_event(std::string sym);
ExprP e_prim(std::string op, std::vector<ExprP> args, TyP ty = nullptr);
ExprP e_unit();
ExprP e_bool(bool b);
ExprP e_nat(uint64_t n);
ExprP e_let(std::string x, ExprP bound, ExprP body);
ExprP e_seq(ExprP a, ExprP b);
ExprP e_some(ExprP a);
ExprP e_none(TyP elem);
ExprP e_inl(TyP right, ExprP a);
ExprP e_inr(TyP left, ExprP a);
ExprP e_case(ExprP scrut, std::string x, ExprP l, std::string y, ExprP r);
ExprP e_hole(TyP ty, CE eff);
ExprP e_loc(uint64_t n, TyP cellTy);
ExprP e_contval(TyP contTy, ExprP ctx);
ExprP e_compval(TyP compTy, ExprP ctx);

bool is_value(const Expr& e);
bool is_macro(const Expr& e);
bool has_macros(const ExprP& e);
// Substitutes a closed value for free occurrences of x.
ExprP subst(const ExprP& e, const std::string& x, const ExprP& v);
// Replaces the unique Hole in a context.
ExprP plug(const ExprP& ctx, const ExprP& e);
std::set<std::string> free_vars(const ExprP& e);
// Every variable, binder and tag name that occurs in e.
void collect_names(const ExprP& e, std::set<std::string>& out);

struct ParseError : std::runtime_error {
    size_t pos;
    ParseError(const std::string& m, size_t p) : std::runtime_error(m + " at offset " + std::to_string(p)), pos(p) {}
};

// Surface syntax. Effects are `{P | C | U}` over the given quantale.
ExprP parse_program(std::string_view text, const Quantale& q);
TyP parse_type(std::string_view text, const Quantale& q);
// Reads one type at pos; used for types embedded in effect annotations.
TyP parse_type_at(std::string_view text, size_t& pos, const Quantale& q);
ce::AnnotParser annot_parser(const Quantale& q);
CE parse_annotated_effect(std::string_view text, const Quantale& q);

std::string print(const ExprP& e);

using TyEnv = std::map<std::string, TyP>;

// Inference service the expander needs for type-directed synthesis. The
// typechecker implements it; the interface keeps the dependency one-way.
class Oracle {
public:
    virtual ~Oracle() = default;
    struct Result {
        TyP ty;
        CE eff;
    };
    virtual Result infer(const TyEnv& env, const ExprP& e) const = 0;
    virtual const Quantale& quantale() const = 0;
};

struct ExpandError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Replaces loop/while/try/throw/iterate by their prompt and continuation encodings.
ExprP expand(const ExprP& e, const Oracle& oracle, const TyEnv& env = {});

// Reserved tag for an exception name.
std::string exn_tag(const std::string& exn);

// Annotation synthesized for the capture in loop/while expansions.
CE loop_prediction(const Quantale& q, const Tag& tag, const CE& body);
CE while_prediction(const Quantale& q, const Tag& tag, const CE& cond, const CE& body);
// Type of the self-applied continuation: mu X. cont tag X predicted unit.
TyP loop_cont_type(const Tag& tag, const CE& predicted);

}  // namespace seqeff::lang
