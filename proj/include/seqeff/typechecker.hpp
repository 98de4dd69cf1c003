#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "seqeff/langcore.hpp"

namespace seqeff::tc {

using ce::CE;
using ce::Tag;
using lang::ExprP;
using lang::TyEnv;
using lang::TyP;
using quantale::Eff;
using quantale::Quantale;
using quantale::QuantaleP;

// One recorded rule application. V-Effects records each comparison it makes with
// both sides pretty-printed.
struct Note {
    std::string rule;
    std::string detail;
    std::string lhs;
    std::string rhs;
};

struct Outcome {
    TyP ty;
    CE eff;
    std::vector<Note> notes;
};

struct TypeError : std::runtime_error {
    std::string rule;
    std::string clause;
    size_t pos;
    std::string lhs, rhs;
    TypeError(std::string rule, size_t pos, const std::string& msg, std::string clause = {}, std::string lhs = {},
              std::string rhs = {});
};

struct Violation {
    std::string clause;
    std::string element;
    std::string lhs, rhs;
    std::string str() const;
};

// V-Effects for a prompt tagged `tag` whose result type is `resTy` and whose
// handler accepts `handlerArg`.
std::optional<Violation> valid_effects(const std::vector<ce::ProphP>& P, const std::vector<ce::ControlP>& C,
                                       const ce::OptU& u, const Tag& tag, const TyP& resTy, const TyP& handlerArg,
                                       std::vector<Note>* notes = nullptr);

// Conclusion of T-Prompt.
CE prompt_effect(const std::vector<ce::ProphP>& P, const std::vector<ce::ControlP>& C, const ce::OptU& u,
                 const Tag& tag, const Eff& handlerU);

class Checker : public lang::Oracle {
public:
    explicit Checker(QuantaleP q) : q_(std::move(q)) {}

    Outcome typecheck(const TyEnv& env, const ExprP& e) const;
    Result infer(const TyEnv& env, const ExprP& e) const override;
    const Quantale& quantale() const override { return *q_; }
    const QuantaleP& quantale_ptr() const { return q_; }

    // Type and effect of E[e] for any e : holeTy | holeEff.
    Outcome context_infer(const TyEnv& env, const ExprP& ctx, const TyP& holeTy, const CE& holeEff) const;

private:
    QuantaleP q_;
};

struct Checked {
    ExprP expanded;
    Outcome outcome;
};

// Expand macros, then infer. A whole program may not leave prophecies or control
// effects unresolved, since nothing outside it could discharge them.
Checked check_program(const Checker& c, const ExprP& e, const TyEnv& env = {});

struct DerivedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// D-FullInfLoop: chi*.
CE derived_infloop(const Quantale& q, const CE& body);
// D-While: Qc |> (Qe |> Qc)*.
CE derived_while(const Quantale& q, const Eff& condU, const Eff& bodyU);
// D-AbortingWhile; both effects must be prophecy-free with aborts to other tags only.
CE derived_aborting_while(const Quantale& q, const CE& cond, const CE& body, const Tag& loopTag);
// D-TryCatch: (0; other aborts; Qe + (Q |> Qh)).
CE derived_trycatch(const Quantale& q, const CE& body, const Tag& exnTag, const TyP& exnTy, const Eff& handlerU);
// D-Throw: (0; {abort exn argU ~> ty}; Bot).
CE derived_throw(const Eff& argU, const std::string& exnName, const TyP& exnTy);

std::optional<Violation> genprophs_check(const Quantale& q, const std::vector<ce::ProphP>& P, const Tag& gen,
                                         const Eff& E, const TyP& elemTy);

struct IterateShape {
    TyP elem;
    CE yieldPrediction;  // (P_p, C_p, E*) predicted by yield
    CE body;             // (P, C, E*) latent effect of f once applied to yield
};

// Reads f's type against D-Iterate's premise shape.
IterateShape iterate_shape(const TyP& fTy, const Tag& gen);

// D-Iterate; returns the iterator's type with effect unit.
Outcome derived_iterate(const Quantale& q, const TyP& fTy, const Tag& init, const Tag& gen, const Eff& E);

// Derived rule applied to a macro form next to inference on its expansion.
struct Derivation {
    std::string rule;
    TyP derivedTy, fullTy;
    CE derived, full;
    bool leq = false;    // full <= derived, and the types agree
    bool equiv = false;  // full and derived are ce_equiv
    bool underlying_equal = false;
};

// e must be a loop, while, try, throw or iterate form; its subterms may contain macros.
Derivation derive(const Checker& c, const ExprP& e, const TyEnv& env = {});

}  // namespace seqeff::tc
