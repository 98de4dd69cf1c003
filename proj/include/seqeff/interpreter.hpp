#pragma once

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "seqeff/typechecker.hpp"

namespace seqeff::interp {

using ce::CE;
using lang::ExprP;
using lang::TyEnv;
using lang::TyP;
using quantale::Eff;
using quantale::Quantale;

// Path from the root to the redex: each entry is a node and the child index taken.
struct Decomposition {
    std::vector<std::pair<ExprP, size_t>> path;
    ExprP redex;

    // The evaluation context with a Hole in place of the redex.
    ExprP context() const;
    // Rebuilds the expression with `with` in place of the redex.
    ExprP plug(const ExprP& with) const;
};

// Unique split into evaluation context and redex; nullopt for values.
std::optional<Decomposition> decompose(const ExprP& e);

struct Store {
    std::vector<ExprP> cells;
};

struct State {
    ExprP expr;
    Store store;
};

struct StepResult {
    enum class Kind { Stepped, Done, Stuck };
    Kind kind = Kind::Stepped;
    std::string rule;
    Eff label;           // Stepped only
    std::string event;   // symbol emitted by `event`, if any
    std::string reason;  // Stuck only
};

StepResult step(State& s, const Quantale& q);

struct RunResult {
    enum class Outcome { Done, Stuck, FuelExhausted };
    Outcome outcome = Outcome::Done;
    ExprP value;
    std::string reason;
    Eff total;                        // labels folded with seq
    std::vector<std::string> events;  // in emission order
    size_t steps = 0;

    std::string trace() const;
    std::string outcome_name() const;
};

RunResult run(const ExprP& e, const Quantale& q, size_t fuel);

struct AuditStep {
    size_t index;
    std::string rule;
    std::string label;
    bool ok;
    std::string before;  // effect of the term before the step
    std::string after;   // label |> effect of the reduct
    std::string detail;
};

struct AuditReport {
    RunResult run;
    CE initial;
    std::vector<AuditStep> steps;
    bool trace_ok = true;
    std::string trace_detail;

    bool passed() const;
    size_t failures() const;
};

// Runs e while re-checking after every step that label |> chi' <= chi and that
// the type does not grow, then checks the trace against the static language.
AuditReport audit_run(const tc::Checker& c, const ExprP& e, size_t fuel, const TyEnv& env = {});

// Source text of `count` random closed programs over `events` that pass
// check_program. Deterministic for a given seed.
std::vector<std::string> fuzz_corpus(const tc::Checker& c, const std::vector<std::string>& events, size_t count,
                                     uint32_t seed);
// One random candidate; it may fail to check.
std::string fuzz_program(const tc::Checker& c, const std::vector<std::string>& events, std::mt19937& rng);

}  // namespace seqeff::interp
