// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "seqeff/interpreter.hpp"

using namespace seqeff;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Verdict {
    bool ok = true;
    std::ostringstream detail;
    // Records a failed expectation and keeps going so the line lists all of them.
    void expect(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            detail << " [failed: " << what << "]";
        }
    }
};

int failures = 0;

void criterion(int n, const std::string& name, const std::function<void(Verdict&)>& body) {
    Verdict v;
    auto t0 = Clock::now();
    try {
        body(v);
    } catch (const std::exception& e) {
        v.ok = false;
        v.detail << " [exception: " << e.what() << "]";
    }
    char secs[32];
    std::snprintf(secs, sizeof secs, "%.2fs", seconds_since(t0));
    std::cout << (v.ok ? "PASS " : "FAIL ") << n << " " << name << " (" << secs << ")" << v.detail.str() << "\n"
              << std::flush;
    if (!v.ok) ++failures;
}

struct Fixture {
    quantale::QuantaleP q = quantale::make_trace(reglang::Alphabet::parse_list("a,b,c,d,e,g,h"));
    tc::Checker checker{q};
    lang::TyEnv boolB{{"b", lang::t_bool()}};

    quantale::Eff u(const std::string& s) const { return q->parse(s); }
    lang::ExprP prog(const std::string& s) const { return lang::parse_program(s, *q); }
    bool lang_eq(const ce::OptU& x, const std::string& s) const { return x && q->equal(*x, u(s)); }
};

const char* kCheckedException =
    "(prompt t (seq (event d) (if c (seq (event a) (event b)) (abort t nat 3))) (lambda (x : nat) (event g)))";
const char* kResumeOther = "(prompt t (seq (event d) (if c (seq (event a) (event b)) (k #u))) (lambda (x : unit) #u))";

std::string self_loop(const std::string& extra) {
    return "(prompt t (let (k (callcc t {| replace t : a* ~> unit | _|_} unit"
           " (lambda (k : (mu X (cont t X {| replace t : a* ~> unit | _|_} unit))) k)))"
           " (seq (event a) " +
           extra + "(k k))) (lambda (v : unit) v))";
}

const std::string kAbortGen = "abort gen %e ~> (option bool)";

std::string pure_generator() {
    std::string pfix = "mu P. proph gen {P | " + kAbortGen + " | %e} ~> (option bool) obs {P | " + kAbortGen + " | _|_}";
    std::string yield = "(-> bool {proph gen {" + pfix + " | " + kAbortGen + " | %e} ~> (option bool) obs {| | %e} | " +
                        kAbortGen + " | _|_} unit)";
    return "(lambda (y : " + yield + ") (lambda (fin : (-> unit {| " + kAbortGen + " | _|_} any)) (loop (y #t))))";
}

std::vector<std::string> while_corpus() {
    std::vector<std::string> conds{"b", "(seq (event c) b)", "(seq (event c) (event e) b)",
                                   "(if b (seq (event c) #t) #f)", "(let (x (event c)) b)"};
    std::vector<std::string> bodies{"(event e)", "(seq (event e) (event c))", "(if b (event e) (event c))", "#u",
                                    "(seq (if b (event c) #u) (event e))"};
    std::vector<std::string> out;
    for (auto& c : conds)
        for (auto& b : bodies) out.push_back("(while " + c + " " + b + ")");
    return out;
}

std::vector<std::string> try_corpus() {
    std::vector<std::string> bodies{
        "(seq (event a) (if b (throw C (seq (event b) 3)) (event b)))",
        "(if b (throw C 2) (event a))",
        "(seq (event a) (if b (throw C (seq (event c) 4)) #u) (event h))",
        "(seq (if b (throw C 1) #u) (event a) (if b (throw C 2) (event c)))",
        "(seq (event a) (if b (throw D 5) #u) (if b (throw C 6) (event b)))",
        "(event d)",
    };
    std::vector<std::string> handlers{"(event g)", "#u", "(seq (event g) (event a))", "(if b (event g) #u)"};
    std::vector<std::string> out;
    for (auto& b : bodies)
        for (auto& h : handlers) out.push_back("(try " + b + " (catch C (lambda (x : nat) " + h + ")))");
    return out;
}

std::vector<std::string> throw_corpus() {
    return {"(throw C (seq (event a) 3))", "(throw D (seq (event a) (event b) 1))", "(throw C 7)",
            "(throw C (if b (seq (event c) 1) 2))"};
}

}  // namespace

int main() {
    Fixture f;

    criterion(1, "checked-exception language is d.a.b + d.g", [&](Verdict& v) {
        auto t0 = Clock::now();
        auto o = tc::check_program(f.checker, f.prog(kCheckedException), {{"c", lang::t_bool()}}).outcome;
        double s = seconds_since(t0);
        v.expect(o.eff.P.empty() && o.eff.C.empty(), "no residual prophecies or controls");
        v.expect(f.lang_eq(o.eff.U, "d.a.b + d.g"), "underlying = d.a.b + d.g, got " + ce::str(o.eff));
        v.expect(s < 1.0, "under 1 s");
    });

    criterion(2, "continuation invocation prompt effect is {| | d.a.b + d.h}", [&](Verdict& v) {
        lang::TyEnv env{{"c", lang::t_bool()}, {"k", lang::parse_type("(cont t unit {| | h} unit)", *f.q)}};
        auto o = tc::check_program(f.checker, f.prog(kResumeOther), env).outcome;
        v.expect(o.eff.P.empty(), "no prophecies");
        v.expect(o.eff.C.empty(), "no controls");
        v.expect(f.lang_eq(o.eff.U, "d.a.b + d.h"), "underlying = d.a.b + d.h, got " + ce::str(o.eff));
    });

    criterion(3, "self-invoking capture validates a.a* <= a* and rejects an extra event", [&](Verdict& v) {
        auto o = tc::check_program(f.checker, f.prog(self_loop(""))).outcome;
        std::vector<tc::Note> controls;
        for (auto& n : o.notes)
            if (n.rule == "V-Effects" && n.detail == "t controls") controls.push_back(n);
        v.expect(controls.size() == 1, "exactly one control validation note");
        if (controls.size() == 1) {
            auto lhs = lang::parse_annotated_effect(controls[0].lhs, *f.q);
            auto rhs = lang::parse_annotated_effect(controls[0].rhs, *f.q);
            bool shape = lhs.C.size() == 1 && rhs.C.size() == 1 && lhs.P.empty() && rhs.P.empty();
            v.expect(shape, "note compares single replace controls");
            if (shape) {
                v.expect(f.q->equal(lhs.C[0]->prefix, f.u("a.a*")), "lhs prefix a.a*, got " + controls[0].lhs);
                v.expect(f.q->equal(rhs.C[0]->prefix, f.u("a*")), "rhs prefix a*, got " + controls[0].rhs);
            }
        }
        try {
            tc::check_program(f.checker, f.prog(self_loop("(event b) ")));
            v.expect(false, "mutant is rejected");
        } catch (const tc::TypeError& e) {
            v.expect(e.rule == "V-Effects" && e.clause == "prophecy-controls",
                     "V-Effects prophecy violation, got " + e.rule + "/" + e.clause);
        }
    });

    criterion(4, "while expansion <= D-While with equal underlying languages", [&](Verdict& v) {
        auto t0 = Clock::now();
        auto corpus = while_corpus();
        int agree = 0;
        for (auto& src : corpus) {
            auto d = tc::derive(f.checker, f.prog(src), f.boolB);
            bool ok = d.rule == "D-While" && d.leq && d.underlying_equal;
            v.expect(ok, src + ": " + d.rule + " full " + ce::str(d.full) + " derived " + ce::str(d.derived));
            agree += ok;
        }
        v.detail << " " << agree << "/" << corpus.size() << " programs";
        v.expect(agree >= 10, "at least 10 programs");
        v.expect(seconds_since(t0) < 5.0, "under 5 s");
    });

    criterion(5, "try/catch and throw expansions match D-TryCatch and D-Throw exactly", [&](Verdict& v) {
        int tries = 0, throws = 0;
        for (auto& src : try_corpus()) {
            auto d = tc::derive(f.checker, f.prog(src), f.boolB);
            bool ok = d.rule == "D-TryCatch" && d.equiv;
            v.expect(ok, src + ": full " + ce::str(d.full) + " derived " + ce::str(d.derived));
            tries += ok;
        }
        for (auto& src : throw_corpus()) {
            auto d = tc::derive(f.checker, f.prog(src), f.boolB);
            bool ok = d.rule == "D-Throw" && d.equiv;
            v.expect(ok, src + ": full " + ce::str(d.full) + " derived " + ce::str(d.derived));
            throws += ok;
        }
        v.detail << " " << tries << " try, " << throws << " throw";
        v.expect(tries >= 10, "at least 10 try programs");
    });

    criterion(6, "pure generator checks under D-Iterate with latent {| | %e}", [&](Verdict& v) {
        auto fn = f.checker.typecheck({}, lang::expand(f.prog(pure_generator()), f.checker, {}));
        auto o = tc::derived_iterate(*f.q, fn.ty, "init", "gen", f.u("%e"));
        auto h = lang::head(o.ty);
        v.expect(o.ty->str() == "(-> unit {| | %e} (option bool))", "iterator type, got " + o.ty->str());
        v.expect(h->latent.P.empty() && h->latent.C.empty() && f.lang_eq(h->latent.U, "%e"), "latent effect unit");
        auto shape = tc::iterate_shape(fn.ty, "gen");
        bool mu = false;
        for (auto& p : shape.yieldPrediction.P) mu = mu || p->kind == ce::Prophecy::Kind::Mu;
        for (auto& p : shape.yieldPrediction.P)
            if (p->kind == ce::Prophecy::Kind::Proph)
                for (auto& inner : p->predicted.P) mu = mu || inner->kind == ce::Prophecy::Kind::Mu;
        v.expect(mu, "yield prediction carries a Mu prophecy");
        for (auto* P : {&shape.body.P, &shape.yieldPrediction.P}) {
            auto bad = tc::genprophs_check(*f.q, *P, "gen", f.u("%e"), lang::t_bool());
            v.expect(!bad, "genprophs_check: " + (bad ? bad->str() : std::string()));
        }
        auto whole = tc::check_program(f.checker, f.prog("(iterate init gen " + pure_generator() + ")")).outcome;
        v.expect(lang::subtype(whole.ty, o.ty), "expansion type below derived, got " + whole.ty->str());
    });

    criterion(7, "algebra laws: 500 trace, 500 label-set, 300 continuation-effect samples", [&](Verdict& v) {
        auto t0 = Clock::now();
        auto trace = quantale::make_trace(reglang::Alphabet::parse_list("a,b"));
        auto labels = quantale::make_labels({"x", "y", "z"});
        std::vector<quantale::LawReport> reps;
        reps.push_back(quantale::law_suite(*trace, [&](std::mt19937& r) { return trace->sample(r, 4); }, 500, 7));
        reps.push_back(quantale::law_suite(*labels, [&](std::mt19937& r) { return labels->sample(r, 0); }, 500, 7));
        std::vector<ce::Tag> tags{"t", "u"};
        std::vector<ce::Annot> types{lang::t_unit(), lang::t_nat()};
        reps.push_back(ce::ce_law_suite(
            *trace, [&](std::mt19937& r) { return ce::sample_effect(*trace, r, tags, types, 1); }, 300, 7));
        size_t laws = 0;
        for (auto& rep : reps) {
            for (auto& l : rep.laws) {
                v.expect(l.passed, rep.instance + " " + l.law + ": " + l.counterexample);
                v.expect(l.checked >= (rep.instance.rfind("C(", 0) == 0 ? 300 : 500), rep.instance + " " + l.law + " sample count");
            }
            laws += rep.laws.size();
        }
        v.detail << " " << laws << " laws";
        v.expect(seconds_since(t0) < 60.0, "under 60 s");
    });

    criterion(8, "dynamic soundness audit over 500 generated programs", [&](Verdict& v) {
        auto t0 = Clock::now();
        auto q3 = quantale::make_trace(reglang::Alphabet::parse_list("a,b,c"));
        tc::Checker c3{q3};
        auto corpus = interp::fuzz_corpus(c3, {"a", "b", "c"}, 500, 7);
        size_t done = 0, fuel = 0, stuck = 0, steps = 0, bad = 0;
        for (auto& src : corpus) {
            auto checked = tc::check_program(c3, lang::parse_program(src, *q3));
            auto rep = interp::audit_run(c3, checked.expanded, 400);
            steps += rep.steps.size();
            switch (rep.run.outcome) {
                case interp::RunResult::Outcome::Done: ++done; break;
                case interp::RunResult::Outcome::FuelExhausted: ++fuel; break;
                case interp::RunResult::Outcome::Stuck: ++stuck; break;
            }
            if (!rep.passed() && bad++ == 0) v.expect(false, src + ": " + rep.trace_detail);
        }
        v.detail << " " << corpus.size() << " programs, " << steps << " steps: " << done << " done, " << fuel
                 << " fuel-exhausted, " << stuck << " stuck, " << bad << " failures";
        v.expect(corpus.size() >= 500, "at least 500 programs");
        v.expect(bad == 0 && stuck == 0, "zero failures");
        v.expect(seconds_since(t0) < 120.0, "under 120 s");
    });

    criterion(9, "iteration over-approximation audit, bound 16", [&](Verdict& v) {
        auto trace = quantale::make_trace(reglang::Alphabet::parse_list("a,b"));
        std::vector<ce::Tag> tags{"t", "u"};
        std::vector<ce::Annot> types{lang::t_unit(), lang::t_nat()};
        auto audit = ce::iteration_audit(
            *trace, [&](std::mt19937& r) { return ce::sample_effect(*trace, r, tags, types, 1); }, 100, 16, 7);
        v.detail << " " << audit.checked << " effects";
        v.expect(audit.checked >= 100, "at least 100 effects with prophecies");
        v.expect(audit.failures == 0, "zero failures, witness " + audit.witness);
    });

    return failures ? 1 : 0;
}
