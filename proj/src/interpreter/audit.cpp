#include "seqeff/interpreter.hpp"

namespace seqeff::interp {

bool AuditReport::passed() const { return trace_ok && failures() == 0; }

size_t AuditReport::failures() const {
    size_t n = 0;
    for (auto& s : steps) n += !s.ok;
    return n;
}

AuditReport audit_run(const tc::Checker& c, const ExprP& e, size_t fuel, const TyEnv& env) {
    const Quantale& q = c.quantale();
    AuditReport rep;
    auto cur = c.typecheck(env, e);
    rep.initial = cur.eff;
    RunResult& out = rep.run;
    out.total = q.unit();
    State s{e, {}};
    for (;;) {
        if (lang::is_value(*s.expr)) {
            out.outcome = RunResult::Outcome::Done;
            out.value = s.expr;
            break;
        }
        if (out.steps >= fuel) {
            out.outcome = RunResult::Outcome::FuelExhausted;
            break;
        }
        auto r = step(s, q);
        if (r.kind == StepResult::Kind::Stuck) {
            out.outcome = RunResult::Outcome::Stuck;
            out.reason = r.reason;
            rep.steps.push_back({out.steps, "stuck", "", false, ce::str(cur.eff), "", r.reason});
            break;
        }
        AuditStep st{out.steps, r.rule, r.label->str(), true, ce::str(cur.eff), "", ""};
        ++out.steps;
        out.total = q.seq(out.total, r.label);
        if (!r.event.empty()) out.events.push_back(r.event);
        try {
            auto next = c.typecheck(env, s.expr);
            CE lhs = ce::ce_seq(ce::ce_pure(r.label), next.eff);
            st.after = ce::str(lhs);
            if (!ce::ce_leq(lhs, cur.eff)) {
                st.ok = false;
                st.detail = "effect grew";
            } else if (!lang::subtype(next.ty, cur.ty)) {
                st.ok = false;
                st.detail = "type " + next.ty->str() + " is not a subtype of " + cur.ty->str();
            }
            cur = std::move(next);
        } catch (const std::exception& ex) {
            st.ok = false;
            st.detail = std::string("reduct does not check: ") + ex.what();
        }
        bool ok = st.ok;
        rep.steps.push_back(std::move(st));
        if (!ok) break;
    }

    const auto& u = rep.initial.U;
    if (out.outcome == RunResult::Outcome::Done) {
        rep.trace_ok = u && q.leq(out.total, *u);
        if (!rep.trace_ok) rep.trace_detail = "trace " + out.total->str() + " is not within " + ce::str(u);
    } else if (out.outcome == RunResult::Outcome::FuelExhausted) {
        // A cut-off run may be heading for an abort whose prefix is not part of U.
        bool fits = u && q.prefix_leq(out.total, *u);
        for (auto& ctl : rep.initial.C) fits = fits || (ctl->kind != ce::Control::Kind::Blocked &&
                                                        q.prefix_leq(out.total, ctl->prefix));
        rep.trace_ok = fits;
        if (!fits) rep.trace_detail = "trace " + out.total->str() + " is not a prefix of " + ce::str(u);
    } else {
        rep.trace_ok = false;
        rep.trace_detail = "run is stuck: " + out.reason;
    }
    return rep;
}

}  // namespace seqeff::interp
