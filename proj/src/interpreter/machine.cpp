#include "seqeff/interpreter.hpp"

namespace seqeff::interp {

using lang::Expr;
using lang::Ty;
using K = Expr::Kind;

namespace {

ExprP with_kid(const ExprP& e, size_t i, const ExprP& k) {
    auto c = std::make_shared<Expr>(*e);
    c->kids[i] = k;
    return c;
}

// Index of the child to evaluate next, or nullopt when e itself is the redex.
std::optional<size_t> focus(const Expr& e) {
    auto first_nonvalue = [&](size_t from, size_t to) -> std::optional<size_t> {
        for (size_t i = from; i < to; ++i)
            if (!lang::is_value(*e.kids[i])) return i;
        return std::nullopt;
    };
    switch (e.kind) {
        case K::App:
        case K::Prim: return first_nonvalue(0, e.kids.size());
        case K::If:
        case K::Prompt:
        case K::CallCC:
        case K::CallComp:
        case K::Abort:
        case K::Let:
        case K::Seq:
        case K::Some:
        case K::Inl:
        case K::Inr:
        case K::Case: return first_nonvalue(0, 1);
        default: return std::nullopt;
    }
}

}  // namespace

ExprP Decomposition::plug(const ExprP& with) const {
    ExprP cur = with;
    for (auto it = path.rbegin(); it != path.rend(); ++it) cur = with_kid(it->first, it->second, cur);
    return cur;
}

ExprP Decomposition::context() const { return plug(lang::e_hole(lang::t_any(), CE{})); }

std::optional<Decomposition> decompose(const ExprP& e) {
    if (lang::is_value(*e)) return std::nullopt;
    Decomposition d;
    ExprP cur = e;
    for (;;) {
        auto i = focus(*cur);
        if (!i) break;
        d.path.emplace_back(cur, *i);
        cur = cur->kids[*i];
    }
    d.redex = cur;
    return d;
}

namespace {

// Innermost prompt for `tag` on the path, as a path index.
std::optional<size_t> nearest_prompt(const Decomposition& d, const ce::Tag& tag) {
    for (size_t i = d.path.size(); i-- > 0;) {
        const auto& n = d.path[i].first;
        if (n->kind == K::Prompt && n->name == tag && d.path[i].second == 0) return i;
    }
    return std::nullopt;
}

// Context between path index `from` (exclusive) and the redex.
ExprP inner_context(const Decomposition& d, size_t from) {
    Decomposition inner;
    inner.path.assign(d.path.begin() + static_cast<long>(from) + 1, d.path.end());
    return inner.plug(lang::e_hole(lang::t_any(), CE{}));
}

Decomposition prefix(const Decomposition& d, size_t upto) {
    Decomposition p;
    p.path.assign(d.path.begin(), d.path.begin() + static_cast<long>(upto));
    return p;
}

StepResult stuck(std::string why) {
    StepResult r;
    r.kind = StepResult::Kind::Stuck;
    r.reason = std::move(why);
    return r;
}

}  // namespace

StepResult step(State& s, const Quantale& q) {
    auto d = decompose(s.expr);
    if (!d) {
        StepResult r;
        r.kind = StepResult::Kind::Done;
        return r;
    }
    const ExprP& x = d->redex;
    StepResult r;
    r.label = q.unit();
    auto done = [&](const std::string& rule, const ExprP& next) {
        r.rule = rule;
        s.expr = next;
        return r;
    };
    switch (x->kind) {
        case K::App: {
            const auto& f = x->kids[0];
            const auto& v = x->kids[1];
            if (f->kind == K::Lambda) return done("E-App", d->plug(lang::subst(f->kids[0], f->name, v)));
            if (f->kind == K::CompVal) return done("E-InvokeComp", d->plug(lang::plug(f->kids[0], v)));
            if (f->kind == K::ContVal) {
                const auto& tag = lang::head(f->ty)->name;
                auto at = nearest_prompt(*d, tag);
                if (!at) return stuck("continuation invoked outside a prompt for " + tag);
                const auto& pr = d->path[*at].first;
                auto body = lang::plug(f->kids[0], v);
                return done("E-InvokeCC", prefix(*d, *at).plug(lang::e_prompt(tag, body, pr->kids[1])));
            }
            return stuck("application of a non-function " + lang::print(f));
        }
        case K::If:
            if (x->kids[0]->kind == K::True) return done("E-IfTrue", d->plug(x->kids[1]));
            if (x->kids[0]->kind == K::False) return done("E-IfFalse", d->plug(x->kids[2]));
            return stuck("non-boolean condition");
        case K::Prompt: return done("E-PromptVal", d->plug(x->kids[0]));
        case K::CallCC:
        case K::CallComp: {
            bool comp = x->kind == K::CallComp;
            const auto& fn = x->kids[0];
            auto at = nearest_prompt(*d, x->name);
            if (!at) return stuck("capture outside a prompt for " + x->name);
            if (fn->kind != K::Lambda) return stuck("capture body is not a lambda");
            auto param = lang::head(fn->ty);
            auto ctx = inner_context(*d, *at);
            ExprP k = comp ? lang::e_compval(lang::t_comp(param->a, x->eff, x->ty), ctx)
                           : lang::e_contval(lang::t_cont(x->name, param->a, x->eff, x->ty), ctx);
            return done(comp ? "E-CallComp" : "E-CallCC", d->plug(lang::e_app(fn, k)));
        }
        case K::Abort: {
            auto at = nearest_prompt(*d, x->name);
            if (!at) return stuck("unmatched abort to " + x->name);
            const auto& pr = d->path[*at].first;
            return done("E-Abort", prefix(*d, *at).plug(lang::e_app(pr->kids[1], x->kids[0])));
        }
        case K::Prim: {
            const auto& op = x->name;
            if (op == "event") {
                r.label = q.atom(x->name2);
                r.event = x->name2;
                return done("E-PrimApp", d->plug(lang::e_unit()));
            }
            if (op == "ref") {
                s.store.cells.push_back(x->kids[0]);
                return done("E-PrimApp", d->plug(lang::e_loc(s.store.cells.size() - 1, x->ty)));
            }
            const auto& loc = x->kids[0];
            if (loc->kind != K::Loc || loc->num >= s.store.cells.size()) return stuck(op + " on a non-location");
            if (op == "get") return done("E-PrimApp", d->plug(s.store.cells[loc->num]));
            if (op == "set") {
                s.store.cells[loc->num] = x->kids[1];
                return done("E-PrimApp", d->plug(lang::e_unit()));
            }
            return stuck("unknown primitive " + op);
        }
        case K::Let: return done("E-Let", d->plug(lang::subst(x->kids[1], x->name, x->kids[0])));
        case K::Seq: return done("E-Seq", d->plug(x->kids[1]));
        case K::Case: {
            const auto& v = x->kids[0];
            switch (v->kind) {
                case K::None: return done("E-Case", d->plug(lang::subst(x->kids[1], x->name, lang::e_unit())));
                case K::Some: return done("E-Case", d->plug(lang::subst(x->kids[2], x->name2, v->kids[0])));
                case K::Inl: return done("E-Case", d->plug(lang::subst(x->kids[1], x->name, v->kids[0])));
                case K::Inr: return done("E-Case", d->plug(lang::subst(x->kids[2], x->name2, v->kids[0])));
                default: return stuck("case on a non-variant value");
            }
        }
        case K::Var: return stuck("free variable " + x->name);
        default: return stuck("no rule applies to " + lang::print(x));
    }
}

std::string RunResult::trace() const {
    std::string s;
    for (auto& e : events) s += e;
    return s;
}

std::string RunResult::outcome_name() const {
    switch (outcome) {
        case Outcome::Done: return "done";
        case Outcome::Stuck: return "stuck";
        case Outcome::FuelExhausted: return "fuel-exhausted";
    }
    return "";
}

RunResult run(const ExprP& e, const Quantale& q, size_t fuel) {
    RunResult out;
    out.total = q.unit();
    State s{e, {}};
    for (;;) {
        if (lang::is_value(*s.expr)) {
            out.outcome = RunResult::Outcome::Done;
            out.value = s.expr;
            return out;
        }
        if (out.steps >= fuel) {
            out.outcome = RunResult::Outcome::FuelExhausted;
            return out;
        }
        auto r = step(s, q);
        if (r.kind == StepResult::Kind::Stuck) {
            out.outcome = RunResult::Outcome::Stuck;
            out.reason = r.reason;
            return out;
        }
        ++out.steps;
        out.total = q.seq(out.total, r.label);
        if (!r.event.empty()) out.events.push_back(r.event);
    }
}

}  // namespace seqeff::interp
