#include "seqeff/typechecker.hpp"

namespace seqeff::tc {

using lang::Expr;
using lang::Ty;
using K = Expr::Kind;
using TK = Ty::Kind;

namespace {

std::string describe(const std::string& rule, const std::string& msg) { return rule + ": " + msg; }

}  // namespace

TypeError::TypeError(std::string r, size_t p, const std::string& msg, std::string c, std::string l, std::string rr)
    : std::runtime_error(describe(r, msg) + " at offset " + std::to_string(p)),
      rule(std::move(r)),
      clause(std::move(c)),
      pos(p),
      lhs(std::move(l)),
      rhs(std::move(rr)) {}

std::string Violation::str() const {
    std::string s = clause + " fails for " + element;
    if (!lhs.empty() || !rhs.empty()) s += ": " + lhs + " is not below " + rhs;
    return s;
}

namespace {

std::string show(const std::vector<ce::ControlP>& cs) { return ce::str(CE{{}, cs, std::nullopt}); }
std::string show(const std::vector<ce::ProphP>& ps) { return ce::str(CE{ps, {}, std::nullopt}); }

// Looks through Mu binders so recursive prophecies are validated by their unfolding.
ce::ProphP unroll(ce::ProphP p) {
    while (p->kind == ce::Prophecy::Kind::Mu) p = ce::unfold(p);
    return p;
}

}  // namespace

std::optional<Violation> valid_effects(const std::vector<ce::ProphP>& P, const std::vector<ce::ControlP>& C,
                                       const ce::OptU&, const Tag& tag, const TyP& resTy, const TyP& handlerArg,
                                       std::vector<Note>* notes) {
    auto note = [&](const std::string& what, const std::string& l, const std::string& r) {
        if (notes) notes->push_back({"V-Effects", tag + " " + what, l, r});
    };
    for (auto& c : ce::unblock(C, tag)) {
        if (c->kind == ce::Control::Kind::Blocked || c->tag != tag) continue;
        auto ty = std::static_pointer_cast<const Ty>(c->ty);
        if (c->kind == ce::Control::Kind::Abort) {
            if (!lang::subtype(ty, handlerArg))
                return Violation{"abort-type", "abort " + tag, ty->str(), handlerArg->str()};
        } else if (!lang::subtype(ty, resTy)) {
            return Violation{"replace-type", "replace " + tag, ty->str(), resTy->str()};
        }
    }
    for (auto& raw : ce::unblock(P, tag)) {
        auto p = unroll(raw);
        if (p->kind != ce::Prophecy::Kind::Proph || p->tag != tag) continue;
        const CE& pred = p->predicted;
        const CE& obs = p->observed;
        auto ty = std::static_pointer_cast<const Ty>(p->ty);
        std::string who = ce::str(CE{{p}, {}, std::nullopt});
        if (p->flavor == ce::Flavor::Compositional) {
            note("cprophecy", ce::str(obs), ce::str(pred));
            if (!ce::ce_leq(obs, pred)) return Violation{"cprophecy-effect", who, ce::str(obs), ce::str(pred)};
        } else {
            auto op = ce::unblock(obs.P, tag), pp = ce::unblock(pred.P, tag);
            auto oc = ce::unblock(obs.C, tag), pc = ce::unblock(pred.C, tag);
            note("prophecies", show(op), show(pp));
            if (!ce::prophs_leq(op, pp)) return Violation{"prophecy-prophecies", who, show(op), show(pp)};
            note("controls", show(oc), show(pc));
            if (!ce::controls_leq(oc, pc)) return Violation{"prophecy-controls", who, show(oc), show(pc)};
            note("underlying", ce::str(obs.U), ce::str(pred.U));
            if (!ce::opt_leq(obs.U, pred.U))
                return Violation{"prophecy-underlying", who, ce::str(obs.U), ce::str(pred.U)};
        }
        if (!lang::subtype(resTy, ty))
            return Violation{p->flavor == ce::Flavor::Compositional ? "cprophecy-type" : "prophecy-type", who,
                             resTy->str(), ty->str()};
    }
    return std::nullopt;
}

CE prompt_effect(const std::vector<ce::ProphP>& P, const std::vector<ce::ControlP>& C, const ce::OptU& u,
                 const Tag& tag, const Eff& handlerU) {
    auto up = ce::unblock(P, tag);
    auto uc = ce::unblock(C, tag);
    CE r;
    r.P = ce::filter_prophecies(up, handlerU, tag);
    r.C = ce::filter_controls(uc, tag);
    r.U = u;
    for (auto& q : ce::project(uc, handlerU, tag)) r.U = ce::opt_join(r.U, q);
    return ce::normalize(std::move(r));
}

namespace {

struct Typed {
    TyP ty;
    CE eff;
};

class Infer {
public:
    Infer(const Quantale& q, std::vector<Note>& notes) : q_(q), notes_(notes) {}

    Typed go(const TyEnv& env, const ExprP& e) {
        Typed t = node(env, e);
        t.eff = ce::normalize(std::move(t.eff));
        if (ce::underlying_top(t.eff))
            fail("Top", e, "effect " + ce::str(t.eff) + " contains the error element", "err");
        return t;
    }

private:
    [[noreturn]] void fail(const std::string& rule, const ExprP& e, const std::string& msg,
                           const std::string& clause = {}, const std::string& l = {}, const std::string& r = {}) {
        throw TypeError(rule, e->pos, msg, clause, l, r);
    }

    void need_sub(const std::string& rule, const ExprP& e, const TyP& s, const TyP& t, const std::string& what) {
        if (!lang::subtype(s, t)) fail(rule, e, what + ": " + s->str() + " is not a subtype of " + t->str(), "subtype",
                                       s->str(), t->str());
    }

    CE unit() const { return ce::ce_unit(q_); }

    TyP join_types(const std::string& rule, const ExprP& e, const TyP& a, const TyP& b) {
        auto j = lang::type_join(a, b);
        if (!j) fail(rule, e, "branches have incompatible types " + a->str() + " and " + b->str(), "join");
        return *j;
    }

    // Function-position type: Fun/Cont/Comp after unfolding; Any gives no behavior.
    TyP callee(const std::string& rule, const ExprP& e, const TyP& t) {
        auto h = lang::head(t);
        if (h->kind == TK::Fun || h->kind == TK::Cont || h->kind == TK::Comp || h->kind == TK::Any) return h;
        fail(rule, e, "cannot apply a value of type " + t->str(), "callee");
    }

    Typed node(const TyEnv& env, const ExprP& e) {
        switch (e->kind) {
            case K::Var: {
                auto it = env.find(e->name);
                if (it == env.end()) fail("T-Var", e, "unbound variable " + e->name);
                return {it->second, unit()};
            }
            case K::Lambda: {
                TyEnv inner = env;
                inner[e->name] = e->ty;
                auto b = go(inner, e->kids[0]);
                return {lang::t_fun(e->ty, b.eff, b.ty), unit()};
            }
            case K::App: return app(env, e);
            case K::If: {
                auto c = go(env, e->kids[0]);
                need_sub("T-If", e, c.ty, lang::t_bool(), "condition");
                auto t = go(env, e->kids[1]);
                auto f = go(env, e->kids[2]);
                return {join_types("T-If", e, t.ty, f.ty), ce::ce_seq(c.eff, ce::ce_join(t.eff, f.eff))};
            }
            case K::Prompt: return prompt(env, e);
            case K::CallCC:
            case K::CallComp: return capture(env, e);
            case K::Abort: {
                auto a = go(env, e->kids[0]);
                need_sub("T-Abort", e, a.ty, e->ty, "thrown value");
                CE ctl{{}, {ce::mk_abort(e->name, q_.unit(), e->ty)}, std::nullopt};
                return {lang::t_any(), ce::ce_seq(a.eff, ctl)};
            }
            case K::ContVal: return contval(env, e);
            case K::CompVal: {
                auto h = lang::head(e->ty);
                if (h->kind != TK::Comp) fail("T-CompC", e, "composable continuation value has type " + e->ty->str());
                auto r = go(env, lang::plug(e->kids[0], lang::e_hole(h->a, unit())));
                need_sub("T-CompC", e, r.ty, h->b, "context result");
                if (!ce::ce_leq(r.eff, h->latent))
                    fail("T-CompC", e, "context effect exceeds the latent effect", "latent", ce::str(r.eff),
                         ce::str(h->latent));
                return {e->ty, unit()};
            }
            case K::Hole: return {e->ty, e->eff};
            case K::Prim: return prim(env, e);
            case K::UnitLit: return {lang::t_unit(), unit()};
            case K::True:
            case K::False: return {lang::t_bool(), unit()};
            case K::Nat: return {lang::t_nat(), unit()};
            case K::Let: {
                auto b = go(env, e->kids[0]);
                TyEnv inner = env;
                inner[e->name] = b.ty;
                auto r = go(inner, e->kids[1]);
                return {r.ty, ce::ce_seq(b.eff, r.eff)};
            }
            case K::Seq: {
                auto a = go(env, e->kids[0]);
                auto b = go(env, e->kids[1]);
                return {b.ty, ce::ce_seq(a.eff, b.eff)};
            }
            case K::Some: {
                auto a = go(env, e->kids[0]);
                return {lang::t_option(a.ty), a.eff};
            }
            case K::None: return {lang::t_option(e->ty), unit()};
            case K::Inl: {
                auto a = go(env, e->kids[0]);
                return {lang::t_sum(a.ty, e->ty), a.eff};
            }
            case K::Inr: {
                auto a = go(env, e->kids[0]);
                return {lang::t_sum(e->ty, a.ty), a.eff};
            }
            case K::Case: {
                auto s = go(env, e->kids[0]);
                auto h = lang::head(s.ty);
                TyEnv l = env, r = env;
                if (h->kind == TK::Option) {
                    l[e->name] = lang::t_unit();
                    r[e->name2] = h->a;
                } else if (h->kind == TK::Sum) {
                    l[e->name] = h->a;
                    r[e->name2] = h->b;
                } else if (h->kind == TK::Any) {
                    l[e->name] = r[e->name2] = lang::t_any();
                } else {
                    fail("T-Case", e, "scrutinee has type " + s.ty->str() + ", expected an option or sum");
                }
                auto a = go(l, e->kids[1]);
                auto b = go(r, e->kids[2]);
                return {join_types("T-Case", e, a.ty, b.ty), ce::ce_seq(s.eff, ce::ce_join(a.eff, b.eff))};
            }
            case K::Loc: return {lang::t_ref(e->ty), unit()};
            case K::Loop:
            case K::While:
            case K::Try:
            case K::Throw:
            case K::Iterate: fail("T-Macro", e, "macro form must be expanded before checking");
        }
        fail("T-Unknown", e, "unknown expression form");
    }

    Typed app(const TyEnv& env, const ExprP& e) {
        auto f = go(env, e->kids[0]);
        auto a = go(env, e->kids[1]);
        auto h = callee("T-App", e, f.ty);
        CE pre = ce::ce_seq(f.eff, a.eff);
        switch (h->kind) {
            case TK::Fun:
                need_sub("T-App", e, a.ty, h->a, "argument");
                return {h->b, ce::ce_seq(pre, h->latent)};
            case TK::Comp:
                need_sub("T-AppComp", e, a.ty, h->a, "argument");
                return {h->b, ce::ce_seq(pre, h->latent)};
            case TK::Cont: {
                need_sub("T-AppCont", e, a.ty, h->a, "argument");
                const Tag& tag = h->name;
                const CE& lat = h->latent;
                CE jump;
                jump.P = ce::block(lat.P, tag);
                jump.C = ce::block(lat.C, tag);
                auto rep = ce::left_acc_set(lat.U, {ce::mk_replace(tag, q_.unit(), h->b)});
                jump.C.insert(jump.C.end(), rep.begin(), rep.end());
                return {lang::t_any(), ce::ce_seq(pre, jump)};
            }
            default: return {lang::t_any(), ce::ce_seq(pre, ce::ce_bot())};
        }
    }

    Typed prompt(const TyEnv& env, const ExprP& e) {
        const Tag& tag = e->name;
        auto b = go(env, e->kids[0]);
        const auto& hx = e->kids[1];
        if (!lang::is_value(*hx)) fail("T-Prompt", hx, "handler must be a value", "handler");
        auto h = go(env, hx);
        auto ht = lang::head(h.ty);
        if (ht->kind != TK::Fun) fail("T-Prompt", hx, "handler has type " + h.ty->str() + ", expected a function", "handler");
        if (!ht->latent.P.empty() || !ht->latent.C.empty() || !ht->latent.U)
            fail("T-Prompt", hx, "handler latent effect " + ce::str(ht->latent) + " must be control-free", "handler");
        auto res = join_types("T-Prompt", e, b.ty, ht->b);
        if (auto v = valid_effects(b.eff.P, b.eff.C, b.eff.U, tag, res, ht->a, &notes_))
            fail("V-Effects", e, v->str(), v->clause, v->lhs, v->rhs);
        return {res, prompt_effect(b.eff.P, b.eff.C, b.eff.U, tag, *ht->latent.U)};
    }

    Typed capture(const TyEnv& env, const ExprP& e) {
        bool comp = e->kind == K::CallComp;
        std::string rule = comp ? "T-CallComp" : "T-CallCont";
        const Tag& tag = e->name;
        auto f = go(env, e->kids[0]);
        auto ft = lang::head(f.ty);
        if (ft->kind != TK::Fun) fail(rule, e, "body has type " + f.ty->str() + ", expected a function");
        auto param = lang::head(ft->a);
        if (param->kind != (comp ? TK::Comp : TK::Cont) || (!comp && param->name != tag))
            fail(rule, e, "body parameter type " + ft->a->str() + " is not a " + (comp ? "composable " : "") +
                              "continuation for " + tag);
        TyP tau = param->a;
        TyP given = comp ? lang::t_comp(tau, e->eff, e->ty) : lang::t_cont(tag, tau, e->eff, e->ty);
        need_sub(rule, e, given, ft->a, "captured continuation");
        need_sub(rule, e, ft->b, tau, "body result");
        if (!ce::nontrivial(e->eff))
            fail(rule, e, "prediction " + ce::str(e->eff) + " is trivial", "nontrivial");
        auto p = ce::mk_proph(tag, e->eff, e->ty, unit(), comp ? ce::Flavor::Compositional : ce::Flavor::Capture);
        CE proph{{p}, {}, q_.unit()};
        return {tau, ce::ce_seq(ce::ce_seq(f.eff, ft->latent), proph)};
    }

    Typed contval(const TyEnv& env, const ExprP& e) {
        auto h = lang::head(e->ty);
        if (h->kind != TK::Cont) fail("T-ContC", e, "continuation value has type " + e->ty->str());
        const Tag& tag = h->name;
        auto r = go(env, lang::plug(e->kids[0], lang::e_hole(h->a, unit())));
        need_sub("T-ContC", e, r.ty, h->b, "context result");
        const CE& lat = h->latent;
        auto p0 = ce::unblock(r.eff.P, tag), p1 = ce::unblock(lat.P, tag);
        if (!ce::prophs_leq(p0, p1)) fail("T-ContC", e, "context prophecies exceed the latent effect", "prophecies",
                                          show(p0), show(p1));
        auto c0 = ce::unblock(r.eff.C, tag), c1 = ce::unblock(lat.C, tag);
        if (!ce::controls_leq(c0, c1))
            fail("T-ContC", e, "context controls exceed the latent effect", "controls", show(c0), show(c1));
        if (!ce::opt_leq(r.eff.U, lat.U))
            fail("T-ContC", e, "context underlying effect exceeds the latent effect", "underlying", ce::str(r.eff.U),
                 ce::str(lat.U));
        return {e->ty, unit()};
    }

    Typed prim(const TyEnv& env, const ExprP& e) {
        const auto& op = e->name;
        if (op == "event") {
            if (!q_.has_atom(e->name2)) fail("T-Prim", e, "unknown event " + e->name2);
            return {lang::t_unit(), ce::ce_pure(q_.atom(e->name2))};
        }
        std::vector<Typed> args;
        CE eff = unit();
        for (auto& k : e->kids) {
            args.push_back(go(env, k));
            eff = ce::ce_seq(eff, args.back().eff);
        }
        if (op == "ref" && args.size() == 1) {
            need_sub("T-Prim", e, args[0].ty, e->ty, "initial cell contents");
            return {lang::t_ref(e->ty), eff};
        }
        if ((op == "get" && args.size() == 1) || (op == "set" && args.size() == 2)) {
            auto r = lang::head(args[0].ty);
            if (r->kind == TK::Any) return {lang::t_any(), eff};
            if (r->kind != TK::Ref) fail("T-Prim", e, op + " expects a reference, got " + args[0].ty->str());
            if (op == "get") return {r->a, eff};
            need_sub("T-Prim", e, args[1].ty, r->a, "stored value");
            return {lang::t_unit(), eff};
        }
        fail("T-Prim", e, "unknown primitive " + op);
    }

    const Quantale& q_;
    std::vector<Note>& notes_;
};

}  // namespace

Outcome Checker::typecheck(const TyEnv& env, const ExprP& e) const {
    Outcome out;
    Infer in(*q_, out.notes);
    auto t = in.go(env, e);
    out.ty = t.ty;
    out.eff = t.eff;
    return out;
}

lang::Oracle::Result Checker::infer(const TyEnv& env, const ExprP& e) const {
    auto o = typecheck(env, e);
    return {o.ty, o.eff};
}

Outcome Checker::context_infer(const TyEnv& env, const ExprP& ctx, const TyP& holeTy, const CE& holeEff) const {
    return typecheck(env, lang::plug(ctx, lang::e_hole(holeTy, holeEff)));
}

Checked check_program(const Checker& c, const ExprP& e, const TyEnv& env) {
    auto x = lang::expand(e, c, env);
    auto out = c.typecheck(env, x);
    if (!out.eff.P.empty() || !out.eff.C.empty())
        throw TypeError("Top", e->pos, "program leaves unresolved control behavior " + ce::str(out.eff), "open-control");
    return {x, std::move(out)};
}

}  // namespace seqeff::tc
