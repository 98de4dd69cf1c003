#include <set>

#include "seqeff/typechecker.hpp"

namespace seqeff::tc {

using lang::Ty;
using TK = Ty::Kind;

CE derived_infloop(const Quantale& q, const CE& body) { return ce::ce_iterate(q, body); }

CE derived_while(const Quantale& q, const Eff& condU, const Eff& bodyU) {
    return ce::ce_pure(q.seq(condU, q.iterate(q.seq(bodyU, condU))));
}

namespace {

void aborts_only(const CE& x, const Tag& loopTag, const std::string& what) {
    if (!x.P.empty()) throw DerivedError(what + " effect has prophecies");
    for (auto& c : x.C) {
        if (c->kind != ce::Control::Kind::Abort) throw DerivedError(what + " effect has a non-abort control effect");
        if (c->tag == loopTag) throw DerivedError(what + " effect aborts to the loop tag " + loopTag);
    }
}

void append(std::vector<ce::ControlP>& out, const std::vector<ce::ControlP>& more) {
    out.insert(out.end(), more.begin(), more.end());
}

}  // namespace

CE derived_aborting_while(const Quantale& q, const CE& cond, const CE& body, const Tag& loopTag) {
    aborts_only(cond, loopTag, "condition");
    aborts_only(body, loopTag, "body");
    const auto& qc = cond.U;
    const auto& qe = body.U;
    auto rs = ce::opt_iterate(q, ce::opt_seq(qe, qc));
    auto head = ce::opt_seq(qc, rs);
    CE r;
    r.C = cond.C;
    append(r.C, ce::left_acc_set(ce::opt_seq(qc, qe), cond.C));
    append(r.C, ce::left_acc_set(head, body.C));
    append(r.C, ce::left_acc_set(ce::opt_seq(head, qe), cond.C));
    r.U = head;
    return ce::normalize(std::move(r));
}

CE derived_trycatch(const Quantale&, const CE& body, const Tag& exnTag, const TyP& exnTy, const Eff& handlerU) {
    if (!body.P.empty()) throw DerivedError("try body has prophecies");
    CE r;
    r.U = body.U;
    for (auto& c : body.C) {
        if (c->kind != ce::Control::Kind::Abort) throw DerivedError("try body has a non-abort control effect");
        if (c->tag != exnTag) {
            r.C.push_back(c);
            continue;
        }
        auto ty = std::static_pointer_cast<const Ty>(c->ty);
        if (!lang::subtype(ty, exnTy))
            throw DerivedError("thrown type " + ty->str() + " is not a subtype of " + exnTy->str());
        r.U = ce::opt_join(r.U, quantale::q_seq(c->prefix, handlerU));
    }
    return ce::normalize(std::move(r));
}

CE derived_throw(const Eff& argU, const std::string& exnName, const TyP& exnTy) {
    return CE{{}, {ce::mk_abort(lang::exn_tag(exnName), argU, exnTy)}, std::nullopt};
}

namespace {

class GenProphs {
public:
    GenProphs(const Quantale& q, const Tag& gen, const Eff& E, const TyP& elemTy)
        : gen_(gen), estar_(q.iterate(E)), res_(lang::t_option(elemTy)) {
        bound_.push_back(ce::mk_abort(gen, estar_, res_));
    }

    std::optional<Violation> check(const std::vector<ce::ProphP>& P) {
        for (auto& raw : P) {
            if (!seen_.insert(raw->key()).second) continue;
            auto p = raw;
            while (p->kind == ce::Prophecy::Kind::Mu) p = ce::unfold(p);
            auto unb = ce::unblock(std::vector<ce::ProphP>{p}, gen_);
            for (auto& u : unb) {
                auto v = u;
                while (v->kind == ce::Prophecy::Kind::Mu) v = ce::unfold(v);
                if (auto bad = one(v)) return bad;
            }
        }
        return std::nullopt;
    }

private:
    std::optional<Violation> one(const ce::ProphP& p) {
        std::string who = ce::str(CE{{p}, {}, std::nullopt});
        if (p->kind != ce::Prophecy::Kind::Proph || p->tag != gen_)
            return Violation{"target", who, ce::outer_tag(*p), gen_};
        auto ty = std::static_pointer_cast<const Ty>(p->ty);
        if (!lang::same_type(ty, res_)) return Violation{"result-type", who, ty->str(), res_->str()};
        const CE& pred = p->predicted;
        const CE& obs = p->observed;
        if (!ce::controls_leq(pred.C, bound_))
            return Violation{"predicted-controls", who, ce::str(CE{{}, pred.C, std::nullopt}),
                             ce::str(CE{{}, bound_, std::nullopt})};
        if (!ce::opt_leq(pred.U, estar_)) return Violation{"predicted-underlying", who, ce::str(pred.U), estar_->str()};
        auto op = ce::unblock(obs.P, gen_), pp = ce::unblock(pred.P, gen_);
        if (!ce::prophs_leq(op, pp))
            return Violation{"observed-prophecies", who, ce::str(CE{op, {}, std::nullopt}),
                             ce::str(CE{pp, {}, std::nullopt})};
        if (!ce::controls_leq(obs.C, pred.C))
            return Violation{"observed-controls", who, ce::str(CE{{}, obs.C, std::nullopt}),
                             ce::str(CE{{}, pred.C, std::nullopt})};
        if (!ce::opt_leq(obs.U, pred.U)) return Violation{"observed-underlying", who, ce::str(obs.U), ce::str(pred.U)};
        return check(pred.P);
    }

    Tag gen_;
    Eff estar_;
    TyP res_;
    std::vector<ce::ControlP> bound_;
    std::set<std::string> seen_;
};

}  // namespace

std::optional<Violation> genprophs_check(const Quantale& q, const std::vector<ce::ProphP>& P, const Tag& gen,
                                         const Eff& E, const TyP& elemTy) {
    GenProphs g(q, gen, E, elemTy);
    return g.check(P);
}

IterateShape iterate_shape(const TyP& fTy, const Tag& gen) {
    auto bad = [&](const std::string& m) { return DerivedError("generator function type " + fTy->str() + " " + m); };
    auto f = lang::head(fTy);
    if (f->kind != TK::Fun) throw bad("is not a function");
    auto y = lang::head(f->a);
    if (y->kind != TK::Fun) throw bad("does not take a yield function");
    const CE& yl = y->latent;
    if (yl.P.size() != 1 || yl.P[0]->kind != ce::Prophecy::Kind::Proph || yl.P[0]->tag != gen)
        throw bad("must give yield exactly one prophecy for " + gen);
    auto g = lang::head(f->b);
    if (g->kind != TK::Fun) throw bad("does not return a function of the finish callback");
    return {y->a, yl.P[0]->predicted, g->latent};
}

Outcome derived_iterate(const Quantale& q, const TyP& fTy, const Tag&, const Tag& gen, const Eff& E) {
    auto s = iterate_shape(fTy, gen);
    Eff estar = q.iterate(E);
    auto opt = lang::t_option(s.elem);
    std::vector<ce::ControlP> bound{ce::mk_abort(gen, estar, opt)};
    if (!ce::controls_leq(s.body.C, bound))
        throw DerivedError("D-Iterate: generator controls " + ce::str(CE{{}, s.body.C, std::nullopt}) +
                           " exceed " + ce::str(CE{{}, bound, std::nullopt}));
    if (!ce::opt_leq(s.body.U, estar))
        throw DerivedError("D-Iterate: generator underlying " + ce::str(s.body.U) + " exceeds " + estar->str());
    if (!ce::opt_leq(s.yieldPrediction.U, estar))
        throw DerivedError("D-Iterate: yield prediction underlying " + ce::str(s.yieldPrediction.U) + " exceeds " +
                           estar->str());
    for (auto* P : {&s.body.P, &s.yieldPrediction.P})
        if (auto v = genprophs_check(q, *P, gen, E, s.elem)) throw DerivedError("GenProphs: " + v->str());
    Outcome out;
    out.ty = lang::t_fun(lang::t_unit(), ce::ce_pure(estar), opt);
    out.eff = ce::ce_unit(q);
    out.notes.push_back({"D-Iterate", gen, ce::str(s.body), ce::str(ce::ce_pure(estar))});
    return out;
}

}  // namespace seqeff::tc

namespace seqeff::tc {

namespace {

bool opt_equal(const ce::OptU& a, const ce::OptU& b) { return ce::opt_leq(a, b) && ce::opt_leq(b, a); }

}  // namespace

Derivation derive(const Checker& c, const ExprP& e, const TyEnv& env) {
    using K = lang::Expr::Kind;
    const Quantale& q = c.quantale();
    auto sub = [&](const ExprP& x) { return c.typecheck(env, lang::expand(x, c, env)); };
    auto u_of = [&](const CE& x, const char* what) {
        if (!x.U) throw DerivedError(std::string(what) + " never returns normally");
        return *x.U;
    };
    Derivation d;
    switch (e->kind) {
        case K::Loop:
            d.rule = "D-FullInfLoop";
            d.derived = derived_infloop(q, sub(e->kids[0]).eff);
            d.derivedTy = lang::t_unit();
            break;
        case K::While: {
            auto cond = sub(e->kids[0]).eff, body = sub(e->kids[1]).eff;
            if (cond.P.empty() && cond.C.empty() && body.P.empty() && body.C.empty()) {
                d.rule = "D-While";
                d.derived = derived_while(q, u_of(cond, "condition"), u_of(body, "body"));
            } else {
                d.rule = "D-AbortingWhile";
                d.derived = derived_aborting_while(q, cond, body, "%while");
            }
            d.derivedTy = lang::t_unit();
            break;
        }
        case K::Try: {
            auto body = sub(e->kids[0]);
            auto h = sub(e->kids[1]);
            auto ht = lang::head(h.ty);
            if (ht->kind != lang::Ty::Kind::Fun) throw DerivedError("handler is not a function");
            d.rule = "D-TryCatch";
            d.derived = derived_trycatch(q, body.eff, lang::exn_tag(e->name), ht->a, u_of(ht->latent, "handler"));
            d.derivedTy = body.ty;
            break;
        }
        case K::Throw: {
            auto arg = sub(e->kids[0]);
            if (!arg.eff.P.empty() || !arg.eff.C.empty()) throw DerivedError("thrown expression has control effects");
            d.rule = "D-Throw";
            d.derived = derived_throw(u_of(arg.eff, "thrown expression"), e->name, arg.ty);
            d.derivedTy = lang::t_any();
            break;
        }
        case K::Iterate: {
            auto f = sub(e->kids[0]);
            auto shape = iterate_shape(f.ty, e->name2);
            Eff E = shape.yieldPrediction.U ? *shape.yieldPrediction.U : q.unit();
            auto o = derived_iterate(q, f.ty, e->name, e->name2, E);
            d.rule = "D-Iterate";
            d.derived = o.eff;
            d.derivedTy = o.ty;
            break;
        }
        default: throw DerivedError("no derived rule for this form; expected loop, while, try, throw or iterate");
    }
    auto full = c.typecheck(env, lang::expand(e, c, env));
    d.full = full.eff;
    d.fullTy = full.ty;
    d.leq = ce::ce_leq(d.full, d.derived) && lang::subtype(d.fullTy, d.derivedTy);
    d.equiv = ce::ce_equiv(d.full, d.derived);
    d.underlying_equal = opt_equal(d.full.U, d.derived.U);
    return d;
}

}  // namespace seqeff::tc
