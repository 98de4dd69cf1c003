#include "seqeff/langcore.hpp"

namespace seqeff::lang {

using K = Expr::Kind;

std::string exn_tag(const std::string& exn) { return "%exn-" + exn; }

TyP loop_cont_type(const Tag& tag, const CE& predicted) {
    return t_mu("%X", t_cont(tag, t_var("%X"), predicted, t_unit()));
}

CE loop_prediction(const Quantale& q, const Tag& tag, const CE& body) {
    const auto& qe = body.U;
    ce::OptU qp = qe ? ce::opt_iterate(q, qe) : std::nullopt;
    std::vector<ce::ControlP> cp = qe ? ce::left_acc_set(qp, body.C) : body.C;
    if (qp) cp.push_back(ce::mk_replace(tag, *qp, t_unit()));
    cp = ce::normalize(std::move(cp));

    // Invoking the captured continuation contributes (P_p, C_p + Q_p |> replace, Bot) once
    // unblocked; the replace entry is already in C_p.
    const auto& pe = body.P;
    auto pp = ce::mu_close(pe.size(), [&](size_t i, const std::vector<ce::ProphP>& S) {
        return ce::right_acc(pe[i], CE{S, cp, std::nullopt});
    });
    return ce::normalize(CE{std::move(pp), std::move(cp), qp});
}

CE while_prediction(const Quantale& q, const Tag& tag, const CE& cond, const CE& body) {
    ce::OptU r = ce::opt_seq(body.U, cond.U);
    ce::OptU rs = ce::opt_iterate(q, r);
    std::vector<ce::ControlP> once = body.C;
    auto after = ce::left_acc_set(body.U, cond.C);
    once.insert(once.end(), after.begin(), after.end());
    auto cp = ce::left_acc_set(rs, once);
    cp.push_back(ce::mk_replace(tag, *rs, t_unit()));
    cp = ce::normalize(std::move(cp));

    const auto& pe = body.P;
    const auto& pc = cond.P;
    auto pp = ce::mu_close(pe.size() + pc.size(), [&](size_t i, const std::vector<ce::ProphP>& S) {
        CE tail = ce::ce_join(CE{S, cp, std::nullopt}, ce::ce_unit(q));
        if (i < pe.size()) return ce::right_acc(pe[i], ce::ce_seq(cond, tail));
        return ce::right_acc(pc[i - pe.size()], tail);
    });
    return ce::normalize(CE{std::move(pp), std::move(cp), rs});
}

namespace {

class Expander {
public:
    Expander(const Oracle& o, const ExprP& root) : o_(o), q_(o.quantale()) { collect_names(root, used_); }

    ExprP go(const ExprP& e, const TyEnv& env) {
        switch (e->kind) {
            case K::Lambda: {
                TyEnv inner = env;
                inner[e->name] = e->ty;
                return rebuild(e, {go(e->kids[0], inner)});
            }
            case K::Let: {
                auto bound = go(e->kids[0], env);
                TyEnv inner = env;
                inner[e->name] = infer(env, bound, "let-bound expression").ty;
                return rebuild(e, {bound, go(e->kids[1], inner)});
            }
            case K::Case: {
                auto scrut = go(e->kids[0], env);
                auto t = head(infer(env, scrut, "case scrutinee").ty);
                TyEnv l = env, r = env;
                if (t->kind == Ty::Kind::Option) {
                    l[e->name] = t_unit();
                    r[e->name2] = t->a;
                } else if (t->kind == Ty::Kind::Sum) {
                    l[e->name] = t->a;
                    r[e->name2] = t->b;
                } else {
                    throw ExpandError("case scrutinee has type " + t->str() + ", expected an option or sum");
                }
                return rebuild(e, {scrut, go(e->kids[1], l), go(e->kids[2], r)});
            }
            case K::Loop: return loop(go(e->kids[0], env), env);
            case K::While: return while_(go(e->kids[0], env), go(e->kids[1], env), env);
            case K::Try: return e_prompt(exn_tag(e->name), go(e->kids[0], env), go(e->kids[1], env));
            case K::Throw: {
                auto arg = go(e->kids[0], env);
                return e_abort(exn_tag(e->name), infer(env, arg, "thrown expression").ty, arg);
            }
            case K::Iterate: return iterate(e->name, e->name2, go(e->kids[0], env), env);
            default: {
                if (e->kids.empty()) return e;
                std::vector<ExprP> ks;
                for (auto& k : e->kids) ks.push_back(go(k, env));
                return rebuild(e, std::move(ks));
            }
        }
    }

private:
    static ExprP rebuild(const ExprP& e, std::vector<ExprP> kids) {
        auto c = std::make_shared<Expr>(*e);
        c->kids = std::move(kids);
        return c;
    }

    std::string fresh(const std::string& stem) {
        for (;;) {
            std::string n = "%" + stem + std::to_string(++counter_);
            if (used_.insert(n).second) return n;
        }
    }

    Oracle::Result infer(const TyEnv& env, const ExprP& e, const std::string& what) {
        try {
            return o_.infer(env, e);
        } catch (const std::exception& ex) {
            throw ExpandError("cannot expand: " + what + " does not check: " + ex.what());
        }
    }

    ExprP self_capture(const Tag& tag, const CE& predicted, const std::string& cc, ExprP body) {
        auto k = fresh("k");
        auto kt = loop_cont_type(tag, predicted);
        auto capture = e_callcc(tag, predicted, t_unit(), e_lambda(k, kt, e_var(k)));
        return e_let(cc, capture, std::move(body));
    }

    ExprP unit_handler() { return e_lambda(fresh("_"), t_unit(), e_unit()); }

    ExprP loop(const ExprP& body, const TyEnv& env) {
        auto chi = infer(env, body, "loop body").eff;
        auto tag = fresh("loop");
        auto cc = fresh("cc");
        auto pred = loop_prediction(q_, tag, chi);
        auto inner = e_seq(body, e_app(e_var(cc), e_var(cc)));
        return e_prompt(tag, self_capture(tag, pred, cc, inner), unit_handler());
    }

    ExprP while_(const ExprP& cond, const ExprP& body, const TyEnv& env) {
        auto chic = infer(env, cond, "while condition").eff;
        auto chie = infer(env, body, "while body").eff;
        auto tag = fresh("while");
        auto cc = fresh("cc");
        auto pred = while_prediction(q_, tag, chic, chie);
        auto again = e_if(cond, e_app(e_var(cc), e_var(cc)), e_unit());
        auto inner = self_capture(tag, pred, cc, e_seq(body, again));
        return e_prompt(tag, e_if(cond, inner, e_unit()), unit_handler());
    }

    ExprP iterate(const Tag& init, const Tag& gen, const ExprP& f, const TyEnv& env) {
        auto ft = head(infer(env, f, "generator function").ty);
        auto shape = [&](const std::string& m) {
            return ExpandError("iterate: generator function type " + ft->str() + " " + m);
        };
        if (ft->kind != Ty::Kind::Fun) throw shape("is not a function");
        auto yt = head(ft->a);
        if (yt->kind != Ty::Kind::Fun) throw shape("does not take a yield function");
        const CE& ylat = yt->latent;
        if (ylat.P.size() != 1 || ylat.P[0]->kind != ce::Prophecy::Kind::Proph || ylat.P[0]->tag != gen)
            throw shape("must give yield exactly one prophecy for " + gen);
        TyP elem = yt->a;
        CE lc = ylat.P[0]->predicted;
        TyP opt = t_option(elem);
        TyP kt = t_cont(gen, t_unit(), lc, opt);
        TyP slot = t_sum(kt, t_unit());
        TyP cell = t_sum(t_unit(), slot);
        TyP gnt = t_fun(t_unit(), CE{{}, {}, lc.U}, opt);

        auto res = fresh("resumption"), gn = fresh("get-next"), y = fresh("yield"), fin = fresh("finish");
        auto store = [&](const ExprP& v) { return e_prim("set", {e_var(res), v}); };

        auto v1 = fresh("v"), resume = fresh("resume"), r2 = fresh("r"), d = fresh("d"), u1 = fresh("_");
        auto get_next = e_lambda(
            fresh("_"), t_unit(),
            e_case(e_prim("get", {e_var(res)}), u1, e_none(elem), r2,
                   e_case(e_var(r2), resume,
                          e_prompt(gen, e_app(e_var(resume), e_unit()), e_lambda(v1, opt, e_var(v1))), d,
                          e_none(elem))));

        auto val = fresh("val"), k1 = fresh("k");
        auto yield = e_lambda(
            val, elem,
            e_callcc(gen, lc, opt,
                     e_lambda(k1, kt,
                              e_seq(store(e_inr(t_unit(), e_inl(t_unit(), e_var(k1)))),
                                    e_abort(gen, opt, e_some(e_var(val)))))));

        auto finish = e_lambda(fresh("_"), t_unit(),
                               e_seq(store(e_inr(t_unit(), e_inr(kt, e_unit()))), e_abort(gen, opt, e_none(elem))));

        auto k2 = fresh("k"), v2 = fresh("v"), g = fresh("g");
        auto start = e_callcc(gen, lc, opt,
                              e_lambda(k2, kt,
                                       e_seq(store(e_inr(t_unit(), e_inl(t_unit(), e_var(k2)))),
                                             e_abort(init, gnt, e_var(gn)))));
        auto body = e_seq(start, e_seq(e_app(e_app(f, e_var(y)), e_var(fin)), e_app(e_var(fin), e_unit())));
        auto main = e_prompt(init,
                             e_seq(e_prompt(gen, body, e_lambda(v2, opt, e_var(v2))), e_var(gn)),
                             e_lambda(g, gnt, e_var(g)));

        return e_let(res, e_prim("ref", {e_inl(slot, e_unit())}, cell),
                     e_let(gn, get_next, e_let(y, yield, e_let(fin, finish, main))));
    }

    const Oracle& o_;
    const Quantale& q_;
    std::set<std::string> used_;
    int counter_ = 0;
};

}  // namespace

ExprP expand(const ExprP& e, const Oracle& oracle, const TyEnv& env) {
    Expander x(oracle, e);
    return x.go(e, env);
}

}  // namespace seqeff::lang
