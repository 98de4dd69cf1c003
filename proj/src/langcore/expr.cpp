#include "seqeff/langcore.hpp"

namespace seqeff::lang {

using K = Expr::Kind;

ExprP mk(K k, std::vector<ExprP> kids, std::string name) {
    auto e = std::make_shared<Expr>();
    e->kind = k;
    e->kids = std::move(kids);
    e->name = std::move(name);
    return e;
}

namespace {

std::shared_ptr<Expr> node(K k, std::vector<ExprP> kids = {}, std::string name = {}) {
    auto e = std::make_shared<Expr>();
    e->kind = k;
    e->kids = std::move(kids);
    e->name = std::move(name);
    return e;
}

ExprP with_kids(const ExprP& e, std::vector<ExprP> kids) {
    auto c = std::make_shared<Expr>(*e);
    c->kids = std::move(kids);
    return c;
}

}  // namespace

ExprP e_var(std::string n) { return node(K::Var, {}, std::move(n)); }

ExprP e_lambda(std::string x, TyP ty, ExprP body) {
    auto e = node(K::Lambda, {std::move(body)}, std::move(x));
    e->ty = std::move(ty);
    return e;
}

ExprP e_app(ExprP f, ExprP a) { return node(K::App, {std::move(f), std::move(a)}); }
ExprP e_if(ExprP c, ExprP t, ExprP f) { return node(K::If, {std::move(c), std::move(t), std::move(f)}); }
ExprP e_prompt(Tag tag, ExprP body, ExprP handler) {
    return node(K::Prompt, {std::move(body), std::move(handler)}, std::move(tag));
}

ExprP e_callcc(Tag tag, CE predicted, TyP res, ExprP fn) {
    auto e = node(K::CallCC, {std::move(fn)}, std::move(tag));
    e->eff = std::move(predicted);
    e->ty = std::move(res);
    return e;
}

ExprP e_callcomp(Tag tag, CE predicted, TyP res, ExprP fn) {
    auto e = node(K::CallComp, {std::move(fn)}, std::move(tag));
    e->eff = std::move(predicted);
    e->ty = std::move(res);
    return e;
}

ExprP e_abort(Tag tag, TyP thrown, ExprP arg) {
    auto e = node(K::Abort, {std::move(arg)}, std::move(tag));
    e->ty = std::move(thrown);
    return e;
}

ExprP e_event(std::string sym) {
    auto e = node(K::Prim, {}, "event");
    e->name2 = std::move(sym);
    return e;
}

ExprP e_prim(std::string op, std::vector<ExprP> args, TyP ty) {
    auto e = node(K::Prim, std::move(args), std::move(op));
    e->ty = std::move(ty);
    return e;
}

ExprP e_unit() { return node(K::UnitLit); }

ExprP e_bool(bool b) { return node(b ? K::True : K::False); }

ExprP e_nat(uint64_t n) {
    auto e = node(K::Nat);
    e->num = n;
    return e;
}

ExprP e_let(std::string x, ExprP bound, ExprP body) {
    return node(K::Let, {std::move(bound), std::move(body)}, std::move(x));
}
ExprP e_seq(ExprP a, ExprP b) { return node(K::Seq, {std::move(a), std::move(b)}); }
ExprP e_some(ExprP a) { return node(K::Some, {std::move(a)}); }

ExprP e_none(TyP elem) {
    auto e = node(K::None);
    e->ty = std::move(elem);
    return e;
}

ExprP e_inl(TyP right, ExprP a) {
    auto e = node(K::Inl, {std::move(a)});
    e->ty = std::move(right);
    return e;
}

ExprP e_inr(TyP left, ExprP a) {
    auto e = node(K::Inr, {std::move(a)});
    e->ty = std::move(left);
    return e;
}

ExprP e_case(ExprP scrut, std::string x, ExprP l, std::string y, ExprP r) {
    auto e = node(K::Case, {std::move(scrut), std::move(l), std::move(r)}, std::move(x));
    e->name2 = std::move(y);
    return e;
}

ExprP e_hole(TyP ty, CE eff) {
    auto e = node(K::Hole);
    e->ty = std::move(ty);
    e->eff = std::move(eff);
    return e;
}

ExprP e_loc(uint64_t n, TyP cellTy) {
    auto e = node(K::Loc);
    e->num = n;
    e->ty = std::move(cellTy);
    return e;
}

ExprP e_contval(TyP contTy, ExprP ctx) {
    auto e = node(K::ContVal, {std::move(ctx)});
    e->ty = std::move(contTy);
    return e;
}

ExprP e_compval(TyP compTy, ExprP ctx) {
    auto e = node(K::CompVal, {std::move(ctx)});
    e->ty = std::move(compTy);
    return e;
}

bool is_value(const Expr& e) {
    switch (e.kind) {
        case K::Lambda:
        case K::UnitLit:
        case K::True:
        case K::False:
        case K::Nat:
        case K::None:
        case K::Loc:
        case K::ContVal:
        case K::CompVal: return true;
        case K::Some:
        case K::Inl:
        case K::Inr: return is_value(*e.kids[0]);
        default: return false;
    }
}

bool is_macro(const Expr& e) {
    switch (e.kind) {
        case K::Loop:
        case K::While:
        case K::Try:
        case K::Throw:
        case K::Iterate: return true;
        default: return false;
    }
}

bool has_macros(const ExprP& e) {
    if (is_macro(*e)) return true;
    for (auto& k : e->kids)
        if (has_macros(k)) return true;
    return false;
}

ExprP subst(const ExprP& e, const std::string& x, const ExprP& v) {
    switch (e->kind) {
        case K::Var: return e->name == x ? v : e;
        case K::Lambda:
            if (e->name == x) return e;
            break;
        case K::Let:
            if (e->name == x) return with_kids(e, {subst(e->kids[0], x, v), e->kids[1]});
            break;
        case K::Case:
            return with_kids(e, {subst(e->kids[0], x, v), e->name == x ? e->kids[1] : subst(e->kids[1], x, v),
                                 e->name2 == x ? e->kids[2] : subst(e->kids[2], x, v)});
        default: break;
    }
    if (e->kids.empty()) return e;
    std::vector<ExprP> ks;
    bool changed = false;
    for (auto& k : e->kids) {
        ks.push_back(subst(k, x, v));
        changed |= ks.back() != k;
    }
    return changed ? with_kids(e, std::move(ks)) : e;
}

namespace {

ExprP plug_rec(const ExprP& ctx, const ExprP& e, bool& done) {
    if (ctx->kind == K::Hole) {
        done = true;
        return e;
    }
    if (ctx->kind == K::Lambda || ctx->kind == K::ContVal || ctx->kind == K::CompVal) return ctx;
    for (size_t i = 0; i < ctx->kids.size(); ++i) {
        auto k = plug_rec(ctx->kids[i], e, done);
        if (done) {
            auto ks = ctx->kids;
            ks[i] = k;
            return with_kids(ctx, std::move(ks));
        }
    }
    return ctx;
}

void fv(const ExprP& e, std::set<std::string>& bound, std::set<std::string>& out) {
    auto under = [&](const std::string& x, const ExprP& body) {
        bool fresh = bound.insert(x).second;
        fv(body, bound, out);
        if (fresh) bound.erase(x);
    };
    switch (e->kind) {
        case K::Var:
            if (!bound.count(e->name)) out.insert(e->name);
            return;
        case K::Lambda: under(e->name, e->kids[0]); return;
        case K::Let:
            fv(e->kids[0], bound, out);
            under(e->name, e->kids[1]);
            return;
        case K::Case:
            fv(e->kids[0], bound, out);
            under(e->name, e->kids[1]);
            under(e->name2, e->kids[2]);
            return;
        default:
            for (auto& k : e->kids) fv(k, bound, out);
    }
}

}  // namespace

ExprP plug(const ExprP& ctx, const ExprP& e) {
    bool done = false;
    auto r = plug_rec(ctx, e, done);
    if (!done) throw std::logic_error("context has no hole");
    return r;
}

std::set<std::string> free_vars(const ExprP& e) {
    std::set<std::string> bound, out;
    fv(e, bound, out);
    return out;
}

void collect_names(const ExprP& e, std::set<std::string>& out) {
    if (!e->name.empty()) out.insert(e->name);
    if (!e->name2.empty()) out.insert(e->name2);
    for (auto& k : e->kids) collect_names(k, out);
}

std::string print(const ExprP& e) {
    auto p = [](const ExprP& x) { return print(x); };
    switch (e->kind) {
        case K::Var: return e->name;
        case K::Lambda: return "(lambda (" + e->name + " : " + e->ty->str() + ") " + p(e->kids[0]) + ")";
        case K::App: return "(" + p(e->kids[0]) + " " + p(e->kids[1]) + ")";
        case K::If: return "(if " + p(e->kids[0]) + " " + p(e->kids[1]) + " " + p(e->kids[2]) + ")";
        case K::Prompt: return "(prompt " + e->name + " " + p(e->kids[0]) + " " + p(e->kids[1]) + ")";
        case K::CallCC:
        case K::CallComp:
            return std::string(e->kind == K::CallCC ? "(callcc " : "(callcomp ") + e->name + " " + ce::str(e->eff) + " " +
                   e->ty->str() + " " + p(e->kids[0]) + ")";
        case K::Abort: return "(abort " + e->name + " " + e->ty->str() + " " + p(e->kids[0]) + ")";
        case K::Prim: {
            if (e->name == "event") return "(event " + e->name2 + ")";
            std::string out = "(" + e->name;
            if (e->ty) out += " " + e->ty->str();
            for (auto& k : e->kids) out += " " + p(k);
            return out + ")";
        }
        case K::UnitLit: return "#u";
        case K::True: return "#t";
        case K::False: return "#f";
        case K::Nat: return std::to_string(e->num);
        case K::Let: return "(let (" + e->name + " " + p(e->kids[0]) + ") " + p(e->kids[1]) + ")";
        case K::Seq: return "(seq " + p(e->kids[0]) + " " + p(e->kids[1]) + ")";
        case K::Some: return "(some " + p(e->kids[0]) + ")";
        case K::None: return "(none " + e->ty->str() + ")";
        case K::Inl: return "(inl " + e->ty->str() + " " + p(e->kids[0]) + ")";
        case K::Inr: return "(inr " + e->ty->str() + " " + p(e->kids[0]) + ")";
        case K::Case:
            return "(case " + p(e->kids[0]) + " (" + e->name + " " + p(e->kids[1]) + ") (" + e->name2 + " " +
                   p(e->kids[2]) + "))";
        case K::Hole: return "(hole " + e->ty->str() + " " + ce::str(e->eff) + ")";
        case K::Loc: return "(loc " + std::to_string(e->num) + " " + e->ty->str() + ")";
        case K::ContVal: return "(contval " + e->ty->str() + " " + p(e->kids[0]) + ")";
        case K::CompVal: return "(compval " + e->ty->str() + " " + p(e->kids[0]) + ")";
        case K::Loop: return "(loop " + p(e->kids[0]) + ")";
        case K::While: return "(while " + p(e->kids[0]) + " " + p(e->kids[1]) + ")";
        case K::Try: return "(try " + p(e->kids[0]) + " (catch " + e->name + " " + p(e->kids[1]) + "))";
        case K::Throw: return "(throw " + e->name + " " + p(e->kids[0]) + ")";
        case K::Iterate: return "(iterate " + e->name + " " + e->name2 + " " + p(e->kids[0]) + ")";
    }
    return "";
}

}  // namespace seqeff::lang
