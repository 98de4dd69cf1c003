#include <set>

#include "seqeff/langcore.hpp"

namespace seqeff::lang {

namespace {

std::shared_ptr<Ty> node(Ty::Kind k) {
    auto t = std::make_shared<Ty>();
    t->kind = k;
    return t;
}

}  // namespace

std::string Ty::str() const {
    std::call_once(printed_, [this] {
        switch (kind) {
            case Kind::Unit: text_ = "unit"; break;
            case Kind::Bool: text_ = "bool"; break;
            case Kind::Any: text_ = "any"; break;
            case Kind::Prim:
            case Kind::Var: text_ = name; break;
            case Kind::Fun: text_ = "(-> " + a->str() + " " + ce::str(latent) + " " + b->str() + ")"; break;
            case Kind::Cont:
                text_ = "(cont " + name + " " + a->str() + " " + ce::str(latent) + " " + b->str() + ")";
                break;
            case Kind::Comp: text_ = "(comp " + a->str() + " " + ce::str(latent) + " " + b->str() + ")"; break;
            case Kind::Mu: text_ = "(mu " + name + " " + a->str() + ")"; break;
            case Kind::Option: text_ = "(option " + a->str() + ")"; break;
            case Kind::Ref: text_ = "(ref " + a->str() + ")"; break;
            case Kind::Sum: text_ = "(sum " + a->str() + " " + b->str() + ")"; break;
        }
    });
    return text_;
}

bool Ty::same(const ce::AnnotNode& other) const {
    auto o = dynamic_cast<const Ty*>(&other);
    if (!o) return false;
    if (o == this || o->str() == str()) return true;
    // Non-owning handles; both objects outlive the comparison.
    TyP x(std::shared_ptr<const Ty>{}, this), y(std::shared_ptr<const Ty>{}, o);
    return same_type(x, y);
}

TyP t_unit() {
    static const TyP t = node(Ty::Kind::Unit);
    return t;
}
TyP t_bool() {
    static const TyP t = node(Ty::Kind::Bool);
    return t;
}
TyP t_any() {
    static const TyP t = node(Ty::Kind::Any);
    return t;
}
TyP t_nat() {
    static const TyP t = t_prim("nat");
    return t;
}
TyP t_prim(std::string name) {
    auto t = node(Ty::Kind::Prim);
    t->name = std::move(name);
    return t;
}
TyP t_fun(TyP arg, CE latent, TyP res) {
    auto t = node(Ty::Kind::Fun);
    t->a = std::move(arg);
    t->latent = std::move(latent);
    t->b = std::move(res);
    return t;
}
TyP t_cont(Tag tag, TyP arg, CE latent, TyP res) {
    auto t = node(Ty::Kind::Cont);
    t->name = std::move(tag);
    t->a = std::move(arg);
    t->latent = std::move(latent);
    t->b = std::move(res);
    return t;
}
TyP t_comp(TyP arg, CE latent, TyP res) {
    auto t = node(Ty::Kind::Comp);
    t->a = std::move(arg);
    t->latent = std::move(latent);
    t->b = std::move(res);
    return t;
}
TyP t_mu(std::string var, TyP body) {
    if (body->kind == Ty::Kind::Var && body->name == var)
        throw std::invalid_argument("recursive type (mu " + var + " " + var + ") is not contractive");
    auto t = node(Ty::Kind::Mu);
    t->name = std::move(var);
    t->a = std::move(body);
    return t;
}
TyP t_var(std::string var) {
    auto t = node(Ty::Kind::Var);
    t->name = std::move(var);
    return t;
}
TyP t_option(TyP a) {
    auto t = node(Ty::Kind::Option);
    t->a = std::move(a);
    return t;
}
TyP t_sum(TyP a, TyP b) {
    auto t = node(Ty::Kind::Sum);
    t->a = std::move(a);
    t->b = std::move(b);
    return t;
}
TyP t_ref(TyP a) {
    auto t = node(Ty::Kind::Ref);
    t->a = std::move(a);
    return t;
}

namespace {

// Effects inside types are closed, so substitution stops at latent effects.
TyP subst_ty(const TyP& t, const std::string& var, const TyP& with) {
    switch (t->kind) {
        case Ty::Kind::Var: return t->name == var ? with : t;
        case Ty::Kind::Mu: return t->name == var ? t : t_mu(t->name, subst_ty(t->a, var, with));
        case Ty::Kind::Fun: return t_fun(subst_ty(t->a, var, with), t->latent, subst_ty(t->b, var, with));
        case Ty::Kind::Cont: return t_cont(t->name, subst_ty(t->a, var, with), t->latent, subst_ty(t->b, var, with));
        case Ty::Kind::Comp: return t_comp(subst_ty(t->a, var, with), t->latent, subst_ty(t->b, var, with));
        case Ty::Kind::Option: return t_option(subst_ty(t->a, var, with));
        case Ty::Kind::Ref: return t_ref(subst_ty(t->a, var, with));
        case Ty::Kind::Sum: return t_sum(subst_ty(t->a, var, with), subst_ty(t->b, var, with));
        default: return t;
    }
}

class Subtyper {
public:
    bool go(const TyP& s, const TyP& t) {
        if (s == t || s->kind == Ty::Kind::Any) return true;
        if (s->str() == t->str()) return true;
        if (s->kind == Ty::Kind::Mu || t->kind == Ty::Kind::Mu) {
            auto k = std::make_pair(s->str(), t->str());
            if (assumed_.count(k)) return true;
            size_t mark = trail_.size();
            assumed_.insert(k);
            trail_.push_back(k);
            bool r = go(unfold(s), unfold(t));
            if (!r) rollback(mark);
            return r;
        }
        if (s->kind != t->kind) return false;
        switch (s->kind) {
            case Ty::Kind::Unit:
            case Ty::Kind::Bool: return true;
            case Ty::Kind::Prim:
            case Ty::Kind::Var: return s->name == t->name;
            case Ty::Kind::Fun:
            case Ty::Kind::Comp: return go(t->a, s->a) && ce::ce_leq(s->latent, t->latent) && go(s->b, t->b);
            case Ty::Kind::Cont:
                return s->name == t->name && go(t->a, s->a) && ce::ce_leq(s->latent, t->latent) && go(s->b, t->b);
            case Ty::Kind::Option:
            case Ty::Kind::Ref: return both(s->a, t->a);
            case Ty::Kind::Sum: return both(s->a, t->a) && both(s->b, t->b);
            default: return false;
        }
    }

private:
    bool both(const TyP& a, const TyP& b) {
        size_t mark = trail_.size();
        if (go(a, b) && go(b, a)) return true;
        rollback(mark);
        return false;
    }
    void rollback(size_t mark) {
        while (trail_.size() > mark) {
            assumed_.erase(trail_.back());
            trail_.pop_back();
        }
    }

    std::set<std::pair<std::string, std::string>> assumed_;
    std::vector<std::pair<std::string, std::string>> trail_;
};

}  // namespace

TyP unfold(const TyP& t) {
    if (t->kind != Ty::Kind::Mu) return t;
    return subst_ty(t->a, t->name, t);
}

TyP head(const TyP& t) {
    TyP r = t;
    while (r->kind == Ty::Kind::Mu) r = unfold(r);
    return r;
}

bool subtype(const TyP& s, const TyP& t) {
    Subtyper st;
    return st.go(s, t);
}

bool same_type(const TyP& s, const TyP& t) { return subtype(s, t) && subtype(t, s); }

std::optional<TyP> type_join(const TyP& s, const TyP& t) {
    if (subtype(s, t)) return t;
    if (subtype(t, s)) return s;
    return std::nullopt;
}

}  // namespace seqeff::lang
