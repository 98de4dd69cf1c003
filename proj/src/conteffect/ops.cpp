#include <algorithm>
#include <atomic>
#include <map>
#include <set>
#include <unordered_map>

#include "seqeff/conteffect.hpp"

namespace seqeff::ce {

namespace {

std::string join_keys(const std::vector<std::string>& ks) {
    std::string out;
    for (size_t i = 0; i < ks.size(); ++i) {
        if (i) out += ", ";
        out += ks[i];
    }
    return out;
}

template <class T>
std::string set_str(const std::vector<std::shared_ptr<const T>>& xs) {
    std::vector<std::string> ks;
    for (auto& x : xs) ks.push_back(x->key());
    std::sort(ks.begin(), ks.end());
    return join_keys(ks);
}

}  // namespace

std::string str(const OptU& u) { return u ? (*u)->str() : "_|_"; }

std::string str(const CE& x) {
    std::string p = set_str(x.P);
    std::string c = set_str(x.C);
    return "{" + p + (p.empty() ? "| " : " | ") + c + (c.empty() ? "| " : " | ") + str(x.U) + "}";
}

const std::string& Control::key() const {
    std::call_once(keyed_, [this] {
        switch (kind) {
            case Kind::Replace: key_ = "replace " + tag + " : " + prefix->str() + " ~> " + ty->str(); break;
            case Kind::Abort: key_ = "abort " + tag + " " + prefix->str() + " ~> " + ty->str(); break;
            case Kind::Blocked: key_ = "[" + inner->key() + "]@" + tag; break;
        }
    });
    return key_;
}

const std::string& Prophecy::key() const {
    std::call_once(keyed_, [this] {
        switch (kind) {
            case Kind::Proph:
                key_ = std::string(flavor == Flavor::Capture ? "proph " : "cproph ") + tag + " " + str(predicted) + " ~> " +
                       ty->str() + " obs " + str(observed);
                break;
            case Kind::Blocked: key_ = "[" + inner->key() + "]@" + tag; break;
            case Kind::Mu: key_ = "mu " + var + ". " + inner->key(); break;
            case Kind::Var: key_ = var; break;
        }
    });
    return key_;
}

namespace {

uint64_t mix(uint64_t h, uint64_t v) {
    h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h * 0xff51afd7ed558ccdULL;
}

uint64_t hstr(const std::string& s) { return std::hash<std::string>{}(s); }

}  // namespace

uint64_t Control::digest() const {
    std::call_once(hashed_, [this] {
        uint64_t h = mix(static_cast<uint64_t>(kind) + 1, hstr(tag));
        if (kind == Kind::Blocked)
            h = mix(h, inner->digest());
        else
            h = mix(mix(h, hstr(prefix->str())), hstr(ty->str()));
        digest_ = h;
    });
    return digest_;
}

uint64_t Prophecy::digest() const {
    std::call_once(hashed_, [this] {
        uint64_t h = mix(static_cast<uint64_t>(kind) + 11, hstr(kind == Kind::Mu || kind == Kind::Var ? var : tag));
        switch (kind) {
            case Kind::Proph:
                h = mix(mix(mix(mix(h, static_cast<uint64_t>(flavor)), ce::digest(predicted)), hstr(ty->str())),
                        ce::digest(observed));
                break;
            case Kind::Blocked:
            case Kind::Mu: h = mix(h, inner->digest()); break;
            case Kind::Var: break;
        }
        digest_ = h;
    });
    return digest_;
}

uint64_t digest(const CE& x) {
    // Sum of member digests keeps the result independent of set order.
    uint64_t p = 0, c = 0;
    for (auto& e : x.P) p += e->digest();
    for (auto& e : x.C) c += e->digest();
    return mix(mix(mix(0x5eed, p), c), x.U ? hstr((*x.U)->str()) : 0);
}

ControlP mk_replace(Tag tag, Eff prefix, Annot ty) {
    auto c = std::make_shared<Control>();
    c->kind = Control::Kind::Replace;
    c->tag = std::move(tag);
    c->prefix = std::move(prefix);
    c->ty = std::move(ty);
    return c;
}

ControlP mk_abort(Tag tag, Eff prefix, Annot ty) {
    auto c = std::make_shared<Control>();
    c->kind = Control::Kind::Abort;
    c->tag = std::move(tag);
    c->prefix = std::move(prefix);
    c->ty = std::move(ty);
    return c;
}

ControlP mk_cblocked(ControlP inner, Tag until) {
    auto c = std::make_shared<Control>();
    c->kind = Control::Kind::Blocked;
    c->tag = std::move(until);
    c->inner = std::move(inner);
    return c;
}

namespace {

// Hash-consing: structurally equal prophecies share one node, so effects built by
// repeated sequencing stay DAGs of linear size.
ProphP intern(std::shared_ptr<Prophecy> p) {
    static std::mutex m;
    static std::unordered_map<uint64_t, std::weak_ptr<const Prophecy>> table;
    static size_t limit = 1 << 14;
    uint64_t d = p->digest();
    std::lock_guard<std::mutex> g(m);
    auto& slot = table[d];
    if (auto old = slot.lock()) return old;
    slot = p;
    if (table.size() > limit) {
        std::erase_if(table, [](const auto& kv) { return kv.second.expired(); });
        limit = std::max(limit, 2 * table.size());
    }
    return p;
}

}  // namespace

ProphP mk_proph(Tag tag, CE predicted, Annot ty, CE observed, Flavor flavor) {
    auto p = std::make_shared<Prophecy>();
    p->kind = Prophecy::Kind::Proph;
    p->tag = std::move(tag);
    p->predicted = std::move(predicted);
    p->ty = std::move(ty);
    p->observed = std::move(observed);
    p->flavor = flavor;
    return intern(std::move(p));
}

ProphP mk_pblocked(ProphP inner, Tag until) {
    auto p = std::make_shared<Prophecy>();
    p->kind = Prophecy::Kind::Blocked;
    p->tag = std::move(until);
    p->inner = std::move(inner);
    return intern(std::move(p));
}

ProphP mk_mu(std::string var, ProphP body) {
    auto p = std::make_shared<Prophecy>();
    p->kind = Prophecy::Kind::Mu;
    p->var = std::move(var);
    p->inner = std::move(body);
    return intern(std::move(p));
}

ProphP mk_pvar(std::string var) {
    auto p = std::make_shared<Prophecy>();
    p->kind = Prophecy::Kind::Var;
    p->var = std::move(var);
    return intern(std::move(p));
}

std::string fresh_var() {
    static std::atomic<unsigned> counter{0};
    return "_m" + std::to_string(++counter);
}

Tag outer_tag(const Control& c) { return c.tag; }

Tag outer_tag(const Prophecy& p) {
    switch (p.kind) {
        case Prophecy::Kind::Mu: return outer_tag(*p.inner);
        case Prophecy::Kind::Var: return "";
        default: return p.tag;
    }
}

CE ce_unit(const Quantale& q) { return CE{{}, {}, q.unit()}; }
CE ce_bot() { return CE{{}, {}, std::nullopt}; }
CE ce_pure(const Eff& u) { return CE{{}, {}, u}; }

OptU opt_seq(const OptU& a, const OptU& b) {
    if (a && (*a)->is_top()) return a;
    if (b && (*b)->is_top()) return b;
    if (!a || !b) return std::nullopt;
    return quantale::q_seq(*a, *b);
}

OptU opt_join(const OptU& a, const OptU& b) {
    if (!a) return b;
    if (!b) return a;
    return quantale::q_join(*a, *b);
}

bool opt_leq(const OptU& a, const OptU& b) {
    if (!a) return true;
    if (!b) return false;
    return quantale::q_leq(*a, *b);
}

OptU opt_iterate(const Quantale& q, const OptU& a) {
    if (!a) return q.unit();
    return quantale::q_iterate(*a);
}

ControlP left_acc(const Eff& q, const ControlP& c) {
    switch (c->kind) {
        case Control::Kind::Replace: return mk_replace(c->tag, quantale::q_seq(q, c->prefix), c->ty);
        case Control::Kind::Abort: return mk_abort(c->tag, quantale::q_seq(q, c->prefix), c->ty);
        case Control::Kind::Blocked: return mk_cblocked(left_acc(q, c->inner), c->tag);
    }
    return c;
}

std::vector<ControlP> left_acc_set(const OptU& q, const std::vector<ControlP>& cs) {
    if (!q) return {};
    std::vector<ControlP> out;
    out.reserve(cs.size());
    for (auto& c : cs) out.push_back(left_acc(*q, c));
    return out;
}

ProphP right_acc(const ProphP& p, const CE& x) {
    switch (p->kind) {
        case Prophecy::Kind::Proph:
            return mk_proph(p->tag, p->predicted, p->ty, ce_seq(p->observed, x), p->flavor);
        case Prophecy::Kind::Mu: return mk_mu(p->var, right_acc(p->inner, x));
        default: return p;
    }
}

std::vector<ProphP> right_acc_set(const std::vector<ProphP>& ps, const CE& x) {
    std::vector<ProphP> out;
    out.reserve(ps.size());
    for (auto& p : ps) out.push_back(right_acc(p, x));
    return out;
}

CE ce_seq(const CE& x, const CE& y) {
    CE r;
    r.P = right_acc_set(x.P, y);
    r.P.insert(r.P.end(), y.P.begin(), y.P.end());
    r.P = normalize(std::move(r.P));
    r.C = x.C;
    auto acc = left_acc_set(x.U, y.C);
    r.C.insert(r.C.end(), acc.begin(), acc.end());
    r.C = normalize(std::move(r.C));
    r.U = opt_seq(x.U, y.U);
    return r;
}

CE ce_join(const CE& x, const CE& y) {
    CE r;
    r.P = x.P;
    r.P.insert(r.P.end(), y.P.begin(), y.P.end());
    r.P = normalize(std::move(r.P));
    r.C = x.C;
    r.C.insert(r.C.end(), y.C.begin(), y.C.end());
    r.C = normalize(std::move(r.C));
    r.U = opt_join(x.U, y.U);
    return r;
}

// ---- normalization ----

namespace {

std::string shape(const Control& c) {
    switch (c.kind) {
        case Control::Kind::Replace: return "replace " + c.tag + " : _ ~> " + c.ty->str();
        case Control::Kind::Abort: return "abort " + c.tag + " _ ~> " + c.ty->str();
        case Control::Kind::Blocked: return "[" + shape(*c.inner) + "]@" + c.tag;
    }
    return "";
}

ControlP merge(const ControlP& a, const ControlP& b) {
    switch (a->kind) {
        case Control::Kind::Replace: return mk_replace(a->tag, quantale::q_join(a->prefix, b->prefix), a->ty);
        case Control::Kind::Abort: return mk_abort(a->tag, quantale::q_join(a->prefix, b->prefix), a->ty);
        case Control::Kind::Blocked: return mk_cblocked(merge(a->inner, b->inner), a->tag);
    }
    return a;
}

std::string shape(const Prophecy& p) {
    switch (p.kind) {
        case Prophecy::Kind::Proph:
            return std::string(p.flavor == Flavor::Capture ? "proph " : "cproph ") + p.tag + " " + str(p.predicted) +
                   " ~> " + p.ty->str();
        case Prophecy::Kind::Blocked: {
            auto s = shape(*p.inner);
            return s.empty() ? s : "[" + s + "]@" + p.tag;
        }
        default: return "";
    }
}

ProphP merge_uncached(const ProphP& a, const ProphP& b);

// Repeated sequencing rebuilds the same nested joins many times over; sharing
// them keeps x^n linear in n instead of exponential.
ProphP merge(const ProphP& a, const ProphP& b) {
    thread_local std::map<std::pair<uint64_t, uint64_t>, ProphP> memo;
    uint64_t da = a->digest(), db = b->digest();
    std::pair<uint64_t, uint64_t> k = std::minmax(da, db);
    if (auto it = memo.find(k); it != memo.end()) return it->second;
    auto r = merge_uncached(a, b);
    if (memo.size() > 4096) memo.clear();
    memo.emplace(k, r);
    return r;
}

ProphP merge_uncached(const ProphP& a, const ProphP& b) {
    switch (a->kind) {
        case Prophecy::Kind::Proph:
            return mk_proph(a->tag, a->predicted, a->ty, ce_join(a->observed, b->observed), a->flavor);
        case Prophecy::Kind::Blocked: return mk_pblocked(merge(a->inner, b->inner), a->tag);
        default: return a;
    }
}

template <class T>
std::vector<std::shared_ptr<const T>> normalize_impl(std::vector<std::shared_ptr<const T>> xs) {
    if (xs.size() <= 1) return xs;
    std::map<std::string, std::shared_ptr<const T>> groups;
    for (auto& x : xs) {
        std::string s = shape(*x);
        if (s.empty()) s = "=" + x->key();  // merged only with identical entries
        auto [it, fresh] = groups.emplace(s, x);
        if (!fresh && it->second != x && it->second->digest() != x->digest()) it->second = merge(it->second, x);
    }
    // Ordered by shape, which keeps the representation canonical.
    std::vector<std::shared_ptr<const T>> out;
    out.reserve(groups.size());
    for (auto& [_, v] : groups) out.push_back(v);
    return out;
}

}  // namespace

std::vector<ControlP> normalize(std::vector<ControlP> cs) { return normalize_impl(std::move(cs)); }
std::vector<ProphP> normalize(std::vector<ProphP> ps) { return normalize_impl(std::move(ps)); }

CE normalize(CE x) {
    x.P = normalize(std::move(x.P));
    x.C = normalize(std::move(x.C));
    return x;
}

// ---- blocking ----

namespace {

ProphP unblock_one(const ProphP& p, const Tag& tag) {
    switch (p->kind) {
        case Prophecy::Kind::Proph: {
            CE obs{unblock(p->observed.P, tag), unblock(p->observed.C, tag), p->observed.U};
            return mk_proph(p->tag, p->predicted, p->ty, std::move(obs), p->flavor);
        }
        case Prophecy::Kind::Blocked: return p->tag == tag ? unblock_one(p->inner, tag) : p;
        case Prophecy::Kind::Mu: return mk_mu(p->var, unblock_one(p->inner, tag));
        case Prophecy::Kind::Var: return p;
    }
    return p;
}

bool blocked_for(const Prophecy& p, const Tag& tag) {
    if (p.kind == Prophecy::Kind::Mu) return blocked_for(*p.inner, tag);
    return p.kind == Prophecy::Kind::Blocked && p.tag == tag;
}

}  // namespace

std::vector<ProphP> unblock(const std::vector<ProphP>& ps, const Tag& tag) {
    std::vector<ProphP> out;
    out.reserve(ps.size());
    for (auto& p : ps) out.push_back(unblock_one(p, tag));
    return normalize(std::move(out));
}

std::vector<ControlP> unblock(const std::vector<ControlP>& cs, const Tag& tag) {
    std::vector<ControlP> out;
    out.reserve(cs.size());
    for (auto& c : cs) out.push_back(c->kind == Control::Kind::Blocked && c->tag == tag ? c->inner : c);
    return normalize(std::move(out));
}

std::vector<ProphP> block(const std::vector<ProphP>& ps, const Tag& tag) {
    std::vector<ProphP> out;
    out.reserve(ps.size());
    for (auto& p : ps) out.push_back(blocked_for(*p, tag) ? p : mk_pblocked(p, tag));
    return normalize(std::move(out));
}

std::vector<ControlP> block(const std::vector<ControlP>& cs, const Tag& tag) {
    std::vector<ControlP> out;
    out.reserve(cs.size());
    for (auto& c : cs) out.push_back(c->kind == Control::Kind::Blocked && c->tag == tag ? c : mk_cblocked(c, tag));
    return normalize(std::move(out));
}

std::vector<ControlP> filter_controls(const std::vector<ControlP>& cs, const Tag& tag) {
    std::vector<ControlP> out;
    for (auto& c : cs)
        if (outer_tag(*c) != tag) out.push_back(c);
    return out;
}

std::vector<Eff> project(const std::vector<ControlP>& cs, const Eff& handler, const Tag& tag) {
    std::vector<Eff> out;
    for (auto& c : cs) {
        if (c->tag != tag) continue;
        if (c->kind == Control::Kind::Abort) out.push_back(quantale::q_seq(c->prefix, handler));
        else if (c->kind == Control::Kind::Replace) out.push_back(c->prefix);
    }
    return out;
}

namespace {

ProphP through_prompt(const ProphP& p, const Eff& handler, const Tag& tag) {
    switch (p->kind) {
        case Prophecy::Kind::Proph: {
            const CE& o = p->observed;
            OptU u = o.U;
            for (auto& q : project(o.C, handler, tag)) u = opt_join(u, q);
            CE obs{filter_prophecies(o.P, handler, tag), filter_controls(o.C, tag), u};
            return mk_proph(p->tag, p->predicted, p->ty, std::move(obs), p->flavor);
        }
        case Prophecy::Kind::Blocked: return p->tag == tag ? through_prompt(p->inner, handler, tag) : p;
        case Prophecy::Kind::Mu: return mk_mu(p->var, through_prompt(p->inner, handler, tag));
        case Prophecy::Kind::Var: return p;
    }
    return p;
}

}  // namespace

std::vector<ProphP> filter_prophecies(const std::vector<ProphP>& ps, const Eff& handler, const Tag& tag) {
    std::vector<ProphP> out;
    for (auto& p : ps)
        if (outer_tag(*p) != tag) out.push_back(through_prompt(p, handler, tag));
    return normalize(std::move(out));
}

// ---- predicates ----

namespace {

bool top_in(const Control& c) {
    return c.kind == Control::Kind::Blocked ? top_in(*c.inner) : c.prefix->is_top();
}

bool top_in(const Prophecy& p) {
    switch (p.kind) {
        case Prophecy::Kind::Proph: return underlying_top(p.predicted) || underlying_top(p.observed);
        case Prophecy::Kind::Blocked:
        case Prophecy::Kind::Mu: return top_in(*p.inner);
        case Prophecy::Kind::Var: return false;
    }
    return false;
}

}  // namespace

bool underlying_top(const CE& x) {
    if (x.U && (*x.U)->is_top()) return true;
    for (auto& c : x.C)
        if (top_in(*c)) return true;
    for (auto& p : x.P)
        if (top_in(*p)) return true;
    return false;
}

bool nontrivial(const CE& x) { return !x.C.empty() || x.U.has_value(); }

// ---- order ----

namespace {

ProphP subst(const ProphP& p, const std::string& var, const ProphP& with);

CE subst(const CE& x, const std::string& var, const ProphP& with) {
    CE r = x;
    for (auto& p : r.P) p = subst(p, var, with);
    return r;
}

ProphP subst(const ProphP& p, const std::string& var, const ProphP& with) {
    switch (p->kind) {
        case Prophecy::Kind::Proph:
            return mk_proph(p->tag, subst(p->predicted, var, with), p->ty, subst(p->observed, var, with), p->flavor);
        case Prophecy::Kind::Blocked: return mk_pblocked(subst(p->inner, var, with), p->tag);
        case Prophecy::Kind::Mu: return p->var == var ? p : mk_mu(p->var, subst(p->inner, var, with));
        case Prophecy::Kind::Var: return p->var == var ? with : p;
    }
    return p;
}

bool has_free(const ProphP& p, const std::string& var);

bool has_free(const CE& x, const std::string& var) {
    for (auto& p : x.P)
        if (has_free(p, var)) return true;
    return false;
}

bool has_free(const ProphP& p, const std::string& var) {
    switch (p->kind) {
        case Prophecy::Kind::Proph: return has_free(p->predicted, var) || has_free(p->observed, var);
        case Prophecy::Kind::Blocked: return has_free(p->inner, var);
        case Prophecy::Kind::Mu: return p->var != var && has_free(p->inner, var);
        case Prophecy::Kind::Var: return p->var == var;
    }
    return false;
}

// Coinductive comparison: pairs involving a Mu are assumed while their unfoldings
// are compared, and assumptions made under a failed attempt are rolled back.
class Order {
public:
    bool ce(const CE& a, const CE& b) { return opt_leq(a.U, b.U) && controls(a.C, b.C) && prophs(a.P, b.P); }

    bool controls(const std::vector<ControlP>& as, const std::vector<ControlP>& bs) {
        for (auto& a : as) {
            bool found = false;
            for (auto& b : bs)
                if (control(*a, *b)) {
                    found = true;
                    break;
                }
            if (!found) return false;
        }
        return true;
    }

    bool prophs(const std::vector<ProphP>& as, const std::vector<ProphP>& bs) {
        for (auto& a : as) {
            bool found = false;
            Tag t = outer_tag(*a);
            for (auto& b : bs) {
                if (outer_tag(*b) != t) continue;
                if (proph(a, b)) {
                    found = true;
                    break;
                }
            }
            if (!found) return false;
        }
        return true;
    }

    bool control(const Control& a, const Control& b) {
        if (a.kind != b.kind || a.tag != b.tag) return false;
        if (a.kind == Control::Kind::Blocked) return control(*a.inner, *b.inner);
        return same_annot(a.ty, b.ty) && quantale::q_leq(a.prefix, b.prefix);
    }

    bool proph(const ProphP& a, const ProphP& b) {
        if (a == b || a->digest() == b->digest()) return true;
        if (a->kind == Prophecy::Kind::Mu || b->kind == Prophecy::Kind::Mu) {
            auto k = std::make_pair(a->digest(), b->digest());
            if (assumed_.count(k)) return true;
            size_t mark = trail_.size();
            assumed_.insert(k);
            trail_.push_back(k);
            bool r = proph(a->kind == Prophecy::Kind::Mu ? unfold(a) : a, b->kind == Prophecy::Kind::Mu ? unfold(b) : b);
            if (!r) rollback(mark);
            return r;
        }
        if (a->kind != b->kind) return false;
        switch (a->kind) {
            case Prophecy::Kind::Var: return a->var == b->var;
            case Prophecy::Kind::Blocked: return a->tag == b->tag && proph(a->inner, b->inner);
            case Prophecy::Kind::Proph:
                return a->tag == b->tag && a->flavor == b->flavor && same_annot(a->ty, b->ty) &&
                       ce(a->observed, b->observed) && same_ce(a->predicted, b->predicted);
            default: return false;
        }
    }

    bool same_ce(const CE& a, const CE& b) {
        if (digest(a) == digest(b)) return true;
        return ce(a, b) && ce(b, a);
    }

private:
    void rollback(size_t mark) {
        while (trail_.size() > mark) {
            assumed_.erase(trail_.back());
            trail_.pop_back();
        }
    }

    std::set<std::pair<uint64_t, uint64_t>> assumed_;
    std::vector<std::pair<uint64_t, uint64_t>> trail_;
};

}  // namespace

ProphP unfold(const ProphP& mu) {
    if (mu->kind != Prophecy::Kind::Mu) return mu;
    return subst(mu->inner, mu->var, mu);
}

bool ce_leq(const CE& x, const CE& y) {
    Order o;
    return o.ce(x, y);
}

bool prophs_leq(const std::vector<ProphP>& a, const std::vector<ProphP>& b) {
    Order o;
    return o.prophs(a, b);
}

bool controls_leq(const std::vector<ControlP>& a, const std::vector<ControlP>& b) {
    Order o;
    return o.controls(a, b);
}

bool ce_equiv(const CE& x, const CE& y) {
    bool tx = underlying_top(x), ty = underlying_top(y);
    if (tx || ty) return tx && ty;
    return ce_leq(x, y) && ce_leq(y, x);
}

// ---- iteration ----

std::vector<ProphP> mu_close(size_t n, const std::function<ProphP(size_t, const std::vector<ProphP>&)>& body) {
    if (n > 6) throw IterationDivergence("too many mutually recursive prophecies to close (" + std::to_string(n) + ")");
    std::vector<std::string> names(n);
    for (auto& v : names) v = fresh_var();
    std::function<ProphP(size_t, const std::vector<ProphP>&)> close = [&](size_t i, const std::vector<ProphP>& env) {
        std::vector<ProphP> bound = env;
        bound[i] = mk_pvar(names[i]);
        std::vector<ProphP> S(n);
        for (size_t j = 0; j < n; ++j) S[j] = bound[j] ? bound[j] : close(j, bound);
        ProphP b = body(i, S);
        return has_free(b, names[i]) ? mk_mu(names[i], b) : b;
    };
    std::vector<ProphP> out;
    for (size_t i = 0; i < n; ++i) out.push_back(close(i, std::vector<ProphP>(n)));
    return out;
}

CE ce_iterate(const Quantale& q, const CE& x) {
    CE r;
    r.U = opt_iterate(q, x.U);
    r.C = normalize(left_acc_set(r.U, x.C));
    if (!x.P.empty()) {
        const auto& ps = x.P;
        const auto& cs = r.C;
        const auto& u = r.U;
        r.P = normalize(mu_close(ps.size(), [&](size_t i, const std::vector<ProphP>& S) {
            return right_acc(ps[i], CE{S, cs, u});
        }));
    }
    return r;
}

std::vector<ProphP> bounded_prophecy_union(const Quantale& q, const CE& x, int bound) {
    std::vector<ProphP> acc;
    CE xi = ce_unit(q);
    for (int i = 0; i <= bound; ++i) {
        auto step = right_acc_set(x.P, xi);
        acc.insert(acc.end(), step.begin(), step.end());
        acc = normalize(std::move(acc));
        xi = ce_seq(x, xi);
    }
    return acc;
}

}  // namespace seqeff::ce

namespace seqeff::ce {

CE sample_effect(const Quantale& q, std::mt19937& rng, const std::vector<Tag>& tags, const std::vector<Annot>& types,
                 int depth) {
    auto pick = [&rng](size_t n) { return std::uniform_int_distribution<size_t>(0, n - 1)(rng); };
    auto coin = [&rng](double p) { return std::bernoulli_distribution(p)(rng); };
    CE x;
    if (!coin(0.15)) x.U = q.sample(rng, 3);
    size_t nc = pick(3);
    for (size_t i = 0; i < nc; ++i) {
        const auto& tag = tags[pick(tags.size())];
        const auto& ty = types[pick(types.size())];
        auto pre = q.sample(rng, 3);
        ControlP c = coin(0.5) ? mk_abort(tag, pre, ty) : mk_replace(tag, pre, ty);
        if (coin(0.2)) c = mk_cblocked(c, tags[pick(tags.size())]);
        x.C.push_back(c);
    }
    size_t np = depth > 0 ? pick(3) : 0;
    for (size_t i = 0; i < np; ++i) {
        const auto& tag = tags[pick(tags.size())];
        const auto& ty = types[pick(types.size())];
        auto pred = sample_effect(q, rng, tags, types, depth - 1);
        auto obs = sample_effect(q, rng, tags, types, depth - 1);
        ProphP p = mk_proph(tag, pred, ty, obs, coin(0.2) ? Flavor::Compositional : Flavor::Capture);
        if (coin(0.2)) p = mk_pblocked(p, tags[pick(tags.size())]);
        x.P.push_back(p);
    }
    return normalize(std::move(x));
}

}  // namespace seqeff::ce
