#include "seqeff/reglang.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <unordered_map>

namespace seqeff::reglang {

Alphabet::Alphabet(std::vector<std::string> symbols) : symbols_(std::move(symbols)) {
    for (size_t i = 0; i < symbols_.size(); ++i) {
        const auto& s = symbols_[i];
        if (s.empty() || !std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isalnum(c) || c == '_'; }))
            throw RegexError("bad alphabet symbol '" + s + "'", 0);
        if (!index_.emplace(s, static_cast<int>(i)).second)
            throw RegexError("duplicate alphabet symbol '" + s + "'", 0);
    }
}

std::shared_ptr<const Alphabet> Alphabet::parse_list(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
        if (c == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else if (!std::isspace(static_cast<unsigned char>(c))) {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return std::make_shared<const Alphabet>(std::move(out));
}

std::optional<int> Alphabet::index(std::string_view name) const {
    auto it = index_.find(name);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

namespace {

using Kind = Node::Kind;

int prec(Kind k) {
    switch (k) {
        case Kind::Alt: return 0;
        case Kind::Cat: return 1;
        case Kind::Star: return 2;
        default: return 3;
    }
}

std::string show(const Alphabet& ab, const Node& n, int ctx) {
    std::string s;
    switch (n.kind) {
        case Kind::Empty: return "%0";
        case Kind::Eps: return "%e";
        case Kind::Sym: return ab.name(n.sym);
        case Kind::Alt:
            for (size_t i = 0; i < n.kids.size(); ++i) {
                if (i) s += " + ";
                s += n.kids[i]->key;
            }
            break;
        case Kind::Cat:
            for (size_t i = 0; i < n.kids.size(); ++i) {
                if (i) s += ".";
                s += prec(n.kids[i]->kind) < 1 ? "(" + n.kids[i]->key + ")" : n.kids[i]->key;
            }
            break;
        case Kind::Star: {
            const auto& k = *n.kids[0];
            s = prec(k.kind) < 3 ? "(" + k.key + ")*" : k.key + "*";
            break;
        }
    }
    return prec(n.kind) < ctx ? "(" + s + ")" : s;
}

}  // namespace

// Smart constructors. Alternatives are flattened, deduplicated and sorted by key;
// concatenations are flattened with units removed. This ACI normal form keeps the
// set of Brzozowski derivatives finite.
struct Builder {
    const Alphabet& ab;

    NodeP finish(std::shared_ptr<Node> n) const {
        switch (n->kind) {
            case Kind::Empty: n->nullable = false; break;
            case Kind::Eps: n->nullable = true; break;
            case Kind::Sym: n->nullable = false; break;
            case Kind::Alt:
                n->nullable = std::any_of(n->kids.begin(), n->kids.end(), [](const NodeP& k) { return k->nullable; });
                break;
            case Kind::Cat:
                n->nullable = std::all_of(n->kids.begin(), n->kids.end(), [](const NodeP& k) { return k->nullable; });
                break;
            case Kind::Star: n->nullable = true; break;
        }
        n->key = show(ab, *n, 0);
        return n;
    }

    NodeP leaf(Kind k, int sym = -1) const {
        auto n = std::make_shared<Node>();
        n->kind = k;
        n->sym = sym;
        return finish(n);
    }

    NodeP alt(std::vector<NodeP> parts) const {
        std::vector<NodeP> flat;
        for (auto& p : parts) {
            if (p->kind == Kind::Alt) flat.insert(flat.end(), p->kids.begin(), p->kids.end());
            else if (p->kind != Kind::Empty) flat.push_back(p);
        }
        std::sort(flat.begin(), flat.end(), [](const NodeP& a, const NodeP& b) { return a->key < b->key; });
        flat.erase(std::unique(flat.begin(), flat.end(), [](const NodeP& a, const NodeP& b) { return a->key == b->key; }),
                   flat.end());
        // %e is redundant next to a starred alternative
        if (flat.size() > 1) {
            bool starred = std::any_of(flat.begin(), flat.end(), [](const NodeP& k) { return k->kind == Kind::Star; });
            if (starred)
                flat.erase(std::remove_if(flat.begin(), flat.end(), [](const NodeP& k) { return k->kind == Kind::Eps; }),
                           flat.end());
        }
        if (flat.empty()) return leaf(Kind::Empty);
        if (flat.size() == 1) return flat[0];
        auto n = std::make_shared<Node>();
        n->kind = Kind::Alt;
        n->kids = std::move(flat);
        return finish(n);
    }

    NodeP cat(std::vector<NodeP> parts) const {
        std::vector<NodeP> flat;
        for (auto& p : parts) {
            if (p->kind == Kind::Empty) return p;
            if (p->kind == Kind::Cat) flat.insert(flat.end(), p->kids.begin(), p->kids.end());
            else if (p->kind != Kind::Eps) flat.push_back(p);
        }
        if (flat.empty()) return leaf(Kind::Eps);
        if (flat.size() == 1) return flat[0];
        auto n = std::make_shared<Node>();
        n->kind = Kind::Cat;
        n->kids = std::move(flat);
        return finish(n);
    }

    NodeP star(const NodeP& p) const {
        if (p->kind == Kind::Empty || p->kind == Kind::Eps) return leaf(Kind::Eps);
        if (p->kind == Kind::Star) return p;
        NodeP body = p;
        if (p->kind == Kind::Alt) {
            std::vector<NodeP> rest;
            for (auto& k : p->kids)
                if (k->kind != Kind::Eps) rest.push_back(k->kind == Kind::Star ? k->kids[0] : k);
            body = alt(rest);
            if (body->kind == Kind::Empty || body->kind == Kind::Eps) return leaf(Kind::Eps);
        }
        auto n = std::make_shared<Node>();
        n->kind = Kind::Star;
        n->kids = {body};
        return finish(n);
    }

    NodeP tail(const Node& c, size_t from) const {
        return cat(std::vector<NodeP>(c.kids.begin() + static_cast<long>(from), c.kids.end()));
    }

    NodeP deriv(const NodeP& n, int a) const {
        switch (n->kind) {
            case Kind::Empty:
            case Kind::Eps: return leaf(Kind::Empty);
            case Kind::Sym: return n->sym == a ? leaf(Kind::Eps) : leaf(Kind::Empty);
            case Kind::Alt: {
                std::vector<NodeP> ds;
                for (auto& k : n->kids) ds.push_back(deriv(k, a));
                return alt(ds);
            }
            case Kind::Cat: {
                std::vector<NodeP> ds;
                for (size_t i = 0; i < n->kids.size(); ++i) {
                    ds.push_back(cat({deriv(n->kids[i], a), tail(*n, i + 1)}));
                    if (!n->kids[i]->nullable) break;
                }
                return alt(ds);
            }
            case Kind::Star: return cat({deriv(n->kids[0], a), n});
        }
        return leaf(Kind::Empty);
    }
};

namespace {

std::shared_ptr<const Dfa> compile(const Alphabet& ab, const NodeP& root) {
    Builder b{ab};
    auto d = std::make_shared<Dfa>();
    d->nsyms = ab.size();
    std::unordered_map<std::string, int> ids;
    std::vector<NodeP> states;
    auto intern = [&](const NodeP& n) {
        auto [it, fresh] = ids.emplace(n->key, static_cast<int>(states.size()));
        if (fresh) states.push_back(n);
        return it->second;
    };
    intern(root);
    for (size_t s = 0; s < states.size(); ++s) {
        NodeP cur = states[s];
        for (size_t a = 0; a < d->nsyms; ++a) {
            int t = intern(b.deriv(cur, static_cast<int>(a)));
            d->next.push_back(t);
        }
    }
    d->accept.resize(states.size());
    for (size_t s = 0; s < states.size(); ++s) d->accept[s] = states[s]->nullable;
    // backward reachability from accepting states
    std::vector<std::vector<int>> rev(states.size());
    for (size_t s = 0; s < states.size(); ++s)
        for (size_t a = 0; a < d->nsyms; ++a) rev[static_cast<size_t>(d->next[s * d->nsyms + a])].push_back(static_cast<int>(s));
    d->live.assign(states.size(), 0);
    std::deque<int> work;
    for (size_t s = 0; s < states.size(); ++s)
        if (d->accept[s]) {
            d->live[s] = 1;
            work.push_back(static_cast<int>(s));
        }
    while (!work.empty()) {
        int s = work.front();
        work.pop_front();
        for (int p : rev[static_cast<size_t>(s)])
            if (!d->live[static_cast<size_t>(p)]) {
                d->live[static_cast<size_t>(p)] = 1;
                work.push_back(p);
            }
    }
    return d;
}

class Parser {
public:
    Parser(const Alphabet& ab, std::string_view t) : b_{ab}, ab_(ab), t_(t) {}

    NodeP run() {
        NodeP n = alt();
        skip();
        if (i_ != t_.size()) throw RegexError("unexpected '" + std::string(1, t_[i_]) + "' in regex", i_);
        return n;
    }

private:
    void skip() {
        while (i_ < t_.size() && std::isspace(static_cast<unsigned char>(t_[i_]))) ++i_;
    }
    bool eat(char c) {
        skip();
        if (i_ < t_.size() && t_[i_] == c) {
            ++i_;
            return true;
        }
        return false;
    }
    NodeP alt() {
        std::vector<NodeP> parts{cat()};
        while (eat('+')) parts.push_back(cat());
        return b_.alt(parts);
    }
    NodeP cat() {
        std::vector<NodeP> parts{post()};
        while (eat('.')) parts.push_back(post());
        return b_.cat(parts);
    }
    NodeP post() {
        NodeP n = atom();
        while (eat('*')) n = b_.star(n);
        return n;
    }
    NodeP atom() {
        skip();
        if (i_ >= t_.size()) throw RegexError("regex ended early", i_);
        if (eat('(')) {
            NodeP n = alt();
            if (!eat(')')) throw RegexError("expected ')'", i_);
            return n;
        }
        if (t_.substr(i_, 2) == "%e") {
            i_ += 2;
            return b_.leaf(Kind::Eps);
        }
        size_t start = i_;
        while (i_ < t_.size() && (std::isalnum(static_cast<unsigned char>(t_[i_])) || t_[i_] == '_')) ++i_;
        if (start == i_) throw RegexError("unexpected '" + std::string(1, t_[i_]) + "' in regex", i_);
        auto name = t_.substr(start, i_ - start);
        auto idx = ab_.index(name);
        if (!idx) throw RegexError("symbol '" + std::string(name) + "' is not in the alphabet", start);
        return b_.leaf(Kind::Sym, *idx);
    }

    Builder b_;
    const Alphabet& ab_;
    std::string_view t_;
    size_t i_ = 0;
};

void same_alphabet(const RegLang& a, const RegLang& b) {
    if (a.alphabet() != b.alphabet() && !a.alphabet()->same_as(*b.alphabet()))
        throw std::invalid_argument("regular languages over different alphabets");
}

}  // namespace

RegLang RegLang::empty(AlphabetP ab) {
    Builder b{*ab};
    auto n = b.leaf(Kind::Empty);
    return RegLang(std::move(ab), n);
}

RegLang RegLang::epsilon(AlphabetP ab) {
    Builder b{*ab};
    auto n = b.leaf(Kind::Eps);
    return RegLang(std::move(ab), n);
}

RegLang RegLang::symbol(AlphabetP ab, int sym) {
    if (sym < 0 || static_cast<size_t>(sym) >= ab->size()) throw std::out_of_range("symbol index");
    Builder b{*ab};
    auto n = b.leaf(Kind::Sym, sym);
    return RegLang(std::move(ab), n);
}

RegLang RegLang::symbol(AlphabetP ab, std::string_view name) {
    auto idx = ab->index(name);
    if (!idx) throw RegexError("symbol '" + std::string(name) + "' is not in the alphabet", 0);
    return symbol(std::move(ab), *idx);
}

RegLang RegLang::parse(AlphabetP ab, std::string_view text) {
    Parser p(*ab, text);
    auto n = p.run();
    return RegLang(std::move(ab), n);
}

std::string RegLang::str() const { return node_->key; }

const Dfa& RegLang::dfa() const {
    std::call_once(node_->compiled, [&] { node_->dfa = compile(*ab_, node_); });
    return *node_->dfa;
}

bool RegLang::is_empty_language() const { return !dfa().live[0]; }

RegLang lang_concat(const RegLang& a, const RegLang& b) {
    same_alphabet(a, b);
    Builder bl{*a.ab_};
    return RegLang(a.ab_, bl.cat({a.node_, b.node_}));
}

RegLang lang_union(const RegLang& a, const RegLang& b) {
    same_alphabet(a, b);
    Builder bl{*a.ab_};
    return RegLang(a.ab_, bl.alt({a.node_, b.node_}));
}

RegLang lang_star(const RegLang& a) {
    Builder bl{*a.ab_};
    return RegLang(a.ab_, bl.star(a.node_));
}

std::optional<std::vector<int>> inclusion_witness(const RegLang& sub, const RegLang& sup, bool prefixes) {
    same_alphabet(sub, sup);
    if (sub.node()->key == sup.node()->key) return std::nullopt;
    const Dfa& x = sub.dfa();
    const Dfa& y = sup.dfa();
    const size_t ny = y.states();
    struct Back {
        int64_t parent;
        int sym;
    };
    std::unordered_map<int64_t, Back> seen;
    std::deque<int64_t> work;
    auto key = [&](int s, int t) { return static_cast<int64_t>(s) * static_cast<int64_t>(ny) + t; };
    seen.emplace(key(0, 0), Back{-1, -1});
    work.push_back(key(0, 0));
    while (!work.empty()) {
        int64_t k = work.front();
        work.pop_front();
        int s = static_cast<int>(k / static_cast<int64_t>(ny));
        int t = static_cast<int>(k % static_cast<int64_t>(ny));
        const auto& good = prefixes ? y.live : y.accept;
        if (x.accept[static_cast<size_t>(s)] && !good[static_cast<size_t>(t)]) {
            std::vector<int> w;
            for (int64_t c = k; seen.at(c).parent >= 0; c = seen.at(c).parent) w.push_back(seen.at(c).sym);
            std::reverse(w.begin(), w.end());
            return w;
        }
        if (!x.live[static_cast<size_t>(s)]) continue;
        for (size_t a = 0; a < x.nsyms; ++a) {
            int64_t nk = key(x.step(s, static_cast<int>(a)), y.step(t, static_cast<int>(a)));
            if (seen.emplace(nk, Back{k, static_cast<int>(a)}).second) work.push_back(nk);
        }
    }
    return std::nullopt;
}

bool lang_includes(const RegLang& sub, const RegLang& sup) { return !inclusion_witness(sub, sup).has_value(); }

bool lang_prefix_includes(const RegLang& sub, const RegLang& sup) {
    return !inclusion_witness(sub, sup, true).has_value();
}

bool lang_equal(const RegLang& a, const RegLang& b) { return lang_includes(a, b) && lang_includes(b, a); }

namespace {
int run(const Dfa& d, const std::vector<int>& w) {
    int s = 0;
    for (int a : w) {
        if (a < 0 || static_cast<size_t>(a) >= d.nsyms) return -1;
        s = d.step(s, a);
    }
    return s;
}
}  // namespace

bool lang_member(const std::vector<int>& word, const RegLang& a) {
    const Dfa& d = a.dfa();
    int s = run(d, word);
    return s >= 0 && d.accept[static_cast<size_t>(s)];
}

bool lang_member(const std::vector<std::string>& word, const RegLang& a) {
    std::vector<int> w;
    for (auto& s : word) {
        auto i = a.alphabet()->index(s);
        if (!i) return false;
        w.push_back(*i);
    }
    return lang_member(w, a);
}

bool lang_prefix_member(const std::vector<int>& word, const RegLang& a) {
    const Dfa& d = a.dfa();
    int s = run(d, word);
    return s >= 0 && d.live[static_cast<size_t>(s)];
}

std::string render_word(const Alphabet& ab, const std::vector<int>& word) {
    std::string out;
    for (int a : word) out += ab.name(a);
    return out;
}

std::optional<std::vector<int>> split_word(const Alphabet& ab, std::string_view text) {
    std::vector<int> out;
    size_t i = 0;
    while (i < text.size()) {
        size_t best = 0;
        int bestSym = -1;
        for (size_t s = 0; s < ab.size(); ++s) {
            const auto& n = ab.name(static_cast<int>(s));
            if (n.size() > best && text.substr(i, n.size()) == n) {
                best = n.size();
                bestSym = static_cast<int>(s);
            }
        }
        if (bestSym < 0) return std::nullopt;
        out.push_back(bestSym);
        i += best;
    }
    return out;
}

}  // namespace seqeff::reglang
