#include <algorithm>
#include <cctype>
#include <sstream>

#include "seqeff/quantale.hpp"

namespace seqeff::quantale {

using reglang::RegLang;

namespace {

class Trace final : public Quantale {
public:
    explicit Trace(reglang::AlphabetP ab) : ab_(std::move(ab)) {}

    const reglang::AlphabetP& alphabet() const { return ab_; }

    std::string name() const override { return "trace"; }
    Eff unit() const override { return make(RegLang::epsilon(ab_)); }
    Eff top() const override { return std::make_shared<TraceElem>(shared_from_this(), std::nullopt); }

    Eff seq(const Eff& x, const Eff& y) const override {
        if (x->is_top() || y->is_top()) return top();
        return make(reglang::lang_concat(get(x), get(y)));
    }
    Eff join(const Eff& x, const Eff& y) const override {
        if (x->is_top() || y->is_top()) return top();
        return make(reglang::lang_union(get(x), get(y)));
    }
    bool leq(const Eff& x, const Eff& y) const override {
        if (y->is_top()) return true;
        if (x->is_top()) return false;
        return reglang::lang_includes(get(x), get(y));
    }
    Eff iterate(const Eff& x) const override {
        if (x->is_top()) return x;
        return make(reglang::lang_star(get(x)));
    }
    Eff atom(std::string_view n) const override { return make(RegLang::symbol(ab_, n)); }
    bool has_atom(std::string_view n) const override { return ab_->index(n).has_value(); }
    bool prefix_leq(const Eff& x, const Eff& whole) const override {
        if (whole->is_top()) return true;
        if (x->is_top()) return false;
        return reglang::lang_prefix_includes(get(x), get(whole));
    }
    Eff parse(std::string_view text) const override {
        auto t = trim(text);
        if (t == "ERR") return top();
        try {
            return make(RegLang::parse(ab_, t));
        } catch (const reglang::RegexError& e) {
            throw EffectSyntaxError(e.what());
        }
    }
    Eff sample(std::mt19937& rng, int size) const override {
        if (std::uniform_int_distribution<int>(0, 59)(rng) == 0) return top();
        return make(random_regex(rng, std::max(size, 1)));
    }

private:
    static std::string_view trim(std::string_view t) {
        while (!t.empty() && std::isspace(static_cast<unsigned char>(t.front()))) t.remove_prefix(1);
        while (!t.empty() && std::isspace(static_cast<unsigned char>(t.back()))) t.remove_suffix(1);
        return t;
    }
    Eff make(RegLang l) const { return std::make_shared<TraceElem>(shared_from_this(), std::move(l)); }
    static const RegLang& get(const Eff& x) { return static_cast<const TraceElem&>(*x).lang(); }

    RegLang random_regex(std::mt19937& rng, int size) const {
        std::uniform_int_distribution<int> pick(0, 9);
        if (size <= 1) {
            if (pick(rng) == 0) return RegLang::epsilon(ab_);
            std::uniform_int_distribution<int> sym(0, static_cast<int>(ab_->size()) - 1);
            return RegLang::symbol(ab_, sym(rng));
        }
        int r = pick(rng);
        if (r < 2) return reglang::lang_star(random_regex(rng, size - 1));
        int left = std::uniform_int_distribution<int>(1, size - 1)(rng);
        auto a = random_regex(rng, left);
        auto b = random_regex(rng, size - left);
        return r < 6 ? reglang::lang_concat(a, b) : reglang::lang_union(a, b);
    }

    reglang::AlphabetP ab_;
};

class Labels final : public Quantale {
public:
    explicit Labels(std::vector<std::string> universe) : universe_(std::move(universe)) {}

    std::string name() const override { return "labels"; }
    Eff unit() const override { return make(false, {}); }
    Eff top() const override { return make(true, {}); }
    Eff seq(const Eff& x, const Eff& y) const override { return join(x, y); }
    Eff join(const Eff& x, const Eff& y) const override {
        if (x->is_top() || y->is_top()) return top();
        auto s = get(x).labels();
        s.insert(get(y).labels().begin(), get(y).labels().end());
        return make(false, std::move(s));
    }
    bool leq(const Eff& x, const Eff& y) const override {
        if (y->is_top()) return true;
        if (x->is_top()) return false;
        const auto& a = get(x).labels();
        const auto& b = get(y).labels();
        return std::includes(b.begin(), b.end(), a.begin(), a.end());
    }
    bool equal(const Eff& x, const Eff& y) const override {
        if (x->is_top() || y->is_top()) return x->is_top() && y->is_top();
        return get(x).labels() == get(y).labels();
    }
    Eff iterate(const Eff& x) const override { return x; }
    Eff atom(std::string_view n) const override {
        if (!has_atom(n)) throw EffectSyntaxError("label '" + std::string(n) + "' is not declared");
        return make(false, {std::string(n)});
    }
    bool has_atom(std::string_view n) const override {
        return std::find(universe_.begin(), universe_.end(), n) != universe_.end();
    }
    bool prefix_leq(const Eff& x, const Eff& whole) const override { return leq(x, whole); }
    Eff parse(std::string_view text) const override {
        std::string t(text);
        t.erase(std::remove_if(t.begin(), t.end(), [](unsigned char c) { return std::isspace(c); }), t.end());
        if (t == "ERR") return top();
        if (t == "%e") return unit();
        std::set<std::string> out;
        std::stringstream ss(t);
        std::string part;
        while (std::getline(ss, part, '+')) {
            if (part == "%e") continue;
            if (!has_atom(part)) throw EffectSyntaxError("label '" + part + "' is not declared");
            out.insert(part);
        }
        return make(false, std::move(out));
    }
    Eff sample(std::mt19937& rng, int) const override {
        if (std::uniform_int_distribution<int>(0, 59)(rng) == 0) return top();
        std::set<std::string> s;
        std::bernoulli_distribution coin(0.4);
        for (auto& l : universe_)
            if (coin(rng)) s.insert(l);
        return make(false, std::move(s));
    }

private:
    Eff make(bool err, std::set<std::string> s) const {
        return std::make_shared<LabelElem>(shared_from_this(), err, std::move(s));
    }
    static const LabelElem& get(const Eff& x) { return static_cast<const LabelElem&>(*x); }

    std::vector<std::string> universe_;
};

}  // namespace

std::string LabelElem::str() const {
    if (err_) return "ERR";
    if (labels_.empty()) return "%e";
    std::string out;
    for (auto& l : labels_) {
        if (!out.empty()) out += " + ";
        out += l;
    }
    return out;
}

QuantaleP make_trace(reglang::AlphabetP alphabet) {
    if (!alphabet || alphabet->size() == 0) throw std::invalid_argument("trace quantale needs a non-empty alphabet");
    return std::make_shared<Trace>(std::move(alphabet));
}

QuantaleP make_labels(std::vector<std::string> universe) { return std::make_shared<Labels>(std::move(universe)); }

reglang::AlphabetP trace_alphabet(const Quantale& q) {
    if (auto t = dynamic_cast<const Trace*>(&q)) return t->alphabet();
    return nullptr;
}

}  // namespace seqeff::quantale
