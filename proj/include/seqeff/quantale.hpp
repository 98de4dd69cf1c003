#pragma once

#include <functional>
#include <memory>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "seqeff/reglang.hpp"

namespace seqeff::quantale {

struct EffectSyntaxError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class Quantale;

// An underlying effect. Instances subclass this; the generic layer only goes
// through the owning Quantale.
class Elem {
public:
    explicit Elem(std::shared_ptr<const Quantale> q) : owner_(std::move(q)) {}
    virtual ~Elem() = default;

    const Quantale& owner() const { return *owner_; }
    const std::shared_ptr<const Quantale>& owner_ptr() const { return owner_; }
    virtual bool is_top() const = 0;
    virtual std::string str() const = 0;

private:
    std::shared_ptr<const Quantale> owner_;
};

using Eff = std::shared_ptr<const Elem>;

class Quantale : public std::enable_shared_from_this<Quantale> {
public:
    virtual ~Quantale() = default;

    virtual std::string name() const = 0;
    virtual Eff unit() const = 0;
    virtual Eff top() const = 0;
    virtual Eff seq(const Eff& x, const Eff& y) const = 0;
    virtual Eff join(const Eff& x, const Eff& y) const = 0;
    virtual bool leq(const Eff& x, const Eff& y) const = 0;
    virtual Eff iterate(const Eff& x) const = 0;
    virtual bool equal(const Eff& x, const Eff& y) const { return leq(x, y) && leq(y, x); }

    // Effect of the `event` primitive for one symbol or label.
    virtual Eff atom(std::string_view name) const = 0;
    virtual bool has_atom(std::string_view name) const = 0;
    // `x` describes a run cut short; does it fit the start of some behavior in `whole`?
    virtual bool prefix_leq(const Eff& x, const Eff& whole) const = 0;

    // Textual form; `ERR` is the top element for every instance.
    virtual Eff parse(std::string_view text) const = 0;

    // Random element for property tests. `size` bounds the syntactic size.
    virtual Eff sample(std::mt19937& rng, int size) const = 0;
};

using QuantaleP = std::shared_ptr<const Quantale>;

// Trace quantale T(Sigma): Err or a non-empty regular language.
class TraceElem : public Elem {
public:
    TraceElem(std::shared_ptr<const Quantale> q, std::optional<reglang::RegLang> l)
        : Elem(std::move(q)), lang_(std::move(l)) {}
    bool is_top() const override { return !lang_.has_value(); }
    std::string str() const override { return lang_ ? lang_->str() : "ERR"; }
    const reglang::RegLang& lang() const { return *lang_; }

private:
    std::optional<reglang::RegLang> lang_;
};

// Commutative label-set quantale: seq = join = union, unit is the empty set.
class LabelElem : public Elem {
public:
    LabelElem(std::shared_ptr<const Quantale> q, bool err, std::set<std::string> labels)
        : Elem(std::move(q)), err_(err), labels_(std::move(labels)) {}
    bool is_top() const override { return err_; }
    std::string str() const override;
    const std::set<std::string>& labels() const { return labels_; }

private:
    bool err_;
    std::set<std::string> labels_;
};

QuantaleP make_trace(reglang::AlphabetP alphabet);
QuantaleP make_labels(std::vector<std::string> universe);
reglang::AlphabetP trace_alphabet(const Quantale& q);  // null for other instances

inline Eff q_seq(const Eff& x, const Eff& y) { return x->owner().seq(x, y); }
inline Eff q_join(const Eff& x, const Eff& y) { return x->owner().join(x, y); }
inline bool q_leq(const Eff& x, const Eff& y) { return x->owner().leq(x, y); }
inline bool q_equal(const Eff& x, const Eff& y) { return x->owner().equal(x, y); }
inline Eff q_iterate(const Eff& x) { return x->owner().iterate(x); }
inline bool q_is_top(const Eff& x) { return x->is_top(); }

struct LawResult {
    std::string law;
    bool passed = true;
    int checked = 0;
    std::string counterexample;
};

struct LawReport {
    std::string instance;
    std::vector<LawResult> laws;
    bool all_passed() const;
    std::string str() const;
};

using Sampler = std::function<Eff(std::mt19937&)>;

// Quantale laws, the five iteration laws and x* + y* <= (x + y)*, each checked on
// `samples` random triples.
LawReport law_suite(const Quantale& q, const Sampler& gen, int samples, uint32_t seed);

}  // namespace seqeff::quantale
