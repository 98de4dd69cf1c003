#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "seqeff/quantale.hpp"

namespace seqeff::ce {

using quantale::Eff;
using quantale::Quantale;
using Tag = std::string;

// Opaque stand-in for source types carried inside control effects and prophecies.
class AnnotNode {
public:
    virtual ~AnnotNode() = default;
    virtual std::string str() const = 0;
    virtual bool same(const AnnotNode& other) const = 0;
};
using Annot = std::shared_ptr<const AnnotNode>;

inline bool same_annot(const Annot& a, const Annot& b) { return a == b || a->same(*b); }

using OptU = std::optional<Eff>;  // nullopt is Bot

struct Control;
struct Prophecy;
using ControlP = std::shared_ptr<const Control>;
using ProphP = std::shared_ptr<const Prophecy>;

// (P; C; U)
struct CE {
    std::vector<ProphP> P;
    std::vector<ControlP> C;
    OptU U;
};

struct Control {
    enum class Kind { Replace, Abort, Blocked };
    Kind kind;
    Tag tag;          // target tag, or the `until` tag for Blocked
    Eff prefix;       // Replace/Abort
    Annot ty;         // Replace/Abort
    ControlP inner;   // Blocked

    const std::string& key() const;
    // Structural hash built from the children's digests; linear in the DAG size,
    // unlike key(), whose length can grow exponentially under repeated sequencing.
    uint64_t digest() const;

private:
    mutable std::once_flag keyed_, hashed_;
    mutable std::string key_;
    mutable uint64_t digest_ = 0;
};

enum class Flavor { Capture, Compositional };

struct Prophecy {
    enum class Kind { Proph, Blocked, Mu, Var };
    Kind kind;
    Tag tag;            // Proph target, Blocked `until`
    CE predicted;       // Proph
    Annot ty;           // Proph
    CE observed;        // Proph
    Flavor flavor = Flavor::Capture;
    ProphP inner;       // Blocked inner, Mu body
    std::string var;    // Mu binder, Var name

    const std::string& key() const;
    // Structural hash built from the children's digests; linear in the DAG size,
    // unlike key(), whose length can grow exponentially under repeated sequencing.
    uint64_t digest() const;

private:
    mutable std::once_flag keyed_, hashed_;
    mutable std::string key_;
    mutable uint64_t digest_ = 0;
};

ControlP mk_replace(Tag tag, Eff prefix, Annot ty);
ControlP mk_abort(Tag tag, Eff prefix, Annot ty);
ControlP mk_cblocked(ControlP inner, Tag until);
ProphP mk_proph(Tag tag, CE predicted, Annot ty, CE observed, Flavor flavor = Flavor::Capture);
ProphP mk_pblocked(ProphP inner, Tag until);
ProphP mk_mu(std::string var, ProphP body);
ProphP mk_pvar(std::string var);
std::string fresh_var();

Tag outer_tag(const Control& c);
Tag outer_tag(const Prophecy& p);  // Mu looks through to its body

CE ce_unit(const Quantale& q);
CE ce_bot();  // (0; 0; Bot)
CE ce_pure(const Eff& u);

// Lifted underlying operators. Err wins over Bot.
OptU opt_seq(const OptU& a, const OptU& b);
OptU opt_join(const OptU& a, const OptU& b);
bool opt_leq(const OptU& a, const OptU& b);
OptU opt_iterate(const Quantale& q, const OptU& a);  // Bot iterates to I

ControlP left_acc(const Eff& q, const ControlP& c);
std::vector<ControlP> left_acc_set(const OptU& q, const std::vector<ControlP>& cs);
ProphP right_acc(const ProphP& p, const CE& x);
std::vector<ProphP> right_acc_set(const std::vector<ProphP>& ps, const CE& x);

CE ce_seq(const CE& x, const CE& y);
CE ce_join(const CE& x, const CE& y);
bool ce_leq(const CE& x, const CE& y);
bool ce_equiv(const CE& x, const CE& y);
bool prophs_leq(const std::vector<ProphP>& a, const std::vector<ProphP>& b);
bool controls_leq(const std::vector<ControlP>& a, const std::vector<ControlP>& b);
bool underlying_top(const CE& x);
bool nontrivial(const CE& x);

std::vector<ProphP> unblock(const std::vector<ProphP>& ps, const Tag& tag);
std::vector<ControlP> unblock(const std::vector<ControlP>& cs, const Tag& tag);
std::vector<ProphP> block(const std::vector<ProphP>& ps, const Tag& tag);
std::vector<ControlP> block(const std::vector<ControlP>& cs, const Tag& tag);
std::vector<ControlP> filter_controls(const std::vector<ControlP>& cs, const Tag& tag);
std::vector<ProphP> filter_prophecies(const std::vector<ProphP>& ps, const Eff& handler, const Tag& tag);
std::vector<Eff> project(const std::vector<ControlP>& cs, const Eff& handler, const Tag& tag);

// Canonical form: entries that differ only in their innermost prefix (controls) or
// observation (prophecies) are merged by join; the result is ordered by shape.
std::vector<ControlP> normalize(std::vector<ControlP> cs);
std::vector<ProphP> normalize(std::vector<ProphP> ps);
CE normalize(CE x);

// Mu-closure of n mutually recursive prophecies: body(i, S) builds the i-th member
// given references S to all members. Nested binders encode the mutual recursion.
std::vector<ProphP> mu_close(size_t n, const std::function<ProphP(size_t, const std::vector<ProphP>&)>& body);
ProphP unfold(const ProphP& mu);

struct IterationDivergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// (P, C, U)* = (P*, U*|>C, U*) with P* the Mu form of the union of P |> x^i.
CE ce_iterate(const Quantale& q, const CE& x);
// Union over 0 <= i <= bound of P |> x^i, computed by unrolling.
std::vector<ProphP> bounded_prophecy_union(const Quantale& q, const CE& x, int bound);

std::string str(const CE& x);
// Order-insensitive structural hash of a normalized effect.
uint64_t digest(const CE& x);
std::string str(const OptU& u);

// Random effect for property tests: up to two controls and two prophecies drawn from
// `tags` and `types`, nested `depth` levels deep.
CE sample_effect(const Quantale& q, std::mt19937& rng, const std::vector<Tag>& tags, const std::vector<Annot>& types,
                 int depth);

using CeSampler = std::function<CE(std::mt19937&)>;

// Sequencing associativity, unit and distributivity up to ce_equiv, plus order
// sanity checks, each on `samples` random triples.
quantale::LawReport ce_law_suite(const Quantale& q, const CeSampler& gen, int samples, uint32_t seed);

struct IterationAudit {
    int checked = 0;
    int failures = 0;
    std::string witness;  // first failing effect
};

// Draws effects until `count` with non-empty P have been seen and checks that the
// union of P |> x^i for i <= bound is below the Mu form of ce_iterate(x).
IterationAudit iteration_audit(const Quantale& q, const CeSampler& gen, int count, int bound, uint32_t seed);

using AnnotParser = std::function<Annot(std::string_view src, size_t& pos)>;

struct EffectParseError : std::runtime_error {
    size_t pos;
    EffectParseError(const std::string& m, size_t p)
        : std::runtime_error(m + " at offset " + std::to_string(p)), pos(p) {}
};

// `{P | C | U}`; see README for the entry grammar.
CE parse_effect(std::string_view text, const Quantale& q, const AnnotParser& annot);
// Parses one effect starting at pos and advances pos past it.
CE parse_effect_at(std::string_view text, size_t& pos, const Quantale& q, const AnnotParser& annot);

}  // namespace seqeff::ce
