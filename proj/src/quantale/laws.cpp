#include <sstream>

#include "seqeff/quantale.hpp"

namespace seqeff::quantale {

bool LawReport::all_passed() const {
    for (auto& l : laws)
        if (!l.passed) return false;
    return true;
}

std::string LawReport::str() const {
    std::ostringstream os;
    for (auto& l : laws) {
        os << (l.passed ? "PASS " : "FAIL ") << instance << " " << l.law << " (" << l.checked << " cases)";
        if (!l.passed) os << "\n  witness: " << l.counterexample;
        os << "\n";
    }
    return os.str();
}

namespace {

struct Case {
    Eff x, y, z;
    std::string show() const { return "x = " + x->str() + ", y = " + y->str() + ", z = " + z->str(); }
};

using Check = std::function<bool(const Quantale&, const Case&)>;

}  // namespace

LawReport law_suite(const Quantale& q, const Sampler& gen, int samples, uint32_t seed) {
    auto eq = [&q](const Eff& a, const Eff& b) { return q.equal(a, b); };
    auto le = [&q](const Eff& a, const Eff& b) { return q.leq(a, b); };

    const std::vector<std::pair<std::string, Check>> checks = {
        {"join-associative", [&](const Quantale& Q, const Case& c) {
             return eq(Q.join(Q.join(c.x, c.y), c.z), Q.join(c.x, Q.join(c.y, c.z)));
         }},
        {"join-commutative", [&](const Quantale& Q, const Case& c) { return eq(Q.join(c.x, c.y), Q.join(c.y, c.x)); }},
        {"join-idempotent", [&](const Quantale& Q, const Case& c) { return eq(Q.join(c.x, c.x), c.x); }},
        {"join-top", [&](const Quantale& Q, const Case& c) { return Q.join(c.x, Q.top())->is_top(); }},
        {"seq-associative", [&](const Quantale& Q, const Case& c) {
             return eq(Q.seq(Q.seq(c.x, c.y), c.z), Q.seq(c.x, Q.seq(c.y, c.z)));
         }},
        {"seq-unit", [&](const Quantale& Q, const Case& c) {
             return eq(Q.seq(Q.unit(), c.x), c.x) && eq(Q.seq(c.x, Q.unit()), c.x);
         }},
        {"top-nilpotent", [&](const Quantale& Q, const Case& c) {
             return Q.seq(c.x, Q.top())->is_top() && Q.seq(Q.top(), c.x)->is_top();
         }},
        {"distributes-left", [&](const Quantale& Q, const Case& c) {
             return eq(Q.seq(c.x, Q.join(c.y, c.z)), Q.join(Q.seq(c.x, c.y), Q.seq(c.x, c.z)));
         }},
        {"distributes-right", [&](const Quantale& Q, const Case& c) {
             return eq(Q.seq(Q.join(c.y, c.z), c.x), Q.join(Q.seq(c.y, c.x), Q.seq(c.z, c.x)));
         }},
        {"seq-monotone", [&](const Quantale& Q, const Case& c) {
             auto big = Q.join(c.x, c.y);
             return le(Q.seq(c.x, c.z), Q.seq(big, c.z)) && le(Q.seq(c.z, c.x), Q.seq(c.z, big));
         }},
        {"leq-reflexive", [&](const Quantale&, const Case& c) { return le(c.x, c.x); }},
        {"leq-transitive", [&](const Quantale&, const Case& c) {
             return !(le(c.x, c.y) && le(c.y, c.z)) || le(c.x, c.z);
         }},
        {"leq-antisymmetric", [&](const Quantale&, const Case& c) {
             return !(le(c.x, c.y) && le(c.y, c.x)) || eq(c.x, c.y);
         }},
        {"leq-is-join-order", [&](const Quantale& Q, const Case& c) { return le(c.x, c.y) == eq(Q.join(c.x, c.y), c.y); }},
        {"iterate-extensive", [&](const Quantale& Q, const Case& c) { return le(c.x, Q.iterate(c.x)); }},
        {"iterate-idempotent", [&](const Quantale& Q, const Case& c) {
             auto s = Q.iterate(c.x);
             return eq(Q.iterate(s), s);
         }},
        {"iterate-monotone", [&](const Quantale& Q, const Case& c) {
             return le(Q.iterate(c.x), Q.iterate(Q.join(c.x, c.y))) &&
                    (!le(c.x, c.y) || le(Q.iterate(c.x), Q.iterate(c.y)));
         }},
        {"iterate-foldable", [&](const Quantale& Q, const Case& c) {
             auto s = Q.iterate(c.x);
             return le(Q.seq(c.x, s), s) && le(Q.seq(s, c.x), s) && le(Q.seq(s, s), s);
         }},
        {"iterate-possibly-empty", [&](const Quantale& Q, const Case& c) { return le(Q.unit(), Q.iterate(c.x)); }},
        {"iterate-join", [&](const Quantale& Q, const Case& c) {
             return le(Q.join(Q.iterate(c.x), Q.iterate(c.y)), Q.iterate(Q.join(c.x, c.y)));
         }},
    };

    LawReport rep;
    rep.instance = q.name();
    for (auto& [n, _] : checks) rep.laws.push_back(LawResult{n, true, 0, ""});

    std::mt19937 rng(seed);
    for (int i = 0; i < samples; ++i) {
        Case c{gen(rng), gen(rng), gen(rng)};
        for (size_t k = 0; k < checks.size(); ++k) {
            auto& r = rep.laws[k];
            if (!r.passed) continue;
            ++r.checked;
            if (!checks[k].second(q, c)) {
                r.passed = false;
                r.counterexample = c.show();
            }
        }
    }
    return rep;
}

}  // namespace seqeff::quantale
