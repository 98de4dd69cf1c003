#include "seqeff/conteffect.hpp"

namespace seqeff::ce {

quantale::LawReport ce_law_suite(const Quantale& q, const CeSampler& gen, int samples, uint32_t seed) {
    struct Triple {
        CE x, y, z;
    };
    using Check = std::function<bool(const Triple&)>;
    CE one = ce_unit(q);
    const std::vector<std::pair<std::string, Check>> checks = {
        {"ce-seq-associative",
         [](const Triple& t) { return ce_equiv(ce_seq(ce_seq(t.x, t.y), t.z), ce_seq(t.x, ce_seq(t.y, t.z))); }},
        {"ce-seq-unit", [&](const Triple& t) { return ce_equiv(ce_seq(one, t.x), t.x) && ce_equiv(ce_seq(t.x, one), t.x); }},
        {"ce-distributes-left",
         [](const Triple& t) {
             return ce_equiv(ce_seq(t.x, ce_join(t.y, t.z)), ce_join(ce_seq(t.x, t.y), ce_seq(t.x, t.z)));
         }},
        {"ce-distributes-right",
         [](const Triple& t) {
             return ce_equiv(ce_seq(ce_join(t.y, t.z), t.x), ce_join(ce_seq(t.y, t.x), ce_seq(t.z, t.x)));
         }},
        {"ce-join-commutative", [](const Triple& t) { return ce_equiv(ce_join(t.x, t.y), ce_join(t.y, t.x)); }},
        {"ce-join-upper-bound", [](const Triple& t) { return ce_leq(t.x, ce_join(t.x, t.y)); }},
        {"ce-leq-transitive",
         [](const Triple& t) { return !(ce_leq(t.x, t.y) && ce_leq(t.y, t.z)) || ce_leq(t.x, t.z); }},
        {"ce-normalize-preserves", [](const Triple& t) { return ce_equiv(normalize(t.x), t.x); }},
    };

    quantale::LawReport rep;
    rep.instance = "C(" + q.name() + ")";
    for (auto& [n, _] : checks) rep.laws.push_back({n, true, 0, ""});
    std::mt19937 rng(seed);
    for (int i = 0; i < samples; ++i) {
        Triple t{gen(rng), gen(rng), gen(rng)};
        for (size_t k = 0; k < checks.size(); ++k) {
            auto& r = rep.laws[k];
            if (!r.passed) continue;
            ++r.checked;
            if (!checks[k].second(t)) {
                r.passed = false;
                r.counterexample = "x = " + str(t.x) + ", y = " + str(t.y) + ", z = " + str(t.z);
            }
        }
    }
    return rep;
}

IterationAudit iteration_audit(const Quantale& q, const CeSampler& gen, int count, int bound, uint32_t seed) {
    IterationAudit out;
    std::mt19937 rng(seed);
    while (out.checked < count) {
        CE x = gen(rng);
        if (x.P.empty()) continue;
        ++out.checked;
        bool ok;
        try {
            ok = prophs_leq(bounded_prophecy_union(q, x, bound), ce_iterate(q, x).P);
        } catch (const IterationDivergence&) {
            ok = false;
        }
        if (!ok && out.failures++ == 0) out.witness = str(x);
    }
    return out;
}

}  // namespace seqeff::ce
