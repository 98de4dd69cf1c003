#include "seqeff/cli.hpp"

namespace seqeff::cli {

namespace {

using ce::Control;
using ce::Prophecy;

json control_json(const ce::ControlP& c) {
    switch (c->kind) {
        case Control::Kind::Abort:
        case Control::Kind::Replace:
            return {{"kind", c->kind == Control::Kind::Abort ? "abort" : "replace"},
                    {"tag", c->tag},
                    {"prefix", c->prefix->str()},
                    {"type", c->ty->str()}};
        case Control::Kind::Blocked: return {{"kind", "blocked"}, {"until", c->tag}, {"inner", control_json(c->inner)}};
    }
    return nullptr;
}

json proph_json(const ce::ProphP& p) {
    switch (p->kind) {
        case Prophecy::Kind::Proph:
            return {{"kind", p->flavor == ce::Flavor::Capture ? "proph" : "cproph"},
                    {"tag", p->tag},
                    {"predicted", effect_json(p->predicted)},
                    {"type", p->ty->str()},
                    {"observed", effect_json(p->observed)}};
        case Prophecy::Kind::Blocked: return {{"kind", "blocked"}, {"until", p->tag}, {"inner", proph_json(p->inner)}};
        case Prophecy::Kind::Mu: return {{"kind", "mu"}, {"var", p->var}, {"body", proph_json(p->inner)}};
        case Prophecy::Kind::Var: return {{"kind", "var"}, {"var", p->var}};
    }
    return nullptr;
}

ce::Annot type_from(const json& j, const quantale::Quantale& q) {
    return lang::parse_type(j.get<std::string>(), q);
}

ce::ControlP control_from(const json& j, const quantale::Quantale& q) {
    auto kind = j.at("kind").get<std::string>();
    if (kind == "blocked") return ce::mk_cblocked(control_from(j.at("inner"), q), j.at("until").get<std::string>());
    auto prefix = q.parse(j.at("prefix").get<std::string>());
    auto tag = j.at("tag").get<std::string>();
    if (kind == "abort") return ce::mk_abort(tag, prefix, type_from(j.at("type"), q));
    if (kind == "replace") return ce::mk_replace(tag, prefix, type_from(j.at("type"), q));
    throw UsageError("unknown control kind " + kind);
}

ce::ProphP proph_from(const json& j, const quantale::Quantale& q) {
    auto kind = j.at("kind").get<std::string>();
    if (kind == "blocked") return ce::mk_pblocked(proph_from(j.at("inner"), q), j.at("until").get<std::string>());
    if (kind == "mu") return ce::mk_mu(j.at("var").get<std::string>(), proph_from(j.at("body"), q));
    if (kind == "var") return ce::mk_pvar(j.at("var").get<std::string>());
    if (kind == "proph" || kind == "cproph")
        return ce::mk_proph(j.at("tag").get<std::string>(), effect_from_json(j.at("predicted"), q),
                            type_from(j.at("type"), q), effect_from_json(j.at("observed"), q),
                            kind == "proph" ? ce::Flavor::Capture : ce::Flavor::Compositional);
    throw UsageError("unknown prophecy kind " + kind);
}

}  // namespace

json effect_json(const ce::CE& x) {
    json P = json::array(), C = json::array();
    for (auto& p : x.P) P.push_back(proph_json(p));
    for (auto& c : x.C) C.push_back(control_json(c));
    return {{"P", P}, {"C", C}, {"U", x.U ? json((*x.U)->str()) : json(nullptr)}};
}

ce::CE effect_from_json(const json& j, const quantale::Quantale& q) {
    ce::CE x;
    for (auto& p : j.at("P")) x.P.push_back(proph_from(p, q));
    for (auto& c : j.at("C")) x.C.push_back(control_from(c, q));
    if (!j.at("U").is_null()) x.U = q.parse(j.at("U").get<std::string>());
    return ce::normalize(std::move(x));
}

}  // namespace seqeff::cli
