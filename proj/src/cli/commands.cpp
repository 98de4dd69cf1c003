#include <atomic>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

#include "seqeff/cli.hpp"

namespace seqeff::cli {

namespace {

using ce::CE;
using lang::ExprP;
using lang::TyEnv;

struct Session {
    explicit Session(const Config& cfg) : q(make_quantale(cfg)), checker(q) {
        for (auto& [x, src] : cfg.binds) {
            std::string text = src == "true" ? "#t" : src == "false" ? "#f" : src;
            auto v = lang::parse_program(text, *q);
            if (!lang::is_value(*v) || !lang::free_vars(v).empty())
                throw UsageError("--bind " + x + " needs a closed value, got " + src);
            env[x] = checker.typecheck({}, v).ty;
            values[x] = v;
        }
        for (auto& [x, t] : cfg.assumes) env[x] = lang::parse_type(t, *q);
    }

    ExprP closed(ExprP e) const {
        for (auto& [x, v] : values) e = lang::subst(e, x, v);
        return e;
    }

    quantale::QuantaleP q;
    tc::Checker checker;
    TyEnv env;
    std::map<std::string, ExprP> values;
};

json notes_json(const std::vector<tc::Note>& notes) {
    json out = json::array();
    for (auto& n : notes) out.push_back({{"rule", n.rule}, {"detail", n.detail}, {"lhs", n.lhs}, {"rhs", n.rhs}});
    return out;
}

void emit(const Config& cfg, std::ostream& out, const json& j, const std::string& text) {
    if (cfg.json)
        out << j.dump(2) << "\n";
    else
        out << text;
}

int fail(const Config& cfg, std::ostream& out, const std::string& cmd, const std::string& status, json err, int code) {
    std::ostringstream text;
    text << status << ": " << err.value("message", "");
    if (err.contains("rule")) text << "\n  rule: " << err["rule"].get<std::string>();
    if (err.contains("clause") && !err["clause"].get<std::string>().empty())
        text << "\n  clause: " << err["clause"].get<std::string>();
    if (err.contains("lhs") && !err["lhs"].get<std::string>().empty())
        text << "\n  lhs: " << err["lhs"].get<std::string>() << "\n  rhs: " << err["rhs"].get<std::string>();
    text << "\n";
    emit(cfg, out, {{"command", cmd}, {"status", status}, {"error", std::move(err)}}, text.str());
    return code;
}

// Maps library exceptions to reports and exit codes.
template <class F>
int guarded(const Config& cfg, std::ostream& out, const std::string& cmd, F&& body) {
    try {
        return body();
    } catch (const lang::ParseError& e) {
        return fail(cfg, out, cmd, "parse-error", {{"message", e.what()}, {"pos", e.pos}}, kParseError);
    } catch (const ce::EffectParseError& e) {
        return fail(cfg, out, cmd, "parse-error", {{"message", e.what()}, {"pos", e.pos}}, kParseError);
    } catch (const quantale::EffectSyntaxError& e) {
        return fail(cfg, out, cmd, "parse-error", {{"message", e.what()}}, kParseError);
    } catch (const reglang::RegexError& e) {
        return fail(cfg, out, cmd, "parse-error", {{"message", e.what()}}, kParseError);
    } catch (const tc::TypeError& e) {
        return fail(cfg, out, cmd, "type-error",
                    {{"message", e.what()},
                     {"rule", e.rule},
                     {"clause", e.clause},
                     {"pos", e.pos},
                     {"lhs", e.lhs},
                     {"rhs", e.rhs}},
                    kTypeError);
    } catch (const lang::ExpandError& e) {
        return fail(cfg, out, cmd, "type-error", {{"message", e.what()}, {"rule", "expand"}}, kTypeError);
    } catch (const tc::DerivedError& e) {
        return fail(cfg, out, cmd, "type-error", {{"message", e.what()}, {"rule", "derived"}}, kTypeError);
    } catch (const UsageError& e) {
        return fail(cfg, out, cmd, "usage-error", {{"message", e.what()}}, kUsage);
    }
}

struct Audited {
    std::string name;
    interp::RunResult::Outcome outcome = interp::RunResult::Outcome::Done;
    std::string trace;
    size_t steps = 0;
    bool ok = true;
    std::string detail;
};

Audited audit_one(const Session& s, const std::string& name, const std::string& src, size_t fuel) {
    Audited a;
    a.name = name;
    try {
        auto e = s.closed(lang::parse_program(src, *s.q));
        auto checked = tc::check_program(s.checker, e);
        auto rep = interp::audit_run(s.checker, checked.expanded, fuel);
        a.outcome = rep.run.outcome;
        a.trace = rep.run.trace();
        a.steps = rep.run.steps;
        a.ok = rep.passed();
        if (!rep.trace_ok) a.detail = rep.trace_detail;
        for (auto& st : rep.steps)
            if (!st.ok) {
                a.detail = "step " + std::to_string(st.index) + " (" + st.rule + "): " + st.detail + "; before " +
                           st.before + ", after " + st.after;
                break;
            }
    } catch (const std::exception& ex) {
        a.ok = false;
        a.outcome = interp::RunResult::Outcome::Stuck;
        a.detail = std::string("does not check: ") + ex.what();
    }
    return a;
}

std::vector<Audited> audit_all(const Session& s, const std::vector<std::pair<std::string, std::string>>& corpus,
                               const Config& cfg) {
    std::vector<Audited> results(corpus.size());
    unsigned n = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
    n = std::min<unsigned>(n, static_cast<unsigned>(std::max<size_t>(corpus.size(), 1)));
    std::atomic<size_t> next{0};
    auto worker = [&] {
        for (size_t i; (i = next++) < corpus.size();)
            results[i] = audit_one(s, corpus[i].first, corpus[i].second, cfg.fuel);
    };
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < n; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    return results;
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw UsageError("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> event_names(const Config& cfg) { return cfg.quantale == "trace" ? cfg.alphabet : cfg.labels; }

}  // namespace

quantale::QuantaleP make_quantale(const Config& cfg) {
    if (cfg.quantale == "trace") {
        if (cfg.alphabet.empty()) throw UsageError("--alphabet is required for the trace quantale");
        if (!cfg.labels.empty()) throw UsageError("--labels applies to the labels quantale only");
        return quantale::make_trace(std::make_shared<reglang::Alphabet>(cfg.alphabet));
    }
    if (cfg.quantale == "labels") {
        if (!cfg.alphabet.empty()) throw UsageError("--alphabet applies to the trace quantale only");
        if (cfg.labels.empty()) throw UsageError("--labels is required for the labels quantale");
        return quantale::make_labels(cfg.labels);
    }
    throw UsageError("unknown quantale " + cfg.quantale + "; expected trace or labels");
}

int cmd_check(const std::string& source, const Config& cfg, std::ostream& out) {
    return guarded(cfg, out, "check", [&] {
        Session s(cfg);
        auto c = tc::check_program(s.checker, lang::parse_program(source, *s.q), s.env);
        const auto& o = c.outcome;
        std::ostringstream text;
        text << "type: " << o.ty->str() << "\neffect: " << ce::str(o.eff) << "\nunderlying: " << ce::str(o.eff.U)
             << "\n";
        for (auto& n : o.notes) text << "note " << n.rule << " " << n.detail << ": " << n.lhs << " <= " << n.rhs << "\n";
        emit(cfg, out,
             {{"command", "check"},
              {"status", "ok"},
              {"type", o.ty->str()},
              {"effect", effect_json(o.eff)},
              {"effect_text", ce::str(o.eff)},
              {"notes", notes_json(o.notes)}},
             text.str());
        return kOk;
    });
}

int cmd_expand(const std::string& source, const Config& cfg, std::ostream& out) {
    return guarded(cfg, out, "expand", [&] {
        Session s(cfg);
        auto x = lang::print(lang::expand(lang::parse_program(source, *s.q), s.checker, s.env));
        emit(cfg, out, {{"command", "expand"}, {"status", "ok"}, {"expanded", x}}, x + "\n");
        return kOk;
    });
}

int cmd_run(const std::string& source, const Config& cfg, std::ostream& out) {
    return guarded(cfg, out, "run", [&] {
        Session s(cfg);
        auto e = s.closed(lang::expand(lang::parse_program(source, *s.q), s.checker, s.env));
        auto r = interp::run(e, *s.q, cfg.fuel);
        std::ostringstream text;
        text << "trace: " << r.trace() << "\noutcome: " << r.outcome_name() << "\nsteps: " << r.steps << "\n";
        json j{{"command", "run"},
               {"status", r.outcome == interp::RunResult::Outcome::Stuck ? "stuck" : "ok"},
               {"trace", r.trace()},
               {"events", r.events},
               {"outcome", r.outcome_name()},
               {"steps", r.steps},
               {"label", r.total->str()}};
        if (r.value) {
            text << "value: " << lang::print(r.value) << "\n";
            j["value"] = lang::print(r.value);
        }
        if (!r.reason.empty()) {
            text << "reason: " << r.reason << "\n";
            j["reason"] = r.reason;
        }
        emit(cfg, out, j, text.str());
        return r.outcome == interp::RunResult::Outcome::Stuck ? kTypeError : kOk;
    });
}

int cmd_audit(const std::string& source, const Config& cfg, std::ostream& out, const std::string& base) {
    return guarded(cfg, out, "audit", [&] {
        Session s(cfg);
        std::vector<std::pair<std::string, std::string>> corpus;
        if (cfg.fuzz > 0) {
            auto progs = interp::fuzz_corpus(s.checker, event_names(cfg), cfg.fuzz, cfg.seed);
            for (size_t i = 0; i < progs.size(); ++i) {
                char name[32];
                std::snprintf(name, sizeof name, "fuzz-%04zu.seq", i);
                corpus.emplace_back(name, progs[i]);
            }
            if (!cfg.write_corpus.empty()) {
                std::filesystem::path dir(cfg.write_corpus);
                std::filesystem::create_directories(dir);
                std::ofstream manifest(dir / "manifest.txt");
                for (auto& [name, src] : corpus) {
                    std::ofstream(dir / name) << src << "\n";
                    manifest << name << "\n";
                }
            }
        } else if (cfg.manifest) {
            std::istringstream lines(source);
            for (std::string line; std::getline(lines, line);) {
                auto b = line.find_first_not_of(" \t\r");
                if (b == std::string::npos || line[b] == '#') continue;
                line = line.substr(b, line.find_last_not_of(" \t\r") + 1 - b);
                corpus.emplace_back(line, read_file(std::filesystem::path(base) / line));
            }
        } else {
            // Surface parse and type errors with their usual exit codes.
            tc::check_program(s.checker, s.closed(lang::parse_program(source, *s.q)));
            corpus.emplace_back("<input>", source);
        }

        auto results = audit_all(s, corpus, cfg);
        size_t done = 0, fuel = 0, stuck = 0, failed = 0, steps = 0;
        json programs = json::array();
        std::ostringstream text;
        for (auto& a : results) {
            done += a.outcome == interp::RunResult::Outcome::Done;
            fuel += a.outcome == interp::RunResult::Outcome::FuelExhausted;
            stuck += a.outcome == interp::RunResult::Outcome::Stuck;
            failed += !a.ok;
            steps += a.steps;
            interp::RunResult r;
            r.outcome = a.outcome;
            json p{{"name", a.name}, {"outcome", r.outcome_name()}, {"steps", a.steps}, {"passed", a.ok}};
            if (!a.ok) {
                p["detail"] = a.detail;
                text << "FAIL " << a.name << ": " << a.detail << "\n";
            }
            if (results.size() == 1) {
                p["trace"] = a.trace;
                text << "trace: " << a.trace << "\noutcome: " << r.outcome_name() << "\n";
            }
            programs.push_back(std::move(p));
        }
        text << "audited " << results.size() << " program(s), " << steps << " steps: " << done << " done, " << fuel
             << " fuel-exhausted, " << stuck << " stuck; " << failed << " failure(s)\n";
        emit(cfg, out,
             {{"command", "audit"},
              {"status", failed ? "failed" : "ok"},
              {"programs", programs},
              {"summary",
               {{"programs", results.size()},
                {"steps", steps},
                {"done", done},
                {"fuel_exhausted", fuel},
                {"stuck", stuck},
                {"failures", failed}}}},
             text.str());
        return failed ? kTypeError : kOk;
    });
}

int cmd_derive(const std::string& source, const Config& cfg, std::ostream& out) {
    return guarded(cfg, out, "derive", [&] {
        Session s(cfg);
        auto d = tc::derive(s.checker, lang::parse_program(source, *s.q), s.env);
        auto yn = [](bool b) { return b ? "yes" : "no"; };
        std::ostringstream text;
        text << "rule: " << d.rule << "\nderived: " << ce::str(d.derived) << " : " << d.derivedTy->str()
             << "\nfull:    " << ce::str(d.full) << " : " << d.fullTy->str() << "\nfull <= derived: " << yn(d.leq)
             << "\nequivalent: " << yn(d.equiv) << "\nunderlying equal: " << yn(d.underlying_equal) << "\n";
        emit(cfg, out,
             {{"command", "derive"},
              {"status", d.leq ? "ok" : "failed"},
              {"rule", d.rule},
              {"derived", effect_json(d.derived)},
              {"derived_text", ce::str(d.derived)},
              {"derived_type", d.derivedTy->str()},
              {"full", effect_json(d.full)},
              {"full_text", ce::str(d.full)},
              {"full_type", d.fullTy->str()},
              {"leq", d.leq},
              {"equiv", d.equiv},
              {"underlying_equal", d.underlying_equal}},
             text.str());
        return d.leq ? kOk : kTypeError;
    });
}

int cmd_laws(const Config& cfg, std::ostream& out) {
    return guarded(cfg, out, "laws", [&] {
        auto q = make_quantale(cfg);
        int size = cfg.quantale == "trace" ? 4 : 0;
        auto base = quantale::law_suite(*q, [&](std::mt19937& r) { return q->sample(r, size); }, cfg.samples, cfg.seed);
        std::vector<ce::Tag> tags{"t", "u"};
        std::vector<ce::Annot> types{lang::t_unit(), lang::t_nat()};
        auto sample = [&](std::mt19937& r) { return ce::sample_effect(*q, r, tags, types, 1); };
        auto lifted = ce::ce_law_suite(*q, sample, cfg.ce_samples, cfg.seed);
        auto iter = ce::iteration_audit(*q, sample, cfg.iter_samples, cfg.iter_bound, cfg.seed);

        bool ok = base.all_passed() && lifted.all_passed() && iter.failures == 0;
        json laws = json::array();
        for (auto* rep : {&base, &lifted})
            for (auto& l : rep->laws)
                laws.push_back({{"instance", rep->instance},
                                {"law", l.law},
                                {"passed", l.passed},
                                {"checked", l.checked},
                                {"counterexample", l.counterexample}});
        std::ostringstream text;
        text << base.str() << lifted.str() << (iter.failures ? "FAIL " : "PASS ") << "C(" << q->name()
             << ") iterate-bounds-unrolling (" << iter.checked << " cases, bound " << cfg.iter_bound << ")\n";
        if (iter.failures) text << "  witness: " << iter.witness << "\n";
        emit(cfg, out,
             {{"command", "laws"},
              {"status", ok ? "ok" : "failed"},
              {"laws", laws},
              {"iteration",
               {{"checked", iter.checked},
                {"bound", cfg.iter_bound},
                {"failures", iter.failures},
                {"witness", iter.witness}}}},
             text.str());
        return ok ? kOk : kTypeError;
    });
}

}  // namespace seqeff::cli
