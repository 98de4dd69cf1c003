#include "seqeff/interpreter.hpp"

namespace seqeff::interp {

namespace {

struct Scope {
    std::vector<std::string> tags;  // prompts with unit handlers
    std::vector<std::string> exns;  // enclosing try blocks
    std::vector<std::string> refs;  // bool cells
};

class Gen {
public:
    Gen(const tc::Checker& c, const std::vector<std::string>& events, std::mt19937& rng)
        : c_(c), events_(events), rng_(rng) {}

    std::string program() { return unit(3, Scope{}); }

private:
    int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }
    bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }
    std::string fresh(const std::string& stem) { return stem + std::to_string(++n_); }

    std::string event() { return "(event " + events_[static_cast<size_t>(pick(static_cast<int>(events_.size())))] + ")"; }

    std::string cond(const Scope& s) {
        switch (pick(4)) {
            case 0: return "#t";
            case 1: return "#f";
            case 2:
                if (!s.refs.empty()) return "(get " + s.refs[static_cast<size_t>(pick(static_cast<int>(s.refs.size())))] + ")";
                return "#t";
            default: return "(seq " + event() + " " + (chance(0.5) ? "#t" : "#f") + ")";
        }
    }

    // Control-free unit expression.
    std::string pure(int depth) {
        if (depth <= 0 || chance(0.4)) return chance(0.8) ? event() : "#u";
        switch (pick(2)) {
            case 0: return "(seq " + pure(depth - 1) + " " + pure(depth - 1) + ")";
            default:
                return "(if " + std::string(chance(0.5) ? "#t" : "#f") + " " + pure(depth - 1) + " " + pure(depth - 1) +
                       ")";
        }
    }

    std::string handler(int depth) { return "(lambda (" + fresh("x") + " : unit) " + pure(depth) + ")"; }

    template <class T>
    const T& any_of(const std::vector<T>& v) {
        return v[static_cast<size_t>(pick(static_cast<int>(v.size())))];
    }

    std::string unit(int depth, const Scope& s) {
        if (depth <= 0) return chance(0.85) ? event() : "#u";
        switch (pick(14)) {
            case 0: return event();
            case 1: return "(seq " + unit(depth - 1, s) + " " + unit(depth - 1, s) + ")";
            case 2: return "(if " + cond(s) + " " + unit(depth - 1, s) + " " + unit(depth - 1, s) + ")";
            case 3: {
                Scope in = s;
                auto t = fresh("t");
                in.tags.push_back(t);
                return "(prompt " + t + " " + unit(depth - 1, in) + " " + handler(1) + ")";
            }
            case 4:
                if (s.tags.empty()) return unit(depth, s);
                return "(abort " + any_of(s.tags) + " unit " + pure(1) + ")";
            case 5: {
                Scope in = s;
                auto x = fresh("E");
                in.exns.push_back(x);
                return "(try " + unit(depth - 1, in) + " (catch " + x + " " + handler(1) + "))";
            }
            case 6:
                if (s.exns.empty()) return unit(depth, s);
                return "(throw " + any_of(s.exns) + " " + pure(1) + ")";
            case 7: {
                Scope in = s;
                auto r = fresh("r");
                in.refs.push_back(r);
                std::string again = chance(0.8) ? "#f" : cond(s);
                return "(let (" + r + " (ref bool #t)) (while (get " + r + ") (seq " + unit(depth - 1, in) + " (set " +
                       r + " " + again + "))))";
            }
            case 8: {
                Scope in = s;
                auto t = fresh("t");
                in.tags.push_back(t);
                std::string exit = "(abort " + t + " unit " + pure(1) + ")";
                std::string body = chance(0.85) ? "(seq " + unit(depth - 1, in) + " " + exit + ")"
                                                : "(if " + cond(s) + " " + exit + " " + unit(depth - 1, in) + ")";
                return "(prompt " + t + " (loop " + body + ") " + handler(1) + ")";
            }
            case 9:
                if (chance(0.5)) return unit(depth, s);
                return "(loop " + pure(1) + ")";
            case 10:
            case 11: return capture(depth, s, pick(2) == 0);
            case 12: {
                auto f = fresh("f"), x = fresh("y");
                return "(let (" + f + " (lambda (" + x + " : unit) " + unit(depth - 1, s) + ")) (seq (" + f + " #u) (" +
                       f + " " + unit(0, s) + ")))";
            }
            default: return generator();
        }
    }

    // A prompt whose body captures the context `(seq [] rest)`; the prediction is
    // exactly the effect of `rest`.
    std::string capture(int depth, const Scope& s, bool comp) {
        Scope in = s;
        auto t = fresh("t");
        in.tags.push_back(t);
        std::string rest = unit(depth - 1, in);
        TyEnv env;
        for (auto& r : s.refs) env[r] = lang::t_ref(lang::t_bool());
        CE pred;
        try {
            auto e = lang::parse_program(rest, c_.quantale());
            pred = c_.typecheck(env, lang::expand(e, c_, env)).eff;
        } catch (const std::exception&) {
            return unit(depth, s);
        }
        if (!ce::nontrivial(pred)) return unit(depth, s);
        std::string p = ce::str(pred);
        auto k = fresh("k");
        std::string kt = comp ? "(comp unit " + p + " unit)" : "(cont " + t + " unit " + p + " unit)";
        std::string use = "(" + k + " #u)";
        std::string body;
        switch (pick(4)) {
            case 0: body = "#u"; break;
            case 1: body = use; break;
            case 2: body = "(seq " + event() + " " + use + ")"; break;
            default: body = "(if " + cond(s) + " " + use + " " + event() + ")"; break;
        }
        if (comp && chance(0.5)) body = "(seq " + use + " " + body + ")";
        return "(prompt " + t + " (seq (" + (comp ? "callcomp " : "callcc ") + t + " " + p + " unit (lambda (" + k +
               " : " + kt + ") " + body + ")) " + rest + ") " + handler(1) + ")";
    }

    // Pure always-yield generator queried a few times.
    std::string generator() {
        const std::string ag = "abort gen %e ~> (option bool)";
        std::string pfix = "mu P. proph gen {P | " + ag + " | %e} ~> (option bool) obs {P | " + ag + " | _|_}";
        std::string yt = "(-> bool {proph gen {" + pfix + " | " + ag + " | %e} ~> (option bool) obs {| | %e} | " + ag +
                         " | _|_} unit)";
        std::string f = "(lambda (y : " + yt + ") (lambda (fin : (-> unit {| " + ag + " | _|_} any)) (loop (y " +
                        (chance(0.5) ? "#t" : "#f") + "))))";
        auto g = fresh("g");
        std::string calls = "#u";
        for (int i = 1 + pick(3); i > 0; --i) calls = "(seq (" + g + " #u) " + calls + ")";
        return "(let (" + g + " (iterate init gen " + f + ")) " + calls + ")";
    }

    const tc::Checker& c_;
    const std::vector<std::string>& events_;
    std::mt19937& rng_;
    int n_ = 0;
};

}  // namespace

std::string fuzz_program(const tc::Checker& c, const std::vector<std::string>& events, std::mt19937& rng) {
    Gen g(c, events, rng);
    return g.program();
}

std::vector<std::string> fuzz_corpus(const tc::Checker& c, const std::vector<std::string>& events, size_t count,
                                     uint32_t seed) {
    std::mt19937 rng(seed);
    std::vector<std::string> out;
    while (out.size() < count) {
        auto src = fuzz_program(c, events, rng);
        try {
            tc::check_program(c, lang::parse_program(src, c.quantale()));
            out.push_back(std::move(src));
        } catch (const std::exception&) {
        }
    }
    return out;
}

}  // namespace seqeff::interp
