#include <cctype>

#include "seqeff/langcore.hpp"

namespace seqeff::lang {

using K = Expr::Kind;

namespace {

struct SExp {
    enum class Kind { Atom, List, Brace } kind;
    std::string text;  // atom text
    std::vector<SExp> items;
    size_t pos = 0;
};

bool delim(char c) { return std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')' || c == '{' || c == '}' || c == ';'; }

class Reader {
public:
    Reader(std::string_view s, size_t& pos) : s_(s), pos_(pos) {}

    SExp read() {
        skip();
        if (pos_ >= s_.size()) throw ParseError("unexpected end of input", pos_);
        char c = s_[pos_];
        SExp x;
        x.pos = pos_;
        if (c == '(') {
            ++pos_;
            x.kind = SExp::Kind::List;
            for (;;) {
                skip();
                if (pos_ >= s_.size()) throw ParseError("unclosed '('", x.pos);
                if (s_[pos_] == ')') break;
                x.items.push_back(read());
            }
            ++pos_;
            return x;
        }
        if (c == ')') throw ParseError("unexpected ')'", pos_);
        if (c == '}') throw ParseError("unexpected '}'", pos_);
        if (c == '{') {
            x.kind = SExp::Kind::Brace;
            int depth = 0;
            do {
                if (pos_ >= s_.size()) throw ParseError("unclosed '{'", x.pos);
                if (s_[pos_] == '{') ++depth;
                else if (s_[pos_] == '}') --depth;
                ++pos_;
            } while (depth > 0);
            return x;
        }
        x.kind = SExp::Kind::Atom;
        size_t b = pos_;
        while (pos_ < s_.size() && !delim(s_[pos_])) ++pos_;
        x.text = std::string(s_.substr(b, pos_ - b));
        return x;
    }

    void skip() {
        for (;;) {
            while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            if (pos_ < s_.size() && s_[pos_] == ';') {
                while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
                continue;
            }
            return;
        }
    }

private:
    std::string_view s_;
    size_t& pos_;
};

const std::set<std::string> keywords = {
    "lambda", "if", "prompt", "callcc", "callcomp", "abort", "event", "ref", "get", "set", "let", "seq", "some",
    "none", "inl", "inr", "case", "loop", "while", "try", "catch", "throw", "iterate", ":", "->", "cont", "comp",
    "mu", "option", "sum", "unit", "bool", "nat", "any",
};

bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '%' || c == '-' || c == '?' || c == '!' ||
           c == '*' || c == '\'';
}

class Parser {
public:
    Parser(std::string_view src, const Quantale& q) : src_(src), q_(q) {}

    TyP type(const SExp& x, std::set<std::string>& bound) {
        if (x.kind == SExp::Kind::Atom) {
            const auto& t = x.text;
            if (t == "unit") return t_unit();
            if (t == "bool") return t_bool();
            if (t == "nat") return t_nat();
            if (t == "any") return t_any();
            if (bound.count(t)) return t_var(t);
            throw ParseError("unknown type '" + t + "'", x.pos);
        }
        if (x.kind == SExp::Kind::Brace) throw ParseError("expected a type, found an effect", x.pos);
        if (x.items.empty() || x.items[0].kind != SExp::Kind::Atom) throw ParseError("malformed type", x.pos);
        const auto& h = x.items[0].text;
        auto n = x.items.size();
        if (h == "->" && (n == 4 || n == 3)) {
            auto a = type(x.items[1], bound);
            CE lat = n == 4 ? effect(x.items[2]) : ce::ce_unit(q_);
            return t_fun(a, lat, type(x.items[n - 1], bound));
        }
        if (h == "cont" && n == 5)
            return t_cont(tag(x.items[1]), type(x.items[2], bound), effect(x.items[3]), type(x.items[4], bound));
        if (h == "comp" && n == 4) return t_comp(type(x.items[1], bound), effect(x.items[2]), type(x.items[3], bound));
        if (h == "mu" && n == 3) {
            auto v = name(x.items[1]);
            bool fresh = bound.insert(v).second;
            TyP body = type(x.items[2], bound);
            if (fresh) bound.erase(v);
            try {
                return t_mu(v, body);
            } catch (const std::invalid_argument& e) {
                throw ParseError(e.what(), x.pos);
            }
        }
        if (h == "option" && n == 2) return t_option(type(x.items[1], bound));
        if (h == "ref" && n == 2) return t_ref(type(x.items[1], bound));
        if (h == "sum" && n == 3) return t_sum(type(x.items[1], bound), type(x.items[2], bound));
        throw ParseError("malformed type '" + h + "'", x.pos);
    }

    TyP type(const SExp& x) {
        std::set<std::string> bound;
        return type(x, bound);
    }

    CE effect(const SExp& x) {
        if (x.kind != SExp::Kind::Brace) throw ParseError("expected an effect '{P | C | U}'", x.pos);
        size_t pos = x.pos;
        try {
            return ce::parse_effect_at(src_, pos, q_, annot());
        } catch (const ce::EffectParseError& e) {
            throw ParseError(std::string("bad effect: ") + e.what(), e.pos);
        }
    }

    ce::AnnotParser annot() {
        return [this](std::string_view s, size_t& pos) -> ce::Annot {
            Reader r(s, pos);
            auto x = r.read();
            return type(x);
        };
    }

    std::string name(const SExp& x) {
        if (x.kind != SExp::Kind::Atom) throw ParseError("expected a name", x.pos);
        for (char c : x.text)
            if (!ident_char(c)) throw ParseError("invalid name '" + x.text + "'", x.pos);
        if (keywords.count(x.text) || std::isdigit(static_cast<unsigned char>(x.text[0])) || x.text[0] == '#')
            throw ParseError("'" + x.text + "' cannot be used as a name", x.pos);
        return x.text;
    }

    Tag tag(const SExp& x) { return name(x); }

    ExprP expr(const SExp& x) {
        auto e = expr_(x);
        if (e->pos == 0 && x.pos != 0) std::const_pointer_cast<Expr>(e)->pos = x.pos;
        return e;
    }

private:
    void arity(const SExp& x, size_t n, const char* form) {
        if (x.items.size() != n)
            throw ParseError(std::string("'") + form + "' expects " + std::to_string(n - 1) + " operands", x.pos);
    }

    ExprP lambda(const SExp& x) {
        arity(x, 3, "lambda");
        const auto& b = x.items[1];
        if (b.kind != SExp::Kind::List || b.items.size() != 3 || b.items[1].kind != SExp::Kind::Atom ||
            b.items[1].text != ":")
            throw ParseError("lambda binder must be (x : type)", b.pos);
        return e_lambda(name(b.items[0]), type(b.items[2]), expr(x.items[2]));
    }

    ExprP expr_(const SExp& x) {
        if (x.kind == SExp::Kind::Brace) throw ParseError("unexpected effect", x.pos);
        if (x.kind == SExp::Kind::Atom) {
            const auto& t = x.text;
            if (t == "#u") return e_unit();
            if (t == "#t") return e_bool(true);
            if (t == "#f") return e_bool(false);
            if (std::isdigit(static_cast<unsigned char>(t[0]))) {
                for (char c : t)
                    if (!std::isdigit(static_cast<unsigned char>(c))) throw ParseError("bad number '" + t + "'", x.pos);
                return e_nat(std::stoull(t));
            }
            return e_var(name(x));
        }
        if (x.items.empty()) throw ParseError("empty application", x.pos);
        const auto& hd = x.items[0];
        if (hd.kind == SExp::Kind::Atom && keywords.count(hd.text)) {
            const auto& h = hd.text;
            const auto& it = x.items;
            if (h == "lambda") return lambda(x);
            if (h == "if") {
                arity(x, 4, "if");
                return e_if(expr(it[1]), expr(it[2]), expr(it[3]));
            }
            if (h == "prompt") {
                arity(x, 4, "prompt");
                return e_prompt(tag(it[1]), expr(it[2]), expr(it[3]));
            }
            if (h == "callcc" || h == "callcomp") {
                arity(x, 5, h.c_str());
                auto t = tag(it[1]);
                auto eff = effect(it[2]);
                auto ty = type(it[3]);
                auto fn = expr(it[4]);
                return h == "callcc" ? e_callcc(t, eff, ty, fn) : e_callcomp(t, eff, ty, fn);
            }
            if (h == "abort") {
                arity(x, 4, "abort");
                return e_abort(tag(it[1]), type(it[2]), expr(it[3]));
            }
            if (h == "event") {
                arity(x, 2, "event");
                if (it[1].kind != SExp::Kind::Atom) throw ParseError("event expects a symbol", it[1].pos);
                if (!q_.has_atom(it[1].text)) throw ParseError("unknown event symbol '" + it[1].text + "'", it[1].pos);
                return e_event(it[1].text);
            }
            if (h == "ref") {
                arity(x, 3, "ref");
                return e_prim("ref", {expr(it[2])}, type(it[1]));
            }
            if (h == "get") {
                arity(x, 2, "get");
                return e_prim("get", {expr(it[1])});
            }
            if (h == "set") {
                arity(x, 3, "set");
                return e_prim("set", {expr(it[1]), expr(it[2])});
            }
            if (h == "let") {
                arity(x, 3, "let");
                const auto& b = it[1];
                if (b.kind != SExp::Kind::List || b.items.size() != 2) throw ParseError("let binder must be (x e)", b.pos);
                return e_let(name(b.items[0]), expr(b.items[1]), expr(it[2]));
            }
            if (h == "seq") {
                if (it.size() < 3) throw ParseError("'seq' expects at least 2 operands", x.pos);
                ExprP acc = expr(it.back());
                for (size_t i = it.size() - 1; i-- > 1;) acc = e_seq(expr(it[i]), acc);
                return acc;
            }
            if (h == "some") {
                arity(x, 2, "some");
                return e_some(expr(it[1]));
            }
            if (h == "none") {
                arity(x, 2, "none");
                return e_none(type(it[1]));
            }
            if (h == "inl" || h == "inr") {
                arity(x, 3, h.c_str());
                auto ty = type(it[1]);
                auto v = expr(it[2]);
                return h == "inl" ? e_inl(ty, v) : e_inr(ty, v);
            }
            if (h == "case") {
                arity(x, 4, "case");
                for (size_t i = 2; i < 4; ++i)
                    if (it[i].kind != SExp::Kind::List || it[i].items.size() != 2)
                        throw ParseError("case branch must be (x e)", it[i].pos);
                return e_case(expr(it[1]), name(it[2].items[0]), expr(it[2].items[1]), name(it[3].items[0]),
                              expr(it[3].items[1]));
            }
            if (h == "loop") {
                arity(x, 2, "loop");
                return mk(K::Loop, {expr(it[1])});
            }
            if (h == "while") {
                arity(x, 3, "while");
                return mk(K::While, {expr(it[1]), expr(it[2])});
            }
            if (h == "try") {
                arity(x, 3, "try");
                const auto& c = it[2];
                if (c.kind != SExp::Kind::List || c.items.size() != 3 || c.items[0].kind != SExp::Kind::Atom ||
                    c.items[0].text != "catch")
                    throw ParseError("try expects (catch <Exn> handler)", c.pos);
                return mk(K::Try, {expr(it[1]), expr(c.items[2])}, name(c.items[1]));
            }
            if (h == "throw") {
                arity(x, 3, "throw");
                return mk(K::Throw, {expr(it[2])}, name(it[1]));
            }
            if (h == "iterate") {
                arity(x, 4, "iterate");
                auto e = std::make_shared<Expr>(*mk(K::Iterate, {expr(it[3])}, tag(it[1])));
                e->name2 = tag(it[2]);
                return e;
            }
            throw ParseError("'" + h + "' cannot start an expression", hd.pos);
        }
        if (x.items.size() < 2) throw ParseError("application needs an argument", x.pos);
        ExprP acc = expr(x.items[0]);
        for (size_t i = 1; i < x.items.size(); ++i) acc = e_app(acc, expr(x.items[i]));
        return acc;
    }

    std::string_view src_;
    const Quantale& q_;
};

SExp read_all(std::string_view text, size_t& pos) {
    Reader r(text, pos);
    auto x = r.read();
    r.skip();
    if (pos != text.size()) throw ParseError("trailing input", pos);
    return x;
}

}  // namespace

ExprP parse_program(std::string_view text, const Quantale& q) {
    size_t pos = 0;
    auto x = read_all(text, pos);
    Parser p(text, q);
    return p.expr(x);
}

TyP parse_type(std::string_view text, const Quantale& q) {
    size_t pos = 0;
    auto x = read_all(text, pos);
    Parser p(text, q);
    return p.type(x);
}

TyP parse_type_at(std::string_view text, size_t& pos, const Quantale& q) {
    Reader r(text, pos);
    auto x = r.read();
    Parser p(text, q);
    return p.type(x);
}

ce::AnnotParser annot_parser(const Quantale& q) {
    const Quantale* qp = &q;
    return [qp](std::string_view s, size_t& pos) -> ce::Annot { return parse_type_at(s, pos, *qp); };
}

CE parse_annotated_effect(std::string_view text, const Quantale& q) {
    try {
        return ce::parse_effect(text, q, annot_parser(q));
    } catch (const ce::EffectParseError& e) {
        throw ParseError(std::string("bad effect: ") + e.what(), e.pos);
    }
}

}  // namespace seqeff::lang
