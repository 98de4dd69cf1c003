#include <cctype>

#include "seqeff/conteffect.hpp"

namespace seqeff::ce {

namespace {

bool word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '%' || c == '-'; }

class Parser {
public:
    Parser(std::string_view text, size_t& pos, const Quantale& q, const AnnotParser& annot)
        : s_(text), pos_(pos), q_(q), annot_(annot) {}

    CE effect() {
        expect('{');
        CE x;
        if (!peek_is('|')) {
            do x.P.push_back(prophecy());
            while (accept(','));
        }
        expect('|');
        if (!peek_is('|')) {
            do x.C.push_back(control());
            while (accept(','));
        }
        expect('|');
        x.U = underlying();
        expect('}');
        return normalize(std::move(x));
    }

private:
    void ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool peek_is(char c) {
        ws();
        return pos_ < s_.size() && s_[pos_] == c;
    }
    bool accept(char c) {
        if (!peek_is(c)) return false;
        ++pos_;
        return true;
    }
    void expect(char c) {
        if (!accept(c)) fail(std::string("expected '") + c + "'");
    }
    void expect(std::string_view lit) {
        ws();
        if (s_.substr(pos_, lit.size()) != lit) fail("expected '" + std::string(lit) + "'");
        pos_ += lit.size();
    }
    [[noreturn]] void fail(const std::string& m) { throw EffectParseError(m, pos_); }

    std::string word() {
        ws();
        size_t b = pos_;
        while (pos_ < s_.size() && word_char(s_[pos_])) ++pos_;
        if (b == pos_) fail("expected a name");
        return std::string(s_.substr(b, pos_ - b));
    }

    std::string peek_word() {
        ws();
        size_t e = pos_;
        while (e < s_.size() && word_char(s_[e])) ++e;
        return std::string(s_.substr(pos_, e - pos_));
    }

    Eff regex_until_arrow() {
        ws();
        size_t e = s_.find("~>", pos_);
        if (e == std::string_view::npos) fail("expected '~>'");
        auto text = s_.substr(pos_, e - pos_);
        size_t at = pos_;
        pos_ = e + 2;
        return parse_u(text, at);
    }

    Eff parse_u(std::string_view text, size_t at) {
        try {
            return q_.parse(text);
        } catch (const std::exception& ex) {
            throw EffectParseError(ex.what(), at);
        }
    }

    Annot type() {
        ws();
        size_t at = pos_;
        try {
            return annot_(s_, pos_);
        } catch (const EffectParseError&) {
            throw;
        } catch (const std::exception& ex) {
            throw EffectParseError(ex.what(), at);
        }
    }

    OptU underlying() {
        ws();
        if (s_.substr(pos_, 3) == "_|_") {
            pos_ += 3;
            return std::nullopt;
        }
        size_t b = pos_;
        int depth = 0;
        while (pos_ < s_.size()) {
            char c = s_[pos_];
            if (c == '(') ++depth;
            else if (c == ')') --depth;
            else if (c == '}' && depth == 0) break;
            ++pos_;
        }
        if (pos_ == b) fail("expected an underlying effect");
        return parse_u(s_.substr(b, pos_ - b), b);
    }

    ControlP control() {
        if (accept('[')) {
            auto inner = control();
            expect(']');
            expect('@');
            return mk_cblocked(inner, word());
        }
        auto kw = word();
        if (kw == "abort") {
            auto tag = word();
            auto pre = regex_until_arrow();
            return mk_abort(tag, pre, type());
        }
        if (kw == "replace") {
            auto tag = word();
            expect(':');
            auto pre = regex_until_arrow();
            return mk_replace(tag, pre, type());
        }
        fail("expected a control effect, got '" + kw + "'");
    }

    ProphP prophecy() {
        if (accept('[')) {
            auto inner = prophecy();
            expect(']');
            expect('@');
            return mk_pblocked(inner, word());
        }
        auto kw = peek_word();
        if (kw == "proph" || kw == "cproph") {
            word();
            auto tag = word();
            auto pred = effect();
            expect("~>");
            auto ty = type();
            if (word() != "obs") fail("expected 'obs'");
            auto obs = effect();
            return mk_proph(tag, pred, ty, obs, kw == "proph" ? Flavor::Capture : Flavor::Compositional);
        }
        if (kw == "mu") {
            word();
            auto v = word();
            expect('.');
            return mk_mu(v, prophecy());
        }
        return mk_pvar(word());
    }

    std::string_view s_;
    size_t& pos_;
    const Quantale& q_;
    const AnnotParser& annot_;
};

}  // namespace

CE parse_effect_at(std::string_view text, size_t& pos, const Quantale& q, const AnnotParser& annot) {
    Parser p(text, pos, q, annot);
    return p.effect();
}

CE parse_effect(std::string_view text, const Quantale& q, const AnnotParser& annot) {
    size_t pos = 0;
    CE x = parse_effect_at(text, pos, q, annot);
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos != text.size()) throw EffectParseError("trailing input after effect", pos);
    return x;
}

}  // namespace seqeff::ce
