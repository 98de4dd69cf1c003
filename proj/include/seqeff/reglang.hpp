#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace seqeff::reglang {

struct RegexError : std::runtime_error {
    size_t pos;
    RegexError(const std::string& msg, size_t p)
        : std::runtime_error(msg + " at offset " + std::to_string(p)), pos(p) {}
};

// Finite event alphabet. Symbols are short identifiers; order is declaration order.
class Alphabet {
public:
    explicit Alphabet(std::vector<std::string> symbols);

    static std::shared_ptr<const Alphabet> parse_list(std::string_view commaSeparated);

    size_t size() const { return symbols_.size(); }
    const std::string& name(int i) const { return symbols_.at(static_cast<size_t>(i)); }
    std::optional<int> index(std::string_view name) const;
    const std::vector<std::string>& symbols() const { return symbols_; }
    bool same_as(const Alphabet& other) const { return symbols_ == other.symbols_; }

private:
    std::vector<std::string> symbols_;
    std::map<std::string, int, std::less<>> index_;
};

using AlphabetP = std::shared_ptr<const Alphabet>;

struct Dfa;

// Syntactic regex node. Built only through the smart constructors in RegLang,
// which flatten and sort so that `key` is a canonical spelling.
struct Node {
    enum class Kind : uint8_t { Empty, Eps, Sym, Alt, Cat, Star };
    Kind kind;
    int sym = -1;
    std::vector<std::shared_ptr<const Node>> kids;
    std::string key;
    bool nullable = false;

    mutable std::once_flag compiled;
    mutable std::shared_ptr<const Dfa> dfa;
};

using NodeP = std::shared_ptr<const Node>;

struct Dfa {
    size_t nsyms = 0;
    std::vector<int> next;        // state * nsyms + sym
    std::vector<uint8_t> accept;
    std::vector<uint8_t> live;    // some accepting state is reachable

    size_t states() const { return accept.size(); }
    int step(int s, int sym) const { return next[static_cast<size_t>(s) * nsyms + static_cast<size_t>(sym)]; }
};

class RegLang {
public:
    static RegLang empty(AlphabetP ab);
    static RegLang epsilon(AlphabetP ab);
    static RegLang symbol(AlphabetP ab, int sym);
    static RegLang symbol(AlphabetP ab, std::string_view name);

    // `%e`, symbols, `+`, `.`, postfix `*`, parentheses.
    static RegLang parse(AlphabetP ab, std::string_view text);

    const NodeP& node() const { return node_; }
    const AlphabetP& alphabet() const { return ab_; }

    std::string str() const;
    bool is_empty_language() const;
    bool has_epsilon() const { return node_->nullable; }

    const Dfa& dfa() const;

private:
    RegLang(AlphabetP ab, NodeP n) : ab_(std::move(ab)), node_(std::move(n)) {}
    friend RegLang lang_concat(const RegLang&, const RegLang&);
    friend RegLang lang_union(const RegLang&, const RegLang&);
    friend RegLang lang_star(const RegLang&);
    friend struct Builder;

    AlphabetP ab_;
    NodeP node_;
};

RegLang lang_concat(const RegLang& a, const RegLang& b);
RegLang lang_union(const RegLang& a, const RegLang& b);
RegLang lang_star(const RegLang& a);

bool lang_includes(const RegLang& sub, const RegLang& sup);
bool lang_equal(const RegLang& a, const RegLang& b);
bool lang_member(const std::vector<int>& word, const RegLang& a);
bool lang_member(const std::vector<std::string>& word, const RegLang& a);
// True iff `word` can be extended to a member.
bool lang_prefix_member(const std::vector<int>& word, const RegLang& a);

// Shortest word in sub but not in sup, if any. With `prefixes`, sup is read as
// its prefix closure.
std::optional<std::vector<int>> inclusion_witness(const RegLang& sub, const RegLang& sup, bool prefixes = false);
// Every word of sub is a prefix of some word of sup.
bool lang_prefix_includes(const RegLang& sub, const RegLang& sup);

std::string render_word(const Alphabet& ab, const std::vector<int>& word);
// Splits a trace string into symbols by greedy longest match against the alphabet.
std::optional<std::vector<int>> split_word(const Alphabet& ab, std::string_view text);

}  // namespace seqeff::reglang
