#include <functional>
#include <random>

#include <gtest/gtest.h>

#include "seqeff/reglang.hpp"

using namespace seqeff::reglang;

namespace {

// Independent reference: a regex tree with a backtracking matcher.
struct Rx {
    enum K { Eps, Sym, Alt, Cat, Star } k;
    char c = 0;
    std::shared_ptr<Rx> l, r;
};
using RxP = std::shared_ptr<Rx>;

RxP gen(std::mt19937& rng, int size) {
    auto n = std::make_shared<Rx>();
    if (size <= 1) {
        int p = std::uniform_int_distribution<int>(0, 6)(rng);
        if (p == 0) n->k = Rx::Eps;
        else n->k = Rx::Sym, n->c = "abc"[p % 3];
        return n;
    }
    int p = std::uniform_int_distribution<int>(0, 9)(rng);
    if (p < 2) {
        n->k = Rx::Star;
        n->l = gen(rng, size - 1);
        return n;
    }
    int left = std::uniform_int_distribution<int>(1, size - 1)(rng);
    n->k = p < 6 ? Rx::Cat : Rx::Alt;
    n->l = gen(rng, left);
    n->r = gen(rng, size - left);
    return n;
}

std::string text(const RxP& n) {
    switch (n->k) {
        case Rx::Eps: return "%e";
        case Rx::Sym: return std::string(1, n->c);
        case Rx::Alt: return "(" + text(n->l) + " + " + text(n->r) + ")";
        case Rx::Cat: return "(" + text(n->l) + " . " + text(n->r) + ")";
        case Rx::Star: return "(" + text(n->l) + ")*";
    }
    return "";
}

bool matches(const RxP& n, const std::string& w) {
    switch (n->k) {
        case Rx::Eps: return w.empty();
        case Rx::Sym: return w.size() == 1 && w[0] == n->c;
        case Rx::Alt: return matches(n->l, w) || matches(n->r, w);
        case Rx::Cat:
            for (size_t i = 0; i <= w.size(); ++i)
                if (matches(n->l, w.substr(0, i)) && matches(n->r, w.substr(i))) return true;
            return false;
        case Rx::Star:
            if (w.empty()) return true;
            for (size_t i = 1; i <= w.size(); ++i)
                if (matches(n->l, w.substr(0, i)) && matches(n, w.substr(i))) return true;
            return false;
    }
    return false;
}

std::vector<std::string> words(int maxLen) {
    std::vector<std::string> out{""};
    for (size_t i = 0; i < out.size(); ++i)
        if (static_cast<int>(out[i].size()) < maxLen)
            for (char c : std::string("abc")) out.push_back(out[i] + c);
    return out;
}

std::vector<int> ids(const std::string& w) {
    std::vector<int> v;
    for (char c : w) v.push_back(c - 'a');
    return v;
}

AlphabetP abc() { return std::make_shared<Alphabet>(std::vector<std::string>{"a", "b", "c"}); }

}  // namespace

TEST(RegLang, ParsesAndPrintsCanonically) {
    auto ab = abc();
    EXPECT_EQ(RegLang::parse(ab, "b + a").str(), "a + b");
    EXPECT_EQ(RegLang::parse(ab, "a + a").str(), "a");
    EXPECT_EQ(RegLang::parse(ab, "%e . a").str(), "a");
    EXPECT_EQ(RegLang::parse(ab, "(a*)*").str(), "a*");
    EXPECT_EQ(RegLang::parse(ab, "a.(b.c)").str(), "a.b.c");
    EXPECT_THROW(RegLang::parse(ab, "a + z"), RegexError);
    EXPECT_THROW(RegLang::parse(ab, "(a"), RegexError);
}

TEST(RegLang, MembershipMatchesBacktrackingMatcher) {
    auto ab = abc();
    std::mt19937 rng(7);
    auto ws = words(5);
    for (int i = 0; i < 300; ++i) {
        auto rx = gen(rng, 1 + i % 8);
        auto lang = RegLang::parse(ab, text(rx));
        for (auto& w : ws) ASSERT_EQ(lang_member(ids(w), lang), matches(rx, w)) << text(rx) << " on '" << w << "'";
    }
}

TEST(RegLang, OperatorsMatchReference) {
    auto ab = abc();
    std::mt19937 rng(11);
    auto ws = words(5);
    for (int i = 0; i < 150; ++i) {
        auto x = gen(rng, 1 + i % 6), y = gen(rng, 1 + (i / 2) % 6);
        auto lx = RegLang::parse(ab, text(x)), ly = RegLang::parse(ab, text(y));
        auto cat = std::make_shared<Rx>(Rx{Rx::Cat, 0, x, y});
        auto alt = std::make_shared<Rx>(Rx{Rx::Alt, 0, x, y});
        auto star = std::make_shared<Rx>(Rx{Rx::Star, 0, x, nullptr});
        for (auto& w : ws) {
            ASSERT_EQ(lang_member(ids(w), lang_concat(lx, ly)), matches(cat, w));
            ASSERT_EQ(lang_member(ids(w), lang_union(lx, ly)), matches(alt, w));
            ASSERT_EQ(lang_member(ids(w), lang_star(lx)), matches(star, w));
        }
    }
}

TEST(RegLang, InclusionWitnessesAreGenuine) {
    auto ab = abc();
    std::mt19937 rng(23);
    auto ws = words(5);
    int refuted = 0;
    for (int i = 0; i < 400; ++i) {
        auto x = gen(rng, 1 + i % 5), y = gen(rng, 1 + (i / 3) % 8);
        auto lx = RegLang::parse(ab, text(x)), ly = RegLang::parse(ab, text(y));
        auto wit = inclusion_witness(lx, ly);
        if (wit) {
            ++refuted;
            std::string w;
            for (int s : *wit) w += ab->name(s);
            ASSERT_TRUE(matches(x, w) && !matches(y, w)) << text(x) << " vs " << text(y);
        } else {
            for (auto& w : ws) ASSERT_TRUE(!matches(x, w) || matches(y, w)) << text(x) << " vs " << text(y);
        }
        EXPECT_EQ(lang_includes(lx, ly), !wit.has_value());
    }
    EXPECT_GT(refuted, 50);
}

TEST(RegLang, PrefixMembership) {
    auto ab = abc();
    auto l = RegLang::parse(ab, "a.b.c + a.a*");
    EXPECT_TRUE(lang_prefix_member(ids("ab"), l));
    EXPECT_TRUE(lang_prefix_member(ids("aaaa"), l));
    EXPECT_FALSE(lang_prefix_member(ids("ac"), l));
    EXPECT_TRUE(lang_prefix_includes(RegLang::parse(ab, "a.b"), l));
    EXPECT_FALSE(lang_prefix_includes(RegLang::parse(ab, "b"), l));
}

TEST(RegLang, SplitWordUsesAlphabet) {
    Alphabet ab({"a", "ab", "c"});
    auto w = split_word(ab, "abac");
    ASSERT_TRUE(w);
    EXPECT_EQ(render_word(ab, *w), "abac");
    EXPECT_FALSE(split_word(ab, "zz"));
}
