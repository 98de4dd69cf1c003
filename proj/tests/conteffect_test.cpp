#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace seqeff;
using namespace seqeff::ce;
using seqeff::testing::ty;

namespace {

struct Fixture : ::testing::Test {
    quantale::QuantaleP q = quantale::make_trace(reglang::Alphabet::parse_list("a,b,c,d,e,g,h"));
    std::vector<Tag> tags{"t", "u"};
    std::vector<Annot> types{ty("unit"), ty("nat")};

    Eff u(const std::string& s) const { return q->parse(s); }
    CE parse(const std::string& s) const { return parse_effect(s, *q, seqeff::testing::name_parser()); }
    CE sample(std::mt19937& rng, int depth = 1) const { return sample_effect(*q, rng, tags, types, depth); }
};

}  // namespace

using ContEffect = Fixture;

TEST_F(ContEffect, PureEffectsEmbedUnderlyingOperations) {
    CE a = ce_pure(u("a")), b = ce_pure(u("b"));
    EXPECT_EQ(str(ce_seq(a, b)), "{| | a.b}");
    EXPECT_EQ(str(ce_join(a, b)), "{| | a + b}");
    EXPECT_TRUE(ce_leq(a, ce_join(a, b)));
    EXPECT_FALSE(ce_leq(ce_join(a, b), a));
    EXPECT_TRUE(ce_leq(ce_bot(), a));
    EXPECT_EQ(str(ce_seq(ce_bot(), a).U), "_|_");
}

TEST_F(ContEffect, LeftAccumulationExtendsControlPrefixes) {
    CE x = ce_pure(u("d"));
    CE y{{}, {mk_abort("t", u("%e"), ty("nat"))}, u("a.b")};
    EXPECT_EQ(str(ce_seq(x, y)), "{| abort t d ~> nat | d.a.b}");
}

TEST_F(ContEffect, RightAccumulationExtendsObservations) {
    CE x{{mk_proph("t", parse("{| | a}"), ty("unit"), ce_unit(*q))}, {}, u("%e")};
    CE r = ce_seq(x, ce_pure(u("b")));
    EXPECT_EQ(str(r), "{proph t {| | a} ~> unit obs {| | b} | | b}");
}

TEST_F(ContEffect, NormalizationMergesByShape) {
    CE x{{}, {mk_abort("t", u("a"), ty("nat")), mk_abort("t", u("b"), ty("nat")), mk_abort("t", u("b"), ty("unit"))},
         u("%e")};
    EXPECT_EQ(str(normalize(x)), "{| abort t a + b ~> nat, abort t b ~> unit | %e}");
}

TEST_F(ContEffect, TextRoundTrips) {
    std::mt19937 rng(5);
    for (int i = 0; i < 200; ++i) {
        CE x = sample(rng, 2);
        CE y = parse(str(x));
        EXPECT_EQ(str(x), str(y));
        EXPECT_TRUE(ce_equiv(x, y));
    }
    EXPECT_THROW(parse("{| abort t a |}"), EffectParseError);
    EXPECT_THROW(parse("{| | a + z}"), EffectParseError);
}

TEST_F(ContEffect, MonoidAndDistributivityUpToEquivalence) {
    std::mt19937 rng(17);
    CE one = ce_unit(*q);
    for (int i = 0; i < 300; ++i) {
        CE x = sample(rng), y = sample(rng), z = sample(rng);
        ASSERT_TRUE(ce_equiv(ce_seq(ce_seq(x, y), z), ce_seq(x, ce_seq(y, z)))) << str(x) << " ; " << str(y) << " ; " << str(z);
        ASSERT_TRUE(ce_equiv(ce_seq(one, x), x) && ce_equiv(ce_seq(x, one), x)) << str(x);
        ASSERT_TRUE(ce_equiv(ce_seq(x, ce_join(y, z)), ce_join(ce_seq(x, y), ce_seq(x, z))));
        ASSERT_TRUE(ce_equiv(ce_seq(ce_join(y, z), x), ce_join(ce_seq(y, x), ce_seq(z, x))));
    }
}

TEST_F(ContEffect, OrderIsAPreorderCompatibleWithJoin) {
    std::mt19937 rng(19);
    for (int i = 0; i < 200; ++i) {
        CE x = sample(rng), y = sample(rng), z = sample(rng);
        ASSERT_TRUE(ce_leq(x, x));
        ASSERT_TRUE(ce_leq(x, ce_join(x, y)));
        if (ce_leq(x, y) && ce_leq(y, z)) {
            ASSERT_TRUE(ce_leq(x, z));
        }
        if (ce_leq(x, y)) {
            ASSERT_TRUE(ce_leq(ce_seq(z, x), ce_seq(z, y)) || underlying_top(ce_seq(z, y)));
        }
        ASSERT_TRUE(ce_equiv(normalize(x), x));
    }
}

TEST_F(ContEffect, BlockingRoundTrips) {
    std::mt19937 rng(29);
    for (int i = 0; i < 200; ++i) {
        CE x = sample(rng);
        std::vector<ProphP> ps;
        std::vector<ControlP> cs;
        for (auto& p : x.P)
            if (p->kind != Prophecy::Kind::Blocked || p->tag != "t") ps.push_back(p);
        for (auto& c : x.C)
            if (c->kind != Control::Kind::Blocked || c->tag != "t") cs.push_back(c);
        ps = normalize(ps);
        cs = normalize(cs);
        EXPECT_TRUE(controls_leq(unblock(block(cs, "t"), "t"), cs) && controls_leq(cs, unblock(block(cs, "t"), "t")));
        auto once = unblock(block(ps, "t"), "t");
        EXPECT_EQ(str(CE{once, {}, std::nullopt}), str(CE{unblock(ps, "t"), {}, std::nullopt}));
    }
}

TEST_F(ContEffect, PromptConclusionForAbortAndReplace) {
    Eff g = u("g");
    std::vector<ControlP> cs{mk_abort("t", u("d"), ty("nat"))};
    OptU res = u("d.a.b");
    for (auto& e : project(cs, g, "t")) res = opt_join(res, e);
    EXPECT_TRUE(q->equal(*res, u("d.a.b + d.g")));
    EXPECT_TRUE(filter_controls(cs, "t").empty());

    std::vector<ControlP> rs{mk_replace("t", u("d.h"), ty("unit"))};
    OptU res3 = u("d.a.b");
    for (auto& e : project(rs, g, "t")) res3 = opt_join(res3, e);
    EXPECT_TRUE(q->equal(*res3, u("d.a.b + d.h")));
}

TEST_F(ContEffect, IterationLawsWithoutProphecies) {
    std::mt19937 rng(31);
    CE one = ce_unit(*q);
    for (int i = 0; i < 150; ++i) {
        CE x = sample(rng, 0);
        CE s = ce_iterate(*q, x);
        ASSERT_TRUE(ce_leq(x, s)) << str(x) << " vs " << str(s);
        ASSERT_TRUE(ce_leq(one, s));
        ASSERT_TRUE(ce_leq(ce_seq(s, s), s) || underlying_top(s));
        ASSERT_TRUE(ce_leq(ce_seq(x, s), s) || underlying_top(s));
        ASSERT_TRUE(ce_leq(ce_seq(s, x), s) || underlying_top(s));
        ASSERT_TRUE(ce_equiv(ce_iterate(*q, s), s));
    }
}

TEST_F(ContEffect, AbortingBodyIterates) {
    CE x{{}, {mk_abort("l", u("e"), ty("unit"))}, u("a")};
    CE s = ce_iterate(*q, x);
    EXPECT_EQ(str(s), "{| abort l a*.e ~> unit | a*}");
    EXPECT_TRUE(ce_equiv(ce_iterate(*q, ce_unit(*q)), ce_unit(*q)));
}

TEST_F(ContEffect, MuFormBoundsFiniteUnrollings) {
    std::mt19937 rng(37);
    int checked = 0;
    while (checked < 100) {
        CE x = sample(rng);
        if (x.P.empty()) continue;
        ++checked;
        CE s = ce_iterate(*q, x);
        auto bounded = bounded_prophecy_union(*q, x, 6);
        ASSERT_TRUE(prophs_leq(bounded, s.P)) << str(x);
    }
}

TEST_F(ContEffect, MuComparisonTerminates) {
    CE x{{mk_proph("t", parse("{| | a}"), ty("unit"), ce_unit(*q))}, {mk_replace("t", u("%e"), ty("unit"))}, u("a")};
    CE s = ce_iterate(*q, x);
    ASSERT_EQ(s.P.size(), 1u);
    EXPECT_EQ(s.P[0]->kind, Prophecy::Kind::Mu);
    EXPECT_TRUE(ce_leq(s, s));
    EXPECT_TRUE(ce_equiv(parse(str(s)), s));
    EXPECT_TRUE(ce_leq(ce_seq(x, s), s));
}
