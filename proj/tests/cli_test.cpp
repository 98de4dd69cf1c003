#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "seqeff/cli.hpp"

using namespace seqeff;
using namespace seqeff::cli;

namespace {

std::string program(const std::string& name) {
    std::ifstream in(std::string(SEQEFF_PROGRAMS_DIR) + "/" + name);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Config trace_config(std::vector<std::string> alphabet) {
    Config cfg;
    cfg.alphabet = std::move(alphabet);
    return cfg;
}

struct Result {
    int code;
    std::string out;
};

template <typename F>
Result capture(F&& f) {
    std::ostringstream out;
    int code = f(out);
    return {code, out.str()};
}

}  // namespace

TEST(EffectJson, RoundTripsSampledEffects) {
    Config cfg = trace_config({"a", "b"});
    auto q = make_quantale(cfg);
    std::mt19937 rng(11);
    std::vector<ce::Tag> tags{"t", "u"};
    std::vector<ce::Annot> types{lang::t_unit(), lang::t_nat()};
    int mu_forms = 0;
    for (int i = 0; i < 200; ++i) {
        std::vector<ce::CE> xs{ce::sample_effect(*q, rng, tags, types, 2)};
        try {
            xs.push_back(ce::ce_iterate(*q, xs.front()));
        } catch (const ce::IterationDivergence&) {
        }
        for (auto& x : xs) {
            auto j = effect_json(x);
            auto back = effect_from_json(json::parse(j.dump()), *q);
            ASSERT_TRUE(ce::ce_equiv(back, x)) << j.dump();
            ASSERT_EQ(ce::str(back), ce::str(x));
            if (j.dump().find("\"mu\"") != std::string::npos) ++mu_forms;
        }
    }
    EXPECT_GT(mu_forms, 0);
}

TEST(EffectJson, UnderlyingBottomIsNull) {
    auto q = make_quantale(trace_config({"a"}));
    auto x = ce::parse_effect("{| abort t a ~> unit | _|_}", *q, lang::annot_parser(*q));
    auto j = effect_json(x);
    EXPECT_TRUE(j.at("U").is_null());
    EXPECT_EQ(j.at("C").at(0).at("kind"), "abort");
    EXPECT_EQ(j.at("C").at(0).at("prefix"), "a");
}

TEST(EffectJson, RejectsUnknownKinds) {
    auto q = make_quantale(trace_config({"a"}));
    json j = {{"P", json::array()}, {"C", {{{"kind", "resume"}, {"tag", "t"}, {"prefix", "a"}, {"type", "unit"}}}},
              {"U", nullptr}};
    EXPECT_THROW(effect_from_json(j, *q), UsageError);
}

TEST(Quantales, FlagsMustFitTheInstance) {
    Config cfg;
    EXPECT_THROW(make_quantale(cfg), UsageError);
    cfg.quantale = "labels";
    EXPECT_THROW(make_quantale(cfg), UsageError);
    cfg.labels = {"x", "y"};
    EXPECT_EQ(make_quantale(cfg)->name(), "labels");
    cfg.alphabet = {"a"};
    EXPECT_THROW(make_quantale(cfg), UsageError);
}

TEST(Commands, CheckReportsTheCheckedExceptionEffect) {
    Config cfg = trace_config({"a", "b", "d", "g"});
    cfg.binds["c"] = "true";
    cfg.json = true;
    auto r = capture([&](std::ostream& o) { return cmd_check(program("checked_exception.seq"), cfg, o); });
    ASSERT_EQ(r.code, kOk) << r.out;
    auto j = json::parse(r.out);
    EXPECT_EQ(j.at("type"), "unit");
    EXPECT_EQ(j.at("effect_text"), "{| | d.a.b + d.g}");
    EXPECT_TRUE(j.at("effect").at("P").empty());
}

TEST(Commands, RunFollowsTheBoundCondition) {
    Config cfg = trace_config({"a", "b", "d", "g"});
    cfg.json = true;
    for (auto [c, trace] : {std::pair{"true", "dab"}, std::pair{"false", "dg"}}) {
        cfg.binds["c"] = c;
        auto r = capture([&](std::ostream& o) { return cmd_run(program("checked_exception.seq"), cfg, o); });
        ASSERT_EQ(r.code, kOk) << r.out;
        auto j = json::parse(r.out);
        EXPECT_EQ(j.at("trace"), trace);
        EXPECT_EQ(j.at("outcome"), "done");
    }
}

TEST(Commands, ExitCodesDistinguishFailureKinds) {
    Config cfg = trace_config({"a", "b", "g"});
    auto code = [&](const std::string& name) {
        std::ostringstream o;
        return cmd_check(program(name), cfg, o);
    };
    EXPECT_EQ(code("self_loop.seq"), kOk);
    EXPECT_EQ(code("self_loop_extra_event.seq"), kTypeError);
    EXPECT_EQ(code("ill_typed_abort.seq"), kTypeError);
    EXPECT_EQ(code("broken.seq"), kParseError);
    Config none;
    std::ostringstream o;
    EXPECT_EQ(cmd_check(program("self_loop.seq"), none, o), kUsage);
}

TEST(Commands, TypeErrorsNameTheRuleAndClause) {
    Config cfg = trace_config({"a", "b"});
    cfg.json = true;
    auto r = capture([&](std::ostream& o) { return cmd_check(program("self_loop_extra_event.seq"), cfg, o); });
    ASSERT_EQ(r.code, kTypeError);
    auto e = json::parse(r.out).at("error");
    EXPECT_EQ(e.at("rule"), "V-Effects");
    EXPECT_EQ(e.at("clause"), "prophecy-controls");
    EXPECT_EQ(e.at("rhs"), "{| replace t : a* ~> unit | _|_}");
}

TEST(Commands, ExpandLeavesCoreProgramsAlone) {
    Config cfg = trace_config({"a", "b", "d", "g"});
    cfg.json = true;
    auto src = program("checked_exception.seq");
    auto r = capture([&](std::ostream& o) { return cmd_expand(src, cfg, o); });
    ASSERT_EQ(r.code, kOk);
    auto q = make_quantale(cfg);
    EXPECT_EQ(json::parse(r.out).at("expanded"), lang::print(lang::parse_program(src, *q)));
}

TEST(Commands, DeriveAgreesOnWhile) {
    Config cfg = trace_config({"c", "e"});
    cfg.assumes["b"] = "bool";
    cfg.json = true;
    auto r = capture([&](std::ostream& o) { return cmd_derive(program("while_derive.seq"), cfg, o); });
    ASSERT_EQ(r.code, kOk) << r.out;
    auto j = json::parse(r.out);
    EXPECT_EQ(j.at("rule"), "D-While");
    EXPECT_TRUE(j.at("leq").get<bool>());
    EXPECT_TRUE(j.at("underlying_equal").get<bool>());
}

TEST(Commands, AuditsAGeneratedCorpus) {
    Config cfg = trace_config({"a", "b", "c"});
    cfg.fuzz = 25;
    cfg.fuel = 300;
    cfg.json = true;
    auto r = capture([&](std::ostream& o) { return cmd_audit("", cfg, o); });
    ASSERT_EQ(r.code, kOk) << r.out;
    auto s = json::parse(r.out).at("summary");
    EXPECT_EQ(s.at("programs"), 25);
    EXPECT_EQ(s.at("failures"), 0);
    EXPECT_EQ(s.at("stuck"), 0);
}

TEST(Commands, LawsPassOnSmallSamples) {
    Config cfg = trace_config({"a", "b"});
    cfg.samples = 40;
    cfg.ce_samples = 20;
    cfg.iter_samples = 10;
    auto r = capture([&](std::ostream& o) { return cmd_laws(cfg, o); });
    EXPECT_EQ(r.code, kOk) << r.out;
    EXPECT_EQ(r.out.find("FAIL"), std::string::npos) << r.out;
}
