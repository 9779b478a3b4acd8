// Model grammar: parsing, canonical rendering, GM/AR1 reparametrization.
#include <wavecal/model.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace wavecal;

TEST(ParseModel, CompositeBlockCountAndKinds) {
    LatentModel m = parse_model("3*GM()+WN()+QN()+RW()", 100.0);
    ASSERT_EQ(m.blocks.size(), 6u);
    for (int i = 0; i < 3; ++i) {
        EXPECT_EQ(m.blocks[i].kind, ProcessKind::AR1);
        EXPECT_TRUE(m.blocks[i].from_gm);
    }
    EXPECT_EQ(m.blocks[3].kind, ProcessKind::WN);
    EXPECT_EQ(m.blocks[4].kind, ProcessKind::QN);
    EXPECT_EQ(m.blocks[5].kind, ProcessKind::RW);
    EXPECT_EQ(m.n_params(), 9u);
}

TEST(ParseModel, RenderRoundTrip) {
    const char* cases[] = {
        "WN(sigma2=1)",
        "AR1(phi=0.5,sigma2=0.25)+WN()",
        "2*AR1()+QN()+RW()+DR()",
        "3*GM()+WN()+QN()+RW()",
        "GM(beta=0.01,sigma2_gm=2)+RW(gamma2=1e-06)",
        "ARMA(2,1)+WN()",
    };
    for (const char* s : cases) {
        LatentModel m = parse_model(s, 50.0);
        std::string r = render_model(m);
        LatentModel m2 = parse_model(r, 50.0);
        EXPECT_EQ(m, m2) << s << " -> " << r;
        EXPECT_EQ(render_model(m2), r);
    }
}

TEST(ParseModel, GmStoredInAr1Space) {
    const double freq = 100.0, beta = 0.5, s2gm = 3.0;
    LatentModel m = parse_model("GM(beta=0.5,sigma2_gm=3)", freq);
    auto [phi, s2] = gm_to_ar1(beta, s2gm, freq);
    EXPECT_DOUBLE_EQ(m.blocks[0].params[0].value, phi);
    EXPECT_DOUBLE_EQ(m.blocks[0].params[1].value, s2);
    auto [b2, g2] = ar1_to_gm(phi, s2, freq);
    EXPECT_NEAR(b2, beta, 1e-12);
    EXPECT_NEAR(g2, s2gm, 1e-12);
}

TEST(ParseModel, PinSuffixMarksParameterFixed) {
    LatentModel m = parse_model("AR1(phi=0.9!,sigma2=0.1)+WN(sigma2=1)");
    EXPECT_TRUE(m.blocks[0].params[0].pinned);
    EXPECT_FALSE(m.blocks[0].params[1].pinned);
    EXPECT_EQ(m.n_params(), 3u);
    EXPECT_EQ(m.n_free(), 2u);
}

TEST(ParseModel, MultiplierOnlyForGmAr1) {
    EXPECT_NO_THROW(parse_model("4*AR1()"));
    EXPECT_THROW(parse_model("2*WN()"), ParseError);
    EXPECT_THROW(parse_model("2*RW()"), ParseError);
}

TEST(ParseModel, SingletonsAppearOnce) {
    EXPECT_THROW(parse_model("WN()+WN()"), ParseError);
    EXPECT_THROW(parse_model("QN()+RW()+QN()"), ParseError);
    EXPECT_NO_THROW(parse_model("WN()+QN()+RW()+DR()"));
}

TEST(ParseModel, ErrorsCarryPosition) {
    try {
        parse_model("WN()+XX()");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.position(), 5u);
    }
    EXPECT_THROW(parse_model(""), UsageError);
    EXPECT_THROW(parse_model("WN()+"), ParseError);
    EXPECT_THROW(parse_model("WN(sigma2=-1)"), ParseError);
    EXPECT_THROW(parse_model("AR1(phi=1.5)"), ParseError);
    EXPECT_THROW(parse_model("GM(beta=1)"), ParseError); // needs sigma2_gm too
}

TEST(ParseModel, ThetaRoundTrip) {
    LatentModel m = parse_model("AR1()+WN()+RW()");
    std::vector<double> t = {0.7, 0.2, 1.5, 1e-4};
    m.set_theta(t);
    EXPECT_EQ(m.theta(), t);
    EXPECT_TRUE(m.fully_specified());
}

TEST(ParseModel, ParamLabelsDistinguishRepeatedBlocks) {
    LatentModel m = parse_model("2*GM()+WN()");
    auto labels = m.param_labels();
    ASSERT_EQ(labels.size(), 5u);
    EXPECT_NE(labels[0], labels[2]);
    EXPECT_EQ(labels[4].find("sigma2"), 0u);
}

TEST(ParseModel, CollapsesIdenticalRunsToMultiplier) {
    LatentModel m = parse_model("AR1()+AR1()+AR1()+WN()");
    EXPECT_EQ(render_model(m), "3*AR1()+WN()");
}

TEST(GmMap, RoundTripAndMonotonicity) {
    const double freq = 250.0;
    for (double beta : {1e-4, 0.01, 1.0, 40.0}) {
        auto [phi, s2] = gm_to_ar1(beta, 2.0, freq);
        EXPECT_GT(phi, 0.0);
        EXPECT_LT(phi, 1.0);
        auto [b, g] = ar1_to_gm(phi, s2, freq);
        EXPECT_NEAR(b / beta, 1.0, 1e-10);
        EXPECT_NEAR(g / 2.0, 1.0, 1e-10);
    }
    EXPECT_THROW(gm_to_ar1(-1.0, 1.0, 1.0), UsageError);
    EXPECT_THROW(ar1_to_gm(1.0, 1.0, 1.0), UsageError);
}
