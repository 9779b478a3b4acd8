// Seeded simulation: determinism, block additivity, per-process laws.
#include <wavecal/simulate.hpp>
#include <wavecal/wvar.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

using namespace wavecal;

namespace {

std::vector<double> sim(const std::string& model, std::size_t T, std::uint64_t seed) {
    return simulate(SimSpec{parse_model(model), T, seed});
}

double mean(const std::vector<double>& x) {
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double variance(const std::vector<double>& x) {
    const double m = mean(x);
    double v = 0.0;
    for (double e : x) v += (e - m) * (e - m);
    return v / static_cast<double>(x.size() - 1);
}

} // namespace

TEST(Simulate, DeterministicForFixedSeed) {
    auto a = sim("AR1(phi=0.5,sigma2=1)+WN(sigma2=2)", 4096, 99);
    auto b = sim("AR1(phi=0.5,sigma2=1)+WN(sigma2=2)", 4096, 99);
    EXPECT_EQ(a, b);
    auto c = sim("AR1(phi=0.5,sigma2=1)+WN(sigma2=2)", 4096, 100);
    EXPECT_NE(a, c);
}

TEST(Simulate, BlockAdditivityIsBitExact) {
    // a composite equals the sum of its blocks simulated standalone with the
    // per-block derived seeds
    const std::uint64_t seed = 1234;
    auto both = sim("WN(sigma2=1)+RW(gamma2=0.1)", 1000, seed);
    LatentModel m = parse_model("WN(sigma2=1)+RW(gamma2=0.1)");
    auto wn = detail::simulate_block(m.blocks[0], 1000, derive_seed(seed, 0), -1);
    auto rw = detail::simulate_block(m.blocks[1], 1000, derive_seed(seed, 1), -1);
    for (std::size_t t = 0; t < 1000; ++t) EXPECT_EQ(both[t], wn[t] + rw[t]);
}

TEST(Simulate, DriftIsDeterministicRamp) {
    auto x = sim("DR(omega=2)", 5, 7);
    std::vector<double> expect = {2.0, 4.0, 6.0, 8.0, 10.0};
    EXPECT_EQ(x, expect);
}

TEST(Simulate, RandomWalkIsCumulativeSumOfItsIncrements) {
    auto x = sim("RW(gamma2=1)", 512, 5);
    for (std::size_t t = 1; t < x.size(); ++t) {
        // increments are iid N(0,1): standardized increments stay bounded
        EXPECT_LT(std::abs(x[t] - x[t - 1]), 6.0);
    }
    // increments variance near 1
    std::vector<double> inc(x.size());
    inc[0] = x[0];
    for (std::size_t t = 1; t < x.size(); ++t) inc[t] = x[t] - x[t - 1];
    EXPECT_NEAR(variance(inc), 1.0, 0.2);
}

TEST(Simulate, WhiteNoiseMoments) {
    auto x = sim("WN(sigma2=4)", 1 << 16, 11);
    EXPECT_NEAR(mean(x), 0.0, 0.05);
    EXPECT_NEAR(variance(x) / 4.0, 1.0, 0.05);
}

TEST(Simulate, Ar1StationaryFromTheFirstSample) {
    // exact stationary initialization: variance of x_0 across seeds matches
    // sigma2/(1-phi^2) without any burn-in
    const double phi = 0.95, s2 = 1.0;
    std::vector<double> first;
    for (std::uint64_t s = 0; s < 4000; ++s)
        first.push_back(sim("AR1(phi=0.95,sigma2=1)", 1, s)[0]);
    EXPECT_NEAR(variance(first) * (1.0 - phi * phi) / s2, 1.0, 0.1);
}

TEST(Simulate, Ar1Autocorrelation) {
    auto x = sim("AR1(phi=0.8,sigma2=1)", 1 << 16, 3);
    double num = 0.0, den = 0.0;
    const double m = mean(x);
    for (std::size_t t = 1; t < x.size(); ++t) num += (x[t] - m) * (x[t - 1] - m);
    for (double v : x) den += (v - m) * (v - m);
    EXPECT_NEAR(num / den, 0.8, 0.02);
}

TEST(Simulate, QuantizationNoiseHasLagOneAnticorrelation) {
    auto x = sim("QN(q2=1)", 1 << 16, 17);
    double num = 0.0, den = 0.0;
    const double m = mean(x);
    for (std::size_t t = 1; t < x.size(); ++t) num += (x[t] - m) * (x[t - 1] - m);
    for (double v : x) den += (v - m) * (v - m);
    EXPECT_NEAR(num / den, -0.5, 0.02); // gamma(1)/gamma(0) = -Q^2 / 2Q^2
    EXPECT_NEAR(variance(x) / 2.0, 1.0, 0.05);
}

TEST(Simulate, ArmaMatchesTheoreticalVariance) {
    LatentModel m = parse_model("ARMA(1,1)");
    m.set_theta({0.5, 0.3, 1.0});
    auto x = simulate(SimSpec{m, std::size_t(1) << 16, 21});
    // gamma(0) = sigma2 (1 + 2 phi theta + theta^2) / (1 - phi^2)
    const double g0 = (1.0 + 2.0 * 0.5 * 0.3 + 0.09) / 0.75;
    EXPECT_NEAR(variance(x) / g0, 1.0, 0.05);
}

TEST(Simulate, ErrorsOnUnsetParameters) {
    EXPECT_THROW(sim("WN()", 16, 0), UsageError);
    EXPECT_THROW(simulate(SimSpec{parse_model("WN(sigma2=1)"), 0, 0}), UsageError);
}

TEST(Simulate, SeedStreamsAreIndependentAcrossBlockIndex) {
    // same master seed, different block positions produce unrelated streams
    LatentModel m = parse_model("WN(sigma2=1)");
    auto a = detail::simulate_block(m.blocks[0], 8192, derive_seed(42, 0), -1);
    auto b = detail::simulate_block(m.blocks[0], 8192, derive_seed(42, 1), -1);
    double dot = 0.0;
    for (std::size_t t = 0; t < a.size(); ++t) dot += a[t] * b[t];
    EXPECT_LT(std::abs(dot / static_cast<double>(a.size())), 0.05);
}
