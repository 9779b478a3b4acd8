// Haar transforms: coefficient counts, Parseval energy, hand-worked values.
#include <wavecal/rng.hpp>
#include <wavecal/wavelet.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <vector>

using namespace wavecal;

namespace {

std::vector<double> random_signal(std::size_t T, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> x(T);
    for (auto& v : x) v = rng.gaussian();
    return x;
}

} // namespace

TEST(Modwt, CoefficientCountPerLevel) {
    // T - L_j + 1 coefficients with L_j = 2^j
    auto x = random_signal(1000, 1);
    WaveletDecomposition d = modwt_haar(x, 5);
    EXPECT_EQ(d.coeffs[0].size(), 999u);
    EXPECT_EQ(d.coeffs[4].size(), 969u); // T=1000, L_5=32
    for (int j = 1; j <= 5; ++j) EXPECT_EQ(d.coeffs[j - 1].size(), 1000u - (1u << j) + 1u);
}

TEST(Modwt, HandWorkedLevelOne) {
    // W_{1,t} = (x_t - x_{t-1}) / 2
    std::vector<double> x = {1.0, 3.0, 2.0, 6.0};
    WaveletDecomposition d = modwt_haar(x, 1);
    ASSERT_EQ(d.coeffs[0].size(), 3u);
    EXPECT_DOUBLE_EQ(d.coeffs[0][0], 1.0);
    EXPECT_DOUBLE_EQ(d.coeffs[0][1], -0.5);
    EXPECT_DOUBLE_EQ(d.coeffs[0][2], 2.0);
}

TEST(Modwt, ConstantSignalGivesZeroCoefficients) {
    std::vector<double> x(256, 3.25);
    WaveletDecomposition d = modwt_haar(x, 6);
    for (const auto& lvl : d.coeffs)
        for (double w : lvl) EXPECT_EQ(w, 0.0);
}

TEST(Dwt, ParsevalEnergyConservation) {
    // sum of squared coefficients (wavelet + final scaling) equals the
    // signal energy for dyadic lengths
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        auto x = random_signal(1024, 1000 + seed);
        WaveletDecomposition d = dwt_haar(x, 10);
        double energy = 0.0;
        for (const auto& lvl : d.coeffs)
            for (double w : lvl) energy += w * w;
        for (double s : d.scaling) energy += s * s;
        double ref = std::inner_product(x.begin(), x.end(), x.begin(), 0.0);
        EXPECT_NEAR(energy / ref, 1.0, 1e-10) << "seed " << seed;
    }
}

TEST(Dwt, HalvingLengths) {
    auto x = random_signal(1 << 8, 9);
    WaveletDecomposition d = dwt_haar(x, 4);
    for (int j = 1; j <= 4; ++j) EXPECT_EQ(d.coeffs[j - 1].size(), std::size_t(1) << (8 - j));
    EXPECT_EQ(d.scaling.size(), 16u);
}

TEST(Dwt, MatchesSubsampledRescaledModwt) {
    // DWT level-j coefficients are the every-2^j-th MODWT coefficients
    // scaled by 2^{j/2} (Haar alignment: MODWT index 2^j*(k+1) - L_j)
    auto x = random_signal(256, 4);
    WaveletDecomposition dw = dwt_haar(x, 4);
    WaveletDecomposition mo = modwt_haar(x, 4);
    for (int j = 1; j <= 4; ++j) {
        const std::size_t L = std::size_t(1) << j;
        const double scale = std::pow(2.0, j / 2.0);
        for (std::size_t k = 0; k < dw.coeffs[j - 1].size(); ++k) {
            const std::size_t t = L * (k + 1) - L; // position in the MODWT array
            EXPECT_NEAR(dw.coeffs[j - 1][k], scale * mo.coeffs[j - 1][t], 1e-12);
        }
    }
}

TEST(Wavelet, DefaultLevels) {
    EXPECT_EQ(default_levels(4), 1);
    EXPECT_EQ(default_levels(1024), 9);
    EXPECT_EQ(default_levels(1000), 8);
    EXPECT_EQ(default_levels(1 << 17), 16);
}

TEST(Wavelet, ErrorsOnBadInput) {
    std::vector<double> x(16, 0.0);
    EXPECT_THROW(modwt_haar(x, 0), UsageError);
    EXPECT_THROW(modwt_haar(x, 5), DataError); // 2^5 > 16
    x[3] = std::nan("");
    EXPECT_THROW(modwt_haar(x, 2), DataError);
}

TEST(Wavelet, NonHaarFiltersRejected) {
    std::vector<double> x(64, 0.0);
    EXPECT_THROW(decompose(x, 2, Transform::MODWT, WaveletFilter::Daubechies), UsageError);
    EXPECT_THROW(decompose(x, 2, Transform::DWT, WaveletFilter::LeastAsymmetric), UsageError);
}
