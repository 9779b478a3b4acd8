// Haar DWT / MODWT decomposition across dyadic scales tau_j = 2^j.
// Boundary-affected coefficients are dropped: MODWT level j keeps
// T - L_j + 1 coefficients, L_j = 2^j.
#pragma once

#include <wavecal/error.hpp>

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace wavecal {

enum class Transform { DWT, MODWT };

/// Wavelet filter families. Only Haar carries an implementation; the others
/// are declared so callers get a clean "unimplemented" error rather than a
/// parse failure.
enum class WaveletFilter { Haar, Daubechies, FejerKorovkin, BattleLemarie, LeastAsymmetric, MinimumBandwidth };

struct WaveletDecomposition {
    Transform transform = Transform::MODWT;
    int levels = 0;
    std::vector<std::vector<double>> coeffs; ///< coeffs[j-1] = level-j wavelet coefficients
    std::vector<double> scaling;             ///< final-level scaling coefficients (DWT only)

    long filter_length(int j) const { return 1L << j; }
    double scale(int j) const { return static_cast<double>(1L << j); }
};

/// Default decomposition depth: floor(log2(T)) - 1, so the coarsest level
/// retains at least two coefficients for variance estimation.
inline int default_levels(std::size_t T) {
    int j = 0;
    while ((std::size_t(1) << (j + 1)) <= T) ++j;
    return j > 1 ? j - 1 : 1;
}

namespace detail {

inline void check_signal(std::span<const double> x, int levels) {
    if (levels < 1) throw UsageError("levels must be >= 1");
    if (x.size() < (std::size_t(1) << levels))
        throw DataError("signal too short: need at least 2^J = " +
                        std::to_string(std::size_t(1) << levels) + " samples, have " +
                        std::to_string(x.size()));
    for (double v : x)
        if (!std::isfinite(v)) throw DataError("signal contains non-finite samples");
}

} // namespace detail

/// Haar MODWT. Level-j coefficient at (1-indexed) time t >= L_j:
///   W_{j,t} = 2^{-j} * (sum of the 2^{j-1} most recent samples
///                      - sum of the 2^{j-1} samples before them).
/// Computed in O(T) per level from the cumulative sum.
inline WaveletDecomposition modwt_haar(std::span<const double> x, int levels) {
    detail::check_signal(x, levels);
    const std::size_t T = x.size();
    WaveletDecomposition d;
    d.transform = Transform::MODWT;
    d.levels = levels;
    std::vector<double> cum(T + 1, 0.0);
    for (std::size_t t = 0; t < T; ++t) cum[t + 1] = cum[t] + x[t];
    d.coeffs.resize(levels);
    for (int j = 1; j <= levels; ++j) {
        const std::size_t m = std::size_t(1) << (j - 1);
        const std::size_t L = 2 * m;
        const double norm = 1.0 / static_cast<double>(L);
        std::vector<double>& w = d.coeffs[j - 1];
        w.resize(T - L + 1);
        for (std::size_t t = L; t <= T; ++t)
            w[t - L] = norm * (cum[t] - 2.0 * cum[t - m] + cum[t - L]);
    }
    return d;
}

/// Orthonormal Haar DWT (Mallat pyramid). Level-j coefficients are the
/// every-2^j-th MODWT coefficients rescaled by 2^{j/2}; Parseval holds for
/// dyadic-length inputs.
inline WaveletDecomposition dwt_haar(std::span<const double> x, int levels) {
    detail::check_signal(x, levels);
    WaveletDecomposition d;
    d.transform = Transform::DWT;
    d.levels = levels;
    d.coeffs.resize(levels);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    std::vector<double> s(x.begin(), x.end());
    for (int j = 1; j <= levels; ++j) {
        const std::size_t n = s.size() / 2;
        std::vector<double> next(n), w(n);
        for (std::size_t k = 0; k < n; ++k) {
            next[k] = (s[2 * k] + s[2 * k + 1]) * inv_sqrt2;
            w[k] = (s[2 * k + 1] - s[2 * k]) * inv_sqrt2;
        }
        d.coeffs[j - 1] = std::move(w);
        s = std::move(next);
    }
    d.scaling = std::move(s);
    return d;
}

/// Dispatch on filter family; non-Haar filters are declared but not built.
inline WaveletDecomposition decompose(std::span<const double> x, int levels,
                                      Transform transform,
                                      WaveletFilter filter = WaveletFilter::Haar) {
    if (filter != WaveletFilter::Haar)
        throw UsageError("only the Haar filter is implemented");
    return transform == Transform::MODWT ? modwt_haar(x, levels) : dwt_haar(x, levels);
}

} // namespace wavecal
