// Empirical wavelet variance (classical and robust), Allan variance
// (traditional / modified, optionally overlapped), Hadamard variance,
// and classical-vs-robust comparison.
#pragma once

#include <wavecal/error.hpp>
#include <wavecal/wavelet.hpp>

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace wavecal {

// =============================================================================
// Series types
// =============================================================================

/// Per-scale wavelet variance estimates with chi^2 confidence bounds.
struct WvSeries {
    std::vector<double> tau;      ///< dyadic scales 2^j
    std::vector<double> est;      ///< nu^2_j
    std::vector<double> lo, hi;   ///< CI bounds at level 1-alpha
    std::vector<long> m;          ///< coefficient count per scale
    std::vector<double> edf;      ///< equivalent degrees of freedom eta_j
    Transform transform = Transform::MODWT;
    bool robust = false;
    double efficiency = 1.0;
    double alpha = 0.05;
    bool degenerate = false;

    int levels() const { return static_cast<int>(tau.size()); }
};

enum class AvVariant { Traditional, Modified };

struct AvSeries {
    std::vector<long> m;
    std::vector<double> est;
    std::vector<double> lo, hi; ///< chi-square CI bounds
    std::vector<long> n;        ///< number of averaged squared differences
    AvVariant variant = AvVariant::Traditional;
    bool overlapped = false;
    double alpha = 0.05;
};

struct HvSeries {
    std::vector<long> m;
    std::vector<double> est;
    std::vector<double> lo, hi;
    std::vector<long> n;
    double alpha = 0.05;
};

struct WvOptions {
    int levels = 0; ///< 0: default_levels(T)
    Transform transform = Transform::MODWT;
    double alpha = 0.05;
    /// Restrict MODWT coefficients to the stride-m subset t = 2m, 3m, ..., Km
    /// whose windows tile the non-overlapping cluster means of the
    /// traditional Allan variance (the AV = 2*WV identity holds exactly).
    bool cluster_matched = false;
};

namespace detail {

inline double chi2_quantile(double df, double p) {
    boost::math::chi_squared dist(df);
    return boost::math::quantile(dist, p);
}

inline double wv_edf(std::size_t T, int j) {
    const double Lj = static_cast<double>(1L << j);
    return std::max((static_cast<double>(T) - Lj + 1.0) / Lj, 1.0);
}

inline void fill_ci(WvSeries& s) {
    const std::size_t J = s.est.size();
    s.lo.resize(J);
    s.hi.resize(J);
    for (std::size_t j = 0; j < J; ++j) {
        const double eta = s.edf[j];
        if (s.est[j] <= 0) {
            s.lo[j] = s.hi[j] = 0.0;
            continue;
        }
        s.lo[j] = eta * s.est[j] / chi2_quantile(eta, 1.0 - s.alpha / 2.0);
        s.hi[j] = eta * s.est[j] / chi2_quantile(eta, s.alpha / 2.0);
    }
}

} // namespace detail

// =============================================================================
// Classical wavelet variance
// =============================================================================

inline WvSeries wvar(std::span<const double> signal, WvOptions opt = {}) {
    const std::size_t T = signal.size();
    const int J = opt.levels > 0 ? opt.levels : default_levels(T);
    WaveletDecomposition d = decompose(signal, J, opt.transform);
    WvSeries s;
    s.transform = opt.transform;
    s.alpha = opt.alpha;
    s.tau.resize(J);
    s.est.resize(J);
    s.m.resize(J);
    s.edf.resize(J);
    bool any_positive = false;
    for (int j = 1; j <= J; ++j) {
        const std::vector<double>& w = d.coeffs[j - 1];
        double sum = 0.0;
        long count = 0;
        if (opt.transform == Transform::MODWT && opt.cluster_matched) {
            const long mlen = 1L << (j - 1);
            // 1-indexed times t = 2m, 3m, ..., Km map to w[t - 2m]
            for (std::size_t idx = 0; idx + 1 <= w.size(); idx += mlen) {
                sum += w[idx] * w[idx];
                ++count;
            }
        } else {
            for (double v : w) sum += v * v;
            count = static_cast<long>(w.size());
        }
        double est = count > 0 ? sum / static_cast<double>(count) : 0.0;
        if (opt.transform == Transform::DWT)
            est /= static_cast<double>(1L << j); // DWT coeffs carry a 2^{j/2} rescale
        s.tau[j - 1] = static_cast<double>(1L << j);
        s.est[j - 1] = est;
        s.m[j - 1] = count;
        s.edf[j - 1] = detail::wv_edf(T, j);
        if (est > 0) any_positive = true;
    }
    s.degenerate = !any_positive;
    detail::fill_ci(s);
    return s;
}

// =============================================================================
// Robust wavelet variance: Tukey-biweight M-estimator of scale
// =============================================================================

namespace detail {

// Truncated standard-normal even moments m_k = E[Z^k 1{|Z| <= c}], k even.
// m_0 = erf(c/sqrt(2)); m_k = (k-1) m_{k-2} - 2 c^{k-1} phi(c).
inline void gaussian_trunc_moments(double c, double m[7]) {
    const double phi_c = std::exp(-0.5 * c * c) / std::sqrt(2.0 * M_PI);
    m[0] = std::erf(c / std::sqrt(2.0));
    double ck = c; // c^{k-1}
    for (int k = 2; k <= 12; k += 2) {
        m[k / 2] = (k - 1) * m[k / 2 - 1] - 2.0 * ck * phi_c;
        ck *= c * c;
    }
}

/// E[rho_c(Z)] under the standard normal; the consistency constant.
inline double biweight_b(double c) {
    double m[7];
    gaussian_trunc_moments(c, m);
    const double tail = 1.0 - m[0];
    const double c2 = c * c, c4 = c2 * c2;
    return m[1] / 2.0 - m[2] / (2.0 * c2) + m[3] / (6.0 * c4) + tail * c2 / 6.0;
}

/// Gaussian efficiency of the biweight scale estimate of sigma^2 relative to
/// the mean of squares, from closed-form truncated moments.
inline double biweight_efficiency(double c) {
    double m[7];
    gaussian_trunc_moments(c, m);
    const double tail = 1.0 - m[0];
    const double c2 = c * c, c4 = c2 * c2, c6 = c4 * c2, c8 = c4 * c4;
    const double b = m[1] / 2.0 - m[2] / (2.0 * c2) + m[3] / (6.0 * c4) + tail * c2 / 6.0;
    const double e_rho2 = m[2] / 4.0 - m[3] / (2.0 * c2) +
                          m[4] * (1.0 / (4.0 * c4) + 1.0 / (6.0 * c4)) - m[5] / (6.0 * c6) +
                          m[6] / (36.0 * c8) + tail * c4 / 36.0;
    const double var_rho = e_rho2 - b * b;
    const double e_zpsi = m[1] - 2.0 * m[2] / c2 + m[3] / c4;
    return e_zpsi * e_zpsi / (2.0 * var_rho);
}

/// Invert efficiency -> tuning constant by bisection (mapping is monotone).
inline double biweight_c_for_efficiency(double eff) {
    double lo = 0.2, hi = 200.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (biweight_efficiency(mid) < eff ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

inline double biweight_rho(double u, double c) {
    const double a = std::abs(u);
    if (a >= c) return c * c / 6.0;
    const double r = u / c, r2 = r * r;
    return (u * u / 2.0) * (1.0 - r2 + r2 * r2 / 3.0);
}

inline double biweight_psi(double u, double c) {
    if (std::abs(u) >= c) return 0.0;
    const double r2 = (u / c) * (u / c);
    return u * (1.0 - r2) * (1.0 - r2);
}

/// Solve mean rho_c(w_i / s) = b for s (safeguarded Newton); returns s^2.
inline double mscale_sq(std::span<const double> w, double c, double b) {
    const std::size_t n = w.size();
    double s2 = 0.0;
    for (double v : w) s2 += v * v;
    s2 /= static_cast<double>(n);
    if (s2 <= 0.0) return 0.0;
    double s = std::sqrt(s2);
    double s_lo = s * 1e-6, s_hi = s * 1e6;
    for (int it = 0; it < 100; ++it) {
        double f = 0.0, g = 0.0;
        for (double v : w) {
            const double u = v / s;
            f += biweight_rho(u, c);
            g += biweight_psi(u, c) * u;
        }
        f = f / static_cast<double>(n) - b;
        g /= static_cast<double>(n); // f'(s) = -g / s
        if (f > 0) s_lo = std::max(s_lo, s);
        else s_hi = std::min(s_hi, s);
        double step = g > 0 ? s * f / g : 0.0;
        double s_new = s + step;
        if (!(s_new > s_lo && s_new < s_hi)) s_new = 0.5 * (s_lo + s_hi);
        if (std::abs(s_new - s) <= 1e-12 * s) {
            s = s_new;
            break;
        }
        s = s_new;
    }
    return s * s;
}

/// Rejection refit: starting from the M-scale, iterate
///   s^2 <- mean of w^2 over {|w| < c s} / kappa(c)
/// with kappa(c) = E[Z^2 | |Z| <= c] the truncated-Gaussian consistency
/// factor. Gross outliers fall outside the cut entirely, removing the
/// saturation bias the raw M-scale carries under heavy contamination.
inline double reject_refine_sq(std::span<const double> w, double c, double s2) {
    if (!(s2 > 0.0)) return s2;
    double m[7];
    gaussian_trunc_moments(c, m);
    const double kappa = m[1] / m[0];
    for (int it = 0; it < 60; ++it) {
        const double cut2 = c * c * s2;
        double sum = 0.0;
        std::size_t n_in = 0;
        for (double v : w)
            if (v * v < cut2) {
                sum += v * v;
                ++n_in;
            }
        if (n_in == 0) break;
        const double s2_new = sum / (static_cast<double>(n_in) * kappa);
        if (!(s2_new > 0.0)) break;
        const bool done = std::abs(s2_new - s2) <= 1e-13 * s2;
        s2 = s2_new;
        if (done) break;
    }
    return s2;
}

} // namespace detail

/// Robust WV: per-scale biweight M-estimate of the scale of the wavelet
/// coefficients, refined by a consistency-corrected rejection refit, squared.
/// The tuning constant is derived from the requested Gaussian efficiency;
/// CIs reuse the chi^2 form with edf deflated by the efficiency.
/// efficiency = 1 delegates to the classical estimator.
inline WvSeries wvar_robust(std::span<const double> signal, double efficiency,
                            WvOptions opt = {}) {
    if (!(efficiency > 0.5 && efficiency <= 1.0))
        throw UsageError("efficiency must lie in (0.5, 1]");
    if (efficiency >= 1.0 - 1e-12) {
        WvSeries s = wvar(signal, opt);
        s.robust = true;
        s.efficiency = 1.0;
        return s;
    }
    const std::size_t T = signal.size();
    const int J = opt.levels > 0 ? opt.levels : default_levels(T);
    WaveletDecomposition d = decompose(signal, J, opt.transform);
    const double c = detail::biweight_c_for_efficiency(efficiency);
    const double b = detail::biweight_b(c);
    WvSeries s;
    s.transform = opt.transform;
    s.alpha = opt.alpha;
    s.robust = true;
    s.efficiency = efficiency;
    s.tau.resize(J);
    s.est.resize(J);
    s.m.resize(J);
    s.edf.resize(J);
    bool any_positive = false;
    for (int j = 1; j <= J; ++j) {
        const std::vector<double>& w = d.coeffs[j - 1];
        double est = detail::reject_refine_sq(w, c, detail::mscale_sq(w, c, b));
        if (opt.transform == Transform::DWT) est /= static_cast<double>(1L << j);
        s.tau[j - 1] = static_cast<double>(1L << j);
        s.est[j - 1] = est;
        s.m[j - 1] = static_cast<long>(w.size());
        s.edf[j - 1] = detail::wv_edf(T, j) * efficiency;
        if (est > 0) any_positive = true;
    }
    s.degenerate = !any_positive;
    detail::fill_ci(s);
    return s;
}

// =============================================================================
// Allan / Hadamard variance
// =============================================================================

namespace detail {

inline std::vector<long> dyadic_lengths(std::size_t T, int per_cluster_min) {
    std::vector<long> ms;
    for (long m = 1; static_cast<std::size_t>(per_cluster_min) * m <= T; m *= 2)
        ms.push_back(m);
    return ms;
}

} // namespace detail

/// Allan variance on dyadic averaging lengths.
/// Traditional: half the mean squared difference of adjacent non-overlapping
/// cluster means. Overlapped: same with all window positions. Modified:
/// the phase-averaged handbook definition (see docs/formats.md).
inline AvSeries avar(std::span<const double> x, AvVariant variant = AvVariant::Traditional,
                     bool overlapped = false) {
    const std::size_t T = x.size();
    if (T < 2) throw DataError("signal too short for Allan variance");
    AvSeries s;
    s.variant = variant;
    s.overlapped = overlapped;
    std::vector<double> cum(T + 1, 0.0);
    for (std::size_t t = 0; t < T; ++t) cum[t + 1] = cum[t] + x[t];
    if (variant == AvVariant::Traditional) {
        for (long m : detail::dyadic_lengths(T, 2)) {
            double sum = 0.0;
            long n = 0;
            if (overlapped) {
                for (std::size_t t = 0; t + 2 * m <= T; ++t) {
                    const double diff =
                        (cum[t + 2 * m] - 2.0 * cum[t + m] + cum[t]) / static_cast<double>(m);
                    sum += diff * diff;
                    ++n;
                }
            } else {
                const long K = static_cast<long>(T) / m;
                for (long k = 0; k + 2 <= K; ++k) {
                    const double diff = (cum[(k + 2) * m] - 2.0 * cum[(k + 1) * m] + cum[k * m]) /
                                        static_cast<double>(m);
                    sum += diff * diff;
                    ++n;
                }
            }
            if (n < 1) break;
            s.m.push_back(m);
            s.est.push_back(sum / (2.0 * static_cast<double>(n)));
            s.n.push_back(n);
        }
    } else {
        // Modified AV via second differences of the accumulated phase,
        // averaged over m consecutive starts.
        if (T < 3) throw DataError("signal too short for modified Allan variance");
        std::vector<double> cum2(T + 2, 0.0); // cum2[k] = sum of cum[0..k-1]
        for (std::size_t t = 0; t <= T; ++t) cum2[t + 1] = cum2[t] + cum[t];
        for (long m : detail::dyadic_lengths(T, 3)) {
            // sum over j of ( sum_{i=j}^{j+m-1} (p_{i+2m} - 2 p_{i+m} + p_i) )^2
            // with phase p = cum; inner sums via cum2.
            double sum = 0.0;
            long n = 0;
            const long N = static_cast<long>(T) + 1; // phase points
            for (long j = 0; j + 3 * m <= N; ++j) {
                const double inner = (cum2[j + 3 * m] - cum2[j + 2 * m]) -
                                     2.0 * (cum2[j + 2 * m] - cum2[j + m]) +
                                     (cum2[j + m] - cum2[j]);
                sum += inner * inner;
                ++n;
            }
            if (n < 1) break;
            const double m2 = static_cast<double>(m) * static_cast<double>(m);
            s.m.push_back(m);
            s.est.push_back(sum / (2.0 * m2 * m2 * static_cast<double>(n)));
            s.n.push_back(n);
        }
    }
    if (s.m.empty()) throw DataError("signal too short for Allan variance");
    for (std::size_t j = 0; j < s.m.size(); ++j) {
        const double df = std::max<double>(static_cast<double>(s.n[j]), 1.0);
        s.lo.push_back(s.est[j] * df / detail::chi2_quantile(df, 1.0 - s.alpha / 2));
        s.hi.push_back(s.est[j] * df / detail::chi2_quantile(df, s.alpha / 2));
    }
    return s;
}

/// Hadamard variance: second differences of adjacent non-overlapping cluster
/// means, insensitive to linear drift.
inline HvSeries hvar(std::span<const double> x) {
    const std::size_t T = x.size();
    if (T < 3) throw DataError("signal too short for Hadamard variance");
    HvSeries s;
    std::vector<double> cum(T + 1, 0.0);
    for (std::size_t t = 0; t < T; ++t) cum[t + 1] = cum[t] + x[t];
    for (long m : detail::dyadic_lengths(T, 3)) {
        double sum = 0.0;
        long n = 0;
        const long K = static_cast<long>(T) / m;
        for (long k = 0; k + 3 <= K; ++k) {
            const double d2 = (cum[(k + 3) * m] - 3.0 * cum[(k + 2) * m] +
                               3.0 * cum[(k + 1) * m] - cum[k * m]) /
                              static_cast<double>(m);
            sum += d2 * d2;
            ++n;
        }
        if (n < 1) break;
        s.m.push_back(m);
        s.est.push_back(sum / (6.0 * static_cast<double>(n)));
        s.n.push_back(n);
    }
    if (s.m.empty()) throw DataError("signal too short for Hadamard variance");
    for (std::size_t j = 0; j < s.m.size(); ++j) {
        const double df = std::max<double>(static_cast<double>(s.n[j]), 1.0);
        s.lo.push_back(s.est[j] * df / detail::chi2_quantile(df, 1.0 - s.alpha / 2));
        s.hi.push_back(s.est[j] * df / detail::chi2_quantile(df, s.alpha / 2));
    }
    return s;
}

// =============================================================================
// Classical vs robust comparison
// =============================================================================

struct ComparisonReport {
    std::vector<double> tau;
    std::vector<double> ratio;       ///< b.est / a.est
    std::vector<bool> ci_overlap;    ///< do the two CIs intersect at this scale?
    std::string verdict;             ///< "agree" or "robust analysis preferable"
    int disagreeing_scales = 0;
};

/// Per-scale comparison of two WV series on the same scale grid. Two or more
/// scales with disjoint CIs tip the verdict to "robust analysis preferable".
inline ComparisonReport compare_wvar(const WvSeries& a, const WvSeries& b) {
    if (a.tau != b.tau) throw UsageError("compare_wvar: scale grids differ");
    ComparisonReport r;
    r.tau = a.tau;
    for (std::size_t j = 0; j < a.tau.size(); ++j) {
        r.ratio.push_back(a.est[j] > 0 ? b.est[j] / a.est[j]
                                       : (b.est[j] == 0 ? 1.0 : std::numeric_limits<double>::infinity()));
        const bool overlap = a.lo[j] <= b.hi[j] && b.lo[j] <= a.hi[j];
        r.ci_overlap.push_back(overlap);
        if (!overlap) ++r.disagreeing_scales;
    }
    r.verdict = r.disagreeing_scales >= 2 ? "robust analysis preferable" : "agree";
    return r;
}

} // namespace wavecal
