// Model-implied Haar wavelet variance nu^2_j(theta), evaluated per block via
// the autocovariance quadratic form
//   nu^2_j = 4^{-j} c_j' Gamma c_j,  c_j = (+1,...,+1,-1,...,-1),
// with O(1) closed forms for the catalog processes as fast paths and an
// O(tau_j) filter-autocorrelation path for ARMA blocks.
#pragma once

#include <wavecal/error.hpp>
#include <wavecal/model.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <vector>

namespace wavecal {

/// Implied WV with the per-block decomposition; rows of `by_block` sum to
/// `total` at every scale by construction.
struct ImpliedWv {
    std::vector<double> tau;
    std::vector<double> total;
    std::vector<std::vector<double>> by_block;
};

namespace detail {

inline double wv_wn(double sigma2, double tau) { return sigma2 / tau; }

// QN as the first difference of an iid sequence: gamma(0) = 2Q^2,
// gamma(1) = -Q^2, so the quadratic form collapses to 6 Q^2 / tau^2.
inline double wv_qn(double q2, double tau) { return 6.0 * q2 / (tau * tau); }

inline double wv_rw(double gamma2, double tau) {
    return gamma2 * (tau * tau + 2.0) / (12.0 * tau);
}

inline double wv_dr(double omega, double tau) { return omega * omega * tau * tau / 16.0; }

/// Quadratic form through the Haar filter autocorrelation: for half-width m,
///   4^j nu^2_j = a_0 g(0) + 2 sum_{k=1}^{2m-1} a_k g(k),
///   a_k = 2m - 3k for k <= m, k - 2m for m < k < 2m.
inline double wv_from_acvf(const std::vector<double>& g, long m) {
    double acc = 2.0 * static_cast<double>(m) * g[0];
    for (long k = 1; k < 2 * m; ++k) {
        const double a = k <= m ? static_cast<double>(2 * m - 3 * k)
                                : static_cast<double>(k - 2 * m);
        acc += 2.0 * a * g[static_cast<std::size_t>(k)];
    }
    const double m2 = static_cast<double>(m) * static_cast<double>(m);
    return acc / (4.0 * m2);
}

/// AR1 closed form; `m` is the filter half-width (tau = 2m). The direct
/// expression cancels catastrophically as phi -> 1, so for m*(1-phi) small a
/// series expansion in eps = 1-phi takes over (relative truncation error
/// ~ (m*eps)^5).
inline double wv_ar1(double phi, double sigma2, long m) {
    if (!(phi > -1.0 && phi < 1.0)) throw NumericError("AR1 phi outside (-1, 1)");
    const double md = static_cast<double>(m);
    const double eps = 1.0 - phi;
    if (phi > 0.0 && md * eps < 0.01) {
        const double e = eps;
        const double p0 = 840.0 * md * md + 420.0;
        const double p1 = -630.0 * md * md * md + 420.0 * md * md + 210.0;
        const double p2 = 294.0 * std::pow(md, 4) - 630.0 * md * md * md + 210.0 * md * md + 126.0;
        const double p3 = -105.0 * std::pow(md, 5) + 441.0 * std::pow(md, 4) -
                          525.0 * md * md * md + 105.0 * md * md + 84.0;
        const double p4 = 31.0 * std::pow(md, 6) - 210.0 * std::pow(md, 5) +
                          490.0 * std::pow(md, 4) - 420.0 * md * md * md + 49.0 * md * md + 60.0;
        const double poly = p0 + e * (p1 + e * (p2 + e * (p3 + e * p4)));
        return sigma2 * poly / (2520.0 * md * (2.0 - e));
    }
    const long double r = phi, s2 = sigma2;
    const long double rm1 = std::pow(r, static_cast<long double>(m + 1));
    const long double r2m1 = std::pow(r, static_cast<long double>(2 * m + 1));
    const long double num = md * (1.0L - r * r) - 3.0L * r + 4.0L * rm1 - r2m1;
    const long double den =
        2.0L * md * md * (1.0L - r) * (1.0L - r) * (1.0L - r) * (1.0L + r);
    return static_cast<double>(s2 * num / den);
}

/// Exact ARMA(p, q) autocovariances gamma(0..maxlag): solve the small linear
/// system for gamma(0..p), then extend by the AR recursion.
inline std::vector<double> arma_acvf(const std::vector<double>& ar, const std::vector<double>& ma,
                                     double sigma2, long maxlag) {
    const int p = static_cast<int>(ar.size());
    const int q = static_cast<int>(ma.size());
    // psi weights psi_0..psi_q (MA(inf) expansion, only the first q+1 needed)
    std::vector<double> theta(q + 1, 0.0);
    theta[0] = 1.0;
    for (int i = 0; i < q; ++i) theta[i + 1] = ma[i];
    std::vector<double> psi(q + 1, 0.0);
    psi[0] = 1.0;
    for (int j = 1; j <= q; ++j) {
        double v = theta[j];
        for (int i = 1; i <= std::min(j, p); ++i) v += ar[i - 1] * psi[j - i];
        psi[j] = v;
    }
    auto rhs = [&](int k) {
        double v = 0.0;
        for (int j = k; j <= q; ++j) v += theta[j] * psi[j - k];
        return sigma2 * v;
    };
    std::vector<double> g(static_cast<std::size_t>(maxlag) + 1, 0.0);
    if (p == 0) {
        for (int k = 0; k <= std::min<long>(q, maxlag); ++k) {
            double v = 0.0;
            for (int j = k; j <= q; ++j) v += theta[j] * theta[j - k];
            g[k] = sigma2 * v;
        }
        return g;
    }
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(p + 1, p + 1);
    Eigen::VectorXd b(p + 1);
    for (int k = 0; k <= p; ++k) {
        A(k, k) += 1.0;
        for (int i = 1; i <= p; ++i) {
            const int l = std::abs(k - i);
            if (l <= p) A(k, l) -= ar[i - 1];
            // |k - i| <= p always holds here since k, i in [0, p]
        }
        b(k) = rhs(k);
    }
    Eigen::VectorXd g0 = A.fullPivLu().solve(b);
    if (!g0.allFinite()) throw NumericError("ARMA autocovariance system is singular");
    for (int k = 0; k <= std::min<long>(p, maxlag); ++k) g[k] = g0(k);
    for (long k = p + 1; k <= maxlag; ++k) {
        double v = k <= q ? rhs(static_cast<int>(k)) : 0.0;
        for (int i = 1; i <= p; ++i) v += ar[i - 1] * g[k - i];
        g[k] = v;
    }
    return g;
}

/// Implied WV of one block on levels 1..J.
inline std::vector<double> block_wv(const ProcessBlock& b, int levels) {
    std::vector<double> out(levels);
    for (const auto& prm : b.params)
        if (!std::isfinite(prm.value)) throw NumericError("non-finite model parameter");
    switch (b.kind) {
    case ProcessKind::WN:
        for (int j = 1; j <= levels; ++j) out[j - 1] = wv_wn(b.params[0].value, double(1L << j));
        break;
    case ProcessKind::QN:
        for (int j = 1; j <= levels; ++j) out[j - 1] = wv_qn(b.params[0].value, double(1L << j));
        break;
    case ProcessKind::RW:
        for (int j = 1; j <= levels; ++j) out[j - 1] = wv_rw(b.params[0].value, double(1L << j));
        break;
    case ProcessKind::DR:
        for (int j = 1; j <= levels; ++j) out[j - 1] = wv_dr(b.params[0].value, double(1L << j));
        break;
    case ProcessKind::GM:
    case ProcessKind::AR1:
        for (int j = 1; j <= levels; ++j)
            out[j - 1] = wv_ar1(b.params[0].value, b.params[1].value, 1L << (j - 1));
        break;
    case ProcessKind::AR:
    case ProcessKind::MA:
    case ProcessKind::ARMA: {
        std::vector<double> ar(b.p), ma(b.q);
        for (int i = 0; i < b.p; ++i) ar[i] = b.params[i].value;
        for (int i = 0; i < b.q; ++i) ma[i] = b.params[b.p + i].value;
        const double s2 = b.params.back().value;
        const long maxlag = (1L << levels) - 1;
        std::vector<double> g = arma_acvf(ar, ma, s2, maxlag);
        for (int j = 1; j <= levels; ++j) out[j - 1] = wv_from_acvf(g, 1L << (j - 1));
        break;
    }
    }
    return out;
}

} // namespace detail

/// Implied WV of a composite model on the dyadic scale grid, with the
/// per-block decomposition.
inline ImpliedWv implied_wv(const LatentModel& model, int levels) {
    if (levels < 1) throw UsageError("levels must be >= 1");
    ImpliedWv out;
    out.tau.resize(levels);
    for (int j = 1; j <= levels; ++j) out.tau[j - 1] = static_cast<double>(1L << j);
    out.total.assign(levels, 0.0);
    for (const auto& b : model.blocks) {
        std::vector<double> v = detail::block_wv(b, levels);
        for (int j = 0; j < levels; ++j) out.total[j] += v[j];
        out.by_block.push_back(std::move(v));
    }
    return out;
}

/// Totals only; the optimizer's hot path.
inline std::vector<double> implied_wv_total(const LatentModel& model, int levels) {
    std::vector<double> total(levels, 0.0);
    for (const auto& b : model.blocks) {
        std::vector<double> v = detail::block_wv(b, levels);
        for (int j = 0; j < levels; ++j) total[j] += v[j];
    }
    return total;
}

/// Central finite-difference Jacobian d nu^2_j / d theta_k (J x n_params) in
/// natural space, per-parameter step h = 1e-6 * max(|theta_k|, 1e-8).
/// Pinned parameters get zero columns. Parameters at a bound fall back to a
/// one-sided difference, reported through `one_sided` when provided.
inline Eigen::MatrixXd implied_wv_jacobian(const LatentModel& model, int levels,
                                           std::vector<bool>* one_sided = nullptr) {
    LatentModel work = model;
    auto params = work.param_ptrs();
    const std::size_t n = params.size();
    if (one_sided) one_sided->assign(n, false);
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(levels, static_cast<Eigen::Index>(n));
    for (std::size_t k = 0; k < n; ++k) {
        Param& p = *params[k];
        if (p.pinned) continue;
        const double theta = p.value;
        const double h = 1e-6 * std::max(std::abs(theta), 1e-8);
        double up = theta + h, dn = theta - h;
        bool side = false;
        if (!p.in_bounds(up)) {
            up = theta;
            side = true;
        }
        if (!p.in_bounds(dn)) {
            dn = theta;
            side = true;
        }
        if (up == dn) throw NumericError("cannot difference parameter '" + p.name + "'");
        if (one_sided && side) (*one_sided)[k] = true;
        p.value = up;
        std::vector<double> f_up = implied_wv_total(work, levels);
        p.value = dn;
        std::vector<double> f_dn = implied_wv_total(work, levels);
        p.value = theta;
        for (int j = 0; j < levels; ++j)
            jac(j, static_cast<Eigen::Index>(k)) = (f_up[j] - f_dn[j]) / (up - dn);
    }
    return jac;
}

} // namespace wavecal
