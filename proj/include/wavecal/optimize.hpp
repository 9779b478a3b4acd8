// Derivative-free minimization: Nelder-Mead simplex plus the bound-removing
// parameter transforms (log for one-sided positive parameters, scaled logit
// for interval-bounded ones, identity otherwise).
#pragma once

#include <wavecal/model.hpp>

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace wavecal {

// =============================================================================
// Bound-removing transforms
// =============================================================================

namespace transform {

inline bool is_interval(const Param& p) {
    return std::isfinite(p.lo) && std::isfinite(p.hi);
}
inline bool is_lower(const Param& p) {
    return std::isfinite(p.lo) && !std::isfinite(p.hi);
}

/// Natural -> unconstrained.
inline double to_z(const Param& p, double x) {
    if (is_interval(p)) {
        const double u = (x - p.lo) / (p.hi - p.lo);
        const double uc = std::min(std::max(u, 1e-15), 1.0 - 1e-15);
        return std::log(uc / (1.0 - uc));
    }
    if (is_lower(p)) return std::log(std::max(x - p.lo, 1e-300));
    return x;
}

/// Unconstrained -> natural. Clamped so the image stays strictly inside
/// open bounds; exp underflow must not land a variance exactly on zero.
inline double to_x(const Param& p, double z) {
    if (is_interval(p)) {
        const double u = 1.0 / (1.0 + std::exp(-z));
        const double uc = std::min(std::max(u, 1e-15), 1.0 - 1e-15);
        return p.lo + (p.hi - p.lo) * uc;
    }
    if (is_lower(p)) return p.lo + std::exp(std::min(std::max(z, -700.0), 700.0));
    return z;
}

} // namespace transform

// =============================================================================
// Nelder-Mead
// =============================================================================

struct NmOptions {
    int max_evals = 4000;
    double ftol = 1e-12; ///< relative spread of simplex function values
    double xtol = 1e-10;
    double step = 0.25; ///< initial simplex edge length
};

struct NmResult {
    std::vector<double> x;
    double fval = std::numeric_limits<double>::infinity();
    int evals = 0;
    bool converged = false;
};

/// Standard simplex method (reflection 1, expansion 2, contraction 1/2,
/// shrink 1/2) on an unconstrained objective.
inline NmResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                            const std::vector<double>& x0, NmOptions opt = {}) {
    const std::size_t n = x0.size();
    NmResult res;
    if (n == 0) {
        res.x = x0;
        res.fval = f(x0);
        res.evals = 1;
        res.converged = true;
        return res;
    }
    std::vector<std::vector<double>> simplex(n + 1, x0);
    std::vector<double> fv(n + 1);
    for (std::size_t i = 0; i < n; ++i)
        simplex[i + 1][i] += x0[i] != 0.0 ? opt.step * std::abs(x0[i]) + opt.step : opt.step;
    for (std::size_t i = 0; i <= n; ++i) fv[i] = f(simplex[i]);
    res.evals = static_cast<int>(n) + 1;

    auto order = [&]() {
        for (std::size_t i = 0; i <= n; ++i)
            for (std::size_t k = i + 1; k <= n; ++k)
                if (fv[k] < fv[i]) {
                    std::swap(fv[i], fv[k]);
                    std::swap(simplex[i], simplex[k]);
                }
    };
    order();

    while (res.evals < opt.max_evals) {
        // convergence on function spread and simplex size
        const double fspread = std::abs(fv[n] - fv[0]);
        double xspread = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            xspread = std::max(xspread, std::abs(simplex[n][i] - simplex[0][i]));
        if (fspread <= opt.ftol * (std::abs(fv[0]) + 1e-30) && xspread <= opt.xtol) {
            res.converged = true;
            break;
        }
        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t k = 0; k < n; ++k) centroid[k] += simplex[i][k];
        }
        for (auto& c : centroid) c /= static_cast<double>(n);
        auto point = [&](double coeff) {
            std::vector<double> p(n);
            for (std::size_t k = 0; k < n; ++k)
                p[k] = centroid[k] + coeff * (centroid[k] - simplex[n][k]);
            return p;
        };
        std::vector<double> xr = point(1.0);
        const double fr = f(xr);
        ++res.evals;
        if (fr < fv[0]) {
            std::vector<double> xe = point(2.0);
            const double fe = f(xe);
            ++res.evals;
            if (fe < fr) {
                simplex[n] = std::move(xe);
                fv[n] = fe;
            } else {
                simplex[n] = std::move(xr);
                fv[n] = fr;
            }
        } else if (fr < fv[n - 1]) {
            simplex[n] = std::move(xr);
            fv[n] = fr;
        } else {
            const bool outside = fr < fv[n];
            std::vector<double> xc = point(outside ? 0.5 : -0.5);
            const double fc = f(xc);
            ++res.evals;
            if (fc < (outside ? fr : fv[n])) {
                simplex[n] = std::move(xc);
                fv[n] = fc;
            } else {
                for (std::size_t i = 1; i <= n; ++i) {
                    for (std::size_t k = 0; k < n; ++k)
                        simplex[i][k] = simplex[0][k] + 0.5 * (simplex[i][k] - simplex[0][k]);
                    fv[i] = f(simplex[i]);
                }
                res.evals += static_cast<int>(n);
            }
        }
        order();
    }
    res.x = simplex[0];
    res.fval = fv[0];
    return res;
}

} // namespace wavecal
