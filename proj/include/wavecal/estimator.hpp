// The GMWM fit: starting-value search, bounded minimization of the
// weighted WV-matching objective, parametric-bootstrap covariance of the
// empirical WV, two-step weighting, asymptotic parameter CIs, and the
// over-identification goodness-of-fit test.
#pragma once

#include <wavecal/error.hpp>
#include <wavecal/implied.hpp>
#include <wavecal/model.hpp>
#include <wavecal/optimize.hpp>
#include <wavecal/parallel.hpp>
#include <wavecal/rng.hpp>
#include <wavecal/simulate.hpp>
#include <wavecal/wvar.hpp>

#include <Eigen/Dense>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace wavecal {

// =============================================================================
// Options and results
// =============================================================================

struct FitOptions {
    bool robust = false;
    double efficiency = 0.6; ///< robust-estimator efficiency when robust
    int G = 1000;            ///< starting-value draws
    int H = 100;             ///< bootstrap replicates for V-hat
    std::uint64_t seed = 0;
    double alpha = 0.05; ///< CI level 1 - alpha
    int levels = 0;      ///< 0: default_levels(T)
    bool two_step = true;  ///< re-weight with the bootstrap V-hat inverse
    bool inference = true; ///< compute V-hat, SEs, CIs and the GoF test
    int restarts = 3;
    int threads = 1;
};

struct GofResult {
    double stat = 0.0;
    int dof = 0;
    double p_value = 1.0;
};

struct FitResult {
    LatentModel model; ///< theta-hat in natural space
    double objective = 0.0;
    Eigen::MatrixXd omega; ///< weighting matrix used at the optimum
    Eigen::MatrixXd vhat;  ///< bootstrap covariance of nu-hat (empty if no inference)
    std::vector<double> se, ci_lo, ci_hi;
    std::vector<bool> ci_truncated; ///< CI clipped at a parameter bound
    bool has_gof = false;
    GofResult gof;
    std::vector<double> theta0; ///< starting point fed to the optimizer
    std::uint64_t seed = 0;
    double wall_seconds = 0.0;
    WvSeries wv;                 ///< empirical WV the fit matched
    std::vector<double> implied; ///< nu(theta-hat) on the same scales
    bool omega_fallback_diag = false;
    bool converged = true;
    FitOptions options;
};

// =============================================================================
// Starting values (slope heuristic + per-process samplers)
// =============================================================================

enum class Dominating { QN, WN, AR1GM };

/// Slope heuristic on the first two scales: compare the log-slope band from
/// nu^2_1 to the chi^2 bounds of nu^2_2 against the white-noise value -1/2.
inline Dominating dominating_process(const WvSeries& wv) {
    if (wv.levels() < 2) throw UsageError("dominating_process: need at least two scales");
    if (!(wv.est[0] > 0)) throw NumericError("dominating_process: zero first-scale WV");
    const double eta = wv.edf[1];
    const double a_lo = eta * wv.est[1] / detail::chi2_quantile(eta, 0.975);
    const double a_hi = eta * wv.est[1] / detail::chi2_quantile(eta, 0.025);
    const double log4 = std::log(4.0);
    const double s_lo = (std::log(a_lo) - std::log(wv.est[0])) / log4;
    const double s_hi = (std::log(a_hi) - std::log(wv.est[0])) / log4;
    if (s_hi < -0.5) return Dominating::QN;
    if (s_lo > -0.5) return Dominating::AR1GM;
    return Dominating::WN;
}

/// Signal facts consumed by the starting-value samplers.
struct SignalSummary {
    std::size_t T = 0;
    double min = 0.0, max = 0.0;

    static SignalSummary of(std::span<const double> x) {
        SignalSummary s;
        s.T = x.size();
        if (!x.empty()) {
            s.min = s.max = x[0];
            for (double v : x) {
                s.min = std::min(s.min, v);
                s.max = std::max(s.max, v);
            }
        }
        return s;
    }

    double slope() const {
        return T > 0 ? (max - min) / static_cast<double>(T) : 0.0;
    }
};

/// Mutable state threaded through one guessing round.
struct GuessState {
    double sigma2_total = 0.0; ///< total variance from the WV
    std::size_t N = 0;
    double R = 0.0; ///< (max - min) / length
    Dominating dom = Dominating::WN;
    int condition = 1; ///< AR1/GM sampler condition, increments per block
    double prev_phi = 0.0;
};

namespace detail {

/// Draw starting parameters for one block (the per-process samplers).
inline void draw_process_start(ProcessBlock& b, GuessState& st, Rng& rng) {
    const double s2t = st.sigma2_total;
    switch (b.kind) {
    case ProcessKind::GM:
    case ProcessKind::AR1: {
        double phi, s2;
        const int cond = std::min(st.condition, 3);
        if (cond == 1) {
            const double u = rng.uniform(0.0, 1.0 / 3.0);
            phi = (1.0 - std::sqrt(1.0 - 3.0 * u)) / 5.0;
            const double hi = s2t * (1.0 - phi) * (1.0 - phi);
            s2 = rng.uniform(hi / 2.0, hi);
        } else if (cond == 2) {
            phi = rng.uniform(std::max(0.9, st.prev_phi), 0.999995);
            s2 = rng.uniform(0.0, s2t * (1.0 - phi * phi) / 100.0);
        } else {
            const double u = rng.uniform(0.0, 1.0 / 3.0);
            phi = (0.999995 - st.prev_phi) * std::sqrt(1.0 - 3.0 * u) + st.prev_phi;
            const double hi = s2t * (1.0 - phi) * (1.0 - phi);
            s2 = rng.uniform(hi / 2.0, hi);
        }
        b.params[0].value = phi;
        b.params[1].value = std::max(s2, 1e-300);
        st.prev_phi = phi;
        ++st.condition;
        break;
    }
    case ProcessKind::DR:
        b.params[0].value = rng.uniform(st.R / 100.0, st.R / 2.0);
        break;
    case ProcessKind::RW:
        b.params[0].value =
            rng.uniform(s2t / (1e5 * static_cast<double>(st.N)), s2t / static_cast<double>(st.N));
        break;
    case ProcessKind::WN:
        b.params[0].value = st.dom == Dominating::WN ? rng.uniform(s2t / 2.0, s2t)
                                                     : rng.uniform(s2t / 1e5, s2t / 10.0);
        break;
    case ProcessKind::QN:
        b.params[0].value = st.dom == Dominating::QN ? rng.uniform(s2t / 8.0, s2t / 3.0)
                                                     : rng.uniform(s2t / 2e5, s2t / 100.0);
        break;
    case ProcessKind::AR:
    case ProcessKind::MA:
    case ProcessKind::ARMA: {
        // no printed sampler exists for these; draw mild coefficients and a
        // log-uniform innovation variance
        for (int i = 0; i < b.p + b.q; ++i) b.params[i].value = rng.uniform(-0.5, 0.5);
        b.params.back().value = s2t * std::exp(rng.uniform(std::log(1e-5), 0.0));
        break;
    }
    }
    for (auto& p : b.params) p.has_start = true;
}

} // namespace detail

/// Starting-value search: G sampler rounds scored by the flattening
/// objective sum_j (1 - nu_j(theta)/nu-hat_j)^2; returns the winner's theta.
/// User-supplied starting values are kept verbatim in every round.
inline std::vector<double> initial_guess(const LatentModel& model, const WvSeries& wv,
                                         const SignalSummary& sig, int G, std::uint64_t seed) {
    if (G < 1) throw UsageError("initial_guess: G must be >= 1");
    if (wv.degenerate) throw NumericError("initial_guess: degenerate (all-zero) WV");
    const int J = wv.levels();
    double s2t = 0.0;
    for (double v : wv.est) s2t += v;
    if (!(s2t > 0)) throw NumericError("initial_guess: degenerate WV");

    LatentModel work = model;
    // user-pinned or user-started values survive every draw
    std::vector<double> user_values;
    std::vector<bool> user_set;
    for (const auto* p : model.param_ptrs()) {
        user_values.push_back(p->value);
        user_set.push_back(p->has_start);
    }
    if (model.fully_specified() || model.n_free() == 0) {
        std::vector<double> t = model.theta();
        return t;
    }

    Rng rng(derive_seed(seed, 0x67756573)); // "gues"
    const Dominating dom = dominating_process(wv);
    double best_obj = std::numeric_limits<double>::infinity();
    std::vector<double> best;
    for (int g = 0; g < G; ++g) {
        GuessState st;
        st.sigma2_total = s2t;
        st.N = sig.T;
        st.R = sig.slope();
        st.dom = dom;
        st.prev_phi = 0.0;
        st.condition = 1;
        if (dom == Dominating::QN) {
            if (rng.uniform() <= 0.75) st.condition = 2;
        } else if (dom == Dominating::WN) {
            st.condition = 2;
        }
        for (auto& b : work.blocks) detail::draw_process_start(b, st, rng);
        // restore anything the user specified
        auto ptrs = work.param_ptrs();
        for (std::size_t i = 0; i < ptrs.size(); ++i)
            if (user_set[i]) ptrs[i]->value = user_values[i];
        std::vector<double> nu;
        try {
            nu = implied_wv_total(work, J);
        } catch (const NumericError&) {
            continue; // e.g. a non-stationary ARMA draw
        }
        double obj = 0.0;
        for (int j = 0; j < J; ++j) {
            if (!(wv.est[j] > 0)) continue;
            const double d = 1.0 - nu[j] / wv.est[j];
            obj += d * d;
        }
        if (obj < best_obj) {
            best_obj = obj;
            best = work.theta();
        }
    }
    if (best.empty()) throw NumericError("initial_guess: every draw failed to evaluate");
    return best;
}

// =============================================================================
// Parametric bootstrap covariance of the empirical WV
// =============================================================================

/// Simulate H signals of length T from the model, estimate the WV of each,
/// and return the (J x J) sample covariance of the rows.
inline Eigen::MatrixXd bootstrap_V(const LatentModel& model_at_theta, std::size_t T, int H,
                                   std::uint64_t seed, int levels, bool robust = false,
                                   double efficiency = 1.0, int threads = 1) {
    if (H < 2) throw UsageError("bootstrap_V: H must be >= 2");
    const int J = levels > 0 ? levels : default_levels(T);
    Eigen::MatrixXd phi(H, J);
    parallel_for(static_cast<std::size_t>(H), threads, [&](std::size_t h) {
        SimSpec spec{model_at_theta, T, derive_seed(seed, 0xB007, h)};
        std::vector<double> y = simulate(spec);
        WvOptions wopt;
        wopt.levels = J;
        WvSeries s = robust ? wvar_robust(y, efficiency, wopt) : wvar(y, wopt);
        for (int j = 0; j < J; ++j) phi(static_cast<Eigen::Index>(h), j) = s.est[j];
    });
    Eigen::RowVectorXd mu = phi.colwise().mean();
    phi.rowwise() -= mu;
    return phi.transpose() * phi / static_cast<double>(H - 1);
}

namespace detail {

/// Pseudo-inverse of a symmetric PSD matrix via spectral decomposition with
/// an eigenvalue floor of floor_rel * lambda_max.
inline Eigen::MatrixXd pinv_psd(const Eigen::MatrixXd& M, double floor_rel = 1e-12,
                                bool* degenerate = nullptr) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
    const Eigen::VectorXd& ev = es.eigenvalues();
    const double lmax = ev.maxCoeff();
    if (degenerate) *degenerate = !(lmax > 0);
    if (!(lmax > 0)) return Eigen::MatrixXd::Identity(M.rows(), M.cols());
    const double floor = floor_rel * lmax;
    Eigen::VectorXd inv = ev.unaryExpr([floor](double l) { return 1.0 / std::max(l, floor); });
    return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
}

struct Objective {
    LatentModel* model;
    std::vector<Param*> free_params;
    const std::vector<double>* nu_hat;
    const Eigen::MatrixXd* omega;
    int J;

    double operator()(const std::vector<double>& z) const {
        for (std::size_t i = 0; i < free_params.size(); ++i)
            free_params[i]->value = transform::to_x(*free_params[i], z[i]);
        std::vector<double> nu;
        try {
            nu = implied_wv_total(*model, J);
        } catch (const NumericError&) {
            return 1e30;
        }
        Eigen::VectorXd r(J);
        for (int j = 0; j < J; ++j) r(j) = (*nu_hat)[j] - nu[j];
        const double v = r.transpose() * (*omega) * r;
        return std::isfinite(v) ? v : 1e30;
    }
};

/// Minimize the weighted objective from theta0 with perturbed restarts;
/// returns the best point in natural space (written into `model`).
inline double minimize(LatentModel& model, const std::vector<double>& nu_hat,
                       const Eigen::MatrixXd& omega, const std::vector<double>& theta0,
                       int restarts, std::uint64_t seed, bool* converged = nullptr) {
    model.set_theta(theta0);
    std::vector<Param*> free_params;
    for (auto* p : model.param_ptrs())
        if (!p->pinned) free_params.push_back(p);
    const int J = static_cast<int>(nu_hat.size());
    Objective obj{&model, free_params, &nu_hat, &omega, J};
    std::vector<double> z0;
    for (auto* p : free_params) z0.push_back(transform::to_z(*p, p->value));

    NmOptions nmo;
    nmo.max_evals = std::max(4000, 2000 * static_cast<int>(free_params.size()));
    NmResult best;
    bool any_converged = false;
    Rng rng(derive_seed(seed, 0x72737472)); // "rstr"
    for (int r = 0; r <= restarts; ++r) {
        std::vector<double> z = z0;
        if (r > 0)
            for (auto& v : z) v += 0.3 * rng.gaussian();
        NmResult res = nelder_mead([&obj](const std::vector<double>& x) { return obj(x); }, z, nmo);
        any_converged = any_converged || res.converged;
        if (res.fval < best.fval) best = res;
    }
    // polish from the winner
    NmOptions polish = nmo;
    polish.step = 0.02;
    NmResult res =
        nelder_mead([&obj](const std::vector<double>& x) { return obj(x); }, best.x, polish);
    if (res.fval < best.fval) best = res;
    const double fv = obj(best.x); // leaves model at the optimum
    if (converged) *converged = any_converged;
    return fv;
}

} // namespace detail

// =============================================================================
// Inference
// =============================================================================

/// Over-identification test: stat = r' V^-1 r with r = nu-hat - nu(theta-hat)
/// (V-hat is the finite-sample covariance of nu-hat, so the sample-size
/// factor is already inside it), chi^2 with J - p degrees of freedom.
inline GofResult gof_test(const FitResult& fit) {
    const int J = fit.wv.levels();
    const int p = static_cast<int>(fit.model.n_free());
    if (J <= p) throw UsageError("gof_test: zero degrees of freedom (J must exceed p)");
    if (fit.vhat.size() == 0) throw UsageError("gof_test: fit carries no bootstrap covariance");
    Eigen::VectorXd r(J);
    for (int j = 0; j < J; ++j) r(j) = fit.wv.est[j] - fit.implied[j];
    bool degenerate = false;
    Eigen::MatrixXd w = detail::pinv_psd(fit.vhat, 1e-12, &degenerate);
    if (degenerate) throw NumericError("gof_test: singular bootstrap covariance");
    GofResult g;
    g.stat = r.transpose() * w * r;
    g.dof = J - p;
    boost::math::chi_squared dist(g.dof);
    g.p_value = boost::math::cdf(boost::math::complement(dist, std::max(g.stat, 0.0)));
    return g;
}

/// Asymptotic parameter covariance: the sandwich
/// (D'WD)^-1 D'W V W D (D'WD)^-1 over the free parameters, which collapses
/// to (D'V^-1 D)^-1 when W = V^-1. CIs are clipped at parameter bounds.
inline void param_ci(FitResult& fit, double level = 0.95) {
    const int J = fit.wv.levels();
    const std::size_t n = fit.model.n_params();
    Eigen::MatrixXd D_all = implied_wv_jacobian(fit.model, J);
    std::vector<std::size_t> free_idx;
    auto ptrs = fit.model.param_ptrs();
    for (std::size_t i = 0; i < n; ++i)
        if (!ptrs[i]->pinned) free_idx.push_back(i);
    const std::size_t nf = free_idx.size();
    Eigen::MatrixXd D(J, static_cast<Eigen::Index>(nf));
    for (std::size_t i = 0; i < nf; ++i) D.col(static_cast<Eigen::Index>(i)) = D_all.col(static_cast<Eigen::Index>(free_idx[i]));

    const Eigen::MatrixXd& W = fit.omega;
    Eigen::MatrixXd dwd = D.transpose() * W * D;
    // the Jacobian can lose rank when duplicated blocks collapse onto each
    // other at theta-hat; invert on the identified subspace and report the
    // unidentified directions with infinite standard errors
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dwd);
    const Eigen::VectorXd& ev = es.eigenvalues();
    const double ev_tol = std::max(ev.cwiseAbs().maxCoeff(), 1e-300) * 1e-10;
    Eigen::MatrixXd bread = Eigen::MatrixXd::Zero(dwd.rows(), dwd.cols());
    Eigen::VectorXd null_load = Eigen::VectorXd::Zero(dwd.rows());
    for (Eigen::Index k = 0; k < ev.size(); ++k) {
        const Eigen::VectorXd v = es.eigenvectors().col(k);
        if (ev(k) > ev_tol)
            bread += v * v.transpose() / ev(k);
        else
            null_load += v.cwiseAbs2();
    }
    Eigen::MatrixXd cov = bread * D.transpose() * W * fit.vhat * W * D * bread;
    // the weighting uses the inverse of an H-replicate bootstrap covariance,
    // whose inverse-Wishart bias shrinks the sandwich; undo it
    const int H = fit.options.H;
    if (H > J + 2) cov *= static_cast<double>(H) / static_cast<double>(H - J - 2);

    boost::math::normal norm;
    const double zq = boost::math::quantile(norm, 0.5 + level / 2.0);
    fit.se.assign(n, 0.0);
    fit.ci_lo.assign(n, 0.0);
    fit.ci_hi.assign(n, 0.0);
    fit.ci_truncated.assign(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        const Param& p = *ptrs[i];
        fit.ci_lo[i] = fit.ci_hi[i] = p.value;
        if (p.pinned) {
            fit.ci_truncated[i] = true; // zero-width by construction
            continue;
        }
        const std::size_t fi =
            static_cast<std::size_t>(std::find(free_idx.begin(), free_idx.end(), i) - free_idx.begin());
        const double var = cov(static_cast<Eigen::Index>(fi), static_cast<Eigen::Index>(fi));
        fit.se[i] = var > 0 ? std::sqrt(var) : 0.0;
        if (null_load(static_cast<Eigen::Index>(fi)) > 1e-8)
            fit.se[i] = std::numeric_limits<double>::infinity();
        double lo = p.value - zq * fit.se[i];
        double hi = p.value + zq * fit.se[i];
        if (std::isfinite(p.lo) && lo < p.lo) {
            lo = p.lo;
            fit.ci_truncated[i] = true;
        }
        if (std::isfinite(p.hi) && hi > p.hi) {
            hi = p.hi;
            fit.ci_truncated[i] = true;
        }
        fit.ci_lo[i] = lo;
        fit.ci_hi[i] = hi;
    }

    // GM-declared blocks are estimated in AR1 space but reported as
    // (beta, sigma2_gm); push the covariance through that map (delta method)
    std::size_t off = 0;
    for (const auto& b : fit.model.blocks) {
        if (!b.from_gm) {
            off += b.params.size();
            continue;
        }
        const std::size_t i0 = off, i1 = off + 1;
        off += 2;
        const double phi = b.params[0].value, s2 = b.params[1].value;
        const double f = fit.model.freq;
        auto [beta, s2gm] = ar1_to_gm(phi, s2, f);
        auto fpos = [&](std::size_t i) -> std::ptrdiff_t {
            auto it = std::find(free_idx.begin(), free_idx.end(), i);
            return it == free_idx.end() ? -1 : it - free_idx.begin();
        };
        auto cv = [&](std::ptrdiff_t a, std::ptrdiff_t c) -> double {
            return (a < 0 || c < 0) ? 0.0
                                    : cov(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(c));
        };
        const std::ptrdiff_t f0 = fpos(i0), f1 = fpos(i1);
        const double vpp = std::max(cv(f0, f0), 0.0);
        const double vss = std::max(cv(f1, f1), 0.0);
        const double vps = cv(f0, f1);
        const double one = 1.0 - phi * phi;
        const double gp = 2.0 * phi * s2 / (one * one); // d sigma2_gm / d phi
        const double gs = 1.0 / one;                    // d sigma2_gm / d sigma2
        double se_b = (f / phi) * std::sqrt(vpp);
        double var_s = gp * gp * vpp + 2.0 * gp * gs * vps + gs * gs * vss;
        double se_s = std::sqrt(std::max(var_s, 0.0));
        if (!std::isfinite(fit.se[i0])) se_b = fit.se[i0];
        if (!std::isfinite(fit.se[i0]) || !std::isfinite(fit.se[i1]))
            se_s = std::numeric_limits<double>::infinity();
        auto set = [&](std::size_t i, double value, double se, bool pinned) {
            fit.se[i] = pinned ? 0.0 : se;
            fit.ci_truncated[i] = pinned;
            double lo = value - zq * fit.se[i];
            double hi = value + zq * fit.se[i];
            if (lo < 0.0) {
                lo = 0.0;
                fit.ci_truncated[i] = true;
            }
            fit.ci_lo[i] = lo;
            fit.ci_hi[i] = hi;
        };
        set(i0, beta, se_b, b.params[0].pinned);
        set(i1, s2gm, se_s, b.params[1].pinned);
    }
}

// =============================================================================
// The GMWM fit
// =============================================================================

inline FitResult gmwm_fit(std::span<const double> signal, const LatentModel& model,
                          FitOptions opt = {}) {
    const auto t_start = std::chrono::steady_clock::now();
    const std::size_t T = signal.size();
    const int J = opt.levels > 0 ? opt.levels : default_levels(T);
    const std::size_t p = model.n_free();
    if (static_cast<std::size_t>(J) < p)
        throw UsageError("under-identified: " + std::to_string(p) + " free parameters but only " +
                         std::to_string(J) + " scales");
    if (T < (std::size_t(1) << (J + 1)))
        throw DataError("signal too short for " + std::to_string(J) + " scales");

    WvOptions wopt;
    wopt.levels = J;
    wopt.alpha = opt.alpha;
    WvSeries wv = opt.robust ? wvar_robust(signal, opt.efficiency, wopt) : wvar(signal, wopt);
    if (wv.degenerate) throw NumericError("gmwm_fit: degenerate signal (zero WV at all scales)");

    FitResult fit;
    fit.options = opt;
    fit.seed = opt.seed;
    fit.wv = wv;
    fit.model = model;

    // step 0: starting values
    SignalSummary sig = SignalSummary::of(signal);
    fit.theta0 = initial_guess(model, wv, sig, opt.G, opt.seed);

    // step 1: diagonal weighting from the CI widths
    Eigen::MatrixXd omega1 = Eigen::MatrixXd::Zero(J, J);
    for (int j = 0; j < J; ++j) {
        const double width = wv.hi[j] - wv.lo[j];
        omega1(j, j) = 1.0 / std::max(width * width, 1e-300);
    }
    fit.objective = detail::minimize(fit.model, wv.est, omega1, fit.theta0, opt.restarts,
                                     derive_seed(opt.seed, 1), &fit.converged);
    fit.omega = omega1;

    const bool want_v = opt.inference || opt.two_step;
    if (want_v) {
        // step 2: bootstrap V-hat at the step-1 optimum, re-weight, refit
        fit.vhat = bootstrap_V(fit.model, T, opt.H, derive_seed(opt.seed, 2), J, opt.robust,
                               opt.efficiency, opt.threads);
        bool degenerate = false;
        Eigen::MatrixXd omega2 = detail::pinv_psd(fit.vhat, 1e-12, &degenerate);
        if (degenerate) {
            fit.omega_fallback_diag = true; // keep the diagonal weighting
        } else if (opt.two_step) {
            bool conv2 = true;
            const double obj2 = detail::minimize(fit.model, wv.est, omega2, fit.model.theta(),
                                                 1, derive_seed(opt.seed, 3), &conv2);
            fit.objective = obj2;
            fit.omega = omega2;
            fit.converged = fit.converged && conv2;
        }
    }

    fit.implied = implied_wv_total(fit.model, J);
    if (opt.inference && !fit.omega_fallback_diag) {
        param_ci(fit, 1.0 - opt.alpha);
        if (static_cast<std::size_t>(J) > p) {
            fit.gof = gof_test(fit);
            fit.has_gof = true;
        }
    }
    fit.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return fit;
}

} // namespace wavecal
