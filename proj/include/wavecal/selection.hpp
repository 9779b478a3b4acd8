// Model ranking by the wavelet information criterion: apparent loss A plus
// the bootstrap "optimism" penalty B, with manual candidate lists, automatic
// nested-submodel enumeration, and a shared-ensemble fast variant.
#pragma once

#include <wavecal/estimator.hpp>

#include <algorithm>
#include <string>
#include <vector>

namespace wavecal {

enum class WicMethod { Bootstrap, Fast };

struct WicValue {
    double A = 0.0;
    double B = 0.0;
    double wic = 0.0;
    int dropped_replicates = 0;
};

struct RankRow {
    std::string model_string;
    double wic = 0.0, A = 0.0, B = 0.0;
    double objective = 0.0;
    std::size_t n_free = 0;
    double gof_p = -1.0; ///< -1 when not available
    bool failed = false;
    std::string error;
    LatentModel model; ///< fitted
};

struct RankingTable {
    std::vector<RankRow> rows; ///< sorted ascending by WIC
    WicMethod method = WicMethod::Bootstrap;
};

struct RankOptions {
    int G = 1000;
    int H = 100;
    std::uint64_t seed = 0;
    int levels = 0;
    bool robust = false;
    double efficiency = 0.6;
    WicMethod method = WicMethod::Bootstrap;
    int threads = 1;
    int max_candidates = 64; ///< auto_rank enumeration cap
};

namespace detail {

/// Refit `model` against a replicate WV under a fixed weighting, starting
/// from the original optimum; returns the implied WV at the refit optimum.
inline std::vector<double> refit_implied(const LatentModel& fitted, const std::vector<double>& nu_h,
                                         const Eigen::MatrixXd& omega, std::uint64_t seed) {
    LatentModel work = fitted;
    minimize(work, nu_h, omega, fitted.theta(), 0, seed);
    return implied_wv_total(work, static_cast<int>(nu_h.size()));
}

/// B = 2 tr cov[nu-hat, Omega nu(theta-hat)] over a bootstrap ensemble:
/// rows of `nu_sim` are nu-hat^(h), rows of `nu_fit` the matching implied WV
/// after refitting.
inline double optimism_from_ensemble(const Eigen::MatrixXd& nu_sim, const Eigen::MatrixXd& nu_fit,
                                     const Eigen::MatrixXd& omega) {
    const Eigen::Index H = nu_sim.rows();
    Eigen::MatrixXd g = nu_fit * omega.transpose(); // rows: Omega nu(theta-hat^(h))
    Eigen::RowVectorXd mu_sim = nu_sim.colwise().mean();
    Eigen::RowVectorXd mu_g = g.colwise().mean();
    double tr = 0.0;
    for (Eigen::Index j = 0; j < nu_sim.cols(); ++j) {
        double c = 0.0;
        for (Eigen::Index h = 0; h < H; ++h)
            c += (nu_sim(h, j) - mu_sim(j)) * (g(h, j) - mu_g(j));
        tr += c / static_cast<double>(H - 1);
    }
    return 2.0 * tr;
}

/// Simulate an ensemble of H empirical-WV rows from `generator`.
inline Eigen::MatrixXd simulate_wv_ensemble(const LatentModel& generator, std::size_t T, int H,
                                            int J, std::uint64_t seed, bool robust,
                                            double efficiency, int threads) {
    Eigen::MatrixXd nu_sim(H, J);
    parallel_for(static_cast<std::size_t>(H), threads, [&](std::size_t h) {
        SimSpec spec{generator, T, derive_seed(seed, 0x5749C0, h)};
        std::vector<double> y = simulate(spec);
        WvOptions wopt;
        wopt.levels = J;
        WvSeries s = robust ? wvar_robust(y, efficiency, wopt) : wvar(y, wopt);
        for (int j = 0; j < J; ++j) nu_sim(static_cast<Eigen::Index>(h), j) = s.est[j];
    });
    return nu_sim;
}

} // namespace detail

/// WIC of a single fitted model. A is the fit objective under the fit's
/// weighting; B is estimated by parametric bootstrap from F_{theta-hat}:
/// each replicate contributes its empirical WV and the implied WV of a
/// refit, and B = 2 tr cov[nu-hat, Omega nu(theta-hat)].
inline WicValue wic(const FitResult& fit, std::size_t T, int H, std::uint64_t seed,
                    int threads = 1) {
    if (H < 2) throw UsageError("wic: H must be >= 2");
    const int J = fit.wv.levels();
    WicValue out;
    out.A = fit.objective;
    Eigen::MatrixXd nu_sim = detail::simulate_wv_ensemble(
        fit.model, T, H, J, seed, fit.options.robust, fit.options.efficiency, threads);
    Eigen::MatrixXd nu_fit(H, J);
    int dropped = 0;
    std::vector<char> ok(H, 1);
    parallel_for(static_cast<std::size_t>(H), threads, [&](std::size_t h) {
        std::vector<double> nu_h(J);
        for (int j = 0; j < J; ++j) nu_h[j] = nu_sim(static_cast<Eigen::Index>(h), j);
        try {
            std::vector<double> imp =
                detail::refit_implied(fit.model, nu_h, fit.omega, derive_seed(seed, 0xF17, h));
            for (int j = 0; j < J; ++j) nu_fit(static_cast<Eigen::Index>(h), j) = imp[j];
        } catch (const std::exception&) {
            ok[h] = 0;
        }
    });
    for (char c : ok)
        if (!c) ++dropped;
    if (dropped > 0) {
        if (5 * dropped > H) throw NumericError("wic: more than 20% of refits failed");
        // compact the surviving rows
        Eigen::MatrixXd s2(H - dropped, J), f2(H - dropped, J);
        Eigen::Index r = 0;
        for (int h = 0; h < H; ++h)
            if (ok[h]) {
                s2.row(r) = nu_sim.row(h);
                f2.row(r) = nu_fit.row(h);
                ++r;
            }
        nu_sim = std::move(s2);
        nu_fit = std::move(f2);
    }
    out.dropped_replicates = dropped;
    out.B = detail::optimism_from_ensemble(nu_sim, nu_fit, fit.omega);
    out.wic = out.A + out.B;
    return out;
}

namespace detail {

inline void sort_table(RankingTable& table) {
    std::stable_sort(table.rows.begin(), table.rows.end(), [](const RankRow& a, const RankRow& b) {
        if (a.failed != b.failed) return !a.failed;
        if (std::abs(a.wic - b.wic) <= 1e-12) return a.n_free < b.n_free; // tie: fewer params
        return a.wic < b.wic;
    });
}

} // namespace detail

/// Rank candidate models by WIC under a COMMON weighting matrix, taken from
/// the bootstrap covariance of the largest candidate (required for the A and
/// B terms to be comparable across candidates). The Fast method bootstraps
/// only the largest candidate and reuses that ensemble for every B term; the
/// Bootstrap method simulates a fresh ensemble from each candidate's own fit.
inline RankingTable rank_models(std::span<const double> signal,
                                const std::vector<LatentModel>& candidates,
                                RankOptions opt = {}) {
    if (candidates.empty()) throw UsageError("rank_models: no candidates");
    const std::size_t T = signal.size();
    const int J = opt.levels > 0 ? opt.levels : default_levels(T);

    // largest candidate drives the common weighting
    std::size_t largest = 0;
    for (std::size_t k = 1; k < candidates.size(); ++k)
        if (candidates[k].n_free() > candidates[largest].n_free()) largest = k;

    FitOptions fopt;
    fopt.G = opt.G;
    fopt.H = opt.H;
    fopt.levels = J;
    fopt.robust = opt.robust;
    fopt.efficiency = opt.efficiency;
    fopt.threads = opt.threads;
    fopt.seed = derive_seed(opt.seed, 0xA0, largest);
    fopt.inference = false; // only the weighting matrix is needed here
    FitResult big = gmwm_fit(signal, candidates[largest], fopt);
    Eigen::MatrixXd omega = big.omega;
    Eigen::MatrixXd vhat = big.vhat;

    RankingTable table;
    table.method = opt.method;
    std::vector<FitResult> fits(candidates.size());
    for (std::size_t k = 0; k < candidates.size(); ++k) {
        RankRow row;
        row.model_string = render_model(candidates[k]);
        row.n_free = candidates[k].n_free();
        try {
            // fit under the common weighting (single-step; omega is fixed)
            FitOptions co = fopt;
            co.seed = derive_seed(opt.seed, 0xA0, k);
            co.inference = false;
            co.two_step = false;
            WvOptions wopt;
            wopt.levels = J;
            WvSeries wv = opt.robust ? wvar_robust(signal, opt.efficiency, wopt) : wvar(signal, wopt);
            FitResult fr;
            fr.options = co;
            fr.wv = wv;
            fr.model = candidates[k];
            fr.theta0 = initial_guess(candidates[k], wv, SignalSummary::of(signal), opt.G, co.seed);
            fr.objective = detail::minimize(fr.model, wv.est, omega, fr.theta0, fopt.restarts,
                                            derive_seed(co.seed, 1), &fr.converged);
            fr.omega = omega;
            fr.vhat = vhat;
            fr.implied = implied_wv_total(fr.model, J);
            row.objective = fr.objective;
            row.A = fr.objective;
            if (static_cast<std::size_t>(J) > fr.model.n_free()) {
                try {
                    row.gof_p = gof_test(fr).p_value;
                } catch (const std::exception&) {
                    row.gof_p = -1.0;
                }
            }
            row.model = fr.model;
            fits[k] = std::move(fr);
        } catch (const std::exception& e) {
            row.failed = true;
            row.error = e.what();
        }
        table.rows.push_back(std::move(row));
    }

    // B terms
    if (opt.method == WicMethod::Fast) {
        // one ensemble from the largest model's fit, reused for every candidate
        Eigen::MatrixXd nu_sim = detail::simulate_wv_ensemble(
            fits[largest].model, T, opt.H, J, derive_seed(opt.seed, 0x5EED, largest), opt.robust,
            opt.efficiency, opt.threads);
        for (std::size_t k = 0; k < candidates.size(); ++k) {
            if (table.rows[k].failed) continue;
            Eigen::MatrixXd nu_fit(opt.H, J);
            parallel_for(static_cast<std::size_t>(opt.H), opt.threads, [&](std::size_t h) {
                std::vector<double> nu_h(J);
                for (int j = 0; j < J; ++j) nu_h[j] = nu_sim(static_cast<Eigen::Index>(h), j);
                std::vector<double> imp = detail::refit_implied(
                    fits[k].model, nu_h, omega, derive_seed(opt.seed, 0xF17 + k, h));
                for (int j = 0; j < J; ++j) nu_fit(static_cast<Eigen::Index>(h), j) = imp[j];
            });
            table.rows[k].B = detail::optimism_from_ensemble(nu_sim, nu_fit, omega);
            table.rows[k].wic = table.rows[k].A + table.rows[k].B;
        }
    } else {
        for (std::size_t k = 0; k < candidates.size(); ++k) {
            if (table.rows[k].failed) continue;
            WicValue w = wic(fits[k], T, opt.H, derive_seed(opt.seed, 0x5EED, k), opt.threads);
            table.rows[k].B = w.B;
            table.rows[k].wic = w.wic;
        }
    }
    bool all_failed = true;
    for (const auto& r : table.rows) all_failed = all_failed && r.failed;
    if (all_failed) throw NumericError("rank_models: every candidate failed to fit");
    detail::sort_table(table);
    return table;
}

/// Enumerate the nested sub-models of a general model: GM/AR1 multiplicity
/// 0..k crossed with inclusion/exclusion of each singleton block, excluding
/// the empty model.
inline std::vector<LatentModel> enumerate_submodels(const LatentModel& full, int max_candidates = 64) {
    std::vector<ProcessBlock> ar1_blocks, singletons;
    for (const auto& b : full.blocks) {
        if (b.kind == ProcessKind::AR1 || b.kind == ProcessKind::GM) ar1_blocks.push_back(b);
        else singletons.push_back(b);
    }
    const std::size_t k = ar1_blocks.size();
    const std::size_t s = singletons.size();
    const std::size_t count = (k + 1) * (std::size_t(1) << s) - 1;
    if (count > static_cast<std::size_t>(max_candidates))
        throw UsageError("auto enumeration would produce " + std::to_string(count) +
                         " candidates (cap " + std::to_string(max_candidates) +
                         "); use manual ranking instead");
    std::vector<LatentModel> out;
    for (std::size_t nar = 0; nar <= k; ++nar) {
        for (std::size_t mask = 0; mask < (std::size_t(1) << s); ++mask) {
            if (nar == 0 && mask == 0) continue;
            LatentModel m;
            m.freq = full.freq;
            for (std::size_t i = 0; i < nar; ++i) m.blocks.push_back(ar1_blocks[i]);
            for (std::size_t i = 0; i < s; ++i)
                if (mask & (std::size_t(1) << i)) m.blocks.push_back(singletons[i]);
            out.push_back(std::move(m));
        }
    }
    return out;
}

/// Automatic ranking over all nested sub-models of `full_model`.
inline RankingTable auto_rank(std::span<const double> signal, const LatentModel& full_model,
                              RankOptions opt = {}) {
    std::vector<LatentModel> candidates = enumerate_submodels(full_model, opt.max_candidates);
    return rank_models(signal, candidates, opt);
}

} // namespace wavecal
