// Seeded generation of realizations from a LatentModel. A composite signal
// is the sum of independently generated block streams, each driven by a
// seed derived from (master seed, block index), so block additivity is
// bit-exact and replicates parallelize deterministically.
#pragma once

#include <wavecal/error.hpp>
#include <wavecal/model.hpp>
#include <wavecal/rng.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace wavecal {

struct SimSpec {
    LatentModel model;
    std::size_t T = 0;
    std::uint64_t seed = 0;
    long burn_in = -1; ///< ARMA burn-in; -1 selects the default
};

namespace detail {

inline void check_block_params(const ProcessBlock& b) {
    for (const auto& p : b.params) {
        if (!p.has_start || !std::isfinite(p.value))
            throw UsageError("simulate: block " + std::string(kind_name(b.kind)) +
                             " has unset or non-finite parameters");
        if (!p.in_bounds(p.value))
            throw UsageError("simulate: parameter '" + p.name + "' out of bounds");
    }
}

inline std::vector<double> simulate_block(const ProcessBlock& b, std::size_t T,
                                          std::uint64_t seed, long burn_in) {
    check_block_params(b);
    Rng rng(seed);
    std::vector<double> x(T);
    switch (b.kind) {
    case ProcessKind::WN: {
        const double s = std::sqrt(b.params[0].value);
        for (auto& v : x) v = s * rng.gaussian();
        break;
    }
    case ProcessKind::QN: {
        const double s = std::sqrt(b.params[0].value);
        double prev = s * rng.gaussian();
        for (auto& v : x) {
            const double z = s * rng.gaussian();
            v = z - prev;
            prev = z;
        }
        break;
    }
    case ProcessKind::RW: {
        const double s = std::sqrt(b.params[0].value);
        double acc = 0.0;
        for (auto& v : x) {
            acc += s * rng.gaussian();
            v = acc;
        }
        break;
    }
    case ProcessKind::DR: {
        const double w = b.params[0].value;
        for (std::size_t t = 0; t < T; ++t) x[t] = w * static_cast<double>(t + 1);
        break;
    }
    case ProcessKind::GM:
    case ProcessKind::AR1: {
        const double phi = b.params[0].value;
        const double s = std::sqrt(b.params[1].value);
        // exact stationary initialization
        double state = s / std::sqrt(1.0 - phi * phi) * rng.gaussian();
        for (auto& v : x) {
            state = phi * state + s * rng.gaussian();
            v = state;
        }
        break;
    }
    case ProcessKind::AR:
    case ProcessKind::MA:
    case ProcessKind::ARMA: {
        std::vector<double> ar(b.p), ma(b.q);
        for (int i = 0; i < b.p; ++i) ar[i] = b.params[i].value;
        for (int i = 0; i < b.q; ++i) ma[i] = b.params[b.p + i].value;
        const double s = std::sqrt(b.params.back().value);
        long burn = burn_in;
        if (burn < 0) {
            double a = 0.0;
            for (double c : ar) a += std::abs(c);
            burn = a < 1.0 ? std::min<long>(10000, 100 + static_cast<long>(10.0 / (1.0 - a)))
                           : 10000;
        }
        std::vector<double> eps_hist(static_cast<std::size_t>(b.q) + 1, 0.0);
        std::vector<double> x_hist(static_cast<std::size_t>(b.p) + 1, 0.0);
        auto step = [&]() {
            const double e = s * rng.gaussian();
            double v = e;
            for (int i = 0; i < b.p; ++i) v += ar[i] * x_hist[i];
            for (int i = 0; i < b.q; ++i) v += ma[i] * eps_hist[i];
            for (int i = b.p - 1; i > 0; --i) x_hist[i] = x_hist[i - 1];
            if (b.p > 0) x_hist[0] = v;
            for (int i = b.q - 1; i > 0; --i) eps_hist[i] = eps_hist[i - 1];
            if (b.q > 0) eps_hist[0] = e;
            return v;
        };
        for (long t = 0; t < burn; ++t) step();
        for (auto& v : x) v = step();
        break;
    }
    }
    return x;
}

} // namespace detail

/// Simulate one realization of length T. Same spec => identical output.
inline std::vector<double> simulate(const SimSpec& spec) {
    if (spec.T < 1) throw UsageError("simulate: T must be >= 1");
    std::vector<double> out(spec.T, 0.0);
    for (std::size_t i = 0; i < spec.model.blocks.size(); ++i) {
        std::vector<double> block =
            detail::simulate_block(spec.model.blocks[i], spec.T, derive_seed(spec.seed, i),
                                   spec.burn_in);
        for (std::size_t t = 0; t < spec.T; ++t) out[t] += block[t];
    }
    return out;
}

} // namespace wavecal
