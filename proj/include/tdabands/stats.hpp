#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tdabands/errors.hpp"
#include "tdabands/grid.hpp"
#include "tdabands/parallel.hpp"
#include "tdabands/random.hpp"
#include "tdabands/summary.hpp"

namespace tdabands {

// n summary functions sharing one grid and one kind.
struct Sample {
    std::vector<SummaryFunction> functions;

    int size() const { return static_cast<int>(functions.size()); }
    const Grid& grid() const { return functions.front().grid; }
    const SummaryKind& kind() const { return functions.front().kind; }
};

inline Sample make_sample(std::vector<SummaryFunction> functions) {
    if (functions.empty()) throw ValidationError("sample: needs at least one function");
    const Grid& g = functions.front().grid;
    const SummaryKind& kind = functions.front().kind;
    for (std::size_t i = 1; i < functions.size(); ++i) {
        if (!(functions[i].grid == g))
            throw ValidationError("sample: function " + std::to_string(i) +
                                  " is on a different grid");
        if (!(functions[i].kind == kind))
            throw ValidationError("sample: function " + std::to_string(i) +
                                  " has a different kind (" + functions[i].kind.label() + " vs " +
                                  kind.label() + ")");
    }
    return {std::move(functions)};
}

inline SummaryFunction mean_summary(const Sample& s) {
    const Grid& g = s.grid();
    std::vector<double> mean(g.resolution, 0.0);
    for (const auto& f : s.functions)
        for (int j = 0; j < g.resolution; ++j) mean[j] += f.values[j];
    for (double& v : mean) v /= s.size();
    return make_summary(g, std::move(mean), SummaryKind::mean());
}

// Pointwise standard deviation sqrt(E[f^2] - E[f]^2), 1/n normalization,
// clamped at zero against round-off.
inline SummaryFunction sigma_hat(const Sample& s) {
    if (s.size() < 2) throw ValidationError("sigma_hat: needs n >= 2");
    const Grid& g = s.grid();
    std::vector<double> mean(g.resolution, 0.0), sq(g.resolution, 0.0);
    for (const auto& f : s.functions) {
        for (int j = 0; j < g.resolution; ++j) {
            mean[j] += f.values[j];
            sq[j] += f.values[j] * f.values[j];
        }
    }
    std::vector<double> out(g.resolution);
    const double n = s.size();
    for (int j = 0; j < g.resolution; ++j) {
        const double m = mean[j] / n;
        out[j] = std::sqrt(std::max(0.0, sq[j] / n - m * m));
    }
    return make_summary(g, std::move(out), SummaryKind{});
}

// sup over grid nodes of |n^{-1/2} sum_i xi_i (f_i(t) - mean(t))|.
inline double bootstrap_sup(const Sample& s, std::span<const double> xi) {
    if (static_cast<int>(xi.size()) != s.size())
        throw ValidationError("bootstrap_sup: multiplier length " + std::to_string(xi.size()) +
                              " != sample size " + std::to_string(s.size()));
    const SummaryFunction mean = mean_summary(s);
    const int res = s.grid().resolution;
    double sup = 0.0;
    for (int j = 0; j < res; ++j) {
        double acc = 0.0;
        for (int i = 0; i < s.size(); ++i)
            acc += xi[i] * (s.functions[i].values[j] - mean.values[j]);
        sup = std::max(sup, std::abs(acc));
    }
    return sup / std::sqrt(static_cast<double>(s.size()));
}

// Studentized variant restricted to nodes where sigma exceeds the floor.
inline double studentized_sup(const Sample& s, std::span<const double> xi,
                              const SummaryFunction& sigma, double floor) {
    if (static_cast<int>(xi.size()) != s.size())
        throw ValidationError("studentized_sup: multiplier length " + std::to_string(xi.size()) +
                              " != sample size " + std::to_string(s.size()));
    if (!(sigma.grid == s.grid()))
        throw ValidationError("studentized_sup: sigma is on a different grid");
    const SummaryFunction mean = mean_summary(s);
    const int res = s.grid().resolution;
    bool any = false;
    double sup = 0.0;
    for (int j = 0; j < res; ++j) {
        if (!(sigma.values[j] > floor)) continue;
        any = true;
        double acc = 0.0;
        for (int i = 0; i < s.size(); ++i)
            acc += xi[i] * (s.functions[i].values[j] - mean.values[j]);
        sup = std::max(sup, std::abs(acc) / sigma.values[j]);
    }
    if (!any) throw ValidationError("studentized_sup: no positive-variance region");
    return sup / std::sqrt(static_cast<double>(s.size()));
}

// Smallest order statistic z with #{stats > z}/B <= alpha; equivalently the
// ceil((1-alpha)B)-th order statistic. The index arithmetic tolerates the
// rounding of alpha*B when the exact product is an integer.
inline double empirical_quantile(std::vector<double> sup_stats, double alpha) {
    if (sup_stats.empty()) throw ValidationError("empirical_quantile: empty statistics");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw ValidationError("empirical_quantile: alpha must be in (0,1)");
    std::sort(sup_stats.begin(), sup_stats.end());
    const auto b = static_cast<std::int64_t>(sup_stats.size());
    auto allowed = static_cast<std::int64_t>(std::floor(alpha * static_cast<double>(b) + 1e-9));
    allowed = std::min(allowed, b - 1);
    return sup_stats[static_cast<std::size_t>(b - 1 - allowed)];
}

enum class BandKind { uniform, adaptive };

inline std::string to_string(BandKind k) {
    return k == BandKind::uniform ? "uniform" : "adaptive";
}

struct BootstrapConfig {
    double alpha = 0.05;
    int replicates = 1000; // B
    std::uint64_t seed = 0;
    BandKind kind = BandKind::uniform;
    // Adaptive only: nodes with sigma_hat <= floor are excluded from the
    // studentized sup and fall back to the constant-width formula.
    // Defaults to 1e-8 * (t_max / 2).
    std::optional<double> variance_floor;

    double resolved_floor(const Grid& g) const {
        return variance_floor ? *variance_floor : 1e-8 * (g.t_max / 2.0);
    }
};

struct ConfidenceBand {
    Grid grid;
    std::vector<double> lower;
    std::vector<double> upper;
    double alpha = 0.05;
    BandKind kind = BandKind::uniform;
};

struct BootstrapResult {
    std::vector<double> sup_stats; // indexed by replicate
    double quantile = 0.0;         // Z-tilde(alpha) or Q-hat(alpha)
    SummaryFunction mean;
    std::optional<SummaryFunction> sigma; // adaptive only
    ConfidenceBand band;
    // First and last node with sigma_hat above the floor; {-1,-1} when the
    // whole grid is flat.
    int region_lo = -1;
    int region_hi = -1;
};

// Fills out[0..n) with the multipliers of one bootstrap replicate.
using MultiplierSource = std::function<void(std::uint64_t replicate, std::span<double> out)>;

inline MultiplierSource normal_multipliers(std::uint64_t seed) {
    return [seed](std::uint64_t replicate, std::span<double> out) {
        Rng rng(substream(seed, replicate));
        fill_normals(rng, out);
    };
}

// Multiplier-bootstrap confidence band for the mean summary function.
//
// Every replicate derives its multipliers from substream(seed, replicate),
// so the sup statistics are indexed by replicate and independent of how the
// loop is scheduled across threads.
inline BootstrapResult confidence_band(const Sample& s, const BootstrapConfig& cfg,
                                       const MultiplierSource& multipliers, int threads = 1) {
    if (s.size() < 2) throw ValidationError("confidence_band: needs n >= 2");
    if (cfg.replicates < 1) throw ValidationError("confidence_band: B must be >= 1");
    if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0))
        throw ValidationError("confidence_band: alpha must be in (0,1)");

    const Grid& g = s.grid();
    const int n = s.size();
    const int res = g.resolution;
    const double sqrt_n = std::sqrt(static_cast<double>(n));

    BootstrapResult result;
    result.mean = mean_summary(s);
    const SummaryFunction sig = sigma_hat(s);
    const double floor = cfg.resolved_floor(g);

    for (int j = 0; j < res; ++j) {
        if (sig.values[j] > floor) {
            if (result.region_lo < 0) result.region_lo = j;
            result.region_hi = j;
        }
    }

    const bool adaptive = cfg.kind == BandKind::adaptive;
    if (adaptive && result.region_lo < 0)
        throw ValidationError("studentized_sup: no positive-variance region");
    std::vector<double> resid(static_cast<std::size_t>(n) * res);
    for (int i = 0; i < n; ++i) {
        const auto& vals = s.functions[i].values;
        double* row = resid.data() + static_cast<std::size_t>(i) * res;
        for (int j = 0; j < res; ++j) row[j] = vals[j] - result.mean.values[j];
    }

    // The per-replicate sup reproduces bootstrap_sup / studentized_sup bit
    // for bit: accumulate over i in index order, then divide by sigma.
    result.sup_stats.assign(cfg.replicates, 0.0);
    parallel_for(cfg.replicates, threads, [&](std::int64_t rep) {
        std::vector<double> xi(n);
        std::vector<double> acc(res, 0.0);
        multipliers(static_cast<std::uint64_t>(rep), xi);
        for (int i = 0; i < n; ++i) {
            const double x = xi[i];
            const double* row = resid.data() + static_cast<std::size_t>(i) * res;
            for (int j = 0; j < res; ++j) acc[j] += x * row[j];
        }
        double sup = 0.0;
        if (adaptive) {
            for (int j = 0; j < res; ++j)
                if (sig.values[j] > floor) sup = std::max(sup, std::abs(acc[j]) / sig.values[j]);
        } else {
            for (int j = 0; j < res; ++j) sup = std::max(sup, std::abs(acc[j]));
        }
        result.sup_stats[rep] = sup / sqrt_n;
    });

    result.quantile = empirical_quantile(result.sup_stats, cfg.alpha);

    result.band.grid = g;
    result.band.alpha = cfg.alpha;
    result.band.kind = cfg.kind;
    result.band.lower.resize(res);
    result.band.upper.resize(res);
    const double uniform_half = result.quantile / sqrt_n;
    for (int j = 0; j < res; ++j) {
        double half = uniform_half;
        if (adaptive && sig.values[j] > floor)
            half = result.quantile * sig.values[j] / sqrt_n;
        result.band.lower[j] = result.mean.values[j] - half;
        result.band.upper[j] = result.mean.values[j] + half;
    }
    if (adaptive) result.sigma = sig;
    return result;
}

inline BootstrapResult confidence_band(const Sample& s, const BootstrapConfig& cfg,
                                       int threads = 1) {
    return confidence_band(s, cfg, normal_multipliers(cfg.seed), threads);
}

} // namespace tdabands
