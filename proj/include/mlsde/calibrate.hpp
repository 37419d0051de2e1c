#pragma once

// Pilot estimation of per-level means and variances and the log2 regressions
//   |E[Z^l]| ~ |c1| (2^alpha - 1) 2^{-alpha l},   V[Z^l] ~ c2 2^{-beta l}.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "mlsde/sampling.hpp"

namespace mlsde {

struct LevelStats {
    int level = 0;
    std::uint64_t samples = 0;
    double mean = 0.0;
    double variance = 0.0;
    double second_moment = 0.0;
    double sem = 0.0;  // sqrt(variance / samples)
    std::uint64_t aborted = 0;
    double cost_units = 0.0;

    static LevelStats from(const Accumulation& acc);
};

struct RateFit {
    double order = 0.0;     // snapped to the nearest multiple of 0.5
    double constant = 0.0;  // c1 (weak) or c2 (variance)
    double raw_slope = 0.0;
    double intercept = 0.0;  // of the log2 regression line
    std::vector<int> levels;
    std::vector<double> residuals;

    // Value of the fitted log2 line at `level`.
    double line(int level) const { return intercept + raw_slope * level; }
};

// Builds the draw function for level l.
using LevelDrawFactory = std::function<DrawFn(int level)>;

// Independent Monte Carlo estimates at each level. Requires M >= 2.
std::vector<LevelStats> pilot_stats(const LevelDrawFactory& sampler, std::span<const int> levels, std::uint64_t M,
                                    const StreamBase& base, int workers = 1);

double snap_to_half(double value);

// OLS of log2|mean| on l. alpha = -slope snapped; |c1| = 2^intercept / (2^alpha - 1).
// The sign of c1 is opposite to the sign of the level means, since
// E[Z^l] = c1 (1 - 2^alpha) 2^{-alpha l}. Throws ZeroMean or IllConditioned.
RateFit fit_weak_rate(std::span<const LevelStats> stats);

// OLS of log2 variance on l. beta = -slope snapped; c2 = 2^intercept.
RateFit fit_variance_rate(std::span<const LevelStats> stats);

// Smallest level whose log2 variance is further than threshold_log2 from the fitted line.
std::optional<int> detect_inflection(std::span<const LevelStats> stats, const RateFit& fit,
                                     double threshold_log2 = 0.5);

// Monte Carlo variances for l <= inflection, extrapolated as V^{lbar} 2^{-beta (l - lbar)} above it.
std::vector<double> variance_table(const LevelDrawFactory& sampler, int last_level, int inflection,
                                   double beta_theoretical, std::uint64_t M, const StreamBase& base,
                                   int workers = 1);

struct CalibrationOptions {
    std::vector<int> levels{1, 2, 3, 4};
    std::uint64_t samples = 10000;
    double threshold_log2 = 0.5;
    // When above the last pilot level, variances are also estimated up to this level and
    // checked against the pilot regression for an inflection.
    int inflection_max_level = 0;
    Level0Nv level0 = Level0Nv::Averaged;
    StreamBase base;
    int workers = 1;
};

struct CalibrationReport {
    Coupling coupling = Coupling::Gs;
    std::vector<LevelStats> weak_stats;
    std::vector<LevelStats> variance_stats;
    RateFit weak;
    RateFit variance;
    LevelStats level0;
    std::vector<LevelStats> inflection_stats;
    std::optional<int> inflection;
};

// Weak rate from the scheme that sets the estimator bias (NV for nv and gs-nv, GS for gs),
// variance rate from the scheme used on the intermediate levels (GS for gs and gs-nv).
CalibrationReport calibrate(const LevelSampler& sampler, Coupling coupling, const CalibrationOptions& options);

}  // namespace mlsde
