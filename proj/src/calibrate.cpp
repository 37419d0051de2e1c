#include "mlsde/calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mlsde/errors.hpp"

namespace mlsde {

LevelStats LevelStats::from(const Accumulation& acc) {
    LevelStats s;
    s.level = acc.level;
    s.samples = acc.moments.count;
    s.mean = acc.moments.mean;
    s.variance = acc.moments.variance();
    s.second_moment = acc.moments.second_moment();
    s.sem = s.samples == 0 ? 0.0 : std::sqrt(s.variance / static_cast<double>(s.samples));
    s.aborted = acc.aborted;
    s.cost_units = acc.cost_units;
    return s;
}

std::vector<LevelStats> pilot_stats(const LevelDrawFactory& sampler, std::span<const int> levels, std::uint64_t M,
                                    const StreamBase& base, int workers) {
    if (M < 2) throw ConfigError("pilot sample size must be at least 2");
    std::vector<LevelStats> out;
    out.reserve(levels.size());
    for (const int l : levels) {
        if (l < 0) throw ConfigError("pilot levels must be non-negative");
        out.push_back(LevelStats::from(accumulate(sampler(l), base, l, M, workers)));
    }
    return out;
}

double snap_to_half(double value) { return std::round(2.0 * value) / 2.0; }

namespace {

struct Line {
    double slope;
    double intercept;
};

Line least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    const auto n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 0.0)) throw IllConditioned("regression needs at least two distinct levels");
    const double slope = sxy / sxx;
    return {slope, my - slope * mx};
}

RateFit fit_log2(std::span<const LevelStats> stats, bool weak) {
    if (stats.size() < 2) throw IllConditioned("regression needs at least two levels");
    std::vector<double> x, y;
    for (const auto& s : stats) {
        const double v = weak ? std::abs(s.mean) : s.variance;
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw ZeroMean(std::string(weak ? "zero mean" : "zero variance") + " at level " + std::to_string(s.level));
        }
        x.push_back(s.level);
        y.push_back(std::log2(v));
    }
    const Line line = least_squares(x, y);

    RateFit fit;
    fit.raw_slope = line.slope;
    fit.intercept = line.intercept;
    fit.order = snap_to_half(-line.slope);
    if (!(fit.order > 0.0)) throw IllConditioned("fitted rate is not positive");
    for (std::size_t i = 0; i < x.size(); ++i) {
        fit.levels.push_back(static_cast<int>(x[i]));
        fit.residuals.push_back(y[i] - (line.intercept + line.slope * x[i]));
    }
    return fit;
}

}  // namespace

RateFit fit_weak_rate(std::span<const LevelStats> stats) {
    RateFit fit = fit_log2(stats, true);
    double mean_sum = 0.0;
    for (const auto& s : stats) mean_sum += s.mean;
    const double magnitude = std::exp2(fit.intercept) / (std::exp2(fit.order) - 1.0);
    fit.constant = mean_sum > 0.0 ? -magnitude : magnitude;
    return fit;
}

RateFit fit_variance_rate(std::span<const LevelStats> stats) {
    RateFit fit = fit_log2(stats, false);
    fit.constant = std::exp2(fit.intercept);
    return fit;
}

std::optional<int> detect_inflection(std::span<const LevelStats> stats, const RateFit& fit, double threshold_log2) {
    std::vector<LevelStats> sorted(stats.begin(), stats.end());
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.level < b.level; });
    for (const auto& s : sorted) {
        const double observed = s.variance > 0.0 ? std::log2(s.variance) : -INFINITY;
        if (std::abs(observed - fit.line(s.level)) > threshold_log2) return s.level;
    }
    return std::nullopt;
}

std::vector<double> variance_table(const LevelDrawFactory& sampler, int last_level, int inflection,
                                   double beta_theoretical, std::uint64_t M, const StreamBase& base, int workers) {
    if (inflection < 0 || inflection > last_level) throw ConfigError("inflection level must lie in [0, L]");
    if (M < 2) throw ConfigError("sample size must be at least 2");
    std::vector<double> table(static_cast<std::size_t>(last_level) + 1, 0.0);
    for (int l = 0; l <= inflection; ++l) table[l] = accumulate(sampler(l), base, l, M, workers).moments.variance();
    for (int l = inflection + 1; l <= last_level; ++l) {
        table[l] = table[inflection] * std::exp2(-beta_theoretical * (l - inflection));
    }
    return table;
}

CalibrationReport calibrate(const LevelSampler& sampler, Coupling coupling, const CalibrationOptions& options) {
    CalibrationReport report;
    report.coupling = coupling;

    const LevelCoupling weak_kind = coupling == Coupling::Gs ? LevelCoupling::Gs : LevelCoupling::Nv;
    const LevelCoupling var_kind = coupling == Coupling::Nv ? LevelCoupling::Nv : LevelCoupling::Gs;
    auto factory = [&](LevelCoupling kind) -> LevelDrawFactory {
        return [&sampler, kind](int l) { return sampler.level_fn(kind, l); };
    };

    StreamBase weak_base = options.base;
    StreamBase var_base = options.base;
    var_base.experiment += 1;
    StreamBase level0_base = options.base;
    level0_base.experiment += 2;

    report.weak_stats = pilot_stats(factory(weak_kind), options.levels, options.samples, weak_base, options.workers);
    report.variance_stats = weak_kind == var_kind ? report.weak_stats
                                                  : pilot_stats(factory(var_kind), options.levels, options.samples,
                                                                var_base, options.workers);
    report.weak = fit_weak_rate(report.weak_stats);
    report.variance = fit_variance_rate(report.variance_stats);

    const LevelCoupling l0 = coupling_at_level(coupling, 0, 1, options.level0);
    report.level0 = LevelStats::from(accumulate(sampler.level_fn(l0, 0), level0_base, 0, options.samples,
                                                options.workers));

    const int last_pilot = *std::max_element(options.levels.begin(), options.levels.end());
    if (options.inflection_max_level > last_pilot) {
        std::vector<int> extra;
        for (int l = last_pilot + 1; l <= options.inflection_max_level; ++l) extra.push_back(l);
        StreamBase extra_base = options.base;
        extra_base.experiment += 3;
        report.inflection_stats = pilot_stats(factory(var_kind), extra, options.samples, extra_base, options.workers);
        std::vector<LevelStats> all = report.variance_stats;
        all.insert(all.end(), report.inflection_stats.begin(), report.inflection_stats.end());
        report.inflection = detect_inflection(all, report.variance, options.threshold_log2);
    } else {
        report.inflection = detect_inflection(report.variance_stats, report.variance, options.threshold_log2);
    }
    return report;
}

}  // namespace mlsde
