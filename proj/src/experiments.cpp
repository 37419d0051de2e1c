#include "mlsde/experiments.hpp"

#include <cmath>
#include <limits>

#include "mlsde/errors.hpp"

namespace mlsde {

AnyModel make_model(const ModelConfig& config) {
    if (config.model == "clark-cameron") return ClarkCameronModel{config.mu, config.u0, config.s0};
    if (config.model == "heston") return HestonModel(config.heston);
    throw ConfigError("unknown model '" + config.model + "'");
}

Payoff make_payoff(const ModelConfig& config) {
    switch (config.payoff) {
        case PayoffKind::CosU: return Payoff::cos_u();
        case PayoffKind::USquared: return Payoff::u_squared();
        case PayoffKind::UPlus: return Payoff::u_plus();
        case PayoffKind::HestonCall: return Payoff::heston_call(config.heston.r, config.horizon, config.strike);
    }
    throw ConfigError("unknown payoff");
}

LevelSampler make_sampler(const ModelConfig& config) {
    return LevelSampler(make_model(config), make_payoff(config), config.horizon);
}

SlopeFit fit_log2_slope(std::span<const int> levels, std::span<const double> values) {
    SlopeFit fit;
    if (levels.size() != values.size()) throw DimensionMismatch("levels and values differ in length");
    if (levels.size() < 2) return fit;
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < levels.size(); ++i) {
        if (!(values[i] > 0.0) || !std::isfinite(values[i])) {
            fit.slope = fit.intercept = std::numeric_limits<double>::quiet_NaN();
            return fit;
        }
        mx += levels[i];
        my += std::log2(values[i]);
    }
    const auto n = static_cast<double>(levels.size());
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < levels.size(); ++i) {
        sxx += (levels[i] - mx) * (levels[i] - mx);
        sxy += (levels[i] - mx) * (std::log2(values[i]) - my);
    }
    if (!(sxx > 0.0)) return fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.valid = true;
    return fit;
}

StrongOrderReport strong_order(const AnyModel& model, double horizon, std::span<const int> levels, std::uint64_t M,
                               const StreamBase& base, int workers) {
    if (M < 1) throw ConfigError("sample size must be positive");
    StrongOrderReport report;
    std::vector<double> nv, coupling;
    for (const int l : levels) {
        if (l < 1) throw ConfigError("strong-order levels must be >= 1");
        const LevelGrid grid{l, horizon};
        auto nv_fn = [&](const RngStream& rng) {
            return std::visit(
                [&](const auto& m) {
                    using Mod = std::decay_t<decltype(m)>;
                    return Draw{nv_strong_difference(m, sample_level_path(rng, grid, Mod::kNoiseDim)), 0.0};
                },
                model);
        };
        auto coupling_fn = [&](const RngStream& rng) {
            return std::visit(
                [&](const auto& m) {
                    using Mod = std::decay_t<decltype(m)>;
                    return Draw{nv_gs_coupling_difference(m, sample_level_path(rng, grid, Mod::kNoiseDim)), 0.0};
                },
                model);
        };
        StreamBase second = base;
        second.experiment += 1;
        StrongOrderRow row;
        row.level = l;
        row.nv_error = accumulate(nv_fn, base, l, M, workers).moments.mean;
        row.coupling_error = accumulate(coupling_fn, second, l, M, workers).moments.mean;
        nv.push_back(row.nv_error);
        coupling.push_back(row.coupling_error);
        report.rows.push_back(row);
    }
    report.nv = fit_log2_slope(levels, nv);
    report.coupling = fit_log2_slope(levels, coupling);
    return report;
}

DecayReport variance_decay(const LevelSampler& sampler, std::span<const LevelCoupling> couplings,
                           std::span<const int> levels, std::uint64_t M, const StreamBase& base, int workers) {
    if (M < 2) throw ConfigError("sample size must be at least 2");
    DecayReport report;
    for (std::size_t c = 0; c < couplings.size(); ++c) {
        const LevelCoupling kind = couplings[c];
        StreamBase stream = base;
        stream.experiment += c;
        std::vector<double> moments;
        for (const int l : levels) {
            auto squared = [&sampler, kind, l](const RngStream& rng) {
                const LevelSample s = sampler.draw(kind, l, rng);
                return Draw{s.value * s.value, s.cost_units()};
            };
            const Accumulation acc = accumulate(squared, stream, l, M, workers);
            DecayRow row{kind, l, acc.moments.mean,
                         std::sqrt(acc.moments.variance() / static_cast<double>(acc.moments.count))};
            moments.push_back(row.second_moment);
            report.rows.push_back(row);
        }
        report.slopes[kind] = fit_log2_slope(levels, moments);
    }
    return report;
}

OracleReport oracle_check(std::span<const int> levels, std::span<const double> mus, double horizon, std::uint64_t M,
                          const StreamBase& base, int workers, double z_max) {
    OracleReport report;
    for (std::size_t i = 0; i < mus.size(); ++i) {
        ModelConfig config;
        config.mu = mus[i];
        config.horizon = horizon;
        config.payoff = PayoffKind::USquared;
        const LevelSampler sampler = make_sampler(config);
        StreamBase stream = base;
        stream.experiment += i;
        const LevelCoupling kind = LevelCoupling::Nv;
        const DecayReport decay = variance_decay(sampler, std::span(&kind, 1), levels, M, stream, workers);
        for (const auto& d : decay.rows) {
            OracleRow row;
            row.level = d.level;
            row.mu = mus[i];
            row.estimate = d.second_moment;
            row.sem = d.sem;
            row.published = znv_second_moment(d.level, mus[i], horizon).value;
            row.exact = znv_second_moment_exact(d.level, mus[i], horizon).value;
            row.z_published = (row.estimate - row.published) / row.sem;
            row.z_exact = (row.estimate - row.exact) / row.sem;
            report.pass_published = report.pass_published && std::abs(row.z_published) <= z_max;
            report.pass_exact = report.pass_exact && std::abs(row.z_exact) <= z_max;
            report.rows.push_back(row);
        }
    }
    return report;
}

Planner::Planner(const LevelSampler& sampler, Coupling coupling, const CalibrationOptions& calibration,
                 PlanOptions options)
    : sampler_(sampler), coupling_(coupling), calibration_(calibration), options_(std::move(options)) {
    report_ = calibrate(sampler, coupling, calibration_);
}

double Planner::last_level_variance(int level) {
    if (auto it = last_level_variance_.find(level); it != last_level_variance_.end()) return it->second;
    StreamBase stream = calibration_.base;
    stream.experiment += 10;
    const double v = accumulate(sampler_.level_fn(LevelCoupling::GsNv, level), stream, level,
                                options_.last_level_samples, calibration_.workers)
                         .moments.variance();
    last_level_variance_[level] = v;
    return v;
}

double Planner::varf() {
    if (!varf_) {
        StreamBase stream = calibration_.base;
        stream.experiment += 11;
        varf_ = crude_mc(sampler_, SchemeKind::NV, options_.varf_level, options_.varf_samples, stream,
                         calibration_.workers)
                    .variance;
    }
    return *varf_;
}

std::vector<double> Planner::table(int last_level) {
    if (auto it = tables_.find(last_level); it != tables_.end()) return it->second;
    StreamBase stream = calibration_.base;
    stream.experiment += 12;
    const int lbar = *report_.inflection;
    const Coupling coupling = coupling_;
    const Level0Nv level0 = calibration_.level0;
    LevelDrawFactory factory = [sampler = sampler_, coupling, level0, last_level](int l) {
        return sampler.level_fn(coupling_at_level(coupling, l, last_level, level0), l);
    };
    const double beta = options_.beta_theory.value_or(options_.beta.value_or(report_.variance.order));
    auto t = variance_table(factory, last_level, lbar, beta, options_.table_samples, stream, calibration_.workers);
    tables_[last_level] = t;
    return t;
}

MultilevelPlan Planner::plan(EstimatorKind kind, double epsilon) {
    if (kind == EstimatorKind::Ml2r) {
        Ml2rInputs in;
        in.alpha = options_.alpha.value_or(report_.weak.order);
        in.beta = options_.beta.value_or(report_.variance.order);
        in.c2 = options_.c2.value_or(report_.variance.constant);
        in.varf = varf();
        in.horizon = sampler_.horizon();
        in.fixed_last_level = options_.fixed_last_level;
        return ml2r_plan(coupling_, epsilon, in);
    }
    MlmcInputs in;
    in.alpha = options_.alpha.value_or(report_.weak.order);
    in.c1 = options_.c1.value_or(report_.weak.constant);
    in.beta = options_.beta.value_or(report_.variance.order);
    in.c2 = options_.c2.value_or(report_.variance.constant);
    in.v0 = report_.level0.variance;
    in.level0 = calibration_.level0;
    const int L = options_.fixed_last_level ? *options_.fixed_last_level : mlmc_last_level(epsilon, in.c1, in.alpha);
    in.fixed_last_level = L;
    if (coupling_ == Coupling::GsNv) in.v_last = last_level_variance(L);
    if (options_.use_variance_table && report_.inflection && L >= *report_.inflection) {
        in.variance_override = table(L);
    }
    return mlmc_plan(coupling_, epsilon, in);
}

std::vector<RunRow> run_sweep(Planner& planner, std::span<const EstimatorKind> kinds, std::span<const double> eps,
                              const StreamBase& base, int workers, bool execute) {
    std::vector<RunRow> rows;
    for (std::size_t i = 0; i < eps.size(); ++i) {
        for (std::size_t k = 0; k < kinds.size(); ++k) {
            RunRow row;
            row.epsilon = eps[i];
            row.kind = kinds[k];
            row.coupling = planner.calibration().coupling;
            row.plan = planner.plan(kinds[k], eps[i]);
            if (execute) {
                StreamBase stream = base;
                stream.experiment += 100 * i + 10 * k;
                row.result = run_multilevel(row.plan, planner.sampler(), stream, workers);
            }
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

}  // namespace mlsde
