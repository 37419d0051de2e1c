#include "mlsde/estimators.hpp"

#include <chrono>
#include <cmath>
#include <numeric>

#include "mlsde/errors.hpp"

namespace mlsde {

namespace {

// Absorbs round-off in log2 of exact powers of two before ceil/floor.
constexpr double kLevelTolerance = 1e-9;

std::uint64_t ceil_count(double x) {
    if (!std::isfinite(x)) throw ConfigError("sample size is not finite");
    const double c = std::ceil(x);
    return c < 1.0 ? 1 : static_cast<std::uint64_t>(c);
}

void require_positive_eps(double epsilon) {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw ConfigError("epsilon must be positive");
}

}  // namespace

std::string to_string(EstimatorKind kind) { return kind == EstimatorKind::Mlmc ? "mlmc" : "ml2r"; }

EstimatorKind parse_estimator(std::string_view name) {
    if (name == "mlmc") return EstimatorKind::Mlmc;
    if (name == "ml2r") return EstimatorKind::Ml2r;
    throw ConfigError("unknown estimator '" + std::string(name) + "'");
}

std::uint64_t MultilevelPlan::total_samples() const {
    return std::accumulate(samples.begin(), samples.end(), std::uint64_t{0});
}

double MultilevelPlan::cost_units() const {
    double cost = 0.0;
    for (std::size_t l = 0; l < samples.size(); ++l) {
        cost += static_cast<double>(samples[l]) * lambda[l] * std::ldexp(1.0, static_cast<int>(l));
    }
    return cost;
}

int mlmc_last_level(double epsilon, double c1, double alpha) {
    require_positive_eps(epsilon);
    if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
    if (c1 == 0.0) throw ZeroWeakConstant("weak error constant c1 is zero");
    const double x = std::log2(std::sqrt(2.0) * std::abs(c1) / epsilon) / alpha;
    const double level = std::ceil(x - kLevelTolerance);
    return level < 1.0 ? 1 : static_cast<int>(level);
}

std::vector<std::uint64_t> mlmc_sample_sizes(double epsilon, const std::vector<double>& variances,
                                             const std::vector<double>& lambda) {
    require_positive_eps(epsilon);
    if (variances.size() != lambda.size() || variances.empty()) {
        throw DimensionMismatch("variance and cost tables must have L+1 entries");
    }
    double sum = 0.0;
    for (std::size_t j = 0; j < variances.size(); ++j) {
        if (variances[j] < 0.0 || !std::isfinite(variances[j])) throw ConfigError("variances must be non-negative");
        if (!(lambda[j] > 0.0)) throw ConfigError("cost weights must be positive");
        sum += std::sqrt(lambda[j] * std::ldexp(1.0, static_cast<int>(j)) * variances[j]);
    }
    std::vector<std::uint64_t> out(variances.size(), 1);
    for (std::size_t l = 0; l < variances.size(); ++l) {
        const double scale = std::sqrt(variances[l] / (lambda[l] * std::ldexp(1.0, static_cast<int>(l))));
        out[l] = ceil_count(2.0 / (epsilon * epsilon) * scale * sum);
    }
    return out;
}

std::vector<double> lambda_table(Coupling coupling, int last_level, Level0Nv level0) {
    if (last_level < 0) throw ConfigError("last level must be non-negative");
    const double upper = coupling == Coupling::Nv && level0 == Level0Nv::Single ? 5.0 : 2.5;
    std::vector<double> lambda(static_cast<std::size_t>(last_level) + 1, upper);
    lambda[0] = 1.0;
    if (coupling == Coupling::GsNv && last_level >= 1) lambda[last_level] = 4.5;
    return lambda;
}

MultilevelPlan mlmc_plan(Coupling coupling, double epsilon, const MlmcInputs& in) {
    require_positive_eps(epsilon);
    const int L = in.fixed_last_level ? *in.fixed_last_level : mlmc_last_level(epsilon, in.c1, in.alpha);
    if (L < 1) throw ConfigError("last level must be at least 1");

    std::vector<double> variances;
    if (in.variance_override) {
        if (in.variance_override->size() < static_cast<std::size_t>(L) + 1) {
            throw DimensionMismatch("variance table shorter than L+1");
        }
        variances.assign(in.variance_override->begin(), in.variance_override->begin() + L + 1);
    } else {
        if (!(in.c2 > 0.0)) throw NonpositiveVariance("variance constant c2 must be positive");
        if (in.v0 < 0.0) throw NonpositiveVariance("level-0 variance must be non-negative");
        variances.resize(static_cast<std::size_t>(L) + 1);
        variances[0] = in.v0;
        for (int l = 1; l <= L; ++l) variances[l] = in.c2 * std::exp2(-in.beta * l);
    }
    if (coupling == Coupling::GsNv) {
        if (!in.v_last) throw MissingLastLevelVariance("gs-nv plans need the variance of the last-level sample");
        variances[L] = *in.v_last;
    }

    MultilevelPlan plan;
    plan.kind = EstimatorKind::Mlmc;
    plan.coupling = coupling;
    plan.level0 = in.level0;
    plan.epsilon = epsilon;
    plan.last_level = L;
    plan.lambda = lambda_table(coupling, L, in.level0);
    plan.samples = mlmc_sample_sizes(epsilon, variances, plan.lambda);
    plan.weights.assign(static_cast<std::size_t>(L) + 1, 1.0);
    plan.variances = std::move(variances);
    return plan;
}

Ml2rWeights ml2r_weights(int L, double alpha) {
    if (L < 1) throw ConfigError("ML2R needs L >= 1");
    if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
    auto prod = [alpha](int n) {
        double p = 1.0;
        for (int k = 1; k <= n; ++k) p *= 1.0 - std::exp2(-k * alpha);
        return p;
    };
    Ml2rWeights out;
    out.w.resize(static_cast<std::size_t>(L) + 1);
    out.W.resize(static_cast<std::size_t>(L) + 1);
    for (int j = 0; j <= L; ++j) {
        const int r = L - j;
        const double sign = r % 2 == 0 ? 1.0 : -1.0;
        out.w[j] = sign * std::exp2(-0.5 * alpha * r * (r + 1)) / (prod(j) * prod(r));
    }
    double suffix = 0.0;
    for (int l = L; l >= 0; --l) {
        suffix += out.w[l];
        out.W[l] = suffix;
    }
    return out;
}

int ml2r_last_level(double epsilon, double alpha, double horizon) {
    require_positive_eps(epsilon);
    if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
    if (!(horizon > 0.0)) throw ConfigError("horizon must be positive");
    const double lt = std::log2(horizon);
    const double radicand = (0.5 + lt) * (0.5 + lt) + 2.0 / alpha * std::log2(std::sqrt(1.0 + 4.0 * alpha) / epsilon);
    if (radicand < 0.0) return 1;
    const double level = std::floor(std::sqrt(radicand) + lt - 0.5 + kLevelTolerance);
    return level < 1.0 ? 1 : static_cast<int>(level);
}

Ml2rAllocation ml2r_allocation(double epsilon, int L, const Ml2rInputs& in, const Ml2rWeights& weights) {
    if (!(in.varf > 0.0)) throw NonpositiveVariance("variance of f(X_T) must be positive");
    if (!(in.c2 > 0.0)) throw NonpositiveVariance("variance constant c2 must be positive");
    Ml2rAllocation a;
    a.theta = std::pow(in.horizon, -in.beta / 2.0) * std::sqrt(in.c2 / in.varf);

    auto decay = [&](int l) { return std::exp2(-in.beta / 2.0 * l) + std::exp2(-in.beta / 2.0 * (l - 1)); };
    auto kappa = [](int l) { return std::ldexp(1.0, l) + std::ldexp(1.0, l - 1); };

    a.q.resize(static_cast<std::size_t>(L) + 1);
    a.q[0] = 1.0 + a.theta;
    double numerator_sum = 0.0;
    for (int l = 1; l <= L; ++l) {
        a.q[l] = a.theta * std::abs(weights.W[l]) * decay(l) / std::sqrt(kappa(l));
        numerator_sum += std::abs(weights.W[l]) * decay(l) * std::sqrt(kappa(l));
    }
    const double total = std::accumulate(a.q.begin(), a.q.end(), 0.0);
    for (auto& q : a.q) q /= total;

    double denominator = a.q[0];
    for (int l = 1; l <= L; ++l) denominator += a.q[l] * kappa(l);
    const double bracket = 1.0 + a.theta * (1.0 + numerator_sum);
    a.n_star = (1.0 + 1.0 / (2.0 * in.alpha * (L + 1))) * in.varf * bracket * bracket /
               (epsilon * epsilon * denominator);
    return a;
}

MultilevelPlan ml2r_plan(Coupling coupling, double epsilon, const Ml2rInputs& in) {
    require_positive_eps(epsilon);
    if (coupling == Coupling::GsNv) throw ConfigError("ML2R supports the gs and nv couplings only");
    if (!(in.varf > 0.0)) throw NonpositiveVariance("variance of f(X_T) must be positive");
    if (!(in.c2 > 0.0)) throw NonpositiveVariance("variance constant c2 must be positive");
    const int L = in.fixed_last_level ? *in.fixed_last_level : ml2r_last_level(epsilon, in.alpha, in.horizon);
    if (L < 1) throw ConfigError("last level must be at least 1");

    const Ml2rWeights weights = ml2r_weights(L, in.alpha);
    const Ml2rAllocation alloc = ml2r_allocation(epsilon, L, in, weights);

    MultilevelPlan plan;
    plan.kind = EstimatorKind::Ml2r;
    plan.coupling = coupling;
    plan.level0 = Level0Nv::Single;
    plan.epsilon = epsilon;
    plan.last_level = L;
    plan.weights = weights.W;
    plan.lambda = lambda_table(coupling, L, Level0Nv::Single);
    plan.samples.resize(static_cast<std::size_t>(L) + 1);
    plan.variances.resize(static_cast<std::size_t>(L) + 1);
    plan.variances[0] = in.varf;
    for (int l = 0; l <= L; ++l) {
        plan.samples[l] = ceil_count(alloc.q[l] * alloc.n_star);
        if (l > 0) plan.variances[l] = in.c2 * std::exp2(-in.beta * l);
    }
    return plan;
}

EstimatorResult run_multilevel(const MultilevelPlan& plan, const LevelSampler& sampler, const StreamBase& base,
                               int workers) {
    const auto n = static_cast<std::size_t>(plan.last_level) + 1;
    if (plan.samples.size() != n || plan.weights.size() != n || plan.lambda.size() != n) {
        throw DimensionMismatch("plan tables must have L+1 entries");
    }
    const auto start = std::chrono::steady_clock::now();
    EstimatorResult result;
    for (int l = 0; l <= plan.last_level; ++l) {
        if (plan.samples[l] < 1) throw ConfigError("every level needs at least one sample");
        const LevelCoupling kind = coupling_at_level(plan.coupling, l, plan.last_level, plan.level0);
        const Accumulation acc = accumulate(sampler.level_fn(kind, l), base, l, plan.samples[l], workers);
        if (acc.abort_fraction() > kMaxAbortFraction) {
            throw SamplingFailure("level " + std::to_string(l) + ": " + std::to_string(acc.aborted) + " of " +
                                  std::to_string(acc.requested) + " samples aborted");
        }
        result.levels.push_back(LevelStats::from(acc));
        result.estimate += plan.weights[l] * acc.moments.mean;
        result.eval_units += acc.cost_units;
        result.aborted += acc.aborted;
    }
    result.cost_units = plan.cost_units();
    result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

LevelStats crude_mc(const LevelSampler& sampler, SchemeKind scheme, int level, std::uint64_t M, const StreamBase& base,
                    int workers) {
    if (M < 2) throw ConfigError("sample size must be at least 2");
    if (level < 0) throw ConfigError("level must be non-negative");
    return LevelStats::from(accumulate(sampler.crude_fn(scheme, level), base, level, M, workers));
}

}  // namespace mlsde
