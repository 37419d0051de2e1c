#pragma once

// MLMC and ML2R plans and the weighted multilevel estimator
//   Y = sum_l W_l / M_l sum_k Z^l_k,
// with W_l = 1 for MLMC.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mlsde/calibrate.hpp"
#include "mlsde/sampling.hpp"

namespace mlsde {

enum class EstimatorKind { Mlmc, Ml2r };

std::string to_string(EstimatorKind kind);
EstimatorKind parse_estimator(std::string_view name);

struct MultilevelPlan {
    EstimatorKind kind = EstimatorKind::Mlmc;
    Coupling coupling = Coupling::Gs;
    Level0Nv level0 = Level0Nv::Averaged;
    double epsilon = 0.0;
    int last_level = 0;
    std::vector<std::uint64_t> samples;
    std::vector<double> weights;
    std::vector<double> lambda;
    std::vector<double> variances;  // per-level variances the sizes were built from

    std::uint64_t total_samples() const;
    // sum_l M_l lambda_l 2^l
    double cost_units() const;
};

// Ceiling of log2(sqrt(2)|c1|/eps)/alpha, at least 1.
int mlmc_last_level(double epsilon, double c1, double alpha);

// M_l = ceil((2/eps^2) sqrt(V_l/(lambda_l 2^l)) sum_j sqrt(lambda_j 2^j V_j)), at least 1.
std::vector<std::uint64_t> mlmc_sample_sizes(double epsilon, const std::vector<double>& variances,
                                             const std::vector<double>& lambda);

// Cost weights: level 0 counts 1; GS and averaged NV count 5/2 above it, single NV counts 5;
// GS-NV counts 5/2 below the last level and 9/2 at it.
std::vector<double> lambda_table(Coupling coupling, int last_level, Level0Nv level0 = Level0Nv::Averaged);

struct MlmcInputs {
    double alpha = 0.0;  // weak rate and constant of the scheme setting the bias
    double c1 = 0.0;
    double beta = 0.0;  // variance rate and constant of the intermediate levels
    double c2 = 0.0;
    double v0 = 0.0;  // variance of the level-0 sample
    std::optional<double> v_last;  // variance of the GS-NV sample at the last level
    std::optional<int> fixed_last_level;
    // Per-level variances replacing the c2 2^{-beta l} model, e.g. from variance_table.
    std::optional<std::vector<double>> variance_override;
    Level0Nv level0 = Level0Nv::Averaged;
};

MultilevelPlan mlmc_plan(Coupling coupling, double epsilon, const MlmcInputs& inputs);

struct Ml2rWeights {
    std::vector<double> w;
    std::vector<double> W;  // suffix sums of w
};

Ml2rWeights ml2r_weights(int last_level, double alpha);

int ml2r_last_level(double epsilon, double alpha, double horizon);

struct Ml2rInputs {
    double alpha = 0.0;
    double beta = 0.0;
    double c2 = 0.0;
    double varf = 0.0;  // variance of f(X_T)
    double horizon = 1.0;
    std::optional<int> fixed_last_level;
};

struct Ml2rAllocation {
    double theta = 0.0;
    double n_star = 0.0;
    std::vector<double> q;
};

Ml2rAllocation ml2r_allocation(double epsilon, int last_level, const Ml2rInputs& inputs, const Ml2rWeights& weights);

// ML2R runs on the gs or nv coupling; nv uses the single-path level 0.
MultilevelPlan ml2r_plan(Coupling coupling, double epsilon, const Ml2rInputs& inputs);

struct EstimatorResult {
    double estimate = 0.0;
    std::vector<LevelStats> levels;
    double cost_units = 0.0;  // plan accounting, sum_l M_l lambda_l 2^l
    double eval_units = 0.0;  // scheme steps actually simulated
    double seconds = 0.0;
    std::uint64_t aborted = 0;
};

inline constexpr double kMaxAbortFraction = 0.01;

// Throws SamplingFailure when more than 1% of the samples at some level abort.
EstimatorResult run_multilevel(const MultilevelPlan& plan, const LevelSampler& sampler, const StreamBase& base,
                               int workers = 1);

// Plain Monte Carlo of f(X_T) with one scheme at `level`.
LevelStats crude_mc(const LevelSampler& sampler, SchemeKind scheme, int level, std::uint64_t M, const StreamBase& base,
                    int workers = 1);

}  // namespace mlsde
