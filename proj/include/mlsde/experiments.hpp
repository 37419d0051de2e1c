#pragma once

// Experiment drivers shared by the command-line tool, the acceptance suite and the
// Python module. Each returns plain rows; formatting is left to the caller.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mlsde/calibrate.hpp"
#include "mlsde/estimators.hpp"
#include "mlsde/models.hpp"
#include "mlsde/oracle.hpp"
#include "mlsde/sampling.hpp"

namespace mlsde {

struct ModelConfig {
    std::string model = "clark-cameron";
    double mu = 1.0;
    double u0 = 0.0;
    double s0 = 0.0;
    HestonParams heston;
    double horizon = 1.0;
    PayoffKind payoff = PayoffKind::UPlus;
    double strike = 1.0;
};

AnyModel make_model(const ModelConfig& config);
// heston-call is discounted with exp(-r T).
Payoff make_payoff(const ModelConfig& config);
LevelSampler make_sampler(const ModelConfig& config);

// Least-squares slope of log2(values) against levels; invalid when a value is not positive.
struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    bool valid = false;
};

SlopeFit fit_log2_slope(std::span<const int> levels, std::span<const double> values);

struct StrongOrderRow {
    int level = 0;
    double nv_error = 0.0;        // E||X^{NV,fine} - X^{NV,coarse}||^2
    double coupling_error = 0.0;  // E||mean_{+-eta} X^{NV} - X^{GS}||^2
};

struct StrongOrderReport {
    std::vector<StrongOrderRow> rows;
    SlopeFit nv;
    SlopeFit coupling;
};

StrongOrderReport strong_order(const AnyModel& model, double horizon, std::span<const int> levels, std::uint64_t M,
                               const StreamBase& base, int workers = 1);

struct DecayRow {
    LevelCoupling coupling = LevelCoupling::Gs;
    int level = 0;
    double second_moment = 0.0;  // E[(Z^l)^2]
    double sem = 0.0;
};

struct DecayReport {
    std::vector<DecayRow> rows;
    std::map<LevelCoupling, SlopeFit> slopes;
};

DecayReport variance_decay(const LevelSampler& sampler, std::span<const LevelCoupling> couplings,
                           std::span<const int> levels, std::uint64_t M, const StreamBase& base, int workers = 1);

struct OracleRow {
    int level = 0;
    double mu = 0.0;
    double estimate = 0.0;
    double sem = 0.0;
    double published = 0.0;
    double exact = 0.0;
    double z_published = 0.0;
    double z_exact = 0.0;
};

struct OracleReport {
    std::vector<OracleRow> rows;
    bool pass_published = true;
    bool pass_exact = true;
};

// Monte Carlo E[(Z_NV^l)^2] for Clark-Cameron with f = u^2 against both closed forms.
OracleReport oracle_check(std::span<const int> levels, std::span<const double> mus, double horizon, std::uint64_t M,
                          const StreamBase& base, int workers = 1, double z_max = 4.0);

struct PlanOptions {
    // Theoretical variance rate for extrapolating past an inflection; calibrated rate if unset.
    std::optional<double> beta_theory;
    bool use_variance_table = true;
    std::uint64_t table_samples = 10000;
    std::uint64_t last_level_samples = 10000;  // for the GS-NV last-level variance
    int varf_level = 5;
    std::uint64_t varf_samples = 10000;
    std::optional<int> fixed_last_level;
    // Fixed rates and constants replacing the calibrated ones.
    std::optional<double> alpha, c1, beta, c2;
};

// Calibrates, caches the quantities plans need, and builds plans for any epsilon.
class Planner {
public:
    Planner(const LevelSampler& sampler, Coupling coupling, const CalibrationOptions& calibration,
            PlanOptions options = {});

    const CalibrationReport& calibration() const noexcept { return report_; }
    const LevelSampler& sampler() const noexcept { return sampler_; }
    MultilevelPlan plan(EstimatorKind kind, double epsilon);

private:
    double last_level_variance(int level);
    double varf();
    std::vector<double> table(int last_level);

    LevelSampler sampler_;
    Coupling coupling_;
    CalibrationOptions calibration_;
    PlanOptions options_;
    CalibrationReport report_;
    std::map<int, double> last_level_variance_;
    std::optional<double> varf_;
    std::map<int, std::vector<double>> tables_;
};

struct RunRow {
    double epsilon = 0.0;
    EstimatorKind kind = EstimatorKind::Mlmc;
    Coupling coupling = Coupling::Gs;
    MultilevelPlan plan;
    std::optional<EstimatorResult> result;
};

// Plans every (epsilon, estimator) pair and, when `execute` is set, runs it on streams
// derived from `base`.
std::vector<RunRow> run_sweep(Planner& planner, std::span<const EstimatorKind> kinds, std::span<const double> eps,
                              const StreamBase& base, int workers, bool execute = true);

}  // namespace mlsde
