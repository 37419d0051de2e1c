#pragma once

// Parallel Monte Carlo accumulation with per-sample streams.
//
// Samples are processed in fixed-size blocks; each block is reduced with
// Welford updates and the block results are merged in block order, so the
// output is bit-identical for any worker count.

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

#include "mlsde/models.hpp"
#include "mlsde/paths.hpp"
#include "mlsde/schemes.hpp"

namespace mlsde {

struct RunningMoments {
    std::uint64_t count = 0;
    double mean = 0.0;
    double m2 = 0.0;  // sum of squared deviations from the mean

    void add(double value);
    void merge(const RunningMoments& other);

    double sum() const { return mean * static_cast<double>(count); }
    // Unbiased sample variance; zero with fewer than two samples.
    double variance() const;
    // Plain mean of value^2.
    double second_moment() const;
};

struct Draw {
    double value = 0.0;
    double cost_units = 0.0;
};

using DrawFn = std::function<Draw(const RngStream&)>;

struct StreamBase {
    std::uint64_t seed = 0;
    std::uint64_t experiment = 0;
    NoiseMode mode = NoiseMode::Gaussian;

    RngStream stream(int level, std::uint64_t sample) const {
        return RngStream(seed, experiment, static_cast<std::uint64_t>(level), sample, mode);
    }
};

struct Accumulation {
    int level = 0;
    std::uint64_t requested = 0;
    std::uint64_t aborted = 0;
    RunningMoments moments;
    double cost_units = 0.0;

    double abort_fraction() const {
        return requested == 0 ? 0.0 : static_cast<double>(aborted) / static_cast<double>(requested);
    }
};

inline constexpr std::uint64_t kBlockSize = 4096;

// Draws samples 0..count-1 of `level` from streams derived from `base`. Samples that
// throw DomainError are counted as aborted and left out of the moments; any other
// exception propagates.
Accumulation accumulate(const DrawFn& draw, const StreamBase& base, int level, std::uint64_t count, int workers);

int default_workers();

enum class Coupling { Gs, Nv, GsNv };
enum class Level0Nv { Single, Averaged };

std::string to_string(Coupling coupling);
Coupling parse_coupling(std::string_view name);

// Which level sample an estimator with the given coupling uses at `level`.
// GS-NV uses GS below the last level and the NV/GS coupling at the last level.
LevelCoupling coupling_at_level(Coupling coupling, int level, int last_level, Level0Nv level0 = Level0Nv::Averaged);

// Binds a model, payoff and horizon; draws level samples for any coupling.
class LevelSampler {
public:
    LevelSampler(AnyModel model, Payoff payoff, double horizon);

    const AnyModel& model() const noexcept { return model_; }
    const Payoff& payoff() const noexcept { return payoff_; }
    double horizon() const noexcept { return horizon_; }

    LevelSample draw(LevelCoupling coupling, int level, const RngStream& rng) const;

    // Draw function reporting Z^l and its cost units.
    DrawFn level_fn(LevelCoupling coupling, int level) const;
    // Draw function reporting f(X_T) for a single scheme path at `level` (crude Monte Carlo).
    DrawFn crude_fn(SchemeKind scheme, int level) const;

private:
    AnyModel model_;
    Payoff payoff_;
    double horizon_;
};

}  // namespace mlsde
