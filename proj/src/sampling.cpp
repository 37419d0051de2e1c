#include "mlsde/sampling.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "mlsde/errors.hpp"

namespace mlsde {

void RunningMoments::add(double value) {
    ++count;
    const double delta = value - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (value - mean);
}

void RunningMoments::merge(const RunningMoments& other) {
    if (other.count == 0) return;
    if (count == 0) {
        *this = other;
        return;
    }
    const double na = static_cast<double>(count);
    const double nb = static_cast<double>(other.count);
    const double n = na + nb;
    const double delta = other.mean - mean;
    mean += delta * nb / n;
    m2 += other.m2 + delta * delta * na * nb / n;
    count += other.count;
}

double RunningMoments::variance() const {
    return count < 2 ? 0.0 : std::max(0.0, m2 / static_cast<double>(count - 1));
}

double RunningMoments::second_moment() const {
    return count == 0 ? 0.0 : m2 / static_cast<double>(count) + mean * mean;
}

int default_workers() {
    const unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : static_cast<int>(n);
}

namespace {

struct BlockResult {
    RunningMoments moments;
    std::uint64_t aborted = 0;
    double cost_units = 0.0;
};

BlockResult run_block(const DrawFn& draw, const StreamBase& base, int level, std::uint64_t begin,
                      std::uint64_t end) {
    BlockResult out;
    for (std::uint64_t k = begin; k < end; ++k) {
        try {
            const Draw d = draw(base.stream(level, k));
            out.moments.add(d.value);
            out.cost_units += d.cost_units;
        } catch (const DomainError&) {
            ++out.aborted;
        }
    }
    return out;
}

}  // namespace

Accumulation accumulate(const DrawFn& draw, const StreamBase& base, int level, std::uint64_t count, int workers) {
    const std::uint64_t blocks = (count + kBlockSize - 1) / kBlockSize;
    std::vector<BlockResult> results(blocks);

    auto block_range = [&](std::uint64_t b) {
        return std::pair{b * kBlockSize, std::min(count, (b + 1) * kBlockSize)};
    };

    const auto n_workers = static_cast<std::uint64_t>(std::max(1, workers));
    if (n_workers == 1 || blocks <= 1) {
        for (std::uint64_t b = 0; b < blocks; ++b) {
            const auto [begin, end] = block_range(b);
            results[b] = run_block(draw, base, level, begin, end);
        }
    } else {
        std::atomic<std::uint64_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        auto worker = [&] {
            for (std::uint64_t b = next++; b < blocks; b = next++) {
                try {
                    const auto [begin, end] = block_range(b);
                    results[b] = run_block(draw, base, level, begin, end);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                    next = blocks;
                }
            }
        };
        std::vector<std::jthread> pool;
        for (std::uint64_t w = 0; w < std::min(n_workers, blocks); ++w) pool.emplace_back(worker);
        pool.clear();
        if (failure) std::rethrow_exception(failure);
    }

    Accumulation acc;
    acc.level = level;
    acc.requested = count;
    for (const auto& r : results) {
        acc.moments.merge(r.moments);
        acc.aborted += r.aborted;
        acc.cost_units += r.cost_units;
    }
    return acc;
}

std::string to_string(Coupling coupling) {
    switch (coupling) {
        case Coupling::Gs: return "gs";
        case Coupling::Nv: return "nv";
        case Coupling::GsNv: return "gs-nv";
    }
    return "unknown";
}

Coupling parse_coupling(std::string_view name) {
    if (name == "gs") return Coupling::Gs;
    if (name == "nv") return Coupling::Nv;
    if (name == "gs-nv") return Coupling::GsNv;
    throw ConfigError("unknown coupling '" + std::string(name) + "'");
}

LevelCoupling coupling_at_level(Coupling coupling, int level, int last_level, Level0Nv level0) {
    if (level < 0) throw ConfigError("level must be non-negative");
    switch (coupling) {
        case Coupling::Gs: return level == 0 ? LevelCoupling::Level0Gs : LevelCoupling::Gs;
        case Coupling::Nv:
            if (level > 0) return LevelCoupling::Nv;
            return level0 == Level0Nv::Single ? LevelCoupling::Level0NvSingle : LevelCoupling::Level0NvAveraged;
        case Coupling::GsNv:
            if (level == 0) return LevelCoupling::Level0Gs;
            return level == last_level ? LevelCoupling::GsNv : LevelCoupling::Gs;
    }
    return LevelCoupling::Level0Gs;
}

LevelSampler::LevelSampler(AnyModel model, Payoff payoff, double horizon)
    : model_(std::move(model)), payoff_(payoff), horizon_(horizon) {
    if (!(horizon > 0.0)) throw ConfigError("horizon T must be positive");
}

LevelSample LevelSampler::draw(LevelCoupling coupling, int level, const RngStream& rng) const {
    return std::visit(
        [&](const auto& m) {
            using M = std::decay_t<decltype(m)>;
            const auto path = sample_level_path(rng, LevelGrid{level, horizon_}, M::kNoiseDim);
            return level_sample(coupling, m, payoff_, path);
        },
        model_);
}

DrawFn LevelSampler::level_fn(LevelCoupling coupling, int level) const {
    return [sampler = *this, coupling, level](const RngStream& rng) {
        const LevelSample s = sampler.draw(coupling, level, rng);
        return Draw{s.value, s.cost_units()};
    };
}

DrawFn LevelSampler::crude_fn(SchemeKind scheme, int level) const {
    return [sampler = *this, scheme, level](const RngStream& rng) {
        return std::visit(
            [&](const auto& m) {
                using M = std::decay_t<decltype(m)>;
                const LevelGrid grid{level, sampler.horizon()};
                const auto path = sample_level_path(rng, grid, M::kNoiseDim);
                const auto x = simulate_path(scheme, m, grid, path.increments, path.eta);
                return Draw{sampler.payoff()(x), static_cast<double>(grid.steps())};
            },
            sampler.model());
    };
}

}  // namespace mlsde
