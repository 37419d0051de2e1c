#include "mlsde/paths.hpp"

#include <random>
#include <string>

#include "mlsde/errors.hpp"

namespace mlsde {

FineIncrements FineIncrements::from_rows(const std::vector<std::vector<double>>& rows) {
    const std::size_t dims = rows.size();
    const std::size_t steps = dims == 0 ? 0 : rows.front().size();
    FineIncrements out(dims, steps);
    for (std::size_t j = 0; j < dims; ++j) {
        if (rows[j].size() != steps) throw DimensionMismatch("increment rows have different lengths");
        for (std::size_t k = 0; k < steps; ++k) out(j, k) = rows[j][k];
    }
    return out;
}

std::vector<double> FineIncrements::row(std::size_t j) const {
    std::vector<double> out(steps_);
    for (std::size_t k = 0; k < steps_; ++k) out[k] = (*this)(j, k);
    return out;
}

RademacherSeq RademacherSeq::negated() const {
    RademacherSeq out{eta};
    for (auto& e : out.eta) e = static_cast<std::int8_t>(-e);
    return out;
}

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

namespace {

constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

std::uint64_t mix_in(std::uint64_t key, std::uint64_t value) {
    std::uint64_t state = key ^ (value + 0x632be59bd9b4e019ULL);
    splitmix64(state);
    return splitmix64(state);
}

}  // namespace

Xoshiro256::Xoshiro256(std::uint64_t seed) {
    std::uint64_t state = seed;
    for (auto& word : s_) word = splitmix64(state);
}

Xoshiro256::result_type Xoshiro256::operator()() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t experiment, std::uint64_t level, std::uint64_t sample,
                     NoiseMode mode)
    : seed_(seed), experiment_(experiment), level_(level), sample_(sample), mode_(mode) {
    key_ = mix_in(mix_in(mix_in(mix_in(0x243f6a8885a308d3ULL, seed), experiment), level), sample);
}

LevelPath sample_level_path(const RngStream& rng, const LevelGrid& grid, std::size_t dims) {
    if (grid.level < 0) throw ConfigError("level must be non-negative");
    LevelPath path{grid, FineIncrements(dims, grid.steps()), {}};
    auto engine = rng.engine();

    if (rng.mode() == NoiseMode::Gaussian) {
        std::normal_distribution<double> normal;
        const double scale = std::sqrt(grid.step());
        for (std::size_t k = 0; k < grid.steps(); ++k) {
            for (auto& w : path.increments.step(k)) w = scale * normal(engine);
        }
    }

    path.eta.eta.resize(grid.steps());
    std::uint64_t bits = 0;
    for (std::size_t k = 0; k < grid.steps(); ++k) {
        if (k % 64 == 0) bits = engine();
        path.eta.eta[k] = (bits >> (k % 64)) & 1U ? std::int8_t{1} : std::int8_t{-1};
    }
    return path;
}

namespace {

void require_even(std::size_t steps, const char* what) {
    if (steps % 2 != 0) {
        throw OddStepCount(std::string(what) + ": needs an even number of steps, got " + std::to_string(steps));
    }
}

}  // namespace

FineIncrements coarsen(const FineIncrements& fine) {
    require_even(fine.steps(), "coarsen");
    FineIncrements out(fine.dims(), fine.steps() / 2);
    for (std::size_t k = 0; k < out.steps(); ++k) {
        for (std::size_t j = 0; j < fine.dims(); ++j) out(j, k) = fine(j, 2 * k) + fine(j, 2 * k + 1);
    }
    return out;
}

FineIncrements antithetic_swap(const FineIncrements& fine) {
    require_even(fine.steps(), "antithetic_swap");
    FineIncrements out(fine.dims(), fine.steps());
    for (std::size_t k = 0; k < fine.steps(); k += 2) {
        for (std::size_t j = 0; j < fine.dims(); ++j) {
            out(j, k) = fine(j, k + 1);
            out(j, k + 1) = fine(j, k);
        }
    }
    return out;
}

RademacherSeq rademacher_coarse(const RademacherSeq& eta) {
    require_even(eta.size(), "rademacher_coarse");
    RademacherSeq out;
    out.eta.reserve(eta.size() / 2);
    for (std::size_t k = 0; k < eta.size(); k += 2) out.eta.push_back(eta[k]);
    return out;
}

}  // namespace mlsde
