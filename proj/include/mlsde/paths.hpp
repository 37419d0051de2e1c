#pragma once

// Coupled randomness for one multilevel sample.
//
// Every sample draws its Brownian increments and Rademacher signs from its own
// stream, keyed by (seed, experiment, level, sample index). Results therefore do
// not depend on how samples are distributed across workers.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace mlsde {

// Uniform time grid with 2^level steps over [0, horizon].
struct LevelGrid {
    int level = 0;
    double horizon = 1.0;

    std::size_t steps() const { return std::size_t{1} << level; }
    // ldexp scales by a power of two, so step() * steps() == horizon exactly.
    double step() const { return std::ldexp(horizon, -level); }
};

// Brownian increments for d dimensions over a number of steps, stored step-major.
class FineIncrements {
public:
    FineIncrements() = default;
    FineIncrements(std::size_t dims, std::size_t steps) : dims_(dims), steps_(steps), data_(dims * steps) {}
    // Builds from per-dimension rows: rows[j][k] is the increment of W^j over step k.
    static FineIncrements from_rows(const std::vector<std::vector<double>>& rows);

    std::size_t dims() const noexcept { return dims_; }
    std::size_t steps() const noexcept { return steps_; }

    double& operator()(std::size_t j, std::size_t k) { return data_[k * dims_ + j]; }
    double operator()(std::size_t j, std::size_t k) const { return data_[k * dims_ + j]; }

    std::span<const double> step(std::size_t k) const { return {data_.data() + k * dims_, dims_}; }
    std::span<double> step(std::size_t k) { return {data_.data() + k * dims_, dims_}; }

    std::vector<double> row(std::size_t j) const;

    friend bool operator==(const FineIncrements&, const FineIncrements&) = default;

private:
    std::size_t dims_ = 0;
    std::size_t steps_ = 0;
    std::vector<double> data_;
};

// Signs eta_k in {-1, +1}, one per step.
struct RademacherSeq {
    std::vector<std::int8_t> eta;

    std::size_t size() const noexcept { return eta.size(); }
    std::int8_t operator[](std::size_t k) const { return eta[k]; }
    RademacherSeq negated() const;

    friend bool operator==(const RademacherSeq&, const RademacherSeq&) = default;
};

struct LevelPath {
    LevelGrid grid;
    FineIncrements increments;
    RademacherSeq eta;
};

// xoshiro256** seeded through splitmix64. Satisfies UniformRandomBitGenerator.
class Xoshiro256 {
public:
    using result_type = std::uint64_t;

    explicit Xoshiro256(std::uint64_t seed);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
    result_type operator()();

private:
    std::uint64_t s_[4];
};

std::uint64_t splitmix64(std::uint64_t& state);

enum class NoiseMode {
    Gaussian,
    Zero,  // degenerate streams: all Brownian increments are zero, signs stay random
};

class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t experiment, std::uint64_t level, std::uint64_t sample,
              NoiseMode mode = NoiseMode::Gaussian);

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t experiment() const noexcept { return experiment_; }
    std::uint64_t level() const noexcept { return level_; }
    std::uint64_t sample() const noexcept { return sample_; }
    NoiseMode mode() const noexcept { return mode_; }

    // A fresh engine positioned at the start of this stream.
    Xoshiro256 engine() const { return Xoshiro256(key_); }

    // Same coordinates with a different sample index.
    RngStream with_sample(std::uint64_t sample) const {
        return RngStream(seed_, experiment_, level_, sample, mode_);
    }

private:
    std::uint64_t seed_, experiment_, level_, sample_;
    NoiseMode mode_;
    std::uint64_t key_;
};

// Gaussian increments with variance h_l (standard normals scaled by sqrt(h_l)) and
// independent Rademacher signs, both a pure function of the stream.
LevelPath sample_level_path(const RngStream& rng, const LevelGrid& grid, std::size_t dims);

// Pairwise sums: entry k of the result is fine[2k] + fine[2k+1]. Throws OddStepCount.
FineIncrements coarsen(const FineIncrements& fine);

// Exchanges entries 2k and 2k+1 in every dimension. Throws OddStepCount.
FineIncrements antithetic_swap(const FineIncrements& fine);

// Keeps eta_1, eta_3, ... (one-based), i.e. the even zero-based positions. Throws OddStepCount.
RademacherSeq rademacher_coarse(const RademacherSeq& eta);

}  // namespace mlsde
