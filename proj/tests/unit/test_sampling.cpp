#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

#include "mlsde/sampling.hpp"

using namespace mlsde;

TEST(RunningMoments, MergeMatchesSequential) {
    RunningMoments all, left, right;
    for (int i = 0; i < 1000; ++i) {
        const double x = std::sin(i * 0.37) * 3.0 + 1.0;
        all.add(x);
        (i < 420 ? left : right).add(x);
    }
    left.merge(right);
    EXPECT_EQ(left.count, all.count);
    EXPECT_NEAR(left.mean, all.mean, 1e-13);
    EXPECT_NEAR(left.variance(), all.variance(), 1e-12);
}

TEST(RunningMoments, Degenerate) {
    RunningMoments m;
    EXPECT_EQ(m.variance(), 0.0);
    m.add(2.0);
    EXPECT_EQ(m.variance(), 0.0);
    EXPECT_EQ(m.second_moment(), 4.0);
}

TEST(Accumulate, ConstantSampler) {
    const DrawFn draw = [](const RngStream&) { return Draw{3.5, 1.0}; };
    const auto acc = accumulate(draw, StreamBase{1, 0}, 0, 10000, 1);
    EXPECT_EQ(acc.moments.mean, 3.5);
    EXPECT_EQ(acc.moments.variance(), 0.0);
    EXPECT_EQ(acc.cost_units, 10000.0);
}

TEST(Accumulate, DeterministicAcrossWorkerCounts) {
    const LevelSampler sampler(ClarkCameronModel{1.0}, Payoff::cos_u(), 1.0);
    const auto fn = sampler.level_fn(LevelCoupling::Nv, 3);
    const auto one = accumulate(fn, StreamBase{9, 4}, 3, 3 * kBlockSize + 123, 1);
    for (int workers : {2, 3, 8}) {
        const auto many = accumulate(fn, StreamBase{9, 4}, 3, 3 * kBlockSize + 123, workers);
        EXPECT_EQ(one.moments.mean, many.moments.mean);
        EXPECT_EQ(one.moments.m2, many.moments.m2);
        EXPECT_EQ(one.cost_units, many.cost_units);
    }
}

TEST(Accumulate, CountsDomainErrorsAsAborts) {
    const DrawFn draw = [](const RngStream& rng) {
        if (rng.sample() % 10 == 0) throw DomainError("bad sample");
        return Draw{1.0, 1.0};
    };
    for (int workers : {1, 2}) {
        const auto acc = accumulate(draw, StreamBase{}, 0, 10000, workers);
        EXPECT_EQ(acc.aborted, 1000u);
        EXPECT_EQ(acc.moments.count, 9000u);
        EXPECT_DOUBLE_EQ(acc.abort_fraction(), 0.1);
    }
}

TEST(Accumulate, PropagatesOtherErrors) {
    const DrawFn draw = [](const RngStream& rng) {
        if (rng.sample() == 5000) throw std::logic_error("broken");
        return Draw{1.0, 1.0};
    };
    EXPECT_THROW(accumulate(draw, StreamBase{}, 0, 10000, 1), std::logic_error);
    EXPECT_THROW(accumulate(draw, StreamBase{}, 0, 10000, 3), std::logic_error);
}

TEST(Coupling, LevelAssignment) {
    EXPECT_EQ(coupling_at_level(Coupling::Gs, 0, 3), LevelCoupling::Level0Gs);
    EXPECT_EQ(coupling_at_level(Coupling::Gs, 3, 3), LevelCoupling::Gs);
    EXPECT_EQ(coupling_at_level(Coupling::Nv, 0, 3, Level0Nv::Single), LevelCoupling::Level0NvSingle);
    EXPECT_EQ(coupling_at_level(Coupling::Nv, 0, 3), LevelCoupling::Level0NvAveraged);
    EXPECT_EQ(coupling_at_level(Coupling::GsNv, 0, 3), LevelCoupling::Level0Gs);
    EXPECT_EQ(coupling_at_level(Coupling::GsNv, 2, 3), LevelCoupling::Gs);
    EXPECT_EQ(coupling_at_level(Coupling::GsNv, 3, 3), LevelCoupling::GsNv);
    EXPECT_EQ(parse_coupling("gs-nv"), Coupling::GsNv);
    EXPECT_THROW(parse_coupling("euler"), ConfigError);
}

TEST(LevelSampler, RejectsNonPositiveHorizon) {
    EXPECT_THROW(LevelSampler(ClarkCameronModel{}, Payoff::cos_u(), 0.0), ConfigError);
}
