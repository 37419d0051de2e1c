#include <gtest/gtest.h>

#include <cmath>

#include "mlsde/errors.hpp"
#include "mlsde/oracle.hpp"

using namespace mlsde;

TEST(PublishedSecondMoment, SpotValues) {
    EXPECT_NEAR(znv_second_moment(1, 1.0, 1.0).value, 0.4853515625, 1e-15);
    EXPECT_NEAR(znv_second_moment(1, 0.0, 1.0).value, 0.4169921875, 1e-15);
    EXPECT_EQ(znv_second_moment(1, 1.0, 1.0).provenance, Provenance::PublishedClosedForm);
}

TEST(PublishedSecondMoment, QuarterDecay) {
    const double a = znv_second_moment(20, 1.0, 1.0).value;
    const double b = znv_second_moment(21, 1.0, 1.0).value;
    EXPECT_NEAR(b / a, 0.25, 1e-5);
}

// Frozen from tests/oracles/znv_exact.py.
TEST(ExactSecondMoment, SymbolicValues) {
    EXPECT_NEAR(znv_second_moment_exact(1, 1.0, 1.0).value, 131.0 / 256.0, 1e-15);
    EXPECT_NEAR(znv_second_moment_exact(1, 0.0, 1.0).value, 13.0 / 32.0, 1e-15);
    EXPECT_NEAR(znv_second_moment_exact(2, 1.0, 1.0).value, 323.0 / 4096.0, 1e-15);
    EXPECT_NEAR(znv_second_moment_exact(2, 0.0, 1.0).value, 9.0 / 128.0, 1e-15);
    EXPECT_EQ(znv_second_moment_exact(1, 1.0, 1.0).provenance, Provenance::ExactExpectation);
}

TEST(ExactSecondMoment, DiffersFromPublished) {
    EXPECT_GT(std::abs(znv_second_moment_exact(1, 1.0, 1.0).value - znv_second_moment(1, 1.0, 1.0).value), 0.02);
}

TEST(SecondMoment, Guards) {
    EXPECT_THROW(znv_second_moment(0, 1.0, 1.0), ConfigError);
    EXPECT_THROW(znv_second_moment_exact(1, 1.0, 0.0), ConfigError);
}

TEST(ClarkCameronExact, Values) {
    EXPECT_NEAR(cc_exact_usq_mean(1.0, 1.0).value, 5.0 / 6.0, 1e-15);
    EXPECT_NEAR(cc_exact_usq_mean(0.0, 1.0).value, 0.5, 1e-15);
    EXPECT_EQ(cc_exact_usq_mean(1.0, 0.0).value, 0.0);
    EXPECT_EQ(cc_exact_usq_mean(1.0, 1.0).provenance, Provenance::ItoIsometry);
}
