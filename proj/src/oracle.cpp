#include "mlsde/oracle.hpp"

#include <cmath>

#include "mlsde/errors.hpp"

namespace mlsde {

std::string to_string(Provenance provenance) {
    switch (provenance) {
        case Provenance::PublishedClosedForm: return "published-closed-form";
        case Provenance::ExactExpectation: return "exact-expectation";
        case Provenance::ItoIsometry: return "ito-isometry";
    }
    return "unknown";
}

namespace {

using R = long double;

// Coefficients of 2^{-4l} (a4 mu^4 T^6 + a2 mu^2 T^5) + 2^{-3l} (b2 mu^2 T^5 + b0 T^4) + 2^{-2l} c0 T^4.
struct ZnvCoefficients {
    R a4, a2, b2, b0, c0;
};

R znv_polynomial(const ZnvCoefficients& k, int level, double mu, double horizon) {
    if (level < 1) throw ConfigError("the closed form holds for l >= 1");
    if (!(horizon > 0.0)) throw ConfigError("horizon must be positive");
    const R m2 = static_cast<R>(mu) * mu;
    const R t = horizon;
    const R t4 = t * t * t * t;
    const R t5 = t4 * t;
    const R t6 = t5 * t;
    const R h = std::ldexp(R{1}, -level);
    const R h2 = h * h;
    return h2 * h2 * (k.a4 * m2 * m2 * t6 + k.a2 * m2 * t5) + h2 * h * (k.b2 * m2 * t5 + k.b0 * t4) + h2 * (k.c0 * t4);
}

}  // namespace

OracleValue znv_second_moment(int level, double mu, double horizon) {
    const ZnvCoefficients k{R{3} / 16, R{9} / 16, R{11} / 64, R{1545} / 512, R{163} / 1024};
    return {static_cast<double>(znv_polynomial(k, level, mu, horizon)), Provenance::PublishedClosedForm};
}

OracleValue znv_second_moment_exact(int level, double mu, double horizon) {
    const ZnvCoefficients k{R{3} / 16, R{1}, R{1} / 4, R{2}, R{5} / 8};
    return {static_cast<double>(znv_polynomial(k, level, mu, horizon)), Provenance::ExactExpectation};
}

OracleValue cc_exact_usq_mean(double mu, double horizon, double s0) {
    if (horizon < 0.0) throw ConfigError("horizon must be non-negative");
    const R t = horizon;
    const R m = mu;
    const R s = s0;
    const R y = s * s * t + s * m * t * t + m * m * t * t * t / 3 + t * t / 2;
    return {static_cast<double>(y), Provenance::ItoIsometry};
}

}  // namespace mlsde
