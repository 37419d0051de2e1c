#pragma once

// Closed-form reference values for the Clark-Cameron model with f(u, s) = u^2.

#include <string>

namespace mlsde {

enum class Provenance { PublishedClosedForm, ExactExpectation, ItoIsometry };

std::string to_string(Provenance provenance);

struct OracleValue {
    double value = 0.0;
    Provenance provenance = Provenance::PublishedClosedForm;
};

// E[(Z_NV^l)^2] for u^2 on Clark-Cameron with u0 = s0 = 0:
//   2^{-4l} (3/16 mu^4 T^6 + 9/16 mu^2 T^5) + 2^{-3l} (11/64 mu^2 T^5 + 1545/512 T^4) + 2^{-2l} 163/1024 T^4
// Published closed form. It disagrees with the exact expectation of the same level sample
// in the mu^2 and mu-free coefficients; see znv_second_moment_exact.
OracleValue znv_second_moment(int level, double mu, double horizon);

// Exact E[(Z_NV^l)^2], from symbolic expansion at l = 1, 2 (tests/oracles/znv_exact.py):
//   2^{-4l} (3/16 mu^4 T^6 + mu^2 T^5) + 2^{-3l} (1/4 mu^2 T^5 + 2 T^4) + 2^{-2l} 5/8 T^4
OracleValue znv_second_moment_exact(int level, double mu, double horizon);

// E[U_T^2] = s0^2 T + s0 mu T^2 + mu^2 T^3 / 3 + T^2 / 2.
OracleValue cc_exact_usq_mean(double mu, double horizon, double s0 = 0.0);

}  // namespace mlsde
