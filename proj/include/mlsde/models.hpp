#pragma once

// SDE models driven by d independent Brownian motions:
//
//     dX_t = b(X_t) dt + sum_j sigma_j(X_t) dW^j_t
//
// Brownian indices are zero-based in code: diffusion(0, x) is the first column.
// Every model supplies the exact flows of its Stratonovich drift and of each
// diffusion column, which is all the Ninomiya-Victoir scheme needs.

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mlsde/errors.hpp"

namespace mlsde {

template <class M>
concept SdeModel = requires(const M& model, const typename M::State& x, std::size_t j, double t) {
    { M::kStateDim } -> std::convertible_to<std::size_t>;
    { M::kNoiseDim } -> std::convertible_to<std::size_t>;
    { model.initial_state() } -> std::same_as<typename M::State>;
    { model.drift(x) } -> std::same_as<typename M::State>;
    { model.diffusion(j, x) } -> std::same_as<typename M::State>;
    { model.stratonovich_drift(x) } -> std::same_as<typename M::State>;
    { model.jacobian_product(j, j, x) } -> std::same_as<typename M::State>;
    { model.drift_flow(x, t) } -> std::same_as<typename M::State>;
    { model.diffusion_flow(j, x, t) } -> std::same_as<typename M::State>;
};

// Clark-Cameron SDE with drift: dU = S dW^1, dS = mu dt + dW^2.
struct ClarkCameronModel {
    static constexpr std::size_t kStateDim = 2;
    static constexpr std::size_t kNoiseDim = 2;
    using State = std::array<double, 2>;

    double mu = 1.0;
    double u0 = 0.0;
    double s0 = 0.0;

    State initial_state() const { return {u0, s0}; }

    State drift(const State&) const { return {0.0, mu}; }

    State diffusion(std::size_t j, const State& x) const {
        return j == 0 ? State{x[1], 0.0} : State{0.0, 1.0};
    }

    // Only d(sigma_1)/ds is non-zero, so d(sigma_1) sigma_2 = (1, 0) is the sole non-zero product.
    State jacobian_product(std::size_t j, std::size_t m, const State&) const {
        return (j == 0 && m == 1) ? State{1.0, 0.0} : State{0.0, 0.0};
    }

    State stratonovich_drift(const State&) const { return {0.0, mu}; }

    State drift_flow(const State& x, double t) const { return {x[0], x[1] + mu * t}; }

    State diffusion_flow(std::size_t j, const State& x, double w) const {
        return j == 0 ? State{x[0] + x[1] * w, x[1]} : State{x[0], x[1] + w};
    }
};

enum class NegativeVariancePolicy { Error, Reflect };

struct HestonParams {
    double r = 0.05;
    double kappa = 0.5;
    double theta = 0.9;
    double sigma = 0.05;
    double u0 = 0.0;  // log of the initial asset price
    double v0 = 1.0;
    NegativeVariancePolicy negative_variance = NegativeVariancePolicy::Error;
};

// Uncorrelated Heston model in (log-price, variance) coordinates:
//   dU = (r - V/2) dt + sqrt(V) dW^1,  dV = kappa (theta - V) dt + sigma sqrt(V) dW^2.
// The Stratonovich drift of V is kappa (xi - V) with xi = theta - sigma^2 / (4 kappa).
class HestonModel {
public:
    static constexpr std::size_t kStateDim = 2;
    static constexpr std::size_t kNoiseDim = 2;
    using State = std::array<double, 2>;

    // Throws ConfigError unless kappa, theta, v0 > 0, sigma >= 0 and 2 kappa theta >= sigma^2.
    explicit HestonModel(const HestonParams& params = {});

    const HestonParams& params() const noexcept { return params_; }
    double r() const noexcept { return params_.r; }
    double kappa() const noexcept { return params_.kappa; }
    double theta() const noexcept { return params_.theta; }
    double sigma() const noexcept { return params_.sigma; }
    double xi() const noexcept { return xi_; }

    State initial_state() const { return {params_.u0, params_.v0}; }

    State drift(const State& x) const {
        return {params_.r - 0.5 * x[1], params_.kappa * (params_.theta - x[1])};
    }

    State diffusion(std::size_t j, const State& x) const {
        const double root = sqrt_variance(x[1]);
        return j == 0 ? State{root, 0.0} : State{0.0, params_.sigma * root};
    }

    // The sqrt(v) factors cancel: d(sigma_1) sigma_2 = (sigma/2, 0), d(sigma_2) sigma_2 = (0, sigma^2/2).
    State jacobian_product(std::size_t j, std::size_t m, const State&) const {
        if (j == 0 && m == 1) return {0.5 * params_.sigma, 0.0};
        if (j == 1 && m == 1) return {0.0, 0.5 * params_.sigma * params_.sigma};
        return {0.0, 0.0};
    }

    State stratonovich_drift(const State& x) const {
        return {params_.r - 0.5 * x[1],
                params_.kappa * (params_.theta - x[1]) - 0.25 * params_.sigma * params_.sigma};
    }

    // Exact flow of the Stratonovich drift over time t:
    //   v(t) = (v - xi) e^{-kappa t} + xi
    //   u(t) = u + (r - xi/2) t + (v - xi)(e^{-kappa t} - 1) / (2 kappa)
    State drift_flow(const State& x, double t) const {
        const double decay = std::exp(-params_.kappa * t);
        const double excess = x[1] - xi_;
        return {x[0] + (params_.r - 0.5 * xi_) * t + excess * (decay - 1.0) / (2.0 * params_.kappa),
                excess * decay + xi_};
    }

    State diffusion_flow(std::size_t j, const State& x, double w) const {
        const double root = sqrt_variance(x[1]);
        if (j == 0) return {x[0] + root * w, x[1]};
        // (sqrt(v) + sigma w / 2)^2 expanded so that w = 0 returns v exactly.
        const double half = 0.5 * params_.sigma * w;
        return {x[0], std::max(0.0, x[1] + 2.0 * root * half + half * half)};
    }

    double sqrt_variance(double v) const {
        if (v >= 0.0) return std::sqrt(v);
        if (params_.negative_variance == NegativeVariancePolicy::Reflect) return 0.0;
        throw NegativeSqrtArgument(v);
    }

private:
    HestonParams params_;
    double xi_;
};

static_assert(SdeModel<ClarkCameronModel>);
static_assert(SdeModel<HestonModel>);

// Generic identity sigma_0 = b - 1/2 sum_j d(sigma_j) sigma_j, computed from drift and Jacobian
// products. Models provide a closed form; this is the reference it must agree with.
template <SdeModel M>
typename M::State stratonovich_correction(const M& model, const typename M::State& x) {
    auto out = model.drift(x);
    for (std::size_t j = 0; j < M::kNoiseDim; ++j) {
        const auto jp = model.jacobian_product(j, j, x);
        for (std::size_t i = 0; i < M::kStateDim; ++i) out[i] -= 0.5 * jp[i];
    }
    return out;
}

enum class PayoffKind { CosU, USquared, UPlus, HestonCall };

// Payoffs that depend on the terminal state only; the first coordinate is u.
struct Payoff {
    PayoffKind kind = PayoffKind::CosU;
    double discount = 1.0;  // exp(-rT) for the Heston call
    double strike = 1.0;

    static Payoff cos_u() { return {PayoffKind::CosU}; }
    static Payoff u_squared() { return {PayoffKind::USquared}; }
    static Payoff u_plus() { return {PayoffKind::UPlus}; }
    static Payoff heston_call(double rate, double maturity, double strike = 1.0) {
        return {PayoffKind::HestonCall, std::exp(-rate * maturity), strike};
    }

    template <std::size_t N>
    double operator()(const std::array<double, N>& x) const {
        return evaluate(x[0]);
    }

    double evaluate(double u) const {
        switch (kind) {
            case PayoffKind::CosU: return std::cos(u);
            case PayoffKind::USquared: return u * u;
            case PayoffKind::UPlus: return u > 0.0 ? u : 0.0;
            case PayoffKind::HestonCall: {
                const double intrinsic = std::exp(u) - strike;
                return intrinsic > 0.0 ? discount * intrinsic : 0.0;
            }
        }
        return 0.0;
    }

    std::string label() const;
};

PayoffKind parse_payoff_kind(std::string_view name);
std::string to_string(PayoffKind kind);

using AnyModel = std::variant<ClarkCameronModel, HestonModel>;

std::string model_name(const AnyModel& model);
std::size_t state_dim(const AnyModel& model);
std::size_t noise_dim(const AnyModel& model);

// Runtime-sized entry points used by the bindings. They validate the state
// (dimension and finiteness) and throw DimensionMismatch / ConfigError.
std::vector<double> drift(const AnyModel& model, std::span<const double> x);
std::vector<double> diffusion(const AnyModel& model, std::size_t j, std::span<const double> x);
std::vector<double> stratonovich_drift(const AnyModel& model, std::span<const double> x);
std::vector<double> jacobian_product(const AnyModel& model, std::size_t j, std::size_t m,
                                     std::span<const double> x);
std::vector<double> drift_flow(const AnyModel& model, std::span<const double> x, double t);
std::vector<double> diffusion_flow(const AnyModel& model, std::size_t j, std::span<const double> x,
                                   double w);

}  // namespace mlsde
