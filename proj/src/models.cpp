#include "mlsde/models.hpp"

#include <algorithm>
#include <sstream>

namespace mlsde {

HestonModel::HestonModel(const HestonParams& params) : params_(params) {
    if (!(params.kappa > 0.0)) throw ConfigError("heston: kappa must be positive");
    if (!(params.theta > 0.0)) throw ConfigError("heston: theta must be positive");
    if (!(params.sigma >= 0.0)) throw ConfigError("heston: sigma must be non-negative");
    if (!(params.v0 > 0.0)) throw ConfigError("heston: v0 must be positive");
    if (2.0 * params.kappa * params.theta < params.sigma * params.sigma) {
        throw ConfigError("heston: 2 kappa theta >= sigma^2 is required");
    }
    xi_ = params.theta - params.sigma * params.sigma / (4.0 * params.kappa);
    if (xi_ < 0.0) throw ConfigError("heston: xi = theta - sigma^2/(4 kappa) must be non-negative");
}

std::string Payoff::label() const {
    if (kind != PayoffKind::HestonCall) return to_string(kind);
    std::ostringstream out;
    out << "heston-call(discount=" << discount << ",strike=" << strike << ")";
    return out.str();
}

PayoffKind parse_payoff_kind(std::string_view name) {
    if (name == "cos-u") return PayoffKind::CosU;
    if (name == "u-squared") return PayoffKind::USquared;
    if (name == "u-plus") return PayoffKind::UPlus;
    if (name == "heston-call") return PayoffKind::HestonCall;
    throw ConfigError("unknown payoff '" + std::string(name) + "'");
}

std::string to_string(PayoffKind kind) {
    switch (kind) {
        case PayoffKind::CosU: return "cos-u";
        case PayoffKind::USquared: return "u-squared";
        case PayoffKind::UPlus: return "u-plus";
        case PayoffKind::HestonCall: return "heston-call";
    }
    return "unknown";
}

std::string model_name(const AnyModel& model) {
    return std::holds_alternative<ClarkCameronModel>(model) ? "clark-cameron" : "heston";
}

std::size_t state_dim(const AnyModel& model) {
    return std::visit([](const auto& m) { return std::decay_t<decltype(m)>::kStateDim; }, model);
}

std::size_t noise_dim(const AnyModel& model) {
    return std::visit([](const auto& m) { return std::decay_t<decltype(m)>::kNoiseDim; }, model);
}

namespace {

template <class M>
typename M::State to_state(std::span<const double> x) {
    typename M::State out{};
    if (x.size() != out.size()) {
        throw DimensionMismatch("state has " + std::to_string(x.size()) + " coordinates, model needs " +
                                std::to_string(out.size()));
    }
    if (!std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); })) {
        throw ConfigError("state coordinates must be finite");
    }
    std::copy(x.begin(), x.end(), out.begin());
    return out;
}

template <class M>
void check_noise_index(std::size_t j) {
    if (j >= M::kNoiseDim) {
        throw DimensionMismatch("Brownian index " + std::to_string(j) + " out of range");
    }
}

template <class Fn>
std::vector<double> apply(const AnyModel& model, std::span<const double> x, Fn&& fn) {
    return std::visit(
        [&](const auto& m) {
            using M = std::decay_t<decltype(m)>;
            const auto out = fn(m, to_state<M>(x));
            return std::vector<double>(out.begin(), out.end());
        },
        model);
}

}  // namespace

std::vector<double> drift(const AnyModel& model, std::span<const double> x) {
    return apply(model, x, [](const auto& m, const auto& s) { return m.drift(s); });
}

std::vector<double> diffusion(const AnyModel& model, std::size_t j, std::span<const double> x) {
    return apply(model, x, [j](const auto& m, const auto& s) {
        check_noise_index<std::decay_t<decltype(m)>>(j);
        return m.diffusion(j, s);
    });
}

std::vector<double> stratonovich_drift(const AnyModel& model, std::span<const double> x) {
    return apply(model, x, [](const auto& m, const auto& s) { return m.stratonovich_drift(s); });
}

std::vector<double> jacobian_product(const AnyModel& model, std::size_t j, std::size_t m_index,
                                     std::span<const double> x) {
    return apply(model, x, [j, m_index](const auto& m, const auto& s) {
        check_noise_index<std::decay_t<decltype(m)>>(j);
        check_noise_index<std::decay_t<decltype(m)>>(m_index);
        return m.jacobian_product(j, m_index, s);
    });
}

std::vector<double> drift_flow(const AnyModel& model, std::span<const double> x, double t) {
    return apply(model, x, [t](const auto& m, const auto& s) { return m.drift_flow(s, t); });
}

std::vector<double> diffusion_flow(const AnyModel& model, std::size_t j, std::span<const double> x,
                                   double w) {
    return apply(model, x, [j, w](const auto& m, const auto& s) {
        check_noise_index<std::decay_t<decltype(m)>>(j);
        return m.diffusion_flow(j, s, w);
    });
}

}  // namespace mlsde
