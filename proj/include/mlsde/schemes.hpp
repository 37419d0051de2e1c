#pragma once

// Ninomiya-Victoir (NV) and Giles-Szpruch (GS) discretisations and the coupled
// level samples Z^l built from them.
//
// Level sample couplings, with f the payoff and h_l = T / 2^l:
//   GS     : 1/2 [f(GS fine) + f(GS antithetic fine)] - f(GS coarse)
//   NV     : 1/4 [f(NV fine, +-eta) + f(NV antithetic fine, +-eta)]
//            - 1/2 [f(NV coarse, +-eta_coarse)]
//   GS-NV  : the NV fine average above minus f(GS coarse); used at the last level only
// Level 0 uses a single one-step scheme (GS or NV) or the NV average over +-eta.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "mlsde/errors.hpp"
#include "mlsde/models.hpp"
#include "mlsde/paths.hpp"

namespace mlsde {

enum class SchemeKind { NV, GS };

enum class LevelCoupling { Gs, Nv, GsNv, Level0Gs, Level0NvSingle, Level0NvAveraged };

std::string to_string(SchemeKind kind);
std::string to_string(LevelCoupling coupling);

struct LevelSample {
    double value = 0.0;
    double fine_term = 0.0;
    double coarse_term = 0.0;
    int level = 0;
    LevelCoupling coupling = LevelCoupling::Level0Gs;
    int fine_evals = 0;
    int coarse_evals = 0;

    // One scheme step on either grid counts as one unit.
    double cost_units() const {
        const double fine_steps = std::ldexp(1.0, level);
        return fine_evals * fine_steps + coarse_evals * (level > 0 ? 0.5 * fine_steps : 0.0);
    }
};

// Number of fine and coarse paths each coupling simulates.
struct EvalCounts {
    int fine = 0;
    int coarse = 0;
};
EvalCounts eval_counts(LevelCoupling coupling);

namespace detail {

template <SdeModel M>
std::array<double, M::kNoiseDim> to_noise(std::span<const double> dw) {
    if (dw.size() != M::kNoiseDim) throw DimensionMismatch("increment has wrong Brownian dimension");
    std::array<double, M::kNoiseDim> out{};
    for (std::size_t j = 0; j < M::kNoiseDim; ++j) out[j] = dw[j];
    return out;
}

template <SdeModel M>
double squared_distance(const typename M::State& a, const typename M::State& b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < M::kStateDim; ++i) sum += (a[i] - b[i]) * (a[i] - b[i]);
    return sum;
}

}  // namespace detail

// One NV step. eta = +1 applies the diffusion flows in order 1..d, eta = -1 in order d..1,
// each sandwiched between half-step flows of the Stratonovich drift.
template <SdeModel M>
typename M::State nv_step(const M& model, typename M::State x, double h, std::span<const double> dw, int eta) {
    const auto w = detail::to_noise<M>(dw);
    x = model.drift_flow(x, 0.5 * h);
    if (eta > 0) {
        for (std::size_t j = 0; j < M::kNoiseDim; ++j) x = model.diffusion_flow(j, x, w[j]);
    } else {
        for (std::size_t j = M::kNoiseDim; j-- > 0;) x = model.diffusion_flow(j, x, w[j]);
    }
    return model.drift_flow(x, 0.5 * h);
}

// One Milstein step with the Levy areas dropped.
template <SdeModel M>
typename M::State gs_step(const M& model, const typename M::State& x, double h, std::span<const double> dw) {
    constexpr std::size_t n = M::kStateDim;
    constexpr std::size_t d = M::kNoiseDim;
    const auto w = detail::to_noise<M>(dw);

    auto out = x;
    const auto b = model.drift(x);
    for (std::size_t i = 0; i < n; ++i) out[i] += b[i] * h;
    for (std::size_t j = 0; j < d; ++j) {
        const auto col = model.diffusion(j, x);
        for (std::size_t i = 0; i < n; ++i) out[i] += col[i] * w[j];
    }
    for (std::size_t j = 0; j < d; ++j) {
        for (std::size_t m = 0; m < d; ++m) {
            const double weight = 0.5 * (w[j] * w[m] - (j == m ? h : 0.0));
            if (weight == 0.0) continue;
            const auto jp = model.jacobian_product(j, m, x);
            for (std::size_t i = 0; i < n; ++i) out[i] += jp[i] * weight;
        }
    }
    return out;
}

// Terminal state after inc.steps() steps of size T / inc.steps(). GS ignores eta;
// flip_eta runs NV with the elementwise-negated sign sequence.
template <SdeModel M>
typename M::State simulate_path(SchemeKind kind, const M& model, double horizon, const FineIncrements& inc,
                                const RademacherSeq& eta, bool flip_eta = false) {
    if (inc.dims() != M::kNoiseDim) throw DimensionMismatch("increments have wrong Brownian dimension");
    if (kind == SchemeKind::NV && eta.size() != inc.steps()) {
        throw DimensionMismatch("sign sequence length differs from step count");
    }
    const double h = horizon / static_cast<double>(inc.steps());
    auto x = model.initial_state();
    for (std::size_t k = 0; k < inc.steps(); ++k) {
        if (kind == SchemeKind::GS) {
            x = gs_step(model, x, h, inc.step(k));
        } else {
            const int sign = flip_eta ? -eta[k] : eta[k];
            x = nv_step(model, x, h, inc.step(k), sign);
        }
    }
    return x;
}

template <SdeModel M>
typename M::State simulate_path(SchemeKind kind, const M& model, const LevelGrid& grid, const FineIncrements& inc,
                                const RademacherSeq& eta, bool flip_eta = false) {
    if (inc.steps() != grid.steps()) throw DimensionMismatch("increments do not match the grid");
    return simulate_path(kind, model, grid.horizon, inc, eta, flip_eta);
}

namespace detail {

inline void require_fine_level(const LevelPath& path) {
    if (path.grid.level < 1) throw ConfigError("coupled level samples need level >= 1");
    if (path.increments.steps() != path.grid.steps() || path.eta.size() != path.grid.steps()) {
        throw DimensionMismatch("level path does not match its grid");
    }
}

// 1/4 sum of f over the NV fine paths with (inc, swap(inc)) x (eta, -eta).
template <SdeModel M, class F>
double nv_fine_average(const M& model, const F& payoff, const LevelPath& path, const FineIncrements& swapped) {
    const double T = path.grid.horizon;
    return 0.25 * (payoff(simulate_path(SchemeKind::NV, model, T, swapped, path.eta)) +
                   payoff(simulate_path(SchemeKind::NV, model, T, swapped, path.eta, true)) +
                   payoff(simulate_path(SchemeKind::NV, model, T, path.increments, path.eta)) +
                   payoff(simulate_path(SchemeKind::NV, model, T, path.increments, path.eta, true)));
}

inline LevelSample make_sample(LevelCoupling coupling, int level, double fine, double coarse) {
    const auto counts = eval_counts(coupling);
    return {fine - coarse, fine, coarse, level, coupling, counts.fine, counts.coarse};
}

}  // namespace detail

template <SdeModel M, class F>
LevelSample level_sample_gs(const M& model, const F& payoff, const LevelPath& path) {
    detail::require_fine_level(path);
    const double T = path.grid.horizon;
    const auto swapped = antithetic_swap(path.increments);
    const auto coarse = coarsen(path.increments);
    const double fine = 0.5 * (payoff(simulate_path(SchemeKind::GS, model, T, path.increments, path.eta)) +
                               payoff(simulate_path(SchemeKind::GS, model, T, swapped, path.eta)));
    const double coarse_value = payoff(simulate_path(SchemeKind::GS, model, T, coarse, path.eta));
    return detail::make_sample(LevelCoupling::Gs, path.grid.level, fine, coarse_value);
}

template <SdeModel M, class F>
LevelSample level_sample_nv(const M& model, const F& payoff, const LevelPath& path) {
    detail::require_fine_level(path);
    const double T = path.grid.horizon;
    const auto swapped = antithetic_swap(path.increments);
    const auto coarse = coarsen(path.increments);
    const auto coarse_eta = rademacher_coarse(path.eta);
    const double fine = detail::nv_fine_average(model, payoff, path, swapped);
    const double coarse_value = 0.5 * (payoff(simulate_path(SchemeKind::NV, model, T, coarse, coarse_eta)) +
                                       payoff(simulate_path(SchemeKind::NV, model, T, coarse, coarse_eta, true)));
    return detail::make_sample(LevelCoupling::Nv, path.grid.level, fine, coarse_value);
}

template <SdeModel M, class F>
LevelSample level_sample_gsnv(const M& model, const F& payoff, const LevelPath& path) {
    detail::require_fine_level(path);
    const double T = path.grid.horizon;
    const auto swapped = antithetic_swap(path.increments);
    const auto coarse = coarsen(path.increments);
    const double fine = detail::nv_fine_average(model, payoff, path, swapped);
    const double coarse_value = payoff(simulate_path(SchemeKind::GS, model, T, coarse, path.eta));
    return detail::make_sample(LevelCoupling::GsNv, path.grid.level, fine, coarse_value);
}

template <SdeModel M, class F>
LevelSample level0_sample(LevelCoupling coupling, const M& model, const F& payoff, const LevelPath& path) {
    if (path.grid.steps() != 1 || path.increments.steps() != 1 || path.eta.size() != 1) {
        throw ConfigError("level-0 samples need a one-step grid");
    }
    const double T = path.grid.horizon;
    double value = 0.0;
    switch (coupling) {
        case LevelCoupling::Level0Gs:
            value = payoff(simulate_path(SchemeKind::GS, model, T, path.increments, path.eta));
            break;
        case LevelCoupling::Level0NvSingle:
            value = payoff(simulate_path(SchemeKind::NV, model, T, path.increments, path.eta));
            break;
        case LevelCoupling::Level0NvAveraged:
            value = 0.5 * (payoff(simulate_path(SchemeKind::NV, model, T, path.increments, path.eta)) +
                           payoff(simulate_path(SchemeKind::NV, model, T, path.increments, path.eta, true)));
            break;
        default:
            throw ConfigError("coupling " + to_string(coupling) + " is not a level-0 coupling");
    }
    return detail::make_sample(coupling, 0, value, 0.0);
}

template <SdeModel M, class F>
LevelSample level_sample(LevelCoupling coupling, const M& model, const F& payoff, const LevelPath& path) {
    switch (coupling) {
        case LevelCoupling::Gs: return level_sample_gs(model, payoff, path);
        case LevelCoupling::Nv: return level_sample_nv(model, payoff, path);
        case LevelCoupling::GsNv: return level_sample_gsnv(model, payoff, path);
        default: return level0_sample(coupling, model, payoff, path);
    }
}

// ||X^{NV, fine, eta}_T - X^{NV, coarse, eta_coarse}_T||^2 on one coupled path.
template <SdeModel M>
double nv_strong_difference(const M& model, const LevelPath& path) {
    detail::require_fine_level(path);
    const double T = path.grid.horizon;
    const auto fine = simulate_path(SchemeKind::NV, model, T, path.increments, path.eta);
    const auto coarse = simulate_path(SchemeKind::NV, model, T, coarsen(path.increments), rademacher_coarse(path.eta));
    return detail::squared_distance<M>(fine, coarse);
}

// ||1/2 (X^{NV, eta}_T + X^{NV, -eta}_T) - X^{GS}_T||^2 on the same fine increments.
template <SdeModel M>
double nv_gs_coupling_difference(const M& model, const LevelPath& path) {
    const double T = path.grid.horizon;
    const auto plus = simulate_path(SchemeKind::NV, model, T, path.increments, path.eta);
    const auto minus = simulate_path(SchemeKind::NV, model, T, path.increments, path.eta, true);
    auto averaged = plus;
    for (std::size_t i = 0; i < M::kStateDim; ++i) averaged[i] = 0.5 * (plus[i] + minus[i]);
    const auto gs = simulate_path(SchemeKind::GS, model, T, path.increments, path.eta);
    return detail::squared_distance<M>(averaged, gs);
}

}  // namespace mlsde
