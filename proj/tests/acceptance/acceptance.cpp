// Acceptance checks. Prints one PASS/FAIL line per criterion and exits non-zero if any
// selected criterion fails.
//
//   mlsde_acceptance [--criterion N]... [--workers N]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "mlsde/calibrate.hpp"
#include "mlsde/estimators.hpp"
#include "mlsde/experiments.hpp"
#include "mlsde/oracle.hpp"
#include "mlsde/sampling.hpp"
#include "mlsde/schemes.hpp"

using namespace mlsde;

namespace {

constexpr std::uint64_t kSeed = 20240611;
int g_workers = 1;

StreamBase stream(std::uint64_t criterion, std::uint64_t offset = 0) {
    return StreamBase{kSeed, 1000000 * criterion + offset};
}

struct Outcome {
    bool pass = true;
    std::string detail;
};

void note(const char* fmt, auto... args) {
    std::printf("    ");
    std::printf(fmt, args...);
    std::printf("\n");
}

std::vector<int> range(int a, int b) {
    std::vector<int> out;
    for (int l = a; l <= b; ++l) out.push_back(l);
    return out;
}

ModelConfig clark_cameron(PayoffKind payoff) {
    ModelConfig c;
    c.payoff = payoff;
    return c;
}

ModelConfig heston() {
    ModelConfig c;
    c.model = "heston";
    c.payoff = PayoffKind::HestonCall;
    return c;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

Outcome strong_slope(bool coupling, double tolerance, int criterion) {
    const auto levels = range(2, 7);
    const auto r = strong_order(ClarkCameronModel{1.0}, 1.0, levels, 100000, stream(criterion), g_workers);
    for (const auto& row : r.rows) note("l=%d  nv=%.6e  nv-gs=%.6e", row.level, row.nv_error, row.coupling_error);
    const SlopeFit fit = coupling ? r.coupling : r.nv;
    const double target = coupling ? -2.0 : -1.0;
    return {fit.valid && std::abs(fit.slope - target) <= tolerance,
            fmt("slope %.4f, target %.0f +- %.2f", fit.slope, target, tolerance)};
}

Outcome criterion1() { return strong_slope(false, 0.15, 1); }
Outcome criterion2() { return strong_slope(true, 0.2, 2); }

Outcome criterion3() {
    const auto levels = range(1, 6);
    const double mus[] = {1.0};
    const auto r = oracle_check(levels, mus, 1.0, 1000000, stream(3), g_workers, 4.0);
    double worst_published = 0.0, worst_exact = 0.0;
    for (const auto& row : r.rows) {
        note("l=%d  mc=%.8f +- %.2e  published=%.8f (z=%+.2f)  exact=%.8f (z=%+.2f)", row.level, row.estimate, row.sem,
             row.published, row.z_published, row.exact, row.z_exact);
        worst_published = std::max(worst_published, std::abs(row.z_published));
        worst_exact = std::max(worst_exact, std::abs(row.z_exact));
    }
    note("published closed form at l=1: %.8f", znv_second_moment(1, 1.0, 1.0).value);
    note("against the exact expectation: max |z| = %.2f -> %s", worst_exact, r.pass_exact ? "agrees" : "disagrees");
    return {r.pass_published, fmt("max |z| against the published closed form %.2f (limit 4)", worst_published)};
}

Outcome criterion4() {
    const auto sampler = make_sampler(clark_cameron(PayoffKind::CosU));
    const LevelCoupling couplings[] = {LevelCoupling::GsNv, LevelCoupling::Nv};
    const auto levels = range(2, 6);
    const auto r = variance_decay(sampler, couplings, levels, 100000, stream(4), g_workers);
    for (const auto& row : r.rows) {
        note("%-6s l=%d  E[Z^2]=%.6e +- %.1e", to_string(row.coupling).c_str(), row.level, row.second_moment, row.sem);
    }
    const double gsnv = r.slopes.at(LevelCoupling::GsNv).slope;
    const double nv = r.slopes.at(LevelCoupling::Nv).slope;
    return {std::abs(gsnv + 2.0) <= 0.25 && std::abs(nv + 2.0) <= 0.25,
            fmt("slopes gs-nv %.4f, nv %.4f, target -2 +- 0.25", gsnv, nv)};
}

Outcome criterion5() {
    const auto sampler = make_sampler(clark_cameron(PayoffKind::UPlus));
    const auto levels = range(1, 4);
    const auto stats = pilot_stats([&](int l) { return sampler.level_fn(LevelCoupling::Nv, l); }, levels, 100000,
                                   stream(5), g_workers);
    for (const auto& s : stats) note("l=%d  mean=%+.6e  var=%.6e", s.level, s.mean, s.variance);
    const RateFit weak = fit_weak_rate(stats);
    const RateFit var = fit_variance_rate(stats);
    return {weak.order == 1.5 && var.order == 1.5,
            fmt("alpha %.1f (raw %.3f), beta %.1f", weak.order, -weak.raw_slope, var.order) +
                fmt(" (raw %.3f), target 1.5 / 1.5", -var.raw_slope)};
}

Outcome criterion6() {
    const double truth = cc_exact_usq_mean(1.0, 1.0).value;
    CalibrationOptions options;
    options.base = stream(6, 0);
    options.workers = g_workers;
    Planner planner(make_sampler(clark_cameron(PayoffKind::USquared)), Coupling::GsNv, options);
    const auto& cal = planner.calibration();
    note("calibrated alpha=%.1f c1=%.4e beta=%.1f c2=%.4e", cal.weak.order, cal.weak.constant, cal.variance.order,
         cal.variance.constant);
    bool pass = true;
    std::string detail;
    for (int k = 4; k <= 6; ++k) {
        const double eps = std::exp2(-k);
        const MultilevelPlan plan = planner.plan(EstimatorKind::Mlmc, eps);
        double sq = 0.0;
        int within = 0;
        for (std::uint64_t run = 0; run < 100; ++run) {
            const double y = run_multilevel(plan, planner.sampler(), stream(6, 1000 * k + run + 1), g_workers).estimate;
            sq += (y - truth) * (y - truth);
            within += std::abs(y - truth) <= 2.0 * eps;
        }
        const double rmse = std::sqrt(sq / 100.0);
        note("eps=2^-%d  L=%d  rmse=%.4e  rmse/eps=%.3f  |Y-5/6|<=2eps in %d/100", k, plan.last_level, rmse,
             rmse / eps, within);
        pass = pass && rmse <= 1.5 * eps;
        detail += fmt("rmse/eps(2^-%.0f)=%.3f ", k, rmse / eps);
    }
    return {pass, detail + "(limit 1.5)"};
}

Outcome criterion7() {
    std::vector<double> eps;
    for (int k = 4; k <= 8; ++k) eps.push_back(std::exp2(-k));
    const EstimatorKind kinds[] = {EstimatorKind::Mlmc};
    bool pass = true;
    std::string detail;
    int index = 0;
    for (const Coupling coupling : {Coupling::Gs, Coupling::GsNv}) {
        CalibrationOptions options;
        options.base = stream(7, 10 * index);
        options.workers = g_workers;
        Planner planner(make_sampler(clark_cameron(PayoffKind::CosU)), coupling, options);
        const auto rows = run_sweep(planner, kinds, eps, stream(7, 1000 * (index + 1)), g_workers, true);
        std::vector<double> x, y, z;
        for (const auto& row : rows) {
            double sum = 0.0;
            for (int l = 0; l <= row.plan.last_level; ++l) {
                sum += std::sqrt(row.plan.lambda[l] * std::ldexp(1.0, l) * row.plan.variances[l]);
            }
            note("%-5s eps=%.3e  L=%d  cost=%.4e  evals=%.4e  sum_l sqrt(lambda_l 2^l V_l)=%.4f  estimate=%.6f",
                 to_string(coupling).c_str(), row.epsilon, row.plan.last_level, row.plan.cost_units(),
                 row.result->eval_units, sum, row.result->estimate);
            x.push_back(std::log2(row.epsilon));
            y.push_back(std::log2(row.plan.cost_units()));
            z.push_back(std::log2(row.result->eval_units));
        }
        auto slope = [&x](const std::vector<double>& v) {
            double mx = 0, my = 0;
            for (std::size_t i = 0; i < x.size(); ++i) mx += x[i] / x.size(), my += v[i] / x.size();
            double sxx = 0, sxy = 0;
            for (std::size_t i = 0; i < x.size(); ++i) sxx += (x[i] - mx) * (x[i] - mx), sxy += (x[i] - mx) * (v[i] - my);
            return sxy / sxx;
        };
        const double s = slope(y);
        note("%-5s cost slope %.4f (simulated steps %.4f)", to_string(coupling).c_str(), s, slope(z));
        pass = pass && std::abs(s + 2.0) <= 0.3;
        detail += to_string(coupling) + fmt(" %.4f ", s);
        ++index;
    }
    return {pass, "cost slopes " + detail + "(target -2 +- 0.3)"};
}

Outcome criterion8() {
    double worst = 0.0;
    for (int L = 1; L <= 6; ++L) {
        for (double alpha : {0.5, 1.0, 1.5, 2.0}) {
            const auto w = ml2r_weights(L, alpha);
            double sum = 0.0;
            for (double v : w.w) sum += v;
            worst = std::max(worst, std::abs(sum - 1.0));
        }
    }
    const auto spot = ml2r_weights(1, 1.0);
    note("L=1 alpha=1: w = (%.15f, %.15f)", spot.w[0], spot.w[1]);
    const bool spot_ok = std::abs(spot.w[0] + 1.0) <= 1e-12 && std::abs(spot.w[1] - 2.0) <= 1e-12;
    return {worst <= 1e-12 && spot_ok, fmt("max |sum w - 1| = %.2e, spot case ", worst) + (spot_ok ? "ok" : "wrong")};
}

Outcome criterion9() {
    const HestonModel model{HestonParams{}};
    const bool xi_ok = std::abs(model.xi() - 0.89875) <= 1e-15;
    note("xi = %.17g", model.xi());

    const auto sampler = make_sampler(heston());
    const LevelStats gs = crude_mc(sampler, SchemeKind::GS, 5, 1000000, stream(9, 0), g_workers);
    note("GS level 5: %llu paths, %llu aborted, price %.6f", static_cast<unsigned long long>(gs.samples + gs.aborted),
         static_cast<unsigned long long>(gs.aborted), gs.mean);

    const auto levels = range(1, 4);
    const auto stats = pilot_stats([&](int l) { return sampler.level_fn(LevelCoupling::Nv, l); }, levels, 10000,
                                   stream(9, 1), g_workers);
    for (const auto& s : stats) note("NV pilot l=%d  mean=%+.4e  var=%.4e", s.level, s.mean, s.variance);
    const RateFit weak = fit_weak_rate(stats);
    note("NV pilot alpha=%.1f (raw %.3f) c1=%.3e", weak.order, -weak.raw_slope, weak.constant);
    return {xi_ok && gs.aborted == 0 && weak.order == 2.0,
            fmt("xi %.5f, GS aborts %.0f, NV alpha %.1f", model.xi(), static_cast<double>(gs.aborted), weak.order)};
}

template <class Model>
bool antithetic_unbiased(const Model& model, SchemeKind kind, std::uint64_t offset) {
    const LevelGrid g{2, 1.0};
    const Payoff f = Payoff::cos_u();
    auto mean_se = [&](bool averaged, std::uint64_t exp) {
        const DrawFn draw = [&](const RngStream& rng) {
            const auto p = sample_level_path(rng, g, Model::kNoiseDim);
            const double plain = f(simulate_path(kind, model, g, p.increments, p.eta));
            if (!averaged) return Draw{plain, 0.0};
            const auto swapped = antithetic_swap(p.increments);
            return Draw{0.5 * (plain + f(simulate_path(kind, model, g, swapped, p.eta))), 0.0};
        };
        const auto acc = accumulate(draw, stream(10, exp), 2, 100000, g_workers);
        return std::pair{acc.moments.mean, std::sqrt(acc.moments.variance() / 1e5)};
    };
    const auto [a, sa] = mean_se(true, offset);
    const auto [b, sb] = mean_se(false, offset + 1);
    const bool ok = std::abs(a - b) <= 3.0 * std::hypot(sa, sb);
    note("antithetic %s/%s: %.6f vs %.6f (%.2f SE)", offset < 10 ? "clark-cameron" : "heston", to_string(kind).c_str(),
         a, b, std::abs(a - b) / std::hypot(sa, sb));
    return ok;
}

template <class Model>
bool coarse_invariance(const Model& model, const Payoff& f) {
    for (std::uint64_t k = 0; k < 1000; ++k) {
        for (int l : {1, 2, 3, 5}) {
            auto p = sample_level_path(stream(10, 50).stream(l, k), LevelGrid{l, 1.0}, Model::kNoiseDim);
            auto q = p;
            q.increments = antithetic_swap(p.increments);
            for (auto c : {LevelCoupling::Gs, LevelCoupling::Nv, LevelCoupling::GsNv}) {
                if (level_sample(c, model, f, p).coarse_term != level_sample(c, model, f, q).coarse_term) return false;
            }
        }
    }
    return true;
}

template <class Model>
bool stratonovich_identity(const Model& model, std::function<typename Model::State(std::mt19937_64&)> state) {
    std::mt19937_64 gen(kSeed);
    for (int i = 0; i < 200; ++i) {
        const auto x = state(gen);
        const auto s = model.stratonovich_drift(x);
        const auto b = model.drift(x);
        for (std::size_t c = 0; c < Model::kStateDim; ++c) {
            double v = s[c];
            for (std::size_t j = 0; j < Model::kNoiseDim; ++j) v += 0.5 * model.jacobian_product(j, j, x)[c];
            if (std::abs(v - b[c]) > 1e-12 * std::max(1.0, std::abs(b[c]))) return false;
        }
    }
    return true;
}

Outcome criterion10() {
    const ClarkCameronModel cc{1.0};
    const HestonModel hs{HestonParams{}};
    bool anti = antithetic_unbiased(cc, SchemeKind::GS, 0) & antithetic_unbiased(cc, SchemeKind::NV, 2) &
                antithetic_unbiased(hs, SchemeKind::GS, 10) & antithetic_unbiased(hs, SchemeKind::NV, 12);

    const bool coarse = coarse_invariance(cc, Payoff::cos_u()) && coarse_invariance(hs, Payoff::heston_call(0.05, 1.0));
    note("coarse term invariant under the antithetic swap: %s", coarse ? "yes" : "no");

    const auto sampler = make_sampler(clark_cameron(PayoffKind::CosU));
    MultilevelPlan plan;
    plan.coupling = Coupling::GsNv;
    plan.last_level = 3;
    plan.samples = {20000, 9000, 5000, 3000};
    plan.weights.assign(4, 1.0);
    plan.lambda = lambda_table(Coupling::GsNv, 3);
    const double single = run_multilevel(plan, sampler, stream(10, 60), 1).estimate;
    bool deterministic = true;
    for (int w : {2, 3, 4, 8}) deterministic = deterministic && run_multilevel(plan, sampler, stream(10, 60), w).estimate == single;
    note("estimate identical for 1, 2, 3, 4 and 8 workers: %s", deterministic ? "yes" : "no");

    std::uniform_real_distribution<double> u(-3.0, 3.0), v(0.0, 4.0);
    const bool strat =
        stratonovich_identity<ClarkCameronModel>(cc, [&](auto& g) { return ClarkCameronModel::State{u(g), u(g)}; }) &&
        stratonovich_identity<HestonModel>(hs, [&](auto& g) { return HestonModel::State{u(g), v(g)}; });
    note("Stratonovich drift identity on 200 random states per model: %s", strat ? "holds" : "violated");

    const bool pass = anti && coarse && deterministic && strat;
    return {pass, std::string("antithetic ") + (anti ? "ok" : "FAIL") + ", coarse " + (coarse ? "ok" : "FAIL") +
                      ", workers " + (deterministic ? "ok" : "FAIL") + ", stratonovich " + (strat ? "ok" : "FAIL")};
}

const std::vector<std::pair<const char*, Outcome (*)()>> kCriteria = {
    {"NV strong order", criterion1},
    {"NV/GS coupling order", criterion2},
    {"second-moment oracle (published closed form)", criterion3},
    {"variance decay, smooth payoff", criterion4},
    {"rates for u_+", criterion5},
    {"end-to-end RMSE, gs-nv MLMC", criterion6},
    {"complexity slope", criterion7},
    {"ML2R weight identity", criterion8},
    {"Heston sanity", criterion9},
    {"invariant suites", criterion10},
};

}  // namespace

int main(int argc, char** argv) {
    std::set<int> selected;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--criterion" && i + 1 < argc) {
            selected.insert(std::atoi(argv[++i]));
        } else if (arg == "--workers" && i + 1 < argc) {
            g_workers = std::atoi(argv[++i]);
        } else {
            std::fprintf(stderr, "usage: %s [--criterion N]... [--workers N]\n", argv[0]);
            return 2;
        }
    }
    if (selected.empty()) {
        for (int c = 1; c <= static_cast<int>(kCriteria.size()); ++c) selected.insert(c);
    }

    int failures = 0;
    for (const int c : selected) {
        if (c < 1 || c > static_cast<int>(kCriteria.size())) {
            std::fprintf(stderr, "no criterion %d\n", c);
            return 2;
        }
        const auto& [name, fn] = kCriteria[c - 1];
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("criterion %d %s: %s  [%s; %.1fs]\n", c, o.pass ? "PASS" : "FAIL", name, o.detail.c_str(), secs);
        std::fflush(stdout);
        failures += !o.pass;
    }
    return failures == 0 ? 0 : 1;
}
