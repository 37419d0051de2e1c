// mlsde: command-line front end for the multilevel experiments.
//
// Exit codes: 0 success, 2 configuration error, 3 sampling or calibration failure,
// 4 a PASS gate failed (oracle-check).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <stdexcept>

#include "CLI11.hpp"
#include "config.hpp"
#include "mlsde/errors.hpp"

using namespace mlsde;
using namespace mlsde::cli;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitSampling = 3;
constexpr int kExitGate = 4;

std::vector<int> levels_or(const Options& o, const char* fallback) {
    return parse_levels(o.levels.empty() ? std::string(fallback) : o.levels);
}

std::uint64_t samples_or(const Options& o, std::uint64_t fallback) { return o.samples == 0 ? fallback : o.samples; }

void report(const CsvOutput& csv, const std::string& summary) {
    if (csv.to_file()) std::cout << summary << "  -> " << csv.path() << '\n';
}

CalibrationOptions calibration_options(const Options& o, std::uint64_t experiment) {
    CalibrationOptions c;
    c.levels = levels_or(o, "1..4");
    c.samples = o.pilot_m;
    c.base = stream_base(o, experiment);
    c.workers = worker_count(o);
    c.inflection_max_level = o.inflection_max_level;
    return c;
}

PlanOptions plan_options(const Options& o) {
    PlanOptions p;
    p.fixed_last_level = o.last_level;
    p.alpha = o.alpha;
    p.c1 = o.c1;
    p.beta = o.beta;
    p.c2 = o.c2;
    p.table_samples = p.last_level_samples = p.varf_samples = o.pilot_m;
    return p;
}

std::vector<EstimatorKind> estimator_kinds(const Options& o, Coupling coupling, bool both_by_default) {
    std::vector<EstimatorKind> kinds;
    for (const auto& e : o.estimators) kinds.push_back(parse_estimator(e));
    if (kinds.empty()) {
        kinds.push_back(EstimatorKind::Mlmc);
        if (both_by_default && coupling != Coupling::GsNv) kinds.push_back(EstimatorKind::Ml2r);
    }
    return kinds;
}

int cmd_strong_order(const Options& o) {
    const ModelConfig config = model_config(o);
    const auto levels = levels_or(o, "2..7");
    const auto r = strong_order(make_model(config), config.horizon, levels, samples_or(o, 100000), stream_base(o),
                                worker_count(o));
    CsvOutput csv(o, "strong-order");
    csv.row({"l", "nv_error", "log2_strong_error_nv", "coupling_error", "log2_coupling_error"});
    for (const auto& row : r.rows) {
        csv.row({num(row.level), num(row.nv_error), num(std::log2(row.nv_error)), num(row.coupling_error),
                 num(std::log2(row.coupling_error))});
    }
    csv.row({"slope", "", num(r.nv.slope), "", num(r.coupling.slope)});
    if (!r.nv.valid || !r.coupling.valid) csv.row({"warning", "slope undefined: some errors are zero", "", "", ""});
    report(csv, "strong-order: nv slope " + num(r.nv.slope) + ", coupling slope " + num(r.coupling.slope));
    return 0;
}

int cmd_variance_decay(const Options& o) {
    const LevelSampler sampler = make_sampler(model_config(o));
    const auto levels = levels_or(o, "2..6");
    const std::vector<LevelCoupling> couplings = {LevelCoupling::Gs, LevelCoupling::Nv, LevelCoupling::GsNv};
    const auto r = variance_decay(sampler, couplings, levels, samples_or(o, 100000), stream_base(o), worker_count(o));
    CsvOutput csv(o, "variance-decay");
    csv.row({"coupling", "l", "second_moment", "sem", "log2_second_moment"});
    for (const auto& row : r.rows) {
        csv.row({to_string(row.coupling), num(row.level), num(row.second_moment), num(row.sem),
                 num(std::log2(row.second_moment))});
    }
    std::string summary = "variance-decay slopes:";
    for (const auto c : couplings) {
        csv.row({to_string(c), "slope", "", "", num(r.slopes.at(c).slope)});
        summary += " " + to_string(c) + " " + num(r.slopes.at(c).slope);
    }
    report(csv, summary);
    return 0;
}

int cmd_oracle_check(const Options& o) {
    if (o.model != "clark-cameron") throw ConfigError("oracle-check runs on the clark-cameron model");
    if (o.u0 != 0.0 || o.s0 != 0.0) throw ConfigError("the closed forms assume u0 = s0 = 0");
    if (!o.payoff.empty() && o.payoff != "u-squared") throw ConfigError("oracle-check uses the u-squared payoff");
    if (o.oracle != "published" && o.oracle != "exact") throw ConfigError("oracle must be published or exact");
    const auto levels = levels_or(o, "1..6");
    if (levels.front() < 1) throw ConfigError("oracle levels start at 1");
    const double mus[] = {o.mu};
    const auto r = oracle_check(levels, mus, o.horizon, samples_or(o, 1000000), stream_base(o), worker_count(o));
    const bool pass = o.oracle == "published" ? r.pass_published : r.pass_exact;

    CsvOutput csv(o, "oracle-check");
    csv.header("published = " + to_string(Provenance::PublishedClosedForm) +
               ", exact = " + to_string(Provenance::ExactExpectation));
    csv.row({"l", "mu", "mc_estimate", "sem", "published", "z_published", "exact", "z_exact"});
    for (const auto& row : r.rows) {
        csv.row({num(row.level), num(row.mu), num(row.estimate), num(row.sem), num(row.published),
                 num(row.z_published), num(row.exact), num(row.z_exact)});
    }
    csv.row({"result", o.oracle, pass ? "PASS" : "FAIL", "", "", "", "", ""});
    report(csv, std::string("oracle-check against the ") + o.oracle + " form: " + (pass ? "PASS" : "FAIL"));
    if (!csv.to_file()) std::cerr << (pass ? "PASS" : "FAIL") << '\n';
    return pass ? 0 : kExitGate;
}

int cmd_calibrate(const Options& o) {
    const LevelSampler sampler = make_sampler(model_config(o));
    const Coupling coupling = parse_coupling(o.coupling);
    const CalibrationReport r = calibrate(sampler, coupling, calibration_options(o, 0));
    CsvOutput csv(o, "calibrate");
    csv.row({"fit", "l", "mean", "variance", "sem"});
    for (const auto& s : r.weak_stats) csv.row({"weak", num(s.level), num(s.mean), num(s.variance), num(s.sem)});
    for (const auto& s : r.variance_stats) {
        csv.row({"variance", num(s.level), num(s.mean), num(s.variance), num(s.sem)});
    }
    for (const auto& s : r.inflection_stats) {
        csv.row({"variance", num(s.level), num(s.mean), num(s.variance), num(s.sem)});
    }
    csv.row({"level0", "0", num(r.level0.mean), num(r.level0.variance), num(r.level0.sem)});
    csv.row({"alpha", num(r.weak.order), num(-r.weak.raw_slope), "", ""});
    csv.row({"c1", num(r.weak.constant), "", "", ""});
    csv.row({"beta", num(r.variance.order), num(-r.variance.raw_slope), "", ""});
    csv.row({"c2", num(r.variance.constant), "", "", ""});
    csv.row({"inflection", r.inflection ? num(*r.inflection) : "none", "", "", ""});
    report(csv, "calibrate: alpha " + num(r.weak.order) + ", c1 " + num(r.weak.constant) + ", beta " +
                    num(r.variance.order) + ", c2 " + num(r.variance.constant));
    return 0;
}

int cmd_run(const Options& o) {
    const Coupling coupling = parse_coupling(o.coupling);
    const auto eps = epsilons(o);
    const auto kinds = estimator_kinds(o, coupling, false);
    const int workers = worker_count(o);
    Planner planner(make_sampler(model_config(o)), coupling, calibration_options(o, 0), plan_options(o));

    CsvOutput csv(o, "run");
    csv.row({"record", "estimator", "coupling", "eps", "l", "samples", "weight", "lambda", "mean", "variance",
             "aborted"});
    std::vector<std::string> timings;
    for (std::size_t i = 0; i < eps.size(); ++i) {
        for (std::size_t k = 0; k < kinds.size(); ++k) {
            const MultilevelPlan plan = planner.plan(kinds[k], eps[i]);
            const EstimatorResult res =
                run_multilevel(plan, planner.sampler(), stream_base(o, 1000 + 100 * i + 10 * k), workers);
            const std::string kind = to_string(kinds[k]);
            for (int l = 0; l <= plan.last_level; ++l) {
                const auto& s = res.levels[l];
                csv.row({"level", kind, o.coupling, num(eps[i]), num(l), num(plan.samples[l]), num(plan.weights[l]),
                         num(plan.lambda[l]), num(s.mean), num(s.variance), num(s.aborted)});
            }
            csv.row({"total", kind, o.coupling, num(eps[i]), num(plan.last_level), num(plan.total_samples()), "",
                     num(plan.cost_units()), num(res.estimate), "", num(res.aborted)});
            timings.push_back(kind + " eps " + num(eps[i]) + ": " + num(res.seconds) + " s");
            report(csv, kind + " eps " + num(eps[i]) + ": estimate " + num(res.estimate) + ", L " +
                            num(plan.last_level) + ", cost " + num(plan.cost_units()));
        }
    }
    for (const auto& t : timings) csv.comment("seconds " + t);
    return 0;
}

int cmd_sweep(const Options& o) {
    const Coupling coupling = parse_coupling(o.coupling);
    const auto eps = epsilons(o);
    const auto kinds = estimator_kinds(o, coupling, true);
    Planner planner(make_sampler(model_config(o)), coupling, calibration_options(o, 0), plan_options(o));
    const auto rows = run_sweep(planner, kinds, eps, stream_base(o, 1000), worker_count(o), !o.plan_only);

    CsvOutput csv(o, "sweep");
    csv.row({"estimator", "coupling", "eps", "log2_eps", "L", "cost_units", "log2_cost", "estimate"});
    for (const auto& row : rows) {
        csv.row({to_string(row.kind), o.coupling, num(row.epsilon), num(std::log2(row.epsilon)),
                 num(row.plan.last_level), num(row.plan.cost_units()), num(std::log2(row.plan.cost_units())),
                 row.result ? num(row.result->estimate) : ""});
    }
    std::string summary = "sweep cost slopes:";
    for (const auto kind : kinds) {
        double mx = 0, my = 0, n = 0;
        for (const auto& row : rows) {
            if (row.kind != kind) continue;
            mx += std::log2(row.epsilon), my += std::log2(row.plan.cost_units()), n += 1;
        }
        mx /= n, my /= n;
        double sxx = 0, sxy = 0;
        for (const auto& row : rows) {
            if (row.kind != kind) continue;
            const double dx = std::log2(row.epsilon) - mx;
            sxx += dx * dx, sxy += dx * (std::log2(row.plan.cost_units()) - my);
        }
        const double slope = sxx > 0 ? sxy / sxx : std::nan("");
        csv.row({to_string(kind), o.coupling, "slope", "", "", "", num(slope), ""});
        summary += " " + to_string(kind) + " " + num(slope);
    }
    for (const auto& row : rows) {
        if (row.result) csv.comment("seconds " + to_string(row.kind) + " eps " + num(row.epsilon) + ": " +
                                    num(row.result->seconds));
    }
    report(csv, summary);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multilevel Monte Carlo with Ninomiya-Victoir and Giles-Szpruch schemes"};
    app.set_config("--config", "", "flat key = value file; flags override its entries");
    app.require_subcommand(1);

    Options o;
    app.add_option("--model", o.model, "clark-cameron | heston")->check(CLI::IsMember({"clark-cameron", "heston"}));
    app.add_option("--payoff", o.payoff, "cos-u | u-squared | u-plus | heston-call")
        ->check(CLI::IsMember({"cos-u", "u-squared", "u-plus", "heston-call"}));
    app.add_option("--coupling", o.coupling, "gs | nv | gs-nv")->check(CLI::IsMember({"gs", "nv", "gs-nv"}));
    app.add_option("--estimator", o.estimators, "mlmc | ml2r (repeatable)")
        ->check(CLI::IsMember({"mlmc", "ml2r"}));
    app.add_option("--eps", o.eps, "target RMSE, e.g. 2^-6 or 0.01 (repeatable)");
    app.add_option("--seed", o.seed, "random seed");
    app.add_option("--pilot-m", o.pilot_m, "pilot sample size per level")->check(CLI::PositiveNumber);
    app.add_option("--levels", o.levels, "level range a..b");
    app.add_option("--samples", o.samples, "Monte Carlo sample size per level for experiments");
    app.add_option("--out", o.out, "output directory (CSV goes to stdout when omitted)");
    app.add_option("--workers", o.workers, "worker threads, 0 = all cores")->check(CLI::NonNegativeNumber);
    app.add_option("--negative-variance", o.negative_variance, "error | reflect")
        ->check(CLI::IsMember({"error", "reflect"}));
    app.add_flag("--zero-noise", o.zero_noise, "degenerate streams with zero Brownian increments");
    app.add_option("--mu", o.mu, "Clark-Cameron drift");
    app.add_option("--u0", o.u0, "initial u (log-price for heston)");
    app.add_option("--s0", o.s0, "initial s for clark-cameron");
    app.add_option("-T,--horizon", o.horizon, "time horizon");
    app.add_option("--r", o.r, "heston rate");
    app.add_option("--kappa", o.kappa, "heston mean reversion");
    app.add_option("--theta", o.theta, "heston long-run variance");
    app.add_option("--sigma", o.sigma, "heston volatility of variance");
    app.add_option("--v0", o.v0, "heston initial variance");
    app.add_option("--strike", o.strike, "call strike");
    app.add_option("--oracle", o.oracle, "closed form gating oracle-check: published | exact")
        ->check(CLI::IsMember({"published", "exact"}));
    app.add_option("--inflection-max-level", o.inflection_max_level, "extend variance pilots to this level");
    app.add_option("--last-level", o.last_level, "fix the last level instead of deriving it from eps");
    app.add_option("--alpha", o.alpha, "fixed weak rate");
    app.add_option("--c1", o.c1, "fixed weak constant");
    app.add_option("--beta", o.beta, "fixed variance rate");
    app.add_option("--c2", o.c2, "fixed variance constant");
    app.add_flag("--plan-only", o.plan_only, "sweep: build plans without running them");

    const std::vector<std::pair<const char*, const char*>> commands = {
        {"strong-order", "strong error slopes of NV and of the NV/GS coupling"},
        {"variance-decay", "E[(Z^l)^2] per level for each coupling"},
        {"oracle-check", "second moment of Z_NV against its closed forms"},
        {"calibrate", "pilot regression for alpha, c1, beta, c2"},
        {"run", "calibrate, plan and run estimators"},
        {"sweep", "cost against epsilon for complexity plots"},
    };
    for (const auto& [name, help] : commands) app.add_subcommand(name, help)->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        if (command == "strong-order") return cmd_strong_order(o);
        if (command == "variance-decay") return cmd_variance_decay(o);
        if (command == "oracle-check") return cmd_oracle_check(o);
        if (command == "calibrate") return cmd_calibrate(o);
        if (command == "run") return cmd_run(o);
        if (command == "sweep") return cmd_sweep(o);
    } catch (const std::invalid_argument& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "sampling failure: " << e.what() << '\n';
        return kExitSampling;
    }
    return kExitConfig;
}
