#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mlsde/calibrate.hpp"
#include "mlsde/errors.hpp"
#include "mlsde/estimators.hpp"
#include "mlsde/experiments.hpp"
#include "mlsde/oracle.hpp"

namespace py = pybind11;
using namespace mlsde;

namespace {

StreamBase base(std::uint64_t seed, std::uint64_t experiment, bool zero_noise) {
    return StreamBase{seed, experiment, zero_noise ? NoiseMode::Zero : NoiseMode::Gaussian};
}

py::dict stats_dict(const LevelStats& s) {
    py::dict d;
    d["level"] = s.level;
    d["samples"] = s.samples;
    d["mean"] = s.mean;
    d["variance"] = s.variance;
    d["sem"] = s.sem;
    d["aborted"] = s.aborted;
    return d;
}

py::dict plan_dict(const MultilevelPlan& p) {
    py::dict d;
    d["estimator"] = to_string(p.kind);
    d["coupling"] = to_string(p.coupling);
    d["epsilon"] = p.epsilon;
    d["last_level"] = p.last_level;
    d["samples"] = p.samples;
    d["weights"] = p.weights;
    d["lambda"] = p.lambda;
    d["variances"] = p.variances;
    d["cost_units"] = p.cost_units();
    return d;
}

py::dict fit_dict(const RateFit& f) {
    py::dict d;
    d["order"] = f.order;
    d["constant"] = f.constant;
    d["raw_slope"] = f.raw_slope;
    d["intercept"] = f.intercept;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Multilevel Monte Carlo with Ninomiya-Victoir and Giles-Szpruch schemes";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<SamplingFailure>(m, "SamplingFailure", PyExc_RuntimeError);

    py::class_<HestonParams>(m, "HestonParams")
        .def(py::init<>())
        .def_readwrite("r", &HestonParams::r)
        .def_readwrite("kappa", &HestonParams::kappa)
        .def_readwrite("theta", &HestonParams::theta)
        .def_readwrite("sigma", &HestonParams::sigma)
        .def_readwrite("u0", &HestonParams::u0)
        .def_readwrite("v0", &HestonParams::v0)
        .def_property(
            "negative_variance",
            [](const HestonParams& p) {
                return p.negative_variance == NegativeVariancePolicy::Reflect ? "reflect" : "error";
            },
            [](HestonParams& p, const std::string& v) {
                if (v != "error" && v != "reflect") throw ConfigError("negative_variance must be error or reflect");
                p.negative_variance = v == "reflect" ? NegativeVariancePolicy::Reflect : NegativeVariancePolicy::Error;
            })
        .def_property_readonly("xi", [](const HestonParams& p) { return HestonModel(p).xi(); });

    py::class_<ModelConfig>(m, "ModelConfig")
        .def(py::init([](const std::string& model, const std::string& payoff, double mu, double horizon) {
                 ModelConfig c;
                 c.model = model;
                 c.payoff = parse_payoff_kind(payoff);
                 c.mu = mu;
                 c.horizon = horizon;
                 make_model(c);
                 return c;
             }),
             py::arg("model") = "clark-cameron", py::arg("payoff") = "cos-u", py::arg("mu") = 1.0,
             py::arg("horizon") = 1.0)
        .def_readwrite("model", &ModelConfig::model)
        .def_readwrite("mu", &ModelConfig::mu)
        .def_readwrite("u0", &ModelConfig::u0)
        .def_readwrite("s0", &ModelConfig::s0)
        .def_readwrite("heston", &ModelConfig::heston)
        .def_readwrite("horizon", &ModelConfig::horizon)
        .def_readwrite("strike", &ModelConfig::strike)
        .def_property(
            "payoff", [](const ModelConfig& c) { return to_string(c.payoff); },
            [](ModelConfig& c, const std::string& p) { c.payoff = parse_payoff_kind(p); });

    m.def("znv_second_moment", [](int l, double mu, double T) { return znv_second_moment(l, mu, T).value; },
          py::arg("level"), py::arg("mu") = 1.0, py::arg("horizon") = 1.0);
    m.def("znv_second_moment_exact",
          [](int l, double mu, double T) { return znv_second_moment_exact(l, mu, T).value; }, py::arg("level"),
          py::arg("mu") = 1.0, py::arg("horizon") = 1.0);
    m.def("cc_exact_usq_mean", [](double mu, double T, double s0) { return cc_exact_usq_mean(mu, T, s0).value; },
          py::arg("mu") = 1.0, py::arg("horizon") = 1.0, py::arg("s0") = 0.0);

    m.def("mlmc_last_level", &mlmc_last_level, py::arg("epsilon"), py::arg("c1"), py::arg("alpha"));
    m.def("mlmc_sample_sizes", &mlmc_sample_sizes, py::arg("epsilon"), py::arg("variances"), py::arg("lambda_"));
    m.def(
        "lambda_table",
        [](const std::string& coupling, int L, const std::string& level0) {
            return lambda_table(parse_coupling(coupling), L, level0 == "single" ? Level0Nv::Single : Level0Nv::Averaged);
        },
        py::arg("coupling"), py::arg("last_level"), py::arg("level0") = "averaged");
    m.def(
        "ml2r_weights",
        [](int L, double alpha) {
            const auto w = ml2r_weights(L, alpha);
            return py::make_tuple(w.w, w.W);
        },
        py::arg("last_level"), py::arg("alpha"));
    m.def("ml2r_last_level", &ml2r_last_level, py::arg("epsilon"), py::arg("alpha"), py::arg("horizon") = 1.0);

    m.def(
        "strong_order",
        [](const ModelConfig& c, const std::vector<int>& levels, std::uint64_t M, std::uint64_t seed, int workers,
           bool zero_noise) {
            py::gil_scoped_release release;
            const auto r = strong_order(make_model(c), c.horizon, levels, M, base(seed, 0, zero_noise), workers);
            py::gil_scoped_acquire acquire;
            py::dict d;
            std::vector<double> nv, cp;
            for (const auto& row : r.rows) nv.push_back(row.nv_error), cp.push_back(row.coupling_error);
            d["levels"] = levels;
            d["nv_error"] = nv;
            d["coupling_error"] = cp;
            d["nv_slope"] = r.nv.slope;
            d["coupling_slope"] = r.coupling.slope;
            return d;
        },
        py::arg("config"), py::arg("levels"), py::arg("samples") = 100000, py::arg("seed") = 1,
        py::arg("workers") = 1, py::arg("zero_noise") = false);

    m.def(
        "variance_decay",
        [](const ModelConfig& c, const std::vector<std::string>& couplings, const std::vector<int>& levels,
           std::uint64_t M, std::uint64_t seed, int workers) {
            std::vector<LevelCoupling> kinds;
            for (const auto& name : couplings) {
                if (name == "gs") kinds.push_back(LevelCoupling::Gs);
                else if (name == "nv") kinds.push_back(LevelCoupling::Nv);
                else if (name == "gs-nv") kinds.push_back(LevelCoupling::GsNv);
                else throw ConfigError("unknown coupling '" + name + "'");
            }
            DecayReport r;
            {
                py::gil_scoped_release release;
                r = variance_decay(make_sampler(c), kinds, levels, M, base(seed, 0, false), workers);
            }
            py::dict d;
            for (std::size_t i = 0; i < kinds.size(); ++i) {
                std::vector<double> moments;
                for (const auto& row : r.rows) {
                    if (row.coupling == kinds[i]) moments.push_back(row.second_moment);
                }
                py::dict entry;
                entry["second_moment"] = moments;
                entry["slope"] = r.slopes.at(kinds[i]).slope;
                d[py::str(couplings[i])] = entry;
            }
            return d;
        },
        py::arg("config"), py::arg("couplings"), py::arg("levels"), py::arg("samples") = 100000, py::arg("seed") = 1,
        py::arg("workers") = 1);

    m.def(
        "oracle_check",
        [](const std::vector<int>& levels, double mu, double T, std::uint64_t M, std::uint64_t seed, int workers) {
            const double mus[] = {mu};
            OracleReport r;
            {
                py::gil_scoped_release release;
                r = oracle_check(levels, mus, T, M, base(seed, 0, false), workers);
            }
            py::list rows;
            for (const auto& row : r.rows) {
                py::dict d;
                d["level"] = row.level;
                d["estimate"] = row.estimate;
                d["sem"] = row.sem;
                d["published"] = row.published;
                d["exact"] = row.exact;
                d["z_published"] = row.z_published;
                d["z_exact"] = row.z_exact;
                rows.append(d);
            }
            py::dict out;
            out["rows"] = rows;
            out["pass_published"] = r.pass_published;
            out["pass_exact"] = r.pass_exact;
            return out;
        },
        py::arg("levels"), py::arg("mu") = 1.0, py::arg("horizon") = 1.0, py::arg("samples") = 1000000,
        py::arg("seed") = 1, py::arg("workers") = 1);

    m.def(
        "calibrate",
        [](const ModelConfig& c, const std::string& coupling, const std::vector<int>& levels, std::uint64_t M,
           std::uint64_t seed, int workers) {
            CalibrationOptions o;
            o.levels = levels;
            o.samples = M;
            o.base = base(seed, 0, false);
            o.workers = workers;
            CalibrationReport r;
            {
                py::gil_scoped_release release;
                r = calibrate(make_sampler(c), parse_coupling(coupling), o);
            }
            py::dict d;
            d["weak"] = fit_dict(r.weak);
            d["variance"] = fit_dict(r.variance);
            d["level0"] = stats_dict(r.level0);
            py::list ws, vs;
            for (const auto& s : r.weak_stats) ws.append(stats_dict(s));
            for (const auto& s : r.variance_stats) vs.append(stats_dict(s));
            d["weak_stats"] = ws;
            d["variance_stats"] = vs;
            d["inflection"] = r.inflection ? py::object(py::int_(*r.inflection)) : py::object(py::none());
            return d;
        },
        py::arg("config"), py::arg("coupling") = "gs-nv", py::arg("levels") = std::vector<int>{1, 2, 3, 4},
        py::arg("samples") = 10000, py::arg("seed") = 1, py::arg("workers") = 1);

    m.def(
        "run",
        [](const ModelConfig& c, const std::string& coupling, const std::string& estimator,
           const std::vector<double>& eps, std::uint64_t pilot_samples, std::uint64_t seed, int workers) {
            CalibrationOptions o;
            o.samples = pilot_samples;
            o.base = base(seed, 0, false);
            o.workers = workers;
            const EstimatorKind kind = parse_estimator(estimator);
            py::list out;
            std::vector<std::pair<MultilevelPlan, EstimatorResult>> results;
            {
                py::gil_scoped_release release;
                Planner planner(make_sampler(c), parse_coupling(coupling), o);
                for (std::size_t i = 0; i < eps.size(); ++i) {
                    MultilevelPlan plan = planner.plan(kind, eps[i]);
                    EstimatorResult res = run_multilevel(plan, planner.sampler(), base(seed, 1000 + 100 * i, false),
                                                         workers);
                    results.emplace_back(std::move(plan), std::move(res));
                }
            }
            for (const auto& [plan, res] : results) {
                py::dict d = plan_dict(plan);
                d["estimate"] = res.estimate;
                d["seconds"] = res.seconds;
                d["aborted"] = res.aborted;
                out.append(d);
            }
            return out;
        },
        py::arg("config"), py::arg("coupling") = "gs-nv", py::arg("estimator") = "mlmc", py::arg("eps"),
        py::arg("pilot_samples") = 10000, py::arg("seed") = 1, py::arg("workers") = 1);
}
