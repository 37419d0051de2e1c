#include "config.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <regex>

#include "mlsde/errors.hpp"

#ifndef MLSDE_VERSION
#define MLSDE_VERSION "unknown"
#endif
#ifndef MLSDE_GIT_REVISION
#define MLSDE_GIT_REVISION "unknown"
#endif

namespace mlsde::cli {

double parse_epsilon(const std::string& text) {
    static const std::regex power(R"(\s*2\s*\^\s*\{?\s*(-?\d+(?:\.\d+)?)\s*\}?\s*)");
    std::smatch m;
    double value = 0.0;
    if (std::regex_match(text, m, power)) {
        value = std::exp2(std::stod(m[1].str()));
    } else {
        std::size_t used = 0;
        try {
            value = std::stod(text, &used);
        } catch (const std::exception&) {
            throw ConfigError("cannot parse epsilon '" + text + "'");
        }
        if (used != text.size()) throw ConfigError("cannot parse epsilon '" + text + "'");
    }
    if (!(value > 0.0) || !std::isfinite(value)) throw ConfigError("epsilon must be positive: '" + text + "'");
    return value;
}

std::vector<int> parse_levels(const std::string& text) {
    static const std::regex span(R"(\s*(\d+)\s*(?:\.\.\s*(\d+)\s*)?)");
    std::smatch m;
    if (!std::regex_match(text, m, span)) throw ConfigError("levels must look like a..b, got '" + text + "'");
    const int a = std::stoi(m[1].str());
    const int b = m[2].matched ? std::stoi(m[2].str()) : a;
    if (b < a) throw ConfigError("empty level range '" + text + "'");
    if (b > 24) throw ConfigError("levels above 24 are not supported");
    std::vector<int> out;
    for (int l = a; l <= b; ++l) out.push_back(l);
    return out;
}

ModelConfig model_config(const Options& o) {
    ModelConfig c;
    c.model = o.model;
    if (c.model != "clark-cameron" && c.model != "heston") throw ConfigError("unknown model '" + o.model + "'");
    c.mu = o.mu;
    c.u0 = o.u0;
    c.s0 = o.s0;
    c.horizon = o.horizon;
    if (!(c.horizon > 0.0)) throw ConfigError("horizon T must be positive");
    c.strike = o.strike;
    c.heston.r = o.r;
    c.heston.kappa = o.kappa;
    c.heston.theta = o.theta;
    c.heston.sigma = o.sigma;
    c.heston.u0 = o.u0;
    c.heston.v0 = o.v0;
    if (o.negative_variance == "error") {
        c.heston.negative_variance = NegativeVariancePolicy::Error;
    } else if (o.negative_variance == "reflect") {
        c.heston.negative_variance = NegativeVariancePolicy::Reflect;
    } else {
        throw ConfigError("negative-variance must be error or reflect");
    }
    const std::string payoff = o.payoff.empty() ? (c.model == "heston" ? "heston-call" : "cos-u") : o.payoff;
    c.payoff = parse_payoff_kind(payoff);
    if (c.payoff == PayoffKind::HestonCall && c.model != "heston") {
        throw ConfigError("heston-call needs the heston model");
    }
    make_model(c);  // validates parameters before any sampling
    return c;
}

StreamBase stream_base(const Options& o, std::uint64_t experiment) {
    return StreamBase{o.seed, experiment, o.zero_noise ? NoiseMode::Zero : NoiseMode::Gaussian};
}

int worker_count(const Options& o) {
    if (o.workers < 0) throw ConfigError("workers must be non-negative");
    return o.workers == 0 ? default_workers() : o.workers;
}

std::vector<double> epsilons(const Options& o) {
    if (o.eps.empty()) throw ConfigError("at least one --eps is required");
    std::vector<double> out;
    for (const auto& e : o.eps) out.push_back(parse_epsilon(e));
    return out;
}

std::vector<std::pair<std::string, std::string>> describe(const Options& o) {
    auto join = [](const std::vector<std::string>& v) {
        std::string s;
        for (const auto& x : v) s += (s.empty() ? "" : ",") + x;
        return s;
    };
    std::vector<std::pair<std::string, std::string>> kv = {
        {"model", o.model},
        {"payoff", o.payoff.empty() ? "default" : o.payoff},
        {"coupling", o.coupling},
        {"estimator", join(o.estimators)},
        {"eps", join(o.eps)},
        {"seed", std::to_string(o.seed)},
        {"pilot-m", std::to_string(o.pilot_m)},
        {"levels", o.levels},
        {"samples", std::to_string(o.samples)},
        {"negative-variance", o.negative_variance},
        {"zero-noise", o.zero_noise ? "true" : "false"},
        {"T", num(o.horizon)},
        {"oracle", o.oracle},
    };
    if (o.model == "heston") {
        for (auto [k, v] : {std::pair{"r", o.r}, {"kappa", o.kappa}, {"theta", o.theta}, {"sigma", o.sigma},
                            {"u0", o.u0}, {"v0", o.v0}, {"strike", o.strike}}) {
            kv.emplace_back(k, num(v));
        }
    } else {
        for (auto [k, v] : {std::pair{"mu", o.mu}, {"u0", o.u0}, {"s0", o.s0}}) kv.emplace_back(k, num(v));
    }
    if (o.last_level) kv.emplace_back("last-level", std::to_string(*o.last_level));
    for (auto [k, v] : {std::pair{"alpha", o.alpha}, {"c1", o.c1}, {"beta", o.beta}, {"c2", o.c2}}) {
        if (v) kv.emplace_back(k, num(*v));
    }
    return kv;
}

CsvOutput::CsvOutput(const Options& options, const std::string& command) {
    if (!options.out.empty()) {
        std::filesystem::create_directories(options.out);
        path_ = (std::filesystem::path(options.out) / (command + ".csv")).string();
        file_.open(path_);
        if (!file_) throw ConfigError("cannot write " + path_);
    }
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    header("mlsde " + command);
    header(std::string("provenance: mlsde ") + MLSDE_VERSION + " (" + MLSDE_GIT_REVISION + ")");
    header(std::string("generated: ") + stamp);
    for (const auto& [k, v] : describe(options)) header("config " + k + " = " + v);
}

std::ostream& CsvOutput::stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

void CsvOutput::header(const std::string& line) { stream() << "# " << line << '\n'; }
void CsvOutput::comment(const std::string& line) { stream() << "# " << line << '\n'; }

void CsvOutput::row(const std::vector<std::string>& cells) {
    auto& os = stream();
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
    os << '\n';
}

std::string num(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

std::string num(std::uint64_t value) { return std::to_string(value); }
std::string num(int value) { return std::to_string(value); }

}  // namespace mlsde::cli
