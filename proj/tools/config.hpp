#pragma once

// Option set shared by every subcommand, plus parsing and CSV helpers.

#include <cstdint>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "mlsde/experiments.hpp"

namespace mlsde::cli {

struct Options {
    std::string model = "clark-cameron";
    std::string payoff;  // per-model default when empty
    std::string coupling = "gs-nv";
    std::vector<std::string> estimators;
    std::vector<std::string> eps;
    std::uint64_t seed = 1;
    std::uint64_t pilot_m = 10000;
    std::string levels;  // "a..b"; per-command default when empty
    std::uint64_t samples = 0;  // per-command default when zero
    std::string out;
    int workers = 0;  // 0 = hardware concurrency
    std::string negative_variance = "error";
    bool zero_noise = false;

    double mu = 1.0, u0 = 0.0, s0 = 0.0, horizon = 1.0;
    double r = 0.05, kappa = 0.5, theta = 0.9, sigma = 0.05, v0 = 1.0, strike = 1.0;

    std::string oracle = "published";  // which closed form gates oracle-check
    int inflection_max_level = 0;
    bool plan_only = false;
    std::optional<int> last_level;
    std::optional<double> alpha, c1, beta, c2;
};

// "2^-6", "2^{-6}", "0.015625" or "1e-2"; throws ConfigError otherwise or when not positive.
double parse_epsilon(const std::string& text);
// "a..b" with 0 <= a <= b, or a single level.
std::vector<int> parse_levels(const std::string& text);

ModelConfig model_config(const Options& options);
StreamBase stream_base(const Options& options, std::uint64_t experiment = 0);
int worker_count(const Options& options);
std::vector<double> epsilons(const Options& options);

// Key/value pairs echoed into every CSV header.
std::vector<std::pair<std::string, std::string>> describe(const Options& options);

// CSV sink: a `#` header block, then the body. Writes to <out>/<name>.csv or stdout.
class CsvOutput {
public:
    CsvOutput(const Options& options, const std::string& command);

    void header(const std::string& line);
    void row(const std::vector<std::string>& cells);
    void comment(const std::string& line);
    bool to_file() const noexcept { return file_.is_open(); }
    const std::string& path() const noexcept { return path_; }

private:
    std::ostream& stream();

    std::ofstream file_;
    std::string path_;
};

std::string num(double value);
std::string num(std::uint64_t value);
std::string num(int value);

}  // namespace mlsde::cli
