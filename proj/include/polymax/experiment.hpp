#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "polymax/weak_type.hpp"

namespace polymax {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ConfigKey {
    std::string name;  // "key" at top level, "section.key" inside [section]
    std::string default_value;
    std::string help;
};

const std::vector<ConfigKey>& config_keys();
const std::vector<std::string>& suite_names();  // without "all"

// key = value lines, [section] headers, '#' comments. Unknown keys and malformed lines throw ConfigError.
std::map<std::string, std::string> read_config(std::istream& in);
std::map<std::string, std::string> read_config_file(const std::string& path);

struct ExperimentConfig {
    std::string poly;
    int n = 0;
    std::vector<std::string> suites;  // expanded, in run order
    bool all = false;                 // "all" was requested
    int q_max = 16;
    std::uint64_t seed = 1;
    std::string out = "out";
    double grid_lo = -8.0, grid_hi = 8.0, dx = 1.0 / 1024;
    int min_nodes = 16, max_nodes = 1024;
    AlphaSpec alpha{};
    int maximal_h_grid = 6, maximal_functions = 4;
    int monomial_h_grid = 6, monomial_functions = 10;
    double monomial_tolerance = 5e-2;
    int cz_cases = 200;
    std::int64_t n_min = 2, n_max = 8;
    double theta = 0.25;
    int kbar_max = 4;
    int weak_corpus = 20, weak_q_max = 0, weak_h_grid = 4;
    double weak_stability = 0.2;

    std::map<std::string, std::string> values;  // every key with its effective text

    GridSpec grid() const;
    NodePolicy policy() const;
};

// Fills defaults, checks types and ranges; throws ConfigError.
ExperimentConfig make_config(const std::map<std::string, std::string>& values);

struct SuiteOutcome {
    std::string name;
    bool passed = true;
    bool skipped = false;
    std::vector<std::string> violations;
    nlohmann::json measured = nlohmann::json::object();
    std::vector<std::string> files;
    double seconds = 0.0;  // not written to the report
};

struct ExperimentResult {
    int status = 0;  // 0 pass, 1 suite failure
    std::vector<SuiteOutcome> suites;
    std::vector<std::string> files;  // relative to the output directory, sorted
};

// Runs the suites and writes report.json, index.json and the per-suite CSV and SVG files.
// Throws ConfigError for a bad polynomial, a suite that does not apply, or an unwritable directory.
ExperimentResult run_experiment(const ExperimentConfig& cfg, std::ostream* log = nullptr);

SuiteOutcome run_suite(const std::string& name, const ExperimentConfig& cfg, const std::string& dir);

}  // namespace polymax
