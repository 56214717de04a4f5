#pragma once

#include <map>
#include <string>
#include <vector>

#include "spamforge/params.hpp"

namespace spamforge {

class validation_error : public std::runtime_error {
public:
    explicit validation_error(std::vector<std::string> problems);
    const std::vector<std::string>& problems() const { return problems_; }

private:
    std::vector<std::string> problems_;
};

// Flat dotted key-value configuration (model.gamma=0.8). Unknown keys are a
// validation error; every module precondition is checked here before any
// work starts.
struct ExperimentConfig {
    std::string kind;  // build, degrees, distances, percolation, layers,
                       // truncation, census, modulus, two-connection
    ModelParams model;

    // experiment knobs (kind-specific; defaults cover the common cases)
    double r_colour = 0.3;
    double b_retain = 0.7;
    std::vector<double> cutoffs;
    std::uint32_t h = 1;
    std::uint32_t k = 2;
    double eta = 0.1;
    double sigma = 0.05;
    std::uint64_t m_dense = 10;
    std::size_t pair_samples = 200;
    std::size_t seed_count = 1;
    double epsilon = 1.0;
    bool accelerated = true;

    std::string out_dir = "out";
    std::size_t workers = 1;

    // raw key-value view, kept for the manifest echo
    std::map<std::string, std::string> raw;
};

ExperimentConfig parse_config_file(const std::string& path,
                                   const std::vector<std::string>& overrides = {});
ExperimentConfig parse_config_text(const std::string& text,
                                   const std::vector<std::string>& overrides = {});

// Validates and runs one experiment across its seed range, writing CSV
// results and a JSON manifest into out_dir. Deterministic byte-for-byte
// given the config.
void run_experiment(const ExperimentConfig& config);

// Cartesian sweep: any config key may carry a comma-separated value list
// under the "sweep." prefix; each grid cell runs as an independent
// experiment tagged with its parameter fingerprint.
void run_sweep(const ExperimentConfig& base,
               const std::map<std::string, std::vector<std::string>>& grid);

std::uint64_t config_fingerprint(const ExperimentConfig& config);

}  // namespace spamforge
