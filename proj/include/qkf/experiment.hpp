#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qkf/dataset.hpp"
#include "qkf/feature_map.hpp"
#include "qkf/kernels.hpp"
#include "qkf/learners.hpp"
#include "qkf/types.hpp"

namespace qkf {

struct ExperimentConfig {
    // [dataset]
    std::string dataset_name;  // wine-quality | magic04 | synthetic
    std::string dataset_path;  // resolved against QKF_DATA_DIR when relative
    Eigen::Index m_train = 0;
    Eigen::Index m_test = 0;
    std::uint64_t split_seed = 0;
    Eigen::Index synthetic_rows = 0;  // synthetic only
    int synthetic_dim = 0;

    // [kernel]
    ProfileKind kernel_kind = ProfileKind::InnerProduct;
    double gamma = 0.1;
    std::vector<std::vector<int>> subsets;  // 1-based qubit labels per block
    std::vector<double> alphas;             // empty = all ones

    // [features]
    std::string method = "dqf";  // dqf | rqf | nystrom
    Eigen::Index feature_d = 0;  // rqf: per-block D; nystrom: landmark count
    std::int64_t n_s = 500;
    FeatureMode mode = FeatureMode::Sampled;

    // [learner]
    std::string task;  // regression | classification (default from dataset)
    double lambda = 0.001;
    double c_reg = 1.0;
    std::string lambda_convention = "standard";  // standard | eq2

    // [metrics]
    Eigen::Index dq_subset = 1000;
    int repetitions = 3;

    void validate() const;
    FeatureMapConfig feature_map_config() const;
    std::uint64_t hash() const;
};

ExperimentConfig parse_experiment_config(std::istream& in);
ExperimentConfig load_experiment_config(const std::string& path);

struct TrialResult {
    int trial = 0;
    Eigen::Index feature_dim = 0;
    double d_q = 0.0;
    std::optional<double> mse;
    std::optional<double> accuracy;
};

struct ExperimentResult {
    std::uint64_t master_seed = 0;
    std::uint64_t config_hash = 0;
    std::string dataset_name;
    std::string method;
    Task task = Task::Regression;
    std::string split_fingerprint;
    std::vector<TrialResult> trials;
    double dq_mean = 0.0, dq_sem = 0.0;
    double metric_mean = 0.0, metric_sem = 0.0;  // MSE or accuracy
    bool metrics_available = false;
};

ExperimentResult run_experiment(const ExperimentConfig& config,
                                std::uint64_t master_seed, int threads = 1);

void write_experiment_csv(std::ostream& os, const ExperimentResult& result);

enum class BoundKind { DqfShots, RqfShots, RqfDim };

struct BoundsGridPoint {
    double epsilon = 0.3;
    double delta = 0.1;
    std::int64_t m = 50;
    int subset_qubits = 2;  // N_q = 2^subset_qubits
    double l_f = 1.0;       // rqf kinds
};

struct BoundsCoverageRow {
    BoundsGridPoint point;
    std::int64_t budget_shots = 0;
    std::int64_t budget_dim = 0;
    int trials = 0;
    int failures = 0;
    double failure_fraction = 0.0;
    bool flagged = false;  // failure fraction exceeds delta at 99% confidence
};

std::vector<BoundsCoverageRow> verify_bounds(BoundKind kind,
                                             const std::vector<BoundsGridPoint>& grid,
                                             int repetitions, std::uint64_t master_seed,
                                             int threads = 1);

void write_bounds_csv(std::ostream& os, BoundKind kind,
                      const std::vector<BoundsCoverageRow>& rows);

enum class RegimeLabel { NoGeneralization, ExactKernel, Features, Neither };

// Advisory crossover map with all big-O constants at 1.
RegimeLabel regime_advice(double m, double n_q, double m0);
std::string to_string(RegimeLabel label);

// P(X >= k) for X ~ Binomial(n, p).
double binomial_tail_geq(int n, int k, double p);

// Dataset resolution shared by CLI subcommands; honors QKF_DATA_DIR.
DatasetSplit load_dataset_for(const ExperimentConfig& config);

// Built-in benchmark rows: table 2 = sampled DQF/Nystrom with the
// inner-product kernel; table 3 = RQF/Nystrom with the block-additive
// laplace kernel (gamma = 0.1).
ExperimentConfig table_row_config(int table, const std::string& dataset,
                                  const std::string& method, Eigen::Index features);
std::vector<ExperimentConfig> table_rows(int table);

std::string code_version();

}  // namespace qkf
