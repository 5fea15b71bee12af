#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "qkf/kernel_profile.hpp"
#include "qkf/quantum_sim.hpp"
#include "qkf/types.hpp"

namespace qkf {

enum class FeatureMode { Exact, Sampled };

struct WeightedSubset {
    QubitSubset subset;
    double alpha = 1.0;
};

struct FeatureMapConfig {
    std::vector<WeightedSubset> subsets;
    KernelProfile profile;
    FeatureMode mode = FeatureMode::Exact;
    std::int64_t n_s = 500;

    void validate() const;
    double alpha_sum() const;
};

enum class BlockKind { Dqf, Rqf };

struct FeatureBlock {
    BlockKind kind;
    int source_subset;  // index k into cfg.subsets
    Eigen::Index length;
};

struct FeatureVector {
    Vector values;
    std::vector<FeatureBlock> layout;
};

// Frequencies for one block of random quantum features: D/2 vectors in
// R^{N_q^2} drawn from the profile's spectral law.
struct OmegaSample {
    Eigen::Index dim = 0;
    Matrix vectors;  // dim x (D/2), column per frequency
    ProfileKind profile = ProfileKind::GaussianSq;
    std::uint64_t seed = 0;

    Eigen::Index half_d() const { return vectors.cols(); }
};

// Deterministic quantum feature: per block k, entries
// sqrt(alpha_k) * Tr(P_j rho_{q_k}) / sqrt(N_q) in canonical Pauli order.
FeatureVector dqf(const Vector& x, const FeatureMapConfig& cfg, std::mt19937_64& rng);

// Draw m block indices with replacement from p(k) = sqrt(alpha_k)/sum sqrt(alpha_k);
// the drawn blocks are concatenated unweighted (alpha reset to 1).
FeatureMapConfig subsample_blocks(const FeatureMapConfig& cfg, int m, std::mt19937_64& rng);

// Spectral sampler for shift-invariant profiles over the Pauli coefficient
// vector c.  gaussian-sq: omega ~ N(0, gamma*N_q/2 * I).  laplace: isotropic
// Cauchy with scale gamma*sqrt(N_q)/2.
OmegaSample sample_omegas(const KernelProfile& profile, Eigen::Index dim,
                          Eigen::Index half_d, double n_q, std::mt19937_64& rng);

// Random quantum feature: per block, sqrt(2/D)*[sin(omega^T c); cos(omega^T c)]
// for all D/2 frequencies, blocks concatenated with sqrt(alpha_k) weights.
FeatureVector rqf(const Vector& x, const FeatureMapConfig& cfg,
                  const std::vector<OmegaSample>& omegas, std::mt19937_64& rng);

// Pauli coefficient vector c of block k of cfg, exact or shot-sampled.
Vector block_pauli_coefficients(const Vector& x, const FeatureMapConfig& cfg,
                                int block, std::mt19937_64& rng);

// Shot and dimension budgets from the uniform-error bounds.
std::int64_t required_shots_dqf(double epsilon, double delta, std::int64_t m,
                                double n_q);
std::int64_t required_shots_rqf(double epsilon, double delta, std::int64_t m,
                                double n_q, double l_f);
std::int64_t required_dimension_rqf(double epsilon, double delta, double n_q,
                                    double sigma_p);

// sigma_p = E[omega^T omega] under the profile's spectral law.
double omega_second_moment(const KernelProfile& profile, Eigen::Index dim, double n_q);

}  // namespace qkf
