#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "qkf/feature_map.hpp"
#include "qkf/kernel_profile.hpp"
#include "qkf/quantum_sim.hpp"
#include "qkf/types.hpp"

namespace qkf {

// Per-sample kernel state: one Pauli coefficient vector c per block of the
// feature-map config.  All kernels here are functions of these vectors, so
// the circuit is simulated once per sample.
struct SampleRep {
    std::vector<Vector> coefficients;
};

SampleRep sample_rep(const Vector& x, const FeatureMapConfig& cfg, std::mt19937_64& rng);

using KernelFn = std::function<double(const SampleRep&, const SampleRep&)>;

// sum_k alpha_k Tr(rho_k rho_k') = sum_k alpha_k N_q_k (c_k . c_k').
double inner_product_kernel(const SampleRep& a, const SampleRep& b,
                            const FeatureMapConfig& cfg);
double inner_product_kernel(const Vector& x, const Vector& xp,
                            const FeatureMapConfig& cfg);

// gaussian-sq: exp(-gamma sum_k alpha_k d_HS^2);
// laplace: sum_k exp(-gamma ||rho_k - rho_k'||_HS).
double distance_kernel(const SampleRep& a, const SampleRep& b,
                       const FeatureMapConfig& cfg);
double distance_kernel(const Vector& x, const Vector& xp, const FeatureMapConfig& cfg);

// Kernel selected by cfg.profile.kind.
KernelFn kernel_evaluator(const FeatureMapConfig& cfg);

struct GramMatrix {
    Matrix entries;
    Eigen::Index size() const { return entries.rows(); }
};

GramMatrix gram_matrix(const std::vector<SampleRep>& samples, const KernelFn& kernel);

struct NystromFeatures {
    std::vector<SampleRep> landmarks;
    std::vector<Eigen::Index> landmark_ids;  // indices into the training set
    Matrix projection;                       // S x D, rows scaled by 1/sqrt(lambda_s)
    KernelFn kernel;

    Eigen::Index dim() const { return projection.rows(); }
    Vector map(const SampleRep& x) const;
};

// Landmarks drawn uniformly without replacement; eigenpairs of the landmark
// Gram with eigenvalues <= 1e-10 * lambda_max are dropped.
NystromFeatures nystrom_features(const std::vector<SampleRep>& train,
                                 const KernelFn& kernel, Eigen::Index d_landmarks,
                                 std::mt19937_64& rng);

// d_Q: mean absolute deviation over all ordered pairs (diagonal included).
double kernel_discrepancy(const KernelFn& approx, const KernelFn& exact,
                          const std::vector<SampleRep>& subset);
double kernel_discrepancy(const Matrix& approx, const Matrix& exact);

}  // namespace qkf
