#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <map>

#include "qkf/feature_map.hpp"
#include "qkf/kernels.hpp"
#include "qkf/rng.hpp"

using namespace qkf;

namespace {

constexpr double kPi = 3.14159265358979323846;

Vector random_angles(int n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(0.0, kPi);
    Vector x(n);
    for (int i = 0; i < n; ++i) x[i] = unif(rng);
    return x;
}

FeatureMapConfig two_block_config(ProfileKind kind, double gamma) {
    FeatureMapConfig cfg;
    cfg.subsets.push_back({QubitSubset({1, 2}), 0.7});
    cfg.subsets.push_back({QubitSubset({3}), 1.3});
    switch (kind) {
        case ProfileKind::InnerProduct: cfg.profile = KernelProfile::inner_product(); break;
        case ProfileKind::GaussianSq: cfg.profile = KernelProfile::gaussian_sq(gamma); break;
        case ProfileKind::Laplace: cfg.profile = KernelProfile::laplace(gamma); break;
    }
    return cfg;
}

}  // namespace

TEST_CASE("dqf inner products equal the weighted trace kernel") {
    auto rng = derive_stream(21, {1});
    FeatureMapConfig cfg = two_block_config(ProfileKind::InnerProduct, 0.0);
    for (int rep = 0; rep < 10; ++rep) {
        const Vector x = random_angles(4, rng), xp = random_angles(4, rng);
        const FeatureVector za = dqf(x, cfg, rng), zb = dqf(xp, cfg, rng);
        CHECK(za.values.dot(zb.values) ==
              doctest::Approx(inner_product_kernel(x, xp, cfg)).epsilon(1e-12));
    }
}

TEST_CASE("dqf layout and scaling") {
    auto rng = derive_stream(21, {2});
    FeatureMapConfig cfg = two_block_config(ProfileKind::InnerProduct, 0.0);
    const FeatureVector z = dqf(random_angles(3, rng), cfg, rng);
    REQUIRE(z.layout.size() == 2);
    CHECK(z.layout[0].length == 16);
    CHECK(z.layout[1].length == 4);
    CHECK(z.values.size() == 20);
    // First entry of each block is sqrt(alpha) * Tr(I rho)/sqrt(N_q).
    CHECK(z.values[0] == doctest::Approx(std::sqrt(0.7) / 2.0).epsilon(1e-12));
    CHECK(z.values[16] == doctest::Approx(std::sqrt(1.3) / std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("rqf self inner product equals the alpha sum") {
    auto rng = derive_stream(21, {3});
    for (int rep = 0; rep < 20; ++rep) {
        FeatureMapConfig cfg = two_block_config(ProfileKind::GaussianSq, 0.4);
        cfg.subsets[0].alpha = 0.2 + rep * 0.1;
        std::vector<OmegaSample> omegas;
        omegas.push_back(sample_omegas(cfg.profile, 16, 8, 4.0, rng));
        omegas.push_back(sample_omegas(cfg.profile, 4, 5, 2.0, rng));
        const FeatureVector z = rqf(random_angles(3, rng), cfg, omegas, rng);
        // sin^2 + cos^2 sums exactly per frequency.
        CHECK(z.values.squaredNorm() ==
              doctest::Approx(cfg.alpha_sum()).epsilon(1e-14));
    }
}

TEST_CASE("gaussian spectral law has variance gamma N_q / 2") {
    auto rng = derive_stream(21, {4});
    const double gamma = 0.3, n_q = 4.0;
    const OmegaSample o = sample_omegas(KernelProfile::gaussian_sq(gamma), 16, 20000, n_q, rng);
    const double var = o.vectors.array().square().mean();
    CHECK(var == doctest::Approx(gamma * n_q / 2.0).epsilon(0.02));
}

TEST_CASE("gaussian frequencies reproduce the gaussian-sq profile") {
    auto rng = derive_stream(21, {5});
    const double gamma = 0.25, n_q = 4.0;
    const Eigen::Index dim = 16;
    std::uniform_real_distribution<double> unif(-0.2, 0.2);
    for (int rep = 0; rep < 3; ++rep) {
        Vector delta(dim);
        for (Eigen::Index i = 0; i < dim; ++i) delta[i] = unif(rng);
        const Eigen::Index draws = 200000;
        const OmegaSample o =
            sample_omegas(KernelProfile::gaussian_sq(gamma), dim, draws, n_q, rng);
        const double mc = (o.vectors.transpose() * delta).array().cos().mean();
        const double exact = std::exp(-gamma * n_q * delta.squaredNorm() / 4.0);
        CHECK(mc == doctest::Approx(exact).epsilon(0.01));
    }
}

TEST_CASE("cauchy frequencies reproduce the laplace profile") {
    auto rng = derive_stream(21, {6});
    const double gamma = 0.5, n_q = 2.0;
    const Eigen::Index dim = 4;
    std::uniform_real_distribution<double> unif(-0.5, 0.5);
    for (int rep = 0; rep < 3; ++rep) {
        Vector delta(dim);
        for (Eigen::Index i = 0; i < dim; ++i) delta[i] = unif(rng);
        const Eigen::Index draws = 200000;
        const OmegaSample o =
            sample_omegas(KernelProfile::laplace(gamma), dim, draws, n_q, rng);
        const double mc = (o.vectors.transpose() * delta).array().cos().mean();
        const double exact = std::exp(-gamma * std::sqrt(n_q) / 2.0 * delta.norm());
        CHECK(mc == doctest::Approx(exact).epsilon(0.015));
    }
}

TEST_CASE("block subsampling follows sqrt(alpha) weights and resets alpha") {
    auto rng = derive_stream(21, {7});
    FeatureMapConfig cfg;
    cfg.subsets.push_back({QubitSubset({1}), 1.0});
    cfg.subsets.push_back({QubitSubset({2}), 4.0});  // sqrt weights 1 : 2
    cfg.profile = KernelProfile::inner_product();

    std::map<int, int> counts;
    const int draws = 30000;
    for (int r = 0; r < draws; ++r) {
        const FeatureMapConfig sub = subsample_blocks(cfg, 1, rng);
        REQUIRE(sub.subsets.size() == 1);
        CHECK(sub.subsets[0].alpha == 1.0);
        ++counts[sub.subsets[0].subset.indices()[0]];
    }
    const double frac = static_cast<double>(counts[2]) / draws;
    CHECK(frac == doctest::Approx(2.0 / 3.0).epsilon(0.02));
    CHECK_THROWS_AS(subsample_blocks(cfg, 0, rng), invalid_input);
    CHECK_THROWS_AS(subsample_blocks(cfg, 3, rng), invalid_input);
}

TEST_CASE("shot and dimension budgets match high-precision evaluations") {
    CHECK(required_shots_dqf(0.3, 0.05, 100, 4.0) == 26541);
    CHECK(required_dimension_rqf(0.5, 0.1, 2.0, 4.0) == 10842);
    // monotonicity
    CHECK(required_shots_dqf(0.2, 0.05, 100, 4.0) > required_shots_dqf(0.3, 0.05, 100, 4.0));
    CHECK(required_shots_dqf(0.3, 0.01, 100, 4.0) > required_shots_dqf(0.3, 0.05, 100, 4.0));
    CHECK(required_shots_rqf(0.3, 0.1, 50, 4.0, 2.0) >
          required_shots_rqf(0.3, 0.1, 50, 4.0, 1.0));
    CHECK_THROWS_AS(required_shots_dqf(0.0, 0.1, 10, 4.0), invalid_input);
    CHECK_THROWS_AS(required_shots_dqf(1.5, 0.1, 10, 4.0), invalid_input);
    CHECK_THROWS_AS(required_shots_dqf(0.3, 1.0, 10, 4.0), invalid_input);
}

TEST_CASE("omega second moment") {
    CHECK(omega_second_moment(KernelProfile::gaussian_sq(0.4), 16, 4.0) ==
          doctest::Approx(16 * 0.4 * 4.0 / 2.0));
    CHECK(std::isinf(omega_second_moment(KernelProfile::laplace(0.4), 16, 4.0)));
    CHECK_THROWS_AS(omega_second_moment(KernelProfile::inner_product(), 16, 4.0),
                    invalid_input);
}

TEST_CASE("sampled mode keeps the identity coefficient exact") {
    auto rng = derive_stream(21, {8});
    FeatureMapConfig cfg = two_block_config(ProfileKind::InnerProduct, 0.0);
    cfg.mode = FeatureMode::Sampled;
    cfg.n_s = 50;
    const Vector c = block_pauli_coefficients(random_angles(3, rng), cfg, 0, rng);
    CHECK(c[0] == doctest::Approx(0.25).epsilon(1e-15));
    // Sampled non-identity entries live on the shot grid 2k/n_s - 1 (scaled by 1/N_q).
    for (Eigen::Index j = 1; j < c.size(); ++j) {
        const double grid = (c[j] * 4.0 + 1.0) / 2.0 * 50.0;
        CHECK(std::abs(grid - std::round(grid)) < 1e-9);
    }
}

TEST_CASE("config validation") {
    FeatureMapConfig cfg;
    CHECK_THROWS_AS(cfg.validate(), invalid_input);
    cfg.subsets.push_back({QubitSubset({1}), 0.0});
    CHECK_THROWS_AS(cfg.validate(), invalid_input);
    cfg.subsets[0].alpha = 1.0;
    cfg.mode = FeatureMode::Sampled;
    cfg.n_s = 0;
    CHECK_THROWS_AS(cfg.validate(), invalid_input);
    cfg.n_s = 10;
    CHECK_NOTHROW(cfg.validate());
}
