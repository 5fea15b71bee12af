#include "qkf/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qkf {

SampleRep sample_rep(const Vector& x, const FeatureMapConfig& cfg, std::mt19937_64& rng) {
    cfg.validate();
    SampleRep rep;
    rep.coefficients.reserve(cfg.subsets.size());
    for (int k = 0; k < static_cast<int>(cfg.subsets.size()); ++k)
        rep.coefficients.push_back(block_pauli_coefficients(x, cfg, k, rng));
    return rep;
}

namespace {

void check_pair(const SampleRep& a, const SampleRep& b, const FeatureMapConfig& cfg) {
    if (a.coefficients.size() != cfg.subsets.size() ||
        b.coefficients.size() != cfg.subsets.size())
        throw invalid_input("kernel: sample representation does not match config");
}

double block_nq(const FeatureMapConfig& cfg, int k) {
    return static_cast<double>(Eigen::Index(1) << cfg.subsets[k].subset.size());
}

}  // namespace

double inner_product_kernel(const SampleRep& a, const SampleRep& b,
                            const FeatureMapConfig& cfg) {
    check_pair(a, b, cfg);
    double q = 0.0;
    for (int k = 0; k < static_cast<int>(cfg.subsets.size()); ++k)
        q += cfg.subsets[k].alpha * block_nq(cfg, k) *
             a.coefficients[k].dot(b.coefficients[k]);
    return q;
}

double inner_product_kernel(const Vector& x, const Vector& xp,
                            const FeatureMapConfig& cfg) {
    std::mt19937_64 unused(0);
    FeatureMapConfig exact = cfg;
    exact.mode = FeatureMode::Exact;
    return inner_product_kernel(sample_rep(x, exact, unused), sample_rep(xp, exact, unused),
                                exact);
}

double distance_kernel(const SampleRep& a, const SampleRep& b,
                       const FeatureMapConfig& cfg) {
    check_pair(a, b, cfg);
    if (!cfg.profile.shift_invariant())
        throw invalid_input("distance_kernel: inner-product profile");
    if (cfg.profile.kind == ProfileKind::GaussianSq) {
        double acc = 0.0;
        for (int k = 0; k < static_cast<int>(cfg.subsets.size()); ++k) {
            const double dsq = block_nq(cfg, k) / 4.0 *
                               (a.coefficients[k] - b.coefficients[k]).squaredNorm();
            acc += cfg.subsets[k].alpha * dsq;
        }
        return std::exp(-cfg.profile.gamma * acc);
    }
    // Laplace experiment kernel: the sum over blocks sits outside the
    // exponential, as written.
    double q = 0.0;
    for (int k = 0; k < static_cast<int>(cfg.subsets.size()); ++k) {
        const double dist = std::sqrt(block_nq(cfg, k)) / 2.0 *
                            (a.coefficients[k] - b.coefficients[k]).norm();
        q += std::exp(-cfg.profile.gamma * dist);
    }
    return q;
}

double distance_kernel(const Vector& x, const Vector& xp, const FeatureMapConfig& cfg) {
    std::mt19937_64 unused(0);
    FeatureMapConfig exact = cfg;
    exact.mode = FeatureMode::Exact;
    return distance_kernel(sample_rep(x, exact, unused), sample_rep(xp, exact, unused),
                           exact);
}

KernelFn kernel_evaluator(const FeatureMapConfig& cfg) {
    cfg.validate();
    if (cfg.profile.kind == ProfileKind::InnerProduct)
        return [cfg](const SampleRep& a, const SampleRep& b) {
            return inner_product_kernel(a, b, cfg);
        };
    return [cfg](const SampleRep& a, const SampleRep& b) {
        return distance_kernel(a, b, cfg);
    };
}

GramMatrix gram_matrix(const std::vector<SampleRep>& samples, const KernelFn& kernel) {
    if (samples.empty()) throw invalid_input("gram_matrix: M must be >= 1");
    const Eigen::Index m = static_cast<Eigen::Index>(samples.size());
    Matrix q(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = i; j < m; ++j) {
            q(i, j) = kernel(samples[i], samples[j]);
            q(j, i) = q(i, j);
        }
    return GramMatrix{std::move(q)};
}

Vector NystromFeatures::map(const SampleRep& x) const {
    Vector column(static_cast<Eigen::Index>(landmarks.size()));
    for (Eigen::Index k = 0; k < column.size(); ++k)
        column[k] = kernel(x, landmarks[k]);
    return projection * column;
}

NystromFeatures nystrom_features(const std::vector<SampleRep>& train,
                                 const KernelFn& kernel, Eigen::Index d_landmarks,
                                 std::mt19937_64& rng) {
    const Eigen::Index m = static_cast<Eigen::Index>(train.size());
    if (d_landmarks < 1 || d_landmarks > m)
        throw invalid_input("nystrom_features: landmark count must be in [1, M]");

    // Uniform draw without replacement.
    std::vector<Eigen::Index> ids(m);
    std::iota(ids.begin(), ids.end(), Eigen::Index(0));
    for (Eigen::Index i = 0; i < d_landmarks; ++i) {
        std::uniform_int_distribution<Eigen::Index> pick(i, m - 1);
        std::swap(ids[i], ids[pick(rng)]);
    }
    ids.resize(d_landmarks);

    NystromFeatures out;
    out.landmark_ids = ids;
    out.kernel = kernel;
    for (Eigen::Index id : ids) out.landmarks.push_back(train[id]);

    Matrix qhat(d_landmarks, d_landmarks);
    for (Eigen::Index i = 0; i < d_landmarks; ++i)
        for (Eigen::Index j = i; j < d_landmarks; ++j) {
            qhat(i, j) = kernel(out.landmarks[i], out.landmarks[j]);
            qhat(j, i) = qhat(i, j);
        }

    Eigen::SelfAdjointEigenSolver<Matrix> eig(qhat);
    const Vector& lambda = eig.eigenvalues();
    const double lambda_max = lambda.maxCoeff();
    if (!(lambda_max > 0.0))
        throw degenerate_kernel_error("nystrom_features: landmark Gram has no positive spectrum");
    const double cutoff = 1e-10 * lambda_max;

    std::vector<Eigen::Index> keep;
    for (Eigen::Index s = 0; s < lambda.size(); ++s)
        if (lambda[s] > cutoff) keep.push_back(s);
    if (keep.empty())
        throw degenerate_kernel_error("nystrom_features: all eigenvalues dropped");

    out.projection.resize(static_cast<Eigen::Index>(keep.size()), d_landmarks);
    for (Eigen::Index r = 0; r < out.projection.rows(); ++r)
        out.projection.row(r) =
            eig.eigenvectors().col(keep[r]).transpose() / std::sqrt(lambda[keep[r]]);
    return out;
}

double kernel_discrepancy(const KernelFn& approx, const KernelFn& exact,
                          const std::vector<SampleRep>& subset) {
    if (subset.empty()) throw invalid_input("kernel_discrepancy: empty subset");
    const Eigen::Index m = static_cast<Eigen::Index>(subset.size());
    double acc = 0.0;
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = i; j < m; ++j) {
            const double dev = std::abs(approx(subset[i], subset[j]) -
                                        exact(subset[i], subset[j]));
            acc += (i == j) ? dev : 2.0 * dev;  // ordered pairs
        }
    return acc / (static_cast<double>(m) * static_cast<double>(m));
}

double kernel_discrepancy(const Matrix& approx, const Matrix& exact) {
    if (approx.rows() != exact.rows() || approx.cols() != exact.cols())
        throw invalid_input("kernel_discrepancy: shape mismatch");
    return (approx - exact).cwiseAbs().sum() /
           (static_cast<double>(approx.rows()) * static_cast<double>(approx.cols()));
}

}  // namespace qkf
