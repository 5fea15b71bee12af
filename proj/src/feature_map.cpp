#include "qkf/feature_map.hpp"

#include <cmath>
#include <limits>

namespace qkf {

void FeatureMapConfig::validate() const {
    if (subsets.empty()) throw invalid_input("FeatureMapConfig: K must be >= 1");
    for (const auto& ws : subsets)
        if (!(ws.alpha > 0.0)) throw invalid_input("FeatureMapConfig: alpha_k must be > 0");
    if (mode == FeatureMode::Sampled && n_s < 1)
        throw invalid_input("FeatureMapConfig: n_s must be >= 1");
}

double FeatureMapConfig::alpha_sum() const {
    double s = 0.0;
    for (const auto& ws : subsets) s += ws.alpha;
    return s;
}

namespace {

Vector block_coefficients_from_state(const Statevector& state,
                                     const QubitSubset& q,
                                     const FeatureMapConfig& cfg,
                                     std::mt19937_64& rng) {
    const ReducedDensityMatrix rdm = reduced_density_matrix(state, q);
    const int m = q.size();
    const double nq = static_cast<double>(Eigen::Index(1) << m);
    const std::int64_t count = std::int64_t(1) << (2 * m);
    Vector c(count);
    for (std::int64_t j = 1; j <= count; ++j) {
        const PauliString p = PauliString::from_index(m, j);
        double mu = pauli_expectation(rdm, p);
        // The identity expectation is Tr(rho) = 1 with no measurement, so it
        // carries no shot noise.
        if (cfg.mode == FeatureMode::Sampled && !p.is_identity())
            mu = sample_pauli_expectation(mu, cfg.n_s, rng);
        c[j - 1] = mu / nq;
    }
    return c;
}

}  // namespace

Vector block_pauli_coefficients(const Vector& x, const FeatureMapConfig& cfg,
                                int block, std::mt19937_64& rng) {
    cfg.validate();
    const Statevector state = encode(x);
    const auto& ws = cfg.subsets.at(block);
    ws.subset.validate_for(state.n_qubits());
    return block_coefficients_from_state(state, ws.subset, cfg, rng);
}

FeatureVector dqf(const Vector& x, const FeatureMapConfig& cfg, std::mt19937_64& rng) {
    cfg.validate();
    const Statevector state = encode(x);

    Eigen::Index total = 0;
    for (const auto& ws : cfg.subsets) {
        ws.subset.validate_for(state.n_qubits());
        total += Eigen::Index(1) << (2 * ws.subset.size());
    }

    FeatureVector out;
    out.values.resize(total);
    Eigen::Index offset = 0;
    for (int k = 0; k < static_cast<int>(cfg.subsets.size()); ++k) {
        const auto& ws = cfg.subsets[k];
        const double nq = static_cast<double>(Eigen::Index(1) << ws.subset.size());
        const Vector c = block_coefficients_from_state(state, ws.subset, cfg, rng);
        // z_j = sqrt(alpha) * Tr(P_j rho) / sqrt(N_q) = sqrt(alpha) * sqrt(N_q) * c_j
        out.values.segment(offset, c.size()) = std::sqrt(ws.alpha) * std::sqrt(nq) * c;
        out.layout.push_back({BlockKind::Dqf, k, c.size()});
        offset += c.size();
    }
    return out;
}

FeatureMapConfig subsample_blocks(const FeatureMapConfig& cfg, int m,
                                  std::mt19937_64& rng) {
    cfg.validate();
    if (m <= 0) throw invalid_input("subsample_blocks: m must be positive");
    if (m > static_cast<int>(cfg.subsets.size()))
        throw invalid_input("subsample_blocks: m exceeds block count");

    std::vector<double> weights;
    weights.reserve(cfg.subsets.size());
    for (const auto& ws : cfg.subsets) weights.push_back(std::sqrt(ws.alpha));
    std::discrete_distribution<int> pick(weights.begin(), weights.end());

    FeatureMapConfig out = cfg;
    out.subsets.clear();
    for (int i = 0; i < m; ++i) {
        const int k = pick(rng);
        out.subsets.push_back({cfg.subsets[k].subset, 1.0});
    }
    return out;
}

OmegaSample sample_omegas(const KernelProfile& profile, Eigen::Index dim,
                          Eigen::Index half_d, double n_q, std::mt19937_64& rng) {
    if (!profile.shift_invariant())
        throw invalid_input("sample_omegas: profile is not shift-invariant");
    if (dim < 1 || half_d < 1) throw invalid_input("sample_omegas: bad dimensions");

    OmegaSample out;
    out.dim = dim;
    out.profile = profile.kind;
    out.vectors.resize(dim, half_d);

    std::normal_distribution<double> normal(0.0, 1.0);
    if (profile.kind == ProfileKind::GaussianSq) {
        // F(b) = exp(-gamma * N_q ||b||^2 / 4)  =>  omega ~ N(0, gamma*N_q/2 I)
        const double sigma = std::sqrt(profile.gamma * n_q / 2.0);
        for (Eigen::Index j = 0; j < half_d; ++j)
            for (Eigen::Index i = 0; i < dim; ++i)
                out.vectors(i, j) = sigma * normal(rng);
    } else {
        // F(b) = exp(-s ||b||_2) with s = gamma*sqrt(N_q)/2: isotropic Cauchy.
        const double scale = profile.gamma * std::sqrt(n_q) / 2.0;
        for (Eigen::Index j = 0; j < half_d; ++j) {
            double u = normal(rng);
            while (u == 0.0) u = normal(rng);
            for (Eigen::Index i = 0; i < dim; ++i)
                out.vectors(i, j) = scale * normal(rng) / std::abs(u);
        }
    }
    return out;
}

FeatureVector rqf(const Vector& x, const FeatureMapConfig& cfg,
                  const std::vector<OmegaSample>& omegas, std::mt19937_64& rng) {
    cfg.validate();
    if (!cfg.profile.shift_invariant())
        throw invalid_input("rqf: profile is not shift-invariant");
    if (omegas.size() != cfg.subsets.size())
        throw invalid_input("rqf: one OmegaSample per block required");

    const Statevector state = encode(x);
    Eigen::Index total = 0;
    for (std::size_t k = 0; k < cfg.subsets.size(); ++k) {
        const auto& ws = cfg.subsets[k];
        ws.subset.validate_for(state.n_qubits());
        const Eigen::Index nq_sq = Eigen::Index(1) << (2 * ws.subset.size());
        if (omegas[k].dim != nq_sq)
            throw invalid_input("rqf: omega dimension does not match block N_q^2");
        total += 2 * omegas[k].half_d();
    }

    FeatureVector out;
    out.values.resize(total);
    Eigen::Index offset = 0;
    for (int k = 0; k < static_cast<int>(cfg.subsets.size()); ++k) {
        const auto& ws = cfg.subsets[k];
        const Vector c = block_coefficients_from_state(state, ws.subset, cfg, rng);
        const Vector proj = omegas[k].vectors.transpose() * c;
        const Eigen::Index half = proj.size();
        const double w = std::sqrt(ws.alpha) * std::sqrt(1.0 / static_cast<double>(half));
        out.values.segment(offset, half) = w * proj.array().sin().matrix();
        out.values.segment(offset + half, half) = w * proj.array().cos().matrix();
        out.layout.push_back({BlockKind::Rqf, k, 2 * half});
        offset += 2 * half;
    }
    return out;
}

namespace {

void check_tail_prob(double epsilon, double delta, double upper) {
    if (!(epsilon > 0.0) || !(epsilon < upper))
        throw invalid_input("shot bound: epsilon out of range");
    if (!(delta > 0.0) || !(delta < 1.0))
        throw invalid_input("shot bound: delta out of range");
}

}  // namespace

std::int64_t required_shots_dqf(double epsilon, double delta, std::int64_t m,
                                double n_q) {
    check_tail_prob(epsilon, delta, 1.0);
    if (m < 1) throw invalid_input("required_shots_dqf: M must be >= 1");
    const double bound =
        18.0 * n_q * n_q / (epsilon * epsilon) * std::log(2.0 * static_cast<double>(m) / delta);
    return static_cast<std::int64_t>(std::ceil(bound));
}

std::int64_t required_shots_rqf(double epsilon, double delta, std::int64_t m,
                                double n_q, double l_f) {
    check_tail_prob(epsilon, delta, 1.0);
    if (m < 1) throw invalid_input("required_shots_rqf: M must be >= 1");
    if (!(l_f > 0.0)) throw invalid_input("required_shots_rqf: L_f must be > 0");
    const double bound = 8.0 * n_q * n_q * l_f * l_f / (epsilon * epsilon) *
                         std::log(4.0 * static_cast<double>(m) / delta);
    return static_cast<std::int64_t>(std::ceil(bound));
}

std::int64_t required_dimension_rqf(double epsilon, double delta, double n_q,
                                    double sigma_p) {
    check_tail_prob(epsilon, delta, 1.0);
    if (!(sigma_p > 0.0) || !std::isfinite(sigma_p))
        throw invalid_input("required_dimension_rqf: sigma_p must be positive and finite");
    const double bound =
        32.0 * (n_q * n_q + 2.0) / (epsilon * epsilon) *
        std::log(2112.0 * sigma_p * sigma_p / (epsilon * epsilon * delta));
    return static_cast<std::int64_t>(std::ceil(bound));
}

double omega_second_moment(const KernelProfile& profile, Eigen::Index dim, double n_q) {
    switch (profile.kind) {
        case ProfileKind::GaussianSq:
            return static_cast<double>(dim) * profile.gamma * n_q / 2.0;
        case ProfileKind::Laplace:
            // Cauchy frequencies have no finite second moment.
            return std::numeric_limits<double>::infinity();
        case ProfileKind::InnerProduct:
            break;
    }
    throw invalid_input("omega_second_moment: profile has no spectral law");
}

}  // namespace qkf
