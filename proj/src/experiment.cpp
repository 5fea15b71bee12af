#include "qkf/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

#include "qkf/rng.hpp"

namespace qkf {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Stage tags for stream derivation.
enum : std::uint64_t {
    kTagSplit = 0x11,
    kTagTrial = 0x22,
    kTagSample = 0x33,
    kTagOmega = 0x44,
    kTagLandmark = 0x55,
    kTagSvm = 0x66,
    kTagDqSubset = 0x77,
    kTagBoundsData = 0x88,
    kTagBoundsTrial = 0x99,
};

void parallel_for(Eigen::Index count, int threads,
                  const std::function<void(Eigen::Index)>& body) {
    if (threads <= 1 || count < 2) {
        for (Eigen::Index i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<Eigen::Index> next(0);
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (Eigen::Index i = next.fetch_add(1); i < count; i = next.fetch_add(1))
                body(i);
        });
    for (auto& th : pool) th.join();
}

}  // namespace

void ExperimentConfig::validate() const {
    if (dataset_name != "wine-quality" && dataset_name != "magic04" &&
        dataset_name != "synthetic")
        throw config_error("unknown dataset: " + dataset_name);
    if (subsets.empty()) throw config_error("kernel: at least one qubit subset required");
    if (!alphas.empty() && alphas.size() != subsets.size())
        throw config_error("kernel: alpha count must match subset count");
    if (method != "dqf" && method != "rqf" && method != "nystrom")
        throw config_error("features: unknown method " + method);
    if (method == "rqf") {
        if (kernel_kind == ProfileKind::InnerProduct)
            throw config_error("rqf requires a shift-invariant kernel profile");
        if (feature_d < 2 || feature_d % 2 != 0)
            throw config_error("rqf: D must be a positive even number");
    }
    if (method == "nystrom" && feature_d < 1)
        throw config_error("nystrom: landmark count D must be >= 1");
    if (repetitions < 1) throw config_error("metrics: repetitions must be >= 1");
    if (mode == FeatureMode::Sampled && n_s < 1)
        throw config_error("features: n_s must be >= 1");
}

FeatureMapConfig ExperimentConfig::feature_map_config() const {
    FeatureMapConfig fmc;
    for (std::size_t k = 0; k < subsets.size(); ++k)
        fmc.subsets.push_back(
            {QubitSubset(subsets[k]), alphas.empty() ? 1.0 : alphas[k]});
    switch (kernel_kind) {
        case ProfileKind::InnerProduct: fmc.profile = KernelProfile::inner_product(); break;
        case ProfileKind::GaussianSq: fmc.profile = KernelProfile::gaussian_sq(gamma); break;
        case ProfileKind::Laplace: fmc.profile = KernelProfile::laplace(gamma); break;
    }
    fmc.mode = mode;
    fmc.n_s = n_s;
    return fmc;
}

namespace {

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace

std::uint64_t ExperimentConfig::hash() const {
    std::ostringstream os;
    os.precision(17);
    os << dataset_name << '|' << m_train << '|' << m_test << '|' << split_seed << '|'
       << synthetic_rows << '|' << synthetic_dim << '|' << to_string(kernel_kind) << '|'
       << gamma << '|';
    for (const auto& s : subsets) {
        for (int q : s) os << q << ',';
        os << ';';
    }
    os << '|';
    for (double a : alphas) os << a << ',';
    os << '|' << method << '|' << feature_d << '|' << n_s << '|'
       << (mode == FeatureMode::Sampled ? "sampled" : "exact") << '|' << task << '|'
       << lambda << '|' << c_reg << '|' << lambda_convention << '|' << dq_subset << '|'
       << repetitions;
    return fnv1a(os.str());
}

namespace {

std::vector<int> parse_int_list(const std::string& s, char delim) {
    std::vector<int> out;
    std::istringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, delim)) {
        if (tok.find_first_not_of(" \t") == std::string::npos) continue;
        out.push_back(std::stoi(tok));
    }
    return out;
}

}  // namespace

ExperimentConfig parse_experiment_config(std::istream& in) {
    std::map<std::string, std::string> kv;
    std::string line, section;
    while (std::getline(in, line)) {
        const auto hash_pos = line.find('#');
        if (hash_pos != std::string::npos) line.erase(hash_pos);
        const auto a = line.find_first_not_of(" \t\r");
        if (a == std::string::npos) continue;
        const auto b = line.find_last_not_of(" \t\r");
        line = line.substr(a, b - a + 1);
        if (line.front() == '[') {
            if (line.back() != ']') throw config_error("bad section header: " + line);
            section = line.substr(1, line.size() - 2);
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw config_error("expected key=value: " + line);
        auto trim = [](std::string s) {
            const auto x = s.find_first_not_of(" \t");
            const auto y = s.find_last_not_of(" \t");
            return x == std::string::npos ? std::string() : s.substr(x, y - x + 1);
        };
        kv[section + "." + trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }

    ExperimentConfig cfg;
    auto get = [&](const std::string& key) -> std::optional<std::string> {
        auto it = kv.find(key);
        if (it == kv.end()) return std::nullopt;
        return it->second;
    };

    if (auto v = get("dataset.name")) cfg.dataset_name = *v;
    if (auto v = get("dataset.path")) cfg.dataset_path = *v;
    if (auto v = get("dataset.m_train")) cfg.m_train = std::stoll(*v);
    if (auto v = get("dataset.m_test")) cfg.m_test = std::stoll(*v);
    if (auto v = get("dataset.seed")) cfg.split_seed = std::stoull(*v);
    if (auto v = get("dataset.rows")) cfg.synthetic_rows = std::stoll(*v);
    if (auto v = get("dataset.dim")) cfg.synthetic_dim = std::stoi(*v);

    if (auto v = get("kernel.kind")) cfg.kernel_kind = profile_kind_from_string(*v);
    if (auto v = get("kernel.gamma")) cfg.gamma = std::stod(*v);
    if (auto v = get("kernel.subsets")) {
        std::istringstream ss(*v);
        std::string block;
        while (std::getline(ss, block, ';')) {
            auto ids = parse_int_list(block, ',');
            if (!ids.empty()) cfg.subsets.push_back(std::move(ids));
        }
    }
    if (auto v = get("kernel.alphas")) {
        std::istringstream ss(*v);
        std::string tok;
        while (std::getline(ss, tok, ','))
            if (tok.find_first_not_of(" \t") != std::string::npos)
                cfg.alphas.push_back(std::stod(tok));
    }

    if (auto v = get("features.method")) cfg.method = *v;
    if (auto v = get("features.d")) cfg.feature_d = std::stoll(*v);
    if (auto v = get("features.n_s")) cfg.n_s = std::stoll(*v);
    if (auto v = get("features.mode"))
        cfg.mode = (*v == "exact") ? FeatureMode::Exact : FeatureMode::Sampled;

    if (auto v = get("learner.task")) cfg.task = *v;
    if (auto v = get("learner.lambda")) cfg.lambda = std::stod(*v);
    if (auto v = get("learner.c")) cfg.c_reg = std::stod(*v);
    if (auto v = get("learner.lambda_convention")) cfg.lambda_convention = *v;

    if (auto v = get("metrics.dq_subset")) cfg.dq_subset = std::stoll(*v);
    if (auto v = get("metrics.repetitions")) cfg.repetitions = std::stoi(*v);

    cfg.validate();
    return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config: " + path);
    return parse_experiment_config(in);
}

namespace {

RawTable synthetic_table(const ExperimentConfig& cfg) {
    if (cfg.synthetic_rows < 2 || cfg.synthetic_dim < 1)
        throw config_error("synthetic dataset needs rows and dim");
    RawTable raw;
    raw.name = "synthetic";
    raw.task = (cfg.task == "classification") ? Task::Classification : Task::Regression;
    auto rng = derive_stream(cfg.split_seed, {0xC0FFEE});
    std::uniform_real_distribution<double> unif(0.0, kPi);
    raw.features.resize(cfg.synthetic_rows, cfg.synthetic_dim);
    raw.labels.resize(cfg.synthetic_rows);
    for (Eigen::Index r = 0; r < cfg.synthetic_rows; ++r) {
        double s = 0.0;
        for (int c = 0; c < cfg.synthetic_dim; ++c) {
            raw.features(r, c) = unif(rng);
            s += std::sin(raw.features(r, c) + c);
        }
        raw.labels[r] = (raw.task == Task::Classification) ? (s >= 0.0 ? 1.0 : -1.0) : s;
    }
    return raw;
}

}  // namespace

DatasetSplit load_dataset_for(const ExperimentConfig& config) {
    RawTable raw;
    if (config.dataset_name == "synthetic") {
        raw = synthetic_table(config);
    } else {
        std::string path = config.dataset_path;
        if (!path.empty() && path.front() != '/') {
            if (const char* root = std::getenv("QKF_DATA_DIR"))
                path = std::string(root) + "/" + path;
        } else if (path.empty()) {
            const char* root = std::getenv("QKF_DATA_DIR");
            if (!root)
                throw ingestion_error("dataset path not given and QKF_DATA_DIR unset");
            path = std::string(root) + "/" +
                   (config.dataset_name == "wine-quality" ? "winequality-white.csv"
                                                          : "magic04.data");
        }
        raw = (config.dataset_name == "wine-quality") ? load_wine_quality(path)
                                                      : load_magic04(path);
    }
    return scale_and_split(raw, config.m_train, config.m_test, config.split_seed);
}

namespace {

std::string fingerprint(const DatasetSplit& split) {
    std::ostringstream os;
    os.precision(17);
    os << split.name << '|' << split.seed << '|' << split.train_x.rows() << '|'
       << split.test_x.rows() << '|' << split.train_x.sum() << '|' << split.train_y.sum()
       << '|' << split.test_x.sum();
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a(os.str())));
    return buf;
}

struct TrialFeatures {
    Matrix train;  // M x D
    Matrix test;
};

Matrix dqf_from_reps(const std::vector<SampleRep>& reps, const FeatureMapConfig& fmc) {
    Eigen::Index total = 0;
    for (const auto& ws : fmc.subsets) total += Eigen::Index(1) << (2 * ws.subset.size());
    Matrix z(static_cast<Eigen::Index>(reps.size()), total);
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
        Eigen::Index off = 0;
        for (std::size_t k = 0; k < fmc.subsets.size(); ++k) {
            const auto& c = reps[i].coefficients[k];
            const double nq = static_cast<double>(Eigen::Index(1)
                                                  << fmc.subsets[k].subset.size());
            z.row(i).segment(off, c.size()) =
                std::sqrt(fmc.subsets[k].alpha) * std::sqrt(nq) * c.transpose();
            off += c.size();
        }
    }
    return z;
}

Matrix rqf_from_reps(const std::vector<SampleRep>& reps, const FeatureMapConfig& fmc,
                     const std::vector<OmegaSample>& omegas) {
    Eigen::Index total = 0;
    for (const auto& o : omegas) total += 2 * o.half_d();
    Matrix z(static_cast<Eigen::Index>(reps.size()), total);
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
        Eigen::Index off = 0;
        for (std::size_t k = 0; k < fmc.subsets.size(); ++k) {
            const Vector proj = omegas[k].vectors.transpose() * reps[i].coefficients[k];
            const Eigen::Index half = proj.size();
            const double w =
                std::sqrt(fmc.subsets[k].alpha / static_cast<double>(half));
            z.row(i).segment(off, half) = w * proj.array().sin().matrix().transpose();
            z.row(i).segment(off + half, half) =
                w * proj.array().cos().matrix().transpose();
            off += 2 * half;
        }
    }
    return z;
}

std::vector<SampleRep> extract_reps(const Matrix& x, const FeatureMapConfig& fmc,
                                    std::uint64_t master, std::uint64_t trial,
                                    std::uint64_t side_tag, int threads) {
    std::vector<SampleRep> reps(x.rows());
    parallel_for(x.rows(), threads, [&](Eigen::Index i) {
        auto rng = derive_stream(master, {kTagTrial, trial, kTagSample, side_tag,
                                          static_cast<std::uint64_t>(i)});
        reps[i] = sample_rep(x.row(i).transpose(), fmc, rng);
    });
    return reps;
}

double mean_of(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sem_of(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double mu = mean_of(v);
    double acc = 0.0;
    for (double x : v) acc += (x - mu) * (x - mu);
    return std::sqrt(acc / static_cast<double>(v.size() - 1) /
                     static_cast<double>(v.size()));
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config,
                                std::uint64_t master_seed, int threads) {
    config.validate();
    const DatasetSplit split = load_dataset_for(config);
    FeatureMapConfig fmc = config.feature_map_config();
    for (const auto& ws : fmc.subsets) ws.subset.validate_for(split.dim());

    const Task task =
        config.task.empty()
            ? split.task
            : (config.task == "classification" ? Task::Classification : Task::Regression);

    double lambda_eff = config.lambda;
    if (config.lambda_convention == "eq2")
        lambda_eff = 2.0 * config.lambda * static_cast<double>(split.train_x.rows());
    else if (config.lambda_convention != "standard")
        throw config_error("unknown lambda convention: " + config.lambda_convention);

    // Fixed discrepancy subset, shared by all trials.
    const Eigen::Index m_train = split.train_x.rows();
    const Eigen::Index dq_count = std::min(config.dq_subset, m_train);
    std::vector<Eigen::Index> dq_ids(m_train);
    std::iota(dq_ids.begin(), dq_ids.end(), Eigen::Index(0));
    {
        auto rng = derive_stream(master_seed, {kTagDqSubset});
        std::shuffle(dq_ids.begin(), dq_ids.end(), rng);
    }
    dq_ids.resize(dq_count);

    // Exact kernel on the subset (shot-free reference).
    FeatureMapConfig exact_fmc = fmc;
    exact_fmc.mode = FeatureMode::Exact;
    std::vector<SampleRep> exact_reps(dq_count);
    parallel_for(dq_count, threads, [&](Eigen::Index i) {
        std::mt19937_64 unused(0);
        exact_reps[i] =
            sample_rep(split.train_x.row(dq_ids[i]).transpose(), exact_fmc, unused);
    });
    const KernelFn exact_kernel = kernel_evaluator(exact_fmc);
    const GramMatrix exact_gram = gram_matrix(exact_reps, exact_kernel);

    ExperimentResult result;
    result.master_seed = master_seed;
    result.config_hash = config.hash();
    result.dataset_name = split.name;
    result.method = config.method;
    result.task = task;
    result.split_fingerprint = fingerprint(split);
    result.metrics_available = split.test_x.rows() > 0;

    std::vector<double> dqs, metrics;
    for (int trial = 1; trial <= config.repetitions; ++trial) {
        const std::uint64_t t = static_cast<std::uint64_t>(trial);
        const auto train_reps = extract_reps(split.train_x, fmc, master_seed, t, 1, threads);
        const auto test_reps = extract_reps(split.test_x, fmc, master_seed, t, 2, threads);

        TrialFeatures feats;
        Matrix dq_gram;
        if (config.method == "dqf") {
            feats.train = dqf_from_reps(train_reps, fmc);
            feats.test = dqf_from_reps(test_reps, fmc);
            Matrix sub(dq_count, feats.train.cols());
            for (Eigen::Index i = 0; i < dq_count; ++i) sub.row(i) = feats.train.row(dq_ids[i]);
            dq_gram = sub * sub.transpose();
        } else if (config.method == "rqf") {
            std::vector<OmegaSample> omegas;
            for (std::size_t k = 0; k < fmc.subsets.size(); ++k) {
                auto rng = derive_stream(master_seed,
                                         {kTagTrial, t, kTagOmega, static_cast<std::uint64_t>(k)});
                const Eigen::Index dim = Eigen::Index(1)
                                         << (2 * fmc.subsets[k].subset.size());
                omegas.push_back(sample_omegas(fmc.profile, dim, config.feature_d / 2,
                                               static_cast<double>(Eigen::Index(1)
                                                                   << fmc.subsets[k].subset.size()),
                                               rng));
            }
            feats.train = rqf_from_reps(train_reps, fmc, omegas);
            feats.test = rqf_from_reps(test_reps, fmc, omegas);
            Matrix sub(dq_count, feats.train.cols());
            for (Eigen::Index i = 0; i < dq_count; ++i) sub.row(i) = feats.train.row(dq_ids[i]);
            dq_gram = sub * sub.transpose();
        } else {  // nystrom
            auto rng = derive_stream(master_seed, {kTagTrial, t, kTagLandmark});
            const auto extractor =
                nystrom_features(train_reps, kernel_evaluator(fmc), config.feature_d, rng);
            feats.train.resize(m_train, extractor.dim());
            parallel_for(m_train, threads, [&](Eigen::Index i) {
                feats.train.row(i) = extractor.map(train_reps[i]).transpose();
            });
            feats.test.resize(split.test_x.rows(), extractor.dim());
            parallel_for(split.test_x.rows(), threads, [&](Eigen::Index i) {
                feats.test.row(i) = extractor.map(test_reps[i]).transpose();
            });
            Matrix sub(dq_count, extractor.dim());
            for (Eigen::Index i = 0; i < dq_count; ++i) sub.row(i) = feats.train.row(dq_ids[i]);
            dq_gram = sub * sub.transpose();
        }

        TrialResult tr;
        tr.trial = trial;
        tr.feature_dim = feats.train.cols();
        tr.d_q = kernel_discrepancy(dq_gram, exact_gram.entries);
        dqs.push_back(tr.d_q);

        if (result.metrics_available) {
            if (task == Task::Regression) {
                const RidgeModel model = ridge_fit(feats.train, split.train_y, lambda_eff);
                tr.mse = evaluate_regression(model.predict(feats.test), split.test_y).mse;
                metrics.push_back(*tr.mse);
            } else {
                auto rng = derive_stream(master_seed, {kTagTrial, t, kTagSvm});
                const SvmModel model = svm_fit(feats.train, split.train_y, config.c_reg, rng);
                tr.accuracy =
                    evaluate_classification(model.decision(feats.test), split.test_y).accuracy;
                metrics.push_back(*tr.accuracy);
            }
        }
        result.trials.push_back(tr);
    }

    result.dq_mean = mean_of(dqs);
    result.dq_sem = sem_of(dqs);
    if (!metrics.empty()) {
        result.metric_mean = mean_of(metrics);
        result.metric_sem = sem_of(metrics);
    }
    return result;
}

std::string code_version() { return "qkf 0.1.0"; }

void write_experiment_csv(std::ostream& os, const ExperimentResult& result) {
    os.precision(12);
    os << "# " << code_version() << "\n";
    os << "# config_hash=" << std::hex << result.config_hash << std::dec
       << " master_seed=" << result.master_seed << " split=" << result.split_fingerprint
       << "\n";
    os << "dataset,method,trial,features,d_q,"
       << (result.task == Task::Regression ? "mse" : "accuracy") << "\n";
    for (const auto& tr : result.trials) {
        os << result.dataset_name << ',' << result.method << ',' << tr.trial << ','
           << tr.feature_dim << ',' << tr.d_q << ',';
        if (result.task == Task::Regression && tr.mse) os << *tr.mse;
        else if (result.task == Task::Classification && tr.accuracy) os << *tr.accuracy;
        else os << "n/a";
        os << "\n";
    }
    os << result.dataset_name << ',' << result.method << ",mean,"
       << (result.trials.empty() ? 0 : result.trials.front().feature_dim) << ','
       << result.dq_mean << ',';
    if (result.metrics_available) os << result.metric_mean;
    else os << "n/a";
    os << "\n";
    os << result.dataset_name << ',' << result.method << ",sem,"
       << (result.trials.empty() ? 0 : result.trials.front().feature_dim) << ','
       << result.dq_sem << ',';
    if (result.metrics_available) os << result.metric_sem;
    else os << "n/a";
    os << "\n";
}

double binomial_tail_geq(int n, int k, double p) {
    if (k <= 0) return 1.0;
    if (k > n) return 0.0;
    double tail = 0.0;
    for (int i = k; i <= n; ++i) {
        const double log_term = std::lgamma(n + 1.0) - std::lgamma(i + 1.0) -
                                std::lgamma(n - i + 1.0) + i * std::log(p) +
                                (n - i) * std::log1p(-p);
        tail += std::exp(log_term);
    }
    return std::min(tail, 1.0);
}

std::vector<BoundsCoverageRow> verify_bounds(BoundKind kind,
                                             const std::vector<BoundsGridPoint>& grid,
                                             int repetitions, std::uint64_t master_seed,
                                             int threads) {
    std::vector<BoundsCoverageRow> rows;
    for (std::size_t gi = 0; gi < grid.size(); ++gi) {
        const BoundsGridPoint& g = grid[gi];
        const int m_qubits = g.subset_qubits;
        const int n = m_qubits + 2;  // trace out two qubits so RDMs are mixed
        const double n_q = static_cast<double>(Eigen::Index(1) << m_qubits);
        const Eigen::Index dim = Eigen::Index(1) << (2 * m_qubits);

        std::vector<int> subset_ids(m_qubits);
        std::iota(subset_ids.begin(), subset_ids.end(), 1);

        FeatureMapConfig fmc;
        fmc.subsets.push_back({QubitSubset(subset_ids), 1.0});
        fmc.profile = (kind == BoundKind::DqfShots)
                          ? KernelProfile::inner_product()
                          : KernelProfile::gaussian_sq(g.l_f);
        fmc.mode = FeatureMode::Exact;

        // Fixed dataset per grid point.
        Matrix x(g.m, n);
        {
            auto rng = derive_stream(master_seed, {kTagBoundsData, gi});
            std::uniform_real_distribution<double> unif(0.0, kPi);
            for (Eigen::Index i = 0; i < x.rows(); ++i)
                for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) = unif(rng);
        }
        std::vector<SampleRep> exact_reps(g.m);
        parallel_for(g.m, threads, [&](Eigen::Index i) {
            std::mt19937_64 unused(0);
            exact_reps[i] = sample_rep(x.row(i).transpose(), fmc, unused);
        });
        const KernelFn exact_kernel = kernel_evaluator(fmc);
        const GramMatrix exact_gram = gram_matrix(exact_reps, exact_kernel);

        // Budgets from the bounds; epsilon >= 1 is outside the proofs'
        // precondition, so the budget is computed at a clamped epsilon.
        const double eps_budget = std::min(g.epsilon, 0.999);
        BoundsCoverageRow row;
        row.point = g;
        row.trials = repetitions;
        if (kind == BoundKind::DqfShots) {
            row.budget_shots = required_shots_dqf(eps_budget, g.delta, g.m, n_q);
        } else {
            row.budget_shots = required_shots_rqf(eps_budget, g.delta, g.m, n_q, g.l_f);
            const double sigma_p = omega_second_moment(fmc.profile, dim, n_q);
            row.budget_dim = required_dimension_rqf(eps_budget, g.delta, n_q, sigma_p);
            if (row.budget_dim % 2 != 0) ++row.budget_dim;
        }

        std::vector<int> failures(repetitions, 0);
        parallel_for(repetitions, threads, [&](Eigen::Index r) {
            FeatureMapConfig sampled = fmc;
            sampled.mode = FeatureMode::Sampled;
            sampled.n_s = row.budget_shots;

            std::vector<Vector> coeffs(g.m);
            const bool with_shots = (kind != BoundKind::RqfDim);
            for (Eigen::Index i = 0; i < g.m; ++i) {
                if (with_shots) {
                    auto rng = derive_stream(master_seed,
                                             {kTagBoundsTrial, gi, static_cast<std::uint64_t>(r),
                                              static_cast<std::uint64_t>(i)});
                    coeffs[i] = block_pauli_coefficients(x.row(i).transpose(), sampled, 0, rng);
                } else {
                    coeffs[i] = exact_reps[i].coefficients[0];
                }
            }

            Matrix approx(g.m, g.m);
            if (kind == BoundKind::DqfShots) {
                for (Eigen::Index i = 0; i < g.m; ++i)
                    for (Eigen::Index j = i; j < g.m; ++j) {
                        approx(i, j) = n_q * coeffs[i].dot(coeffs[j]);
                        approx(j, i) = approx(i, j);
                    }
            } else {
                auto rng = derive_stream(master_seed,
                                         {kTagBoundsTrial, gi, static_cast<std::uint64_t>(r),
                                          kTagOmega});
                const OmegaSample omegas =
                    sample_omegas(fmc.profile, dim, row.budget_dim / 2, n_q, rng);
                Matrix feats(g.m, row.budget_dim);
                const double w = std::sqrt(1.0 / static_cast<double>(omegas.half_d()));
                for (Eigen::Index i = 0; i < g.m; ++i) {
                    const Vector proj = omegas.vectors.transpose() * coeffs[i];
                    feats.row(i).head(omegas.half_d()) =
                        w * proj.array().sin().matrix().transpose();
                    feats.row(i).tail(omegas.half_d()) =
                        w * proj.array().cos().matrix().transpose();
                }
                approx = feats * feats.transpose();
            }

            const double sup_err = (approx - exact_gram.entries).cwiseAbs().maxCoeff();
            if (sup_err >= g.epsilon) failures[r] = 1;
        });

        row.failures = std::accumulate(failures.begin(), failures.end(), 0);
        row.failure_fraction = static_cast<double>(row.failures) / repetitions;
        row.flagged = binomial_tail_geq(repetitions, row.failures, g.delta) < 0.01;
        rows.push_back(row);
    }
    return rows;
}

void write_bounds_csv(std::ostream& os, BoundKind kind,
                      const std::vector<BoundsCoverageRow>& rows) {
    os.precision(12);
    os << "# " << code_version() << "\n";
    os << "kind,epsilon,delta,M,N_q,L_f,budget_shots,budget_dim,trials,failures,"
          "failure_fraction,flagged\n";
    const char* name = kind == BoundKind::DqfShots ? "dqf-shots"
                       : kind == BoundKind::RqfShots ? "rqf-shots"
                                                     : "rqf-dim";
    for (const auto& r : rows) {
        os << name << ',' << r.point.epsilon << ',' << r.point.delta << ',' << r.point.m
           << ',' << (Eigen::Index(1) << r.point.subset_qubits) << ',' << r.point.l_f
           << ',' << r.budget_shots << ',' << r.budget_dim << ',' << r.trials << ','
           << r.failures << ',' << r.failure_fraction << ',' << (r.flagged ? 1 : 0)
           << "\n";
    }
}

ExperimentConfig table_row_config(int table, const std::string& dataset,
                                  const std::string& method, Eigen::Index features) {
    if (table != 2 && table != 3) throw invalid_input("table_row_config: table is 2 or 3");
    ExperimentConfig cfg;
    cfg.dataset_name = dataset;
    cfg.method = method;
    cfg.feature_d = features;
    cfg.n_s = 500;
    cfg.mode = FeatureMode::Sampled;
    cfg.repetitions = 3;
    cfg.dq_subset = 1000;
    if (dataset == "wine-quality") {
        cfg.m_train = 4000;
        cfg.m_test = 898;
        cfg.task = "regression";
        cfg.lambda = 0.001;
    } else if (dataset == "magic04") {
        cfg.m_train = 18500;
        cfg.m_test = 520;
        cfg.task = "classification";
        cfg.c_reg = 1.0;
    } else {
        throw invalid_input("table_row_config: unknown dataset " + dataset);
    }
    if (table == 2) {
        cfg.kernel_kind = ProfileKind::InnerProduct;
        cfg.subsets = dataset == "wine-quality" ? std::vector<std::vector<int>>{{9, 10}}
                                                : std::vector<std::vector<int>>{{8, 9, 10}};
    } else {
        cfg.kernel_kind = ProfileKind::Laplace;
        cfg.gamma = 0.1;
        cfg.subsets.clear();
        if (dataset == "wine-quality")
            for (int j = 1; j <= 11; ++j) cfg.subsets.push_back({j});
        else
            for (int j = 1; j <= 5; ++j) cfg.subsets.push_back({2 * j - 1, 2 * j});
    }
    cfg.validate();
    return cfg;
}

std::vector<ExperimentConfig> table_rows(int table) {
    std::vector<ExperimentConfig> rows;
    if (table == 2) {
        rows.push_back(table_row_config(2, "wine-quality", "dqf", 16));
        rows.push_back(table_row_config(2, "wine-quality", "nystrom", 16));
        rows.push_back(table_row_config(2, "wine-quality", "nystrom", 100));
        rows.push_back(table_row_config(2, "magic04", "dqf", 64));
        rows.push_back(table_row_config(2, "magic04", "nystrom", 64));
        rows.push_back(table_row_config(2, "magic04", "nystrom", 100));
    } else {
        rows.push_back(table_row_config(3, "wine-quality", "rqf", 100));
        rows.push_back(table_row_config(3, "wine-quality", "rqf", 200));
        rows.push_back(table_row_config(3, "wine-quality", "nystrom", 100));
        rows.push_back(table_row_config(3, "wine-quality", "nystrom", 200));
        rows.push_back(table_row_config(3, "magic04", "rqf", 100));
        rows.push_back(table_row_config(3, "magic04", "rqf", 200));
        rows.push_back(table_row_config(3, "magic04", "nystrom", 100));
        rows.push_back(table_row_config(3, "magic04", "nystrom", 200));
    }
    return rows;
}

RegimeLabel regime_advice(double m, double n_q, double m0) {
    if (!(m > 0.0) || !(n_q > 0.0) || !(m0 > 0.0))
        throw invalid_input("regime_advice: inputs must be positive");
    if (n_q >= m) return RegimeLabel::NoGeneralization;
    if (n_q >= std::sqrt(m) && m <= m0) return RegimeLabel::ExactKernel;
    if (n_q < std::sqrt(m) && m * std::pow(n_q, 4) <= std::pow(m0, 3))
        return RegimeLabel::Features;
    return RegimeLabel::Neither;
}

std::string to_string(RegimeLabel label) {
    switch (label) {
        case RegimeLabel::NoGeneralization: return "no-generalization";
        case RegimeLabel::ExactKernel: return "exact-kernel";
        case RegimeLabel::Features: return "features";
        case RegimeLabel::Neither: return "neither";
    }
    return "?";
}

}  // namespace qkf
