// Acceptance suite: one line per criterion.  Criteria that need the UCI
// benchmark files skip with a notice when the files are absent.
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "qkf/experiment.hpp"
#include "qkf/haar.hpp"
#include "qkf/rng.hpp"

using namespace qkf;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = 3.14159265358979323846;

int g_failures = 0;

enum class Status { Pass, Fail, Skip };

void report(int id, const std::string& name, Status s, const std::string& detail) {
    const char* tag = s == Status::Pass ? "PASS" : s == Status::Fail ? "FAIL" : "SKIP";
    std::cout << "[" << tag << "] criterion " << id << " (" << name << "): " << detail
              << std::endl;
    if (s == Status::Fail) ++g_failures;
}

int worker_threads() {
    const unsigned hw = std::thread::hardware_concurrency();
    return static_cast<int>(std::min(hw == 0 ? 1u : hw, 8u));
}

Vector random_angles(int n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(0.0, kPi);
    Vector x(n);
    for (int i = 0; i < n; ++i) x[i] = unif(rng);
    return x;
}

QubitSubset random_subset(int n, int max_size, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> size_pick(1, std::min(n, max_size));
    const int size = size_pick(rng);
    std::vector<int> pool(n);
    for (int i = 0; i < n; ++i) pool[i] = i + 1;
    std::shuffle(pool.begin(), pool.end(), rng);
    pool.resize(size);
    std::sort(pool.begin(), pool.end());
    return QubitSubset(pool);
}

// ---- criterion 1: exact feature/kernel identity ----------------------------
void criterion_1() {
    auto rng = derive_stream(1001, {1});
    std::mt19937_64 unused(0);
    double worst = 0.0;
    int pairs = 0;
    for (int n = 2; n <= 6; ++n) {
        for (int rep = 0; rep < 100; ++rep) {
            FeatureMapConfig cfg;
            cfg.subsets.push_back({random_subset(n, 4, rng), 1.0});
            cfg.profile = KernelProfile::inner_product();
            const Vector x = random_angles(n, rng), xp = random_angles(n, rng);
            const FeatureVector za = dqf(x, cfg, unused), zb = dqf(xp, cfg, unused);
            const auto ra = reduced_density_matrix(encode(x), cfg.subsets[0].subset);
            const auto rb = reduced_density_matrix(encode(xp), cfg.subsets[0].subset);
            const double trace = (ra.entries() * rb.entries()).trace().real();
            worst = std::max(worst, std::abs(za.values.dot(zb.values) - trace));
            ++pairs;
        }
    }
    std::ostringstream d;
    d << pairs << " pairs, max |z.z' - Tr(rho rho')| = " << worst << " (< 1e-10)";
    report(1, "exact feature identity", worst < 1e-10 ? Status::Pass : Status::Fail,
           d.str());
}

// ---- criterion 2: random-feature self normalization ------------------------
void criterion_2() {
    auto rng = derive_stream(1001, {2});
    std::mt19937_64 unused(0);
    std::uniform_int_distribution<int> k_pick(1, 3), d_pick(1, 12), q_pick(1, 2);
    std::uniform_real_distribution<double> a_pick(0.2, 3.0);
    double worst = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
        FeatureMapConfig cfg;
        const int blocks = k_pick(rng);
        for (int k = 0; k < blocks; ++k)
            cfg.subsets.push_back({random_subset(3, q_pick(rng), rng), a_pick(rng)});
        cfg.profile = rep % 2 ? KernelProfile::gaussian_sq(0.5) : KernelProfile::laplace(0.4);
        std::vector<OmegaSample> omegas;
        for (const auto& ws : cfg.subsets) {
            const Eigen::Index dim = Eigen::Index(1) << (2 * ws.subset.size());
            const double n_q = static_cast<double>(Eigen::Index(1) << ws.subset.size());
            omegas.push_back(sample_omegas(cfg.profile, dim, d_pick(rng), n_q, rng));
        }
        const FeatureVector z = rqf(random_angles(3, rng), cfg, omegas, unused);
        worst = std::max(worst, std::abs(z.values.squaredNorm() - cfg.alpha_sum()));
    }
    std::ostringstream d;
    d << "100 configs, max |z.z - sum(alpha)| = " << worst << " (< 1e-12)";
    report(2, "random-feature normalization", worst < 1e-12 ? Status::Pass : Status::Fail,
           d.str());
}

// ---- criterion 3: spectral laws against the closed-form profiles -----------
void criterion_3() {
    auto rng = derive_stream(1001, {3});
    std::uniform_real_distribution<double> g_delta(-0.2, 0.2), c_delta(-0.5, 0.5);
    const Eigen::Index draws = 1000000, chunk = 10000;
    double worst = 0.0;

    for (int rep = 0; rep < 10; ++rep) {  // gaussian-sq law, dim 16, N_q 4
        const double gamma = 0.25, n_q = 4.0;
        Vector delta(16);
        for (Eigen::Index i = 0; i < 16; ++i) delta[i] = g_delta(rng);
        double acc = 0.0;
        for (Eigen::Index done = 0; done < draws; done += chunk) {
            const OmegaSample o =
                sample_omegas(KernelProfile::gaussian_sq(gamma), 16, chunk, n_q, rng);
            acc += (o.vectors.transpose() * delta).array().cos().sum();
        }
        const double exact = std::exp(-gamma * n_q * delta.squaredNorm() / 4.0);
        worst = std::max(worst, std::abs(acc / static_cast<double>(draws) - exact));
    }
    for (int rep = 0; rep < 10; ++rep) {  // cauchy law, dim 4, N_q 2
        const double gamma = 0.5, n_q = 2.0;
        Vector delta(4);
        for (Eigen::Index i = 0; i < 4; ++i) delta[i] = c_delta(rng);
        double acc = 0.0;
        for (Eigen::Index done = 0; done < draws; done += chunk) {
            const OmegaSample o =
                sample_omegas(KernelProfile::laplace(gamma), 4, chunk, n_q, rng);
            acc += (o.vectors.transpose() * delta).array().cos().sum();
        }
        const double exact = std::exp(-gamma * std::sqrt(n_q) / 2.0 * delta.norm());
        worst = std::max(worst, std::abs(acc / static_cast<double>(draws) - exact));
    }
    std::ostringstream d;
    d << "20 deltas x 1e6 draws, max |MC - closed form| = " << worst << " (< 0.005)";
    report(3, "frequency laws", worst < 0.005 ? Status::Pass : Status::Fail, d.str());
}

// ---- criterion 4: shot-budget coverage -------------------------------------
void criterion_4() {
    BoundsGridPoint g;
    g.epsilon = 0.3;
    g.delta = 0.1;
    g.m = 50;
    g.subset_qubits = 2;  // N_q = 4
    const auto rows = verify_bounds(BoundKind::DqfShots, {g}, 200, 1001, worker_threads());
    const auto& r = rows[0];
    std::ostringstream d;
    d << "n_s = " << r.budget_shots << ", failures " << r.failures << "/200"
      << ", one-sided binomial p = " << binomial_tail_geq(r.trials, r.failures, g.delta);
    report(4, "shot-budget coverage", r.flagged ? Status::Fail : Status::Pass, d.str());
}

// ---- criterion 5: 1/sqrt(D) rate -------------------------------------------
void criterion_5() {
    auto rng = derive_stream(1001, {5});
    std::mt19937_64 unused(0);
    FeatureMapConfig cfg;
    cfg.subsets.push_back({QubitSubset({1, 2}), 1.0});
    cfg.profile = KernelProfile::gaussian_sq(0.6);
    std::vector<SampleRep> reps;
    for (int i = 0; i < 50; ++i)
        reps.push_back(sample_rep(random_angles(3, rng), cfg, unused));
    const GramMatrix exact = gram_matrix(reps, kernel_evaluator(cfg));

    auto sup_error = [&](Eigen::Index dim) {
        const OmegaSample o = sample_omegas(cfg.profile, 16, dim / 2, 4.0, rng);
        Matrix z(50, dim);
        const double w = std::sqrt(1.0 / static_cast<double>(dim / 2));
        for (int i = 0; i < 50; ++i) {
            const Vector proj = o.vectors.transpose() * reps[i].coefficients[0];
            z.row(i).head(dim / 2) = w * proj.array().sin().matrix().transpose();
            z.row(i).tail(dim / 2) = w * proj.array().cos().matrix().transpose();
        }
        return (z * z.transpose() - exact.entries).cwiseAbs().maxCoeff();
    };

    double ratio = 0.0;
    for (int s = 0; s < 20; ++s) ratio += sup_error(400) / sup_error(100);
    ratio /= 20.0;
    std::ostringstream d;
    d << "mean sup-error ratio D=400 / D=100 over 20 seeds = " << ratio
      << " (in [0.35, 0.7])";
    report(5, "random-feature rate", ratio >= 0.35 && ratio <= 0.7 ? Status::Pass : Status::Fail,
           d.str());
}

// ---- criterion 6: landmark-feature exactness -------------------------------
void criterion_6() {
    auto rng = derive_stream(1001, {6});
    std::mt19937_64 unused(0);
    FeatureMapConfig cfg;
    cfg.subsets.push_back({QubitSubset({1, 2}), 1.0});
    cfg.profile = KernelProfile::gaussian_sq(0.5);
    std::vector<SampleRep> reps;
    for (int i = 0; i < 60; ++i)
        reps.push_back(sample_rep(random_angles(3, rng), cfg, unused));
    const KernelFn kernel = kernel_evaluator(cfg);
    const GramMatrix exact = gram_matrix(reps, kernel);
    const NystromFeatures nys = nystrom_features(reps, kernel, 60, rng);
    Matrix z(60, nys.dim());
    for (int i = 0; i < 60; ++i) z.row(i) = nys.map(reps[i]).transpose();
    const double err = (z * z.transpose() - exact.entries).cwiseAbs().maxCoeff();
    std::ostringstream d;
    d << "D = M = 60, max |ZZ' - Q| = " << err << " (< 1e-8)";
    report(6, "landmark exactness", err < 1e-8 ? Status::Pass : Status::Fail, d.str());
}

// ---- criterion 7: primal-dual ridge identity -------------------------------
void criterion_7() {
    auto rng = derive_stream(1001, {7});
    std::normal_distribution<double> normal(0.0, 1.0);
    double worst = 0.0;
    for (int rep = 0; rep < 20; ++rep) {
        const Eigen::Index m = 35, dim = 6, t = 12;
        Matrix z(m, dim), zt(t, dim);
        Vector y(m);
        for (Eigen::Index i = 0; i < m; ++i) {
            y[i] = normal(rng);
            for (Eigen::Index j = 0; j < dim; ++j) z(i, j) = normal(rng);
        }
        for (Eigen::Index i = 0; i < t; ++i)
            for (Eigen::Index j = 0; j < dim; ++j) zt(i, j) = normal(rng);
        const double lambda = 0.05 + rep * 0.01;

        const RidgeModel primal = ridge_fit(z, y, lambda);
        const Vector pred_primal = primal.predict(zt);

        // The dual form sees the train-centered features.
        const Vector col_mean = z.colwise().mean();
        const Matrix zc = z.rowwise() - col_mean.transpose();
        const Matrix ztc = zt.rowwise() - col_mean.transpose();
        const KernelRidgeModel dual = kernel_ridge_fit(zc * zc.transpose(), y, lambda);
        const Vector pred_dual = dual.predict(zc * ztc.transpose());

        worst = std::max(worst, (pred_primal - pred_dual).cwiseAbs().maxCoeff());
    }
    std::ostringstream d;
    d << "20 problems, max |primal - dual| prediction gap = " << worst << " (< 1e-8)";
    report(7, "primal-dual ridge", worst < 1e-8 ? Status::Pass : Status::Fail, d.str());
}

// ---- dataset helpers for criteria 8, 9, 11 ---------------------------------
std::string data_dir() {
    if (const char* env = std::getenv("QKF_DATA_DIR")) return env;
    return "data";
}

bool have_file(const std::string& name) { return fs::exists(fs::path(data_dir()) / name); }

bool have_datasets(int id, const std::string& crit_name) {
    const bool wine = have_file("winequality-white.csv");
    const bool magic = have_file("magic04.data");
    if (wine && magic) return true;
    std::string missing;
    if (!wine) missing += " winequality-white.csv";
    if (!magic) missing += " magic04.data";
    report(id, crit_name, Status::Skip,
           "benchmark files not found under '" + data_dir() + "':" + missing +
               " -- run scripts/fetch_datasets.sh");
    return false;
}

void criterion_8() {
    if (!have_datasets(8, "table-2 bands")) return;
    setenv("QKF_DATA_DIR", data_dir().c_str(), 1);
    const int threads = worker_threads();

    const ExperimentResult wine =
        run_experiment(table_row_config(2, "wine-quality", "dqf", 16), 7, threads);
    const bool wine_ok = wine.dq_mean >= 0.002 && wine.dq_mean <= 0.02 &&
                         wine.metric_mean >= 0.45 && wine.metric_mean <= 0.70;

    const ExperimentResult magic =
        run_experiment(table_row_config(2, "magic04", "dqf", 64), 7, threads);
    const bool magic_ok = magic.dq_mean >= 0.005 && magic.dq_mean <= 0.03 &&
                          magic.metric_mean >= 0.78;

    std::ostringstream d;
    d << "wine d_q=" << wine.dq_mean << " mse=" << wine.metric_mean
      << "; magic04 d_q=" << magic.dq_mean << " acc=" << magic.metric_mean;
    report(8, "table-2 bands", wine_ok && magic_ok ? Status::Pass : Status::Fail, d.str());
}

void criterion_9() {
    if (!have_datasets(9, "table-3 bands")) return;
    setenv("QKF_DATA_DIR", data_dir().c_str(), 1);
    const int threads = worker_threads();

    const ExperimentResult wine =
        run_experiment(table_row_config(3, "wine-quality", "rqf", 100), 7, threads);
    const bool wine_ok = wine.dq_mean >= 0.01 && wine.dq_mean <= 0.04 &&
                         wine.metric_mean >= 0.42 && wine.metric_mean <= 0.65;

    const ExperimentResult magic =
        run_experiment(table_row_config(3, "magic04", "rqf", 200), 7, threads);
    const bool magic_ok = magic.metric_mean >= 0.82;

    std::ostringstream d;
    d << "wine d_q=" << wine.dq_mean << " mse=" << wine.metric_mean
      << "; magic04 acc=" << magic.metric_mean;
    report(9, "table-3 bands", wine_ok && magic_ok ? Status::Pass : Status::Fail, d.str());
}

// ---- criterion 10: Haar moments --------------------------------------------
void criterion_10() {
    const int n = 4;
    auto rng = derive_stream(1001, {10, 101});

    const auto diag_spec = ReducedObservableSpec::make(n, QubitSubset({1}), 2, 2, {});
    const HaarMomentRow diag = haar_moment_report(diag_spec, 0, 0, 10000, rng);
    const bool diag_ok = std::abs(diag.moment1_est - diag.moment1_pred) <=
                         3.0 * diag.moment1_se;

    const auto off_spec = ReducedObservableSpec::make(n, QubitSubset({1}), 2, 7, {});
    const HaarMomentRow off = haar_moment_report(off_spec, 0, 1, 10000, rng);
    const double budget = 10.0 / std::pow(2.0, n);
    const bool off_ok = std::abs(off.moment1_est) <= 3.0 * off.moment1_se + budget &&
                        std::abs(off.moment2_est) <= 3.0 * off.moment2_se + budget;

    bool decreasing = true;
    double prev = std::numeric_limits<double>::infinity();
    std::ostringstream trail;
    for (int nn = 3; nn <= 6; ++nn) {
        const auto spec = ReducedObservableSpec::make(nn, QubitSubset({1}), 2, 7, {});
        auto r = derive_stream(1001, {10, static_cast<std::uint64_t>(nn)});
        const HaarMomentRow row = haar_moment_report(spec, 0, 1, 2000, r);
        trail << (nn > 3 ? " > " : "") << row.moment2_est;
        if (row.moment2_est >= prev) decreasing = false;
        prev = row.moment2_est;
    }

    std::ostringstream d;
    d << "diag |est-pred|=" << std::abs(diag.moment1_est - diag.moment1_pred)
      << " (3se=" << 3.0 * diag.moment1_se << "); off-diag m1=" << off.moment1_est
      << " m2=" << off.moment2_est << " (budget " << budget
      << "); off-diag magnitude " << trail.str();
    report(10, "Haar moments",
           diag_ok && off_ok && decreasing ? Status::Pass : Status::Fail, d.str());
}

// ---- criterion 11: byte-identical table reproduction -----------------------
std::string g_self_dir;

void criterion_11() {
    if (!have_datasets(11, "determinism")) return;
    const fs::path cli = fs::path(g_self_dir) / "qkf";
    if (!fs::exists(cli)) {
        report(11, "determinism", Status::Skip,
               "cli binary not found next to the acceptance binary: " + cli.string());
        return;
    }
    const std::string out_a = "/tmp/qkf_accept_run_a", out_b = "/tmp/qkf_accept_run_b";
    fs::remove_all(out_a);
    fs::remove_all(out_b);
    const std::string base = cli.string() + " reproduce-table 2 --seed 7 --threads " +
                             std::to_string(worker_threads());
    if (std::system((base + " --out " + out_a + " > /dev/null").c_str()) != 0 ||
        std::system((base + " --out " + out_b + " > /dev/null").c_str()) != 0) {
        report(11, "determinism", Status::Fail, "cli run failed");
        return;
    }
    auto slurp = [](const fs::path& p) {
        std::ifstream is(p, std::ios::binary);
        std::ostringstream os;
        os << is.rdbuf();
        return os.str();
    };
    bool identical = true;
    int files = 0;
    for (const auto& entry : fs::directory_iterator(out_a)) {
        ++files;
        const fs::path other = fs::path(out_b) / entry.path().filename();
        if (!fs::exists(other) || slurp(entry.path()) != slurp(other)) identical = false;
    }
    std::ostringstream d;
    d << files << " csv files compared byte-for-byte across two runs";
    report(11, "determinism", identical && files > 0 ? Status::Pass : Status::Fail,
           d.str());
}

}  // namespace

int main(int, char** argv) {
    g_self_dir = fs::path(argv[0]).parent_path().string();
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    criterion_11();
    if (g_failures > 0) {
        std::cout << g_failures << " criteria FAILED" << std::endl;
        return 1;
    }
    std::cout << "all evaluated criteria passed" << std::endl;
    return 0;
}
