#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "qkf/experiment.hpp"
#include "qkf/haar.hpp"
#include "qkf/rng.hpp"

namespace fs = std::filesystem;
using namespace qkf;

namespace {

struct CommonOpts {
    std::string config_path;
    std::uint64_t seed = 7;
    std::string out_dir = ".";
    int threads = 1;
    std::int64_t dq_subset = 0;  // 0 = keep config value
    std::string lambda_convention;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool need_config) {
    auto* c = cmd->add_option("--config", o.config_path, "experiment config file");
    if (need_config) c->required();
    cmd->add_option("--seed", o.seed, "master seed");
    cmd->add_option("--out", o.out_dir, "output directory");
    cmd->add_option("--threads", o.threads, "worker threads");
    cmd->add_option("--dq-subset", o.dq_subset, "discrepancy subset size override");
    cmd->add_option("--lambda-convention", o.lambda_convention,
                    "ridge lambda convention: standard|eq2")
        ->check(CLI::IsMember({"standard", "eq2"}));
}

ExperimentConfig load_with_overrides(const CommonOpts& o) {
    ExperimentConfig cfg = load_experiment_config(o.config_path);
    if (o.dq_subset > 0) cfg.dq_subset = o.dq_subset;
    if (!o.lambda_convention.empty()) cfg.lambda_convention = o.lambda_convention;
    return cfg;
}

std::ofstream open_out(const CommonOpts& o, const std::string& name) {
    fs::create_directories(o.out_dir);
    const fs::path p = fs::path(o.out_dir) / name;
    std::ofstream os(p);
    if (!os) throw config_error("cannot write " + p.string());
    std::cout << "writing " << p.string() << "\n";
    return os;
}

void write_feature_matrix(std::ostream& os, const ExperimentConfig& cfg,
                          const Matrix& z, const Vector& y) {
    os.precision(12);
    os << "# " << code_version() << " config_hash=" << std::hex << cfg.hash()
       << std::dec << "\n";
    os << "label";
    for (Eigen::Index j = 0; j < z.cols(); ++j) os << ",z" << j;
    os << "\n";
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
        os << y[i];
        for (Eigen::Index j = 0; j < z.cols(); ++j) os << ',' << z(i, j);
        os << "\n";
    }
}

// One trial's feature matrices, via the experiment driver's conventions: a
// single-repetition run whose trial features are recomputed here.
struct FeatureSet {
    Matrix train, test;
    DatasetSplit split;
};

FeatureSet build_features(const ExperimentConfig& cfg, std::uint64_t seed, int threads) {
    ExperimentConfig one = cfg;
    one.repetitions = 1;
    one.dq_subset = 1;
    FeatureSet out;
    out.split = load_dataset_for(cfg);
    // Re-run through run_experiment for d_q bookkeeping is wasteful here; the
    // trial features are produced directly by the library calls instead.
    FeatureMapConfig fmc = cfg.feature_map_config();
    auto reps_of = [&](const Matrix& x, std::uint64_t side) {
        std::vector<SampleRep> reps(x.rows());
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
            auto rng = derive_stream(seed, {0x22u, 1u, 0x33u, side,
                                            static_cast<std::uint64_t>(i)});
            reps[i] = sample_rep(x.row(i).transpose(), fmc, rng);
        }
        return reps;
    };
    const auto train_reps = reps_of(out.split.train_x, 1);
    const auto test_reps = reps_of(out.split.test_x, 2);

    auto features_of = [&](const std::vector<SampleRep>& reps,
                           const std::vector<OmegaSample>& omegas) {
        Matrix z;
        if (cfg.method == "rqf") {
            Eigen::Index total = 0;
            for (const auto& o : omegas) total += 2 * o.half_d();
            z.resize(static_cast<Eigen::Index>(reps.size()), total);
            for (std::size_t i = 0; i < reps.size(); ++i) {
                Eigen::Index off = 0;
                for (std::size_t k = 0; k < fmc.subsets.size(); ++k) {
                    const Vector proj =
                        omegas[k].vectors.transpose() * reps[i].coefficients[k];
                    const double w = std::sqrt(fmc.subsets[k].alpha /
                                               static_cast<double>(proj.size()));
                    z.row(i).segment(off, proj.size()) =
                        w * proj.array().sin().matrix().transpose();
                    z.row(i).segment(off + proj.size(), proj.size()) =
                        w * proj.array().cos().matrix().transpose();
                    off += 2 * proj.size();
                }
            }
        } else {
            Eigen::Index total = 0;
            for (const auto& ws : fmc.subsets)
                total += Eigen::Index(1) << (2 * ws.subset.size());
            z.resize(static_cast<Eigen::Index>(reps.size()), total);
            for (std::size_t i = 0; i < reps.size(); ++i) {
                Eigen::Index off = 0;
                for (std::size_t k = 0; k < fmc.subsets.size(); ++k) {
                    const auto& c = reps[i].coefficients[k];
                    const double nq = static_cast<double>(
                        Eigen::Index(1) << fmc.subsets[k].subset.size());
                    z.row(static_cast<Eigen::Index>(i)).segment(off, c.size()) =
                        std::sqrt(fmc.subsets[k].alpha) * std::sqrt(nq) *
                        c.transpose();
                    off += c.size();
                }
            }
        }
        return z;
    };

    if (cfg.method == "nystrom") {
        auto rng = derive_stream(seed, {0x22u, 1u, 0x55u});
        const auto extractor =
            nystrom_features(train_reps, kernel_evaluator(fmc), cfg.feature_d, rng);
        out.train.resize(out.split.train_x.rows(), extractor.dim());
        for (Eigen::Index i = 0; i < out.train.rows(); ++i)
            out.train.row(i) = extractor.map(train_reps[i]).transpose();
        out.test.resize(out.split.test_x.rows(), extractor.dim());
        for (Eigen::Index i = 0; i < out.test.rows(); ++i)
            out.test.row(i) = extractor.map(test_reps[i]).transpose();
        return out;
    }

    std::vector<OmegaSample> omegas;
    if (cfg.method == "rqf") {
        for (std::size_t k = 0; k < fmc.subsets.size(); ++k) {
            auto rng = derive_stream(seed, {0x22u, 1u, 0x44u,
                                            static_cast<std::uint64_t>(k)});
            const Eigen::Index dim = Eigen::Index(1)
                                     << (2 * fmc.subsets[k].subset.size());
            omegas.push_back(sample_omegas(
                fmc.profile, dim, cfg.feature_d / 2,
                static_cast<double>(Eigen::Index(1) << fmc.subsets[k].subset.size()),
                rng));
        }
    }
    out.train = features_of(train_reps, omegas);
    out.test = features_of(test_reps, omegas);
    (void)threads;
    return out;
}

int run_reproduce(int table, const CommonOpts& o) {
    std::vector<ExperimentConfig> rows = table_rows(table);

    std::ostringstream table_csv;
    table_csv.precision(12);
    table_csv << "# " << code_version() << " table=" << table << " seed=" << o.seed
              << "\n";
    table_csv << "dataset,method,features,d_q,d_q_sem,metric,metric_sem,"
                 "split_fingerprint\n";
    int row_id = 0;
    for (auto cfg : rows) {
        ++row_id;
        if (o.dq_subset > 0) cfg.dq_subset = o.dq_subset;
        if (!o.lambda_convention.empty()) cfg.lambda_convention = o.lambda_convention;
        std::cout << "row " << row_id << ": " << cfg.dataset_name << " " << cfg.method
                  << " D=" << cfg.feature_d << " ..." << std::flush;
        const ExperimentResult res = run_experiment(cfg, o.seed, o.threads);
        std::cout << " d_q=" << res.dq_mean << "\n";
        {
            std::ostringstream name;
            name << "table" << table << "_row" << row_id << ".csv";
            auto os = open_out(o, name.str());
            write_experiment_csv(os, res);
        }
        table_csv << res.dataset_name << ',' << res.method << ','
                  << res.trials.front().feature_dim << ',' << res.dq_mean << ','
                  << res.dq_sem << ',' << res.metric_mean << ',' << res.metric_sem
                  << ',' << res.split_fingerprint << "\n";
    }
    auto os = open_out(o, "table" + std::to_string(table) + ".csv");
    os << table_csv.str();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quantum kernel feature experiments"};
    app.require_subcommand(1);

    CommonOpts feat_o, train_o, eval_o, dq_o, bounds_o, haar_o, repro_o;

    auto* cmd_features =
        app.add_subcommand("features", "write train/test feature matrices");
    add_common(cmd_features, feat_o, true);

    auto* cmd_train = app.add_subcommand("train", "fit a model and save it");
    add_common(cmd_train, train_o, true);

    auto* cmd_eval =
        app.add_subcommand("evaluate", "fit on train, report test metrics");
    add_common(cmd_eval, eval_o, true);

    auto* cmd_dq = app.add_subcommand("dq", "kernel approximation discrepancy");
    add_common(cmd_dq, dq_o, true);

    auto* cmd_bounds =
        app.add_subcommand("bounds", "Monte-Carlo coverage of the error bounds");
    add_common(cmd_bounds, bounds_o, false);
    std::string bound_kind = "dqf-shots";
    int bound_trials = 100;
    cmd_bounds->add_option("--kind", bound_kind, "dqf-shots|rqf-shots|rqf-dim")
        ->check(CLI::IsMember({"dqf-shots", "rqf-shots", "rqf-dim"}));
    cmd_bounds->add_option("--trials", bound_trials, "trials per grid point");

    auto* cmd_haar = app.add_subcommand("haar", "Haar moments of reduced observables");
    add_common(cmd_haar, haar_o, false);
    int haar_n = 4, haar_m = 1;
    std::int64_t haar_samples = 10000;
    cmd_haar->add_option("--n", haar_n, "total qubits");
    cmd_haar->add_option("--m", haar_m, "kept qubits");
    cmd_haar->add_option("--samples", haar_samples, "Haar samples");

    auto* cmd_advice = app.add_subcommand("advice", "regime crossover advice");
    double adv_m = 0, adv_nq = 0, adv_m0 = 0;
    cmd_advice->add_option("--m", adv_m, "dataset size M")->required();
    cmd_advice->add_option("--nq", adv_nq, "Hilbert dimension N_q")->required();
    cmd_advice->add_option("--m0", adv_m0, "largest tractable Gram size M0")->required();

    auto* cmd_repro = app.add_subcommand("reproduce-table", "reproduce a results table");
    add_common(cmd_repro, repro_o, false);
    int table_id = 2;
    cmd_repro->add_option("table", table_id, "2 or 3")
        ->required()
        ->check(CLI::IsMember({2, 3}));

    CLI11_PARSE(app, argc, argv);

    try {
        if (*cmd_features) {
            const ExperimentConfig cfg = load_with_overrides(feat_o);
            const FeatureSet fs = build_features(cfg, feat_o.seed, feat_o.threads);
            {
                auto os = open_out(feat_o, "features_train.csv");
                write_feature_matrix(os, cfg, fs.train, fs.split.train_y);
            }
            auto os = open_out(feat_o, "features_test.csv");
            write_feature_matrix(os, cfg, fs.test, fs.split.test_y);
        } else if (*cmd_train) {
            const ExperimentConfig cfg = load_with_overrides(train_o);
            const FeatureSet fs = build_features(cfg, train_o.seed, train_o.threads);
            auto os = open_out(train_o, "model.txt");
            if (fs.split.task == Task::Regression) {
                double lambda = cfg.lambda;
                if (cfg.lambda_convention == "eq2")
                    lambda = 2.0 * cfg.lambda * static_cast<double>(fs.train.rows());
                const RidgeModel m = ridge_fit(fs.train, fs.split.train_y, lambda);
                save_model(os, m);
                std::cout << "train mse="
                          << evaluate_regression(m.predict(fs.train), fs.split.train_y).mse
                          << "\n";
            } else {
                auto rng = derive_stream(train_o.seed, {0x66u});
                const SvmModel m = svm_fit(fs.train, fs.split.train_y, cfg.c_reg, rng);
                save_model(os, m);
                std::cout << "train accuracy="
                          << evaluate_classification(m.decision(fs.train), fs.split.train_y)
                                 .accuracy
                          << "\n";
            }
        } else if (*cmd_eval) {
            const ExperimentConfig cfg = load_with_overrides(eval_o);
            const ExperimentResult res = run_experiment(cfg, eval_o.seed, eval_o.threads);
            auto os = open_out(eval_o, "evaluate.csv");
            write_experiment_csv(os, res);
            if (res.metrics_available)
                std::cout << (res.task == Task::Regression ? "test mse=" : "test accuracy=")
                          << res.metric_mean << " (sem " << res.metric_sem << ")\n";
            std::cout << "d_q=" << res.dq_mean << " (sem " << res.dq_sem << ")\n";
        } else if (*cmd_dq) {
            ExperimentConfig cfg = load_with_overrides(dq_o);
            const ExperimentResult res = run_experiment(cfg, dq_o.seed, dq_o.threads);
            std::cout << "d_q=" << res.dq_mean << " (sem " << res.dq_sem << ")\n";
        } else if (*cmd_bounds) {
            const BoundKind kind = bound_kind == "dqf-shots"  ? BoundKind::DqfShots
                                   : bound_kind == "rqf-shots" ? BoundKind::RqfShots
                                                               : BoundKind::RqfDim;
            std::vector<BoundsGridPoint> grid;
            for (double eps : {0.3, 0.5})
                for (int mq : {1, 2}) {
                    BoundsGridPoint g;
                    g.epsilon = eps;
                    g.delta = 0.1;
                    g.m = 20;
                    g.subset_qubits = mq;
                    g.l_f = 0.5;
                    grid.push_back(g);
                }
            const auto rows =
                verify_bounds(kind, grid, bound_trials, bounds_o.seed, bounds_o.threads);
            auto os = open_out(bounds_o, "bounds_" + bound_kind + ".csv");
            write_bounds_csv(os, kind, rows);
            for (const auto& r : rows)
                std::cout << "eps=" << r.point.epsilon << " N_q="
                          << (1 << r.point.subset_qubits) << " failures=" << r.failures
                          << "/" << r.trials << (r.flagged ? " FLAGGED" : "") << "\n";
        } else if (*cmd_haar) {
            std::vector<int> q_ids(haar_m);
            for (int i = 0; i < haar_m; ++i) q_ids[i] = i + 1;
            const auto spec =
                ReducedObservableSpec::make(haar_n, QubitSubset(q_ids), 2, 2, {});
            auto rng = derive_stream(haar_o.seed, {0xAAu});
            const HaarMomentRow row = haar_moment_report(spec, 0, 0, haar_samples, rng);
            std::cout << "n=" << row.n << " m=" << row.m << " samples=" << row.samples
                      << "\nE[O]      = " << row.moment1_est << " +- " << row.moment1_se
                      << "  (predicted " << row.moment1_pred << ")"
                      << "\nE[|O|^2]  = " << row.moment2_est << " +- " << row.moment2_se
                      << "  (predicted " << row.moment2_pred << ")\n";
        } else if (*cmd_advice) {
            std::cout << to_string(regime_advice(adv_m, adv_nq, adv_m0)) << "\n";
        } else if (*cmd_repro) {
            return run_reproduce(table_id, repro_o);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
