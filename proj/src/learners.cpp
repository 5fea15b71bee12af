#include "qkf/learners.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <vector>

namespace qkf {

RidgeModel ridge_fit(const Matrix& z, const Vector& y, double lambda) {
    if (z.rows() < 1 || z.cols() < 1) throw invalid_input("ridge_fit: empty problem");
    if (z.rows() != y.size()) throw invalid_input("ridge_fit: shape mismatch");
    if (lambda < 0.0) throw invalid_input("ridge_fit: lambda must be >= 0");

    const double y_mean = y.mean();
    const Vector col_mean = z.colwise().mean();
    const Matrix zc = z.rowwise() - col_mean.transpose();
    const Vector yc = y.array() - y_mean;

    Matrix normal = zc.transpose() * zc;
    normal.diagonal().array() += lambda;

    Vector w;
    if (lambda == 0.0) {
        Eigen::ColPivHouseholderQR<Matrix> qr(zc);
        if (qr.rank() < z.cols())
            throw singular_matrix_error("ridge_fit: singular system with lambda = 0");
        w = qr.solve(yc);
    } else {
        w = Eigen::LDLT<Matrix>(normal).solve(zc.transpose() * yc);
    }

    RidgeModel model;
    model.weights = w;
    model.intercept = y_mean - col_mean.dot(w);
    model.lambda = lambda;
    if (!model.weights.allFinite() || !std::isfinite(model.intercept))
        throw singular_matrix_error("ridge_fit: non-finite solution");
    return model;
}

KernelRidgeModel kernel_ridge_fit(const Matrix& q, const Vector& y, double lambda) {
    if (q.rows() != q.cols() || q.rows() != y.size())
        throw invalid_input("kernel_ridge_fit: shape mismatch");
    if ((q - q.transpose()).cwiseAbs().maxCoeff() > 1e-10)
        throw invalid_input("kernel_ridge_fit: Gram matrix not symmetric");
    if (!(lambda > 0.0)) throw invalid_input("kernel_ridge_fit: lambda must be > 0");

    Matrix sys = q;
    sys.diagonal().array() += lambda;

    KernelRidgeModel model;
    model.lambda = lambda;
    model.y_mean = y.mean();
    model.coefficients = Eigen::LDLT<Matrix>(sys).solve((y.array() - model.y_mean).matrix());

    const Eigen::SelfAdjointEigenSolver<Matrix> eig(sys, Eigen::EigenvaluesOnly);
    const double ev_min = eig.eigenvalues().cwiseAbs().minCoeff();
    const double ev_max = eig.eigenvalues().cwiseAbs().maxCoeff();
    model.ill_conditioned = (ev_min <= 0.0) || (ev_max / ev_min > 1e14);
    return model;
}

SvmModel svm_fit(const Matrix& z, const Vector& y, double c, std::mt19937_64& rng) {
    const Eigen::Index m = z.rows();
    const Eigen::Index d = z.cols();
    if (m < 2 || d < 1) throw invalid_input("svm_fit: empty problem");
    if (y.size() != m) throw invalid_input("svm_fit: shape mismatch");
    if (!(c > 0.0)) throw invalid_input("svm_fit: C must be > 0");
    bool pos = false, neg = false;
    for (Eigen::Index i = 0; i < m; ++i) {
        if (y[i] == 1.0) pos = true;
        else if (y[i] == -1.0) neg = true;
        else throw invalid_input("svm_fit: labels must be +-1");
    }
    if (!pos || !neg) throw invalid_input("svm_fit: both classes must be present");

    // Augmented representation: z_bar = (z, 1), so the bias is the last
    // weight component.
    Vector qdiag(m);
    for (Eigen::Index i = 0; i < m; ++i) qdiag[i] = z.row(i).squaredNorm() + 1.0;

    Vector alpha = Vector::Zero(m);
    Vector w = Vector::Zero(d);
    double b = 0.0;
    const double gap_tol = 1e-4 * c * static_cast<double>(m);
    const int max_epochs = 1000;

    std::vector<Eigen::Index> order(m);
    std::iota(order.begin(), order.end(), Eigen::Index(0));

    double gap = 0.0;
    int epoch = 0;
    for (; epoch < max_epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (Eigen::Index i : order) {
            const double margin = y[i] * (z.row(i).dot(w) + b);
            const double grad = margin - 1.0;
            const double old = alpha[i];
            const double next = std::clamp(old - grad / qdiag[i], 0.0, c);
            if (next != old) {
                const double step = (next - old) * y[i];
                w += step * z.row(i).transpose();
                b += step;
                alpha[i] = next;
            }
        }
        const double w_norm_sq = w.squaredNorm() + b * b;
        double hinge = 0.0;
        for (Eigen::Index i = 0; i < m; ++i)
            hinge += std::max(0.0, 1.0 - y[i] * (z.row(i).dot(w) + b));
        const double primal = 0.5 * w_norm_sq + c * hinge;
        const double dual = alpha.sum() - 0.5 * w_norm_sq;
        gap = primal - dual;
        if (gap <= gap_tol) break;
    }

    SvmModel model;
    model.weights = w;
    model.bias = b;
    model.c = c;
    model.duality_gap = gap;
    model.epochs = epoch + 1;
    return model;
}

double svm_primal_objective(const SvmModel& model, const Matrix& z, const Vector& y) {
    double hinge = 0.0;
    for (Eigen::Index i = 0; i < z.rows(); ++i)
        hinge += std::max(0.0, 1.0 - y[i] * model.decision(Vector(z.row(i))));
    return 0.5 * model.weights.squaredNorm() + model.c * hinge;
}

Metrics evaluate_regression(const Vector& predictions, const Vector& y) {
    if (predictions.size() != y.size()) throw invalid_input("evaluate: shape mismatch");
    Metrics out;
    out.mse = (predictions - y).squaredNorm() / static_cast<double>(y.size());
    return out;
}

Metrics evaluate_classification(const Vector& decisions, const Vector& y) {
    if (decisions.size() != y.size()) throw invalid_input("evaluate: shape mismatch");
    Eigen::Index correct = 0;
    for (Eigen::Index i = 0; i < y.size(); ++i)
        if ((decisions[i] >= 0.0 ? 1.0 : -1.0) == y[i]) ++correct;
    Metrics out;
    out.accuracy = static_cast<double>(correct) / static_cast<double>(y.size());
    return out;
}

namespace {
constexpr const char* kFormatVersion = "qkf-model-v1";
}

void save_model(std::ostream& os, const RidgeModel& m) {
    os.precision(17);
    os << kFormatVersion << " ridge " << m.lambda << ' ' << m.weights.size() << '\n';
    os << m.intercept << '\n';
    for (Eigen::Index i = 0; i < m.weights.size(); ++i) os << m.weights[i] << '\n';
}

void save_model(std::ostream& os, const SvmModel& m) {
    os.precision(17);
    os << kFormatVersion << " svm " << m.c << ' ' << m.weights.size() << '\n';
    os << m.bias << '\n';
    for (Eigen::Index i = 0; i < m.weights.size(); ++i) os << m.weights[i] << '\n';
}

namespace {

void read_header(std::istream& is, const std::string& expected_kind, double& reg,
                 Eigen::Index& dim) {
    std::string version, kind;
    if (!(is >> version >> kind >> reg >> dim) || version != kFormatVersion ||
        kind != expected_kind)
        throw ingestion_error("model load: bad header");
}

}  // namespace

RidgeModel load_ridge_model(std::istream& is) {
    RidgeModel m;
    Eigen::Index dim = 0;
    read_header(is, "ridge", m.lambda, dim);
    if (!(is >> m.intercept)) throw ingestion_error("model load: truncated");
    m.weights.resize(dim);
    for (Eigen::Index i = 0; i < dim; ++i)
        if (!(is >> m.weights[i])) throw ingestion_error("model load: truncated");
    return m;
}

SvmModel load_svm_model(std::istream& is) {
    SvmModel m;
    Eigen::Index dim = 0;
    read_header(is, "svm", m.c, dim);
    if (!(is >> m.bias)) throw ingestion_error("model load: truncated");
    m.weights.resize(dim);
    for (Eigen::Index i = 0; i < dim; ++i)
        if (!(is >> m.weights[i])) throw ingestion_error("model load: truncated");
    return m;
}

}  // namespace qkf
