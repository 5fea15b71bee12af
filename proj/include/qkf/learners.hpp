#pragma once

#include <iosfwd>
#include <random>
#include <string>

#include "qkf/types.hpp"

namespace qkf {

struct RidgeModel {
    Vector weights;
    double intercept = 0.0;
    double lambda = 0.0;

    double predict(const Vector& z) const { return intercept + weights.dot(z); }
    Vector predict(const Matrix& z) const {
        return (z * weights).array() + intercept;
    }
};

struct KernelRidgeModel {
    Vector coefficients;  // length M
    double lambda = 0.0;
    double y_mean = 0.0;
    bool ill_conditioned = false;  // condition estimate of Q + lambda I > 1e14

    // kernel_columns(i, j) = Q(x_train_i, x_test_j)
    Vector predict(const Matrix& kernel_columns) const {
        return (kernel_columns.transpose() * coefficients).array() + y_mean;
    }
};

struct SvmModel {
    Vector weights;
    double bias = 0.0;
    double c = 1.0;
    double duality_gap = 0.0;
    int epochs = 0;

    double decision(const Vector& z) const { return weights.dot(z) + bias; }
    Vector decision(const Matrix& z) const { return (z * weights).array() + bias; }
};

// min ||y - Zw - b||^2 + lambda ||w||^2, intercept unpenalized.
RidgeModel ridge_fit(const Matrix& z, const Vector& y, double lambda);

// a = (Q + lambda I)^{-1} (y - ybar); prediction ybar + sum_j a_j Q(x_j, x).
KernelRidgeModel kernel_ridge_fit(const Matrix& q, const Vector& y, double lambda);

// Soft-margin linear SVM with hinge loss, solved by dual coordinate descent.
// The bias is carried as an augmented unit feature.  Terminates at duality
// gap <= 1e-4 * C * M or 1000 epochs; the visiting order is seeded.
SvmModel svm_fit(const Matrix& z, const Vector& y, double c, std::mt19937_64& rng);

double svm_primal_objective(const SvmModel& model, const Matrix& z, const Vector& y);

struct Metrics {
    double mse = 0.0;
    double accuracy = 0.0;
};

Metrics evaluate_regression(const Vector& predictions, const Vector& y);
Metrics evaluate_classification(const Vector& decisions, const Vector& y);

// Versioned flat text round-trip for the three model kinds.
void save_model(std::ostream& os, const RidgeModel& m);
void save_model(std::ostream& os, const SvmModel& m);
RidgeModel load_ridge_model(std::istream& is);
SvmModel load_svm_model(std::istream& is);

}  // namespace qkf
