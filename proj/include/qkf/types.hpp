#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace qkf {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;

struct invalid_input : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ingestion_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct singular_matrix_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct degenerate_kernel_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace qkf
