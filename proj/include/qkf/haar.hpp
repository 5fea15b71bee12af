#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "qkf/quantum_sim.hpp"
#include "qkf/types.hpp"

namespace qkf {

// Haar-distributed unitary on n qubits: QR of a complex Ginibre matrix with
// the phase-fixing diagonal correction.
ComplexMatrix sample_haar_unitary(int n_qubits, std::mt19937_64& rng);

// Partial trace of |u><v| keeping the qubits in q.
ComplexMatrix partial_trace_outer(const ComplexVector& u, const ComplexVector& v,
                                  const QubitSubset& q, int n_qubits);

// Apply an n-qubit Pauli string to a full statevector.
ComplexVector apply_pauli(const ComplexVector& psi, const PauliString& p);

struct ReducedObservableSpec {
    int n_qubits;
    QubitSubset q;
    std::int64_t pauli_j;  // 1-based indices over n qubits, non-identity
    std::int64_t pauli_l;
    ComplexVector reference_state;  // pure; defaults to |0...0>
    std::vector<double> gammas;

    static ReducedObservableSpec make(int n_qubits, QubitSubset q, std::int64_t j,
                                      std::int64_t l, std::vector<double> gammas);
};

// <a| Tr_{!=q}( U P_j U^+ rho U P_l U^+ ) |b> for pure rho.
Complex reduced_observable_element(const ComplexMatrix& u,
                                   const ReducedObservableSpec& spec,
                                   Eigen::Index a, Eigen::Index b);

struct HaarMomentRow {
    int n, m;
    std::int64_t j, l;
    Eigen::Index a, b;
    std::int64_t samples;
    double moment1_est, moment1_se, moment1_pred;
    double moment2_est, moment2_se, moment2_pred;
};

// Wg([1,1,1,1]) on the 2^n-dimensional unitary group.
double weingarten_1111(int n_qubits);

// Monte-Carlo first and second moments of O_{jl}^{ab} against the closed-form
// predictions.  moment1 is the real part of the average; moment2 is E|O|^2.
HaarMomentRow haar_moment_report(const ReducedObservableSpec& spec, Eigen::Index a,
                                 Eigen::Index b, std::int64_t samples,
                                 std::mt19937_64& rng);

struct RoKernelPair {
    double q_ro;          // all (j, l) cross terms kept
    double q_ro_reduced;  // j = l terms only
};

// Both reduced-observable kernels for a single subset (K = 1, alpha = 1),
// with explicit encoding unitaries.
RoKernelPair ro_kernel_pair(const ComplexMatrix& u, const ComplexMatrix& u_prime,
                            const ReducedObservableSpec& spec,
                            const std::vector<std::int64_t>& pauli_indices);

// Same, with U(x) taken from the data-encoding circuit.
RoKernelPair ro_kernel_pair(const Vector& x, const Vector& x_prime,
                            const ReducedObservableSpec& spec,
                            const std::vector<std::int64_t>& pauli_indices);

// Dense matrix of the encoding circuit, for RO kernels over encode(x).
ComplexMatrix encode_unitary(const Vector& angles);

}  // namespace qkf
