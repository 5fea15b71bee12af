#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "qkf/types.hpp"

namespace qkf {

// Pure n-qubit state.  Qubit 1 is the most significant bit of the amplitude
// index, matching the top wire of the encoding circuit.
class Statevector {
  public:
    Statevector(int n_qubits, ComplexVector amplitudes);

    static Statevector zero(int n_qubits);

    int n_qubits() const { return n_qubits_; }
    Eigen::Index dim() const { return amplitudes_.size(); }
    const ComplexVector& amplitudes() const { return amplitudes_; }

    void apply_hadamard(int qubit);
    void apply_ry(int qubit, double theta);
    void apply_cnot(int control, int target);

  private:
    int n_qubits_;
    ComplexVector amplitudes_;
};

// Strictly increasing 1-based qubit labels.
class QubitSubset {
  public:
    explicit QubitSubset(std::vector<int> indices);

    int size() const { return static_cast<int>(indices_.size()); }
    const std::vector<int>& indices() const { return indices_; }
    void validate_for(int n_qubits) const;

  private:
    std::vector<int> indices_;
};

enum class PauliLetter : int { I = 0, X = 1, Y = 2, Z = 3 };

// Tensor product of single-qubit Paulis over m qubits, indexed 1..4^m in
// base-4 lexicographic order (letter of qubit 1 = most significant digit).
class PauliString {
  public:
    PauliString(int m_qubits, std::vector<PauliLetter> letters);
    static PauliString from_index(int m_qubits, std::int64_t index);

    int m_qubits() const { return m_qubits_; }
    const std::vector<PauliLetter>& letters() const { return letters_; }
    std::int64_t index() const;
    bool is_identity() const;

    ComplexMatrix dense() const;

  private:
    int m_qubits_;
    std::vector<PauliLetter> letters_;
};

class ReducedDensityMatrix {
  public:
    ReducedDensityMatrix(int m_qubits, ComplexMatrix entries);

    int m_qubits() const { return m_qubits_; }
    Eigen::Index dim() const { return entries_.rows(); }
    const ComplexMatrix& entries() const { return entries_; }

    double purity() const;

  private:
    int m_qubits_;
    ComplexMatrix entries_;
};

// Data-encoding circuit U(x) = U_ent U_Y({x_j}) H^{otimes n} applied to |0..0>.
// The entangler is the ladder CNOT(j, j+1) ... CNOT(j, n) for j = 1..n.
Statevector encode(const Vector& angles);

ReducedDensityMatrix reduced_density_matrix(const Statevector& state,
                                            const QubitSubset& q);

double pauli_expectation(const ReducedDensityMatrix& rdm, const PauliString& p);

// Unbiased shot-noise model: a Pauli measurement outcome is a +-1 Bernoulli
// with mean mu, so n_s shots reduce to one Binomial draw.
double sample_pauli_expectation(double mu, std::int64_t n_s, std::mt19937_64& rng);

// (1/4) Tr((a - b)^2), in [0, 1].
double hs_distance_sq(const ReducedDensityMatrix& a, const ReducedDensityMatrix& b);
double hs_norm(const ReducedDensityMatrix& a, const ReducedDensityMatrix& b);

// c_j = Tr(P_j rho) / N_q in canonical Pauli order, length N_q^2.
Vector pauli_vector(const ReducedDensityMatrix& rdm);

}  // namespace qkf
