#include "qkf/quantum_sim.hpp"

#include <algorithm>
#include <cmath>

namespace qkf {

namespace {

// Bit position of 1-based qubit label in the amplitude index.
inline int bit_of(int qubit, int n_qubits) { return n_qubits - qubit; }

}  // namespace

Statevector::Statevector(int n_qubits, ComplexVector amplitudes)
    : n_qubits_(n_qubits), amplitudes_(std::move(amplitudes)) {
    if (n_qubits_ < 1) throw invalid_input("Statevector: n_qubits must be >= 1");
    if (amplitudes_.size() != (Eigen::Index(1) << n_qubits_))
        throw invalid_input("Statevector: amplitude length is not 2^n");
    if (std::abs(amplitudes_.norm() - 1.0) > 1e-12)
        throw invalid_input("Statevector: amplitudes are not normalized");
}

Statevector Statevector::zero(int n_qubits) {
    if (n_qubits < 1) throw invalid_input("Statevector: n_qubits must be >= 1");
    ComplexVector amps = ComplexVector::Zero(Eigen::Index(1) << n_qubits);
    amps[0] = 1.0;
    return Statevector(n_qubits, std::move(amps));
}

void Statevector::apply_hadamard(int qubit) {
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    const Eigen::Index mask = Eigen::Index(1) << bit_of(qubit, n_qubits_);
    for (Eigen::Index i = 0; i < amplitudes_.size(); ++i) {
        if (i & mask) continue;
        const Complex a0 = amplitudes_[i];
        const Complex a1 = amplitudes_[i | mask];
        amplitudes_[i] = inv_sqrt2 * (a0 + a1);
        amplitudes_[i | mask] = inv_sqrt2 * (a0 - a1);
    }
}

void Statevector::apply_ry(int qubit, double theta) {
    if (!std::isfinite(theta)) throw invalid_input("apply_ry: non-finite angle");
    const double c = std::cos(theta / 2.0);
    const double s = std::sin(theta / 2.0);
    const Eigen::Index mask = Eigen::Index(1) << bit_of(qubit, n_qubits_);
    for (Eigen::Index i = 0; i < amplitudes_.size(); ++i) {
        if (i & mask) continue;
        const Complex a0 = amplitudes_[i];
        const Complex a1 = amplitudes_[i | mask];
        amplitudes_[i] = c * a0 - s * a1;
        amplitudes_[i | mask] = s * a0 + c * a1;
    }
}

void Statevector::apply_cnot(int control, int target) {
    const Eigen::Index cmask = Eigen::Index(1) << bit_of(control, n_qubits_);
    const Eigen::Index tmask = Eigen::Index(1) << bit_of(target, n_qubits_);
    for (Eigen::Index i = 0; i < amplitudes_.size(); ++i) {
        if ((i & cmask) && !(i & tmask)) std::swap(amplitudes_[i], amplitudes_[i | tmask]);
    }
}

QubitSubset::QubitSubset(std::vector<int> indices) : indices_(std::move(indices)) {
    if (indices_.empty()) throw invalid_input("QubitSubset: empty subset");
    for (std::size_t i = 0; i < indices_.size(); ++i) {
        if (indices_[i] < 1) throw invalid_input("QubitSubset: labels are 1-based");
        if (i > 0 && indices_[i] <= indices_[i - 1])
            throw invalid_input("QubitSubset: labels must be strictly increasing");
    }
}

void QubitSubset::validate_for(int n_qubits) const {
    if (indices_.back() > n_qubits)
        throw invalid_input("QubitSubset: label exceeds qubit count");
}

PauliString::PauliString(int m_qubits, std::vector<PauliLetter> letters)
    : m_qubits_(m_qubits), letters_(std::move(letters)) {
    if (m_qubits_ < 1) throw invalid_input("PauliString: m_qubits must be >= 1");
    if (letters_.size() != static_cast<std::size_t>(m_qubits_))
        throw invalid_input("PauliString: letter count mismatch");
}

PauliString PauliString::from_index(int m_qubits, std::int64_t index) {
    const std::int64_t count = std::int64_t(1) << (2 * m_qubits);
    if (index < 1 || index > count) throw invalid_input("PauliString: index out of range");
    std::vector<PauliLetter> letters(m_qubits);
    std::int64_t rem = index - 1;
    for (int i = m_qubits - 1; i >= 0; --i) {
        letters[i] = static_cast<PauliLetter>(rem & 3);
        rem >>= 2;
    }
    return PauliString(m_qubits, std::move(letters));
}

std::int64_t PauliString::index() const {
    std::int64_t idx = 0;
    for (PauliLetter l : letters_) idx = (idx << 2) | static_cast<int>(l);
    return idx + 1;
}

bool PauliString::is_identity() const {
    return std::all_of(letters_.begin(), letters_.end(),
                       [](PauliLetter l) { return l == PauliLetter::I; });
}

ComplexMatrix PauliString::dense() const {
    static const Complex i(0.0, 1.0);
    ComplexMatrix out = ComplexMatrix::Identity(1, 1);
    for (PauliLetter l : letters_) {
        ComplexMatrix s(2, 2);
        switch (l) {
            case PauliLetter::I: s << 1, 0, 0, 1; break;
            case PauliLetter::X: s << 0, 1, 1, 0; break;
            case PauliLetter::Y: s << 0, -i, i, 0; break;
            case PauliLetter::Z: s << 1, 0, 0, -1; break;
        }
        // out = kron(out, s): qubit 1's letter stays the most significant factor.
        ComplexMatrix next(out.rows() * 2, out.cols() * 2);
        for (Eigen::Index r = 0; r < out.rows(); ++r)
            for (Eigen::Index c = 0; c < out.cols(); ++c)
                next.block(r * 2, c * 2, 2, 2) = out(r, c) * s;
        out = std::move(next);
    }
    return out;
}

ReducedDensityMatrix::ReducedDensityMatrix(int m_qubits, ComplexMatrix entries)
    : m_qubits_(m_qubits), entries_(std::move(entries)) {
    const Eigen::Index d = Eigen::Index(1) << m_qubits_;
    if (entries_.rows() != d || entries_.cols() != d)
        throw invalid_input("ReducedDensityMatrix: dimension is not 2^m");
    if ((entries_ - entries_.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
        throw invalid_input("ReducedDensityMatrix: not Hermitian");
    if (std::abs(entries_.trace().real() - 1.0) > 1e-10 ||
        std::abs(entries_.trace().imag()) > 1e-10)
        throw invalid_input("ReducedDensityMatrix: trace != 1");
}

double ReducedDensityMatrix::purity() const {
    return (entries_ * entries_).trace().real();
}

Statevector encode(const Vector& angles) {
    const int n = static_cast<int>(angles.size());
    if (n < 1) throw invalid_input("encode: empty angle vector");
    for (int j = 0; j < n; ++j)
        if (!std::isfinite(angles[j])) throw invalid_input("encode: non-finite angle");

    Statevector state = Statevector::zero(n);
    for (int j = 1; j <= n; ++j) state.apply_hadamard(j);
    for (int j = 1; j <= n; ++j) state.apply_ry(j, angles[j - 1]);
    for (int j = 1; j <= n; ++j)
        for (int k = j + 1; k <= n; ++k) state.apply_cnot(j, k);
    return state;
}

ReducedDensityMatrix reduced_density_matrix(const Statevector& state,
                                            const QubitSubset& q) {
    q.validate_for(state.n_qubits());
    const int n = state.n_qubits();
    const int m = q.size();
    const int t = n - m;

    // Bit positions of kept qubits, most significant first within the subset.
    std::vector<int> kept_bits(m);
    for (int i = 0; i < m; ++i) kept_bits[i] = bit_of(q.indices()[i], n);
    std::vector<bool> is_kept(n, false);
    for (int b : kept_bits) is_kept[b] = true;
    std::vector<int> traced_bits;
    for (int b = n - 1; b >= 0; --b)
        if (!is_kept[b]) traced_bits.push_back(b);

    auto full_index = [&](Eigen::Index kept, Eigen::Index traced) {
        Eigen::Index idx = 0;
        for (int i = 0; i < m; ++i)
            if (kept & (Eigen::Index(1) << (m - 1 - i))) idx |= Eigen::Index(1) << kept_bits[i];
        for (int i = 0; i < t; ++i)
            if (traced & (Eigen::Index(1) << (t - 1 - i))) idx |= Eigen::Index(1) << traced_bits[i];
        return idx;
    };

    const Eigen::Index dm = Eigen::Index(1) << m;
    const Eigen::Index dt = Eigen::Index(1) << t;
    const ComplexVector& psi = state.amplitudes();
    ComplexMatrix rho = ComplexMatrix::Zero(dm, dm);
    for (Eigen::Index a = 0; a < dm; ++a)
        for (Eigen::Index b = 0; b < dm; ++b) {
            Complex sum = 0.0;
            for (Eigen::Index e = 0; e < dt; ++e)
                sum += psi[full_index(a, e)] * std::conj(psi[full_index(b, e)]);
            rho(a, b) = sum;
        }
    return ReducedDensityMatrix(m, std::move(rho));
}

double pauli_expectation(const ReducedDensityMatrix& rdm, const PauliString& p) {
    if (p.m_qubits() != rdm.m_qubits())
        throw invalid_input("pauli_expectation: dimension mismatch");
    static const Complex imag_unit(0.0, 1.0);
    const int m = rdm.m_qubits();
    const Eigen::Index dim = rdm.dim();
    const ComplexMatrix& rho = rdm.entries();

    // P has one nonzero entry per column: Tr(P rho) = sum_b P_{a(b),b} rho(b, a(b)).
    Complex trace = 0.0;
    for (Eigen::Index b = 0; b < dim; ++b) {
        Eigen::Index a = b;
        Complex phase = 1.0;
        for (int qi = 0; qi < m; ++qi) {
            const Eigen::Index mask = Eigen::Index(1) << (m - 1 - qi);
            const bool bit = (b & mask) != 0;
            switch (p.letters()[qi]) {
                case PauliLetter::I: break;
                case PauliLetter::X: a ^= mask; break;
                case PauliLetter::Y:
                    a ^= mask;
                    phase *= bit ? -imag_unit : imag_unit;
                    break;
                case PauliLetter::Z:
                    if (bit) phase = -phase;
                    break;
            }
        }
        trace += phase * rho(b, a);
    }
    if (std::abs(trace.imag()) > 1e-10)
        throw invalid_input("pauli_expectation: trace has non-negligible imaginary part");
    const double value = trace.real();
    if (value < -1.0 - 1e-10 || value > 1.0 + 1e-10)
        throw invalid_input("pauli_expectation: value outside [-1, 1]");
    return value;
}

double sample_pauli_expectation(double mu, std::int64_t n_s, std::mt19937_64& rng) {
    if (std::abs(mu) > 1.0) throw invalid_input("sample_pauli_expectation: |mu| > 1");
    if (n_s < 1) throw invalid_input("sample_pauli_expectation: n_s must be >= 1");
    std::binomial_distribution<std::int64_t> dist(n_s, (1.0 + mu) / 2.0);
    const std::int64_t k = dist(rng);
    return 2.0 * static_cast<double>(k) / static_cast<double>(n_s) - 1.0;
}

double hs_distance_sq(const ReducedDensityMatrix& a, const ReducedDensityMatrix& b) {
    if (a.m_qubits() != b.m_qubits())
        throw invalid_input("hs_distance_sq: dimension mismatch");
    const ComplexMatrix diff = a.entries() - b.entries();
    return 0.25 * diff.squaredNorm();
}

double hs_norm(const ReducedDensityMatrix& a, const ReducedDensityMatrix& b) {
    return std::sqrt(hs_distance_sq(a, b));
}

Vector pauli_vector(const ReducedDensityMatrix& rdm) {
    const int m = rdm.m_qubits();
    const double nq = static_cast<double>(Eigen::Index(1) << m);
    const std::int64_t count = std::int64_t(1) << (2 * m);
    Vector c(count);
    for (std::int64_t j = 1; j <= count; ++j)
        c[j - 1] = pauli_expectation(rdm, PauliString::from_index(m, j)) / nq;
    return c;
}

}  // namespace qkf
