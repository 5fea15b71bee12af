#include "qkf/haar.hpp"

#include <cmath>

namespace qkf {

ComplexMatrix sample_haar_unitary(int n_qubits, std::mt19937_64& rng) {
    const Eigen::Index dim = Eigen::Index(1) << n_qubits;
    std::normal_distribution<double> normal(0.0, 1.0);
    ComplexMatrix ginibre(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i)
        for (Eigen::Index j = 0; j < dim; ++j)
            ginibre(i, j) = Complex(normal(rng), normal(rng));

    Eigen::HouseholderQR<ComplexMatrix> qr(ginibre);
    ComplexMatrix q = qr.householderQ();
    const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < dim; ++j) {
        const Complex d = r(j, j);
        q.col(j) *= d / std::abs(d);
    }
    return q;
}

ComplexMatrix partial_trace_outer(const ComplexVector& u, const ComplexVector& v,
                                  const QubitSubset& q, int n_qubits) {
    q.validate_for(n_qubits);
    if (u.size() != (Eigen::Index(1) << n_qubits) || v.size() != u.size())
        throw invalid_input("partial_trace_outer: dimension mismatch");
    const int m = q.size();
    const int t = n_qubits - m;

    std::vector<int> kept_bits(m);
    for (int i = 0; i < m; ++i) kept_bits[i] = n_qubits - q.indices()[i];
    std::vector<bool> is_kept(n_qubits, false);
    for (int b : kept_bits) is_kept[b] = true;
    std::vector<int> traced_bits;
    for (int b = n_qubits - 1; b >= 0; --b)
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
    ComplexMatrix out = ComplexMatrix::Zero(dm, dm);
    for (Eigen::Index a = 0; a < dm; ++a)
        for (Eigen::Index b = 0; b < dm; ++b) {
            Complex sum = 0.0;
            for (Eigen::Index e = 0; e < dt; ++e)
                sum += u[full_index(a, e)] * std::conj(v[full_index(b, e)]);
            out(a, b) = sum;
        }
    return out;
}

ComplexVector apply_pauli(const ComplexVector& psi, const PauliString& p) {
    const int n = p.m_qubits();
    if (psi.size() != (Eigen::Index(1) << n))
        throw invalid_input("apply_pauli: dimension mismatch");
    static const Complex imag_unit(0.0, 1.0);
    ComplexVector out(psi.size());
    for (Eigen::Index b = 0; b < psi.size(); ++b) {
        Eigen::Index a = b;
        Complex phase = 1.0;
        for (int qi = 0; qi < n; ++qi) {
            const Eigen::Index mask = Eigen::Index(1) << (n - 1 - qi);
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
        out[a] = phase * psi[b];
    }
    return out;
}

ReducedObservableSpec ReducedObservableSpec::make(int n_qubits, QubitSubset q,
                                                  std::int64_t j, std::int64_t l,
                                                  std::vector<double> gammas) {
    q.validate_for(n_qubits);
    auto check = [n_qubits](std::int64_t idx) {
        const PauliString p = PauliString::from_index(n_qubits, idx);
        if (p.is_identity())
            throw invalid_input("ReducedObservableSpec: Pauli must be non-identity");
    };
    check(j);
    check(l);
    ComplexVector ref = ComplexVector::Zero(Eigen::Index(1) << n_qubits);
    ref[0] = 1.0;
    return ReducedObservableSpec{n_qubits, std::move(q), j, l, std::move(ref),
                                 std::move(gammas)};
}

namespace {

// U P U^+ |psi> for pure reference; the conjugated observable acts as three
// cheap passes instead of a dense similarity transform.
ComplexVector conjugated_pauli_apply(const ComplexMatrix& u, const PauliString& p,
                                     const ComplexVector& psi) {
    const ComplexVector tmp = u.adjoint() * psi;
    return u * apply_pauli(tmp, p);
}

}  // namespace

Complex reduced_observable_element(const ComplexMatrix& u,
                                   const ReducedObservableSpec& spec,
                                   Eigen::Index a, Eigen::Index b) {
    const Eigen::Index dm = Eigen::Index(1) << spec.q.size();
    if (a < 0 || b < 0 || a >= dm || b >= dm)
        throw invalid_input("reduced_observable_element: index out of range");
    const PauliString pj = PauliString::from_index(spec.n_qubits, spec.pauli_j);
    const PauliString pl = PauliString::from_index(spec.n_qubits, spec.pauli_l);
    // For pure rho = |psi><psi|: U Pj U+ rho U Pl U+ = |w_j><w_l| with
    // w = U P U+ psi (P Hermitian).
    const ComplexVector wj = conjugated_pauli_apply(u, pj, spec.reference_state);
    const ComplexVector wl = conjugated_pauli_apply(u, pl, spec.reference_state);
    return partial_trace_outer(wj, wl, spec.q, spec.n_qubits)(a, b);
}

double weingarten_1111(int n_qubits) {
    const double d2 = std::pow(2.0, 2.0 * n_qubits);
    const double num = d2 * d2 - 8.0 * d2 + 6.0;
    const double den = std::pow(d2, 4) - 14.0 * std::pow(d2, 3) + 49.0 * d2 * d2 - 36.0 * d2;
    return num / den;
}

HaarMomentRow haar_moment_report(const ReducedObservableSpec& spec, Eigen::Index a,
                                 Eigen::Index b, std::int64_t samples,
                                 std::mt19937_64& rng) {
    if (samples < 1000) throw invalid_input("haar_moment_report: R must be >= 1000");
    double sum1 = 0.0, sum1_sq = 0.0;
    double sum2 = 0.0, sum2_sq = 0.0;
    for (std::int64_t r = 0; r < samples; ++r) {
        const ComplexMatrix u = sample_haar_unitary(spec.n_qubits, rng);
        const Complex o = reduced_observable_element(u, spec, a, b);
        const double re = o.real();
        const double abs2 = std::norm(o);
        sum1 += re;
        sum1_sq += re * re;
        sum2 += abs2;
        sum2_sq += abs2 * abs2;
    }
    const double inv_r = 1.0 / static_cast<double>(samples);
    HaarMomentRow row;
    row.n = spec.n_qubits;
    row.m = spec.q.size();
    row.j = spec.pauli_j;
    row.l = spec.pauli_l;
    row.a = a;
    row.b = b;
    row.samples = samples;
    row.moment1_est = sum1 * inv_r;
    row.moment1_se = std::sqrt(std::max(0.0, sum1_sq * inv_r - row.moment1_est * row.moment1_est) * inv_r);
    row.moment2_est = sum2 * inv_r;
    row.moment2_se = std::sqrt(std::max(0.0, sum2_sq * inv_r - row.moment2_est * row.moment2_est) * inv_r);

    const bool diagonal = (spec.pauli_j == spec.pauli_l) && (a == b);
    const double d2 = std::pow(2.0, 2.0 * spec.n_qubits);
    row.moment1_pred =
        diagonal ? std::pow(2.0, 2.0 * spec.n_qubits - spec.q.size()) / (d2 - 1.0) : 0.0;
    row.moment2_pred =
        diagonal ? std::pow(2.0, 4.0 * spec.n_qubits - 2.0 * spec.q.size()) *
                       weingarten_1111(spec.n_qubits)
                 : 0.0;
    return row;
}

RoKernelPair ro_kernel_pair(const ComplexMatrix& u, const ComplexMatrix& u_prime,
                            const ReducedObservableSpec& spec,
                            const std::vector<std::int64_t>& pauli_indices) {
    if (pauli_indices.size() != spec.gammas.size())
        throw invalid_input("ro_kernel_pair: gamma/Pauli count mismatch");
    const std::size_t terms = pauli_indices.size();

    auto reduced_obs = [&](const ComplexMatrix& enc, bool cross_terms) {
        std::vector<ComplexVector> w(terms);
        for (std::size_t j = 0; j < terms; ++j)
            w[j] = conjugated_pauli_apply(
                enc, PauliString::from_index(spec.n_qubits, pauli_indices[j]),
                spec.reference_state);
        const Eigen::Index dm = Eigen::Index(1) << spec.q.size();
        ComplexMatrix acc = ComplexMatrix::Zero(dm, dm);
        for (std::size_t j = 0; j < terms; ++j)
            for (std::size_t l = 0; l < terms; ++l) {
                if (!cross_terms && j != l) continue;
                acc += spec.gammas[j] * spec.gammas[l] *
                       partial_trace_outer(w[j], w[l], spec.q, spec.n_qubits);
            }
        return acc;
    };

    RoKernelPair out;
    out.q_ro = (reduced_obs(u, true) * reduced_obs(u_prime, true)).trace().real();
    out.q_ro_reduced =
        (reduced_obs(u, false) * reduced_obs(u_prime, false)).trace().real();
    return out;
}

ComplexMatrix encode_unitary(const Vector& angles) {
    const int n = static_cast<int>(angles.size());
    const Eigen::Index dim = Eigen::Index(1) << n;
    ComplexMatrix u(dim, dim);
    // Columns are U|b> for each basis state b, built with the statevector path.
    for (Eigen::Index b = 0; b < dim; ++b) {
        ComplexVector basis = ComplexVector::Zero(dim);
        basis[b] = 1.0;
        Statevector state(n, basis);
        for (int j = 1; j <= n; ++j) state.apply_hadamard(j);
        for (int j = 1; j <= n; ++j) state.apply_ry(j, angles[j - 1]);
        for (int j = 1; j <= n; ++j)
            for (int k = j + 1; k <= n; ++k) state.apply_cnot(j, k);
        u.col(b) = state.amplitudes();
    }
    return u;
}

RoKernelPair ro_kernel_pair(const Vector& x, const Vector& x_prime,
                            const ReducedObservableSpec& spec,
                            const std::vector<std::int64_t>& pauli_indices) {
    return ro_kernel_pair(encode_unitary(x), encode_unitary(x_prime), spec,
                          pauli_indices);
}

}  // namespace qkf
